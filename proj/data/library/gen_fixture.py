"""Builds fixture.json: 8 tasks x 3 aspects x 30 synthetic responses.

Widget counts per (task, aspect) are fixed below; rater ids and reasons are
drawn with a fixed seed so the output is byte-stable.
"""
import json
import random
from pathlib import Path

SEED = 20240611
RATERS = [f"r{i:02d}" for i in range(1, 51)]

TASKS = [
    ("image_adjust_lightness",
     "Experiment with lightness settings to see how different levels affect the image.",
     ["continuous", "discrete"],
     {"predictability": {"preset_buttons": 20, "text_field": 7, "slider": 3},
      "efficiency": {"preset_buttons": 24, "slider": 4, "radio_buttons": 2},
      "explorability": {"slider": 26, "radio_buttons": 2, "text_field": 2}}),
    ("image_adjust_saturation",
     "Boost the saturation to make the colors pop.",
     ["continuous", "discrete"],
     {"predictability": {"preset_buttons": 26, "text_field": 2, "slider": 1, "dropdown": 1},
      "efficiency": {"preset_buttons": 18, "slider": 3, "dropdown": 3, "radio_buttons": 3, "text_field": 3},
      "explorability": {"slider": 26, "preset_buttons": 3, "dropdown": 1}}),
    ("image_adjust_hue",
     "Experiment with different hues to find a color tone that complements the overall mood of the image.",
     ["continuous", "discrete", "color"],
     {"predictability": {"preset_buttons": 16, "radio_buttons": 6, "slider": 5, "dropdown": 2, "text_field": 1},
      "efficiency": {"preset_buttons": 22, "text_field": 3, "dropdown": 2, "radio_buttons": 1, "color_wheel": 1, "color_picker": 1},
      "explorability": {"color_wheel": 26, "text_field": 3, "dropdown": 1}}),
    ("image_adjust_fall_color",
     "Adjust the color settings to gradually shift the image tones, creating a warm, autumnal atmosphere. "
     "Ensure the final image is the one that looks the most autumnal to you.",
     ["color"],
     {"predictability": {"color_picker": 18, "color_wheel": 10, "dropdown": 2},
      "efficiency": {"preset_buttons": 17, "color_wheel": 4, "slider": 3, "text_field": 3, "color_picker": 2, "dropdown": 1},
      "explorability": {"color_wheel": 21, "color_picker": 8, "preset_buttons": 1}}),
    ("image_color_match",
     "Change the rocket's color to match the provided reference color. "
     "Ensure the rocket's color in the final image best matches the reference color.",
     ["color"],
     {"predictability": {"color_picker": 9, "color_wheel": 7, "preset_buttons": 6, "text_field": 6, "slider": 2},
      "efficiency": {"text_field": 16, "slider": 6, "dropdown": 6, "color_picker": 1, "preset_buttons": 1},
      "explorability": {"color_wheel": 21, "color_picker": 8, "text_field": 1}}),
    ("image_adjust_color_balance",
     "Experiment with different color balance settings to see how altering the red, green, and blue levels "
     "affects the overall color harmony of the image.",
     ["color"],
     {"predictability": {"color_picker": 21, "color_wheel": 8, "dropdown": 1},
      "efficiency": {"preset_buttons": 16, "dropdown": 7, "color_picker": 4, "text_field": 3},
      "explorability": {"color_wheel": 21, "color_picker": 8, "text_field": 1}}),
    ("image_place_watermark",
     "Experiment with different watermark positions to find the perfect balance between visibility and subtlety.",
     ["position", "discrete"],
     {"predictability": {"preset_buttons": 16, "click_on_image": 11, "text_field": 1, "dropdown": 1, "radio_buttons": 1},
      "efficiency": {"preset_buttons": 15, "click_on_image": 11, "dropdown": 2, "slider": 1, "radio_buttons": 1},
      "explorability": {"click_on_image": 21, "slider": 8, "preset_buttons": 1}}),
    ("image_place_vignette",
     "Darken the background using a vignette effect except for the human face by properly positioning "
     "the circle around the face.",
     ["position", "discrete"],
     {"predictability": {"preset_buttons": 20, "click_on_image": 8, "text_field": 1, "radio_buttons": 1},
      "efficiency": {"click_on_image": 12, "preset_buttons": 10, "slider": 6, "text_field": 2},
      "explorability": {"click_on_image": 18, "slider": 9, "text_field": 1, "dropdown": 1, "radio_buttons": 1}}),
]

REASONS = {
    "slider": {
        "predictability": ["The handle position tells me roughly where the value sits.",
                           "Dragging gives a steady, visible change so I know what comes next."],
        "efficiency": ["One drag gets me close enough.",
                       "Faster than typing numbers."],
        "explorability": ["I can sweep the whole range and watch the image change.",
                          "Easy to try many values back and forth."],
    },
    "dropdown": {
        "predictability": ["Each option is named, so I know what I will get.",
                           "A fixed list means no surprises."],
        "efficiency": ["Pick from the list and done.",
                       "Two clicks at most."],
        "explorability": ["I can go through the options one at a time.",
                          "The list shows me what choices exist."],
    },
    "radio_buttons": {
        "predictability": ["All choices are visible at once.",
                           "I can see which setting is active."],
        "efficiency": ["A single click switches the setting.",
                       "No menu to open."],
        "explorability": ["Flipping between options is quick.",
                          "Every option is on screen to compare."],
    },
    "text_field": {
        "predictability": ["Typing an exact number gives an exact result.",
                           "I know precisely which value is applied."],
        "efficiency": ["If I know the value I just type it.",
                       "Pasting a code is the fastest way to get it exact."],
        "explorability": ["I can enter values outside the usual steps.",
                          "Trying specific numbers helps me compare."],
    },
    "preset_buttons": {
        "predictability": ["The preview on each button shows the result before I click.",
                           "I can tell from the thumbnail what each button does."],
        "efficiency": ["One click applies a good looking result.",
                       "No fine tuning needed, just pick one."],
        "explorability": ["Clicking through presets shows a few distinct looks.",
                          "Good for quickly comparing a handful of styles."],
    },
    "color_wheel": {
        "predictability": ["I can see where each color lies before choosing it.",
                           "The wheel layout makes the resulting color obvious."],
        "efficiency": ["Click the color I want directly.",
                       "Faster than adjusting several channels."],
        "explorability": ["Moving around the wheel shows every hue.",
                          "I can wander across colors and see them all."],
    },
    "color_picker": {
        "predictability": ["The swatch shows the exact color I will get.",
                           "I pick the color and it is applied as shown."],
        "efficiency": ["Selecting the color is a single step.",
                       "The picker goes straight to the color I want."],
        "explorability": ["The picker lets me try any shade.",
                          "Lots of colors to browse in one place."],
    },
    "click_on_image": {
        "predictability": ["The item goes where I click.",
                           "Pointing on the picture is the clearest way to place it."],
        "efficiency": ["One click places it.",
                       "No need to translate coordinates."],
        "explorability": ["I can click around the picture to try positions.",
                          "Easy to test many spots directly on the image."],
    },
}


def build():
    rng = random.Random(SEED)
    tasks = []
    for name, description, tags, dists in TASKS:
        responses = {}
        for aspect in ("predictability", "efficiency", "explorability"):
            counts = dists[aspect]
            assert sum(counts.values()) == 30, (name, aspect)
            widgets = [w for w, c in counts.items() for _ in range(c)]
            rng.shuffle(widgets)
            raters = sorted(rng.sample(RATERS, 30))
            responses[aspect] = [
                {"rater_id": r, "widget": w, "reason": rng.choice(REASONS[w][aspect])}
                for r, w in zip(raters, widgets)
            ]
        tasks.append({"name": name, "description": description, "tags": tags, "responses": responses})
    return {"version": "fixture-1", "tasks": tasks}


if __name__ == "__main__":
    out = Path(__file__).with_name("fixture.json")
    out.write_text(json.dumps(build(), indent=2) + "\n")
