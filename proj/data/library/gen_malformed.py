"""Derives the malformed library variants from fixture.json. Each variant
breaks one rule; expected.json maps file name to the path of the violation."""

import copy
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def variants(base):
    def v(fn):
        doc = copy.deepcopy(base)
        path = fn(doc)
        return doc, path

    def unknown_widget(d):
        d["tasks"][2]["responses"]["efficiency"][4]["widget"] = "teleport_button"
        return "tasks[2].responses.efficiency[4].widget"

    def empty_tasks(d):
        d["tasks"] = []
        return "tasks"

    def missing_reason(d):
        del d["tasks"][0]["responses"]["predictability"][3]["reason"]
        return "tasks[0].responses.predictability[3].reason"

    def duplicate_task(d):
        d["tasks"][5]["name"] = d["tasks"][1]["name"]
        return "tasks[5].name"

    def bad_aspect(d):
        r = d["tasks"][3]["responses"]
        r["speed"] = r.pop("efficiency")
        return "tasks[3].responses.speed"

    def duplicate_rater(d):
        lst = d["tasks"][4]["responses"]["explorability"]
        lst[7]["rater_id"] = lst[6]["rater_id"]
        return "tasks[4].responses.explorability[7].rater_id"

    def unknown_tag(d):
        tags = d["tasks"][6]["tags"]
        tags.append("texture")
        return f"tasks[6].tags[{len(tags) - 1}]"

    def blank_description(d):
        d["tasks"][7]["description"] = "   "
        return "tasks[7].description"

    def missing_version(d):
        del d["version"]
        return "version"

    def responses_not_array(d):
        d["tasks"][1]["responses"]["predictability"] = {"widget": "slider"}
        return "tasks[1].responses.predictability"

    for fn in [unknown_widget, empty_tasks, missing_reason, duplicate_task, bad_aspect,
               duplicate_rater, unknown_tag, blank_description, missing_version,
               responses_not_array]:
        doc, path = v(fn)
        yield fn.__name__ + ".json", doc, path


def main():
    with open(os.path.join(HERE, "fixture.json")) as f:
        base = json.load(f)
    out_dir = os.path.join(HERE, "malformed")
    os.makedirs(out_dir, exist_ok=True)
    expected = {}
    for name, doc, path in variants(base):
        with open(os.path.join(out_dir, name), "w") as f:
            json.dump(doc, f, indent=1)
        expected[name] = path
    with open(os.path.join(out_dir, "expected.json"), "w") as f:
        json.dump(expected, f, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
