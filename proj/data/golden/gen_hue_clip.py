"""Regenerates hue_clip_4x4.json by running the reference notebook's
adjust_hue (Pillow HSV mode, int(hue * 255) shift, clip) on a fixed 4x4
image, plus a random sample of raw RGB->HSV->RGB conversions."""

import json
import random

import numpy as np
from PIL import Image

PIXELS = [
    [(255, 0, 0), (0, 255, 0), (0, 0, 255), (255, 255, 255)],
    [(128, 64, 32), (10, 200, 150), (250, 250, 5), (0, 0, 0)],
    [(90, 90, 91), (200, 120, 180), (33, 66, 99), (240, 16, 128)],
    [(1, 2, 3), (77, 0, 200), (180, 220, 40), (128, 128, 128)],
]
HUES = [0.0, 0.1, 0.2, 0.5, 0.8, 1.0]


def adjust_hue(image, hue):
    img_hsv = image.convert('HSV')
    np_img = np.array(img_hsv)
    hue_shift = int(hue * 255)
    np_img = np_img.astype(np.int32)
    np_img[..., 0] = (np_img[..., 0] + hue_shift)
    np_img = np.clip(np_img, 0, 255).astype(np.uint8)
    return Image.fromarray(np_img, mode='HSV').convert('RGB')


def main():
    src = Image.fromarray(np.array(PIXELS, dtype=np.uint8), mode='RGB')
    cases = []
    for h in HUES:
        out = np.array(adjust_hue(src, h)).tolist()
        cases.append({"h": h, "shift": int(h * 255), "output": out})

    rng = random.Random(20240611)
    sample = [[rng.randrange(256) for _ in range(3)] for _ in range(2048)]
    arr = np.array([sample], dtype=np.uint8)
    hsv = np.array(Image.fromarray(arr, mode='RGB').convert('HSV'))[0].tolist()
    back = np.array(Image.fromarray(np.array([hsv], dtype=np.uint8), mode='HSV').convert('RGB'))[0].tolist()
    doc = {
        "input": PIXELS,
        "cases": cases,
        "conversions": [{"rgb": s, "hsv": h, "rgb_back": b} for s, h, b in zip(sample, hsv, back)],
    }
    with open("hue_clip_4x4.json", "w") as f:
        json.dump(doc, f)


if __name__ == "__main__":
    main()
