"""Regenerates the sample images and the Pillow-computed hue golden."""

import numpy as np
from PIL import Image

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "golden"))
from gen_hue_clip import adjust_hue  # noqa: E402


def landscape(size=64):
    y, x = np.mgrid[0:size, 0:size].astype(np.float64) / (size - 1)
    img = np.zeros((size, size, 3))
    sky = y < 0.6
    img[..., 0] = np.where(sky, 90 + 80 * y, 60 + 50 * x)
    img[..., 1] = np.where(sky, 150 + 60 * y, 130 + 60 * (1 - y))
    img[..., 2] = np.where(sky, 235 - 40 * y, 40 + 30 * x)
    sun = (x - 0.72) ** 2 + (y - 0.22) ** 2 < 0.012
    img[sun] = [250, 210, 80]
    trunk = (np.abs(x - 0.25) < 0.03) & (y > 0.45) & (y < 0.75)
    img[trunk] = [110, 70, 40]
    crown = (x - 0.25) ** 2 + (y - 0.4) ** 2 < 0.02
    img[crown, 0] = 40
    img[crown, 1] = 140 + 40 * np.sin(30 * x[crown])
    img[crown, 2] = 60
    rng = np.random.default_rng(7)
    img += rng.normal(0, 3, img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def gradient(size=16):
    x = np.linspace(0, 255, size)
    img = np.zeros((size, size, 3), dtype=np.uint8)
    img[..., 0] = x[None, :]
    img[..., 1] = x[:, None]
    img[..., 2] = 255 - x[None, :]
    return img


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    photo = Image.fromarray(landscape(), mode="RGB").convert("RGBA")
    photo.save(os.path.join(here, "landscape_64.png"))
    Image.fromarray(gradient(), mode="RGB").convert("RGBA").save(os.path.join(here, "gradient_16.png"))
    golden = adjust_hue(photo.convert("RGB"), 0.2).convert("RGBA")
    golden.save(os.path.join(here, "..", "golden", "landscape_64_hue_clip_0.2.png"))


if __name__ == "__main__":
    main()
