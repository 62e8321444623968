#!/usr/bin/env python3
"""Regenerate the bundled grayscale test corpus under tests/data/corpus.

Crops come from the sample photographs shipped with scikit-image and
scikit-learn. Colour is reduced with the same integer BT.601 rule the C++
loader uses, so the PNGs are already 8-bit gray.
"""
import argparse
import os

import numpy as np
from PIL import Image
from skimage import data as skdata
from sklearn.datasets import load_sample_image

TILE = 192
TEST_TILE = 288

# (name, loader, number of tiles)
TRAIN = [
    ("camera", lambda: skdata.camera(), 8),
    ("astronaut", lambda: skdata.astronaut(), 8),
    ("coffee", lambda: skdata.coffee(), 8),
    ("motorcycle", lambda: skdata.stereo_motorcycle()[0], 8),
    ("china", lambda: load_sample_image("china.jpg"), 8),
    ("grass", lambda: skdata.grass(), 4),
    ("gravel", lambda: skdata.gravel(), 4),
    ("brick", lambda: skdata.brick(), 4),
    ("ihc", lambda: skdata.immunohistochemistry(), 4),
    ("hubble", lambda: skdata.hubble_deep_field(), 4),
]
TEST = [
    ("chelsea", lambda: skdata.chelsea(), 2),
    ("coins", lambda: skdata.coins(), 1),
    ("rocket", lambda: skdata.rocket(), 2),
    ("flower", lambda: load_sample_image("flower.jpg"), 2),
    ("moon", lambda: skdata.moon(), 1),
    ("retina", lambda: skdata.retina()[350:1050, 350:1050], 2),
]


def to_gray(img):
    img = np.asarray(img)
    if img.ndim == 2:
        return img.astype(np.uint8)
    rgb = img[..., :3].astype(np.int64)
    return ((299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000).astype(np.uint8)


def tiles(gray, count, size=TILE):
    h, w = gray.shape
    ys = np.linspace(0, h - size, num=max(2, int(np.ceil(np.sqrt(count)))), dtype=int)
    xs = np.linspace(0, w - size, num=max(2, int(np.ceil(count / len(ys)))), dtype=int)
    out = []
    for y in ys:
        for x in xs:
            out.append(gray[y:y + size, x:x + size])
    return out[:count]


def write_set(root, spec, size):
    os.makedirs(root, exist_ok=True)
    for name, load, count in spec:
        for i, tile in enumerate(tiles(to_gray(load()), count, size)):
            Image.fromarray(tile, mode="L").save(os.path.join(root, f"{name}_{i}.png"), optimize=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "data", "corpus"))
    args = ap.parse_args()
    write_set(os.path.join(args.out, "train"), TRAIN, TILE)
    write_set(os.path.join(args.out, "test"), TEST, TEST_TILE)
    chelsea = to_gray(skdata.chelsea())
    Image.fromarray(chelsea[:300, 75:375], mode="L").save(os.path.join(args.out, "sample300.png"), optimize=True)


if __name__ == "__main__":
    main()
