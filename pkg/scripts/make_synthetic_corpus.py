#!/usr/bin/env python3
"""Generate a synthetic image corpus with paired object masks.

Each image is smooth noise with a brighter elliptical or square "object";
the mask marks the object pixels. Useful for exercising the coverage and
frequency tooling without a real dataset.

Usage: python scripts/make_synthetic_corpus.py --out data/ -n 50 --seed 0
"""

import argparse
import math
from pathlib import Path

import numpy as np
from PIL import Image

from pixmim import ImageTensor, save_image_png


def make_pair(rng: np.random.Generator, h: int, w: int):
    yy = np.arange(h)[:, None]
    xx = np.arange(w)[None, :]
    base = 0.25 + 0.5 * rng.random()
    background = base + 0.15 * np.sin(2 * math.pi * (yy / h + xx / w) * rng.integers(1, 4))
    if rng.random() < 0.5:
        side = round(math.sqrt(rng.uniform(0.2, 0.6) * h * w))
        top = int(rng.integers(0, max(1, h - side + 1)))
        left = int(rng.integers(0, max(1, w - side + 1)))
        obj = np.zeros((h, w), dtype=bool)
        obj[top : top + side, left : left + side] = True
    else:
        cy, cx = rng.uniform(0.25, 0.75) * h, rng.uniform(0.25, 0.75) * w
        ry, rx = rng.uniform(0.15, 0.4) * h, rng.uniform(0.15, 0.4) * w
        obj = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
    plane = np.clip(background + 0.3 * obj + 0.05 * rng.standard_normal((h, w)), 0, 1)
    rgb = np.stack([plane, np.roll(plane, 3, axis=0), np.roll(plane, 3, axis=1)])
    return ImageTensor(rgb), obj


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="corpus root (images/ and masks/ created)")
    ap.add_argument("-n", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--min-side", type=int, default=240)
    ap.add_argument("--max-side", type=int, default=400)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    root = Path(args.out)
    img_dir = root / "images"
    mask_dir = root / "masks"
    img_dir.mkdir(parents=True, exist_ok=True)
    mask_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.n):
        h = int(rng.integers(args.min_side, args.max_side + 1))
        w = int(rng.integers(args.min_side, args.max_side + 1))
        img, obj = make_pair(rng, h, w)
        save_image_png(img, img_dir / f"syn{i:04d}.png")
        Image.fromarray(obj.astype(np.uint8) * 255, mode="L").save(
            mask_dir / f"syn{i:04d}.png"
        )
    print(f"wrote {args.n} image/mask pairs under {root}")


if __name__ == "__main__":
    main()
