#!/usr/bin/env python3
"""Compare foreground retention across crop strategies, with and without
patch masking.

Runs every augmentation over a corpus with object masks and prints the
mean coverage table; with 75% masking the masked means sit near a quarter
of the unmasked ones.

Usage: python scripts/coverage_study.py --images data/images --masks data/masks
"""

import argparse
import tempfile
from pathlib import Path

from pixmim.config import config_from_dict
from pixmim.pipeline import analyze_coverage_run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--images", required=True)
    ap.add_argument("--masks", required=True)
    ap.add_argument("--kinds", default="src,rrc,cc,resize,bg")
    ap.add_argument("--resolution", type=int, default=224)
    ap.add_argument("--mask-ratio", type=float, default=0.75)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="CSV path (temp file if omitted)")
    args = ap.parse_args()

    cfg = config_from_dict(
        {
            "augment": {"train_resolution": args.resolution},
            "mask_ratio": args.mask_ratio,
            "bandwidth": None,
            "base_seed": args.seed,
            "input_dir": args.images,
            "mask_dir": args.masks,
        }
    )
    out = args.out or str(Path(tempfile.mkdtemp()) / "coverage.csv")
    rows = analyze_coverage_run(cfg, out, args.kinds.split(","))
    print(f"{'kind':<8} {'masked':<7} {'mean_J':>8} {'std_J':>8} {'n':>5} {'n/a':>4}")
    for r in rows:
        print(
            f"{r['kind']:<8} {r['masked']:<7} {r['mean_j']:>8.4f} "
            f"{r['std_j']:>8.4f} {r['n']:>5} {r['n_na']:>4}"
        )
    print(f"\nCSV written to {out}")


if __name__ == "__main__":
    main()
