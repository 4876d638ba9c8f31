"""Command-line surface.

Subcommands: gen-targets, analyze-frequency, analyze-coverage, preview,
bench.  Exit codes: 0 success, 1 usage/config error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .augment import KINDS
from .config import ConfigError, load_config
from .io_utils import DataError
from .pipeline import (
    analyze_coverage_run,
    analyze_frequency_run,
    bench_run,
    gen_targets_run,
    preview_run,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_edges(text: str) -> list[float]:
    try:
        edges = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as e:
        raise ConfigError(f"bad --edges value {text!r}: {e}") from e
    if not edges:
        raise ConfigError("--edges must list at least two radii")
    return edges


def _parse_kinds(text: str) -> list[str]:
    kinds = [k.strip().lower() for k in text.split(",") if k.strip()]
    bad = [k for k in kinds if k not in KINDS]
    if bad or not kinds:
        raise ConfigError(f"--kinds must name augmentations from {KINDS}, got {text!r}")
    return kinds


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pixmim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-targets", parents=[], help="generate training triples")
    p.add_argument("--config", required=True)

    p = sub.add_parser("analyze-frequency", help="per-band PSNR between two image sets")
    p.add_argument("--ref", required=True)
    p.add_argument("--cand", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--edges", default=None, help="comma-separated band radii, e.g. 0,8,16")

    p = sub.add_parser("analyze-coverage", help="foreground coverage per augmentation")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kinds", default="src,rrc,cc,bg")
    p.add_argument("--pooled", action="store_true",
                   help="pool by foreground area instead of per-image means")

    p = sub.add_parser("preview", help="render pipeline stages for one image")
    p.add_argument("--config", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--check", action="store_true",
                   help="verify the band components sum to the augmented view")

    p = sub.add_parser("bench", help="pipeline throughput and FFT-vs-direct timing")
    p.add_argument("--config", required=True)
    p.add_argument("-n", type=int, default=100, dest="n_images")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-targets":
            summary = gen_targets_run(load_config(args.config))
            print(f"generated {summary['count']} sample(s), "
                  f"{len(summary['failed'])} failed, "
                  f"{len(summary['skipped_undecodable'])} skipped")
        elif args.command == "analyze-frequency":
            edges = _parse_edges(args.edges) if args.edges else None
            rows = analyze_frequency_run(args.ref, args.cand, edges, args.out)
            print(f"wrote {len(rows)} band(s) to {args.out}")
        elif args.command == "analyze-coverage":
            rows = analyze_coverage_run(
                load_config(args.config), args.out, _parse_kinds(args.kinds), args.pooled
            )
            print(f"wrote {len(rows)} row(s) to {args.out}")
        elif args.command == "preview":
            report = preview_run(load_config(args.config), args.image, args.out, args.check)
            print(json.dumps(report, indent=2, sort_keys=True))
            if args.check and report["band_sum_max_abs_diff"] > 1e-4:
                print("band components do not sum back to the augmented view",
                      file=sys.stderr)
                return EXIT_DATA
        elif args.command == "bench":
            report = bench_run(load_config(args.config), args.n_images)
            text = json.dumps(report, indent=2, sort_keys=True)
            if args.out:
                with open(args.out, "w") as f:
                    f.write(text + "\n")
            else:
                print(text)
    except ConfigError as e:
        print(f"pixmim: config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"pixmim: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, OSError) as e:
        print(f"pixmim: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
