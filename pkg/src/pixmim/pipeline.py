"""Batch orchestration: training-triple generation, analyses, preview, bench.

Every image is processed independently with seeds derived from
(base_seed, manifest index), and per-image artifacts are separate files, so
any worker count produces byte-identical output.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import frequency
from .augment import AugmentRecord, apply_augment
from .config import ConfigError, PipelineConfig
from .coverage import ForegroundMask, aggregate, coverage_of_crop, coverage_of_masked
from .image import ImageTensor, PatchGrid, patchify
from .io_utils import (
    DataError,
    Manifest,
    load_foreground_mask,
    load_image,
    log,
    mask_bits_b64,
    save_image_png,
    scan_manifest,
    write_f32,
)
from .loss import target_patches
from .masking import MaskPattern, apply_mask, extract_visible, random_mask
from .seeds import STREAM_AUGMENT, STREAM_MASK, derive_seed, sample_seed

MASKED_FILL = 0.5  # mid-gray used for the masked-view render


@dataclass(frozen=True)
class SampleRecord:
    """In-memory training triple for one image."""

    image_id: str
    visible: np.ndarray  # (n_visible, patch_dim) float32
    visible_indices: np.ndarray  # (n_visible,) int64, ascending
    target: np.ndarray  # (num_patches, patch_dim) float32
    mask: MaskPattern
    augment: AugmentRecord


def worker_count() -> int:
    """Bounded pool size; the PIXMIM_THREADS env var overrides."""
    env = os.environ.get("PIXMIM_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as e:
            raise ConfigError(f"PIXMIM_THREADS must be an integer, got {env!r}") from e
        if n < 1:
            raise ConfigError(f"PIXMIM_THREADS must be >= 1, got {n}")
        return n
    return min(8, os.cpu_count() or 1)


def generate_sample(
    img: ImageTensor,
    cfg: PipelineConfig,
    image_seed: int,
    image_id: str = "",
    fg: ForegroundMask | None = None,
) -> SampleRecord:
    """Run augmentation, target generation, and masking for one image.

    The target is generated from the augmented view (the same record the
    visible patches come from), then patchified; tensors are cast to
    little-endian float32 exactly as they are serialized.
    """
    rec = apply_augment(img, cfg.augment, derive_seed(image_seed, STREAM_AUGMENT), fg)
    grid = PatchGrid.for_image(rec.output, cfg.patch_size)
    targets = target_patches(rec.output, cfg.bandwidth, grid)
    mask = random_mask(grid, cfg.mask_ratio, derive_seed(image_seed, STREAM_MASK))
    vis, idx = extract_visible(rec.output, mask)
    return SampleRecord(
        image_id=image_id,
        visible=vis.astype("<f4"),
        visible_indices=idx.astype(np.int64),
        target=targets.astype("<f4"),
        mask=mask,
        augment=rec,
    )


def _json_dump(obj: object, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def _sidecar(sample: SampleRecord, cfg: PipelineConfig) -> dict:
    rec, m = sample.augment, sample.mask
    patch_dim = cfg.patch_size * cfg.patch_size * sample.augment.output.channels
    return {
        "image_id": sample.image_id,
        "tensors": {
            "visible": {
                "file": f"{sample.image_id}.visible.f32",
                "dtype": "<f4",
                "shape": [int(sample.visible.shape[0]), patch_dim],
                "semantics": "visible patch vectors, ascending patch index; "
                "channel-major, row-major within a plane",
            },
            "target": {
                "file": f"{sample.image_id}.target.f32",
                "dtype": "<f4",
                "shape": [m.grid.num_patches, patch_dim],
                "semantics": "reconstruction-target patch vectors, row-major patch order",
            },
        },
        "visible_indices": [int(i) for i in sample.visible_indices],
        "mask": {
            "rows": m.grid.rows,
            "cols": m.grid.cols,
            "patch_size": m.grid.patch_size,
            "ratio": m.ratio,
            "seed": m.seed,
            "order": "row-major",
            "bit": "visible",
            "bits_b64": mask_bits_b64(m),
        },
        "augment": {
            "kind": cfg.augment.kind,
            "source_rect": [rec.source_rect.top, rec.source_rect.left,
                            rec.source_rect.height, rec.source_rect.width],
            "original_size": [rec.geometry.orig_height, rec.geometry.orig_width],
            "flipped": rec.flipped,
            "rng_seed_used": rec.rng_seed_used,
            "fallback": rec.fallback,
        },
        "bandwidth": cfg.bandwidth,
    }


def gen_targets_run(cfg: PipelineConfig) -> dict:
    """Generate one training triple per manifest image; returns the summary."""
    if cfg.input_dir is None or cfg.output_dir is None:
        raise DataError("gen-targets needs input_dir and output_dir in the config")
    manifest = scan_manifest(cfg.input_dir, cfg.mask_dir)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    failures: list[tuple[str, str]] = []
    done: list[str] = []

    def process(index: int) -> None:
        entry = manifest.entries[index]
        stem = entry.image.stem
        try:
            img = load_image(entry.image)
            fg = load_foreground_mask(entry.mask) if entry.mask else None
            sample = generate_sample(
                img, cfg, sample_seed(cfg.base_seed, index), image_id=stem, fg=fg
            )
            write_f32(out_dir / f"{stem}.visible.f32", sample.visible)
            write_f32(out_dir / f"{stem}.target.f32", sample.target)
            _json_dump(_sidecar(sample, cfg), out_dir / f"{stem}.sample.json")
            done.append(stem)
        except Exception as e:  # per-file, non-fatal
            log.warning("failed on %s: %s", entry.image, e)
            failures.append((entry.image.name, str(e)))

    n_workers = worker_count()
    if n_workers == 1:
        for i in range(len(manifest)):
            process(i)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(process, range(len(manifest))))

    summary = {
        "images": sorted(done),
        "failed": sorted(failures),
        "skipped_undecodable": sorted(manifest.skipped),
        "unpaired_masks": sorted(manifest.unpaired_masks),
        "base_seed": cfg.base_seed,
        "count": len(done),
    }
    _json_dump(summary, out_dir / "run.json")
    if not manifest.entries:
        log.warning("manifest was empty; nothing generated")
    return summary


def _pair_dirs(ref_dir: Path, cand_dir: Path) -> list[tuple[Path, Path]]:
    ref = scan_manifest(ref_dir)
    cand = scan_manifest(cand_dir)
    cand_by_stem = {e.image.stem: e.image for e in cand.entries}
    pairs = [
        (e.image, cand_by_stem[e.image.stem])
        for e in ref.entries
        if e.image.stem in cand_by_stem
    ]
    if not pairs:
        raise DataError(f"no image pairs between {ref_dir} and {cand_dir}")
    return pairs


def analyze_frequency_run(
    ref_dir: str | Path,
    cand_dir: str | Path,
    edges: Sequence[float] | None,
    out_csv: str | Path,
) -> list[dict]:
    """Mean per-band PSNR across stem-paired (reference, candidate) images."""
    pairs = _pair_dirs(Path(ref_dir), Path(cand_dir))
    sums: list[float] = []
    finite: list[int] = []
    used_edges: tuple[float, ...] | None = None
    dims: tuple[int, int] | None = None
    for ref_path, cand_path in pairs:
        ref = load_image(ref_path)
        cand = load_image(cand_path)
        if ref.data.shape != cand.data.shape:
            raise DataError(
                f"{ref_path.name}: shape {ref.data.shape} != candidate {cand.data.shape}"
            )
        if dims is None:
            dims = (ref.height, ref.width)
            used_edges = (
                tuple(float(e) for e in edges)
                if edges is not None
                else frequency.default_band_edges(*dims)
            )
            sums = [0.0] * (len(used_edges) - 1)
            finite = [0] * (len(used_edges) - 1)
        elif (ref.height, ref.width) != dims:
            raise DataError(
                f"{ref_path.name}: image size {(ref.height, ref.width)} differs from "
                f"{dims}; band profiles cannot be averaged"
            )
        profile = frequency.band_psnr(ref, cand, used_edges)
        for k, p in enumerate(profile.psnr):
            if math.isfinite(p):
                sums[k] += p
                finite[k] += 1
    assert used_edges is not None
    rows = []
    for k in range(len(used_edges) - 1):
        mean = sums[k] / finite[k] if finite[k] else math.inf
        rows.append(
            {
                "band_lo": used_edges[k],
                "band_hi": used_edges[k + 1],
                "mean_psnr": mean,
                "n_finite": finite[k],
            }
        )
    _write_csv(
        Path(out_csv),
        ["band_lo", "band_hi", "mean_psnr", "n_finite"],
        [
            [
                _fmt(r["band_lo"]),
                _fmt(r["band_hi"]),
                "inf" if math.isinf(r["mean_psnr"]) else f"{r['mean_psnr']:.6f}",
                str(r["n_finite"]),
            ]
            for r in rows
        ],
    )
    return rows


def _fmt(x: float) -> str:
    return f"{x:g}"


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)] + [",".join(r) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def analyze_coverage_run(
    cfg: PipelineConfig,
    out_csv: str | Path,
    kinds: Sequence[str],
    pooled: bool = False,
) -> list[dict]:
    """Per-kind coverage, with and without masking, over the mask-paired manifest."""
    if cfg.input_dir is None:
        raise DataError("analyze-coverage needs input_dir in the config")
    if cfg.mask_dir is None:
        raise DataError("analyze-coverage needs a mask directory")
    manifest = scan_manifest(cfg.input_dir, cfg.mask_dir)
    entries = [(i, e) for i, e in enumerate(manifest.entries) if e.mask is not None]
    if not entries:
        raise DataError("no images with foreground masks to analyze")

    res = cfg.augment.train_resolution
    grid = PatchGrid(cfg.patch_size, res // cfg.patch_size, res // cfg.patch_size)
    rows = []
    for kind in kinds:
        spec = replace(cfg.augment, kind=kind)
        plain: list[float | None] = []
        masked: list[float | None] = []
        weights: list[float] = []
        for index, entry in entries:
            img = load_image(entry.image)
            fg = load_foreground_mask(entry.mask)
            if (fg.height, fg.width) != (img.height, img.width):
                log.warning("mask/image size mismatch for %s; skipping", entry.image.name)
                continue
            rec = apply_augment(
                img, spec, derive_seed(cfg.base_seed, index, _kind_tag(kind)), fg
            )
            m = random_mask(
                grid, cfg.mask_ratio, derive_seed(cfg.base_seed, index, _kind_tag(kind), 1)
            )
            plain.append(coverage_of_crop(fg, rec))
            masked.append(coverage_of_masked(fg, rec, m))
            weights.append(float(fg.mask.sum()))
        for label, samples in (("no", plain), ("yes", masked)):
            rep = aggregate(samples, f"{kind}/{label}", weights if pooled else None)
            rows.append(
                {
                    "kind": kind,
                    "masked": label,
                    "mean_j": rep.mean,
                    "std_j": rep.stddev,
                    "n": rep.count,
                    "n_na": rep.not_applicable,
                }
            )
    _write_csv(
        Path(out_csv),
        ["kind", "masked", "mean_j", "std_j", "n", "n_na"],
        [
            [
                r["kind"],
                r["masked"],
                f"{r['mean_j']:.6f}",
                f"{r['std_j']:.6f}",
                str(r["n"]),
                str(r["n_na"]),
            ]
            for r in rows
        ],
    )
    return rows


def _kind_tag(kind: str) -> int:
    return 10 + ("src", "rrc", "cc", "resize", "bg").index(kind)


def preview_run(
    cfg: PipelineConfig, image_path: str | Path, out_dir: str | Path, check: bool = False
) -> dict:
    """Render the pipeline stages for one image; optionally verify that the
    band components sum back to the augmented view."""
    img = load_image(image_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = sample_seed(cfg.base_seed, 0)
    sample = generate_sample(img, cfg, seed, image_id=Path(image_path).stem)
    rec = sample.augment

    save_image_png(img, out / "original.png")
    save_image_png(rec.output, out / "augmented.png")
    save_image_png(apply_mask(rec.output, sample.mask, MASKED_FILL), out / "masked.png")
    target = (
        rec.output
        if cfg.bandwidth is None
        else frequency.low_freq_target(rec.output, cfg.bandwidth)
    )
    save_image_png(target, out / "target.png")

    edges = frequency.default_band_edges(rec.output.height, rec.output.width)
    comps = frequency.band_decompose(rec.output, edges)
    for k, comp in enumerate(comps):
        save_image_png(comp, out / f"band_{int(edges[k]):03d}_{int(edges[k + 1]):03d}.png")

    report = {"files": sorted(p.name for p in out.iterdir()), "bands": len(comps)}
    if check:
        total = np.zeros_like(rec.output.data)
        for comp in comps:
            total = total + comp.data
        report["band_sum_max_abs_diff"] = float(np.abs(total - rec.output.data).max())
    return report


def bench_run(cfg: PipelineConfig, n_images: int, comparison_size: int = 224) -> dict:
    """Throughput of the in-memory pipeline plus the FFT-vs-direct comparison.

    Pipeline timing uses seeded synthetic images at the configured
    resolution; the transform-path comparison runs at ``comparison_size``
    squared (224 for the CLI), one direct-path evaluation against an
    averaged FFT path.
    """
    if n_images < 1:
        raise DataError(f"need at least one image to benchmark, got {n_images}")
    res = cfg.augment.train_resolution
    rng = np.random.default_rng(cfg.base_seed)
    side = max(res, 64)
    images = [
        ImageTensor(rng.random((3, side + 17, side + 41))) for _ in range(min(n_images, 8))
    ]

    stages = {"augment": 0.0, "target": 0.0, "mask": 0.0, "extract": 0.0}
    grid = PatchGrid(cfg.patch_size, res // cfg.patch_size, res // cfg.patch_size)
    t_total = time.perf_counter()
    for i in range(n_images):
        img = images[i % len(images)]
        seed = sample_seed(cfg.base_seed, i)
        t = time.perf_counter()
        rec = apply_augment(img, cfg.augment, derive_seed(seed, STREAM_AUGMENT))
        stages["augment"] += time.perf_counter() - t
        t = time.perf_counter()
        target_patches_arr = target_patches(rec.output, cfg.bandwidth, grid)
        stages["target"] += time.perf_counter() - t
        t = time.perf_counter()
        m = random_mask(grid, cfg.mask_ratio, derive_seed(seed, STREAM_MASK))
        stages["mask"] += time.perf_counter() - t
        t = time.perf_counter()
        extract_visible(rec.output, m)
        stages["extract"] += time.perf_counter() - t
        del target_patches_arr
    total = time.perf_counter() - t_total

    bandwidth = min(40.0, comparison_size / 2)
    plane = rng.random((comparison_size, comparison_size))
    t = time.perf_counter()
    frequency.direct_low_freq_target_channel(plane, bandwidth)
    direct_s = time.perf_counter() - t
    reps = 10
    img_cmp = ImageTensor(plane[None, :, :])
    t = time.perf_counter()
    for _ in range(reps):
        frequency.low_freq_target(img_cmp, bandwidth)
    fft_s = (time.perf_counter() - t) / reps

    return {
        "images": n_images,
        "total_seconds": total,
        "images_per_sec": n_images / total if total > 0 else None,
        "stage_seconds": stages,
        "comparison_size": comparison_size,
        "fft_target_seconds": fft_s,
        "direct_target_seconds": direct_s,
        "fft_speedup": direct_s / fft_s if fft_s > 0 else None,
    }
