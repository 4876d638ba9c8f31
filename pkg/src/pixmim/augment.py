"""Crop/resize augmentations with crop provenance for coverage analysis.

Five strategies, all emitting a ``train_resolution`` square plus the
geometry needed to map output pixels back into the original image:

* ``src`` — resize the shorter edge to the training resolution, reflect-pad
  4 pixels on every side, take a uniform random square crop;
* ``rrc`` — random area/aspect crop resized to the training resolution;
* ``cc``  — deterministic center crop after shorter-edge resize;
* ``resize`` — plain (possibly anisotropic) resize, no cropping;
* ``bg``  — rejection-sampled ``rrc`` that keeps crops containing less than
  ``bg_threshold`` of the foreground, falling back to plain ``rrc`` after
  ``bg_retries`` rejections.

Randomized strategies take an integer seed and draw from a private
generator in a fixed order, so records are bitwise reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .image import CropRect, ImageTensor, crop, hflip, reflect_pad, resize, shorter_edge_dims

if TYPE_CHECKING:
    from .coverage import ForegroundMask

KINDS = ("src", "rrc", "cc", "resize", "bg")


@dataclass(frozen=True)
class AugmentSpec:
    """Configuration shared by all augmentation strategies."""

    kind: str = "src"
    train_resolution: int = 224
    rrc_scale: tuple[float, float] = (0.2, 1.0)
    rrc_aspect: tuple[float, float] = (3.0 / 4.0, 4.0 / 3.0)
    src_pad: int = 4
    bg_threshold: float = 0.20
    bg_retries: int = 50
    horizontal_flip_prob: float = 0.5
    resize_mode: str = "bilinear"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.train_resolution < 1:
            raise ValueError(f"train_resolution must be positive, got {self.train_resolution}")
        lo, hi = self.rrc_scale
        if not (0.0 < lo <= hi <= 1.0):
            raise ValueError(f"rrc_scale must be inside (0, 1], got {self.rrc_scale}")
        lo, hi = self.rrc_aspect
        if not (0.0 < lo <= hi):
            raise ValueError(f"rrc_aspect must be positive, got {self.rrc_aspect}")
        if self.src_pad < 0:
            raise ValueError(f"src_pad must be >= 0, got {self.src_pad}")
        if not 0.0 < self.bg_threshold < 1.0:
            raise ValueError(f"bg_threshold must be in (0, 1), got {self.bg_threshold}")
        if self.bg_retries < 1:
            raise ValueError(f"bg_retries must be >= 1, got {self.bg_retries}")
        if not 0.0 <= self.horizontal_flip_prob <= 1.0:
            raise ValueError(f"flip probability {self.horizontal_flip_prob} outside [0, 1]")


@dataclass(frozen=True)
class ViewGeometry:
    """How the output window maps back onto the original image.

    The chain is: take ``crop`` from the original, resize it to
    ``(resized_height, resized_width)``, reflect-pad by ``pad``, then cut the
    ``win_size`` square at ``(win_top, win_left)`` in padded coordinates.
    Horizontal flips happen after the window and are ignored here (they do
    not change which source pixels survive).
    """

    orig_height: int
    orig_width: int
    crop_rect: CropRect
    resized_height: int
    resized_width: int
    pad: int
    win_top: int
    win_left: int
    win_size: int


@dataclass(frozen=True)
class AugmentRecord:
    """Augmented square view plus the provenance needed to audit it."""

    output: ImageTensor
    source_rect: CropRect  # output window back-projected into original pixels
    geometry: ViewGeometry
    flipped: bool
    rng_seed_used: int | None  # None for the deterministic strategies
    fallback: bool = False


def _reflect_index(q: int, n: int) -> int:
    # Mirror without repeating the edge pixel; valid while pad < n.
    if q < 0:
        return -q
    if q >= n:
        return 2 * n - 2 - q
    return q


def original_axis_incidence(
    geom: ViewGeometry, axis: str, intervals: list[tuple[int, int]]
) -> np.ndarray:
    """Which original pixels each output-coordinate interval draws from.

    ``intervals`` are half-open ``[a, b)`` ranges in output coordinates along
    ``axis`` ("y" or "x").  Returns a boolean ``(len(intervals), orig_len)``
    incidence matrix.  Reflection-padded coordinates resolve to their mirrored
    source pixels; runs of resized pixels back-project to the original through
    the resize scale, keeping a pixel when its center falls in the projected
    interval (exact for pure crops, nearest-neighbor at resized stages).
    """
    if axis == "y":
        off, n_rz = geom.win_top, geom.resized_height
        crop_off, crop_len, n_orig = geom.crop_rect.top, geom.crop_rect.height, geom.orig_height
    elif axis == "x":
        off, n_rz = geom.win_left, geom.resized_width
        crop_off, crop_len, n_orig = geom.crop_rect.left, geom.crop_rect.width, geom.orig_width
    else:
        raise ValueError(f"axis must be 'y' or 'x', got {axis!r}")

    scale = crop_len / n_rz
    out = np.zeros((len(intervals), n_orig), dtype=bool)
    for k, (a, b) in enumerate(intervals):
        if not 0 <= a < b <= geom.win_size:
            raise ValueError(f"interval [{a}, {b}) outside window of size {geom.win_size}")
        rz = np.zeros(n_rz, dtype=bool)
        for q in range(a + off, b + off):
            rz[_reflect_index(q - geom.pad, n_rz)] = True
        covered = np.flatnonzero(rz)
        run_starts = covered[np.r_[True, np.diff(covered) > 1]]
        run_ends = covered[np.r_[np.diff(covered) > 1, True]] + 1
        for r0, r1 in zip(run_starts, run_ends):
            x0 = crop_off + r0 * scale
            x1 = crop_off + r1 * scale
            i0 = max(math.ceil(x0 - 0.5), 0)
            i1 = min(math.ceil(x1 - 0.5), n_orig)
            out[k, i0:i1] = True
    return out


def _back_project_rect(geom: ViewGeometry) -> CropRect:
    rows = original_axis_incidence(geom, "y", [(0, geom.win_size)])[0]
    cols = original_axis_incidence(geom, "x", [(0, geom.win_size)])[0]
    ys, xs = np.flatnonzero(rows), np.flatnonzero(cols)
    return CropRect(int(ys[0]), int(xs[0]), int(ys[-1] - ys[0] + 1), int(xs[-1] - xs[0] + 1))


def _finish(
    out: ImageTensor,
    geom: ViewGeometry,
    flipped: bool,
    seed: int | None,
    fallback: bool = False,
) -> AugmentRecord:
    if flipped:
        out = hflip(out)
    return AugmentRecord(out, _back_project_rect(geom), geom, flipped, seed, fallback)


def apply_src(img: ImageTensor, spec: AugmentSpec, seed: int) -> AugmentRecord:
    """Shorter-edge resize, reflect pad, uniform random square crop, flip."""
    res = spec.train_resolution
    rz_h, rz_w = shorter_edge_dims(img.height, img.width, res)
    resized = resize(img, rz_h, rz_w, spec.resize_mode)
    padded = reflect_pad(resized, spec.src_pad)
    rng = np.random.default_rng(seed)
    top = int(rng.integers(0, padded.height - res + 1))
    left = int(rng.integers(0, padded.width - res + 1))
    out = crop(padded, CropRect(top, left, res, res))
    flipped = bool(rng.random() < spec.horizontal_flip_prob)
    geom = ViewGeometry(
        img.height, img.width, CropRect(0, 0, img.height, img.width),
        rz_h, rz_w, spec.src_pad, top, left, res,
    )
    return _finish(out, geom, flipped, seed)


def _draw_scale_ratio(spec: AugmentSpec, rng: np.random.Generator) -> tuple[float, float]:
    """One (area-scale, aspect-ratio) proposal: uniform scale, log-uniform aspect."""
    scale = float(rng.uniform(spec.rrc_scale[0], spec.rrc_scale[1]))
    log_lo, log_hi = math.log(spec.rrc_aspect[0]), math.log(spec.rrc_aspect[1])
    ratio = float(math.exp(rng.uniform(log_lo, log_hi)))
    return scale, ratio


def _sample_rrc_rect(
    height: int, width: int, spec: AugmentSpec, rng: np.random.Generator
) -> tuple[CropRect, bool]:
    """Random area/aspect rect; centered aspect-clamped fallback after 10 misses."""
    for _ in range(10):
        scale, ratio = _draw_scale_ratio(spec, rng)
        target_area = scale * height * width
        w = round(math.sqrt(target_area * ratio))
        h = round(math.sqrt(target_area / ratio))
        if 0 < w <= width and 0 < h <= height:
            top = int(rng.integers(0, height - h + 1))
            left = int(rng.integers(0, width - w + 1))
            return CropRect(top, left, h, w), False
    in_ratio = width / height
    if in_ratio < spec.rrc_aspect[0]:
        w = width
        h = min(round(w / spec.rrc_aspect[0]), height)
    elif in_ratio > spec.rrc_aspect[1]:
        h = height
        w = min(round(h * spec.rrc_aspect[1]), width)
    else:
        h, w = height, width
    return CropRect((height - h) // 2, (width - w) // 2, h, w), True


def _rrc_record(
    img: ImageTensor,
    rect: CropRect,
    spec: AugmentSpec,
    rng: np.random.Generator,
    seed: int,
    fallback: bool,
) -> AugmentRecord:
    res = spec.train_resolution
    out = resize(crop(img, rect), res, res, spec.resize_mode)
    flipped = bool(rng.random() < spec.horizontal_flip_prob)
    geom = ViewGeometry(img.height, img.width, rect, res, res, 0, 0, 0, res)
    return _finish(out, geom, flipped, seed, fallback)


def apply_rrc(img: ImageTensor, spec: AugmentSpec, seed: int) -> AugmentRecord:
    """Random resized crop to the training resolution."""
    rng = np.random.default_rng(seed)
    rect, fallback = _sample_rrc_rect(img.height, img.width, spec, rng)
    return _rrc_record(img, rect, spec, rng, seed, fallback)


def apply_cc(img: ImageTensor, spec: AugmentSpec) -> AugmentRecord:
    """Deterministic center crop after shorter-edge resize; never flips."""
    res = spec.train_resolution
    rz_h, rz_w = shorter_edge_dims(img.height, img.width, res)
    resized = resize(img, rz_h, rz_w, spec.resize_mode)
    top, left = (rz_h - res) // 2, (rz_w - res) // 2
    out = crop(resized, CropRect(top, left, res, res))
    geom = ViewGeometry(
        img.height, img.width, CropRect(0, 0, img.height, img.width),
        rz_h, rz_w, 0, top, left, res,
    )
    return _finish(out, geom, False, None)


def apply_resize(img: ImageTensor, spec: AugmentSpec) -> AugmentRecord:
    """Plain resize to the training square; keeps the full frame."""
    res = spec.train_resolution
    out = resize(img, res, res, spec.resize_mode)
    geom = ViewGeometry(
        img.height, img.width, CropRect(0, 0, img.height, img.width),
        res, res, 0, 0, 0, res,
    )
    return _finish(out, geom, False, None)


def apply_bg(
    img: ImageTensor, fg: "ForegroundMask", spec: AugmentSpec, seed: int
) -> AugmentRecord:
    """Background-focused crop: accept proposals retaining little foreground.

    Proposal coverage is the exact pixel count of foreground inside the
    un-resized candidate rect over the total foreground.  The first proposal
    below ``bg_threshold`` wins; after ``bg_retries`` rejections one plain
    random resized crop is taken and the record is flagged as a fallback.
    """
    if (fg.height, fg.width) != (img.height, img.width):
        raise ValueError(
            f"foreground mask {fg.height}x{fg.width} does not match "
            f"image {img.height}x{img.width}"
        )
    rng = np.random.default_rng(seed)
    total = int(fg.mask.sum())
    for _ in range(spec.bg_retries):
        rect, _ = _sample_rrc_rect(img.height, img.width, spec, rng)
        inside = int(
            fg.mask[rect.top : rect.top + rect.height, rect.left : rect.left + rect.width].sum()
        )
        cov = inside / total if total else 0.0
        if cov < spec.bg_threshold:
            return _rrc_record(img, rect, spec, rng, seed, False)
    rect, _ = _sample_rrc_rect(img.height, img.width, spec, rng)
    return _rrc_record(img, rect, spec, rng, seed, True)


def apply_augment(
    img: ImageTensor,
    spec: AugmentSpec,
    seed: int,
    fg: "ForegroundMask | None" = None,
) -> AugmentRecord:
    """Dispatch on ``spec.kind``; ``bg`` requires a foreground mask."""
    if spec.kind == "src":
        return apply_src(img, spec, seed)
    if spec.kind == "rrc":
        return apply_rrc(img, spec, seed)
    if spec.kind == "cc":
        return apply_cc(img, spec)
    if spec.kind == "resize":
        return apply_resize(img, spec)
    if fg is None:
        raise ValueError("background-focused cropping needs a foreground mask")
    return apply_bg(img, fg, spec, seed)
