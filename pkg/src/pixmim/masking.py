"""Uniform random patch masking with an exact masked count.

Masking uses a seeded shuffle-and-split of the patch indices rather than
i.i.d. coin flips, so a 14×14 grid at ratio 0.75 always yields exactly 49
visible patches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import ImageTensor, PatchGrid, _check_grid, _readonly, patchify


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class MaskPattern:
    """Per-patch visibility in row-major patch order."""

    grid: PatchGrid
    visible: np.ndarray  # (num_patches,) bool, read-only
    ratio: float
    seed: int

    def __post_init__(self) -> None:
        v = np.asarray(self.visible, dtype=bool)
        if v.shape != (self.grid.num_patches,):
            raise ValueError(f"visibility shape {v.shape} != ({self.grid.num_patches},)")
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError(f"mask ratio {self.ratio} outside [0, 1]")
        expected = _round_half_up(self.ratio * self.grid.num_patches)
        masked = int((~v).sum())
        if masked != expected:
            raise ValueError(
                f"ratio {self.ratio} on {self.grid.num_patches} patches requires "
                f"{expected} masked, pattern has {masked}"
            )
        object.__setattr__(self, "visible", _readonly(v))

    @property
    def num_masked(self) -> int:
        return int((~self.visible).sum())

    @property
    def masked_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.visible)

    @property
    def visible_indices(self) -> np.ndarray:
        return np.flatnonzero(self.visible)


def random_mask(grid: PatchGrid, ratio: float, seed: int) -> MaskPattern:
    """Mask a uniformly random subset of exactly round(ratio * N) patches."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"mask ratio {ratio} outside [0, 1]")
    n = grid.num_patches
    n_masked = _round_half_up(ratio * n)
    perm = np.random.default_rng(seed).permutation(n)
    visible = np.ones(n, dtype=bool)
    visible[perm[:n_masked]] = False
    return MaskPattern(grid, visible, ratio, seed)


def apply_mask(img: ImageTensor, m: MaskPattern, fill: float = 0.0) -> ImageTensor:
    """Replace every masked patch with ``fill``; visible pixels are untouched."""
    _check_grid(img, m.grid)
    p = m.grid.patch_size
    d = img.data.reshape(img.channels, m.grid.rows, p, m.grid.cols, p).copy()
    masked = (~m.visible).reshape(m.grid.rows, m.grid.cols)
    rows, cols = np.nonzero(masked)
    d[:, rows, :, cols, :] = fill
    return ImageTensor(d.reshape(img.channels, img.height, img.width))


def extract_visible(img: ImageTensor, m: MaskPattern) -> tuple[np.ndarray, np.ndarray]:
    """Visible patch vectors in ascending patch-index order, with their indices."""
    _check_grid(img, m.grid)
    patches = patchify(img, m.grid)
    idx = m.visible_indices
    return patches[idx], idx
