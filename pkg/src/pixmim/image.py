"""Planar image container, patch-grid geometry, and raster primitives.

Images are stored as ``channels`` separate float64 planes of shape
``(height, width)``, i.e. a ``(C, H, W)`` array.  Interleaved ``(H, W, C)``
input is converted once at ingestion.  Pixel values live in ``[0, 1]`` after
decoding (8-bit inputs are divided by 255); frequency filtering may push
values slightly outside that range and no clamping is applied, but values
must always stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ImageTensor:
    """Immutable H×W image with 1 or 3 planar float64 channels."""

    data: np.ndarray  # (channels, height, width), read-only

    def __post_init__(self) -> None:
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 3:
            raise ValueError(f"expected (channels, height, width), got shape {d.shape}")
        c, h, w = d.shape
        if c not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {c}")
        if h < 1 or w < 1:
            raise ValueError(f"image dims must be positive, got {h}x{w}")
        if not np.isfinite(d).all():
            raise ValueError("image values must be finite")
        object.__setattr__(self, "data", _readonly(d))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @classmethod
    def from_interleaved(cls, array: np.ndarray) -> "ImageTensor":
        """Build from an (H, W) or (H, W, C) array; uint8 is scaled to [0, 1]."""
        a = np.asarray(array)
        if a.dtype == np.uint8:
            a = a.astype(np.float64) / 255.0
        else:
            a = a.astype(np.float64)
        if a.ndim == 2:
            a = a[None, :, :]
        elif a.ndim == 3:
            a = np.moveaxis(a, -1, 0)
        else:
            raise ValueError(f"expected 2-D or 3-D array, got shape {a.shape}")
        return cls(a)


@dataclass(frozen=True)
class PatchGrid:
    """Non-overlapping square patch layout; must tile the image exactly."""

    patch_size: int
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.patch_size < 1:
            raise ValueError(f"patch_size must be >= 1, got {self.patch_size}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")

    @property
    def num_patches(self) -> int:
        return self.rows * self.cols

    @classmethod
    def for_image(cls, img: ImageTensor, patch_size: int) -> "PatchGrid":
        if patch_size < 1 or img.height % patch_size or img.width % patch_size:
            raise ValueError(
                f"patch size {patch_size} does not evenly divide {img.height}x{img.width}"
            )
        return cls(patch_size, img.height // patch_size, img.width // patch_size)


@dataclass(frozen=True)
class CropRect:
    """Axis-aligned pixel rectangle: rows [top, top+height), cols [left, left+width)."""

    top: int
    left: int
    height: int
    width: int

    def __post_init__(self) -> None:
        if self.height <= 0 or self.width <= 0:
            raise ValueError(f"rect dims must be positive, got {self.height}x{self.width}")

    def inside(self, height: int, width: int) -> bool:
        return (
            self.top >= 0
            and self.left >= 0
            and self.top + self.height <= height
            and self.left + self.width <= width
        )


def _check_grid(img: ImageTensor, grid: PatchGrid) -> None:
    if grid.rows * grid.patch_size != img.height or grid.cols * grid.patch_size != img.width:
        raise ValueError(
            f"grid {grid.rows}x{grid.cols} of {grid.patch_size}px patches does not "
            f"tile a {img.height}x{img.width} image"
        )


def patchify(img: ImageTensor, grid: PatchGrid) -> np.ndarray:
    """Split into patch vectors, row-major patch order.

    Returns an ``(N, patch_size² * channels)`` array.  Each vector is the
    patch's channel planes concatenated in channel order, row-major within
    a plane.
    """
    _check_grid(img, grid)
    c, p = img.channels, grid.patch_size
    d = img.data.reshape(c, grid.rows, p, grid.cols, p)
    d = d.transpose(1, 3, 0, 2, 4)  # (rows, cols, c, p, p)
    return d.reshape(grid.num_patches, c * p * p).copy()


def unpatchify(patches: np.ndarray, grid: PatchGrid, channels: int) -> ImageTensor:
    """Exact inverse of :func:`patchify`."""
    a = np.asarray(patches, dtype=np.float64)
    p = grid.patch_size
    if a.ndim != 2 or a.shape[0] != grid.num_patches:
        raise ValueError(f"expected {grid.num_patches} patches, got shape {a.shape}")
    if a.shape[1] != p * p * channels:
        raise ValueError(
            f"patch vectors of length {a.shape[1]} do not match "
            f"{p}px patches with {channels} channels"
        )
    d = a.reshape(grid.rows, grid.cols, channels, p, p)
    d = d.transpose(2, 0, 3, 1, 4)  # (c, rows, p, cols, p)
    return ImageTensor(d.reshape(channels, grid.rows * p, grid.cols * p))


def _cubic_kernel(t: np.ndarray, a: float = -0.5) -> np.ndarray:
    # Keys convolution kernel; a = -0.5 is the common Catmull-Rom-like choice.
    t = np.abs(t)
    out = np.zeros_like(t)
    near = t <= 1.0
    far = (t > 1.0) & (t < 2.0)
    out[near] = (a + 2.0) * t[near] ** 3 - (a + 3.0) * t[near] ** 2 + 1.0
    out[far] = a * (t[far] ** 3 - 5.0 * t[far] ** 2 + 8.0 * t[far] - 4.0)
    return out


def _axis_taps(n_src: int, n_dst: int, mode: str) -> tuple[np.ndarray, np.ndarray]:
    """Gather indices and weights for one separable resampling pass.

    Half-pixel (align-corners-off) coordinate convention with edge clamp:
    output center ``o + 0.5`` samples source coordinate
    ``(o + 0.5) * n_src / n_dst - 0.5``.
    """
    scale = n_src / n_dst
    centers = (np.arange(n_dst) + 0.5) * scale - 0.5
    base = np.floor(centers).astype(np.int64)
    frac = centers - base
    if mode == "bilinear":
        idx = np.stack([base, base + 1])
        w = np.stack([1.0 - frac, frac])
    elif mode == "bicubic":
        idx = np.stack([base - 1, base, base + 1, base + 2])
        w = np.stack(
            [
                _cubic_kernel(frac + 1.0),
                _cubic_kernel(frac),
                _cubic_kernel(1.0 - frac),
                _cubic_kernel(2.0 - frac),
            ]
        )
        w /= w.sum(axis=0, keepdims=True)
    else:
        raise ValueError(f"unknown interpolation mode {mode!r}")
    return np.clip(idx, 0, n_src - 1), w


def resize(img: ImageTensor, out_h: int, out_w: int, mode: str = "bilinear") -> ImageTensor:
    """Separable resampling to exactly (out_h, out_w)."""
    if out_h < 1 or out_w < 1:
        raise ValueError(f"target dims must be positive, got {out_h}x{out_w}")
    d = img.data
    idx, w = _axis_taps(img.height, out_h, mode)
    d = sum(d[:, idx[k], :] * w[k][None, :, None] for k in range(len(w)))
    idx, w = _axis_taps(img.width, out_w, mode)
    d = sum(d[:, :, idx[k]] * w[k][None, None, :] for k in range(len(w)))
    return ImageTensor(d)


def reflect_pad(img: ImageTensor, pad: int) -> ImageTensor:
    """Mirror-pad all four sides without repeating the edge pixel."""
    if pad < 0:
        raise ValueError(f"pad must be >= 0, got {pad}")
    if pad >= min(img.height, img.width):
        raise ValueError(
            f"pad {pad} must be smaller than the shortest image side "
            f"({min(img.height, img.width)})"
        )
    if pad == 0:
        return img
    return ImageTensor(np.pad(img.data, ((0, 0), (pad, pad), (pad, pad)), mode="reflect"))


def crop(img: ImageTensor, rect: CropRect) -> ImageTensor:
    """Copy the pixels inside ``rect``."""
    if not rect.inside(img.height, img.width):
        raise ValueError(
            f"rect {rect} is not inside a {img.height}x{img.width} image"
        )
    return ImageTensor(
        img.data[:, rect.top : rect.top + rect.height, rect.left : rect.left + rect.width]
    )


def hflip(img: ImageTensor) -> ImageTensor:
    """Mirror left-right."""
    return ImageTensor(img.data[:, :, ::-1])


def shorter_edge_dims(height: int, width: int, target: int) -> tuple[int, int]:
    """Dims after scaling the shorter edge to ``target``, preserving aspect."""
    if height <= width:
        return target, max(1, round(width * target / height))
    return max(1, round(height * target / width)), target
