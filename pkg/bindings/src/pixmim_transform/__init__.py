"""Dataloader-facing transform over the pipeline core.

One call takes a decoded image (plus an optional foreground mask) and
returns the training tensors in memory — no disk I/O — bit-identical to
what ``pixmim gen-targets`` writes for the same config, seed, and image.
All numerics run in the core package; this layer only adapts buffers.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Mapping, NamedTuple

import numpy as np

from pixmim import ForegroundMask, ImageTensor, sample_seed
from pixmim.config import PipelineConfig, config_from_dict, load_config
from pixmim.io_utils import pack_mask_bits
from pixmim.pipeline import generate_sample

__all__ = ["PixMimTransform", "TransformResult"]
__version__ = "0.1.0"


class TransformResult(NamedTuple):
    visible: np.ndarray  # (n_visible, patch_dim) float32
    indices: np.ndarray  # (n_visible,) int64, ascending patch index
    target: np.ndarray  # (num_patches, patch_dim) float32
    mask_bits: np.ndarray  # bit-packed row-major visibility (1 = visible), uint8


def _as_image(image) -> ImageTensor:
    if isinstance(image, ImageTensor):
        return image
    arr = np.asarray(image)
    if arr.ndim not in (2, 3):
        raise ValueError(f"expected (H, W) or (H, W, C) image buffer, got shape {arr.shape}")
    return ImageTensor.from_interleaved(arr)


class PixMimTransform:
    """Immutable, shareable transform bound to one pipeline config.

    Accepts a config file path or a plain dict mirroring the config schema.
    Calls with an explicit ``seed`` are independent and reproducible; with
    ``seed=None`` an internal counter hands out the same per-image seeds a
    batch run would use for indices 0, 1, 2, ...
    """

    def __init__(self, config: str | Path | Mapping | PipelineConfig):
        if isinstance(config, PipelineConfig):
            self._config = config
        elif isinstance(config, Mapping):
            self._config = config_from_dict(config)
        else:
            self._config = load_config(config)
        self._counter = 0
        self._lock = threading.Lock()

    @property
    def config(self) -> PipelineConfig:
        return self._config

    def _next_seed(self) -> int:
        with self._lock:
            index = self._counter
            self._counter += 1
        return sample_seed(self._config.base_seed, index)

    def __call__(self, image, seed: int | None = None, foreground=None) -> TransformResult:
        img = _as_image(image)
        fg = None
        if foreground is not None:
            fg = (
                foreground
                if isinstance(foreground, ForegroundMask)
                else ForegroundMask.from_array(np.asarray(foreground))
            )
        if seed is None:
            seed = self._next_seed()
        sample = generate_sample(img, self._config, seed, fg=fg)
        bits = np.frombuffer(pack_mask_bits(sample.mask), dtype=np.uint8)
        return TransformResult(sample.visible, sample.visible_indices, sample.target, bits)
