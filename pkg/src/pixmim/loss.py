"""Reconstruction objective over masked patches.

The loss is the mean, over masked patches only, of the mean per-element L1
or L2 distance between the prediction and the (optionally per-patch
standardized) target.  Predictions at visible positions never contribute.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frequency import low_freq_target
from .image import ImageTensor, PatchGrid, patchify
from .masking import MaskPattern

DISTANCES = ("l1", "l2")


@dataclass(frozen=True)
class LossSpec:
    distance: str = "l2"
    normalize_per_patch: bool = True
    eps: float = 1e-6  # guard added to the per-patch stddev

    def __post_init__(self) -> None:
        if self.distance not in DISTANCES:
            raise ValueError(f"distance must be one of {DISTANCES}, got {self.distance!r}")


def normalize_patches(patches: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Standardize each patch vector by its own mean and stddev + eps."""
    mu = patches.mean(axis=1, keepdims=True)
    sd = patches.std(axis=1, keepdims=True)
    return (patches - mu) / (sd + eps)


def target_patches(
    img: ImageTensor, bandwidth: float | None, grid: PatchGrid
) -> np.ndarray:
    """Patchified reconstruction target.

    With a bandwidth the image is low-pass filtered first; ``None`` is
    pass-through (raw-pixel targets).
    """
    if bandwidth is None:
        return patchify(img, grid)
    return patchify(low_freq_target(img, bandwidth), grid)


def masked_loss(
    pred_patches: np.ndarray,
    target_img: ImageTensor,
    m: MaskPattern,
    spec: LossSpec = LossSpec(),
) -> float:
    """Distance between predictions and targets, averaged over masked patches."""
    targets = patchify(target_img, m.grid)
    pred = np.asarray(pred_patches, dtype=np.float64)
    if pred.shape != targets.shape:
        raise ValueError(
            f"predictions of shape {pred.shape} do not cover all "
            f"{targets.shape[0]} patches of length {targets.shape[1]}"
        )
    masked = ~m.visible
    if not masked.any():
        raise ValueError("loss over zero masked patches is undefined")
    if spec.normalize_per_patch:
        targets = normalize_patches(targets, spec.eps)
    diff = pred[masked] - targets[masked]
    if spec.distance == "l1":
        return float(np.abs(diff).mean())
    return float((diff * diff).mean())
