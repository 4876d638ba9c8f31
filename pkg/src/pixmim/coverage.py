"""Foreground-retention metric for augmented (and masked) views.

Coverage of a record is the fraction of the original image's foreground
pixels that survive into the record's output window; composing with a patch
mask keeps only the pixels landing in visible patches.  Back-projection uses
the record's geometry: exact for pure crops, nearest-neighbor rounding
through resize stages, and reflection-padded pixels count their mirrored
source pixel once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .augment import AugmentRecord, original_axis_incidence
from .image import _readonly
from .masking import MaskPattern


@dataclass(frozen=True)
class ForegroundMask:
    """Binary per-pixel foreground indicator."""

    mask: np.ndarray  # (height, width) bool, read-only

    def __post_init__(self) -> None:
        m = np.asarray(self.mask)
        if m.ndim != 2:
            raise ValueError(f"expected (height, width), got shape {m.shape}")
        object.__setattr__(self, "mask", _readonly(m.astype(bool)))

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @classmethod
    def from_array(cls, array: np.ndarray) -> "ForegroundMask":
        """Nonzero pixels are foreground."""
        return cls(np.asarray(array) != 0)


@dataclass(frozen=True)
class CoverageReport:
    """Aggregate of per-image coverage values for one operation."""

    label: str
    values: tuple[float, ...]
    mean: float
    stddev: float
    count: int
    not_applicable: int


def _check_dims(fg: ForegroundMask, rec: AugmentRecord) -> None:
    g = rec.geometry
    if (fg.height, fg.width) != (g.orig_height, g.orig_width):
        raise ValueError(
            f"foreground mask {fg.height}x{fg.width} does not match the record's "
            f"original image {g.orig_height}x{g.orig_width}"
        )


def foreground_survival(fg: ForegroundMask, rec: AugmentRecord) -> tuple[int, int]:
    """(surviving foreground pixels, total foreground pixels) for a record."""
    _check_dims(fg, rec)
    total = int(fg.mask.sum())
    if total == 0:
        return 0, 0
    g = rec.geometry
    rows = original_axis_incidence(g, "y", [(0, g.win_size)])[0]
    cols = original_axis_incidence(g, "x", [(0, g.win_size)])[0]
    surviving = int((fg.mask[rows][:, cols]).sum())
    return surviving, total


def coverage_of_crop(fg: ForegroundMask, rec: AugmentRecord) -> float | None:
    """Fraction of foreground retained by the record; None when there is no
    foreground (not-applicable)."""
    surviving, total = foreground_survival(fg, rec)
    if total == 0:
        return None
    return surviving / total


def coverage_of_masked(
    fg: ForegroundMask, rec: AugmentRecord, m: MaskPattern
) -> float | None:
    """Foreground retained by the record AND landing in visible patches."""
    _check_dims(fg, rec)
    g = rec.geometry
    p = m.grid.patch_size
    if (m.grid.rows * p, m.grid.cols * p) != (rec.output.height, rec.output.width):
        raise ValueError(
            f"mask grid {m.grid.rows}x{m.grid.cols} of {p}px patches does not "
            f"tile the {rec.output.height}x{rec.output.width} output"
        )
    total = int(fg.mask.sum())
    if total == 0:
        return None
    row_inc = original_axis_incidence(
        g, "y", [(i * p, (i + 1) * p) for i in range(m.grid.rows)]
    )
    col_inc = original_axis_incidence(
        g, "x", [(j * p, (j + 1) * p) for j in range(m.grid.cols)]
    )
    vis = m.visible.reshape(m.grid.rows, m.grid.cols)
    hits = row_inc.T.astype(np.float32) @ vis.astype(np.float32) @ col_inc.astype(np.float32)
    surviving = int((fg.mask & (hits > 0)).sum())
    return surviving / total


def aggregate(
    samples: Iterable[float | None],
    label: str = "",
    weights: Sequence[float] | None = None,
) -> CoverageReport:
    """Mean/stddev over applicable samples; None entries are counted, not used.

    With ``weights`` (e.g. per-image foreground areas) the mean becomes the
    pooled weighted mean; the stddev stays unweighted.
    """
    raw = list(samples)
    keep = [x for x in raw if x is not None]
    n_na = len(raw) - len(keep)
    if not keep:
        raise ValueError(f"no applicable coverage samples for {label!r} "
                         f"({n_na} without foreground)")
    vals = np.asarray(keep, dtype=np.float64)
    if weights is not None:
        w = np.asarray([wt for wt, x in zip(weights, raw) if x is not None], dtype=np.float64)
        if w.shape != vals.shape or w.sum() <= 0:
            raise ValueError("weights must match samples and have positive total")
        mean = float((vals * w).sum() / w.sum())
    else:
        mean = float(vals.mean())
    return CoverageReport(
        label=label,
        values=tuple(float(v) for v in vals),
        mean=mean,
        stddev=float(vals.std()),
        count=len(keep),
        not_applicable=n_na,
    )
