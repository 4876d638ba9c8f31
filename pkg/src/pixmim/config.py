"""Pipeline configuration: dataclass plus a strict JSON loader.

Unknown keys are rejected at every level so a typo never silently falls
back to a default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .augment import AugmentSpec
from .loss import LossSpec


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (a usage error)."""


@dataclass(frozen=True)
class PipelineConfig:
    augment: AugmentSpec = field(default_factory=AugmentSpec)
    mask_ratio: float = 0.75
    bandwidth: float | None = 40.0  # None = pass-through (raw-pixel targets)
    patch_size: int = 16
    loss: LossSpec = field(default_factory=LossSpec)
    base_seed: int = 0
    input_dir: Path | None = None
    mask_dir: Path | None = None
    output_dir: Path | None = None

    def __post_init__(self) -> None:
        res = self.augment.train_resolution
        if self.patch_size < 1 or res % self.patch_size:
            raise ConfigError(
                f"train_resolution {res} is not divisible by patch_size {self.patch_size}"
            )
        if not 0.0 <= self.mask_ratio <= 1.0:
            raise ConfigError(f"mask_ratio {self.mask_ratio} outside [0, 1]")
        if self.bandwidth is not None and not 0.0 <= self.bandwidth <= res / 2:
            raise ConfigError(
                f"bandwidth {self.bandwidth} outside [0, {res / 2}] for resolution {res}"
            )

    @property
    def grid_side(self) -> int:
        return self.augment.train_resolution // self.patch_size


def _take(d: Mapping[str, Any], allowed: dict[str, Any], where: str) -> dict[str, Any]:
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")
    out = dict(allowed)
    out.update(d)
    return out


def _augment_from_dict(d: Mapping[str, Any]) -> AugmentSpec:
    defaults = {
        "kind": "src",
        "train_resolution": 224,
        "rrc_scale": [0.2, 1.0],
        "rrc_aspect": [3.0 / 4.0, 4.0 / 3.0],
        "src_pad": 4,
        "bg_threshold": 0.20,
        "bg_retries": 50,
        "horizontal_flip_prob": 0.5,
        "resize_mode": "bilinear",
    }
    v = _take(d, defaults, "augment")
    try:
        return AugmentSpec(
            kind=str(v["kind"]),
            train_resolution=int(v["train_resolution"]),
            rrc_scale=(float(v["rrc_scale"][0]), float(v["rrc_scale"][1])),
            rrc_aspect=(float(v["rrc_aspect"][0]), float(v["rrc_aspect"][1])),
            src_pad=int(v["src_pad"]),
            bg_threshold=float(v["bg_threshold"]),
            bg_retries=int(v["bg_retries"]),
            horizontal_flip_prob=float(v["horizontal_flip_prob"]),
            resize_mode=str(v["resize_mode"]),
        )
    except (ValueError, TypeError, IndexError) as e:
        raise ConfigError(f"bad augment config: {e}") from e


def _loss_from_dict(d: Mapping[str, Any]) -> LossSpec:
    defaults = {"distance": "l2", "normalize_per_patch": True, "eps": 1e-6}
    v = _take(d, defaults, "loss")
    try:
        return LossSpec(
            distance=str(v["distance"]).lower(),
            normalize_per_patch=bool(v["normalize_per_patch"]),
            eps=float(v["eps"]),
        )
    except (ValueError, TypeError) as e:
        raise ConfigError(f"bad loss config: {e}") from e


def config_from_dict(d: Mapping[str, Any]) -> PipelineConfig:
    defaults = {
        "augment": {},
        "mask_ratio": 0.75,
        "bandwidth": 40.0,
        "patch_size": 16,
        "loss": {},
        "base_seed": 0,
        "input_dir": None,
        "mask_dir": None,
        "output_dir": None,
    }
    v = _take(d, defaults, "config")
    if not isinstance(v["augment"], Mapping):
        raise ConfigError("augment must be an object")
    if not isinstance(v["loss"], Mapping):
        raise ConfigError("loss must be an object")
    try:
        return PipelineConfig(
            augment=_augment_from_dict(v["augment"]),
            mask_ratio=float(v["mask_ratio"]),
            bandwidth=None if v["bandwidth"] is None else float(v["bandwidth"]),
            patch_size=int(v["patch_size"]),
            loss=_loss_from_dict(v["loss"]),
            base_seed=int(v["base_seed"]),
            input_dir=None if v["input_dir"] is None else Path(v["input_dir"]),
            mask_dir=None if v["mask_dir"] is None else Path(v["mask_dir"]),
            output_dir=None if v["output_dir"] is None else Path(v["output_dir"]),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(f"bad config value: {e}") from e


def load_config(path: str | Path) -> PipelineConfig:
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {p} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"config {p} must be a JSON object")
    return config_from_dict(raw)
