"""Image/mask decoding, raw-tensor serialization, and dataset scanning.

Binary tensors are little-endian float32, row-major, each described by a
JSON sidecar so artifacts reload without the generating config.
"""

from __future__ import annotations

import base64
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .coverage import ForegroundMask
from .image import ImageTensor, PatchGrid
from .masking import MaskPattern

log = logging.getLogger("pixmim")

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


class DataError(RuntimeError):
    """Unusable input data (missing pairs, unreadable directories, ...)."""


def load_image(path: str | Path) -> ImageTensor:
    """Decode a PNG/JPEG into a planar float image in [0, 1]."""
    with Image.open(path) as im:
        mode = "L" if im.mode in ("1", "L", "I", "I;16", "F") else "RGB"
        arr = np.asarray(im.convert(mode), dtype=np.uint8)
    return ImageTensor.from_interleaved(arr)


def load_foreground_mask(path: str | Path) -> ForegroundMask:
    """Decode a single-channel mask image; nonzero pixels are foreground."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return ForegroundMask.from_array(arr)


def save_image_png(img: ImageTensor, path: str | Path) -> None:
    """Write as 8-bit PNG, clipping to [0, 1] for display."""
    arr = np.clip(img.data, 0.0, 1.0)
    arr = np.rint(arr * 255.0).astype(np.uint8)
    arr = np.moveaxis(arr, 0, -1)
    if arr.shape[-1] == 1:
        arr = arr[..., 0]
    Image.fromarray(arr).save(path, format="PNG")


def write_f32(path: str | Path, array: np.ndarray) -> None:
    Path(path).write_bytes(np.ascontiguousarray(array, dtype="<f4").tobytes())


def read_f32(path: str | Path, shape: tuple[int, ...]) -> np.ndarray:
    return np.frombuffer(Path(path).read_bytes(), dtype="<f4").reshape(shape)


def pack_mask_bits(m: MaskPattern) -> bytes:
    """Row-major visibility flags, bit-packed (1 = visible, big-endian bits)."""
    return np.packbits(m.visible.astype(np.uint8)).tobytes()


def unpack_mask_bits(
    bits: bytes, grid: PatchGrid, ratio: float, seed: int
) -> MaskPattern:
    flat = np.unpackbits(np.frombuffer(bits, dtype=np.uint8))[: grid.num_patches]
    return MaskPattern(grid, flat.astype(bool), ratio, seed)


def mask_bits_b64(m: MaskPattern) -> str:
    return base64.b64encode(pack_mask_bits(m)).decode("ascii")


@dataclass(frozen=True)
class ManifestEntry:
    image: Path
    mask: Path | None


@dataclass(frozen=True)
class Manifest:
    entries: tuple[ManifestEntry, ...]
    skipped: tuple[str, ...]  # undecodable files
    unpaired_masks: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.entries)


def _decodable(path: Path) -> bool:
    try:
        with Image.open(path) as im:
            im.verify()
        return True
    except (UnidentifiedImageError, OSError, SyntaxError):
        return False


def scan_manifest(input_dir: str | Path, mask_dir: str | Path | None = None) -> Manifest:
    """Deterministic lexicographic listing of decodable images, paired with
    masks by filename stem when a mask directory is given."""
    root = Path(input_dir)
    if not root.is_dir():
        raise DataError(f"input directory {root} does not exist")
    masks: dict[str, Path] = {}
    if mask_dir is not None:
        mroot = Path(mask_dir)
        if not mroot.is_dir():
            raise DataError(f"mask directory {mroot} does not exist")
        for p in sorted(mroot.iterdir(), key=lambda q: q.name):
            if p.suffix.lower() == ".png" and p.is_file():
                masks[p.stem] = p

    entries: list[ManifestEntry] = []
    skipped: list[str] = []
    stems: set[str] = set()
    for p in sorted(root.iterdir(), key=lambda q: q.name):
        if not p.is_file() or p.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        if not _decodable(p):
            log.warning("skipping undecodable image %s", p)
            skipped.append(p.name)
            continue
        if p.stem in stems:
            raise DataError(f"duplicate image stem {p.stem!r} in {root}")
        stems.add(p.stem)
        entries.append(ManifestEntry(p, masks.pop(p.stem, None)))

    if not entries:
        log.warning("no decodable images found in %s", root)
    unpaired = tuple(sorted(masks))
    if unpaired:
        log.warning("%d mask(s) without a matching image: %s", len(unpaired), unpaired)
    return Manifest(tuple(entries), tuple(skipped), unpaired)
