"""Masked-image-modeling data pipeline and diagnostics.

Library surface: planar image tensors and raster ops, Fourier-domain
low-frequency target generation, crop augmentations with provenance, exact
patch masking, foreground-coverage metrics, the masked reconstruction loss,
and the batch pipeline behind the ``pixmim`` CLI.
"""

from .augment import (
    KINDS,
    AugmentRecord,
    AugmentSpec,
    ViewGeometry,
    apply_augment,
    apply_bg,
    apply_cc,
    apply_resize,
    apply_rrc,
    apply_src,
)
from .config import ConfigError, PipelineConfig, config_from_dict, load_config
from .coverage import (
    CoverageReport,
    ForegroundMask,
    aggregate,
    coverage_of_crop,
    coverage_of_masked,
    foreground_survival,
)
from .frequency import (
    BandProfile,
    FilterMask,
    InverseResult,
    Spectrum,
    amplitude_phase,
    band_decompose,
    band_psnr,
    default_band_edges,
    dft,
    ideal_lowpass,
    idft,
    low_freq_target,
    radial_distance_grid,
)
from .image import (
    CropRect,
    ImageTensor,
    PatchGrid,
    crop,
    hflip,
    patchify,
    reflect_pad,
    resize,
    shorter_edge_dims,
    unpatchify,
)
from .io_utils import (
    DataError,
    Manifest,
    ManifestEntry,
    load_foreground_mask,
    load_image,
    save_image_png,
    scan_manifest,
)
from .loss import LossSpec, masked_loss, normalize_patches, target_patches
from .masking import MaskPattern, apply_mask, extract_visible, random_mask
from .pipeline import SampleRecord, generate_sample
from .seeds import derive_seed, sample_seed

__version__ = "0.1.0"
