"""RGBW binning-mode simulation, W-guided fusion, simple ISP, and scoring."""

from .core import (
    BAYER_PHASES,
    CANONICAL_RGBW_LAYOUT,
    BayerImage,
    ImagePlane,
    RgbImage,
    RgbwImage,
    RgbwLayout,
    denormalize,
    depth_to_space,
    normalize,
    space_to_depth,
)
from .errors import (
    ConfigError,
    EstimationError,
    IncompleteReportError,
    PairingError,
    ParseError,
    RgbwForgeError,
    ShapeError,
)
from .fusion import FusionConfig, box_mean, fuse, fuse_guided, guided_filter
from .isp import (
    IspConfig,
    apply_ccm,
    apply_gamma,
    black_level_correct,
    demosaic,
    run_isp,
    white_balance,
)
from .metrics import (
    MetricReport,
    format_leaderboard,
    kld,
    lpips_ingest,
    m4,
    psnr,
    score_pair,
    score_set,
    ssim,
)
from .mosaic import BinnedPair, bin_diagonal, mosaic_rgbw, synth_white
from .noise import NoiseParams, apply_noise, estimate_noise

__version__ = "0.1.0"

__all__ = [
    "BAYER_PHASES",
    "CANONICAL_RGBW_LAYOUT",
    "BayerImage",
    "BinnedPair",
    "ConfigError",
    "EstimationError",
    "FusionConfig",
    "ImagePlane",
    "IncompleteReportError",
    "IspConfig",
    "MetricReport",
    "NoiseParams",
    "PairingError",
    "ParseError",
    "RgbImage",
    "RgbwForgeError",
    "RgbwImage",
    "RgbwLayout",
    "ShapeError",
    "apply_ccm",
    "apply_gamma",
    "apply_noise",
    "bin_diagonal",
    "black_level_correct",
    "box_mean",
    "demosaic",
    "denormalize",
    "depth_to_space",
    "estimate_noise",
    "format_leaderboard",
    "fuse",
    "fuse_guided",
    "guided_filter",
    "kld",
    "lpips_ingest",
    "m4",
    "mosaic_rgbw",
    "normalize",
    "psnr",
    "run_isp",
    "score_pair",
    "score_set",
    "space_to_depth",
    "ssim",
    "synth_white",
    "white_balance",
]
