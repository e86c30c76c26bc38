"""A five-stage rendering ISP: BLC, white balance, demosaic, CCM, gamma.

Every stage is pure and clamps back into [0, 1], mirroring fixed-point
hardware behavior and keeping golden outputs stable. Demosaicing offers
bilinear interpolation and the 5x5 linear gradient-corrected filter set
(Malvar-He-Cutler); both preserve constant inputs exactly and use
reflect-101 borders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PHASE_GRIDS, BayerImage, ImagePlane, RgbImage, normalize
from .errors import ConfigError

DEMOSAIC_METHODS = ("bilinear", "malvar")

DEFAULT_WB_GAINS = (1.8, 1.0, 1.6)
DEFAULT_CCM = (
    (1.41, -0.33, -0.08),
    (-0.24, 1.36, -0.12),
    (-0.05, -0.41, 1.46),
)

SRGB_THRESHOLD = 0.0031308


@dataclass(frozen=True)
class IspConfig:
    """Rendering parameters. The CCM must be white-point preserving."""

    wb_gains: tuple[float, float, float] = DEFAULT_WB_GAINS
    ccm: tuple = DEFAULT_CCM
    gamma: float | str = "srgb"
    demosaic_method: str = "malvar"

    def __post_init__(self):
        gains = tuple(float(g) for g in self.wb_gains)
        if len(gains) != 3 or min(gains) <= 0.0:
            raise ConfigError("wb_gains must be three positive reals")
        object.__setattr__(self, "wb_gains", gains)
        ccm = tuple(tuple(float(v) for v in row) for row in self.ccm)
        _check_ccm(ccm)
        object.__setattr__(self, "ccm", ccm)
        if isinstance(self.gamma, str):
            if self.gamma != "srgb":
                raise ConfigError(f"unknown gamma curve {self.gamma!r}")
        elif not float(self.gamma) > 0.0:
            raise ConfigError("gamma exponent must be > 0")
        if self.demosaic_method not in DEMOSAIC_METHODS:
            raise ConfigError(f"unknown demosaic method {self.demosaic_method!r}")


def _check_ccm(ccm) -> None:
    m = np.asarray(ccm, dtype=np.float64)
    if m.shape != (3, 3):
        raise ConfigError("ccm must be 3x3")
    sums = m.sum(axis=1)
    if np.max(np.abs(sums - 1.0)) > 1e-6:
        raise ConfigError(f"ccm rows must each sum to 1, got {sums}")


def black_level_correct(bayer: BayerImage) -> BayerImage:
    """Re-normalize the plane by its own levels; identity on (0, 1) data."""
    plane = normalize(bayer.plane.data, bayer.black_level, bayer.white_level)
    return BayerImage(plane, bayer.cfa_phase, 0.0, 1.0)


def white_balance(bayer: BayerImage, gains: tuple[float, float, float]) -> BayerImage:
    """Scale each pixel by the gain of its CFA color, clamped to [0, 1]."""
    r, g, b = (float(x) for x in gains)
    if min(r, g, b) <= 0.0:
        raise ConfigError("white balance gains must be positive")
    lut = {"R": r, "G": g, "B": b}
    grid = bayer.color_grid
    quad = np.array([[lut[grid[0][0]], lut[grid[0][1]]], [lut[grid[1][0]], lut[grid[1][1]]]])
    h, w = bayer.plane.data.shape
    scaled = bayer.plane.data * np.tile(quad, (h // 2, w // 2))
    np.clip(scaled, 0.0, 1.0, out=scaled)
    return BayerImage(ImagePlane(scaled), bayer.cfa_phase, bayer.black_level, bayer.white_level)


def _shifts(padded: np.ndarray, h: int, w: int):
    def sh(di: int, dj: int) -> np.ndarray:
        return padded[2 + di : 2 + di + h, 2 + dj : 2 + dj + w]

    return sh


def _demosaic_bilinear(data: np.ndarray, grid) -> np.ndarray:
    h, w = data.shape
    sh = _shifts(np.pad(data, 2, mode="reflect"), h, w)
    m = sh(0, 0)
    # pairwise sums keep constant inputs bit-exact
    g4 = ((sh(-1, 0) + sh(1, 0)) + (sh(0, -1) + sh(0, 1))) * 0.25
    b_h = (sh(0, -1) + sh(0, 1)) * 0.5
    b_v = (sh(-1, 0) + sh(1, 0)) * 0.5
    b_x = ((sh(-1, -1) + sh(-1, 1)) + (sh(1, -1) + sh(1, 1))) * 0.25
    return _assemble(data, grid, m, g_other=g4, chroma_row=b_h, chroma_col=b_v, chroma_diag=b_x)


def _demosaic_malvar(data: np.ndarray, grid) -> np.ndarray:
    h, w = data.shape
    sh = _shifts(np.pad(data, 2, mode="reflect"), h, w)
    m = sh(0, 0)
    # Deviations from the center tap: a weighted sum of these is zero for
    # constant input, which makes the unit-DC-gain property exact.
    d1v = (sh(-1, 0) - m) + (sh(1, 0) - m)
    d1h = (sh(0, -1) - m) + (sh(0, 1) - m)
    d2v = (sh(-2, 0) - m) + (sh(2, 0) - m)
    d2h = (sh(0, -2) - m) + (sh(0, 2) - m)
    dx = ((sh(-1, -1) - m) + (sh(-1, 1) - m)) + ((sh(1, -1) - m) + (sh(1, 1) - m))
    cg = m + (2.0 * (d1v + d1h) - (d2v + d2h)) / 8.0
    crow = m + (4.0 * d1h - d2h - dx + 0.5 * d2v) / 8.0
    ccol = m + (4.0 * d1v - d2v - dx + 0.5 * d2h) / 8.0
    cdia = m + (2.0 * dx - 1.5 * (d2v + d2h)) / 8.0
    return _assemble(data, grid, m, g_other=cg, chroma_row=crow, chroma_col=ccol, chroma_diag=cdia)


def _assemble(data, grid, m, g_other, chroma_row, chroma_col, chroma_diag) -> np.ndarray:
    """Route interpolators to sites by CFA geometry.

    chroma_row/chroma_col recover a chroma whose nearest same-color samples
    sit in the site's row/column; chroma_diag recovers the opposite chroma.
    """
    h, w = data.shape
    rgb = np.empty((h, w, 3), dtype=np.float64)
    names = ("R", "G", "B")
    for i in range(2):
        for j in range(2):
            site = grid[i][j]
            sl = (slice(i, None, 2), slice(j, None, 2))
            for ch, name in enumerate(names):
                if name == site:
                    src = m
                elif name == "G":
                    src = g_other
                elif site == "G":
                    src = chroma_row if grid[i][1 - j] == name else chroma_col
                else:
                    src = chroma_diag
                rgb[sl[0], sl[1], ch] = src[sl]
    np.clip(rgb, 0.0, 1.0, out=rgb)
    return rgb


def demosaic(bayer: BayerImage, method: str = "malvar") -> RgbImage:
    """Interpolate a Bayer mosaic to full RGB.

    Native samples pass through untouched; missing channels come from the
    chosen linear filter set with reflect-101 border handling.
    """
    if method not in DEMOSAIC_METHODS:
        raise ConfigError(f"unknown demosaic method {method!r}")
    grid = PHASE_GRIDS[bayer.cfa_phase]
    fn = _demosaic_bilinear if method == "bilinear" else _demosaic_malvar
    return RgbImage(fn(bayer.plane.data, grid))


def apply_ccm(rgb: RgbImage, ccm) -> RgbImage:
    """Per-pixel 3x3 color correction, clamped to [0, 1]."""
    _check_ccm(ccm)
    m = np.asarray(ccm, dtype=np.float64)
    out = rgb.data @ m.T
    np.clip(out, 0.0, 1.0, out=out)
    return RgbImage(out)


def apply_gamma(rgb: RgbImage, gamma: float | str) -> RgbImage:
    """Encode with a power law v^(1/gamma) or the named sRGB curve."""
    v = rgb.data
    if isinstance(gamma, str):
        if gamma != "srgb":
            raise ConfigError(f"unknown gamma curve {gamma!r}")
        out = np.where(v <= SRGB_THRESHOLD, 12.92 * v, 1.055 * np.power(v, 1.0 / 2.4) - 0.055)
        out[v == 1.0] = 1.0  # 1.055 - 0.055 lands one ulp low; pin the white point
    else:
        gamma = float(gamma)
        if not gamma > 0.0:
            raise ConfigError("gamma exponent must be > 0")
        out = np.power(v, 1.0 / gamma)
    np.clip(out, 0.0, 1.0, out=out)
    return RgbImage(out)


def run_isp(bayer: BayerImage, config: IspConfig = IspConfig()) -> RgbImage:
    """BLC, white balance, demosaic, CCM, gamma, in that order."""
    stage = black_level_correct(bayer)
    stage = white_balance(stage, config.wb_gains)
    rgb = demosaic(stage, config.demosaic_method)
    rgb = apply_ccm(rgb, config.ccm)
    return apply_gamma(rgb, config.gamma)
