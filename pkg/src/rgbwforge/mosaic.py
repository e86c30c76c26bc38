"""RGBW mosaic synthesis and diagonal 2x2 binning.

Binning averages the two same-color pixels on one diagonal of every 2x2
cell and the two W pixels on the other, halving resolution and producing
an aligned (Bayer, white) pair. Both means are exact two-sample averages,
so results are bit-reproducible regardless of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CANONICAL_RGBW_LAYOUT,
    BayerImage,
    ImagePlane,
    RgbImage,
    RgbwImage,
    RgbwLayout,
)
from .errors import ConfigError, ShapeError

DEFAULT_WHITE_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class BinnedPair:
    """Half-resolution Bayer (dbinb) plus the aligned dense white plane (dbinc)."""

    dbinb: BayerImage
    dbinc: ImagePlane

    def __post_init__(self):
        if (self.dbinb.plane.height, self.dbinb.plane.width) != (
            self.dbinc.height,
            self.dbinc.width,
        ):
            raise ShapeError("dbinb and dbinc must share dimensions")


def synth_white(
    rgb: RgbImage,
    weights: tuple[float, float, float] = DEFAULT_WHITE_WEIGHTS,
    gain: float = 1.0,
) -> ImagePlane:
    """Synthesize a panchromatic plane as a weighted RGB sum.

    The convex combination is scaled by a transmittance gain >= 1 to mimic
    the higher sensitivity of clear pixels, then clamped to [0, 1].
    """
    wr, wg, wb = (float(x) for x in weights)
    if min(wr, wg, wb) < 0.0:
        raise ConfigError("white weights must be non-negative")
    if abs(wr + wg + wb - 1.0) > 1e-9:
        raise ConfigError(f"white weights must sum to 1, got {wr + wg + wb}")
    if gain < 1.0:
        raise ConfigError("transmittance gain must be >= 1")
    w = wr * rgb.channel(0) + wg * rgb.channel(1) + wb * rgb.channel(2)
    if gain != 1.0:
        w = w * gain
    return ImagePlane(np.clip(w, 0.0, 1.0))


def mosaic_rgbw(
    rgb: RgbImage,
    white: ImagePlane,
    layout: RgbwLayout = CANONICAL_RGBW_LAYOUT,
    black_level: float = 0.0,
    white_level: float = 1.0,
) -> RgbwImage:
    """Sample per-site channels from an RGB+W source into an RGBW mosaic."""
    if (rgb.height, rgb.width) != (white.height, white.width):
        raise ShapeError("rgb and white must share dimensions")
    h, w = rgb.height, rgb.width
    if h % 4 or w % 4:
        raise ShapeError(f"dimensions must be multiples of 4, got {w}x{h}")
    idx = np.tile(layout.channel_index(), (h // 4, w // 4))
    out = np.empty((h, w), dtype=np.float64)
    sources = (rgb.channel(0), rgb.channel(1), rgb.channel(2), white.data)
    for ch, src in enumerate(sources):
        mask = idx == ch
        out[mask] = src[mask]
    return RgbwImage(ImagePlane(out), layout, black_level, white_level)


def bin_diagonal(rgbw: RgbwImage) -> BinnedPair:
    """Average each 2x2 cell's diagonal pairs into Bayer and white planes.

    Every cell contributes one Bayer sample (mean of its two same-color
    pixels) and one white sample (mean of its two W pixels). The output
    CFA phase is the layout's per-cell color quad.
    """
    data = rgbw.plane.data
    h, w = data.shape
    wmask = np.tile(rgbw.layout.white_mask(), (h // 4, w // 4))
    cells_w = np.where(wmask, data, 0.0).reshape(h // 2, 2, w // 2, 2)
    cells_c = np.where(wmask, 0.0, data).reshape(h // 2, 2, w // 2, 2)
    # exactly two samples per cell on each side, so /2 is an exact mean
    dbinc = cells_w.sum(axis=(1, 3)) / 2.0
    dbinb = cells_c.sum(axis=(1, 3)) / 2.0
    bayer = BayerImage(
        ImagePlane(dbinb),
        rgbw.layout.bayer_phase,
        rgbw.black_level,
        rgbw.white_level,
    )
    return BinnedPair(bayer, ImagePlane(dbinc))
