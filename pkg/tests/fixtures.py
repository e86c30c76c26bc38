"""Shared deterministic fixtures for the test suite."""

import numpy as np


def golden_mosaic_8x8() -> np.ndarray:
    """Deterministic 8x8 Bayer fixture in [0.1, 0.9], defined in closed form."""
    i, j = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
    v = 0.1 + 0.8 * ((3 * i + 5 * j + i * j) % 23) / 22.0
    return v.astype(np.float64)


def mosaic_6x6(seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).random((6, 6))


# Hand-labeled 8x8 RGBW fixture for the canonical layout (W on the main
# diagonal of each 2x2 cell). Cell k = 4*ci + cj holds W values 10k+1 and
# 10k+3 and color values 100k+10 and 100k+30, so the expected two-sample
# means are 10k+2 (white) and 100k+20 (color).
RGBW_8X8 = np.array(
    [
        [1, 10, 11, 110, 21, 210, 31, 310],
        [30, 3, 130, 13, 230, 23, 330, 33],
        [41, 410, 51, 510, 61, 610, 71, 710],
        [430, 43, 530, 53, 630, 63, 730, 73],
        [81, 810, 91, 910, 101, 1010, 111, 1110],
        [830, 83, 930, 93, 1030, 103, 1130, 113],
        [121, 1210, 131, 1310, 141, 1410, 151, 1510],
        [1230, 123, 1330, 133, 1430, 143, 1530, 153],
    ],
    dtype=np.float64,
)

RGBW_8X8_EXPECTED_WHITE = np.array(
    [
        [2, 12, 22, 32],
        [42, 52, 62, 72],
        [82, 92, 102, 112],
        [122, 132, 142, 152],
    ],
    dtype=np.float64,
)

RGBW_8X8_EXPECTED_BAYER = np.array(
    [
        [20, 120, 220, 320],
        [420, 520, 620, 720],
        [820, 920, 1020, 1120],
        [1220, 1320, 1420, 1520],
    ],
    dtype=np.float64,
)


def ramp_gray_rgb(height: int = 128, width: int = 128) -> np.ndarray:
    """Achromatic linear ramp; diagonal binning leaves W == color exactly."""
    yy, xx = np.meshgrid(
        np.linspace(0.0, 1.0, height), np.linspace(0.0, 1.0, width), indexing="ij"
    )
    mono = 0.1 + 0.5 * xx + 0.3 * yy
    return np.stack([mono, mono, mono], axis=-1)
