"""Image containers, CFA bookkeeping, normalization, and raw packing.

All pixel data lives in float64 numpy arrays. Planes are normalized to
[0, 1] everywhere inside the library; integer code values appear only at
file I/O boundaries (see fileio). Containers are immutable: the backing
arrays are copied on construction and marked read-only, so every type
here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, ShapeError

BAYER_PHASES = ("RGGB", "GRBG", "GBRG", "BGGR")

#: 2x2 color grid for each Bayer phase, row-major from the top-left pixel.
PHASE_GRIDS = {
    "RGGB": (("R", "G"), ("G", "B")),
    "GRBG": (("G", "R"), ("B", "G")),
    "GBRG": (("G", "B"), ("R", "G")),
    "BGGR": (("B", "G"), ("G", "R")),
}


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


class ImagePlane:
    """A dense 2D raster of scalars.

    Rejects NaN/Inf at construction. Values are conventionally in [0, 1]
    but any finite real is accepted (intermediate buffers, code-value
    fixtures in tests).
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = _freeze(np.asarray(data))
        if arr.ndim != 2:
            raise ShapeError(f"plane must be 2D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"plane must be at least 1x1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError("plane contains NaN or Inf")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def __repr__(self):
        return f"ImagePlane({self.width}x{self.height})"


class RgbwLayout:
    """A 4x4 CFA super-cell of R/G/B/W tags.

    Each 2x2 sub-cell holds two W pixels on one diagonal and two pixels
    of a single color on the other; the four sub-cell colors must form a
    Bayer quad, which fixes the phase of the binned Bayer output.
    """

    __slots__ = ("grid", "bayer_phase")

    def __init__(self, grid):
        rows = tuple(tuple(str(t) for t in row) for row in grid)
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ConfigError("layout must be a 4x4 grid")
        if any(t not in "RGBW" for row in rows for t in row):
            raise ConfigError("layout tags must be R, G, B, or W")
        colors = [["?", "?"], ["?", "?"]]
        for ci in range(2):
            for cj in range(2):
                cell = [rows[2 * ci + di][2 * cj + dj] for di in range(2) for dj in range(2)]
                # cell order: (0,0), (0,1), (1,0), (1,1)
                if cell[0] == cell[3] == "W":
                    pair = (cell[1], cell[2])
                elif cell[1] == cell[2] == "W":
                    pair = (cell[0], cell[3])
                else:
                    raise ConfigError(
                        f"cell ({ci},{cj}) must have W on exactly one diagonal, got {cell}"
                    )
                if pair[0] != pair[1] or pair[0] not in "RGB":
                    raise ConfigError(
                        f"cell ({ci},{cj}) must pair one color across the other diagonal, got {pair}"
                    )
                colors[ci][cj] = pair[0]
        quad = "".join(colors[0]) + "".join(colors[1])
        if quad not in BAYER_PHASES:
            raise ConfigError(f"per-cell colors {quad} do not form a Bayer quad")
        self.grid = rows
        self.bayer_phase = quad

    @classmethod
    def from_string(cls, text: str) -> "RgbwLayout":
        """Parse a layout like ``WRWG/RWGW/WGWB/GWBW``."""
        return cls([list(row) for row in text.strip().split("/")])

    def to_string(self) -> str:
        return "/".join("".join(row) for row in self.grid)

    def white_mask(self) -> np.ndarray:
        """4x4 boolean mask of W sites."""
        return np.array([[t == "W" for t in row] for row in self.grid], dtype=bool)

    def channel_index(self) -> np.ndarray:
        """4x4 array of channel indices, R=0 G=1 B=2 W=3."""
        lut = {"R": 0, "G": 1, "B": 2, "W": 3}
        return np.array([[lut[t] for t in row] for row in self.grid], dtype=np.int64)

    def __eq__(self, other):
        return isinstance(other, RgbwLayout) and self.grid == other.grid

    def __repr__(self):
        return f"RgbwLayout({self.to_string()})"


#: W on the main diagonal of every 2x2 cell, colors on the anti-diagonal,
#: cell colors arranged so the binned Bayer comes out RGGB.
CANONICAL_RGBW_LAYOUT = RgbwLayout.from_string("WRWG/RWGW/WGWB/GWBW")


@dataclass(frozen=True)
class BayerImage:
    """A single-plane Bayer mosaic with CFA phase and level metadata.

    black_level/white_level describe the encoding of the plane values:
    (0.0, 1.0) for normalized data, sensor code values otherwise.
    """

    plane: ImagePlane
    cfa_phase: str
    black_level: float = 0.0
    white_level: float = 1.0

    def __post_init__(self):
        if self.cfa_phase not in BAYER_PHASES:
            raise ConfigError(f"unknown CFA phase {self.cfa_phase!r}")
        if self.plane.height % 2 or self.plane.width % 2:
            raise ShapeError(
                f"Bayer dimensions must be even, got {self.plane.width}x{self.plane.height}"
            )
        if not self.black_level < self.white_level:
            raise ConfigError("black_level must be below white_level")

    @property
    def color_grid(self):
        return PHASE_GRIDS[self.cfa_phase]


@dataclass(frozen=True)
class RgbwImage:
    """A full-resolution RGBW mosaic tagged with its 4x4 layout."""

    plane: ImagePlane
    layout: RgbwLayout
    black_level: float = 0.0
    white_level: float = 1.0

    def __post_init__(self):
        if self.plane.height % 4 or self.plane.width % 4:
            raise ShapeError(
                "RGBW dimensions must be multiples of 4, got "
                f"{self.plane.width}x{self.plane.height}"
            )
        if not self.black_level < self.white_level:
            raise ConfigError("black_level must be below white_level")


class RgbImage:
    """A 3-channel image with values in [0, 1], stored as (H, W, 3)."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = _freeze(np.asarray(data))
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ShapeError(f"RGB data must have shape (H, W, 3), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError("RGB data contains NaN or Inf")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ConfigError("RGB values must lie in [0, 1]; clamp before constructing")
        self.data = arr

    @classmethod
    def from_planes(cls, r, g, b) -> "RgbImage":
        r, g, b = (np.asarray(p, dtype=np.float64) for p in (r, g, b))
        if not (r.shape == g.shape == b.shape):
            raise ShapeError("channel planes must share dimensions")
        return cls(np.stack([r, g, b], axis=-1))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def channel(self, i: int) -> np.ndarray:
        return self.data[:, :, i]

    def __repr__(self):
        return f"RgbImage({self.width}x{self.height})"


def normalize(codes, black_level: float, white_level: float) -> ImagePlane:
    """Map code values affinely to [0, 1], clamping outside the window.

    out = clamp((v - black_level) / (white_level - black_level), 0, 1)
    """
    if not white_level > black_level:
        raise ConfigError(
            f"white_level ({white_level}) must exceed black_level ({black_level})"
        )
    arr = np.asarray(codes, dtype=np.float64)
    out = (arr - black_level) / (white_level - black_level)
    np.clip(out, 0.0, 1.0, out=out)
    return ImagePlane(out)


def denormalize(
    plane: ImagePlane,
    black_level: float,
    white_level: float,
    container_max: int = 65535,
) -> np.ndarray:
    """Inverse of normalize: back to integer codes in a uint16 container.

    Rounds half away from zero so golden files are bit-stable, then clamps
    to [0, container_max].
    """
    if not white_level > black_level:
        raise ConfigError(
            f"white_level ({white_level}) must exceed black_level ({black_level})"
        )
    x = plane.data * (white_level - black_level) + black_level
    rounded = np.copysign(np.floor(np.abs(x) + 0.5), x)
    np.clip(rounded, 0, container_max, out=rounded)
    return rounded.astype(np.uint16)


def space_to_depth(plane: ImagePlane, factor: int) -> list[ImagePlane]:
    """Split a plane into factor^2 phase-subsampled planes.

    Output plane for phase (p, q) holds input[i*factor + p, j*factor + q].
    Planes are ordered row-major by phase: (0,0), (0,1), ..., (f-1,f-1).
    """
    if factor < 1:
        raise ConfigError("factor must be >= 1")
    h, w = plane.height, plane.width
    if h % factor or w % factor:
        raise ShapeError(f"dimensions {w}x{h} not divisible by factor {factor}")
    return [
        ImagePlane(plane.data[p::factor, q::factor])
        for p in range(factor)
        for q in range(factor)
    ]


def depth_to_space(planes: Sequence[ImagePlane], factor: int) -> ImagePlane:
    """Exact inverse of space_to_depth."""
    if factor < 1:
        raise ConfigError("factor must be >= 1")
    if len(planes) != factor * factor:
        raise ShapeError(f"expected {factor * factor} planes, got {len(planes)}")
    shapes = {(p.height, p.width) for p in planes}
    if len(shapes) != 1:
        raise ShapeError("all planes must share dimensions")
    h, w = shapes.pop()
    out = np.empty((h * factor, w * factor), dtype=np.float64)
    for idx, p in enumerate(planes):
        out[idx // factor :: factor, idx % factor :: factor] = p.data
    return ImagePlane(out)
