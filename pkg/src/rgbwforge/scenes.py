"""Deterministic synthetic RGB scenes for desk-scale experiments.

The real captured dataset is not redistributable, so experiments run on
parametric scenes: smooth gradients, Gaussian blobs, hard disks, stripes,
and low-frequency waves. Every scene is a pure function of (index, size,
seed).
"""

from __future__ import annotations

import numpy as np

from .core import RgbImage

SCENE_KINDS = ("gradient", "blobs", "disks", "bars", "waves", "mixed")


def scene_id(index: int) -> str:
    return f"scene{index:03d}"


def _grids(height: int, width: int):
    yy = np.linspace(0.0, 1.0, height)[:, None]
    xx = np.linspace(0.0, 1.0, width)[None, :]
    return yy, xx


def _gradient(rng, h, w):
    yy, xx = _grids(h, w)
    c0 = rng.uniform(0.1, 0.5, size=3)
    c1 = rng.uniform(0.5, 0.9, size=3)
    t = (rng.uniform(0.3, 1.0) * xx + rng.uniform(0.3, 1.0) * yy) / 2.0
    return c0[None, None, :] + (c1 - c0)[None, None, :] * t[:, :, None]


def _blobs(rng, h, w):
    yy, xx = _grids(h, w)
    img = np.full((h, w, 3), rng.uniform(0.15, 0.35, size=3))
    for _ in range(6):
        cy, cx = rng.uniform(0.1, 0.9, size=2)
        s = rng.uniform(0.05, 0.25)
        bump = np.exp(-(((yy - cy) ** 2) + ((xx - cx) ** 2)) / (2.0 * s * s))
        img += rng.uniform(0.1, 0.5, size=3)[None, None, :] * bump[:, :, None]
    return img


def _disks(rng, h, w):
    yy, xx = _grids(h, w)
    img = _gradient(rng, h, w)
    for _ in range(5):
        cy, cx = rng.uniform(0.15, 0.85, size=2)
        rad = rng.uniform(0.05, 0.2)
        mask = ((yy - cy) ** 2 + (xx - cx) ** 2) < rad * rad
        img[mask] = rng.uniform(0.1, 0.9, size=3)
    return img


def _bars(rng, h, w):
    yy, xx = _grids(h, w)
    img = np.full((h, w, 3), rng.uniform(0.2, 0.4, size=3))
    for _ in range(4):
        horizontal = rng.random() < 0.5
        t = yy + 0.0 * xx if horizontal else xx + 0.0 * yy
        lo = rng.uniform(0.1, 0.7)
        mask = (t >= lo) & (t < lo + rng.uniform(0.05, 0.2))
        img[np.broadcast_to(mask, (h, w))] = rng.uniform(0.1, 0.9, size=3)
    return img


def _waves(rng, h, w):
    yy, xx = _grids(h, w)
    img = np.empty((h, w, 3))
    for c in range(3):
        fy, fx = rng.uniform(1.0, 4.0, size=2)
        ph = rng.uniform(0.0, 2.0 * np.pi, size=2)
        img[:, :, c] = 0.5 + 0.25 * (
            np.sin(2.0 * np.pi * fy * yy + ph[0]) * np.cos(2.0 * np.pi * fx * xx + ph[1])
        )
    return img


def _mixed(rng, h, w):
    return 0.5 * _blobs(rng, h, w) + 0.5 * _disks(rng, h, w)


_BUILDERS = {
    "gradient": _gradient,
    "blobs": _blobs,
    "disks": _disks,
    "bars": _bars,
    "waves": _waves,
    "mixed": _mixed,
}


def make_scene(index: int, height: int = 256, width: int = 256, seed: int = 0) -> RgbImage:
    """Build scene `index`; kinds cycle through SCENE_KINDS."""
    kind = SCENE_KINDS[index % len(SCENE_KINDS)]
    rng = np.random.default_rng((seed, index))
    img = _BUILDERS[kind](rng, height, width)
    return RgbImage(np.clip(img, 0.02, 0.98))


def make_gray_scene(height: int = 256, width: int = 256, seed: int = 0) -> RgbImage:
    """Smooth achromatic scene (R == G == B), handy for correlated-guide tests."""
    rng = np.random.default_rng(seed)
    mono = _blobs(rng, height, width).mean(axis=2)
    mono = np.clip(mono, 0.05, 0.95)
    return RgbImage(np.stack([mono, mono, mono], axis=-1))
