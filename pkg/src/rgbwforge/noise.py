"""Calibrated read + shot noise synthesis and residual-variance estimation.

The model is a heteroscedastic Gaussian: per-pixel variance is
(g * read_sigma_0)^2 + g * shot_k_0 * signal with amplitude gain
g = 10^(gain_db / 20). Randomness comes from a counter-based generator
(Philox) consuming exactly one draw per pixel, so output depends only on
(seed, dimensions), never on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .core import ImagePlane
from .errors import ConfigError, EstimationError, ShapeError

#: about one code value of read noise in a 10-bit range at 0 dB
DEFAULT_READ_SIGMA_0 = 1.0 / 1023.0
#: half a code value of shot-noise variance slope at 0 dB
DEFAULT_SHOT_K_0 = 0.5 / 1023.0


@dataclass(frozen=True)
class NoiseParams:
    """Noise model parameters at a given analog gain."""

    gain_db: float = 0.0
    read_sigma_0: float = DEFAULT_READ_SIGMA_0
    shot_k_0: float = DEFAULT_SHOT_K_0
    seed: int = 0

    def __post_init__(self):
        if self.read_sigma_0 < 0.0:
            raise ConfigError("read_sigma_0 must be >= 0")
        if self.shot_k_0 < 0.0:
            raise ConfigError("shot_k_0 must be >= 0")

    @property
    def gain(self) -> float:
        """Linear amplitude gain, 10^(dB/20)."""
        return 10.0 ** (self.gain_db / 20.0)

    def variance(self, signal):
        """Closed-form noise variance at the given normalized signal level."""
        g = self.gain
        return (g * self.read_sigma_0) ** 2 + g * self.shot_k_0 * np.asarray(signal)


def _unit_normals(seed: int, shape: tuple[int, int]) -> np.ndarray:
    # One Philox draw per pixel mapped through the inverse normal CDF, so
    # pixel i's deviate is a pure function of (seed, i).
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random(shape)
    return ndtri(u + 2.0 ** -54)  # shift off u == 0 exactly


def apply_noise(plane: ImagePlane, params: NoiseParams) -> ImagePlane:
    """Add read + shot noise to a normalized plane and clamp to [0, 1]."""
    x = plane.data
    sigma = np.sqrt(params.variance(np.maximum(x, 0.0)))
    n = _unit_normals(params.seed, x.shape)
    out = x + sigma * n
    np.clip(out, 0.0, 1.0, out=out)
    return ImagePlane(out)


def estimate_noise(
    clean: ImagePlane,
    noisy: ImagePlane,
    bins: int = 32,
    min_count: int = 50,
) -> tuple[float, float]:
    """Fit residual variance against intensity; returns (intercept, slope).

    Pixels are bucketed by clean intensity; within each populated bucket the
    mean squared residual estimates the local noise variance, which is linear
    in intensity under the read + shot model. A weighted least-squares line
    through (bucket mean intensity, bucket residual variance) recovers the
    read-noise variance as intercept and the shot slope. Since the sampling
    variance of a variance estimate grows with its square, the fit is done
    twice: an unweighted pass to predict bucket variances, then a pass
    weighted by count / predicted_variance^2.

    Results are only meaningful where clamping is negligible (signal at
    least a few sigma away from 0 and 1); clipped tails bias the fit.
    """
    if clean.data.shape != noisy.data.shape:
        raise ShapeError("clean and noisy planes must share dimensions")
    x = clean.data.ravel()
    r2 = (noisy.data.ravel() - x) ** 2
    which = np.clip((x * bins).astype(np.int64), 0, bins - 1)
    counts = np.bincount(which, minlength=bins)
    sum_x = np.bincount(which, weights=x, minlength=bins)
    sum_r2 = np.bincount(which, weights=r2, minlength=bins)
    ok = counts >= max(min_count, 1)
    if ok.sum() < 2:
        raise EstimationError(
            f"need at least 2 intensity buckets with >= {min_count} pixels, got {ok.sum()}"
        )
    bx = sum_x[ok] / counts[ok]
    bv = sum_r2[ok] / counts[ok]
    slope, intercept = np.polyfit(bx, bv, 1)
    predicted = np.maximum(intercept + slope * bx, np.finfo(np.float64).tiny)
    weights = counts[ok] / predicted**2
    slope, intercept = np.polyfit(bx, bv, 1, w=np.sqrt(weights))
    return float(intercept), float(slope)
