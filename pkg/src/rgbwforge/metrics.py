"""Image-quality metrics and the composite M4 score.

PSNR, SSIM, and LPIPS are computed on rendered RGB; KLD compares value
histograms of the raw Bayer planes directly. LPIPS needs a pretrained
perceptual network, so it is ingested from a sidecar file rather than
computed here. M4 = psnr * ssim * 2^(1 - lpips - kld), higher is better.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from scipy.ndimage import correlate1d

from .core import BayerImage, ImagePlane, RgbImage
from .errors import (
    IncompleteReportError,
    PairingError,
    ParseError,
    ShapeError,
)
from .isp import IspConfig, run_isp

PSNR_CAP_DB = 100.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

KLD_BINS = 256
KLD_EPS = 1e-6


@dataclass(frozen=True)
class MetricReport:
    """Per-image (or aggregate) metric values; lpips and m4 may be absent."""

    psnr: float
    ssim: float
    kld: float
    lpips: Optional[float] = None
    m4: Optional[float] = None

    def __post_init__(self):
        if not -1.0 - 1e-9 <= self.ssim <= 1.0 + 1e-9:
            raise ShapeError(f"ssim {self.ssim} outside [-1, 1]")
        if self.kld < 0.0:
            raise ShapeError(f"kld {self.kld} must be >= 0")


def _as_array(img) -> np.ndarray:
    if isinstance(img, RgbImage):
        return img.data
    if isinstance(img, BayerImage):
        return img.plane.data
    if isinstance(img, ImagePlane):
        return img.data
    return np.asarray(img, dtype=np.float64)


def psnr(pred, gt, peak: float = 1.0, cap: float = PSNR_CAP_DB) -> float:
    """Peak signal-to-noise ratio in dB over all pixels and channels.

    Identical images would be infinite; the result is capped so aggregates
    stay finite.
    """
    a, b = _as_array(pred), _as_array(gt)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return cap
    return float(min(10.0 * np.log10(peak * peak / mse), cap))


def _ssim_kernel() -> np.ndarray:
    r = SSIM_WINDOW // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * SSIM_SIGMA * SSIM_SIGMA))
    return k / k.sum()


def _ssim_filter(img: np.ndarray) -> np.ndarray:
    # separable Gaussian; borders are cropped afterwards so the pad mode
    # never reaches the result
    k = _ssim_kernel()
    t = correlate1d(img, k, axis=0, mode="constant")
    t = correlate1d(t, k, axis=1, mode="constant")
    r = SSIM_WINDOW // 2
    return t[r:-r, r:-r]


def _ssim_channel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    c1 = (SSIM_K1 * 1.0) ** 2
    c2 = (SSIM_K2 * 1.0) ** 2
    mu1 = _ssim_filter(x)
    mu2 = _ssim_filter(y)
    mu12 = mu1 * mu2
    s11 = _ssim_filter(x * x) - mu1 * mu1
    s22 = _ssim_filter(y * y) - mu2 * mu2
    s12 = _ssim_filter(x * y) - mu12
    num = (2.0 * mu12 + c1) * (2.0 * s12 + c2)
    den = (mu1 * mu1 + mu2 * mu2 + c1) * (s11 + s22 + c2)
    return num / den


def ssim(pred, gt) -> float:
    """Mean structural similarity with the standard 11x11 Gaussian window.

    Computed per channel over the valid (border-cropped) region, then
    averaged across pixels and channels. Dynamic range is 1.
    """
    a, b = _as_array(pred), _as_array(gt)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.ndim == 2:
        a = a[:, :, None]
        b = b[:, :, None]
    if min(a.shape[0], a.shape[1]) < SSIM_WINDOW:
        raise ShapeError(f"images must be at least {SSIM_WINDOW} pixels per side")
    maps = [_ssim_channel(a[:, :, c], b[:, :, c]) for c in range(a.shape[2])]
    return float(np.mean([m.mean() for m in maps]))


def _histogram(values: np.ndarray, bins: int, eps: float) -> np.ndarray:
    counts, _ = np.histogram(values, bins=bins, range=(0.0, 1.0))
    p = counts / max(values.size, 1) + eps
    return p / p.sum()


def kld(pred, gt, bins: int = KLD_BINS, eps: float = KLD_EPS) -> float:
    """KL divergence D(gt || pred) between value histograms of two mosaics.

    Values are histogrammed over [0, 1]; both distributions get additive
    eps smoothing per bin and are renormalized, so the result is finite
    and non-negative for any pair.
    """
    q = _histogram(_as_array(pred).ravel(), bins, eps)
    p = _histogram(_as_array(gt).ravel(), bins, eps)
    return max(float(np.sum(p * np.log(p / q))), 0.0)


def m4(psnr_db: float, ssim_val: float, lpips: Optional[float], kld_val: Optional[float]) -> float:
    """Composite score psnr * ssim * 2^(1 - lpips - kld).

    Warns when the result leaves the nominal [0, 100] range (for example
    when scoring an image against itself with the PSNR cap in play).
    """
    parts = {"psnr": psnr_db, "ssim": ssim_val, "lpips": lpips, "kld": kld_val}
    missing = [k for k, v in parts.items() if v is None]
    if missing:
        raise IncompleteReportError(f"m4 needs all four components; missing {missing}")
    val = float(psnr_db * ssim_val * 2.0 ** (1.0 - lpips - kld_val))
    if not 0.0 <= val <= 100.0:
        warnings.warn(f"M4 {val:.2f} outside nominal range [0, 100]", stacklevel=2)
    return val


def lpips_ingest(path) -> dict[str, float]:
    """Read an 'image_id,value' sidecar of perceptual distances.

    Blank lines and '#' comments are allowed. Duplicate identifiers are
    rejected rather than silently last-write-wins.
    """
    out: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "," not in line:
                raise ParseError("expected 'image_id,value'", path, lineno)
            key, _, text = line.partition(",")
            key = key.strip()
            try:
                value = float(text)
            except ValueError:
                raise ParseError(f"bad value {text.strip()!r}", path, lineno) from None
            if not key:
                raise ParseError("empty image identifier", path, lineno)
            if value < 0.0 or not np.isfinite(value):
                raise ParseError(f"lpips must be a non-negative real, got {value}", path, lineno)
            if key in out:
                raise ParseError(f"duplicate identifier {key!r}", path, lineno)
            out[key] = value
    return out


def score_pair(
    pred: BayerImage,
    gt: BayerImage,
    isp_config: IspConfig = IspConfig(),
    lpips: Optional[float] = None,
) -> MetricReport:
    """Score one predicted Bayer against ground truth.

    PSNR/SSIM are computed on ISP renders of both mosaics, KLD on the
    mosaics themselves; m4 fills in only when lpips is supplied.
    """
    pred_rgb = run_isp(pred, isp_config)
    gt_rgb = run_isp(gt, isp_config)
    p = psnr(pred_rgb, gt_rgb)
    s = ssim(pred_rgb, gt_rgb)
    k = kld(pred, gt)
    score = m4(p, s, lpips, k) if lpips is not None else None
    return MetricReport(psnr=p, ssim=s, kld=k, lpips=lpips, m4=score)


def aggregate_reports(reports: Mapping[str, MetricReport]) -> MetricReport:
    """Arithmetic mean of each metric over a set of per-image reports.

    PSNR is averaged in dB. lpips/m4 aggregate only when present for every
    image; m4 is the mean of per-image m4 values, not m4 of the means.
    """
    if not reports:
        raise PairingError("cannot aggregate an empty report set")
    vals = list(reports.values())
    lpips_all = [r.lpips for r in vals]
    m4_all = [r.m4 for r in vals]
    return MetricReport(
        psnr=float(np.mean([r.psnr for r in vals])),
        ssim=float(np.mean([r.ssim for r in vals])),
        kld=float(np.mean([r.kld for r in vals])),
        lpips=float(np.mean(lpips_all)) if None not in lpips_all else None,
        m4=float(np.mean(m4_all)) if None not in m4_all else None,
    )


def score_set(
    preds: Mapping[str, BayerImage],
    gts: Mapping[str, BayerImage],
    isp_config: IspConfig = IspConfig(),
    lpips: Optional[Mapping[str, float]] = None,
) -> tuple[dict[str, MetricReport], MetricReport]:
    """Score matched prediction/ground-truth sets; returns (per-image, mean)."""
    pred_ids = set(preds)
    gt_ids = set(gts)
    if pred_ids != gt_ids:
        raise PairingError(
            f"unmatched scene identifiers: only in preds {sorted(pred_ids - gt_ids)}, "
            f"only in gts {sorted(gt_ids - pred_ids)}"
        )
    lpips = lpips or {}
    per_image = {
        sid: score_pair(preds[sid], gts[sid], isp_config, lpips.get(sid))
        for sid in sorted(preds)
    }
    return per_image, aggregate_reports(per_image)


def _fmt(value: Optional[float], spec: str) -> str:
    return "" if value is None else format(value, spec)


def reports_to_csv(reports: Mapping[str, MetricReport], aggregate: Optional[MetricReport] = None) -> str:
    """Render reports as CSV with columns psnr,ssim,lpips,kld,m4."""
    lines = ["image_id,psnr,ssim,lpips,kld,m4"]
    rows = list(reports.items())
    if aggregate is not None:
        rows.append(("aggregate", aggregate))
    for sid, r in rows:
        lines.append(
            f"{sid},{_fmt(r.psnr, '.6f')},{_fmt(r.ssim, '.6f')},"
            f"{_fmt(r.lpips, '.6f')},{_fmt(r.kld, '.6f')},{_fmt(r.m4, '.6f')}"
        )
    return "\n".join(lines) + "\n"


def format_leaderboard(rows: Mapping[str, MetricReport]) -> str:
    """Plain-text ranking table, M4 descending with name tie-break."""
    def key(item):
        name, r = item
        return (-(r.m4 if r.m4 is not None else float("-inf")), name)

    ordered = sorted(rows.items(), key=key)
    header = f"{'name':<16} {'psnr':>8} {'ssim':>7} {'lpips':>7} {'kld':>7} {'m4':>8}"
    lines = [header, "-" * len(header)]
    for name, r in ordered:
        lines.append(
            f"{name:<16} {_fmt(r.psnr, '.3f'):>8} {_fmt(r.ssim, '.3f'):>7} "
            f"{_fmt(r.lpips, '.4f'):>7} {_fmt(r.kld, '.4f'):>7} {_fmt(r.m4, '.2f'):>8}"
        )
    return "\n".join(lines) + "\n"
