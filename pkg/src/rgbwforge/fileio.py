"""File formats: 16-bit raw .bin with .meta sidecars, PPM, key=value configs.

Raw planes are row-major unsigned 16-bit little-endian with a plain-text
sidecar describing geometry and levels, so any implementation can parse
them bit-exactly. Config files are flat key=value text.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import BayerImage, ImagePlane, RgbImage, RgbwLayout, denormalize, normalize
from .errors import ConfigError, ParseError
from .fusion import FusionConfig
from .isp import IspConfig
from .noise import NoiseParams

DEFAULT_BLACK_LEVEL = 64
DEFAULT_WHITE_LEVEL = 1023

_RAW_DTYPE = np.dtype("<u2")


def meta_path(bin_path) -> Path:
    return Path(bin_path).with_suffix(".meta")


def write_kv(path, entries: dict) -> None:
    lines = [f"{k}={entries[k]}" for k in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_kv(path) -> dict[str, str]:
    out: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError("expected key=value", path, lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ParseError("empty key", path, lineno)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", path, lineno)
        out[key] = value.strip()
    return out


def _kv_get(kv: dict, path, key: str, convert):
    if key not in kv:
        raise ParseError(f"missing key {key!r}", path)
    try:
        return convert(kv[key])
    except (TypeError, ValueError):
        raise ParseError(f"bad value for {key!r}: {kv[key]!r}", path) from None


def write_raw_plane(
    path,
    plane: ImagePlane,
    *,
    black_level: float = DEFAULT_BLACK_LEVEL,
    white_level: float = DEFAULT_WHITE_LEVEL,
    cfa: str = "W",
    gain_db: float = 0.0,
    layout: RgbwLayout | None = None,
    extra: dict | None = None,
) -> Path:
    """Denormalize to code values and write .bin plus .meta sidecar."""
    path = Path(path)
    codes = denormalize(plane, black_level, white_level)
    path.parent.mkdir(parents=True, exist_ok=True)
    codes.astype(_RAW_DTYPE).tofile(path)
    meta = {
        "width": plane.width,
        "height": plane.height,
        "black_level": f"{black_level:g}",
        "white_level": f"{white_level:g}",
        "cfa": cfa,
        "gain_db": f"{gain_db:g}",
    }
    if layout is not None:
        meta["layout"] = layout.to_string()
    if extra:
        meta.update(extra)
    write_kv(meta_path(path), meta)
    return path


def write_raw_bayer(path, bayer: BayerImage, **kwargs) -> Path:
    """Write a normalized Bayer mosaic as raw codes with its phase in meta."""
    kwargs.setdefault("cfa", bayer.cfa_phase)
    return write_raw_plane(path, bayer.plane, **kwargs)


def read_raw(path):
    """Read .bin + .meta back to a normalized image.

    Returns (BayerImage, meta) when the sidecar carries a Bayer phase,
    otherwise (ImagePlane, meta) for dense planes such as the white channel.
    """
    path = Path(path)
    kv = read_kv(meta_path(path))
    width = _kv_get(kv, path, "width", int)
    height = _kv_get(kv, path, "height", int)
    black = _kv_get(kv, path, "black_level", float)
    white = _kv_get(kv, path, "white_level", float)
    codes = np.fromfile(path, dtype=_RAW_DTYPE)
    if codes.size != width * height:
        raise ParseError(
            f"raw size {codes.size} does not match {width}x{height}", path
        )
    plane = normalize(codes.reshape(height, width), black, white)
    cfa = kv.get("cfa", "W")
    if cfa in ("RGGB", "GRBG", "GBRG", "BGGR"):
        return BayerImage(plane, cfa, 0.0, 1.0), kv
    return plane, kv


# -- PPM ------------------------------------------------------------------

def write_ppm(path, rgb: RgbImage) -> Path:
    """Binary P6, 8-bit, maxval 255; values rounded half away from zero."""
    path = Path(path)
    codes = denormalize(ImagePlane(rgb.data.reshape(rgb.height, -1)), 0.0, 255.0, 255)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{rgb.width} {rgb.height}\n255\n".encode("ascii"))
        fh.write(codes.astype(np.uint8).tobytes())
    return path


def _read_ppm_tokens(data: bytes, count: int):
    # header tokens separated by whitespace; '#' starts a comment
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise ParseError("truncated header", None)
        c = data[pos : pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            pos = data.index(b"\n", pos) + 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    return tokens, pos + 1  # one whitespace byte after the last token


def read_ppm(path) -> RgbImage:
    """Read binary P6 (or P5 grayscale, replicated to RGB), maxval <= 65535."""
    path = Path(path)
    blob = path.read_bytes()
    magic = blob[:2]
    if magic not in (b"P6", b"P5"):
        raise ParseError(f"unsupported magic {magic!r}", path)
    tokens, offset = _read_ppm_tokens(blob[2:], 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ParseError("bad header tokens", path) from None
    if not (0 < maxval < 65536):
        raise ParseError(f"bad maxval {maxval}", path)
    channels = 3 if magic == b"P6" else 1
    dtype = np.dtype(">u2") if maxval > 255 else np.uint8
    count = width * height * channels
    pixels = np.frombuffer(blob, dtype=dtype, count=count, offset=2 + offset)
    if pixels.size != count:
        raise ParseError("truncated pixel data", path)
    arr = pixels.astype(np.float64).reshape(height, width, channels) / maxval
    if channels == 1:
        arr = np.repeat(arr, 3, axis=2)
    return RgbImage(arr)


# -- config files ----------------------------------------------------------

def load_isp_config(path) -> IspConfig:
    """Keys: wb_gains (3 csv), ccm (9 csv row-major), gamma, demosaic."""
    kv = read_kv(path)
    kwargs = {}
    if "wb_gains" in kv:
        gains = _parse_floats(kv["wb_gains"], 3, path, "wb_gains")
        kwargs["wb_gains"] = tuple(gains)
    if "ccm" in kv:
        flat = _parse_floats(kv["ccm"], 9, path, "ccm")
        kwargs["ccm"] = tuple(tuple(flat[i * 3 : i * 3 + 3]) for i in range(3))
    if "gamma" in kv:
        text = kv["gamma"]
        kwargs["gamma"] = text if text == "srgb" else _float_or_parse_error(text, path, "gamma")
    if "demosaic" in kv:
        kwargs["demosaic"] = kv["demosaic"]
        kwargs["demosaic_method"] = kwargs.pop("demosaic")
    try:
        return IspConfig(**kwargs)
    except ConfigError as exc:
        raise ParseError(str(exc), path) from exc


def load_fusion_config(path) -> FusionConfig:
    """Keys: method, radius, eps, detail_gain, w_predenoise_radius."""
    kv = read_kv(path)
    kwargs = {}
    if "method" in kv:
        kwargs["method"] = kv["method"]
    for key, conv in (
        ("radius", int),
        ("eps", float),
        ("detail_gain", float),
        ("w_predenoise_radius", int),
    ):
        if key in kv:
            try:
                kwargs[key] = conv(kv[key])
            except ValueError:
                raise ParseError(f"bad value for {key!r}: {kv[key]!r}", path) from None
    try:
        return FusionConfig(**kwargs)
    except ConfigError as exc:
        raise ParseError(str(exc), path) from exc


def load_noise_config(path) -> NoiseParams:
    """Keys: gain_db, read_sigma_0, shot_k_0, seed."""
    kv = read_kv(path)
    kwargs = {}
    for key, conv in (
        ("gain_db", float),
        ("read_sigma_0", float),
        ("shot_k_0", float),
        ("seed", int),
    ):
        if key in kv:
            try:
                kwargs[key] = conv(kv[key])
            except ValueError:
                raise ParseError(f"bad value for {key!r}: {kv[key]!r}", path) from None
    try:
        return NoiseParams(**kwargs)
    except ConfigError as exc:
        raise ParseError(str(exc), path) from exc


def _parse_floats(text: str, count: int, path, key: str) -> list[float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != count:
        raise ParseError(f"{key} needs {count} values, got {len(parts)}", path)
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ParseError(f"bad value in {key}: {text!r}", path) from None


def _float_or_parse_error(text: str, path, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad value for {key!r}: {text!r}", path) from None
