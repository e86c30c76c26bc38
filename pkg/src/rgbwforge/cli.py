"""Command-line interface.

Subcommands: generate, fuse, render, score, bench, table. Exit codes:
0 success, 1 when some scenes failed, 2 for configuration/parse errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import CANONICAL_RGBW_LAYOUT, RgbwLayout
from .errors import RgbwForgeError
from .fileio import load_fusion_config, load_isp_config, load_noise_config
from .fusion import FusionConfig
from .harness import (
    SceneSet,
    bench,
    fuse_set,
    generate_set,
    load_rgb_sources,
    render,
    resolve_threads,
    score_run,
    table_replay,
)
from .isp import IspConfig
from .metrics import format_leaderboard
from .noise import NoiseParams
from .scenes import make_scene, scene_id


def _parse_gains(text: str) -> tuple[float, ...]:
    try:
        gains = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise RgbwForgeError(f"bad gains list {text!r}") from None
    if not gains:
        raise RgbwForgeError("empty gains list")
    return gains


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise RgbwForgeError(f"bad size {text!r}, expected WIDTHxHEIGHT") from None
    if w % 4 or h % 4 or w < 16 or h < 16:
        raise RgbwForgeError("size must be multiples of 4, at least 16x16")
    return w, h


def _cmd_generate(args) -> int:
    noise = load_noise_config(args.config) if args.config else NoiseParams()
    layout = (
        CANONICAL_RGBW_LAYOUT
        if args.layout in (None, "canonical")
        else RgbwLayout.from_string(args.layout)
    )
    if args.synthetic:
        w, h = _parse_size(args.size)
        sources = [
            (scene_id(i), make_scene(i, height=h, width=w, seed=args.seed))
            for i in range(args.synthetic)
        ]
    elif args.rgb_dir:
        sources = load_rgb_sources(args.rgb_dir)
    else:
        raise RgbwForgeError("provide an RGB source directory or --synthetic N")
    done, failures = generate_set(
        sources,
        args.out,
        noise=noise,
        gains=_parse_gains(args.gains),
        layout=layout,
        seed=args.seed,
        threads=resolve_threads(args.threads),
    )
    print(f"generated {len(done)} scene(s) under {args.out}")
    for sid, err in failures:
        print(f"FAILED {sid}: {err}", file=sys.stderr)
    return 1 if failures else 0


def _cmd_fuse(args) -> int:
    config = load_fusion_config(args.config) if args.config else FusionConfig()
    scene_set = SceneSet.scan(args.set_root, args.gain)
    written, failures = fuse_set(
        scene_set, config, args.out, threads=resolve_threads(args.threads)
    )
    print(f"fused {len(written)} scene(s) into {args.out}")
    for sid, err in failures:
        print(f"FAILED {sid}: {err}", file=sys.stderr)
    return 1 if failures else 0


def _cmd_render(args) -> int:
    config = load_isp_config(args.config) if args.config else IspConfig()
    out = render(args.bayer, config, args.out)
    print(f"wrote {out}")
    return 0


def _cmd_score(args) -> int:
    config = load_isp_config(args.config) if args.config else IspConfig()
    per_image, aggregate = score_run(
        args.pred_dir, args.gt_root, config, args.lpips, args.out
    )
    rows = dict(per_image)
    rows["aggregate"] = aggregate
    print(format_leaderboard(rows), end="")
    if args.out:
        print(f"report written under {args.out}")
    return 0


def _cmd_bench(args) -> int:
    config = load_fusion_config(args.config) if args.config else FusionConfig()
    result = bench(config, width=args.width, height=args.height, k=args.runs, seed=args.seed)
    print(
        f"{result.width}x{result.height}: {result.seconds:.3f}s per image "
        f"(fuse {result.fuse_seconds:.3f}s, render {result.render_seconds:.3f}s), "
        f"16M estimate {result.estimate_16m_seconds:.2f}s"
    )
    return 0


def _cmd_table(args) -> int:
    text = table_replay(args.metrics_csv)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgbwforge",
        description="RGBW binning simulation, W-guided fusion, ISP rendering, and scoring",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a scene set from RGB sources")
    p.add_argument("rgb_dir", nargs="?", help="directory of .ppm/.pgm sources")
    p.add_argument("--synthetic", type=int, default=0, metavar="N", help="use N synthetic scenes")
    p.add_argument("--size", default="256x256", help="synthetic scene size WIDTHxHEIGHT")
    p.add_argument("--out", required=True, help="scene set output directory")
    p.add_argument("--gains", default="24,42", help="comma-separated analog gains in dB")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="noise config file (key=value)")
    p.add_argument("--layout", help="RGBW layout string or 'canonical'")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("fuse", help="fuse every scene of a set at one gain")
    p.add_argument("set_root", help="scene set directory")
    p.add_argument("--gain", type=float, required=True, help="analog gain in dB")
    p.add_argument("--config", help="fusion config file (key=value)")
    p.add_argument("--out", required=True, help="prediction output directory")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_fuse)

    p = sub.add_parser("render", help="ISP-render a raw Bayer file to PPM")
    p.add_argument("bayer", help="input .bin path")
    p.add_argument("--config", help="ISP config file (key=value)")
    p.add_argument("--out", help="output .ppm path")
    p.set_defaults(fn=_cmd_render)

    p = sub.add_parser("score", help="score predictions against ground truth")
    p.add_argument("pred_dir", help="directory of <scene>.bin predictions")
    p.add_argument("gt_root", help="scene set directory with gt.bin files")
    p.add_argument("--config", help="ISP config file (key=value)")
    p.add_argument("--lpips", help="sidecar file of image_id,value perceptual distances")
    p.add_argument("--out", help="directory for report.csv and leaderboard.txt")
    p.set_defaults(fn=_cmd_score)

    p = sub.add_parser("bench", help="time fuse + render on synthetic input")
    p.add_argument("--config", help="fusion config file (key=value)")
    p.add_argument("--width", type=int, default=1800)
    p.add_argument("--height", type=int, default=1200)
    p.add_argument("-k", "--runs", type=int, default=5, help="timed repetitions (median)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("table", help="rank a CSV of name,psnr,ssim,lpips,kld rows by M4")
    p.add_argument("metrics_csv")
    p.add_argument("--out", help="write the table to a file instead of stdout")
    p.set_defaults(fn=_cmd_table)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except RgbwForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
