"""Command-line interface: detect, hdetect, bench-noise, match."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .detector import DetectorParams, detect
from .errors import DsegError, InvalidInputError
from .evaluation import add_noise, match
from .hierarchical import HierarchicalParams, detect_hierarchical
from .image import load_image
from .serialize import read_segments, write_report_csv, write_segments

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_BAD_PARAMS = 3
EXIT_BAD_SCHEMA = 4


def _apply_threads_cap() -> None:
    cap = os.environ.get("DSEG_THREADS")
    if not cap:
        return
    try:
        import numba

        numba.set_num_threads(max(1, int(cap)))
    except (ValueError, ImportError):
        pass


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau-gmax", type=float, default=None, help="seed contrast threshold")
    p.add_argument("--tau-angle", type=float, default=None, help="direction cosine gate")
    p.add_argument("--delta-t", type=float, default=None, help="extension step (px)")
    p.add_argument("--sigma-r", type=float, default=None, help="cross-track observation std-dev")
    p.add_argument("--n-o", type=int, default=None, help="half-count of cross-track measures")
    p.add_argument("--min-length", type=float, default=0.0, help="drop segments shorter than this")


def _params_from_args(args) -> DetectorParams:
    params = DetectorParams()
    overrides = {}
    if args.tau_gmax is not None:
        overrides["tau_Gmax"] = args.tau_gmax
    if args.tau_angle is not None:
        overrides["tau_angle"] = args.tau_angle
    if args.delta_t is not None:
        overrides["delta_t"] = args.delta_t
    if args.sigma_r is not None:
        overrides["sigma_r"] = args.sigma_r
    if args.n_o is not None:
        overrides["n_o"] = args.n_o
    return replace(params, **overrides) if overrides else params


def _load(path):
    try:
        return load_image(path)
    except (OSError, InvalidInputError) as exc:
        print(f"error: cannot read input {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _run_detect(args, hierarchical: bool) -> int:
    image = _load(args.input)
    try:
        params = _params_from_args(args)
        if hierarchical:
            hp = HierarchicalParams(base=params, n_p=args.levels, s_p=args.scale)
            segments = detect_hierarchical(image, hp)
        else:
            segments = detect(image, params)
    except DsegError as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    if args.min_length > 0:
        segments = [s for s in segments if s.length >= args.min_length]
    write_segments(args.out, segments, width=image.width, height=image.height)
    if args.render:
        from .render import svg_overlay

        svg_overlay(image, segments, args.render)
    if args.histogram:
        from .render import save_length_histogram

        save_length_histogram(segments, args.histogram)
    print(f"{len(segments)} segments -> {args.out}")
    return EXIT_OK


def _run_bench_noise(args) -> int:
    image = _load(args.input)
    try:
        params = _params_from_args(args)
        if args.frames < 1:
            raise InvalidInputError("--frames must be >= 1")
    except DsegError as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    reference = detect(image, params)
    rows = []
    for i in range(args.frames + 1):
        noisy = add_noise(image, i, rng_seed=args.seed + i)
        current = detect(noisy, params)
        rows.append((i, match(reference, current)))
    write_report_csv(args.out, rows)
    if args.plot:
        from .render import save_bench_plot

        save_bench_plot(rows, args.plot)
    print(f"{len(rows)} rows -> {args.out}")
    return EXIT_OK


def _run_match(args) -> int:
    try:
        ref = read_segments(args.input[0])
        cur = read_segments(args.input[1])
    except OSError as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SCHEMA
    report = match(ref, cur, tau_dist=args.tau_dist)
    if args.out:
        write_report_csv(args.out, [(0, report)])
    print(
        f"ref={report.n_ref} cur={report.n_cur} matched={report.matched} "
        f"unmatched={report.unmatched} split={report.split} "
        f"repeatability={report.repeatability:.4f}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dseg", description="Line segment detection on gradient images")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="flat detection on one image")
    d.add_argument("--input", required=True, help="PGM (P2/P5) or PNG image")
    d.add_argument("--out", required=True, help="output segment JSON")
    d.add_argument("--render", default=None, help="optional SVG overlay path")
    d.add_argument("--histogram", default=None, help="optional length-histogram figure (PNG)")
    _add_param_flags(d)

    hd = sub.add_parser("hdetect", help="hierarchical (pyramid) detection")
    hd.add_argument("--input", required=True)
    hd.add_argument("--out", required=True)
    hd.add_argument("--render", default=None)
    hd.add_argument("--histogram", default=None)
    hd.add_argument("--levels", type=int, default=3, help="pyramid levels n_p")
    hd.add_argument("--scale", type=float, default=2.0, help="pyramid scale factor s_p")
    _add_param_flags(hd)

    b = sub.add_parser("bench-noise", help="noise-injection repeatability sweep")
    b.add_argument("--input", required=True, help="reference image")
    b.add_argument("--out", required=True, help="output CSV")
    b.add_argument("--frames", type=int, default=4, help="max noise frame index")
    b.add_argument("--seed", type=int, default=0, help="noise RNG seed")
    b.add_argument("--plot", default=None, help="optional repeatability figure (PNG)")
    _add_param_flags(b)

    m = sub.add_parser("match", help="match two segment JSON files")
    m.add_argument("--input", action="append", required=True, help="give twice: reference, current")
    m.add_argument("--out", default=None, help="optional CSV report path")
    m.add_argument("--tau-dist", type=float, default=50.0, help="match distance threshold")
    return ap


def main(argv=None) -> int:
    _apply_threads_cap()
    args = build_parser().parse_args(argv)
    if args.command == "detect":
        return _run_detect(args, hierarchical=False)
    if args.command == "hdetect":
        return _run_detect(args, hierarchical=True)
    if args.command == "bench-noise":
        return _run_bench_noise(args)
    if args.command == "match":
        if len(args.input) != 2:
            print("error: match needs exactly two --input files", file=sys.stderr)
            return EXIT_BAD_INPUT
        return _run_match(args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
