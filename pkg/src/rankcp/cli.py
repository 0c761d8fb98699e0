"""Command line interface.

Detection::

    rankcp --input data.csv [--method divisive|agglomerative] [--json out.json] [--plot out.svg]

Synthetic data::

    rankcp generate --spec '[{"length": 100, "family": "gaussian", "location": [0, 0], "scale": [1, 1]}]' --out x.csv

Exit status: 0 on success, 1 for input errors (unreadable or malformed data),
2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .csvio import CSVFormatError, load_csv, write_csv
from .datagen import SegmentSpec, generate
from .energy import EnergyConfig
from .report import RunReport, emit_json, emit_svg
from .segmentation import DetectConfig, agglomerative_detect, divisive_detect

EXIT_OK, EXIT_INPUT, EXIT_USAGE = 0, 1, 2

DEFAULT_BLOCK = 2
DIVISIVE_ONLY = ("perms", "level", "kappa", "max_cp")


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid float {text!r}") from None
    if not (0.0 < value <= 2.0):
        raise argparse.ArgumentTypeError(f"alpha must be in (0, 2], got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError("seed must be a non-negative 64-bit integer")
    return value


def _detect_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rankcp",
        description="Multiple change point detection with rank energy statistics.",
        epilog="Use 'rankcp generate --help' for the synthetic data generator.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--input", required=True, metavar="PATH", help="numeric CSV, one observation per row")
    p.add_argument("--header", action="store_true", help="skip the first row of the CSV")
    p.add_argument("--method", choices=("divisive", "agglomerative"), default="divisive")
    p.add_argument("--alpha", type=_alpha, default=1.0, help="distance exponent in (0, 2] (default 1)")
    p.add_argument("--variant", choices=("ustat", "vstat"), default="ustat")
    p.add_argument("--min-size", type=_positive_int, default=2, help="minimum observations per side")
    p.add_argument("--grid", choices=("halton", "torus"), default="halton")
    p.add_argument("--seed", type=_seed, default=0)
    div = p.add_argument_group("divisive options")
    div.add_argument("--perms", type=_positive_int, default=None, help="permutations per test (default 199)")
    div.add_argument("--level", type=float, default=None, help="significance level (default 0.05)")
    div.add_argument("--kappa", choices=("segment-end", "full-sweep"), default=None,
                     help="pooled window for each split (default segment-end)")
    div.add_argument("--max-cp", type=int, default=None, metavar="N", help="stop after N change points")
    agg = p.add_argument_group("agglomerative options")
    agg.add_argument("--block", type=_positive_int, default=None, help="initial block size (default 2)")
    out = p.add_argument_group("output")
    out.add_argument("--json", metavar="PATH", help="write the JSON report here")
    out.add_argument("--plot", metavar="PATH", help="write an SVG plot here")
    out.add_argument("--timing", action="store_true",
                     help="record wall-clock time in the report (makes it non-reproducible)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _generate_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rankcp generate",
        description="Write a seeded synthetic series as CSV.",
    )
    p.add_argument("--spec", required=True,
                   help="JSON list of segments (inline or a file path); each has length, "
                        "family (gaussian|cauchy), location and scale")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--seed", type=_seed, default=0)
    return p


def _load_specs(text: str) -> list[SegmentSpec]:
    path = Path(text)
    raw = path.read_text() if not text.lstrip().startswith("[") and path.exists() else text
    items = json.loads(raw)
    if not isinstance(items, list):
        raise ValueError("segment spec must be a JSON list")
    return [SegmentSpec.from_dict(item) for item in items]


def _run_generate(argv: list[str]) -> int:
    parser = _generate_parser()
    args = parser.parse_args(argv)
    try:
        specs = _load_specs(args.spec)
    except (ValueError, KeyError, TypeError) as exc:
        parser.error(f"bad --spec: {exc}")
    try:
        write_csv(generate(specs, args.seed), args.out)
    except OSError as exc:
        print(f"rankcp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _build_config(args, parser: argparse.ArgumentParser) -> DetectConfig:
    if args.method == "divisive" and args.block is not None:
        parser.error("--block only applies to --method agglomerative")
    if args.method == "agglomerative":
        given = [f"--{name.replace('_', '-')}" for name in DIVISIVE_ONLY if getattr(args, name) is not None]
        if given:
            parser.error(f"{', '.join(given)} only apply to --method divisive")
    try:
        return DetectConfig(
            energy=EnergyConfig(alpha=args.alpha, variant=args.variant),
            min_size=args.min_size,
            n_permutations=199 if args.perms is None else args.perms,
            sig_level=0.05 if args.level is None else args.level,
            kappa_mode="segment_end" if args.kappa in (None, "segment-end") else "full_sweep",
            seed=args.seed,
            max_change_points=args.max_cp,
            grid=args.grid,
        )
    except ValueError as exc:
        parser.error(str(exc))


def _run_detect(argv: list[str]) -> int:
    parser = _detect_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _build_config(args, parser)
    block = (args.block or DEFAULT_BLOCK) if args.method == "agglomerative" else None

    try:
        series = load_csv(args.input, has_header=args.header)
    except (OSError, CSVFormatError) as exc:
        print(f"rankcp: error: {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    start = time.perf_counter()
    try:
        if args.method == "divisive":
            result = divisive_detect(series, cfg)
        else:
            result, _ = agglomerative_detect(series, block, cfg)
    except ValueError as exc:
        print(f"rankcp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    elapsed = time.perf_counter() - start

    report = RunReport(
        t=series.shape[0],
        d=series.shape[1],
        source=args.input,
        method=args.method,
        result=result,
        elapsed_seconds=round(elapsed, 6) if args.timing else None,
        initial_block=block,
    )
    try:
        if args.json:
            emit_json(report, args.json)
        if args.plot:
            emit_svg(series, result, args.plot)
    except OSError as exc:
        print(f"rankcp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    for cp in result.change_points:
        print(cp)
    return EXIT_OK


def run(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and argv[0] == "generate":
            return _run_generate(argv[1:])
        return _run_detect(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors and 0 for --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


def main() -> None:
    sys.exit(run())
