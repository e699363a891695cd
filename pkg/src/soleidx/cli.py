"""Command-line front end: one subcommand per pipeline stage plus catalog tools.

Exit codes: 0 success, 1 usage error, 2 data error (decode, degenerate
histogram, duplicate id, ...). Errors go to stderr prefixed ``error: ``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .corpus import write_corpus
from .enhance import equalize
from .errors import DataError, DecodeFailed, DuplicateId, ParameterError, SoleidxError
from .fileio import atomic_write
from .imagecore import decode_image, encode_pgm
from .indexdb import (
    add_record,
    format_timestamp,
    ingest,
    make_record,
    parse_timestamp,
    query_range,
    read_catalog_file,
    run_pipeline,
    write_catalog_file,
)
from .restore import (
    DEFAULT_GAMMA,
    DEFAULT_K,
    RestorationParams,
    degrade,
    motion_blur_psf,
    restore,
)
from .segment import binarize, global_threshold_index

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

DEFAULT_BLUR_LEN = 7
DEFAULT_BLUR_ANGLE = 0.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"error: {message}\n")


# argparse type callables; ArgumentTypeError messages get the flag name prepended


def _int_at_least(lo):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {value}")
        return value
    return parse


def _finite_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return value


def _non_negative(text):
    value = _finite_float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _unit_interval(text):
    value = _finite_float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return text  # keep the literal: queries use exact decimal arithmetic


def _tolerance(text):
    _non_negative(text)
    return text


def _timestamp(text):
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _record_id(text):
    if not text or any(ch.isspace() for ch in text):
        raise argparse.ArgumentTypeError(f"must be a non-empty token without whitespace, got {text!r}")
    return text


def _brand(text):
    if any(ch in text for ch in "\t\n\r"):
        raise argparse.ArgumentTypeError("may not contain tabs or line breaks")
    return text


def _add_blur_flags(p):
    p.add_argument("--blur-len", type=_int_at_least(1), default=DEFAULT_BLUR_LEN,
                   help=f"motion blur length in pixels (default {DEFAULT_BLUR_LEN})")
    p.add_argument("--blur-angle", type=_finite_float, default=DEFAULT_BLUR_ANGLE,
                   help="motion blur angle in degrees, counter-clockwise (default 0)")


def _add_filter_flags(p):
    p.add_argument("--k", type=_non_negative, default=DEFAULT_K,
                   help=f"Wiener noise-to-signal constant (default {DEFAULT_K})")
    p.add_argument("--gamma", type=_non_negative, default=DEFAULT_GAMMA,
                   help=f"CLS regularization weight (default {DEFAULT_GAMMA})")


def _add_index_flags(p):
    p.add_argument("--db", required=True, type=Path, help="catalog file")
    p.add_argument("--id", required=True, type=_record_id, dest="record_id")
    p.add_argument("--brand", type=_brand, default="")
    p.add_argument("--restore", choices=("wiener", "cls"), default=None,
                   help="restore the equalized image before thresholding")
    _add_blur_flags(p)
    _add_filter_flags(p)
    p.add_argument("--created-at", type=_timestamp, default=None,
                   help="override the record timestamp (YYYY-MM-DDThh:mm:ssZ)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="soleidx", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convert", help="decode BMP/PGM, grayscale, write PGM")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", required=True, type=Path)

    p = sub.add_parser("enhance", help="histogram equalization")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", required=True, type=Path)

    p = sub.add_parser("restore", help="Wiener or constrained least squares deblurring")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", required=True, type=Path)
    p.add_argument("--method", choices=("wiener", "cls"), default="wiener")
    _add_blur_flags(p)
    _add_filter_flags(p)

    p = sub.add_parser("degrade", help="simulate motion blur and Gaussian noise")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", required=True, type=Path)
    _add_blur_flags(p)
    p.add_argument("--sigma", type=_non_negative, default=0.0,
                   help="noise standard deviation on the [0, 1] scale (default 0)")
    p.add_argument("--seed", type=_int_at_least(0), default=0)

    p = sub.add_parser("segment", help="Otsu global threshold")
    p.add_argument("input", type=Path)
    p.add_argument("--emit-binary", type=Path, default=None, metavar="OUT_PGM")

    p = sub.add_parser("index", help="catalog management")
    isub = p.add_subparsers(dest="index_command", required=True, parser_class=_Parser)
    q = isub.add_parser("add", help="ingest an image and append it to the catalog")
    q.add_argument("input", type=Path)
    _add_index_flags(q)
    q = isub.add_parser("query", help="records within a tau tolerance")
    q.add_argument("--db", required=True, type=Path)
    q.add_argument("--tau", required=True, type=_unit_interval)
    q.add_argument("--tol", required=True, type=_tolerance)

    p = sub.add_parser("gen-corpus", help="write synthetic sole-pattern PGMs")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--count", required=True, type=_int_at_least(1))
    p.add_argument("--seed", type=_int_at_least(0), default=0)
    p.add_argument("--size", type=_int_at_least(16), default=128)

    p = sub.add_parser("pipeline", help="convert, enhance, [restore], segment, index add")
    p.add_argument("input", type=Path)
    _add_index_flags(p)
    p.add_argument("--save-stages", type=Path, default=None, metavar="DIR",
                   help="also write each intermediate image as a PGM")
    return parser


def _read_bytes(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise DecodeFailed(f"cannot read {str(path)!r}: {exc.strerror or exc}") from None


def _load_gray(path: Path):
    return decode_image(_read_bytes(path))


def _psf(args):
    return motion_blur_psf(args.blur_len, args.blur_angle)


def _restoration(args):
    if args.restore is None:
        return None, None
    return RestorationParams(args.restore, args.k, args.gamma), _psf(args)


def _cmd_convert(args, out):
    atomic_write(args.output, encode_pgm(_load_gray(args.input)))


def _cmd_enhance(args, out):
    atomic_write(args.output, encode_pgm(equalize(_load_gray(args.input))))


def _cmd_restore(args, out):
    img = _load_gray(args.input)
    params = RestorationParams(args.method, args.k, args.gamma)
    atomic_write(args.output, encode_pgm(restore(img, _psf(args), params)))


def _cmd_degrade(args, out):
    img = _load_gray(args.input)
    atomic_write(args.output, encode_pgm(degrade(img, _psf(args), args.sigma, args.seed)))


def _cmd_segment(args, out):
    img = _load_gray(args.input)
    result = global_threshold_index(img)
    if args.emit_binary is not None:
        atomic_write(args.emit_binary, encode_pgm(binarize(img, result.t).to_gray()))
    print(result.summary(), file=out)


def _cmd_index_add(args, out):
    cat = read_catalog_file(args.db)
    params, psf = _restoration(args)
    rec = ingest(_read_bytes(args.input), args.record_id, args.brand, params, psf,
                 catalog=cat, created_at=args.created_at)
    write_catalog_file(args.db, add_record(cat, rec))
    print(rec.to_line(), file=out)


def _cmd_index_query(args, out):
    for rec in query_range(read_catalog_file(args.db), args.tau, args.tol):
        print(rec.to_line(), file=out)


def _cmd_gen_corpus(args, out):
    paths = write_corpus(args.out, args.count, args.seed, args.size)
    print(f"wrote {len(paths)} prints to {args.out}", file=out)


def _cmd_pipeline(args, out):
    cat = read_catalog_file(args.db)
    if args.record_id in cat:
        raise DuplicateId(f"id {args.record_id!r} already in catalog")
    data = _read_bytes(args.input)
    params, psf = _restoration(args)
    result = run_pipeline(data, params, psf)

    gray, enhanced = result.gray, result.enhanced
    print(f"convert: {gray.width}x{gray.height} levels={gray.levels}", file=out)
    print(f"enhance: min={int(enhanced.pixels.min())} max={int(enhanced.pixels.max())}", file=out)
    if params is None:
        print("restore: skipped", file=out)
    else:
        knob = f"k={params.k!r}" if params.method == "wiener" else f"gamma={params.gamma!r}"
        print(f"restore: {params.method} len={args.blur_len} angle={args.blur_angle!r} {knob}",
              file=out)
    print(f"segment: {result.otsu.summary()}", file=out)

    if args.save_stages is not None:
        args.save_stages.mkdir(parents=True, exist_ok=True)
        stages = {"gray": gray, "enhanced": enhanced, "restored": result.restored,
                  "binary": binarize(result.segmented_input, result.otsu.t).to_gray()}
        for name, img in stages.items():
            if img is not None:
                atomic_write(args.save_stages / f"{name}.pgm", encode_pgm(img))

    stamp = args.created_at or format_timestamp()
    rec = make_record(result, data, args.record_id, args.brand, stamp)
    write_catalog_file(args.db, add_record(cat, rec))
    print(f"index: {rec.to_line()}", file=out)


_HANDLERS = {
    "convert": _cmd_convert,
    "enhance": _cmd_enhance,
    "restore": _cmd_restore,
    "degrade": _cmd_degrade,
    "segment": _cmd_segment,
    ("index", "add"): _cmd_index_add,
    ("index", "query"): _cmd_index_query,
    "gen-corpus": _cmd_gen_corpus,
    "pipeline": _cmd_pipeline,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    key = (args.command, args.index_command) if args.command == "index" else args.command
    try:
        _HANDLERS[key](args, out)
    except ParameterError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_USAGE
    except (DataError, SoleidxError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: IO: {exc}", file=err)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
