"""Command-line interface for batch transfers and the HTTP service.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 engine error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from texwarp import codec, imaging, pipeline, service
from texwarp.errors import (
    ConfigError,
    ImageError,
    TexwarpError,
    WeightFormatError,
)

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_ENGINE = 3

WEIGHTS_ENV = "TFR_WEIGHTS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="texwarp",
        description="Semantic-guided texture transfer: batch CLI and HTTP service.",
    )
    parser.add_argument("--style", help="stylized source image (PNG)")
    parser.add_argument("--style-sem", help="source semantic map (PNG)")
    parser.add_argument("--target-sem", help="target semantic map (PNG)")
    parser.add_argument("--out", help="output image path (PNG)")
    parser.add_argument("--weights", help=f"TFRW weight file (or ${WEIGHTS_ENV})")
    parser.add_argument("--omega1", type=float, default=50.0,
                        help="stage I semantic weight (default 50)")
    parser.add_argument("--omega2", type=float, default=50.0,
                        help="stage II semantic weight (default 50)")
    parser.add_argument("--fusion", choices=("concat", "add", "downsample"),
                        default="concat", help="semantic fusion variant")
    parser.add_argument("--patch-size", type=int, default=3,
                        help="stage II patch size (default 3)")
    parser.add_argument("--patch-size-global", type=int, default=None,
                        help="override the stage I maximal patch size")
    parser.add_argument("--stride", type=int, default=1, help="patch stride")
    parser.add_argument("--stages", default="I,II,III",
                        help="comma-separated subset of I,II,III")
    parser.add_argument("--blend1", type=float, default=1.0,
                        help="stage I feature interpolation factor")
    parser.add_argument("--blend2", type=float, default=1.0,
                        help="stage II feature interpolation factor")
    parser.add_argument("--se-scope", choices=("global", "per-label"),
                        default="global", help="stage III statistics scope")
    parser.add_argument("--trace", action="store_true",
                        help="write per-stage intermediates and timings")
    parser.add_argument("--serve", metavar="ADDR",
                        help="run the HTTP service on host:port instead")
    parser.add_argument("--timeout", type=float, default=service.DEFAULT_TIMEOUT_S,
                        help="service request timeout in seconds")
    return parser


def _config_from_args(parser, args) -> pipeline.TransferConfig:
    for flag, value in (("--omega1", args.omega1), ("--omega2", args.omega2)):
        if value < 0:
            parser.error(f"{flag} must be non-negative, got {value}")
    for flag, value in (("--blend1", args.blend1), ("--blend2", args.blend2)):
        if not 0.0 <= value <= 1.0:
            parser.error(f"{flag} must be in [0, 1], got {value}")
    if args.patch_size < 1:
        parser.error(f"--patch-size must be >= 1, got {args.patch_size}")
    if args.patch_size_global is not None and args.patch_size_global < 1:
        parser.error(f"--patch-size-global must be >= 1, got {args.patch_size_global}")
    if args.stride < 1:
        parser.error(f"--stride must be >= 1, got {args.stride}")
    stages = frozenset(s.strip() for s in args.stages.split(",") if s.strip())
    if not stages <= {"I", "II", "III"}:
        parser.error(f"--stages must be a subset of I,II,III, got {args.stages!r}")
    try:
        return pipeline.TransferConfig(
            omega1=args.omega1,
            omega2=args.omega2,
            fusion=args.fusion,
            p_stage2=args.patch_size,
            stride=args.stride,
            stages=stages,
            blend1=args.blend1,
            blend2=args.blend2,
            se_scope=args.se_scope,
            patch_size_global=args.patch_size_global,
        )
    except ConfigError as exc:
        parser.error(str(exc))


def _load_weights(parser, args) -> codec.WeightStore:
    path = args.weights or os.environ.get(WEIGHTS_ENV)
    if not path:
        parser.error(f"--weights (or ${WEIGHTS_ENV}) is required")
    try:
        return codec.load_weights(path)
    except FileNotFoundError:
        print(f"texwarp: weight file not found: {path}", file=sys.stderr)
        raise SystemExit(EXIT_IO) from None
    except WeightFormatError as exc:
        print(f"texwarp: bad weight file: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO) from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from_args(parser, args)
    weights = _load_weights(parser, args)

    if args.serve:
        host, _, port = args.serve.rpartition(":")
        if not port.isdigit():
            parser.error(f"--serve expects HOST:PORT or PORT, got {args.serve!r}")
        service.serve(args.serve, weights, timeout_s=args.timeout)
        return 0

    for flag, value in (
        ("--style", args.style),
        ("--style-sem", args.style_sem),
        ("--target-sem", args.target_sem),
        ("--out", args.out),
    ):
        if not value:
            parser.error(f"{flag} is required unless --serve is given")

    try:
        s_sty = imaging.load_image(args.style)
        s_sem = imaging.load_image(args.style_sem)
        t_sem = imaging.load_image(args.target_sem)
    except (ImageError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"texwarp: cannot read input: {exc}", file=sys.stderr)
        return EXIT_IO

    start = time.perf_counter()
    try:
        result, trace = pipeline.run_transfer(s_sty, s_sem, t_sem, cfg, weights)
    except TexwarpError as exc:
        print(f"texwarp: transfer failed: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    total = time.perf_counter() - start

    try:
        imaging.save_image(result, args.out)
        if args.trace:
            stem = Path(args.out)
            for name, img in trace.images.items():
                imaging.save_image(img, stem.with_name(f"{stem.stem}_{name}.png"))
    except (ImageError, OSError) as exc:
        print(f"texwarp: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO

    if args.trace:
        for stage, seconds in trace.timings.items():
            print(f"{stage}: {seconds:.3f} s")
    print(f"wrote {args.out} in {total:.3f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
