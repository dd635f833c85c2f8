#!/usr/bin/env python3
"""
Glaucoma screening command line

Subcommands:
    generate   synthetic fundus dataset with disc masks and a manifest
    train      two-phase training of all four streams
    screen     screen one image with the trained ensemble
    eval       metrics, ROC tables and subset / operator studies on a manifest
    transform  polar (or inverse polar) transform of one image
    localize   disc location of one image from the seg_guided stream
    reference  published reference results

Environment (.env is loaded at start):
    DISCSCREEN_CONFIG, DISCSCREEN_SEED, DISCSCREEN_WEIGHTS_DIR,
    DISCSCREEN_REPORT_DIR, DISCSCREEN_VERBOSE
"""

import argparse
import math
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from datasets import generate_synthetic, export_synthetic, load_manifest
from imaging import PolarParams, inverse_polar_transform, polar_transform, read_ppm, write_ppm
from networks import STREAM_KINDS
from resources import get_published_reference
from screening import (
    FUSION_MODES,
    PipelineConfig,
    StreamSet,
    evaluate_pipeline,
    evaluation_report,
    locate,
    location_lines,
    required_streams,
    screen_image,
    screening_lines,
    train_pipeline,
    write_evaluation,
)
from utils.console import Console, set_console
from utils.errors import ConfigurationError, ScreeningError, WeightFileError


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="key=value settings file (default: $DISCSCREEN_CONFIG)")
    common.add_argument("--seed", type=int, default=None, help="Run seed")
    common.add_argument("--subset", default=None, help="Streams to fuse, e.g. disc,polar")
    common.add_argument("--fusion", choices=FUSION_MODES, default=None, help="Fusion operator")
    common.add_argument("--sens-floor", type=float, default=0.95,
                        help="Sensitivity floor of the high-sensitivity table")
    common.add_argument("--verbose", "-v", action="store_true", help="Per-epoch and per-image lines")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="discscreen", description="Disc-aware ensemble glaucoma screening")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", parents=[common], help="Write a synthetic dataset")
    generate.add_argument("--count", type=int, default=200)
    generate.add_argument("--out", type=Path, required=True, help="Output directory")
    generate.add_argument("--positive-fraction", type=float, default=None,
                          help="Share of glaucoma images (e.g. 0.1 for an imbalanced test set)")
    generate.add_argument("--image-side", type=int, default=None)

    train = commands.add_parser("train", parents=[common], help="Train all four streams")
    train.add_argument("--manifest", type=Path, default=None, help="Training manifest (default: paths.dataset)")
    train.add_argument("--weights-dir", type=Path, default=None)

    screen = commands.add_parser("screen", parents=[common], help="Screen one image")
    screen.add_argument("image", type=Path)
    screen.add_argument("--weights-dir", type=Path, default=None)

    evaluate = commands.add_parser("eval", parents=[common], help="Evaluate on a labeled manifest")
    evaluate.add_argument("--manifest", type=Path, default=None, help="Test manifest (default: paths.dataset)")
    evaluate.add_argument("--weights-dir", type=Path, default=None)
    evaluate.add_argument("--report-dir", type=Path, default=None)

    transform = commands.add_parser("transform", parents=[common], help="Polar transform one image")
    transform.add_argument("image", type=Path)
    transform.add_argument("--out", type=Path, required=True)
    transform.add_argument("--center", type=float, nargs=2, metavar=("U", "V"), default=None,
                           help="Polar center (default: image center)")
    transform.add_argument("--radius", type=float, default=None, help="Polar radius (default: half the short side)")
    transform.add_argument("--angle", type=float, default=0.0, help="Angle offset in degrees")
    transform.add_argument("--inverse", action="store_true", help="Map a polar image back to Cartesian")
    transform.add_argument("--size", type=int, nargs=2, metavar=("W", "H"), default=None,
                           help="Cartesian output size for --inverse")

    localize = commands.add_parser("localize", parents=[common], help="Locate the optic disc")
    localize.add_argument("image", type=Path)
    localize.add_argument("--weights-dir", type=Path, default=None)

    commands.add_parser("reference", parents=[common], help="Print the published reference results")
    return parser


def load_config(args: argparse.Namespace) -> PipelineConfig:
    """Settings file, then DISCSCREEN_* environment, then command-line flags."""
    if not 0 < args.sens_floor <= 1:
        raise ConfigurationError(f"--sens-floor must be in (0, 1], got {args.sens_floor}")
    path = args.config or (Path(os.environ["DISCSCREEN_CONFIG"]) if os.getenv("DISCSCREEN_CONFIG") else None)
    overrides: Dict[str, Any] = {
        "seed": args.seed,
        "fusion.mode": args.fusion,
        "fusion.subset": args.subset,
        "paths.weights_dir": getattr(args, "weights_dir", None),
        "paths.report_dir": getattr(args, "report_dir", None),
        "paths.dataset": getattr(args, "manifest", None),
    }
    if args.command == "generate":
        overrides.update({
            "synthetic.seed": args.seed,
            "synthetic.positive_fraction": args.positive_fraction,
            "synthetic.image_side": args.image_side,
        })
    return PipelineConfig.load(path, overrides)


def _manifest_path(config: PipelineConfig) -> Path:
    if config.paths.dataset is None:
        raise ConfigurationError("no manifest given (use --manifest or paths.dataset)")
    return config.paths.dataset


def cmd_generate(args: argparse.Namespace, config: PipelineConfig, console: Console) -> int:
    samples = generate_synthetic(config.synthetic, args.count)
    manifest = export_synthetic(samples, args.out)
    positives = sum(sample.label for sample in samples)
    print(f"generated {len(samples)} images (glaucoma {positives}, normal {len(samples) - positives}): {manifest}")
    console.log(f"Wrote {manifest}", "success")
    return 0


def cmd_train(args: argparse.Namespace, config: PipelineConfig, console: Console) -> int:
    manifest = load_manifest(_manifest_path(config))
    console.log(f"Loaded {len(manifest)} training records from {manifest.path}", "info")
    streams, log = train_pipeline(manifest.load_samples(), config, console)

    weights_dir = config.paths.weights_dir
    try:
        weights_dir.mkdir(parents=True, exist_ok=True)
        (weights_dir / "pipeline.conf").write_text(config.to_settings_text(), encoding="utf-8")
    except OSError as exc:
        raise WeightFileError(weights_dir, f"cannot write weights directory ({exc.strerror or exc})") from exc
    for path in streams.save(weights_dir):
        print(f"weights: {path}")
    print(f"training log: {log.write_tsv(weights_dir / 'training_log.tsv')}")
    return 0


def cmd_screen(args: argparse.Namespace, config: PipelineConfig, console: Console) -> int:
    image = read_ppm(args.image)
    streams = StreamSet.load(config.paths.weights_dir, required_streams(config.fusion.subset))
    result = screen_image(streams, image, config, name=args.image.name, console=console)
    print("\n".join(screening_lines(result)))
    if result.fallback:
        console.log("Disc not found; crops used the image-center fallback", "warning")
    return 0


def cmd_eval(args: argparse.Namespace, config: PipelineConfig, console: Console) -> int:
    manifest = load_manifest(_manifest_path(config))
    streams = StreamSet.load(config.paths.weights_dir, STREAM_KINDS)
    result = evaluate_pipeline(streams, manifest.load_samples(), config, console)
    written = write_evaluation(result, config.paths.report_dir, config.fusion.mode, args.sens_floor)
    print(evaluation_report(result, config.fusion.mode, args.sens_floor), end="")
    console.log(f"Wrote {len(written)} report files to {config.paths.report_dir}", "success")
    return 0


def cmd_transform(args: argparse.Namespace, config: PipelineConfig, console: Console) -> int:
    image = read_ppm(args.image)
    if args.inverse:
        width, height = args.size or (2 * image.height, 2 * image.height)
        center = args.center or ((width - 1) / 2, (height - 1) / 2)
        params = PolarParams(center[0], center[1], args.radius or image.height,
                             math.radians(args.angle), config.polar.stride)
        out = inverse_polar_transform(image, params, width, height)
    else:
        center = args.center or image.center
        params = PolarParams(center[0], center[1], args.radius or min(image.width, image.height) / 2,
                             math.radians(args.angle), config.polar.stride)
        out = polar_transform(image, params)
    path = write_ppm(out, args.out)
    print(f"{'inverse polar' if args.inverse else 'polar'}: {out.width}x{out.height} -> {path}")
    return 0


def cmd_localize(args: argparse.Namespace, config: PipelineConfig, console: Console) -> int:
    image = read_ppm(args.image)
    streams = StreamSet.load(config.paths.weights_dir, ("seg_guided",))
    location = locate(streams["seg_guided"], image, config, console)
    print("\n".join(location_lines(args.image.name, location)))
    return 0


def cmd_reference(args: argparse.Namespace, config: PipelineConfig, console: Console) -> int:
    print(get_published_reference())
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "screen": cmd_screen,
    "eval": cmd_eval,
    "transform": cmd_transform,
    "localize": cmd_localize,
    "reference": cmd_reference,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit code."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    console = Console(verbose=True if args.verbose else None)
    set_console(console)
    try:
        config = load_config(args)
        return COMMANDS[args.command](args, config, console)
    except ScreeningError as exc:
        console.log(str(exc), "error")
        return exc.exit_code
    except KeyboardInterrupt:
        console.log("Interrupted", "warning")
        return 130


if __name__ == "__main__":
    sys.exit(main())
