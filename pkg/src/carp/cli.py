"""Command-line interface.

Subcommands: detect, advise, recommend, eval, synth, synth-train, serve.
Exit codes partition the failure modes for scripting:
  2  image unreadable / other I/O problems
  3  training data failure or an empty evaluation set
  4  invalid hand or rank token
  5  no visible dealer upcard
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .classify import train_knn
from .dataset import evaluate_patches, evaluate_scenes, load_training_dir
from .errors import (
    CarpError,
    InvalidHandError,
    InvalidImageError,
    NotARankError,
    TrainingDataError,
)
from .pipeline import analyze, detect_cards
from .raster import load_image
from .strategy import Hand, normalize_rank, recommend
from .synth import make_training_dir, random_scenes, render_scene

TRAIN_DIR_ENV = "CARP_TRAIN_DIR"

EXIT_IO = 2
EXIT_TRAINING = 3
EXIT_HAND = 4
EXIT_UPCARD = 5


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _resolve_train_dir(args) -> str | None:
    train_dir = args.train_dir or os.environ.get(TRAIN_DIR_ENV)
    if not train_dir:
        return None
    return train_dir


def _load_model(args):
    train_dir = _resolve_train_dir(args)
    if not train_dir:
        raise TrainingDataError(f"no training directory (use --train-dir or ${TRAIN_DIR_ENV})")
    patches = load_training_dir(train_dir)
    return train_knn([(p.patch, p.label) for p in patches], k=args.k)


def _emit_analysis(args, img, result) -> None:
    if args.annotate:
        from .figures import save_annotated

        save_annotated(img, result, args.annotate)
    if args.debug_dir:
        from .figures import write_debug_dir

        write_debug_dir(img, result, args.debug_dir)
    if args.json:
        print(json.dumps(result.to_dict()))
        return
    for det in result.detections:
        cx, cy = det.quad.centroid
        print(f"{det.label:>4}  role={det.role:<10} centroid=({cx:.1f}, {cy:.1f})")
    if not result.detections:
        print("no cards detected")
    if result.dealer_upcard is not None:
        print(f"dealer upcard: {result.dealer_upcard}")
    if result.player_hand:
        print(f"player hand: {', '.join(result.player_hand)}")
    if result.recommendation is not None:
        print(result.recommendation.display)


def cmd_detect(args) -> int:
    try:
        model = _load_model(args)
    except TrainingDataError as exc:
        return _fail(EXIT_TRAINING, str(exc))
    try:
        img = load_image(args.image)
    except InvalidImageError as exc:
        return _fail(EXIT_IO, str(exc))
    result = detect_cards(img, model, keep_debug=bool(args.debug_dir))
    _emit_analysis(args, img, result)
    return 0


def cmd_advise(args) -> int:
    try:
        model = _load_model(args)
    except TrainingDataError as exc:
        return _fail(EXIT_TRAINING, str(exc))
    try:
        img = load_image(args.image)
    except InvalidImageError as exc:
        return _fail(EXIT_IO, str(exc))
    result = analyze(
        img, model, split_fraction=args.split_fraction, keep_debug=bool(args.debug_dir)
    )
    if result.recommendation is None:
        valid_ranks = all(c != "BACK" for c in result.player_hand)
        if len(result.player_hand) < 2 or not valid_ranks:
            _emit_analysis(args, img, result)
            return _fail(EXIT_HAND, f"invalid hand: player shows {list(result.player_hand)}")
        _emit_analysis(args, img, result)
        return _fail(EXIT_UPCARD, "no visible dealer upcard")
    _emit_analysis(args, img, result)
    return 0


def cmd_recommend(args) -> int:
    try:
        ranks = [normalize_rank(tok.strip()) for tok in args.player.split(",") if tok.strip()]
        upcard = normalize_rank(args.dealer.strip())
        move = recommend(Hand(ranks), upcard)
    except (NotARankError, InvalidHandError) as exc:
        return _fail(EXIT_HAND, str(exc))
    print(move.display)
    return 0


def cmd_eval(args) -> int:
    try:
        model = _load_model(args)
    except TrainingDataError as exc:
        return _fail(EXIT_TRAINING, str(exc))

    try:
        if args.test_dir:
            patches = load_training_dir(args.test_dir)
            report = evaluate_patches(model, patches)
        else:
            if args.synthetic <= 0:
                raise TrainingDataError("evaluation set is empty (--synthetic must be > 0)")
            specs = random_scenes(args.synthetic, args.seed, noise_sigma=args.noise)
            scenes = [render_scene(s) for s in specs]
            report = evaluate_scenes(model, scenes)
    except TrainingDataError as exc:
        return _fail(EXIT_TRAINING, str(exc))

    print(report.text_table())
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_dict(), indent=2))
    if args.report_dir:
        from .figures import save_confusion_matrix

        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(report.text_table() + "\n")
        (out / "report.csv").write_text(report.to_csv())
        (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2))
        save_confusion_matrix(report, out / "confusion_matrix.png")
    return 0


def cmd_synth(args) -> int:
    from .synth import save_scene

    specs = random_scenes(args.count, args.seed, noise_sigma=args.noise)
    out = Path(args.out_dir)
    for i, spec in enumerate(specs):
        scene = render_scene(spec)
        save_scene(scene, out, f"scene_{i:04d}")
    print(f"wrote {len(specs)} scenes to {out}")
    return 0


def cmd_synth_train(args) -> int:
    kwargs = {}
    if args.widths:
        kwargs["widths"] = tuple(float(w) for w in args.widths.split(","))
    if args.angles:
        kwargs["angles"] = tuple(float(a) for a in args.angles.split(","))
    out = make_training_dir(args.out_dir, seed=args.seed, **kwargs)
    n = sum(1 for _ in Path(out).glob("*/*.png"))
    print(f"wrote {n} training patches to {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    try:
        model = _load_model(args)
    except TrainingDataError as exc:
        return _fail(EXIT_TRAINING, str(exc))
    static = args.static_dir
    if static is None:
        default_static = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if default_static.is_dir():
            static = str(default_static)
    app = create_app(model, static_dir=static, split_fraction=args.split_fraction)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--train-dir", help=f"training patch directory (default ${TRAIN_DIR_ENV})")
    p.add_argument("--k", type=int, default=3, help="KNN neighbor count (default 3)")


def _add_analysis_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("image", help="input photo (PNG or JPEG)")
    _add_model_args(p)
    p.add_argument("--json", action="store_true", help="emit the analysis as JSON")
    p.add_argument("--annotate", metavar="OUT.png", help="write an annotated overlay image")
    p.add_argument("--debug-dir", metavar="DIR", help="dump pipeline intermediates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carp", description="Playing-card detection and blackjack strategy advisor"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect and classify cards in a photo")
    _add_analysis_args(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("advise", help="detect cards and recommend the optimal move")
    _add_analysis_args(p)
    p.add_argument(
        "--split-fraction",
        type=float,
        default=None,
        help="fixed dealer/player split as a fraction of image height (default: 2-means on y)",
    )
    p.set_defaults(func=cmd_advise)

    p = sub.add_parser("recommend", help="strategy engine without an image")
    p.add_argument("--player", required=True, help="comma-separated ranks, e.g. A,7")
    p.add_argument("--dealer", required=True, help="dealer upcard rank")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("eval", help="evaluate the classifier")
    _add_model_args(p)
    p.add_argument("--test-dir", help="patch directory to classify")
    p.add_argument("--synthetic", type=int, default=0, help="number of synthetic scenes")
    p.add_argument("--seed", type=int, default=0, help="scene generator seed")
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian pixel noise sigma")
    p.add_argument("--json", metavar="OUT.json", help="also write the report as JSON")
    p.add_argument(
        "--report-dir", metavar="DIR", help="write report.txt/csv/json and confusion_matrix.png"
    )
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="render synthetic scenes with ground-truth sidecars")
    p.add_argument("out_dir")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("synth-train", help="build a synthetic training corpus")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--widths", help="comma-separated card widths in pixels")
    p.add_argument("--angles", help="comma-separated rotation angles in degrees")
    p.set_defaults(func=cmd_synth_train)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_model_args(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", help="directory of web UI assets (default frontend/dist)")
    p.add_argument("--split-fraction", type=float, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CarpError as exc:
        return _fail(EXIT_IO, str(exc))


if __name__ == "__main__":
    sys.exit(main())
