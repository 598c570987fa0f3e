"""Command line interface.

Subcommands:
  extract    manifest -> feature CSV + extraction report
  synth      render a synthetic two-class dataset with ground truth
  train      fit one model on all rows and save it as JSON
  evaluate   repeated train/test fits -> evaluation + SIS reports
  sis        repeated fits -> SIS report only
  report     per-class five-number summaries for features

Exit codes: 0 success, 1 per-file extraction errors (unless --lenient),
2 invalid arguments or configuration.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from ..ioutil import atomic_write_text
from ..learn.experiment import evaluate as evaluate_single
from ..learn.matrix import CLASS_TO_LABEL, FeatureMatrix
from ..learn.trees import TreeNode  # noqa: F401  (re-export for model tooling)
from ..patternfeat import FEATURE_NAMES, PatternFeatures, PatternMeta, class_summary
from .experiment import (
    ConfigError,
    ExperimentConfig,
    apply_imputation,
    load_features,
    run_experiment,
)
from .manifest import read_manifest
from .pipeline import extract
from .reports import write_json
from .synth import StainDistribution, SynthSpec, generate


def _parse_binarize_threshold(s: str):
    if s == "auto":
        return s
    try:
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"threshold must be 'auto' or an integer, got {s!r}"
        )


def _parse_decision_threshold(s: str) -> float:
    if s == "auto":
        return 0.5
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"threshold must be 'auto' or a number, got {s!r}"
        )


def _parse_pair(s: str) -> tuple[int, int]:
    parts = s.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {s!r}")
    return int(parts[0]), int(parts[1])


def _parse_floats(s: str) -> tuple[float, ...]:
    return tuple(float(p) for p in s.split(",") if p)


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", help="feature CSV produced by extract")
    p.add_argument("--manifest", help="image manifest (CSV or JSON)")
    p.add_argument("--lenient", action="store_true",
                   help="exit 0 even when some images fail")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("boosted", "forest"), default="boosted")
    p.add_argument("--impute", choices=("none", "zero", "knn"), default=None,
                   help="default: none for boosted, zero for forest")
    p.add_argument("--k", type=int, default=10, help="neighbors for knn imputation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=_parse_decision_threshold, default=0.5,
                   metavar="auto|T", help="decision threshold on P(gunshot)")
    p.add_argument("--trees", type=int, default=None, help="tree count")
    p.add_argument("--depth", type=int, default=None, help="max tree depth")
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--reg-lambda", type=float, default=None)
    p.add_argument("--min-child-weight", type=float, default=None)
    p.add_argument("--min-leaf", type=int, default=None)
    p.add_argument("--max-features", default=None,
                   help="per-split feature subset size, or sqrt/all")


def _model_params(args) -> dict:
    if args.model == "boosted":
        pairs = (("n_trees", args.trees), ("max_depth", args.depth),
                 ("learning_rate", args.learning_rate),
                 ("reg_lambda", args.reg_lambda),
                 ("min_child_weight", args.min_child_weight))
    else:
        mf = args.max_features
        if mf is not None and mf not in ("sqrt", "all"):
            mf = int(mf)
        pairs = (("n_trees", args.trees), ("max_depth", args.depth),
                 ("min_leaf", args.min_leaf), ("max_features", mf))
    return {k: v for k, v in pairs if v is not None}


def _impute_kind(args) -> str:
    if args.impute is not None:
        return args.impute
    return "none" if args.model == "boosted" else "zero"


def _config(args, out_dir: str, reps: int) -> ExperimentConfig:
    return ExperimentConfig(
        out_dir=out_dir,
        features_csv=args.features,
        manifest=args.manifest,
        model=args.model,
        impute=_impute_kind(args),
        k=args.k,
        reps=reps,
        seed=args.seed,
        decision_threshold=args.threshold,
        model_params=_model_params(args),
        lenient=args.lenient,
    )


def _extraction_exit(result, lenient: bool) -> int:
    if result is None or not result.errors or lenient:
        return 0
    return 1


def cmd_extract(args) -> int:
    records = read_manifest(args.manifest)
    result = extract(records, threshold=args.threshold)
    os.makedirs(args.out, exist_ok=True)
    features_path = os.path.join(args.out, "features.csv")
    result.matrix.to_csv(features_path)
    report_path = os.path.join(args.out, "extraction_report.json")
    write_json(result.to_report_dict(), report_path)
    print(f"wrote {features_path}")
    print(f"patterns: {len(result.patterns)}  skipped: {len(result.skips)}  "
          f"errors: {len(result.errors)}")
    return _extraction_exit(result, args.lenient)


def cmd_synth(args) -> int:
    gun = StainDistribution(area_median_px=args.gunshot_area,
                            stain_count=args.stains)
    imp = StainDistribution(area_median_px=args.impact_area,
                            stain_count=args.stains)
    spec = SynthSpec(patterns_per_class=args.patterns,
                     image_size=(args.width, args.height), dpi=args.dpi,
                     seed=args.seed, gunshot=gun, impact=imp,
                     distances_cm=args.distances)
    result = generate(spec, args.out)
    print(f"wrote {result.manifest_path}")
    print(f"wrote {result.truth_path}")
    print(f"patterns: {len(result.records)}")
    return 0


def cmd_train(args) -> int:
    config = _config(args, args.out, reps=1)
    config.validate()
    m, extraction = load_features(config)
    if m.n_rows == 0:
        print("error: no feature rows to train on", file=sys.stderr)
        return 1
    m = apply_imputation(m, config)
    params = config.build_params()
    if args.model == "boosted":
        from ..learn.boosted import train_boosted
        model = train_boosted(m, params)
    else:
        from ..learn.forest import train_forest
        model = train_forest(m, params, args.seed)
    os.makedirs(args.out, exist_ok=True)
    model_path = os.path.join(args.out, "model.json")
    atomic_write_text(model_path, model.to_json() + "\n")
    report = evaluate_single(model, m, decision_threshold=args.threshold)
    print(f"wrote {model_path}")
    print(f"training accuracy: {report.mean_accuracy:.4f}")
    return _extraction_exit(extraction, args.lenient)


def cmd_evaluate(args) -> int:
    config = _config(args, args.out, reps=args.reps)
    result = run_experiment(config)
    rep = result.evaluation
    print(f"mean accuracy over {rep.n_fits} fits: {rep.mean_accuracy:.4f}")
    for key, val in rep.mean_subsets.items():
        shown = "absent" if val is None else f"{val:.4f}"
        print(f"  {key}: {shown}")
    for name, path in sorted(result.paths.items()):
        print(f"wrote {path}")
    return _extraction_exit(result.extraction, config.lenient)


def cmd_sis(args) -> int:
    config = _config(args, args.out, reps=args.reps)
    result = run_experiment(config, write_evaluation=False)
    sis_map = result.sis.by_name()
    top = sorted(sis_map.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
    print(f"top features by SIS over {result.sis.n_fits} fits:")
    for name, value in top:
        print(f"  {name}: {value:.3f}")
    for name, path in sorted(result.paths.items()):
        print(f"wrote {path}")
    return _extraction_exit(result.extraction, config.lenient)


def cmd_report(args) -> int:
    m = FeatureMatrix.from_csv(args.features)
    patterns = _patterns_from_matrix(m)
    names = FEATURE_NAMES if args.feature == "all" else (args.feature,)
    doc = {name: class_summary(patterns, name) for name in names}
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "class_summary.json")
    write_json(doc, path)
    print(f"wrote {path}")
    return 0


def _patterns_from_matrix(m: FeatureMatrix) -> list[PatternFeatures]:
    out = []
    for i in range(m.n_rows):
        meta = PatternMeta(pattern_id=m.ids[i], label=CLASS_TO_LABEL[int(m.y[i])],
                           bt_distance_cm=float(m.bt_distance_cm[i]),
                           resolution=math.nan, image_width=0, image_height=0)
        values = {n: float(v) for n, v in zip(m.feature_names, m.X[i])}
        out.append(PatternFeatures(meta=meta, values=values))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spatterkit",
        description="Blood spatter pattern feature extraction and "
                    "mechanism classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="manifest -> feature CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=_parse_binarize_threshold, default="auto",
                   metavar="auto|T", help="binarization threshold")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--patterns", type=int, default=30, help="patterns per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dpi", type=float, default=600.0)
    p.add_argument("--width", type=int, default=1024)
    p.add_argument("--height", type=int, default=1024)
    p.add_argument("--gunshot-area", type=float, default=14.0,
                   help="median stain area (px) for the gunshot class")
    p.add_argument("--impact-area", type=float, default=35.0,
                   help="median stain area (px) for the impact class")
    p.add_argument("--stains", type=_parse_pair, default=(25, 45),
                   metavar="LO,HI", help="stain count range per pattern")
    p.add_argument("--distances", type=_parse_floats, default=(30.0, 60.0, 120.0),
                   metavar="CM,..", help="bt distances cycled over patterns")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit one model on all rows")
    _add_input_flags(p)
    _add_model_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="repeated-fit evaluation + SIS")
    _add_input_flags(p)
    _add_model_flags(p)
    p.add_argument("--reps", type=int, default=50, help="number of fits")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sis", help="stability importance score")
    _add_input_flags(p)
    _add_model_flags(p)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sis)

    p = sub.add_parser("report", help="per-class feature summaries")
    p.add_argument("--features", required=True)
    p.add_argument("--feature", default="all")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
