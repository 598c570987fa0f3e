"""Experiment orchestration: config validation, input loading,
imputation, repeated fits, and report writing.

Config problems are rejected before any compute starts. The boosted
model handles missing values natively, so pairing it with an imputation
step is a validation error; the forest requires one.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from ..learn.boosted import BoostedParams
from ..learn.experiment import (
    DISTANCE_THRESHOLDS,
    EvaluationReport,
    SISReport,
    repeated_fits,
)
from ..learn.forest import ForestParams
from ..learn.matrix import FeatureMatrix, knn_impute, zero_impute
from .manifest import read_manifest
from .pipeline import ExtractResult, extract
from .reports import (
    write_evaluation_csv,
    write_evaluation_json,
    write_json,
    write_sis_csv,
    write_sis_json,
)

IMPUTE_KINDS = ("none", "zero", "knn")


class ConfigError(ValueError):
    """Invalid experiment configuration, reported before any compute."""


@dataclass(frozen=True)
class ExperimentConfig:
    out_dir: str
    features_csv: str | None = None
    manifest: str | None = None
    model: str = "boosted"
    impute: str = "none"
    k: int = 10
    reps: int = 50
    seed: int = 0
    fraction: float = 0.75
    decision_threshold: float = 0.5
    top_k: int = 10
    binarize_threshold: int | str = "auto"
    model_params: dict = field(default_factory=dict)
    lenient: bool = False

    def validate(self) -> None:
        if (self.features_csv is None) == (self.manifest is None):
            raise ConfigError("provide exactly one input: a feature CSV "
                              "or an image manifest")
        if self.model not in ("boosted", "forest"):
            raise ConfigError(f"unknown model: {self.model!r}")
        if self.impute not in IMPUTE_KINDS:
            raise ConfigError(f"unknown imputation: {self.impute!r}")
        if self.model == "boosted" and self.impute != "none":
            raise ConfigError("the boosted model handles missing values "
                              "natively; use --impute none")
        if self.model == "forest" and self.impute == "none":
            raise ConfigError("the forest cannot handle missing values; "
                              "choose --impute knn or zero")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.fraction < 1.0:
            raise ConfigError(f"fraction must be in (0, 1), got {self.fraction}")
        if not 0.0 <= self.decision_threshold <= 1.0:
            raise ConfigError("decision threshold must be in [0, 1], "
                              f"got {self.decision_threshold}")
        # params are validated by the dataclass they feed
        self.build_params()

    def build_params(self):
        cls = BoostedParams if self.model == "boosted" else ForestParams
        try:
            return cls(**self.model_params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad model params: {exc}") from exc

    def echo(self) -> dict:
        """Compute-relevant settings for report provenance.

        Storage locations (out_dir, input paths) are excluded so the
        same experiment writes byte-identical reports anywhere.
        """
        d = asdict(self)
        for key in ("out_dir", "features_csv", "manifest", "lenient"):
            d.pop(key)
        d["binarize_threshold"] = str(self.binarize_threshold)
        return d


def load_features(config: ExperimentConfig) -> tuple[FeatureMatrix, ExtractResult | None]:
    """Feature CSV directly, or extraction from an image manifest."""
    if config.features_csv is not None:
        return FeatureMatrix.from_csv(config.features_csv), None
    records = read_manifest(config.manifest)
    result = extract(records, threshold=config.binarize_threshold)
    return result.matrix, result


def apply_imputation(m: FeatureMatrix, config: ExperimentConfig) -> FeatureMatrix:
    if config.impute == "zero":
        return zero_impute(m)
    if config.impute == "knn":
        # Ring/strip ratio features can be 0/0 in every pattern of a
        # dataset (no stain ever lands that far out), leaving a column
        # with no donors. Such columns are constant and uninformative,
        # so they are zero-filled before neighbor imputation.
        dead = np.flatnonzero(np.isnan(m.X).all(axis=0))
        if dead.size:
            names = ", ".join(m.feature_names[j] for j in dead)
            warnings.warn(f"zero-filling feature(s) missing in every row: {names}")
            X = m.X.copy()
            X[:, dead] = 0.0
            m = m.with_X(X)
        return knn_impute(m, k=config.k)
    return m


@dataclass(frozen=True)
class ExperimentResult:
    evaluation: EvaluationReport
    sis: SISReport
    paths: dict[str, str]
    extraction: ExtractResult | None


def run_experiment(config: ExperimentConfig,
                   write_evaluation: bool = True,
                   write_sis: bool = True) -> ExperimentResult:
    """Full split/impute/train/evaluate/SIS run with report files.

    Identical config and seed reproduce byte-identical reports.
    """
    config.validate()
    os.makedirs(config.out_dir, exist_ok=True)
    m, extraction = load_features(config)
    paths: dict[str, str] = {}
    if extraction is not None:
        features_path = os.path.join(config.out_dir, "features.csv")
        m.to_csv(features_path)
        paths["features_csv"] = features_path
        report_path = os.path.join(config.out_dir, "extraction_report.json")
        write_json(extraction.to_report_dict(), report_path)
        paths["extraction_report"] = report_path

    m = apply_imputation(m, config)
    eval_report, sis_report = repeated_fits(
        m, config.model, config.build_params(), r=config.reps, seed=config.seed,
        fraction=config.fraction, thresholds=DISTANCE_THRESHOLDS,
        top_k=config.top_k, decision_threshold=config.decision_threshold,
    )

    extra = {"config": config.echo()}
    if write_evaluation:
        p_json = os.path.join(config.out_dir, "evaluation.json")
        p_csv = os.path.join(config.out_dir, "evaluation.csv")
        write_evaluation_json(eval_report, p_json, extra=extra)
        write_evaluation_csv(eval_report, p_csv)
        paths["evaluation_json"] = p_json
        paths["evaluation_csv"] = p_csv
    if write_sis:
        p_json = os.path.join(config.out_dir, "sis.json")
        p_csv = os.path.join(config.out_dir, "sis.csv")
        write_sis_json(sis_report, p_json, extra=extra)
        write_sis_csv(sis_report, p_csv)
        paths["sis_json"] = p_json
        paths["sis_csv"] = p_csv
    return ExperimentResult(evaluation=eval_report, sis=sis_report,
                            paths=paths, extraction=extraction)
