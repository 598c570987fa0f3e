"""Repeated-split experiments: evaluation by distance subset, the
Stability Importance Score, and grid search.

Per-fit seeds derive from the root seed by SeedSequence spawning, so
fits are independent and their results do not depend on execution
order. Reports hold per-fit records plus means over fits; a distance
subset with no test rows is recorded as absent (None), never zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .boosted import BoostedModel, BoostedParams, train_boosted
from .forest import ForestModel, ForestParams, train_forest
from .matrix import FeatureMatrix, split_indices

DISTANCE_THRESHOLDS = (30.0, 60.0, 120.0)
TOP_K = 10

MODEL_KINDS = ("boosted", "forest")


@dataclass(frozen=True)
class EvaluationReport:
    model_kind: str
    thresholds: tuple[float, ...]
    fits: tuple[dict, ...]
    mean_accuracy: float
    mean_subsets: dict[str, float | None]

    @property
    def n_fits(self) -> int:
        return len(self.fits)

    def to_dict(self) -> dict:
        return {
            "model": self.model_kind,
            "n_fits": self.n_fits,
            "thresholds_cm": list(self.thresholds),
            "mean_accuracy": self.mean_accuracy,
            "mean_subsets": dict(self.mean_subsets),
            "fits": list(self.fits),
        }

    @classmethod
    def from_fits(cls, model_kind: str, thresholds, fits: list[dict]) -> "EvaluationReport":
        keys = [_subset_key(t) for t in thresholds]
        mean_subsets: dict[str, float | None] = {}
        for key in keys:
            present = [f["subsets"][key] for f in fits if f["subsets"][key] is not None]
            mean_subsets[key] = float(np.mean(present)) if present else None
        mean_acc = float(np.mean([f["accuracy"] for f in fits]))
        return cls(model_kind=model_kind, thresholds=tuple(thresholds),
                   fits=tuple(fits), mean_accuracy=mean_acc,
                   mean_subsets=mean_subsets)


@dataclass(frozen=True)
class SISReport:
    """Per-feature frequency of ranking in the importance top k."""

    n_fits: int
    top_k: int
    feature_names: tuple[str, ...]
    counts: tuple[int, ...]  # fits in which the feature made the top k

    @property
    def values(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.float64) / self.n_fits

    def by_name(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.feature_names, self.values)}

    def total(self) -> float:
        """Sum of SIS over features, computed without per-feature rounding."""
        return sum(self.counts) / self.n_fits

    def to_dict(self) -> dict:
        return {
            "n_fits": self.n_fits,
            "top_k": self.top_k,
            "sis": self.by_name(),
            "counts": {n: c for n, c in zip(self.feature_names, self.counts)},
        }


def _subset_key(threshold: float) -> str:
    t = int(threshold) if float(threshold).is_integer() else threshold
    return f"d<={t}"


def _predict(model, test: FeatureMatrix, decision_threshold: float) -> np.ndarray:
    if isinstance(model, BoostedModel):
        return model.predict(test.X, threshold=decision_threshold)
    return model.predict(test.X)


def evaluate(model, test: FeatureMatrix, thresholds=DISTANCE_THRESHOLDS,
             decision_threshold: float = 0.5) -> EvaluationReport:
    """Single-fit accuracy overall and within each bt-distance subset."""
    fit = _evaluate_fit(model, test, thresholds, decision_threshold)
    kind = "boosted" if isinstance(model, BoostedModel) else "forest"
    return EvaluationReport.from_fits(kind, thresholds, [fit])


def _evaluate_fit(model, test, thresholds, decision_threshold,
                  fit_index: int = 0) -> dict:
    pred = _predict(model, test, decision_threshold)
    correct = pred == test.y
    subsets: dict[str, float | None] = {}
    for t in thresholds:
        mask = test.bt_distance_cm <= t
        subsets[_subset_key(t)] = float(correct[mask].mean()) if mask.any() else None
    return {
        "fit": fit_index,
        "n_test": int(test.n_rows),
        "accuracy": float(correct.mean()),
        "subsets": subsets,
    }


def _top_features(importance: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest importances; ties keep column order."""
    order = np.lexsort((np.arange(importance.size), -importance))
    return order[:k]


def _train(model_kind: str, train: FeatureMatrix, params, rng):
    if model_kind == "boosted":
        return train_boosted(train, params)
    return train_forest(train, params, rng)


def _default_params(model_kind: str):
    return BoostedParams() if model_kind == "boosted" else ForestParams()


def _check_kind(model_kind: str) -> None:
    if model_kind not in MODEL_KINDS:
        raise ValueError(f"model kind must be one of {MODEL_KINDS}, got {model_kind!r}")


def repeated_fits(m: FeatureMatrix, model_kind: str, params=None, r: int = 50,
                  seed=0, fraction: float = 0.75,
                  thresholds=DISTANCE_THRESHOLDS, top_k: int = TOP_K,
                  decision_threshold: float = 0.5):
    """R independent train/test fits; returns (EvaluationReport, SISReport).

    Each fit splits with its own derived seed, trains, evaluates on its
    test rows, and records which features rank in the importance top k.
    """
    _check_kind(model_kind)
    if r < 1:
        raise ValueError(f"fit count must be >= 1, got {r}")
    if m.n_features < top_k:
        raise ValueError(
            f"SIS needs at least {top_k} features, matrix has {m.n_features}"
        )
    if params is None:
        params = _default_params(model_kind)

    counts = np.zeros(m.n_features, dtype=np.int64)
    fits = []
    children = np.random.SeedSequence(seed).spawn(r)
    for i in range(r):
        rng = np.random.default_rng(children[i])
        train_idx, test_idx = split_indices(m.n_rows, fraction, rng)
        train, test = m.take(train_idx), m.take(test_idx)
        model = _train(model_kind, train, params, rng)
        fit = _evaluate_fit(model, test, thresholds, decision_threshold, fit_index=i)
        fits.append(fit)
        counts[_top_features(model.importance, top_k)] += 1

    eval_report = EvaluationReport.from_fits(model_kind, thresholds, fits)
    sis_report = SISReport(n_fits=r, top_k=top_k, feature_names=m.feature_names,
                           counts=tuple(int(c) for c in counts))
    return eval_report, sis_report


def sis(m: FeatureMatrix, model_kind: str, params=None, r: int = 50,
        seed=0, top_k: int = TOP_K) -> SISReport:
    """Stability Importance Score over r repeated fits."""
    _, report = repeated_fits(m, model_kind, params, r=r, seed=seed, top_k=top_k)
    return report


def grid_search(m: FeatureMatrix, model_kind: str, grid, folds: int = 3, seed=0,
                decision_threshold: float = 0.5) -> dict:
    """Exhaustive cross-validated search; ties keep the first grid point.

    ``grid`` is either a sequence of param dicts or a dict of lists that
    is expanded in key order.
    """
    _check_kind(model_kind)
    candidates = _expand_grid(grid)
    if not candidates:
        raise ValueError("parameter grid is empty")
    n = m.n_rows
    if folds < 2 or folds > n:
        raise ValueError(f"folds must be in [2, {n}], got {folds}")
    perm = np.random.default_rng(seed).permutation(n)
    fold_rows = [np.sort(perm[i::folds]) for i in range(folds)]

    param_cls = BoostedParams if model_kind == "boosted" else ForestParams
    best_score = -math.inf
    best: dict | None = None
    for ci, cand in enumerate(candidates):
        params = param_cls(**cand)
        accs = []
        for fi, rows in enumerate(fold_rows):
            mask = np.ones(n, dtype=bool)
            mask[rows] = False
            train = m.take(np.flatnonzero(mask))
            test = m.take(rows)
            rng = np.random.default_rng(np.random.SeedSequence((_to_int(seed), ci, fi)))
            model = _train(model_kind, train, params, rng)
            accs.append(float((_predict(model, test, decision_threshold) == test.y).mean()))
        score = float(np.mean(accs))
        if score > best_score:
            best_score = score
            best = dict(cand)
    return best


def _expand_grid(grid) -> list[dict]:
    if isinstance(grid, dict):
        keys = list(grid)
        return [dict(zip(keys, combo))
                for combo in itertools.product(*(grid[k] for k in keys))]
    return [dict(c) for c in grid]


def _to_int(seed) -> int:
    return seed if isinstance(seed, (int, np.integer)) else 0
