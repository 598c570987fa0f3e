"""Feature matrix container, CSV round-trip, splitting and imputation.

Cells are float64 with NaN as the missing marker. CSV serialization
uses repr() for numbers and an empty cell for NaN, so a round-trip is
byte-exact and reruns produce identical files.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from ..ioutil import atomic_write_text
from ..patternfeat import FEATURE_NAMES, PatternFeatures

LABEL_TO_CLASS = {"impact": 0, "gunshot": 1}
CLASS_TO_LABEL = {v: k for k, v in LABEL_TO_CLASS.items()}

_META_COLUMNS = ("pattern_id", "label", "bt_distance_cm")


@dataclass(frozen=True)
class FeatureMatrix:
    """Rows are patterns, columns are named features, labels are 0/1."""

    X: np.ndarray  # (n, f) float64, NaN = missing
    y: np.ndarray  # (n,) int64, 1 = gunshot
    bt_distance_cm: np.ndarray  # (n,) float64
    ids: tuple[str, ...]
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        object.__setattr__(self, "X", np.asarray(self.X, dtype=np.float64))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.int64))
        object.__setattr__(
            self, "bt_distance_cm", np.asarray(self.bt_distance_cm, dtype=np.float64)
        )
        n, f = self.X.shape
        if self.y.shape != (n,) or self.bt_distance_cm.shape != (n,):
            raise ValueError("labels and bt_distance must align with rows")
        if len(self.ids) != n:
            raise ValueError("row ids must align with rows")
        if len(self.feature_names) != f:
            raise ValueError("feature names must align with columns")
        if len(set(self.feature_names)) != f:
            raise ValueError("feature names must be unique")
        if n and not np.isin(self.y, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def take(self, rows) -> "FeatureMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        return replace(
            self,
            X=self.X[rows],
            y=self.y[rows],
            bt_distance_cm=self.bt_distance_cm[rows],
            ids=tuple(self.ids[i] for i in rows),
        )

    def with_X(self, X: np.ndarray) -> "FeatureMatrix":
        return replace(self, X=X)

    @classmethod
    def from_patterns(cls, patterns: list[PatternFeatures]) -> "FeatureMatrix":
        X = np.array([p.row() for p in patterns], dtype=np.float64).reshape(
            len(patterns), len(FEATURE_NAMES)
        )
        y = np.array([LABEL_TO_CLASS[p.meta.label] for p in patterns], dtype=np.int64)
        bt = np.array([p.meta.bt_distance_cm for p in patterns])
        ids = tuple(p.meta.pattern_id for p in patterns)
        return cls(X=X, y=y, bt_distance_cm=bt, ids=ids)

    @classmethod
    def from_arrays(cls, X, y, bt=None, ids=None, feature_names=None) -> "FeatureMatrix":
        """Build a matrix from plain arrays, inventing metadata as needed."""
        X = np.asarray(X, dtype=np.float64)
        n, f = X.shape
        if bt is None:
            bt = np.zeros(n)
        if ids is None:
            ids = tuple(f"row{i}" for i in range(n))
        if feature_names is None:
            feature_names = (
                FEATURE_NAMES if f == len(FEATURE_NAMES)
                else tuple(f"f{j}" for j in range(f))
            )
        return cls(X=X, y=np.asarray(y), bt_distance_cm=bt, ids=tuple(ids),
                   feature_names=tuple(feature_names))

    def to_csv(self, path: str) -> None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(_META_COLUMNS) + list(self.feature_names))
        for i in range(self.n_rows):
            row = [
                self.ids[i],
                CLASS_TO_LABEL[int(self.y[i])],
                _cell(self.bt_distance_cm[i]),
            ]
            row.extend(_cell(v) for v in self.X[i])
            writer.writerow(row)
        atomic_write_text(path, buf.getvalue())

    @classmethod
    def from_csv(cls, path: str) -> "FeatureMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header[:3]) != _META_COLUMNS:
                raise ValueError(
                    f"{path}: expected header starting with {','.join(_META_COLUMNS)}"
                )
            names = tuple(header[3:])
            ids, labels, bt, rows = [], [], [], []
            for rec in reader:
                if not rec:
                    continue
                if len(rec) != 3 + len(names):
                    raise ValueError(f"{path}: row with {len(rec)} cells, "
                                     f"expected {3 + len(names)}")
                ids.append(rec[0])
                labels.append(_parse_label(rec[1], path))
                bt.append(_parse_cell(rec[2]))
                rows.append([_parse_cell(c) for c in rec[3:]])
        X = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
        return cls(X=X, y=np.array(labels, dtype=np.int64),
                   bt_distance_cm=np.array(bt), ids=tuple(ids), feature_names=names)


def _cell(v: float) -> str:
    return "" if math.isnan(v) else repr(float(v))


def _parse_cell(s: str) -> float:
    return float(s) if s != "" else math.nan


def _parse_label(s: str, path: str) -> int:
    if s in LABEL_TO_CLASS:
        return LABEL_TO_CLASS[s]
    if s in ("0", "1"):
        return int(s)
    raise ValueError(f"{path}: unknown label {s!r}")


def split_indices(n: int, fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Seeded uniform partition into ceil(fraction*n) train rows and the rest."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"train fraction must be in (0, 1), got {fraction}")
    if n < 4:
        raise ValueError(f"need at least 4 rows to split, got {n}")
    n_train = math.ceil(fraction * n)
    if n_train >= n:
        raise ValueError(f"fraction {fraction} leaves no test rows for n={n}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    perm = rng.permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def split_train_test(m: FeatureMatrix, fraction: float = 0.75, seed=0):
    """Disjoint train/test row partition, deterministic for a fixed seed."""
    train_idx, test_idx = split_indices(m.n_rows, fraction, seed)
    return m.take(train_idx), m.take(test_idx)


def zero_impute(m: FeatureMatrix) -> FeatureMatrix:
    """Replace every missing cell with 0.0; observed cells are untouched."""
    X = m.X.copy()
    X[np.isnan(X)] = 0.0
    return m.with_X(X)


def knn_impute(m: FeatureMatrix, k: int = 10) -> FeatureMatrix:
    """Mean-of-k-nearest-neighbors imputation.

    Distance between two rows is the Euclidean distance over the columns
    observed in both, scaled by sqrt(total columns / shared columns) to
    stay comparable across different overlaps. Neighbor candidates for a
    cell are the rows observed in that column, nearest first with row
    index breaking ties. Observed cells pass through bit-identical.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    X = m.X
    n, f = X.shape
    obs = ~np.isnan(X)
    dead = np.flatnonzero(~obs.any(axis=0))
    if dead.size:
        names = ", ".join(m.feature_names[j] for j in dead)
        raise ValueError(f"cannot impute columns missing in every row: {names}")
    out = X.copy()
    X0 = np.where(obs, X, 0.0)
    for i in np.flatnonzero(~obs.all(axis=1)):
        shared = obs[i] & obs  # (n, f)
        diff = np.where(shared, X0[i] - X0, 0.0)
        n_shared = shared.sum(axis=1)
        raw = np.sqrt((diff * diff).sum(axis=1))
        scale = np.sqrt(f / np.maximum(n_shared, 1))
        # rows with no shared observed column are unreachable donors
        dist = np.where(n_shared > 0, raw * scale, np.inf)
        dist[i] = np.inf
        for j in np.flatnonzero(~obs[i]):
            donors = np.flatnonzero(obs[:, j] & (np.arange(n) != i))
            order = np.lexsort((donors, dist[donors]))
            chosen = donors[order[:k]]
            if chosen.size < k:
                warnings.warn(
                    f"column {m.feature_names[j]!r}: only {chosen.size} donor row(s) "
                    f"for row {i}, fewer than k={k}"
                )
            out[i, j] = X[chosen, j].mean()
    return m.with_X(out)


def matrix_to_json_dict(m: FeatureMatrix) -> dict:
    """JSON-friendly view used by report writers (NaN becomes null)."""
    return {
        "feature_names": list(m.feature_names),
        "rows": [
            {
                "pattern_id": m.ids[i],
                "label": CLASS_TO_LABEL[int(m.y[i])],
                "bt_distance_cm": _json_num(m.bt_distance_cm[i]),
                "values": [_json_num(v) for v in m.X[i]],
            }
            for i in range(m.n_rows)
        ],
    }


def _json_num(v: float):
    return None if math.isnan(v) else float(v)


__all__ = [
    "FeatureMatrix",
    "LABEL_TO_CLASS",
    "CLASS_TO_LABEL",
    "split_train_test",
    "split_indices",
    "zero_impute",
    "knn_impute",
    "matrix_to_json_dict",
]
