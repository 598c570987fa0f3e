"""Gradient-boosted trees with logistic loss and native missing handling.

Stagewise regression trees are fit to first/second-order gradients of
the logistic loss. Split gain uses the second-order statistics with an
L2 penalty on leaf weights:

  gain = 1/2 [ GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l) ]

Each split learns a default direction for missing values by scoring the
missing block on both sides and keeping the better one (tie: left).
Per-feature importance is the total gain collected over all splits.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .matrix import FeatureMatrix
from .trees import TreeNode, predict_leaf_values

MIN_SPLIT_GAIN = 1e-12


@dataclass(frozen=True)
class BoostedParams:
    n_trees: int = 100
    max_depth: int = 3
    learning_rate: float = 0.3
    reg_lambda: float = 1.0
    min_child_weight: float = 1.0

    def __post_init__(self):
        if self.n_trees < 1 or self.max_depth < 1:
            raise ValueError("tree count and depth must be positive")
        if self.learning_rate <= 0 or self.reg_lambda < 0 or self.min_child_weight < 0:
            raise ValueError("learning rate must be positive, penalties non-negative")


def sigmoid(z):
    """Numerically stable logistic function, scalar or array."""
    if np.ndim(z) == 0:
        zf = float(z)
        if zf >= 0:
            return 1.0 / (1.0 + math.exp(-zf))
        ez = math.exp(zf)
        return ez / (1.0 + ez)
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def raw_score_to_probability(raw) -> float:
    """Probability of class 1 from a summed raw leaf score."""
    return float(sigmoid(raw))


@dataclass
class BoostedModel:
    params: BoostedParams
    feature_names: tuple[str, ...]
    trees: list[TreeNode]
    importance: np.ndarray  # total gain per feature
    base_score: float = 0.0

    def predict_raw(self, X) -> np.ndarray:
        X = _as_array(X, len(self.feature_names))
        leaf = predict_leaf_values(self.trees, X)
        return self.base_score + self.params.learning_rate * leaf.sum(axis=1)

    def predict_proba(self, X) -> np.ndarray:
        return sigmoid(self.predict_raw(X))

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X) >= threshold).astype(np.int64)

    def importance_by_name(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.feature_names, self.importance)}

    def to_json(self) -> str:
        doc = {
            "kind": "boosted",
            "params": asdict(self.params),
            "base_score": self.base_score,
            "feature_names": list(self.feature_names),
            "trees": [t.to_dict() for t in self.trees],
            "importance": self.importance_by_name(),
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BoostedModel":
        doc = json.loads(text)
        if doc.get("kind") != "boosted":
            raise ValueError(f"not a boosted model document: kind={doc.get('kind')!r}")
        names = tuple(doc["feature_names"])
        imp = np.array([doc["importance"][n] for n in names])
        return cls(
            params=BoostedParams(**doc["params"]),
            feature_names=names,
            trees=[TreeNode.from_dict(t) for t in doc["trees"]],
            importance=imp,
            base_score=float(doc["base_score"]),
        )


def _as_array(X, n_features: int) -> np.ndarray:
    if isinstance(X, FeatureMatrix):
        X = X.X
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != n_features:
        raise ValueError(f"expected (n, {n_features}) feature array, got {X.shape}")
    return X


def _best_split(Xn, gn, hn, params):
    """Scan all features at once for the best penalized-gain split.

    Columns are sorted with NaN blocks last; prefix sums over the finite
    block give left-child statistics for every candidate boundary, and
    the missing block is scored on both sides.
    """
    r, F = Xn.shape
    if r < 2 or F == 0:
        return None
    order = np.argsort(Xn, axis=0, kind="stable")  # NaN sorts last per column
    Xs = np.take_along_axis(Xn, order, axis=0)
    Gs = gn[order]
    Hs = hn[order]
    finite = ~np.isnan(Xs)
    nfin = finite.sum(axis=0)

    cumG = np.cumsum(np.where(finite, Gs, 0.0), axis=0)
    cumH = np.cumsum(np.where(finite, Hs, 0.0), axis=0)
    g_tot = float(gn.sum())
    h_tot = float(hn.sum())
    g_miss = g_tot - cumG[-1]
    h_miss = h_tot - cumH[-1]

    lam = params.reg_lambda
    parent = g_tot * g_tot / (h_tot + lam)
    with np.errstate(invalid="ignore"):
        boundary_ok = Xs[1:] > Xs[:-1]  # NaN comparisons are False
    valid = boundary_ok & (np.arange(1, r)[:, None] < nfin[None, :])

    def gains(GL, HL):
        GR = g_tot - GL
        HR = h_tot - HL
        ok = valid & (HL >= params.min_child_weight) & (HR >= params.min_child_weight)
        val = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent)
        return np.where(ok, val, -np.inf)

    gain_mleft = gains(cumG[:-1] + g_miss, cumH[:-1] + h_miss)
    gain_mright = gains(cumG[:-1], cumH[:-1])
    send_right = gain_mright > gain_mleft  # tie keeps missing on the left
    gain = np.where(send_right, gain_mright, gain_mleft)

    flat = int(np.argmax(gain))  # ties: lowest boundary, then lowest feature
    p, f = divmod(flat, F)
    best = float(gain[p, f])
    if not best > MIN_SPLIT_GAIN:
        return None
    threshold = (float(Xs[p, f]) + float(Xs[p + 1, f])) / 2.0
    return f, threshold, not bool(send_right[p, f]), best


def _build_tree(X, g, h, rows, depth, params, importance, leaf_rows):
    g_sum = float(g[rows].sum())
    h_sum = float(h[rows].sum())
    found = None
    if depth < params.max_depth:
        found = _best_split(X[rows], g[rows], h[rows], params)
    if found is None:
        w = -g_sum / (h_sum + params.reg_lambda)
        leaf_rows.append((rows, w))
        return TreeNode(value=w)
    f, threshold, missing_left, gain = found
    importance[f] += gain
    xv = X[rows, f]
    nan_mask = np.isnan(xv)
    with np.errstate(invalid="ignore"):
        go_left = xv < threshold
    go_left[nan_mask] = missing_left
    node = TreeNode(feature=f, threshold=threshold, missing_left=missing_left)
    node.left = _build_tree(X, g, h, rows[go_left], depth + 1, params,
                            importance, leaf_rows)
    node.right = _build_tree(X, g, h, rows[~go_left], depth + 1, params,
                             importance, leaf_rows)
    return node


def train_boosted(train: FeatureMatrix, params: BoostedParams | None = None) -> BoostedModel:
    """Fit the boosted ensemble on a training matrix (NaN cells allowed)."""
    if params is None:
        params = BoostedParams()
    X = train.X
    y = train.y.astype(np.float64)
    n = X.shape[0]
    if n == 0:
        raise ValueError("training matrix is empty")
    if train.y.min() == train.y.max():
        warnings.warn("training labels contain a single class; "
                      "the model will predict a constant")

    base = 0.0
    raw = np.full(n, base)
    importance = np.zeros(X.shape[1])
    trees: list[TreeNode] = []
    all_rows = np.arange(n)
    for _ in range(params.n_trees):
        p = sigmoid(raw)
        g = p - y
        h = p * (1.0 - p)
        leaf_rows: list[tuple[np.ndarray, float]] = []
        root = _build_tree(X, g, h, all_rows, 0, params, importance, leaf_rows)
        trees.append(root)
        for rows, w in leaf_rows:
            raw[rows] += params.learning_rate * w
    return BoostedModel(params=params, feature_names=train.feature_names,
                        trees=trees, importance=importance, base_score=base)
