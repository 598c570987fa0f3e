"""Random forest on complete data: bootstrap rows, random feature
subsets per split, Gini criterion, majority vote.

The forest refuses NaN input; impute first (knn or zero). Per-feature
importance is the mean over trees of the node-weighted Gini impurity
decrease collected at each split.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .matrix import FeatureMatrix
from .trees import TreeNode, predict_leaf_values


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 300
    max_depth: int | None = None
    max_features: int | str = "sqrt"  # per-split subset size
    min_leaf: int = 1

    def __post_init__(self):
        if self.n_trees < 1 or self.min_leaf < 1:
            raise ValueError("tree count and min leaf size must be positive")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max depth must be positive when set")
        if isinstance(self.max_features, str):
            if self.max_features not in ("sqrt", "all"):
                raise ValueError(f"unknown max_features: {self.max_features!r}")
        elif self.max_features < 1:
            raise ValueError("max_features must be positive")

    def resolve_mtry(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        if self.max_features == "all":
            return n_features
        return min(n_features, int(self.max_features))


@dataclass
class ForestModel:
    params: ForestParams
    feature_names: tuple[str, ...]
    trees: list[TreeNode]
    importance: np.ndarray  # mean impurity decrease per feature

    def predict(self, X) -> np.ndarray:
        """Majority vote over trees; an exact tie votes class 0."""
        if isinstance(X, FeatureMatrix):
            X = X.X
        X = np.asarray(X, dtype=np.float64)
        if np.isnan(X).any():
            raise ValueError("forest prediction requires complete data; impute first")
        votes = predict_leaf_values(self.trees, X).sum(axis=1)
        return (2 * votes > len(self.trees)).astype(np.int64)

    def importance_by_name(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.feature_names, self.importance)}

    def to_json(self) -> str:
        doc = {
            "kind": "forest",
            "params": asdict(self.params),
            "feature_names": list(self.feature_names),
            "trees": [t.to_dict() for t in self.trees],
            "importance": self.importance_by_name(),
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ForestModel":
        doc = json.loads(text)
        if doc.get("kind") != "forest":
            raise ValueError(f"not a forest model document: kind={doc.get('kind')!r}")
        names = tuple(doc["feature_names"])
        imp = np.array([doc["importance"][n] for n in names])
        return cls(params=ForestParams(**doc["params"]), feature_names=names,
                   trees=[TreeNode.from_dict(t) for t in doc["trees"]],
                   importance=imp)


def _gini_split(Xn, yn, feats, min_leaf):
    """Best Gini impurity decrease over the candidate feature subset."""
    r = Xn.shape[0]
    Xf = Xn[:, feats]
    order = np.argsort(Xf, axis=0, kind="stable")
    Xs = np.take_along_axis(Xf, order, axis=0)
    ys = yn[order]  # (r, k)

    n1_total = int(yn.sum())
    parent = 1.0 - (n1_total / r) ** 2 - ((r - n1_total) / r) ** 2
    if parent == 0.0:
        return None

    cum1 = np.cumsum(ys, axis=0)
    nl = np.arange(1, r, dtype=np.float64)[:, None]
    n1l = cum1[:-1]
    nr = r - nl
    n1r = n1_total - n1l
    gini_l = 1.0 - (n1l / nl) ** 2 - ((nl - n1l) / nl) ** 2
    gini_r = 1.0 - (n1r / nr) ** 2 - ((nr - n1r) / nr) ** 2
    child = (nl * gini_l + nr * gini_r) / r
    valid = (Xs[1:] > Xs[:-1]) & (nl >= min_leaf) & (nr >= min_leaf)
    decrease = np.where(valid, parent - child, -np.inf)

    flat = int(np.argmax(decrease))
    p, j = divmod(flat, len(feats))
    best = float(decrease[p, j])
    if not best > 0.0:
        return None
    f = int(feats[j])
    threshold = (float(Xs[p, j]) + float(Xs[p + 1, j])) / 2.0
    return f, threshold, best


def _majority(yn) -> float:
    ones = int(yn.sum())
    return 1.0 if 2 * ones > yn.size else 0.0


def _build_tree(X, y, rows, depth, params, mtry, rng, importance, n_total):
    yn = y[rows]
    r = rows.size
    depth_ok = params.max_depth is None or depth < params.max_depth
    found = None
    if depth_ok and r >= 2 * params.min_leaf and yn.min() != yn.max():
        feats = np.sort(rng.choice(X.shape[1], size=mtry, replace=False))
        found = _gini_split(X[rows], yn, feats, params.min_leaf)
    if found is None:
        return TreeNode(value=_majority(yn))
    f, threshold, decrease = found
    importance[f] += (r / n_total) * decrease
    go_left = X[rows, f] < threshold
    node = TreeNode(feature=f, threshold=threshold, missing_left=True)
    node.left = _build_tree(X, y, rows[go_left], depth + 1, params, mtry, rng,
                            importance, n_total)
    node.right = _build_tree(X, y, rows[~go_left], depth + 1, params, mtry, rng,
                             importance, n_total)
    return node


def train_forest(train: FeatureMatrix, params: ForestParams | None = None,
                 seed=0) -> ForestModel:
    """Fit the forest; rejects matrices containing missing values.

    ``seed`` may be an int, SeedSequence or Generator; a fixed seed gives
    an identical forest.
    """
    if params is None:
        params = ForestParams()
    X = train.X
    y = train.y
    n = X.shape[0]
    if n == 0:
        raise ValueError("training matrix is empty")
    if np.isnan(X).any():
        raise ValueError("forest training requires complete data: "
                         "impute missing values first (knn or zero)")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mtry = params.resolve_mtry(X.shape[1])
    importance = np.zeros(X.shape[1])
    trees: list[TreeNode] = []
    for _ in range(params.n_trees):
        boot = rng.integers(0, n, size=n)
        trees.append(_build_tree(X, y, boot, 0, params, mtry, rng, importance, n))
    importance /= params.n_trees
    return ForestModel(params=params, feature_names=train.feature_names,
                       trees=trees, importance=importance)
