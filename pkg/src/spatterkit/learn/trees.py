"""Binary decision tree nodes shared by the boosted and forest models.

JSON schema (one node):
  leaf:   {"leaf": <float>}
  split:  {"feature": <int>, "threshold": <float>, "missing": "left"|"right",
           "left": <node>, "right": <node>}

A row goes left when its feature value is strictly below the threshold;
a missing (NaN) value follows the stored default direction, so every
prediction path is replayable from the serialized tree alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = math.nan
    missing_left: bool = True
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = math.nan  # leaf payload: raw score or voted class

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def route(self, xrow: np.ndarray) -> float:
        """Walk one row down to a leaf and return its payload."""
        node = self
        while not node.is_leaf:
            xv = xrow[node.feature]
            if math.isnan(xv):
                node = node.left if node.missing_left else node.right
            elif xv < node.threshold:
                node = node.left
            else:
                node = node.right
        return node.value

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"leaf": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "missing": "left" if self.missing_left else "right",
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        if "leaf" in d:
            value = float(d["leaf"])
            if not math.isfinite(value):
                raise ValueError("leaf payload must be finite")
            return cls(value=value)
        return cls(
            feature=int(d["feature"]),
            threshold=float(d["threshold"]),
            missing_left=d["missing"] == "left",
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def predict_leaf_values(trees: list[TreeNode], X: np.ndarray) -> np.ndarray:
    """(n_rows, n_trees) array of leaf payloads."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty((X.shape[0], len(trees)))
    for i in range(X.shape[0]):
        row = X[i]
        for t, tree in enumerate(trees):
            out[i, t] = tree.route(row)
    return out
