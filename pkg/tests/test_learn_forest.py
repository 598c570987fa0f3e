"""Random forest: Gini oracle, voting rule, determinism, persistence."""

import json
import math

import numpy as np
import pytest

from spatterkit.learn import (
    FeatureMatrix,
    ForestModel,
    ForestParams,
    train_forest,
)
from spatterkit.learn.trees import TreeNode


def matrix(X, y):
    return FeatureMatrix.from_arrays(np.asarray(X, dtype=float), y)


class TestParams:
    def test_resolve_mtry(self):
        assert ForestParams(max_features="sqrt").resolve_mtry(48) == 6
        assert ForestParams(max_features="sqrt").resolve_mtry(2) == 1
        assert ForestParams(max_features="all").resolve_mtry(7) == 7
        assert ForestParams(max_features=10).resolve_mtry(4) == 4
        assert ForestParams(max_features=3).resolve_mtry(9) == 3

    def test_validation(self):
        with pytest.raises(ValueError):
            ForestParams(n_trees=0)
        with pytest.raises(ValueError):
            ForestParams(min_leaf=0)
        with pytest.raises(ValueError):
            ForestParams(max_depth=0)
        with pytest.raises(ValueError):
            ForestParams(max_features="log2")
        with pytest.raises(ValueError):
            ForestParams(max_features=0)


class TestMissingRejection:
    def test_training_rejects_nan(self):
        X = np.array([[1.0, math.nan], [2.0, 3.0]])
        with pytest.raises(ValueError, match="impute"):
            train_forest(matrix(X, [0, 1]))

    def test_prediction_rejects_nan(self):
        m = matrix(np.arange(8.0).reshape(4, 2), [0, 1, 0, 1])
        model = train_forest(m, ForestParams(n_trees=3))
        with pytest.raises(ValueError, match="impute"):
            model.predict([[1.0, math.nan]])


def gini_oracle(X, y, min_leaf):
    """Brute-force best split over all features, replicating the tie
    rules: lowest sorted boundary first, then lowest feature."""
    n, F = X.shape
    n1 = int(y.sum())
    parent = 1.0 - (n1 / n) ** 2 - ((n - n1) / n) ** 2
    if parent == 0.0:
        return None
    best = None
    for p in range(n - 1):
        for f in range(F):
            order = np.argsort(X[:, f], kind="stable")
            xs = X[order, f]
            if not xs[p + 1] > xs[p]:
                continue
            nl, nr = p + 1, n - p - 1
            if nl < min_leaf or nr < min_leaf:
                continue
            y_sorted = y[order]
            l1 = int(y_sorted[: p + 1].sum())
            r1 = n1 - l1
            gl = 1.0 - (l1 / nl) ** 2 - ((nl - l1) / nl) ** 2
            gr = 1.0 - (r1 / nr) ** 2 - ((nr - r1) / nr) ** 2
            dec = parent - (nl * gl + nr * gr) / n
            if best is None or dec > best[2]:
                best = (f, (xs[p] + xs[p + 1]) / 2.0, dec)
    if best is None or not best[2] > 0.0:
        return None
    return best


class TestGiniOracle:
    @pytest.mark.parametrize("min_leaf", [1, 2])
    def test_single_stump_matches_brute_force(self, min_leaf, rng):
        params = ForestParams(n_trees=1, max_depth=1, max_features="all",
                              min_leaf=min_leaf)
        for _ in range(25):
            n = int(rng.integers(6, 20))
            X = rng.normal(size=(n, 3))
            y = rng.integers(0, 2, n)
            seed = int(rng.integers(0, 2**31))
            model = train_forest(matrix(X, y), params, seed=seed)
            # replay the bootstrap draw the tree saw
            replay = np.random.default_rng(seed)
            boot = replay.integers(0, n, size=n)
            want = gini_oracle(X[boot], y[boot], min_leaf)
            root = model.trees[0]
            if want is None:
                assert root.is_leaf
                continue
            f, threshold, dec = want
            assert root.feature == f
            assert root.threshold == pytest.approx(threshold, rel=1e-12)
            assert model.importance[f] == pytest.approx(dec, rel=1e-9)


class TestVoting:
    def leaf_forest(self, values):
        trees = [TreeNode(value=v) for v in values]
        return ForestModel(params=ForestParams(n_trees=len(trees)),
                           feature_names=("a",), trees=trees,
                           importance=np.zeros(1))

    def test_majority_wins(self):
        assert self.leaf_forest([1.0, 1.0, 0.0]).predict([[0.0]])[0] == 1
        assert self.leaf_forest([0.0, 0.0, 1.0]).predict([[0.0]])[0] == 0

    def test_exact_tie_votes_class_zero(self):
        assert self.leaf_forest([1.0, 0.0]).predict([[0.0]])[0] == 0
        assert self.leaf_forest([1.0, 1.0, 0.0, 0.0]).predict([[0.0]])[0] == 0

    def test_split_routing(self):
        t = TreeNode(feature=0, threshold=0.5, missing_left=True)
        t.left = TreeNode(value=0.0)
        t.right = TreeNode(value=1.0)
        model = ForestModel(params=ForestParams(n_trees=1),
                            feature_names=("a",), trees=[t],
                            importance=np.zeros(1))
        assert model.predict([[0.0], [1.0]]).tolist() == [0, 1]


class TestTraining:
    def test_separable_data_fits(self, rng):
        X = np.column_stack([
            np.concatenate([rng.uniform(0, 1, 25), rng.uniform(2, 3, 25)]),
            rng.normal(size=50),
        ])
        y = np.array([0] * 25 + [1] * 25)
        model = train_forest(matrix(X, y), ForestParams(n_trees=50), seed=1)
        assert (model.predict(X) == y).all()
        assert model.importance[0] > model.importance[1] >= 0.0

    def test_deterministic_for_seed(self, rng):
        X = rng.normal(size=(20, 4))
        y = rng.integers(0, 2, 20)
        m = matrix(X, y)
        params = ForestParams(n_trees=10)
        a = train_forest(m, params, seed=42).to_json()
        b = train_forest(m, params, seed=42).to_json()
        c = train_forest(m, params, seed=43).to_json()
        assert a == b
        assert a != c

    def test_generator_seed_advances(self, rng):
        X = rng.normal(size=(20, 3))
        y = rng.integers(0, 2, 20)
        m = matrix(X, y)
        gen = np.random.default_rng(5)
        a = train_forest(m, ForestParams(n_trees=5), seed=gen)
        b = train_forest(m, ForestParams(n_trees=5), seed=gen)
        assert a.to_json() != b.to_json()

    def test_single_class_predicts_constant(self):
        X = np.arange(10.0).reshape(5, 2)
        model = train_forest(matrix(X, [1] * 5), ForestParams(n_trees=5))
        assert all(t.is_leaf for t in model.trees)
        assert model.predict(X).tolist() == [1] * 5

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError):
            train_forest(matrix(np.empty((0, 2)), []))


class TestPersistence:
    def test_json_round_trip(self, rng):
        X = rng.normal(size=(16, 3))
        y = rng.integers(0, 2, 16)
        model = train_forest(matrix(X, y), ForestParams(n_trees=7), seed=9)
        back = ForestModel.from_json(model.to_json())
        assert back.to_json() == model.to_json()
        assert (back.predict(X) == model.predict(X)).all()

    def test_from_json_rejects_other_kinds(self):
        model = ForestModel(params=ForestParams(n_trees=1),
                            feature_names=("a",),
                            trees=[TreeNode(value=0.0)],
                            importance=np.zeros(1))
        doc = json.loads(model.to_json())
        doc["kind"] = "boosted"
        with pytest.raises(ValueError):
            ForestModel.from_json(json.dumps(doc))
