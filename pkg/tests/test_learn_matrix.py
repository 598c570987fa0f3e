"""FeatureMatrix container, CSV round-trip, splitting, imputation."""

import math

import numpy as np
import pytest

from spatterkit.learn import (
    FeatureMatrix,
    knn_impute,
    matrix_to_json_dict,
    split_indices,
    split_train_test,
    zero_impute,
)
from spatterkit.patternfeat import FEATURE_NAMES


def small_matrix(X, y=None, names=None):
    X = np.asarray(X, dtype=float)
    if y is None:
        y = np.zeros(X.shape[0], dtype=int)
    return FeatureMatrix.from_arrays(X, y, feature_names=names)


class TestFeatureMatrix:
    def test_from_arrays_invents_metadata(self):
        m = small_matrix([[1.0, 2.0], [3.0, 4.0]])
        assert m.ids == ("row0", "row1")
        assert m.feature_names == ("f0", "f1")
        assert m.bt_distance_cm.tolist() == [0.0, 0.0]

    def test_forty_eight_columns_get_registry_names(self):
        X = np.zeros((3, len(FEATURE_NAMES)))
        m = FeatureMatrix.from_arrays(X, [0, 1, 0])
        assert m.feature_names == FEATURE_NAMES

    def test_validation(self):
        X = np.zeros((2, 3))
        with pytest.raises(ValueError):
            FeatureMatrix.from_arrays(X, [0, 1, 0])  # misaligned labels
        with pytest.raises(ValueError):
            FeatureMatrix.from_arrays(X, [0, 2])  # label outside {0, 1}
        with pytest.raises(ValueError):
            FeatureMatrix.from_arrays(X, [0, 1], feature_names=("a", "a", "b"))
        with pytest.raises(ValueError):
            FeatureMatrix.from_arrays(X, [0, 1], feature_names=("a", "b"))

    def test_take_preserves_alignment(self):
        m = FeatureMatrix.from_arrays(
            np.arange(12.0).reshape(4, 3), [0, 1, 1, 0],
            bt=[30.0, 60.0, 120.0, 30.0],
            ids=("a", "b", "c", "d"),
        )
        sub = m.take([2, 0])
        assert sub.ids == ("c", "a")
        assert sub.y.tolist() == [1, 0]
        assert sub.bt_distance_cm.tolist() == [120.0, 30.0]
        assert sub.X[0].tolist() == [6.0, 7.0, 8.0]


class TestCsvRoundTrip:
    def build(self):
        X = np.array([[1.5, math.nan, -0.25],
                      [0.1 + 0.2, 1e-17, 3.0],
                      [math.nan, math.nan, 7.5]])
        return FeatureMatrix.from_arrays(
            X, [1, 0, 1], bt=[30.0, 60.0, math.nan],
            ids=("p1", "p2", "p3"), feature_names=("alpha", "beta", "gamma"),
        )

    def test_bit_exact_round_trip(self, tmp_path):
        m = self.build()
        path = str(tmp_path / "features.csv")
        m.to_csv(path)
        back = FeatureMatrix.from_csv(path)
        assert back.X.tobytes() == m.X.tobytes()
        assert back.y.tolist() == m.y.tolist()
        assert back.ids == m.ids
        assert back.feature_names == m.feature_names
        assert np.array_equal(back.bt_distance_cm, m.bt_distance_cm,
                              equal_nan=True)

    def test_rewrite_is_byte_identical(self, tmp_path):
        m = self.build()
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        m.to_csv(a)
        FeatureMatrix.from_csv(a).to_csv(b)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_labels_written_as_strings(self, tmp_path):
        m = self.build()
        path = tmp_path / "f.csv"
        m.to_csv(str(path))
        body = path.read_text().splitlines()
        assert body[0].startswith("pattern_id,label,bt_distance_cm,")
        assert body[1].split(",")[1] == "gunshot"
        assert body[2].split(",")[1] == "impact"

    def test_numeric_labels_accepted(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("pattern_id,label,bt_distance_cm,a\np1,1,30.0,2.0\n"
                        "p2,0,60.0,\n")
        m = FeatureMatrix.from_csv(str(path))
        assert m.y.tolist() == [1, 0]
        assert math.isnan(m.X[1, 0])

    def test_malformed_inputs_rejected(self, tmp_path):
        bad_header = tmp_path / "h.csv"
        bad_header.write_text("id,label,a\nx,gunshot,1\n")
        with pytest.raises(ValueError):
            FeatureMatrix.from_csv(str(bad_header))
        bad_label = tmp_path / "l.csv"
        bad_label.write_text("pattern_id,label,bt_distance_cm,a\np,maybe,30,1\n")
        with pytest.raises(ValueError):
            FeatureMatrix.from_csv(str(bad_label))
        ragged = tmp_path / "r.csv"
        ragged.write_text("pattern_id,label,bt_distance_cm,a\np,gunshot,30\n")
        with pytest.raises(ValueError):
            FeatureMatrix.from_csv(str(ragged))


class TestSplit:
    def test_sizes_round_up(self):
        train, test = split_indices(8, 0.75, 0)
        assert len(train) == 6 and len(test) == 2
        train, test = split_indices(10, 0.75, 0)
        assert len(train) == 8 and len(test) == 2  # ceil(7.5)

    def test_partition_properties(self):
        for seed in range(10):
            train, test = split_indices(23, 0.6, seed)
            both = np.concatenate([train, test])
            assert sorted(both.tolist()) == list(range(23))
            assert np.all(np.diff(train) > 0)
            assert np.all(np.diff(test) > 0)

    def test_deterministic_for_seed(self):
        a = split_indices(50, 0.75, 7)
        b = split_indices(50, 0.75, 7)
        assert a[0].tolist() == b[0].tolist()
        assert a[1].tolist() == b[1].tolist()

    def test_generator_instance_advances(self):
        rng = np.random.default_rng(0)
        a = split_indices(50, 0.75, rng)
        b = split_indices(50, 0.75, rng)
        assert a[0].tolist() != b[0].tolist()

    def test_preconditions(self):
        with pytest.raises(ValueError):
            split_indices(3, 0.75, 0)
        with pytest.raises(ValueError):
            split_indices(10, 0.0, 0)
        with pytest.raises(ValueError):
            split_indices(10, 1.0, 0)
        with pytest.raises(ValueError):
            split_indices(4, 0.9, 0)  # ceil(3.6) = 4 leaves no test rows

    def test_split_train_test_rows(self):
        m = FeatureMatrix.from_arrays(np.arange(24.0).reshape(8, 3),
                                      [0, 1] * 4)
        train, test = split_train_test(m, fraction=0.75, seed=3)
        assert train.n_rows == 6 and test.n_rows == 2
        assert set(train.ids) | set(test.ids) == set(m.ids)
        assert set(train.ids) & set(test.ids) == set()


class TestZeroImpute:
    def test_fills_and_preserves(self):
        X = np.array([[1.25, math.nan], [math.nan, -3.5]])
        m = small_matrix(X)
        out = zero_impute(m)
        assert out.X.tolist() == [[1.25, 0.0], [0.0, -3.5]]
        assert math.isnan(m.X[0, 1])  # input untouched


def knn_oracle(X, k):
    """Independent per-cell loop mirror of the imputation contract."""
    X = np.asarray(X, dtype=float)
    n, f = X.shape
    obs = ~np.isnan(X)
    out = X.copy()
    for i in range(n):
        for j in range(f):
            if obs[i, j]:
                continue
            dists = []
            for r in range(n):
                if r == i or not obs[r, j]:
                    continue
                shared = obs[i] & obs[r]
                ns = int(shared.sum())
                if ns == 0:
                    d = math.inf
                else:
                    d = math.sqrt(float(((X[i, shared] - X[r, shared]) ** 2).sum()))
                    d *= math.sqrt(f / ns)
                dists.append((d, r))
            dists.sort()
            chosen = [r for _d, r in dists[:k]]
            out[i, j] = np.mean(X[chosen, j])
    return out


class TestKnnImpute:
    def test_mean_of_k_identical_neighbors(self):
        # three donors equidistant from the target row: the fill is the
        # plain mean of their column values
        X = np.array([
            [0.0, 0.0, math.nan],
            [1.0, 0.0, 2.0],
            [-1.0, 0.0, 4.0],
            [0.0, 1.0, 6.0],
            [0.0, -1.0, 8.0],
        ])
        out = knn_impute(small_matrix(X), k=4)
        assert out.X[0, 2] == (2.0 + 4.0 + 6.0 + 8.0) / 4.0

    def test_observed_cells_bit_identical(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(12, 5))
        X[rng.random(X.shape) < 0.3] = math.nan
        m = small_matrix(X)
        out = knn_impute(m, k=3)
        obs = ~np.isnan(X)
        assert out.X[obs].tobytes() == X[obs].tobytes()
        assert not np.isnan(out.X).any()

    def test_matches_per_cell_oracle(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            X = rng.normal(size=(12, 5))
            X[rng.random(X.shape) < 0.3] = math.nan
            if np.isnan(X).all(axis=0).any():
                continue
            out = knn_impute(small_matrix(X), k=3)
            assert np.allclose(out.X, knn_oracle(X, 3), rtol=0, atol=1e-12)

    def test_tie_breaks_on_row_index(self):
        # donors 1 and 2 are equidistant from row 0; k=1 must pick row 1
        X = np.array([
            [0.0, math.nan],
            [1.0, 5.0],
            [-1.0, 9.0],
        ])
        out = knn_impute(small_matrix(X), k=1)
        assert out.X[0, 1] == 5.0

    def test_no_overlap_donor_sorts_last(self):
        X = np.array([
            [1.0, math.nan],
            [math.nan, 5.0],  # shares no observed column with row 0
            [2.0, 7.0],
        ])
        out = knn_impute(small_matrix(X), k=1)
        assert out.X[0, 1] == 7.0

    def test_donor_shortfall_warns(self):
        X = np.array([[0.0, math.nan], [0.1, 4.0], [0.2, 8.0], [0.3, 6.0]])
        with pytest.warns(UserWarning, match="fewer than k"):
            out = knn_impute(small_matrix(X), k=10)
        assert out.X[0, 1] == 6.0

    def test_all_missing_column_rejected(self):
        X = np.array([[1.0, math.nan], [2.0, math.nan]])
        with pytest.raises(ValueError, match="f1"):
            knn_impute(small_matrix(X), k=1)

    def test_k_validation(self):
        with pytest.raises(ValueError):
            knn_impute(small_matrix(np.zeros((2, 2))), k=0)


class TestJsonView:
    def test_nan_becomes_none(self):
        m = FeatureMatrix.from_arrays(
            np.array([[1.0, math.nan]]), [1], bt=[30.0], ids=("p",),
            feature_names=("a", "b"),
        )
        d = matrix_to_json_dict(m)
        assert d["feature_names"] == ["a", "b"]
        row = d["rows"][0]
        assert row["label"] == "gunshot"
        assert row["values"] == [1.0, None]
