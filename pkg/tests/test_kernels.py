"""Connected-component labeling: both backends, identical semantics."""

import numpy as np
import pytest

from spatterkit.kernels import _pykernels, available_backends

BACKENDS = list(available_backends().values())
BACKEND_IDS = list(available_backends().keys())


def brute_force_label(bits, connectivity=8):
    """Flood-fill oracle, labels in raster order of first pixel."""
    h, w = bits.shape
    labels = np.zeros((h, w), dtype=np.int32)
    if connectivity == 8:
        neigh = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    else:
        neigh = [(-1, 0), (0, -1), (0, 1), (1, 0)]
    next_label = 0
    for r in range(h):
        for c in range(w):
            if bits[r, c] and labels[r, c] == 0:
                next_label += 1
                stack = [(r, c)]
                labels[r, c] = next_label
                while stack:
                    rr, cc = stack.pop()
                    for dr, dc in neigh:
                        r2, c2 = rr + dr, cc + dc
                        if (0 <= r2 < h and 0 <= c2 < w and bits[r2, c2]
                                and labels[r2, c2] == 0):
                            labels[r2, c2] = next_label
                            stack.append((r2, c2))
    return labels, next_label


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
@pytest.mark.parametrize("connectivity", [4, 8])
def test_matches_flood_fill_oracle(backend, connectivity, rng):
    for _ in range(25):
        h = int(rng.integers(1, 24))
        w = int(rng.integers(1, 24))
        bits = (rng.random((h, w)) < rng.uniform(0.2, 0.7)).astype(np.uint8)
        labels, count = backend.label_image(bits, connectivity)
        want_labels, want_count = brute_force_label(bits, connectivity)
        assert count == want_count
        assert np.array_equal(labels, want_labels)


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
def test_backends_agree_on_larger_images(backend, rng):
    bits = (rng.random((200, 300)) < 0.45).astype(np.uint8)
    ref_labels, ref_count = _pykernels.label_image(bits, 8)
    labels, count = backend.label_image(bits, 8)
    assert count == ref_count
    assert np.array_equal(labels, ref_labels)


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
def test_empty_full_single(backend):
    empty = np.zeros((5, 7), dtype=np.uint8)
    labels, count = backend.label_image(empty, 8)
    assert count == 0 and not labels.any()

    full = np.ones((5, 7), dtype=np.uint8)
    labels, count = backend.label_image(full, 8)
    assert count == 1 and (labels == 1).all()

    one = np.zeros((3, 3), dtype=np.uint8)
    one[1, 1] = 1
    labels, count = backend.label_image(one, 4)
    assert count == 1 and labels[1, 1] == 1 and labels.sum() == 1


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
def test_diagonal_connectivity_difference(backend):
    bits = np.eye(4, dtype=np.uint8)
    _, count8 = backend.label_image(bits, 8)
    _, count4 = backend.label_image(bits, 4)
    assert count8 == 1
    assert count4 == 4


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
def test_labels_follow_raster_order(backend):
    bits = np.zeros((5, 9), dtype=np.uint8)
    bits[0, 7] = 1  # first in raster order
    bits[1, 1] = 1
    bits[4, 0] = 1
    labels, count = backend.label_image(bits, 8)
    assert count == 3
    assert labels[0, 7] == 1
    assert labels[1, 1] == 2
    assert labels[4, 0] == 3


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
def test_u_shape_merges_into_one_component(backend):
    # two vertical arms joined at the bottom: union-find must merge
    bits = np.zeros((5, 5), dtype=np.uint8)
    bits[:, 0] = 1
    bits[:, 4] = 1
    bits[4, :] = 1
    labels, count = backend.label_image(bits, 4)
    assert count == 1
    assert set(np.unique(labels)) == {0, 1}


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
def test_label_values_are_dense_from_one(backend, rng):
    bits = (rng.random((40, 40)) < 0.5).astype(np.uint8)
    labels, count = backend.label_image(bits, 8)
    present = np.unique(labels)
    assert present[0] == 0 or count == labels.max()
    assert labels.max() == count
    assert np.array_equal(np.unique(labels[labels > 0]),
                          np.arange(1, count + 1))


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
def test_rejects_bad_input(backend):
    with pytest.raises(ValueError):
        backend.label_image(np.zeros((4, 4), dtype=np.uint8), 6)
