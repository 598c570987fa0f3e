"""Pure-Python (numpy) image kernels.

Fallback for :mod:`spatterkit.kernels._ckernels`. Works on row runs
instead of pixels, so the Python-level loop is proportional to the
number of runs, not the number of pixels. Results are identical to the
compiled kernel: final labels follow raster-scan order of each
component's first pixel.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _find(parent: np.ndarray, a: int) -> int:
    # path halving
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def label_image(bits, connectivity: int = 8):
    """Label foreground components of a 0/1 image.

    Parameters
    ----------
    bits : (H, W) array of 0/1 values.
    connectivity : 4 or 8.

    Returns
    -------
    (labels, count) : int32 label image (0 = background) and the number
    of components. Label k is the k-th component whose first pixel is
    met in raster order.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    arr = np.asarray(bits)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d image")
    h, w = arr.shape
    labels = np.zeros((h, w), dtype=np.int32)
    if h == 0 or w == 0 or not arr.any():
        return labels, 0

    padded = np.zeros((h, w + 2), dtype=np.int8)
    padded[:, 1:-1] = arr != 0
    edges = np.diff(padded, axis=1)
    run_rows, starts = np.nonzero(edges == 1)
    _, ends = np.nonzero(edges == -1)  # exclusive, rows match run_rows
    nruns = len(starts)

    # runs are emitted row-major, so searchsorted gives per-row slices
    row_ofs = np.searchsorted(run_rows, np.arange(h + 1))

    parent = np.arange(nruns, dtype=np.int64)
    starts_l = starts.tolist()
    ends_l = ends.tolist()
    row_ofs_l = row_ofs.tolist()

    # union vertically adjacent runs, two pointers per row pair
    for r in range(1, h):
        i, iend = row_ofs_l[r - 1], row_ofs_l[r]
        j, jend = row_ofs_l[r], row_ofs_l[r + 1]
        while i < iend and j < jend:
            if connectivity == 8:
                touch = starts_l[i] <= ends_l[j] and starts_l[j] <= ends_l[i]
            else:
                touch = starts_l[i] < ends_l[j] and starts_l[j] < ends_l[i]
            if touch:
                ra, rb = _find(parent, i), _find(parent, j)
                if ra < rb:
                    parent[rb] = ra
                elif rb < ra:
                    parent[ra] = rb
            # advance the run that ends first
            if ends_l[i] < ends_l[j]:
                i += 1
            else:
                j += 1

    # number roots by first appearance; runs are already in raster order
    remap = np.zeros(nruns, dtype=np.int32)
    count = 0
    rows_l = run_rows.tolist()
    for k in range(nruns):
        root = _find(parent, k)
        if remap[root] == 0:
            count += 1
            remap[root] = count
        labels[rows_l[k], starts_l[k]:ends_l[k]] = remap[root]

    return labels, count
