# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled image kernels: two-pass connected-component labeling.

Pixel-level union-find over the full raster. Must stay behaviourally
identical to the numpy fallback in ``_pykernels``: final labels are
assigned in raster-scan order of each component's first pixel.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline cnp.int32_t _find(cnp.int32_t[::1] parent, cnp.int32_t a) nogil:
    # path halving
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


cdef inline void _union(cnp.int32_t[::1] parent, cnp.int32_t a, cnp.int32_t b) nogil:
    cdef cnp.int32_t ra = _find(parent, a)
    cdef cnp.int32_t rb = _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


def label_image(bits, int connectivity=8):
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
    arr = np.ascontiguousarray(bits, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d image")

    cdef const unsigned char[:, ::1] B = arr
    cdef Py_ssize_t H = arr.shape[0]
    cdef Py_ssize_t W = arr.shape[1]

    labels_arr = np.zeros((H, W), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] L = labels_arr
    if H == 0 or W == 0:
        return labels_arr, 0

    # worst case (4-connectivity checkerboard) needs H*W/2 provisional ids
    parent_arr = np.zeros(H * W // 2 + 2, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr

    cdef Py_ssize_t r, c
    cdef cnp.int32_t nprov = 0, lab, up
    cdef bint eight = connectivity == 8

    with nogil:
        for r in range(H):
            for c in range(W):
                if B[r, c] == 0:
                    continue
                lab = 0
                if c > 0 and L[r, c - 1] != 0:
                    lab = L[r, c - 1]
                if r > 0:
                    if eight and c > 0 and L[r - 1, c - 1] != 0:
                        up = L[r - 1, c - 1]
                        if lab == 0:
                            lab = up
                        else:
                            _union(parent, lab, up)
                    if L[r - 1, c] != 0:
                        up = L[r - 1, c]
                        if lab == 0:
                            lab = up
                        else:
                            _union(parent, lab, up)
                    if eight and c + 1 < W and L[r - 1, c + 1] != 0:
                        up = L[r - 1, c + 1]
                        if lab == 0:
                            lab = up
                        else:
                            _union(parent, lab, up)
                if lab == 0:
                    nprov += 1
                    lab = nprov
                    parent[lab] = lab
                L[r, c] = lab

    # second pass: number roots by first raster-order appearance
    remap_arr = np.zeros(nprov + 1, dtype=np.int32)
    cdef cnp.int32_t[::1] remap = remap_arr
    cdef cnp.int32_t count = 0, root

    with nogil:
        for r in range(H):
            for c in range(W):
                lab = L[r, c]
                if lab == 0:
                    continue
                root = _find(parent, lab)
                if remap[root] == 0:
                    count += 1
                    remap[root] = count
                L[r, c] = remap[root]

    return labels_arr, int(count)
