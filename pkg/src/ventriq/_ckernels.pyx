# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled connected-component labeling kernel.

Same contract as ventriq._kernels_py.label_components; this version does a
classic two-pass union-find scan and is the default backend when the
extension compiled.
"""

import numpy as np


cdef inline int _find(int[::1] parent, int x) nogil:
    cdef int r = x
    cdef int nxt
    while parent[r] != r:
        r = parent[r]
    while parent[x] != r:
        nxt = parent[x]
        parent[x] = r
        x = nxt
    return r


cdef inline void _union(int[::1] parent, int a, int b) nogil:
    # smaller root wins so the surviving root is the earliest provisional label
    cdef int ra = _find(parent, a)
    cdef int rb = _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


def label_components(mask, int connectivity):
    """Label foreground components of a boolean mask.

    Returns (labels, count) where labels is int32 with 0 = background and
    components numbered 1..count in order of their first (row-major)
    foreground pixel.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    m = np.ascontiguousarray(mask, dtype=np.uint8)
    if m.ndim != 2:
        raise ValueError("mask must be 2-D")
    cdef const unsigned char[:, ::1] mv = m
    cdef Py_ssize_t h = mv.shape[0]
    cdef Py_ssize_t w = mv.shape[1]

    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] lab = labels_arr
    # checkerboard is the worst case: at most ceil(h*w/2) provisional labels
    parent_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef int[::1] parent = parent_arr

    cdef int next_label = 1
    cdef int diag = 1 if connectivity == 8 else 0
    cdef Py_ssize_t i, j
    cdef int best, n

    with nogil:
        for i in range(h):
            for j in range(w):
                if mv[i, j] == 0:
                    continue
                best = 0
                if j > 0 and mv[i, j - 1]:
                    best = lab[i, j - 1]
                if i > 0:
                    if mv[i - 1, j]:
                        n = lab[i - 1, j]
                        if best == 0 or n < best:
                            best = n
                    if diag:
                        if j > 0 and mv[i - 1, j - 1]:
                            n = lab[i - 1, j - 1]
                            if best == 0 or n < best:
                                best = n
                        if j + 1 < w and mv[i - 1, j + 1]:
                            n = lab[i - 1, j + 1]
                            if best == 0 or n < best:
                                best = n
                if best == 0:
                    parent[next_label] = next_label
                    lab[i, j] = next_label
                    next_label += 1
                    continue
                lab[i, j] = best
                if j > 0 and mv[i, j - 1] and lab[i, j - 1] != best:
                    _union(parent, lab[i, j - 1], best)
                if i > 0:
                    if mv[i - 1, j] and lab[i - 1, j] != best:
                        _union(parent, lab[i - 1, j], best)
                    if diag:
                        if j > 0 and mv[i - 1, j - 1] and lab[i - 1, j - 1] != best:
                            _union(parent, lab[i - 1, j - 1], best)
                        if j + 1 < w and mv[i - 1, j + 1] and lab[i - 1, j + 1] != best:
                            _union(parent, lab[i - 1, j + 1], best)

    # second pass: renumber roots in order of first appearance (row-major)
    final_arr = np.zeros(next_label, dtype=np.int32)
    cdef int[::1] final = final_arr
    cdef int count = 0
    cdef int r
    with nogil:
        for i in range(h):
            for j in range(w):
                if lab[i, j] == 0:
                    continue
                r = _find(parent, lab[i, j])
                if final[r] == 0:
                    count += 1
                    final[r] = count
                lab[i, j] = final[r]

    return labels_arr, count
