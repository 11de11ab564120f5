# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the NumPy kernels; see pure.py for the contract.

Semantics (including tie-breaking on the returned index) must match the
reference backend bit for bit — the equivalence suite enforces this.
"""

from libc.math cimport INFINITY


LOWER = 0
LARGE = 1
STRICT = 2


def rel_corners(const double[:, ::1] ca, const unsigned char[:, ::1] oa,
                const double[:, ::1] cb, const unsigned char[:, ::1] ob,
                int mode, bint b_cloud, double tol):
    cdef Py_ssize_t na = ca.shape[0], nb = cb.shape[0], m = ca.shape[1]
    cdef Py_ssize_t a, b, j
    cdef bint pair_ok, axis_ok, covered
    cdef double va, vb
    for b in range(nb):
        covered = False
        for a in range(na):
            pair_ok = True
            for j in range(m):
                va = ca[a, j]
                vb = cb[b, j]
                if mode == 2:
                    axis_ok = (vb > va + tol) if b_cloud else (vb > va)
                elif mode == 1:
                    axis_ok = (vb >= va - tol) if b_cloud else (vb >= va)
                else:
                    if b_cloud:
                        axis_ok = (vb > va + tol) if oa[a, j] else (vb >= va - tol)
                    else:
                        axis_ok = vb > va or (vb == va and (oa[a, j] == 0 or ob[b, j] != 0))
                if not axis_ok:
                    pair_ok = False
                    break
            if pair_ok:
                covered = True
                break
        if not covered:
            return False, b
    return True, -1


def shift_bound(const double[:, ::1] ha, const double[:, ::1] hb, const double[::1] w):
    cdef Py_ssize_t na = ha.shape[0], nb = hb.shape[0], m = ha.shape[1]
    cdef Py_ssize_t a, b, j, worst = 0
    cdef double s = INFINITY, best_a, cur, v
    for b in range(nb):
        best_a = -INFINITY
        for a in range(na):
            cur = INFINITY
            for j in range(m):
                v = (hb[b, j] - ha[a, j]) / w[j]
                if v < cur:
                    cur = v
            if cur > best_a:
                best_a = cur
        if best_a < s:
            s = best_a
            worst = b
    return s, worst
