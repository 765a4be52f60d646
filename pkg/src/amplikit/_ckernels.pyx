# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled determinant kernels over the integers.

Same contract as ``amplikit._pykernels``. Small inputs run fraction-free
elimination in 128-bit machine integers; anything that might overflow falls
back to elimination on Python integers.
"""
from libc.stdlib cimport malloc, free

cdef extern from *:
    ctypedef long long i128 "__int128"

# every k x k minor is below 2**62 when k**(k/2) * max|entry|**k is
cdef object _BOUND = 1 << 124


cdef long long _bareiss_ll(long long* a, int k) nogil:
    cdef int p, i, j, r
    cdef int sign = 1
    cdef i128 prev = 1
    cdef i128 num
    cdef long long tmp
    if k == 0:
        return 1
    for p in range(k - 1):
        if a[p * k + p] == 0:
            r = -1
            for i in range(p + 1, k):
                if a[i * k + p] != 0:
                    r = i
                    break
            if r < 0:
                return 0
            for j in range(k):
                tmp = a[p * k + j]
                a[p * k + j] = a[r * k + j]
                a[r * k + j] = tmp
            sign = -sign
        for i in range(p + 1, k):
            for j in range(p + 1, k):
                num = <i128>a[i * k + j] * a[p * k + p] - <i128>a[i * k + p] * a[p * k + j]
                a[i * k + j] = <long long>(num / prev)
        prev = a[p * k + p]
    return sign * a[(k - 1) * k + (k - 1)]


cdef object _bareiss_obj(list m):
    cdef int k = len(m)
    cdef int p, i, j, r
    cdef int sign = 1
    cdef object prev = 1
    cdef object app, aip
    cdef list rowp, rowi
    if k == 0:
        return 1
    for p in range(k - 1):
        if m[p][p] == 0:
            r = -1
            for i in range(p + 1, k):
                if m[i][p] != 0:
                    r = i
                    break
            if r < 0:
                return 0
            m[p], m[r] = m[r], m[p]
            sign = -sign
        rowp = m[p]
        app = rowp[p]
        for i in range(p + 1, k):
            rowi = m[i]
            aip = rowi[p]
            for j in range(p + 1, k):
                rowi[j] = (rowi[j] * app - aip * rowp[j]) // prev
        prev = app
    return sign * m[k - 1][k - 1]


cdef bint _fits(list rows, int k):
    cdef object mx = 0
    cdef object v
    for row in rows:
        for v in row:
            if v < 0:
                v = -v
            if v > mx:
                mx = v
    if mx == 0:
        return True
    # (k**(k/2) * mx**k)**2 < 2**124, checked in integers
    cdef object kk = k
    return (kk ** kk) * (mx ** (2 * kk)) < _BOUND


def det_int(rows):
    """Determinant of a square integer matrix given as a list of rows."""
    cdef list m = [list(r) for r in rows]
    cdef int k = len(m)
    cdef int i, j
    cdef long long* buf
    cdef long long out
    if k == 0:
        return 1
    if _fits(m, k):
        buf = <long long*>malloc(k * k * sizeof(long long))
        try:
            for i in range(k):
                for j in range(k):
                    buf[i * k + j] = m[i][j]
            out = _bareiss_ll(buf, k)
        finally:
            free(buf)
        return out
    return _bareiss_obj(m)


def minors_int(rows, int ncols):
    """All maximal minors of a k x ncols integer matrix.

    Column subsets are taken in lexicographic order, as produced by
    ``itertools.combinations(range(ncols), k)``.
    """
    cdef list m = [list(r) for r in rows]
    cdef int k = len(m)
    cdef int i, j, t
    cdef long long* full
    cdef long long* buf
    cdef int* idx
    cdef list out = []
    if k > ncols:
        return out
    if k == 0:
        return [1]
    if _fits(m, k):
        full = <long long*>malloc(k * ncols * sizeof(long long))
        buf = <long long*>malloc(k * k * sizeof(long long))
        idx = <int*>malloc(k * sizeof(int))
        try:
            for i in range(k):
                for j in range(ncols):
                    full[i * ncols + j] = m[i][j]
            for t in range(k):
                idx[t] = t
            while True:
                for i in range(k):
                    for t in range(k):
                        buf[i * k + t] = full[i * ncols + idx[t]]
                out.append(_bareiss_ll(buf, k))
                # next combination
                t = k - 1
                while t >= 0 and idx[t] == ncols - k + t:
                    t -= 1
                if t < 0:
                    break
                idx[t] += 1
                for j in range(t + 1, k):
                    idx[j] = idx[j - 1] + 1
        finally:
            free(full)
            free(buf)
            free(idx)
        return out
    from itertools import combinations
    for cols in combinations(range(ncols), k):
        out.append(_bareiss_obj([[row[c] for c in cols] for row in m]))
    return out
