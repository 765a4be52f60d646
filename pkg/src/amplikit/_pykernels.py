"""Pure-Python determinant kernels (fallback for the compiled module)."""
from itertools import combinations


def _bareiss(m):
    k = len(m)
    if k == 0:
        return 1
    sign = 1
    prev = 1
    for p in range(k - 1):
        if m[p][p] == 0:
            for r in range(p + 1, k):
                if m[r][p] != 0:
                    break
            else:
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


def det_int(rows):
    """Determinant of a square integer matrix given as a list of rows."""
    return _bareiss([list(r) for r in rows])


def minors_int(rows, ncols):
    """All maximal minors, column subsets in lexicographic order."""
    k = len(rows)
    if k > ncols:
        return []
    return [_bareiss([[row[c] for c in cols] for row in rows])
            for cols in combinations(range(ncols), k)]
