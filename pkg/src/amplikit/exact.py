"""Exact rational linear algebra on labelled matrices.

Matrices have columns indexed by an increasing tuple of integer labels (the
marker set), so operations on general index sets need no renumbering.
Determinants go through the integer kernel after clearing row denominators.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, lcm
from typing import Iterable, Mapping, Sequence

from ._kernel import det_int, minors_int

Rational = Fraction


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def fmt_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _integer_rows(rows):
    """Scale each row to integers; return (int_rows, product of scales)."""
    out = []
    scale = 1
    for row in rows:
        den = 1
        for x in row:
            den = lcm(den, x.denominator)
        out.append([x.numerator * (den // x.denominator) for x in row])
        scale *= den
    return out, scale


def det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square matrix of rationals."""
    rows = [[to_rational(x) for x in r] for r in rows]
    if not rows:
        return Fraction(1)
    ints, scale = _integer_rows(rows)
    return Fraction(det_int(ints), scale)


class RationalMatrix:
    """Immutable dense matrix over Q with labelled columns."""

    __slots__ = ("rows", "labels", "_hash")

    def __init__(self, rows: Iterable[Iterable], labels: Sequence[int] | None = None):
        rows = tuple(tuple(to_rational(x) for x in r) for r in rows)
        if labels is None:
            width = len(rows[0]) if rows else 0
            labels = tuple(range(1, width + 1))
        labels = tuple(int(x) for x in labels)
        if any(a >= b for a, b in zip(labels, labels[1:])):
            raise ValueError(f"column labels must be strictly increasing: {labels}")
        for r in rows:
            if len(r) != len(labels):
                raise ValueError("row length does not match the number of labels")
        self.rows = rows
        self.labels = labels
        self._hash = None

    # basic shape
    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def zeros(cls, k: int, labels: Sequence[int]) -> "RationalMatrix":
        return cls([[0] * len(labels) for _ in range(k)], labels)

    def index(self, label: int) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"label {label} not in {self.labels}") from None

    def column(self, label: int) -> tuple:
        j = self.index(label)
        return tuple(r[j] for r in self.rows)

    def entry(self, row: int, label: int) -> Fraction:
        return self.rows[row][self.index(label)]

    def columns(self) -> dict:
        return {lab: tuple(r[j] for r in self.rows) for j, lab in enumerate(self.labels)}

    @classmethod
    def from_columns(cls, k: int, cols: Mapping[int, Sequence]) -> "RationalMatrix":
        labels = sorted(cols)
        rows = [[cols[lab][i] for lab in labels] for i in range(k)]
        return cls(rows, labels)

    def submatrix(self, labels: Sequence[int]) -> "RationalMatrix":
        idx = [self.index(x) for x in labels]
        return RationalMatrix([[r[j] for j in idx] for r in self.rows], labels)

    def transpose_rows(self) -> list:
        return [list(r) for r in self.rows]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.n != other.k:
            raise ValueError("dimension mismatch in product")
        cols = list(zip(*other.rows)) if other.rows else [()] * other.n
        rows = [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.rows]
        return RationalMatrix(rows, other.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMatrix) and self.labels == other.labels and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.labels, self.rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"RationalMatrix(labels={list(self.labels)}, [{body}])"

    # linear algebra
    def rank(self) -> int:
        return len(rref(self.rows)[1])

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "rows": [[fmt_rational(x) for x in r] for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict | str) -> "RationalMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["rows"], data["labels"])


def rref(rows) -> tuple[list, list]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = [list(map(to_rational, r)) for r in rows]
    if not m:
        return [], []
    width = len(m[0])
    pivots = []
    r = 0
    for c in range(width):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def solve_left(A_rows, B_rows):
    """Return X with X A = B (rows of B in the row space of A), or None."""
    # transpose to A^T X^T = B^T and eliminate on the augmented system
    k = len(A_rows)
    n = len(A_rows[0]) if A_rows else 0
    sols = []
    for b in B_rows:
        aug = [[A_rows[i][j] for i in range(k)] + [b[j]] for j in range(n)]
        red, piv = rref(aug)
        if k in piv:
            return None
        x = [Fraction(0)] * k
        for row, c in zip(red, piv):
            x[c] = row[k]
        sols.append(x)
    return sols


@dataclass(frozen=True)
class PluckerVector:
    """All maximal minors of a matrix, keyed by sorted label tuples."""

    k: int
    labels: tuple
    coords: dict = field(compare=False)

    def __getitem__(self, subset) -> Fraction:
        key = tuple(subset)
        if key not in self.coords:
            key = tuple(sorted(key))
            if len(set(key)) != len(key):
                return Fraction(0)
            perm_sign = _sort_sign(tuple(subset))
            return perm_sign * self.coords[key]
        return self.coords[key]

    def support(self) -> frozenset:
        return frozenset(I for I, v in self.coords.items() if v != 0)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coords.values())

    def ray(self) -> tuple:
        """Canonical representative: scaled so the first nonzero coordinate is 1."""
        keys = sorted(self.coords)
        lead = next((self.coords[I] for I in keys if self.coords[I] != 0), None)
        if lead is None:
            return tuple((I, Fraction(0)) for I in keys)
        return tuple((I, self.coords[I] / lead) for I in keys)

    def proportional(self, other: "PluckerVector") -> bool:
        if self.labels != other.labels or self.k != other.k:
            return False
        if self.is_zero() or other.is_zero():
            return False
        return self.ray() == other.ray()

    def __eq__(self, other) -> bool:
        return (isinstance(other, PluckerVector) and self.k == other.k
                and self.labels == other.labels and self.coords == other.coords)

    def __hash__(self):
        return hash((self.k, self.labels, tuple(sorted(self.coords.items()))))


def _sort_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def plucker_coordinates(M: RationalMatrix) -> PluckerVector:
    """Every k x k minor of M, keyed by the increasing tuple of column labels."""
    k, n = M.k, M.n
    if k == 0:
        return PluckerVector(0, M.labels, {(): Fraction(1)})
    ints, scale = _integer_rows(M.rows)
    vals = minors_int(ints, n)
    coords = {tuple(M.labels[j] for j in cols): Fraction(v, scale)
              for cols, v in zip(combinations(range(n), k), vals)}
    return PluckerVector(k, M.labels, coords)


def positivity_class(P: PluckerVector) -> str:
    """One of 'totally_positive', 'totally_nonnegative', 'neither'."""
    vals = list(P.coords.values())
    if all(v == 0 for v in vals):
        raise ValueError("not a Grassmannian point: all Plucker coordinates vanish")
    if any(v < 0 for v in vals) and any(v > 0 for v in vals):
        return "neither"
    if all(v != 0 for v in vals):
        return "totally_positive"
    return "totally_nonnegative"


# sampling

RANDOM_MAX = 10 ** 4


def rng_for(seed: int, index: int = 0, tag: str = "") -> random.Random:
    """Independent deterministic stream per (seed, index, tag)."""
    return random.Random(f"amplikit:{tag}:{seed}:{index}")


def random_positive(rng: random.Random, hi: int = RANDOM_MAX) -> Fraction:
    return Fraction(rng.randint(1, hi), rng.randint(1, hi))


def moment_curve(params: Sequence[Fraction], width: int) -> RationalMatrix:
    """Rows (1, t, ..., t^(width-1)), rescaled to integers row by row."""
    rows = []
    for t in params:
        t = to_rational(t)
        p, q = t.numerator, t.denominator
        rows.append([p ** e * q ** (width - 1 - e) for e in range(width)])
    return RationalMatrix(rows, range(1, width + 1))


def default_Z(n: int, k: int) -> RationalMatrix:
    """Moment curve at t_j = j."""
    return moment_curve(list(range(1, n + 1)), k + 4)


def positive_Z(n: int, width: int, seed: int = 0) -> RationalMatrix:
    if width > n or width < 1:
        raise ValueError(f"positive_Z needs 1 <= width <= n, got n={n}, width={width}")
    rng = rng_for(seed, 0, "Z")
    ts = set()
    while len(ts) < n:
        ts.add(random_positive(rng))
    return moment_curve(sorted(ts), width)


def network_matrix(k: int, n: int, weights: Mapping[tuple, Fraction]) -> RationalMatrix:
    """Path matrix of the k x (n-k) grid network with the given edge weights.

    Sources 1..k enter the east ends of the rows, sinks k+1..n sit at the
    bottoms of the columns read east to west; paths step west or south.
    ``weights[(r, c)]`` is the weight of the west-going edge entering grid
    vertex (r, c), columns numbered 1..n-k from the west.
    """
    m = n - k
    rows = []
    for i in range(1, k + 1):
        f = {}
        for r in range(i, k + 1):
            for c in range(m, 0, -1):
                v = Fraction(0)
                if r == i:
                    v += (f[(r, c + 1)] if c < m else Fraction(1)) * weights[(r, c)]
                else:
                    v += f[(r - 1, c)]
                    if c < m:
                        v += f[(r, c + 1)] * weights[(r, c)]
                f[(r, c)] = v
        row = [Fraction(int(j == i)) for j in range(1, k + 1)]
        sign = -1 if (k - i) % 2 else 1
        for lab in range(k + 1, n + 1):
            c = m + 1 - (lab - k)
            row.append(sign * f[(k, c)])
        rows.append(row)
    return RationalMatrix(rows, range(1, n + 1))


def top_cell_C(k: int, n: int, seed: int = 0) -> RationalMatrix:
    if not 0 <= k <= n:
        raise ValueError(f"top_cell_C needs 0 <= k <= n, got k={k}, n={n}")
    rng = rng_for(seed, 0, "C")
    weights = {(r, c): random_positive(rng) for r in range(1, k + 1) for c in range(1, n - k + 1)}
    return network_matrix(k, n, weights)


def sample_matrix(kind: str, *args, seed: int = 0) -> RationalMatrix:
    """Dispatch to ``positive_Z(n, width)``, ``top_cell_C(k, n)`` or ``cell_point(recipe)``."""
    if kind == "positive_Z":
        return positive_Z(*args, seed=seed)
    if kind == "top_cell_C":
        return top_cell_C(*args, seed=seed)
    if kind == "cell_point":
        from .cells import cell_point
        return cell_point(*args, seed=seed)
    raise ValueError(f"unknown sample kind {kind!r}")


# atomic operations

@dataclass(frozen=True)
class MatrixOpSpec:
    kind: str  # cyc, refl, pre, inc, x, y
    I: frozenset = frozenset()
    i: int | None = None
    t: Fraction | None = None

    @staticmethod
    def cyc() -> "MatrixOpSpec":
        return MatrixOpSpec("cyc")

    @staticmethod
    def refl() -> "MatrixOpSpec":
        return MatrixOpSpec("refl")

    @staticmethod
    def pre(I: Iterable[int]) -> "MatrixOpSpec":
        return MatrixOpSpec("pre", I=frozenset(I))

    @staticmethod
    def inc(i: int) -> "MatrixOpSpec":
        return MatrixOpSpec("inc", i=i)

    @staticmethod
    def x(i: int, t) -> "MatrixOpSpec":
        return MatrixOpSpec("x", i=i, t=to_rational(t))

    @staticmethod
    def y(i: int, t) -> "MatrixOpSpec":
        return MatrixOpSpec("y", i=i, t=to_rational(t))


def cyc(M: RationalMatrix, times: int = 1) -> RationalMatrix:
    """Columns (v_1..v_n) -> ((-1)^(k-1) v_n, v_1, ..., v_{n-1}), on positions."""
    k = M.k
    cols = [tuple(r[j] for r in M.rows) for j in range(M.n)]
    for _ in range(times % max(M.n, 1) if M.n else 0):
        last = cols[-1]
        if k % 2 == 0:
            last = tuple(-x for x in last)
        cols = [last] + cols[:-1]
    rows = [[cols[j][i] for j in range(M.n)] for i in range(k)]
    return RationalMatrix(rows, M.labels)


def refl(M: RationalMatrix) -> RationalMatrix:
    """Reverse the columns; the first row picks up (-1)^C(k,2)."""
    rows = [list(reversed(r)) for r in M.rows]
    if rows and comb(M.k, 2) % 2:
        rows[0] = [-x for x in rows[0]]
    return RationalMatrix(rows, M.labels)


def pre(M: RationalMatrix, I: Iterable[int]) -> RationalMatrix:
    I = set(I)
    if I & set(M.labels):
        raise ValueError(f"pre: labels {sorted(I & set(M.labels))} already present")
    cols = M.columns()
    zero = tuple(Fraction(0) for _ in range(M.k))
    for i in I:
        cols[i] = zero
    return RationalMatrix.from_columns(M.k, cols) if cols else RationalMatrix([[] for _ in range(M.k)], [])


def inc(M: RationalMatrix, i: int) -> RationalMatrix:
    if i in M.labels:
        raise ValueError(f"inc: label {i} already present")
    labels = sorted(M.labels + (i,))
    rows = [[Fraction(int(lab == i)) for lab in labels]]
    for r in M.rows:
        row = []
        for lab in labels:
            if lab == i:
                row.append(Fraction(0))
            else:
                x = r[M.index(lab)]
                row.append(-x if lab < i else x)
        rows.append(row)
    return RationalMatrix(rows, labels)


def _next_label(M: RationalMatrix, i: int) -> int:
    j = M.index(i)
    return M.labels[(j + 1) % M.n]


def bridge(M: RationalMatrix, kind: str, i: int, t) -> RationalMatrix:
    """x_i(t): col(next) += t col(i); y_i(t): col(i) += t col(next).

    ``next`` is the label after i in the marker set; at the last label it
    wraps to the first with the cyclic sign (-1)^(k-1).
    """
    t = to_rational(t)
    if t <= 0:
        raise ValueError("bridge parameter must be positive")
    j = _next_label(M, i)
    wrap = M.index(i) == M.n - 1
    s = -1 if (wrap and M.k % 2 == 0) else 1
    cols = M.columns()
    if kind == "x":
        cols[j] = tuple(a + s * t * b for a, b in zip(cols[j], cols[i]))
    elif kind == "y":
        cols[i] = tuple(a + s * t * b for a, b in zip(cols[i], cols[j]))
    else:
        raise ValueError(kind)
    return RationalMatrix.from_columns(M.k, cols)


def apply_matrix_op(op: MatrixOpSpec, M: RationalMatrix) -> RationalMatrix:
    if op.kind == "cyc":
        return cyc(M)
    if op.kind == "refl":
        return refl(M)
    if op.kind == "pre":
        return pre(M, op.I)
    if op.kind == "inc":
        return inc(M, op.i)
    if op.kind in ("x", "y"):
        if op.t is None or op.t <= 0:
            raise ValueError("bridge parameter must be positive")
        return bridge(M, op.kind, op.i, op.t)
    raise ValueError(f"unknown matrix op {op.kind!r}")


def same_rowspan(A: RationalMatrix, B: RationalMatrix) -> bool:
    if A.labels != B.labels or A.k != B.k:
        return False
    return rref(A.rows)[0] == rref(B.rows)[0]
