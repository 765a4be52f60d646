"""Recipes, BCFW products and matrices, and enumeration of general BCFW cells.

A recipe is stored as a tree. Product nodes hold a step tuple with product
indices and two children (on N_L and N_R); wrapper nodes hold a step tuple
without product indices and one child on N minus the inserted zero columns.
Parameters are consumed in flat order: left subtree, right subtree, node.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from . import positroid as pz
from .chords import ChordDiagram, split_subdiagrams, validate_diagram
from .exact import RationalMatrix, rng_for, random_positive, rref, plucker_coordinates
from .positroid import Positroid


@dataclass(frozen=True)
class StepTuple:
    prod: tuple | None  # (a, b, c, d, n) or None for a wrapper step
    pre: frozenset = frozenset()
    cyc: int = 0
    refl: int = 0

    def to_json(self) -> dict:
        return {"prod": list(self.prod) if self.prod else None, "pre": sorted(self.pre),
                "cyc": self.cyc, "refl": self.refl}

    @classmethod
    def from_json(cls, d: dict) -> "StepTuple":
        prod = d.get("prod")
        return cls(tuple(int(x) for x in prod) if prod is not None else None,
                   frozenset(int(x) for x in d.get("pre", ())),
                   int(d.get("cyc", 0)), int(d.get("refl", 0)))

    def relabel(self, mapping) -> "StepTuple":
        prod = tuple(mapping[x] for x in self.prod) if self.prod else None
        return StepTuple(prod, frozenset(mapping[x] for x in self.pre), self.cyc, self.refl)

    def __str__(self) -> str:
        parts = []
        if self.prod:
            parts.append("(" + ",".join(map(str, self.prod)) + ")")
        if self.pre:
            parts.append("pre_{" + ",".join(map(str, sorted(self.pre))) + "}")
        if self.cyc:
            parts.append(f"cyc^{self.cyc}")
        if self.refl:
            parts.append("refl")
        return "(" + ", ".join(parts) + ")" if parts else "(id)"


def child_marker_sets(N: Sequence[int], step: StepTuple) -> tuple[tuple, tuple]:
    """N_L and N_R of a product step on N."""
    a, b, c, d, n = step.prod
    rest = [x for x in N if x not in step.pre]
    NL = tuple(x for x in rest if x <= b or x == n)
    NR = tuple(x for x in rest if b <= x <= n)
    return NL, NR


def step_errors(N: Sequence[int], step: StepTuple) -> list[str]:
    """Conditions on a single step tuple relative to its marker set."""
    errs = []
    N = tuple(N)
    if not step.pre <= set(N):
        errs.append(f"pre set {sorted(step.pre - set(N))} not in markers")
    if not 0 <= step.cyc < max(len(N), 1):
        errs.append(f"cyc exponent {step.cyc} outside [0, {len(N)})")
    if step.refl not in (0, 1):
        errs.append(f"refl exponent {step.refl} not 0 or 1")
    if step.prod is not None:
        rest = [x for x in N if x not in step.pre]
        a, b, c, d, n = step.prod
        if not rest or n != rest[-1]:
            errs.append(f"n={n} is not the largest marker outside pre")
            return errs
        if any(x not in rest for x in (a, b, c, d)):
            errs.append("product index missing from markers")
            return errs
        pos = {x: i for i, x in enumerate(rest)}
        if not (a < b < c < d < n):
            errs.append("product indices not increasing")
        if pos[b] != pos[a] + 1:
            errs.append(f"a={a}, b={b} not consecutive")
        if pos[d] != pos[c] + 1 or pos[n] != pos[d] + 1:
            errs.append(f"c,d,n=({c},{d},{n}) not consecutive")
    return errs


@dataclass(frozen=True)
class Recipe:
    markers: tuple
    step: StepTuple | None = None
    left: "Recipe | None" = None
    right: "Recipe | None" = None

    @staticmethod
    def trivial(N: Iterable[int]) -> "Recipe":
        return Recipe(tuple(sorted(N)))

    @property
    def is_trivial(self) -> bool:
        return self.step is None

    @property
    def k(self) -> int:
        if self.step is None:
            return 0
        if self.step.prod is None:
            return self.left.k
        return self.left.k + self.right.k + 1

    def flat_steps(self) -> list[StepTuple]:
        if self.step is None:
            return []
        out = self.left.flat_steps()
        if self.right is not None:
            out += self.right.flat_steps()
        return out + [self.step]

    def product_steps(self) -> list[tuple]:
        """(prod indices, marker set) of each product node, in parameter order."""
        if self.step is None:
            return []
        out = self.left.product_steps()
        if self.right is not None:
            out += self.right.product_steps()
        if self.step.prod is not None:
            out.append((self.step.prod, self.markers))
        return out

    def relabel(self, mapping) -> "Recipe":
        return Recipe(tuple(sorted(mapping[x] for x in self.markers)),
                      self.step.relabel(mapping) if self.step else None,
                      self.left.relabel(mapping) if self.left else None,
                      self.right.relabel(mapping) if self.right else None)

    def to_json(self) -> dict:
        return {"markers": list(self.markers), "steps": [s.to_json() for s in self.flat_steps()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> "Recipe":
        if isinstance(data, str):
            data = json.loads(data)
        steps = [StepTuple.from_json(s) for s in data.get("steps", [])]
        return parse_recipe(data["markers"], steps)

    def __str__(self) -> str:
        return ", ".join(str(s) for s in self.flat_steps()) or "(trivial)"


class RecipeError(ValueError):
    pass


def recipe_errors(r: Recipe) -> list[str]:
    """Structural check of a recipe tree; empty when valid."""
    if r.step is None:
        return [] if r.left is None and r.right is None else ["trivial recipe with children"]
    errs = [f"on {list(r.markers)}: {e}" for e in step_errors(r.markers, r.step)]
    if errs:
        return errs
    if r.step.prod is None:
        want = tuple(x for x in r.markers if x not in r.step.pre)
        if r.left is None or r.left.markers != want or r.right is not None:
            return [f"wrapper child must live on {list(want)}"]
        return recipe_errors(r.left)
    NL, NR = child_marker_sets(r.markers, r.step)
    if r.left is None or r.right is None or r.left.markers != NL or r.right.markers != NR:
        return [f"children must live on N_L={list(NL)} and N_R={list(NR)}"]
    for side, child in (("L", r.left), ("R", r.right)):
        if child.k and child.k > len(child.markers) - 4:
            errs.append(f"k_{side}={child.k} exceeds |N_{side}|-4")
    return errs + recipe_errors(r.left) + recipe_errors(r.right)


def parse_recipe(markers: Iterable[int], steps: Sequence[StepTuple]) -> Recipe:
    """Rebuild the tree from a flat list; reject when no or several trees fit."""
    markers = tuple(sorted(int(x) for x in markers))
    steps = list(steps)
    memo: dict = {}

    def parses(lo: int, hi: int, N: tuple) -> list:
        key = (lo, hi, N)
        if key in memo:
            return memo[key]
        out = []
        if lo == hi:
            out = [Recipe(N)]
        else:
            st = steps[hi - 1]
            if not step_errors(N, st):
                if st.prod is None:
                    sub = tuple(x for x in N if x not in st.pre)
                    out = [Recipe(N, st, c) for c in parses(lo, hi - 1, sub)]
                else:
                    NL, NR = child_marker_sets(N, st)
                    for mid in range(lo, hi):
                        for L in parses(lo, mid, NL):
                            if L.k and L.k > len(NL) - 4:
                                continue
                            for R in parses(mid, hi - 1, NR):
                                if R.k and R.k > len(NR) - 4:
                                    continue
                                out.append(Recipe(N, st, L, R))
                                if len(out) > 1:
                                    break
        memo[key] = out[:2]
        return memo[key]

    found = parses(0, len(steps), markers)
    if not found:
        raise RecipeError("no recipe tree matches the step list")
    if len(found) > 1:
        raise RecipeError("step list is ambiguous as a recipe tree")
    return found[0]


def recipe_from_diagram(D: ChordDiagram) -> Recipe:
    """Standard recipe of the cell S_D."""
    errs = validate_diagram(D)
    if errs:
        raise ValueError(f"invalid chord diagram: {errs}")
    if D.k == 0:
        return Recipe.trivial(D.markers)
    top = D.chord(D.k)
    p = D.penultimate
    if top.d != p:
        inner = recipe_from_diagram(ChordDiagram([x for x in D.markers if x != p], D.chords))
        st = inner.step
        return Recipe(D.markers, StepTuple(st.prod, st.pre | {p}), inner.left, inner.right)
    DL, DR = split_subdiagrams(D)
    return Recipe(D.markers, StepTuple((top.a, top.b, top.c, top.d, D.n)),
                  recipe_from_diagram(DL), recipe_from_diagram(DR))


# matrices, generic over the value type (Fraction or Dual)

class _Mat:
    """Rows plus labels, with entries of any field-like type."""

    __slots__ = ("rows", "labels", "steps")

    def __init__(self, rows, labels, steps):
        self.rows = rows
        self.labels = tuple(labels)
        self.steps = steps  # product-step index of each row

    def col(self, lab):
        j = self.labels.index(lab)
        return [r[j] for r in self.rows]


def _product(A: _Mat, zeta, B: _Mat, idx, step_no: int, zero) -> _Mat:
    a, b, c, d, n = idx
    al, be, ga, de, ep = zeta
    kR = len(B.rows)
    labels = sorted(set(A.labels) | set(B.labels))
    sR = 1 if kR % 2 == 0 else -1
    rows = []
    Aa, Ab = A.col(a), A.col(b)
    Aa2 = [x + (al / be) * y for x, y in zip(Aa, Ab)]
    for i, r in enumerate(A.rows):
        row = []
        for lab in labels:
            if lab == a:
                row.append(Aa2[i])
            elif lab == n:
                v = r[A.labels.index(n)]
                row.append(-v if sR == 1 else v)
            elif lab in A.labels:
                row.append(r[A.labels.index(lab)])
            else:
                row.append(zero)
        rows.append(row)
    mid = []
    for lab in labels:
        if lab == a:
            mid.append(al)
        elif lab == b:
            mid.append(be)
        elif lab in (c, d, n):
            v = {c: ga, d: de, n: ep}[lab]
            mid.append(v if sR == 1 else -v)
        else:
            mid.append(zero)
    rows.append(mid)
    if kR:
        Bn = B.col(n)
        Bd2 = [x + (de / ep) * y for x, y in zip(B.col(d), Bn)]
        Bc2 = [x + (ga / de) * y for x, y in zip(B.col(c), Bd2)]
        for i, r in enumerate(B.rows):
            row = []
            for lab in labels:
                if lab == c:
                    row.append(Bc2[i])
                elif lab == d:
                    row.append(Bd2[i])
                elif lab in B.labels:
                    row.append(r[B.labels.index(lab)])
                else:
                    row.append(zero)
            rows.append(row)
    return _Mat(rows, labels, A.steps + [step_no] + B.steps)


def _pre(M: _Mat, I, N, zero) -> _Mat:
    if not I:
        return M
    rows = [[r[M.labels.index(lab)] if lab in M.labels else zero for lab in N] for r in M.rows]
    return _Mat(rows, N, M.steps)


def _cyc(M: _Mat, times: int) -> _Mat:
    k, m = len(M.rows), len(M.labels)
    if m == 0 or times % m == 0:
        return M
    rows = [list(r) for r in M.rows]
    for _ in range(times % m):
        for r in rows:
            last = r[-1] if k % 2 == 1 else -r[-1]
            r[:] = [last] + r[:-1]
    return _Mat(rows, M.labels, M.steps)


def _refl(M: _Mat) -> _Mat:
    k = len(M.rows)
    rows = [list(reversed(r)) for r in M.rows]
    if rows and (k * (k - 1) // 2) % 2:
        rows[0] = [-x for x in rows[0]]
    return _Mat(rows, M.labels, M.steps)


def _build(r: Recipe, params, zero, counter: list) -> _Mat:
    if r.step is None:
        return _Mat([], r.markers, [])
    st = r.step
    if st.prod is None:
        M = _build(r.left, params, zero, counter)
    else:
        A = _build(r.left, params, zero, counter)
        B = _build(r.right, params, zero, counter)
        i = counter[0]
        counter[0] += 1
        M = _product(A, params[i], B, st.prod, i, zero)
    M = _pre(M, st.pre, r.markers, zero)
    M = _cyc(M, st.cyc)
    if st.refl:
        M = _refl(M)
    return M


def _coerce_params(params, k: int):
    params = [tuple(Fraction(x) if not hasattr(x, "grad") else x for x in z) for z in params]
    if len(params) != k or any(len(z) != 5 for z in params):
        raise ValueError(f"need {k} parameter 5-tuples, got {len(params)}")
    return params


def bcfw_matrix(r: Recipe, params: Sequence[Sequence]) -> RationalMatrix:
    """BCFW matrix M_r; params[i] = (alpha, beta, gamma, delta, epsilon) of product step i."""
    params = _coerce_params(params, r.k)
    if any(x <= 0 for z in params for x in z):
        raise ValueError("BCFW parameters must be positive")
    M = _build(r, params, Fraction(0), [0])
    return RationalMatrix(M.rows, M.labels)


def bcfw_matrix_rows(r: Recipe, params) -> tuple[RationalMatrix, list]:
    """BCFW matrix together with the product-step index of each row."""
    params = _coerce_params(params, r.k)
    M = _build(r, params, Fraction(0), [0])
    return RationalMatrix(M.rows, M.labels), M.steps


def bcfw_product_matrix(A: RationalMatrix, params, B: RationalMatrix, indices) -> RationalMatrix:
    """Matrix of the BCFW product of A (on N_L) and B (on N_R)."""
    a, b, c, d, n = indices
    if not (a < b < c < d < n):
        raise ValueError("product indices must satisfy a<b<c<d<n")
    NL, NR = set(A.labels), set(B.labels)
    if not {a, b, n} <= NL or not {b, c, d, n} <= NR:
        raise ValueError("index sets do not contain the product indices")
    if NL & NR != {b, n}:
        raise ValueError("N_L and N_R must meet exactly in {b, n}")
    zeta = tuple(Fraction(x) for x in params)
    if len(zeta) != 5 or any(x <= 0 for x in zeta):
        raise ValueError("need five positive parameters")
    M = _product(_Mat([list(r) for r in A.rows], A.labels, [0] * A.k), zeta,
                 _Mat([list(r) for r in B.rows], B.labels, [0] * B.k), indices, 0, Fraction(0))
    return RationalMatrix(M.rows, M.labels)


def random_parameters(k: int, seed: int = 0) -> list[tuple]:
    rng = rng_for(seed, 0, "bcfw")
    return [tuple(random_positive(rng) for _ in range(5)) for _ in range(k)]


def normalize_parameters(params) -> list[tuple]:
    """Projective 5-tuples scaled so epsilon = 1."""
    return [tuple(Fraction(x) / Fraction(z[4]) for x in z) for z in params]


def cell_point(r: Recipe, seed: int = 0) -> RationalMatrix:
    return bcfw_matrix(r, random_parameters(r.k, seed))


# positroids of recipes

is_coindependent = pz.is_coindependent
butterfly_positroid = pz.butterfly_positroid


def recipe_positroid(r: Recipe) -> Positroid:
    """Cell of a recipe, computed combinatorially from the six-row table."""
    if r.step is None:
        return pz.trivial_positroid(r.markers)
    st = r.step
    if st.prod is None:
        P = recipe_positroid(r.left)
    else:
        P = pz.butterfly_positroid(recipe_positroid(r.left), recipe_positroid(r.right), st.prod, check=False)
    if st.pre:
        P = pz.pre(P, st.pre)
    if st.cyc:
        P = pz.cyc(P, st.cyc)
    if st.refl:
        P = pz.refl(P)
    return P


def matrix_positroid(M: RationalMatrix) -> Positroid:
    if M.k == 0:
        return pz.trivial_positroid(M.labels)
    return Positroid(M.k, M.labels, plucker_coordinates(M).support(), check=False)


def cell_key(P: Positroid) -> tuple:
    return P.key()


# exact Jacobian via dual numbers

class Dual:
    """Value plus exact gradient; enough arithmetic for the matrix builder."""

    __slots__ = ("val", "grad")

    def __init__(self, val, grad):
        self.val = Fraction(val)
        self.grad = grad

    @staticmethod
    def _lift(x, size):
        return x if isinstance(x, Dual) else Dual(x, (Fraction(0),) * size)

    def __add__(self, o):
        o = Dual._lift(o, len(self.grad))
        return Dual(self.val + o.val, tuple(p + q for p, q in zip(self.grad, o.grad)))

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, tuple(-p for p in self.grad))

    def __sub__(self, o):
        return self + (-Dual._lift(o, len(self.grad)))

    def __rsub__(self, o):
        return Dual._lift(o, len(self.grad)) - self

    def __mul__(self, o):
        o = Dual._lift(o, len(self.grad))
        return Dual(self.val * o.val, tuple(self.val * q + o.val * p for p, q in zip(self.grad, o.grad)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = Dual._lift(o, len(self.grad))
        v = self.val / o.val
        return Dual(v, tuple((p - v * q) / o.val for p, q in zip(self.grad, o.grad)))

    def __rtruediv__(self, o):
        return Dual._lift(o, len(self.grad)) / self


def chart_jacobian_rank(r: Recipe, params=None, seed: int = 0) -> int:
    """Rank of d(chart coordinates)/d(parameters), with epsilon_i fixed to 1.

    The chart is the affine chart of the Grassmannian at the pivot columns of
    the matrix; its coordinates are the non-pivot entries of the reduced form.
    """
    k = r.k
    if k == 0:
        return 0
    if params is None:
        params = random_parameters(k, seed)
    params = normalize_parameters(params)
    size = 4 * k
    zero = Dual(0, (Fraction(0),) * size)
    dp = []
    for i, z in enumerate(params):
        tup = []
        for j in range(4):
            g = [Fraction(0)] * size
            g[4 * i + j] = Fraction(1)
            tup.append(Dual(z[j], tuple(g)))
        tup.append(Dual(1, (Fraction(0),) * size))
        dp.append(tuple(tup))
    M = _build(r, dp, zero, [0])
    rows = [list(x) for x in M.rows]
    _, piv = rref([[x.val for x in row] for row in rows])
    # reduce over duals with the same pivot columns
    for t, c in enumerate(piv):
        p = next(i for i in range(t, len(rows)) if rows[i][c].val != 0)
        rows[t], rows[p] = rows[p], rows[t]
        pv = rows[t][c]
        rows[t] = [x / pv for x in rows[t]]
        for i in range(len(rows)):
            if i != t and rows[i][c].val != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[t])]
    jac = [rows[t][c].grad for t in range(len(piv)) for c in range(len(M.labels)) if c not in piv]
    return len(rref(jac)[1]) if jac else 0


# enumeration

@lru_cache(maxsize=None)
def _product_cells(m: int, k: int) -> dict:
    """Products on [m] with n=m, c=m-2, d=m-1: key -> (positroid, recipe)."""
    out: dict = {}
    n, c, d = m, m - 2, m - 1
    for a in range(1, c - 1):
        b = a + 1
        NL = tuple(list(range(1, b + 1)) + [n])
        NR = tuple(range(b, n + 1))
        for kL in range(0, k):
            kR = k - 1 - kL
            if (kL and kL > len(NL) - 4) or (kR and kR > len(NR) - 4):
                continue
            left = _cells_relabelled(NL, kL)
            right = _cells_relabelled(NR, kR)
            for PL, rL in left:
                for PR, rR in right:
                    P = pz.butterfly_positroid(PL, PR, (a, b, c, d, n), check=False)
                    key = P.key()
                    if key not in out:
                        out[key] = (P, Recipe(tuple(range(1, m + 1)), StepTuple((a, b, c, d, n)), rL, rR))
    return out


def _cells_relabelled(N: tuple, k: int) -> list:
    base = _general_cells(len(N), k)
    mapping = {i + 1: x for i, x in enumerate(N)}
    return [(pz.relabel(P, mapping), rec.relabel(mapping)) for P, rec in base.values()]


@lru_cache(maxsize=None)
def _general_cells(m: int, k: int) -> dict:
    if k == 0:
        rec = Recipe.trivial(range(1, m + 1))
        P = pz.trivial_positroid(range(1, m + 1))
        return {P.key(): (P, rec)}
    out: dict = {}
    N = tuple(range(1, m + 1))
    for size in range(m, k + 3, -1):
        for keep in combinations(N, size):
            I = frozenset(N) - set(keep)
            mapping = {i + 1: x for i, x in enumerate(keep)}
            for P0, r0 in _product_cells(size, k).values():
                P1 = pz.pre(pz.relabel(P0, mapping), I)
                r1 = r0.relabel(mapping)
                for s in (0, 1):
                    for rot in range(m):
                        P = pz.cyc(P1, rot) if rot else P1
                        if s:
                            P = pz.refl(P)
                        key = P.key()
                        if key not in out:
                            st = StepTuple(r1.step.prod, I, rot, s)
                            out[key] = (P, Recipe(N, st, r1.left, r1.right))
    return out


def enumerate_general_cells(n: int, k: int) -> dict:
    """All general BCFW cells in Gr(k, n): cell key -> (positroid, witness recipe)."""
    if k < 0 or (k > 0 and k + 4 > n):
        return {}
    return dict(sorted(_general_cells(n, k).items()))


def enumerate_standard_cells(n: int, k: int) -> list[tuple[ChordDiagram, Recipe]]:
    from .chords import enumerate_diagrams
    return [(D, recipe_from_diagram(D)) for D in enumerate_diagrams(n, k)]
