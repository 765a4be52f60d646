"""The amplituhedron map, coordinate functionaries, tiles and tilings."""
from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import cells
from . import functionary as fn
from . import positroid as pz
from .cells import Recipe, StepTuple, bcfw_matrix, cell_point
from .exact import RationalMatrix, network_matrix, positive_Z, random_positive, rng_for
from .functionary import Expr, FunctionaryZeroDivision, TwistorPoint, tw
from .promotion import PromotionContext, promote_expr

FAMILIES = ("alpha", "beta", "gamma", "delta", "epsilon")


def amplituhedron_map(C: RationalMatrix, Z: RationalMatrix) -> RationalMatrix:
    """Y = C Z, a k x (k+4) matrix."""
    if C.n != Z.k:
        raise ValueError(f"C has {C.n} columns but Z has {Z.k} rows")
    if Z.n != C.k + 4:
        raise ValueError(f"Z must have k+4 = {C.k + 4} columns, got {Z.n}")
    if C.k == 0:
        return RationalMatrix([], range(1, Z.n + 1))
    return C @ Z


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def coordinate_functionaries(r: Recipe) -> list[Expr]:
    """5k rational functionaries, five per product step in parameter order."""
    return list(_coord(r))


@lru_cache(maxsize=4096)
def _coord(r: Recipe) -> tuple:
    st = r.step
    if st is None:
        return ()
    if st.prod is None:
        F = list(_coord(r.left))
    else:
        a, b, c, d, n = st.prod
        N = [x for x in r.markers if x not in st.pre]
        ctx = PromotionContext(N, a, c)
        kR = r.right.k
        F = []
        for f in _coord(r.left):
            F.append(_sign((kR + 1) * f.degree(n)) * promote_expr(f, ctx, "L"))
        for f in _coord(r.right):
            F.append(promote_expr(f, ctx, "R"))
        F += [_sign(kR) * tw(b, c, d, n), _sign(kR + 1) * tw(a, c, d, n), tw(a, b, d, n),
              -tw(a, b, c, n), tw(a, b, c, d)]
    F = transport(F, r.markers, r.k, st.cyc, st.refl)
    return tuple(F)


def transport(F: Sequence[Expr], markers: Sequence[int], k: int, cyc: int, refl: int,
              signs: bool = True) -> list[Expr]:
    """Carry functionaries through cyc^cyc then refl on the marker set."""
    F = list(F)
    n = markers[-1]
    for _ in range(cyc):
        F = [(_sign(k * f.degree(n)) if signs else 1) * fn.pullback_expr(f, "cyc_star_inv", markers)
             for f in F]
    if refl:
        F = [fn.pullback_expr(f, "refl_star", markers) for f in F]
    return F


def parameter_names(k: int) -> list[str]:
    return [f"{fam}_{i}" for i in range(1, k + 1) for fam in FAMILIES]


@dataclass
class TileSpec:
    recipe: Recipe
    functionaries: list = field(default_factory=list)
    key: tuple = ()

    @classmethod
    def of(cls, r: Recipe) -> "TileSpec":
        return cls(r, coordinate_functionaries(r), cells.cell_key(cells.recipe_positroid(r)))

    @property
    def k(self) -> int:
        return self.recipe.k

    def to_json(self) -> dict:
        return {"recipe": self.recipe.to_json(),
                "functionaries": {nm: f.sexpr() for nm, f in zip(parameter_names(self.k), self.functionaries)}}


@dataclass
class Membership:
    interior: bool
    witness: str | None = None  # name of the first non-positive functionary
    value: Fraction | None = None
    reason: str = ""

    def __bool__(self):
        return self.interior


def _point(Y, Z, labels=None) -> TwistorPoint:
    if isinstance(Y, TwistorPoint):
        return Y
    return TwistorPoint(Y if Y is not None and Y.k else None, Z, labels)


def tile_membership(Y, Z: RationalMatrix | None, T: TileSpec) -> Membership:
    if T.k == 0:
        return Membership(True)
    pt = _point(Y, Z)
    names = parameter_names(T.k)
    for nm, f in zip(names, T.functionaries):
        try:
            v = pt(f)
        except FunctionaryZeroDivision as e:
            return Membership(False, nm, None, f"denominator vanishes: {e}")
        if v <= 0:
            return Membership(False, nm, v, "non-positive")
    return Membership(True)


def functionary_values(Y, Z, T: TileSpec) -> list[Fraction]:
    pt = _point(Y, Z)
    return [pt(f) for f in T.functionaries]


def invert_tile(Y, Z: RationalMatrix, T: TileSpec) -> RationalMatrix:
    """Twistor matrix: the recipe matrix with parameters set to the functionaries at Y."""
    vals = functionary_values(Y, Z, T)
    if any(v <= 0 for v in vals):
        bad = [nm for nm, v in zip(parameter_names(T.k), vals) if v <= 0]
        raise ValueError(f"Y is not interior to the tile (non-positive: {', '.join(bad)})")
    params = [tuple(vals[5 * i:5 * i + 5]) for i in range(T.k)]
    return bcfw_matrix(T.recipe, params)


# BCFW collections

@dataclass(frozen=True)
class Cell:
    key: tuple
    positroid: object
    recipe: Recipe


@dataclass(frozen=True)
class BCFWCollection:
    """A set of BCFW cells with the recursion choices that produced it."""
    markers: tuple
    k: int
    cells: tuple  # Cell, sorted by key
    provenance: object = None

    @property
    def keys(self) -> frozenset:
        return frozenset(c.key for c in self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def tiles(self) -> list[TileSpec]:
        return [TileSpec(c.recipe, coordinate_functionaries(c.recipe), c.key) for c in self.cells]

    def without(self, i: int) -> "BCFWCollection":
        cs = self.cells[:i] + self.cells[i + 1:]
        return BCFWCollection(self.markers, self.k, cs, ("drop", i, self.provenance))

    def to_json(self) -> dict:
        return {"markers": list(self.markers), "k": self.k,
                "cells": [c.recipe.to_json() for c in self.cells],
                "provenance": _prov_json(self.provenance)}


def _prov_json(p):
    if isinstance(p, tuple):
        return [_prov_json(x) for x in p]
    if isinstance(p, frozenset):
        return sorted(p)
    return p


def _make(markers, k, cells_, prov) -> BCFWCollection:
    uniq = {c.key: c for c in cells_}
    return BCFWCollection(tuple(markers), k, tuple(uniq[key] for key in sorted(uniq)), prov)


def _relabel_cell(c: Cell, mapping) -> Cell:
    P = pz.relabel(c.positroid, mapping)
    return Cell(P.key(), P, c.recipe.relabel(mapping))


def _pre_cell(c: Cell, N: tuple, x: int) -> Cell:
    P = pz.pre(c.positroid, {x})
    r = c.recipe
    if r.step is None:
        rr = Recipe.trivial(N)
    else:
        rr = Recipe(N, StepTuple(None, frozenset({x})), r)
    return Cell(P.key(), P, rr)


def _dihedral_cell(c: Cell, rot: int, flip: int) -> Cell:
    """refl^flip . cyc^rot applied to the cell."""
    P = c.positroid
    if rot:
        P = pz.cyc(P, rot)
    if flip:
        P = pz.refl(P)
    r = c.recipe
    if r.step is None or (rot == 0 and flip == 0):
        return Cell(P.key(), P, r)
    st = r.step
    m = len(r.markers)
    if not st.refl:
        rr = Recipe(r.markers, StepTuple(st.prod, st.pre, (st.cyc + rot) % m, flip), r.left, r.right)
    elif not rot:
        rr = Recipe(r.markers, StepTuple(st.prod, st.pre, st.cyc, 0), r.left, r.right)
    else:
        rr = Recipe(r.markers, StepTuple(None, frozenset(), rot, flip), r)
    return Cell(P.key(), P, rr)


def _relabel_collection(T: BCFWCollection, N: tuple) -> BCFWCollection:
    mapping = dict(zip(T.markers, N))
    return _make(N, T.k, [_relabel_cell(c, mapping) for c in T.cells], T.provenance)


@lru_cache(maxsize=None)
def _recursive_collections(m: int, k: int) -> tuple:
    """Collections on [m] from the recursive clause (before dihedral closure)."""
    N = tuple(range(1, m + 1))
    if k == 0:
        P = pz.trivial_positroid(N)
        return (_make(N, 0, [Cell(P.key(), P, Recipe.trivial(N))], "trivial"),)
    if m == k + 4:
        ((key, (P, r)),) = cells.enumerate_general_cells(m, k).items()
        return (_make(N, k, [Cell(key, P, r)], "top"),)
    n, c, d = m, m - 2, m - 1
    parts = []  # each entry: list of (cells, provenance) alternatives
    sub = tuple(x for x in N if x != d)
    parts.append([([_pre_cell(cl, N, d) for cl in T.cells], ("pre", d, T.provenance))
                  for T in (_relabel_collection(T0, sub) for T0 in _collections(m - 1, k))])
    for kL in range(k):
        kR = k - 1 - kL
        bmin = 2 if kL == 0 else kL + 3
        for b in range(bmin, n - 3 - kR + 1):
            a = b - 1
            NL = tuple(range(1, b + 1)) + (n,)
            NR = tuple(range(b, n + 1))
            Ls = [_relabel_collection(T, NL) for T in _collections(len(NL), kL)]
            Rs = [_relabel_collection(T, NR) for T in _collections(len(NR), kR)]
            alts = []
            for TL in Ls:
                for TR in Rs:
                    prod = []
                    for cL in TL.cells:
                        for cR in TR.cells:
                            P = pz.butterfly_positroid(cL.positroid, cR.positroid, (a, b, c, d, n), check=False)
                            prod.append(Cell(P.key(), P, Recipe(N, StepTuple((a, b, c, d, n)), cL.recipe, cR.recipe)))
                    alts.append((prod, ("prod", (a, b, c, d, n), kL, kR, TL.provenance, TR.provenance)))
            parts.append(alts)
    out = {}
    for choice in itertools.product(*parts):
        T = _make(N, k, [cl for cs, _ in choice for cl in cs], tuple(p for _, p in choice))
        out.setdefault(T.keys, T)
    return tuple(out[key] for key in sorted(out, key=sorted))


@lru_cache(maxsize=None)
def _collections(m: int, k: int) -> tuple:
    """All BCFW collections on [m], closed under the dihedral group."""
    if k < 0 or (k > 0 and m < k + 4):
        return ()
    out = {}
    for T in _recursive_collections(m, k):
        for flip in (0, 1):
            for rot in range(m):
                cs = [_dihedral_cell(c, rot, flip) for c in T.cells]
                U = _make(T.markers, k, cs, ("dihedral", rot, flip, T.provenance) if rot or flip else T.provenance)
                out.setdefault(U.keys, U)
    return tuple(out[key] for key in sorted(out, key=sorted))


def enumerate_bcfw_collections(n: int, k: int, mode: str = "list"):
    """BCFW collections of cells for A_{n,k,4}; mode 'count' returns the number only."""
    if mode not in ("count", "list"):
        raise ValueError("mode must be 'count' or 'list'")
    cols = _collections(n, k)
    return len(cols) if mode == "count" else list(cols)


# tiling verification

def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("AMPLIKIT_THREADS", "1") or 1)
    return max(1, threads)


def _verdicts(pt: TwistorPoint, tiles: Sequence[TileSpec]) -> list[int] | None:
    """+1 interior, -1 outside, per tile; None when some functionary is exactly zero."""
    out = []
    for T in tiles:
        v = 1
        for f in T.functionaries:
            try:
                x = pt(f)
            except FunctionaryZeroDivision:
                return None
            if x == 0:
                return None
            if x < 0:
                v = -1
                break
        out.append(v)
    return out


@dataclass
class TilingReport:
    n: int
    k: int
    tiles: int
    samples: int
    own_interior: list = field(default_factory=list)  # per tile: forward samples interior to it
    overlaps: list = field(default_factory=list)  # (tile, other tile, sample seed)
    coverage_hits: dict = field(default_factory=dict)  # tile index -> count
    gaps: list = field(default_factory=list)  # seeds of top-cell samples in no tile
    multiples: list = field(default_factory=list)  # seeds of samples in several tiles
    resampled: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not (self.overlaps or self.gaps or self.multiples) and \
            all(x == self.samples for x in self.own_interior)

    def to_json(self) -> dict:
        return {"ok": self.ok, "n": self.n, "k": self.k, "tiles": self.tiles, "samples": self.samples,
                "own_interior": self.own_interior, "overlaps": self.overlaps[:20],
                "coverage_hits": {str(i): v for i, v in sorted(self.coverage_hits.items())},
                "gaps": self.gaps[:20], "multiples": self.multiples[:20],
                "resampled": self.resampled, "seconds": round(self.seconds, 3)}


def _forward_sample(T: TileSpec, Z, tiles, i: int, seed: int):
    for attempt in range(50):
        s = seed * 1000003 + i * 101 + attempt
        C = cell_point(T.recipe, seed=s)
        pt = TwistorPoint(C @ Z, Z)
        v = _verdicts(pt, tiles)
        if v is not None:
            return s, v, attempt
    raise RuntimeError("could not find a generic sample point")


def spread_top_cell_C(k: int, n: int, seed: int = 0) -> RationalMatrix:
    """Top-cell point with log-spread network weights (reaches thin regions)."""
    rng = rng_for(seed, 0, "spreadC")
    weights = {(r, c): Fraction(2) ** rng.randint(-10, 10) * random_positive(rng, 50)
               for r in range(1, k + 1) for c in range(1, n - k + 1)}
    return network_matrix(k, n, weights)


def coverage_point(n: int, k: int, seed: int) -> RationalMatrix:
    """A point of Gr>=0(k,n) chosen independently of any tiling.

    Alternates between spread top-cell points and images of random 4k-dimensional
    general BCFW cells, so that every region of the amplituhedron is visited.
    """
    if seed % 2 == 0:
        return spread_top_cell_C(k, n, seed)
    pool = list(cells.enumerate_general_cells(n, k).values())
    rng = rng_for(seed, 0, "covercell")
    _, r = pool[rng.randrange(len(pool))]
    return cell_point(r, seed=seed)


def _cover_sample(n: int, k: int, Z, tiles, i: int, seed: int):
    for attempt in range(50):
        s = seed * 1000003 + i * 101 + attempt
        pt = TwistorPoint(coverage_point(n, k, s) @ Z, Z)
        v = _verdicts(pt, tiles)
        if v is not None:
            return s, v, attempt
    raise RuntimeError("could not find a generic sample point")


def verify_tiling(collection: BCFWCollection, Z: RationalMatrix | None = None, samples: int = 100,
                  seed: int = 0, threads: int | None = None) -> TilingReport:
    """Monte Carlo check of disjointness (forward samples) and coverage (top-cell samples)."""
    t0 = time.perf_counter()
    n, k = len(collection.markers), collection.k
    if Z is None:
        Z = positive_Z(n, k + 4, seed)
    tiles = collection.tiles()
    rep = TilingReport(n, k, len(tiles), samples)
    if k == 0:
        rep.own_interior = [samples] * len(tiles)
        rep.coverage_hits = {0: samples}
        rep.seconds = time.perf_counter() - t0
        return rep
    with ThreadPoolExecutor(_threads(threads)) as ex:
        for ti, T in enumerate(tiles):
            res = list(ex.map(lambda i: _forward_sample(T, Z, tiles, i, seed + 7919 * ti), range(samples)))
            own = 0
            for s, v, att in res:
                rep.resampled += att
                own += v[ti] == 1
                for tj, x in enumerate(v):
                    if tj != ti and x == 1:
                        rep.overlaps.append((ti, tj, s))
            rep.own_interior.append(own)
        res = list(ex.map(lambda i: _cover_sample(n, k, Z, tiles, i, seed + 104729), range(samples)))
    for s, v, att in res:
        rep.resampled += att
        hits = [i for i, x in enumerate(v) if x == 1]
        if not hits:
            rep.gaps.append(s)
        elif len(hits) > 1:
            rep.multiples.append((s, hits))
        for i in hits:
            rep.coverage_hits[i] = rep.coverage_hits.get(i, 0) + 1
    rep.seconds = time.perf_counter() - t0
    return rep
