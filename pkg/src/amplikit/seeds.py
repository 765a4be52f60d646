"""Quivers, seeds and signed seeds; the rectangles seed; the seed of a standard tile.

Cluster variables are tracked numerically: each vertex carries a ValuePanel,
the exact values of the variable at a fixed panel of points. Mutation then
only needs field arithmetic, and identities are checked point by point.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Sequence

from . import functionary as fn
from .amplituhedron import amplituhedron_map
from .cells import cell_point, recipe_from_diagram
from .chords import ChordDiagram, chord_relations, split_subdiagrams
from .domino import FAMILIES, _Closed, domino_signs, domino_variables, partition_mutable_frozen
from .exact import RationalMatrix, det, positive_Z, rng_for, top_cell_C
from .functionary import Expr, FunctionaryZeroDivision, TwistorPoint, chain, tw
from .promotion import PromotionContext, rescaled_promote


class SeedError(ValueError):
    pass


class PanelZero(ZeroDivisionError):
    """A variable vanished at a panel point; resample the panel."""


# ---------------------------------------------------------------- panels


class GrassmannPoint:
    """A k x n matrix with columns indexed by labels; <I> is the minor on columns I."""

    def __init__(self, C: RationalMatrix, labels: Sequence[int] | None = None):
        self.C = C
        self.k = C.k
        self.labels = tuple(labels) if labels is not None else tuple(range(1, C.n + 1))
        self._col = {x: j for j, x in enumerate(self.labels)}
        self._cols = [[C.rows[r][j] for r in range(C.k)] for j in range(C.n)]
        self._cache: dict = {}

    def bracket(self, I) -> Fraction:
        I = tuple(I)
        v = self._cache.get(I)
        if v is None:
            v = det([self._cols[self._col[i]] for i in I])
            self._cache[I] = v
        return v

    def __call__(self, F: Expr) -> Fraction:
        return fn.evaluate(F, self.bracket)


@dataclass(frozen=True)
class ValuePanel:
    """Exact values of one variable at the points of a panel."""

    values: tuple

    def __mul__(self, o: "ValuePanel") -> "ValuePanel":
        return ValuePanel(tuple(a * b for a, b in zip(self.values, o.values)))

    def __add__(self, o: "ValuePanel") -> "ValuePanel":
        return ValuePanel(tuple(a + b for a, b in zip(self.values, o.values)))

    def __truediv__(self, o: "ValuePanel") -> "ValuePanel":
        if any(b == 0 for b in o.values):
            raise PanelZero("division by a variable vanishing at a panel point")
        return ValuePanel(tuple(a / b for a, b in zip(self.values, o.values)))

    def __neg__(self) -> "ValuePanel":
        return ValuePanel(tuple(-a for a in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def signs(self) -> tuple:
        return tuple((v > 0) - (v < 0) for v in self.values)

    def sign(self) -> int:
        """Common sign at all points, 0 if mixed or vanishing somewhere."""
        s = set(self.signs())
        return s.pop() if len(s) == 1 else 0

    def nonzero(self) -> bool:
        return all(v != 0 for v in self.values)

    @staticmethod
    def one(size: int) -> "ValuePanel":
        return ValuePanel((Fraction(1),) * size)

    def to_json(self) -> list:
        return [str(v) for v in self.values]


class Panel:
    """A list of points, each with a ``bracket(I)`` method.

    ``Panel.positive(labels, k, size, seed)`` samples totally positive points of
    Gr(k, labels) from network parametrizations with random weights;
    ``Panel.tile(D, size, seed)`` uses twistor points Y = CZ with C in the
    standard tile of D (so signs are the tile signs).
    """

    def __init__(self, points: Sequence, labels: Sequence[int], kind: str = "custom", seed: int = 0):
        self.points = list(points)
        self.labels = tuple(labels)
        self.kind = kind
        self.seed = seed

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def positive(cls, labels: Sequence[int] | int, k: int = 4, size: int = 12, seed: int = 0) -> "Panel":
        labels = tuple(range(1, labels + 1)) if isinstance(labels, int) else tuple(labels)
        pts = [GrassmannPoint(top_cell_C(k, len(labels), seed=1000 * seed + j), labels) for j in range(size)]
        return cls(pts, labels, "positive", seed)

    @classmethod
    def tile(cls, D: ChordDiagram, size: int = 12, seed: int = 0) -> "Panel":
        r = recipe_from_diagram(D)
        Z = positive_Z(D.n, D.k + 4, seed=seed)
        pts = []
        for j in range(size):
            C = cell_point(r, seed=1000 * seed + j)
            pts.append(TwistorPoint(amplituhedron_map(C, Z) if D.k else None, Z, D.markers))
        return cls(pts, D.markers, "tile", seed)

    def fresh(self, shift: int = 1) -> "Panel":
        """An independent panel of the same kind (for re-verification)."""
        if self.kind == "positive":
            k = self.points[0].k
            return Panel.positive(self.labels, k, len(self), self.seed + 7919 * shift)
        raise SeedError(f"cannot resample a {self.kind} panel")

    def values(self, F: Expr) -> ValuePanel:
        try:
            return ValuePanel(tuple(fn.evaluate(F, p.bracket) for p in self.points))
        except FunctionaryZeroDivision as e:
            raise PanelZero(str(e)) from e

    def bracket_values(self, I: Sequence[int]) -> ValuePanel:
        """Values of the sorted-index bracket <I> (any width)."""
        I = tuple(sorted(I))
        return ValuePanel(tuple(p.bracket(I) for p in self.points))


def verify_identity_on_panel(lhs: Expr, rhs: Expr, panel: Panel, recheck: bool = True, attempts: int = 3) -> bool:
    """Exact equality of two expressions at every panel point.

    A vanishing denominator resamples the panel; an equality is confirmed on a
    fresh panel when ``recheck`` is set and the panel can be resampled.
    """
    diff = fn.add(lhs, fn.neg(rhs))
    for attempt in range(attempts):
        try:
            ok = all(v == 0 for v in panel.values(diff).values)
        except PanelZero:
            if panel.kind != "positive":
                raise
            panel = panel.fresh(attempt + 1)
            continue
        if not ok:
            return False
        if recheck and panel.kind == "positive":
            return verify_identity_on_panel(lhs, rhs, panel.fresh(attempts + 1), recheck=False)
        return True
    raise PanelZero("every resampled panel hit a vanishing denominator")


# ---------------------------------------------------------------- quivers


class Quiver:
    """Exchange matrix b[u][v] = #(u -> v) - #(v -> u) on an ordered vertex list.

    Arrows between two frozen vertices are never stored.
    """

    def __init__(self, vertices: Sequence[Hashable], frozen: Sequence[Hashable] = (), arrows=()):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise SeedError("repeated vertex")
        self.frozen = set(frozen)
        unknown = self.frozen - set(self.vertices)
        if unknown:
            raise SeedError(f"frozen vertices not in the quiver: {sorted(map(str, unknown))}")
        self.b: dict = {v: {} for v in self.vertices}
        for arrow in arrows:
            u, v, m = arrow if len(arrow) == 3 else (*arrow, 1)
            self.add_arrow(u, v, m)

    def is_mutable(self, v) -> bool:
        return v not in self.frozen

    @property
    def mutable(self) -> list:
        return [v for v in self.vertices if v not in self.frozen]

    def add_arrow(self, u, v, m: int = 1):
        if u == v:
            raise SeedError(f"loop at {u}")
        if u not in self.b or v not in self.b:
            raise SeedError(f"arrow {u} -> {v} uses an unknown vertex")
        if u in self.frozen and v in self.frozen:
            return
        x = self.b[u].get(v, 0) + m
        self._set(u, v, x)

    def _set(self, u, v, x: int):
        if x:
            self.b[u][v], self.b[v][u] = x, -x
        else:
            self.b[u].pop(v, None)
            self.b[v].pop(u, None)

    def entry(self, u, v) -> int:
        return self.b[u].get(v, 0)

    def out_arrows(self, v) -> dict:
        return {u: m for u, m in self.b[v].items() if m > 0}

    def in_arrows(self, v) -> dict:
        return {u: -m for u, m in self.b[v].items() if m < 0}

    def arrows(self) -> list:
        """(u, v, multiplicity) in vertex order."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        out = [(u, v, m) for u in self.vertices for v, m in self.b[u].items() if m > 0]
        return sorted(out, key=lambda a: (pos[a[0]], pos[a[1]]))

    def copy(self) -> "Quiver":
        Q = Quiver(self.vertices, self.frozen)
        Q.b = {v: dict(row) for v, row in self.b.items()}
        return Q

    def mutate(self, k) -> "Quiver":
        if k not in self.b:
            raise SeedError(f"unknown vertex {k}")
        if k in self.frozen:
            raise SeedError(f"vertex {k} is frozen")
        Q = self.copy()
        ins, outs = self.in_arrows(k), self.out_arrows(k)
        for i, bi in ins.items():
            for j, bj in outs.items():
                if i in self.frozen and j in self.frozen:
                    continue
                Q._set(i, j, Q.entry(i, j) + bi * bj)
        for v in list(self.b[k]):
            Q._set(k, v, -self.entry(k, v))
        return Q

    def matrix(self) -> list[list[int]]:
        return [[self.entry(u, v) for v in self.vertices] for u in self.vertices]

    def same_as(self, other: "Quiver") -> bool:
        return (set(self.vertices) == set(other.vertices) and self.frozen == other.frozen
                and all(self.entry(u, v) == other.entry(u, v) for u in self.vertices for v in self.vertices))

    def to_json(self) -> dict:
        pos = {v: i for i, v in enumerate(self.vertices)}
        return {
            "vertices": [{"label": _vname(v), "frozen": v in self.frozen} for v in self.vertices],
            "arrows": [[pos[u], pos[v], m] for u, v, m in self.arrows()],
        }

    def to_dot(self, names: dict | None = None, name: str = "Q") -> str:
        names = names or {}
        pos = {v: i for i, v in enumerate(self.vertices)}
        lines = [f"digraph {name} {{"]
        for v in self.vertices:
            shape = "box" if v in self.frozen else "circle"
            label = str(names.get(v, _vname(v))).replace('"', r'\"')
            lines.append(f'  v{pos[v]} [label="{label}", shape={shape}];')
        for u, v, m in self.arrows():
            extra = f' [label="{m}"]' if m > 1 else ""
            lines.append(f"  v{pos[u]} -> v{pos[v]}{extra};")
        lines.append("}")
        return "\n".join(lines)


def _vname(v) -> str:
    if isinstance(v, tuple) and len(v) == 2 and isinstance(v[0], str):
        return f"{v[0]}_{v[1]}"
    if isinstance(v, tuple):
        return "x".join(map(str, v)) if v else "empty"
    return str(v)


# ---------------------------------------------------------------- seeds


@dataclass
class Seed:
    """Quiver plus a label and a ValuePanel per vertex."""

    quiver: Quiver
    labels: dict
    values: dict
    panel: Panel | None = None

    def __post_init__(self):
        sizes = {len(p) for p in self.values.values()}
        if len(sizes) > 1:
            raise SeedError("panels of different lengths in one seed")
        if set(self.labels) != set(self.quiver.vertices):
            raise SeedError("labels must cover exactly the quiver vertices")

    @property
    def size(self) -> int:
        return len(next(iter(self.values.values()))) if self.values else 0

    def exchange_monomials(self, k) -> tuple[ValuePanel, ValuePanel]:
        """(prod over k -> j of x_j, prod over i -> k of x_i) on the panel."""
        one = ValuePanel.one(self.size)
        out, inn = one, one
        for j, m in self.quiver.out_arrows(k).items():
            for _ in range(m):
                out = out * self.values[j]
        for i, m in self.quiver.in_arrows(k).items():
            for _ in range(m):
                inn = inn * self.values[i]
        return out, inn

    def mutate(self, k) -> "Seed":
        Q = self.quiver.mutate(k)
        out, inn = self.exchange_monomials(k)
        values = dict(self.values)
        values[k] = (out + inn) / self.values[k]
        labels = dict(self.labels)
        labels[k] = f"mu[{_vname(k)}]({labels[k]})"
        return Seed(Q, labels, values, self.panel)

    def to_json(self, signs: dict | None = None) -> dict:
        pos = {v: i for i, v in enumerate(self.quiver.vertices)}
        verts = []
        for v in self.quiver.vertices:
            item = {"label": str(self.labels[v]), "frozen": v in self.quiver.frozen, "vertex": _vname(v)}
            if signs is not None:
                item["sign"] = signs.get(v, 0)
            verts.append(item)
        return {"vertices": verts, "arrows": [[pos[u], pos[v], m] for u, v, m in self.quiver.arrows()]}

    def to_dot(self) -> str:
        return self.quiver.to_dot({v: self.labels[v] for v in self.quiver.vertices})


@dataclass
class SignedSeed(Seed):
    sigma: dict = field(default_factory=dict)

    def in_sign(self, v) -> int:
        s = 1
        for u, m in self.quiver.in_arrows(v).items():
            s *= self.sigma[u] ** m
        return s

    def out_sign(self, v) -> int:
        s = 1
        for u, m in self.quiver.out_arrows(v).items():
            s *= self.sigma[u] ** m
        return s

    def violations(self) -> list:
        """Mutable vertices where in_sigma differs from out_sigma."""
        return [v for v in self.quiver.mutable if self.in_sign(v) != self.out_sign(v)]

    def is_signed(self) -> bool:
        return not self.violations()

    def mutate(self, k) -> "SignedSeed":
        S = Seed.mutate(self, k)
        sigma = dict(self.sigma)
        sigma[k] = self.sigma[k] * self.in_sign(k)
        return SignedSeed(S.quiver, S.labels, S.values, S.panel, sigma)

    def to_json(self, signs: dict | None = None) -> dict:
        return Seed.to_json(self, self.sigma if signs is None else signs)


def mutate(S: Seed, k) -> Seed:
    """mu_k of a seed or signed seed."""
    return S.mutate(k)


def random_mutations(S: Seed, length: int, rng: random.Random) -> tuple[Seed, list]:
    seq = []
    for _ in range(length):
        mut = S.quiver.mutable
        if not mut:
            break
        k = mut[rng.randrange(len(mut))]
        S = S.mutate(k)
        seq.append(k)
    return S, seq


# ---------------------------------------------------------------- rectangles seed


def rectangle_label(i: int, j: int, k: int, n: int) -> tuple:
    """Plucker subset of the i x j rectangle (0 x 0 for the empty one)."""
    m = n - k
    return tuple(range(m - j + 1, m - j + i + 1)) + tuple(range(m + i + 1, n + 1))


EMPTY = ()


def rectangles_seed(k: int, n: int, panel: Panel | None = None) -> Seed:
    """Rectangles seed of Gr(k, n); vertices are (i, j) rectangles and EMPTY."""
    if not 1 <= k < n:
        raise SeedError(f"rectangles seed needs 1 <= k < n, got k={k}, n={n}")
    m = n - k
    verts = [(i, j) for i in range(1, k + 1) for j in range(1, m + 1)] + [EMPTY]
    frozen = [v for v in verts if v == EMPTY or v[0] == k or v[1] == m]
    Q = Quiver(verts, frozen)
    for i, j in verts[:-1]:
        for t in ((i, j + 1), (i + 1, j), (i - 1, j - 1)):
            if 1 <= t[0] <= k and 1 <= t[1] <= m:
                Q.add_arrow((i, j), t)
    Q.add_arrow(EMPTY, (1, 1))
    labels = {v: rectangle_label(*(v or (0, 0)), k, n) for v in verts}
    panel = panel or Panel.positive(n, k)
    values = {v: panel.bracket_values(J) for v, J in labels.items()}
    return Seed(Q, {v: "".join(map(str, J)) if n < 10 else " ".join(map(str, J)) for v, J in labels.items()},
                values, panel)


def shifted_label(J: Sequence[int], n: int, shift: int) -> tuple:
    return tuple(sorted((x - 1 + shift) % n + 1 for x in J))


def cyc_mutation_order(k: int, n: int, direction: int) -> list:
    m = n - k
    if direction == 1:
        return [(i, j) for i in range(1, k) for j in range(m - 1, 0, -1)]
    if direction == -1:
        return [(i, j) for i in range(k - 1, 0, -1) for j in range(1, m)]
    raise SeedError("direction must be +1 or -1")


def cyc_mutation_sequence(S: Seed, direction: int = 1) -> Seed:
    """Mutate rows of a rectangles-shaped seed to reach the shifted seed."""
    verts = [v for v in S.quiver.vertices if v != EMPTY]
    if EMPTY not in S.quiver.vertices or not verts:
        raise SeedError("not a rectangles-shaped seed")
    k = max(v[0] for v in verts)
    m = max(v[1] for v in verts)
    for v in cyc_mutation_order(k, k + m, direction):
        S = S.mutate(v)
    return S


def check_shifted(S: Seed, k: int, n: int, shift: int) -> list:
    """Vertices whose panel differs from <J + shift> (frozens compared as a set)."""
    P = S.panel
    bad = []
    frozen_vals = set()
    for v in S.quiver.vertices:
        J = rectangle_label(*(v or (0, 0)), k, n)
        want = P.bracket_values(shifted_label(J, n, shift))
        if v in S.quiver.frozen:
            frozen_vals.add(want)
        elif S.values[v] != want:
            bad.append(v)
    have = {S.values[v] for v in S.quiver.frozen}
    if have != frozen_vals:
        bad.append("frozen")
    return bad


# ---------------------------------------------------------------- seed of a standard tile


def canonical_vertex(D: ChordDiagram, key: tuple) -> tuple:
    """beta_i of a sticky same-end child is the same variable as alpha of its parent."""
    fam, i = key
    if fam == "beta":
        R = chord_relations(D)
        p = R.sticky_parent(i)
        if p is not None and R.is_same_end(i, p):
            return ("alpha", p)
    return key


def sigma_D_arrows(D: ChordDiagram) -> list:
    """Arrows among domino variables as (u, v) on canonical vertices."""
    R = chord_relations(D)
    arrows = []

    def add(u, v):
        arrows.append((canonical_vertex(D, u), canonical_vertex(D, v)))

    for i in range(1, D.k + 1):
        j = R.left_h2t_sibling(i)
        if j is not None:
            add(("beta", i), ("delta", j))
            add(("gamma", j), ("beta", i))
            add(("beta", i), ("alpha", i))
        j = R.same_end_child(i)
        if j is not None:
            add(("epsilon", i), ("delta", i))
            add(("delta", i), ("gamma", i))
            add(("gamma", j), ("delta", i))
            add(("delta", j), ("epsilon", i))
            add(("delta", i), ("delta", j))
            add(("epsilon", i), ("epsilon", j))
        j = R.sticky_child(i)
        if j is not None:
            add(("epsilon", j), ("alpha", i))
            add(("beta", i), ("alpha", i))
            add(("alpha", i), ("alpha", j))
            if R.is_same_end(i, j):
                add(("alpha", i), ("epsilon", i))
    out = []
    for a in arrows:
        if a[0] == a[1]:
            raise SeedError(f"loop at {a[0]} in the seed of {D}")
        if (a[1], a[0]) in arrows:
            raise SeedError(f"opposite arrows between {a[0]} and {a[1]} in the seed of {D}")
        if a not in out:
            out.append(a)
    return out


def _four_windows(markers: Sequence[int], x: int) -> list:
    """The cyclically consecutive 4-subsets of markers containing x."""
    n = len(markers)
    p = markers.index(x)
    return [tuple(markers[(s + t) % n] for t in range(4)) for s in range(p - 3, p + 1)]


@dataclass
class ExtendedCluster:
    """x~(D) as a list with repeats (small subdiagrams contribute duplicates);
    notes flag undetermined rescalings."""

    exprs: list
    notes: list


@lru_cache(maxsize=1024)
def _extended(D: ChordDiagram) -> tuple:
    if len(D.markers) < 4:
        return ()
    if len(D.markers) == 4:
        return ((tw(*D.markers), ""),)
    if D.k == 0 or D.chord(D.k).d != D.penultimate:
        Dp = ChordDiagram([x for x in D.markers if x != D.penultimate], D.chords)
        return _extended(Dp) + tuple((_frozen(w), "") for w in _four_windows(D.markers, D.penultimate))
    a, b, c, d = D.chord(D.k)
    n = D.n
    N = list(D.markers)
    DL, DR = split_subdiagrams(D)
    ctx = PromotionContext(N, a, c)
    out = [(tw(a, c, d, n), ""), (tw(a, b, d, n), ""), (tw(a, b, c, n), ""), (tw(a, b, c, d), "")]
    for side, Ds in (("L", DL), ("R", DR)):
        for x, note in _extended(Ds):
            rp = rescaled_promote(x, ctx, side)
            out.append((rp.rescaled, note or rp.note))
    m1, m2 = N[0], N[1]
    prev_a = N[N.index(a) - 1]
    next_b = N[(N.index(b) + 1) % len(N)]
    out += [(_frozen((c, d, n, m1)), ""), (_frozen((d, n, m1, m2)), ""), (_frozen((prev_a, a, b, next_b)), "")]
    return tuple(out)


def _frozen(I) -> Expr:
    # frozen Pluckers are taken with sorted indices (positive on Gr>0)
    return tw(*sorted(I))


def extended_cluster(D: ChordDiagram) -> ExtendedCluster:
    items = _extended(D)
    return ExtendedCluster([e for e, _ in items], [s for _, s in items])


def _tile_signs(exprs: dict, D: ChordDiagram, samples: int, seed: int) -> dict:
    if not exprs:
        return {}
    P = Panel.tile(D, samples, seed)
    out = {}
    for key, e in exprs.items():
        try:
            out[key] = P.values(e).sign()
        except PanelZero:
            out[key] = 0
    return out


def build_sigma_D(D: ChordDiagram, panel: Panel | None = None, extras: bool = True,
                  sign_samples: int = 3, seed: int = 0) -> SignedSeed:
    """Signed seed on the domino variables of D plus the rest of x~(D) as frozens.

    Vertices are (family, i) for domino variables (aliases merged) and
    ("extra", r) for the remaining elements of the extended cluster. Signs of
    domino variables follow the combinatorial rule; signs of extras are sampled
    at points of the tile (0 when not constant there).
    """
    panel = panel or Panel.positive(D.markers, 4, 12, seed)
    table = {(v.family, v.index): v.expr for v in domino_variables(D)}
    mut, _ = partition_mutable_frozen(D)
    signs = domino_signs(D)
    verts, labels, values, sigma = [], {}, {}, {}
    for i in range(1, D.k + 1):
        for f in FAMILIES:
            key = (f, i)
            cv = canonical_vertex(D, key)
            if cv != key:
                continue
            verts.append(key)
            labels[key] = table[key].pretty()
            values[key] = panel.values(table[key])
            sigma[key] = signs[key]
    frozen = [v for v in verts if canonical_vertex(D, v) not in {canonical_vertex(D, m) for m in mut}]
    if extras:
        seen = set(values.values())
        ext = {}
        for e in extended_cluster(D).exprs:
            val = panel.values(e)
            if val in seen:
                continue
            seen.add(val)
            key = ("extra", len(ext) + 1)
            ext[key] = e
            verts.append(key)
            frozen.append(key)
            labels[key] = e.pretty()
            values[key] = val
        sigma.update(_tile_signs(ext, D, sign_samples, seed))
    Q = Quiver(verts, frozen, sigma_D_arrows(D))
    return SignedSeed(Q, labels, values, panel, sigma)


# ---------------------------------------------------------------- exchange relations


@dataclass
class ExchangeData:
    vertex: tuple
    case: str
    monomials: tuple  # two tuples of vertices, from the closed-form rule
    primed: Expr
    quiver_monomials: tuple = ()

    def to_json(self) -> dict:
        return {
            "vertex": _vname(self.vertex),
            "case": self.case,
            "relation": [[_vname(v) for v in mono] for mono in self.monomials],
            "primed": self.primed.pretty(),
        }


def _primed_chain(C: _Closed, s: int, clauses: list) -> Expr:
    e = chain(*clauses) if len(clauses) > 1 else tw(*clauses[0])
    return e if s > 0 else fn.neg(e)


def exchange_data_sigma_D(D: ChordDiagram) -> list[ExchangeData]:
    """One record per mutable vertex of the seed of D."""
    R = chord_relations(D)
    C = _Closed(D)
    ch = C.ch
    cv = lambda key: canonical_vertex(D, key)  # noqa: E731
    mut, _ = partition_mutable_frozen(D)
    mut = {cv(m) for m in mut}
    out = []
    for i in range(1, D.k + 1):
        ai, bi, ci, di = ch[i]
        if ("alpha", i) in mut:
            j = R.sticky_child(i)
            p = R.sticky_parent(i)
            m1 = [("epsilon", j)]
            if p is not None:
                m1.append(("alpha", p))
            if not (p is not None and R.is_same_end(i, p)):
                m1.append(("beta", i))
            m2 = [("alpha", j)]
            if R.is_same_end(i, j):
                m2.append(("epsilon", i))
            case = "R1" + ("+p" if p is not None else "") + ("+same-end" if R.is_same_end(i, j) else "")
            primed = tw(ai, D.next_marker(bi), ch[j].c, ch[j].d)
            out.append(ExchangeData(("alpha", i), case, _monos(m1, m2, cv), primed))
        if ("beta", i) in mut and cv(("beta", i)) == ("beta", i):
            j = R.left_h2t_sibling(i)
            aj, bj = ch[j].a, ch[j].b
            s, cl = C.right(j, [aj, bj, bi], True)
            out.append(ExchangeData(("beta", i), "R2", _monos([("gamma", j)], [("alpha", i), ("delta", j)], cv),
                                    _primed_chain(C, s, cl)))
        if ("delta", i) in mut:
            j = R.same_end_child(i)
            p = R.same_end_parent(i)
            ell = R.right_h2t_sibling(i)
            aj, bj = ch[j].a, ch[j].b
            m1 = [("gamma", j), ("epsilon", i)]
            m2 = [("gamma", i), ("delta", j)]
            if p is not None:
                m1.append(("delta", p))
                m2.append(("epsilon", p))
            if ell is not None:
                m1.append(("beta", ell))
            if ell is not None and p is not None:
                raise SeedError(f"chord {i} has both a same-end parent and a right head-to-tail sibling")
            if ell is not None:
                case = "R3a-ii"
                primed = C.both(j, [[aj, bj], [ch[ell].a, ch[ell].b], [ch[ell].c, ch[ell].d]], ell)
            elif p is not None:
                case = "R3a-iii"
                s1, head = C.left(p, [ch[p].a, ch[p].b], True)
                s2, tail = C.right(j, [bj, aj], True)
                primed = _primed_chain(C, s1 * s2, head + [[ci, di]] + tail)
            elif C.sticky(j):
                case = "R3a-i-sticky"
                primed = tw(C.prev(aj), aj, bj, di)
            else:
                case = "R3a-i"
                s, tail = C.right(j, [ci, di], False)
                primed = _primed_chain(C, s, [[ai, bi, di], [aj, bj]] + tail)
            out.append(ExchangeData(("delta", i), case, _monos(m1, m2, cv), primed))
        if ("epsilon", i) in mut:
            j = R.same_end_child(i)
            p = R.parent[i]
            m1 = [("delta", j)]
            m2 = [("delta", i), ("epsilon", j)]
            tags = []
            if C.sticky(j):
                m1.append(("alpha", i))
                tags.append("sticky-child")
            if R.same_end_parent(i) is not None:
                m1.append(("epsilon", p))
                tags.append("same-end-parent")
            if R.sticky_parent(i) is not None:
                m2.append(("alpha", R.sticky_parent(i)))
                tags.append("sticky-parent")
            s, cl = C.right(i, [ch[j].a, ch[j].b, ci], False)
            out.append(ExchangeData(("epsilon", i), "R3b" + "".join("+" + t for t in tags),
                                    _monos(m1, m2, cv), _primed_chain(C, s, cl)))
    return out


def _monos(m1, m2, cv) -> tuple:
    return (tuple(sorted(cv(v) for v in m1)), tuple(sorted(cv(v) for v in m2)))


def quiver_relation(S: Seed, v) -> tuple:
    """The two exchange monomials read off the quiver, as sorted vertex tuples."""
    def expand(d):
        return tuple(sorted(u for u, m in d.items() for _ in range(m)))
    return expand(S.quiver.out_arrows(v)), expand(S.quiver.in_arrows(v))


def same_relation(r1: tuple, r2: tuple) -> bool:
    return sorted(r1) == sorted(r2)


@dataclass
class ExchangeCheck:
    vertex: tuple
    case: str
    quiver_matches: bool
    identity_holds: bool
    primed_sign_ok: bool

    @property
    def ok(self) -> bool:
        return self.quiver_matches and self.identity_holds and self.primed_sign_ok


def check_exchange_relations(D: ChordDiagram, panel: Panel | None = None, seed: int = 0) -> list[ExchangeCheck]:
    """For every mutable vertex: quiver relation = closed-form relation, and
    x * x' = M1 + M2 exactly on the panel with x' the primed chain polynomial.
    The mutated sign (signed-seed rule) must match x' at points of the tile.
    """
    S = build_sigma_D(D, panel, extras=False, seed=seed)
    P = S.panel
    tile = Panel.tile(D, 3, seed)
    table = {(v.family, v.index): v.expr for v in domino_variables(D)}
    out = []
    for ex in exchange_data_sigma_D(D):
        qrel = quiver_relation(S, ex.vertex)
        lhs = S.values[ex.vertex] * P.values(ex.primed)
        rhs = _prod(S, ex.monomials[0]) + _prod(S, ex.monomials[1])
        holds = lhs == rhs
        if holds and P.kind == "positive":
            Q = P.fresh()
            lhs2 = Q.values(fn.mul(table[ex.vertex], ex.primed))
            rhs2 = Q.values(fn.add(_expr_prod(table, ex.monomials[0]), _expr_prod(table, ex.monomials[1])))
            holds = lhs2 == rhs2
        want = S.sigma[ex.vertex] * S.in_sign(ex.vertex)
        got = tile.values(ex.primed).signs()
        out.append(ExchangeCheck(ex.vertex, ex.case, same_relation(qrel, ex.monomials), holds,
                                 all(g == want for g in got)))
    return out


def _prod(S: Seed, vs) -> ValuePanel:
    out = ValuePanel.one(S.size)
    for v in vs:
        out = out * S.values[v]
    return out


def _expr_prod(table: dict, vs) -> Expr:
    return fn.mul(*[table[v] for v in vs]) if vs else fn.ONE


# ---------------------------------------------------------------- top-chord identities


def top_chord_identities(i: Sequence[int], j: Sequence[int], n: int) -> dict:
    """Three-term Plucker identities for a top chord D_i and a child or sibling D_j.

    Only the identities whose index pattern fits (i, j) are returned:
    sticky child (R1, or R1' when it also shares the end), head-to-tail left
    sibling (R2), same-end child (R3a and R3b, or R3a' and R3b' when sticky).
    Each value is (lhs, rhs).
    """
    ai, bi, ci, di = i
    aj, bj, cj, dj = j
    T = tw
    out = {}
    sticky = aj == bi
    same_end = (cj, dj) == (ci, di)
    if sticky and not same_end:
        out["R1"] = (fn.mul(T(bi, ci, di, n), T(ai, bj, cj, dj)),
                     fn.add(fn.mul(T(ai, ci, di, n), T(bi, bj, cj, dj)), chain([bj, cj, dj], [bi, ai], [ci, di, n])))
    if sticky and same_end:
        out["R1'"] = (fn.mul(T(bi, ci, di, n), T(ai, bj, ci, di)),
                      fn.add(fn.mul(T(ai, ci, di, n), T(bi, bj, ci, di)), fn.mul(T(bj, ci, di, n), T(ai, bi, ci, di))))
    if (cj, dj) == (ai, bi):
        out["R2"] = (fn.mul(T(ai, ci, di, n), T(aj, bj, bi, n)),
                     fn.add(chain([aj, bj, n], [ai, bi], [ci, di, n]), fn.mul(T(bi, ci, di, n), T(aj, bj, ai, n))))
    if same_end and not sticky:
        out["R3a"] = (fn.mul(T(ai, bi, ci, n), chain([ai, bi, di], [aj, bj], [ci, di, n])),
                      fn.add(fn.mul(chain([aj, bj, n], [ci, di], [ai, bi, n]), T(ai, bi, ci, di)),
                             fn.mul(T(ai, bi, di, n), chain([aj, bj, ci], [bi, ai], [ci, di, n]))))
        out["R3b"] = (fn.mul(T(ai, bi, ci, di), T(aj, bj, ci, n)),
                      fn.add(chain([aj, bj, ci], [bi, ai], [ci, di, n]), fn.mul(T(ai, bi, ci, n), T(aj, bj, ci, di))))
    if same_end and sticky:
        out["R3a'"] = (fn.mul(T(ai, bi, ci, n), T(ai, bi, bj, di)),
                       fn.add(fn.mul(T(ai, bi, bj, n), T(ai, bi, ci, di)), fn.mul(T(ai, bi, di, n), T(ai, bi, bj, ci))))
        out["R3b'"] = (fn.mul(T(ai, bi, ci, di), T(bi, bj, ci, n)),
                       fn.add(fn.mul(T(ai, bi, bj, ci), T(bi, ci, di, n)), fn.mul(T(ai, bi, ci, n), T(bi, bj, ci, di))))
    return out


def seed_json(S: SignedSeed) -> dict:
    return S.to_json()


def panel_collisions(labels: Sequence[int], trials: int, panel: Panel | None = None, seed: int = 0) -> int:
    """Random pairs of distinct 4-subsets with equal panels (should be 0)."""
    panel = panel or Panel.positive(labels, 4, 12, seed)
    rng = rng_for(seed, 0, "collisions")
    labels = list(labels)
    hits = 0
    for _ in range(trials):
        I = tuple(sorted(rng.sample(labels, 4)))
        J = tuple(sorted(rng.sample(labels, 4)))
        if I != J and panel.bracket_values(I) == panel.bracket_values(J):
            hits += 1
    return hits
