"""Domino cluster variables of standard BCFW tiles.

Two independent constructions are provided: the closed chain-polynomial
formulas (built from the chord relations) and the recursion through rescaled
product promotion. Tests compare them on value panels.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .cells import Recipe
from .chords import ChordDiagram, chord_relations, split_subdiagrams
from .functionary import Expr, chain, tw
from .promotion import PromotionContext, rescaled_promote

FAMILIES = ("alpha", "beta", "gamma", "delta", "epsilon")


@dataclass(frozen=True)
class DominoVariable:
    family: str
    index: int
    expr: Expr

    @property
    def name(self) -> str:
        return f"{self.family}_{self.index}"

    def pretty(self) -> str:
        return self.expr.pretty()


def _chain_expr(sign: int, clauses) -> Expr:
    e = chain(*clauses) if len(clauses) > 1 else tw(*clauses[0])
    return e if sign > 0 else -e


class _Closed:
    """Closed chain-polynomial formulas for one diagram."""

    def __init__(self, D: ChordDiagram):
        self.D = D
        self.R = chord_relations(D)
        self.n = D.n
        self.ch = {i: D.chord(i) for i in range(1, D.k + 1)}

    def prev(self, x: int) -> int:
        i = self.D.markers.index(x)
        if i == 0:
            raise ValueError(f"no marker before {x}")
        return self.D.markers[i - 1]

    def sticky(self, i: int) -> bool:
        return self.R.sticky_parent(i) is not None

    def up_chain(self, i: int, end: tuple) -> list:
        """Ancestors of D_i met by the arrow, lowest first."""
        out = []
        cur = set(end)
        for j in self.R.ancestors[i]:
            a, b, c, d = self.ch[j]
            if {c, d} == cur:
                continue
            out.append(j)
            cur = {c, d}
        return out

    def right(self, i: int, last: list, dashed: bool) -> tuple[int, list]:
        """Close the final clause with the arrow of D_i towards n."""
        if dashed and self.sticky(i):
            return -1, [last + [self.prev(self.ch[i].a)]]
        ups = self.up_chain(i, tuple(last[-2:]))
        if not ups:
            return 1, [last + [self.n]]
        cl = [last]
        for r, j in enumerate(ups):
            a, b, c, d = self.ch[j]
            cl.append([b, a])
            cl.append([c, d, self.n] if r == len(ups) - 1 else [c, d])
        return 1, cl

    def left(self, i: int, first: list, dashed: bool) -> tuple[int, list]:
        if dashed and self.sticky(i):
            return -1, [[self.prev(self.ch[i].a)] + first]
        ups = self.up_chain(i, tuple(first[:2]))
        if not ups:
            return 1, [[self.n] + first]
        cl = []
        for r, j in reversed(list(enumerate(ups))):
            a, b, c, d = self.ch[j]
            cl.append([self.n, c, d] if r == len(ups) - 1 else [c, d])
            cl.append([b, a])
        return 1, cl + [first]

    def both(self, li: int, middle: list, ri: int) -> Expr:
        s1, head = self.left(li, middle[0], True)
        if len(middle) == 1:
            # one clause closed on both sides is impossible for these formulas
            raise ValueError("middle needs at least two clauses")
        s2, tail = self.right(ri, middle[-1], False)
        return _chain_expr(s1 * s2, head + middle[1:-1] + tail)

    def one_sided(self, i: int, clause: list, dashed: bool) -> Expr:
        s, cl = self.right(i, clause, dashed)
        return _chain_expr(s, cl)

    def variables(self) -> dict:
        R = self.R
        out = {}
        for i, (a, b, c, d) in self.ch.items():
            out[("alpha", i)] = self.one_sided(i, [b, c, d], False)
        for i, (a, b, c, d) in self.ch.items():
            p = R.sticky_parent(i)
            if p is not None and R.is_same_end(i, p):
                out[("beta", i)] = out[("alpha", p)]
            else:
                out[("beta", i)] = self.one_sided(i, [a, c, d], True)
            j = R.right_h2t_sibling(i)
            p = R.same_end_parent(i)
            if j is not None:
                cj, dj = self.ch[j].c, self.ch[j].d
                out[("gamma", i)] = self.both(i, [[a, b], [c, d], [cj, dj]], j)
            elif p is not None and not self.sticky(i):
                ap, bp = self.ch[p].a, self.ch[p].b
                out[("gamma", i)] = self.both(p, [[ap, bp], [a, b], [c, d]], i)
            elif p is not None:
                s, cl = self.left(p, [b, a, self.prev(a)], True)
                out[("gamma", i)] = _chain_expr(s, cl)
            else:
                out[("gamma", i)] = self.one_sided(i, [a, b, d], True)
            out[("delta", i)] = self.one_sided(i, [a, b, c], True)
            out[("epsilon", i)] = tw(a, b, c, d)
        return out


def _ordered(D: ChordDiagram, table: dict) -> list[DominoVariable]:
    return [DominoVariable(f, i, table[(f, i)]) for i in range(1, D.k + 1) for f in FAMILIES]


def domino_variables(D: ChordDiagram, mode: str = "closed_form") -> list[DominoVariable]:
    """5k domino variables ordered by chord, then alpha..epsilon."""
    if mode == "closed_form":
        return _ordered(D, _Closed(D).variables())
    if mode == "recursive":
        table = _recursive(D)
        ch = {tuple(D.chord(i)): i for i in range(1, D.k + 1)}
        return _ordered(D, {(f, ch[c]): e for (f, c), e in table.items()})
    raise ValueError(f"unknown mode {mode!r}; use closed_form or recursive")


@lru_cache(maxsize=2048)
def _recursive(D: ChordDiagram) -> dict:
    """Variables keyed by (family, chord tuple) from the recursive definition."""
    if D.k == 0:
        return {}
    a, b, c, d = D.chord(D.k)
    if d != D.penultimate:
        Dp = ChordDiagram([x for x in D.markers if x != D.penultimate], D.chords)
        return _recursive(Dp)
    n = D.n
    DL, DR = split_subdiagrams(D)
    ctx = PromotionContext(D.markers, a, c)
    out = {}
    for side, Ds in (("L", DL), ("R", DR)):
        for key, x in _recursive(Ds).items():
            out[key] = rescaled_promote(x, ctx, side).rescaled
    top = (a, b, c, d)
    for fam, idx in zip(FAMILIES, ((b, c, d, n), (a, c, d, n), (a, b, d, n), (a, b, c, n), (a, b, c, d))):
        out[(fam, top)] = tw(*idx)
    return out


def promotion_monomials(D: ChordDiagram) -> dict:
    """For the last product of D: the T' monomial stripped from each child variable."""
    a, b, c, d = D.chord(D.k)
    if d != D.penultimate:
        raise ValueError("rightmost top chord must end at the penultimate marker")
    DL, DR = split_subdiagrams(D)
    ctx = PromotionContext(D.markers, a, c)
    out = {}
    for side, Ds in (("L", DL), ("R", DR)):
        for key, x in _recursive(Ds).items():
            out[key] = rescaled_promote(x, ctx, side).monomial
    return out


def domino_signs(D: ChordDiagram) -> dict:
    """Sign of each domino variable on the open tile, by the combinatorial rule."""
    R = chord_relations(D)

    def sg(e):
        return -1 if e % 2 else 1

    out = {}
    for i in range(1, D.k + 1):
        out[("alpha", i)] = sg(R.after[i] + 1)
    for i in range(1, D.k + 1):
        af, be, ns, st = R.after[i], R.below[i], R.nonsticky[i], R.sticky_stat[i]
        p = R.sticky_parent(i)
        if p is not None and R.is_same_end(i, p):
            out[("beta", i)] = out[("alpha", p)]
        else:
            out[("beta", i)] = sg(af * ns)
        q = R.same_end_parent(i)
        if R.right_h2t_sibling(i) is not None:
            out[("gamma", i)] = sg(af * st)
        elif q is not None:
            out[("gamma", i)] = sg(af * st + R.after[q] * R.sticky_stat[q] + 1)
        else:
            out[("gamma", i)] = sg(af * ns + be + 1)
        out[("delta", i)] = sg(af * ns + be)
        out[("epsilon", i)] = 1
    return out


def partition_mutable_frozen(D: ChordDiagram) -> tuple[set, set]:
    """(Mut, AFacet) as sets of (family, index)."""
    R = chord_relations(D)
    mut = set()
    for i in range(1, D.k + 1):
        if R.sticky_child(i) is not None:
            mut.add(("alpha", i))
        p = R.sticky_parent(i)
        starts_at_end = any(t == i for _, t in R.head_to_tail)
        if starts_at_end or (p is not None and R.is_same_end(i, p)):
            mut.add(("beta", i))
        if R.same_end_child(i) is not None:
            mut.add(("delta", i))
            mut.add(("epsilon", i))
    every = {(f, i) for i in range(1, D.k + 1) for f in FAMILIES}
    return mut, every - mut


def coordinate_cluster_variables(r: Recipe) -> list[Expr]:
    """Irr(r): 5k Plucker-side variables in parameter order."""
    return list(_ccv(r))


@lru_cache(maxsize=4096)
def _ccv(r: Recipe) -> tuple:
    from .amplituhedron import transport
    st = r.step
    if st is None:
        return ()
    if st.prod is None:
        F = list(_ccv(r.left))
    else:
        a, b, c, d, n = st.prod
        N = [x for x in r.markers if x not in st.pre]
        ctx = PromotionContext(N, a, c)
        F = [rescaled_promote(f, ctx, "L").rescaled for f in _ccv(r.left)]
        F += [rescaled_promote(f, ctx, "R").rescaled for f in _ccv(r.right)]
        F += [tw(b, c, d, n), tw(a, c, d, n), tw(a, b, d, n), tw(a, b, c, n), tw(a, b, c, d)]
    return tuple(transport(F, r.markers, r.k, st.cyc, st.refl, signs=False))

