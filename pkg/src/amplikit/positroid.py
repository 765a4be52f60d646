"""Positroids as explicit basis sets, and the combinatorial operations on them."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

EXCHANGE_CHECK_LIMIT = 400


@dataclass(frozen=True)
class DecoratedPermutation:
    """pi as a tuple over the ordered ground set, plus fixed-point colours."""

    ground: tuple
    image: tuple  # image[i] = pi(ground[i])
    loops: frozenset  # fixed points coloured black
    coloops: frozenset  # fixed points coloured white

    def __call__(self, x: int) -> int:
        return self.image[self.ground.index(x)]

    @property
    def k(self) -> int:
        """Number of anti-excedances: pi^-1(i) > i, plus white fixed points."""
        pos = {x: i for i, x in enumerate(self.ground)}
        inv = {y: x for x, y in zip(self.ground, self.image)}
        return sum(1 for x in self.ground if pos[inv[x]] > pos[x]) + len(self.coloops)

    def as_tuple(self) -> tuple:
        return self.image

    def to_json(self) -> dict:
        return {"ground": list(self.ground), "pi": list(self.image),
                "loops": sorted(self.loops), "coloops": sorted(self.coloops)}

    def __str__(self) -> str:
        marks = []
        for x, y in zip(self.ground, self.image):
            s = str(y)
            if x in self.loops:
                s += "b"
            elif x in self.coloops:
                s += "w"
            marks.append(s)
        return "(" + ",".join(marks) + ")"


class Positroid:
    """Rank-k matroid on an ordered ground set, stored by its bases."""

    __slots__ = ("k", "ground", "bases", "_key")

    def __init__(self, k: int, ground: Iterable[int], bases: Iterable[Iterable[int]], check=None):
        ground = tuple(sorted(ground))
        bs = frozenset(tuple(sorted(b)) for b in bases)
        if not bs:
            raise ValueError("a positroid needs at least one basis")
        gset = set(ground)
        for b in bs:
            if len(b) != k or not set(b) <= gset or len(set(b)) != k:
                raise ValueError(f"bad basis {b} for rank {k} on {ground}")
        self.k = k
        self.ground = ground
        self.bases = bs
        self._key = None
        if check is None:
            check = len(bs) <= EXCHANGE_CHECK_LIMIT
        if check and not self.satisfies_exchange():
            raise ValueError("basis exchange axiom fails")

    def satisfies_exchange(self) -> bool:
        bs = [frozenset(b) for b in self.bases]
        lookup = set(bs)
        for B1 in bs:
            for B2 in bs:
                for x in B1 - B2:
                    if not any((B1 - {x}) | {y} in lookup for y in B2 - B1):
                        return False
        return True

    def key(self) -> tuple:
        """Canonical cell key: (ground, k, sorted bases)."""
        if self._key is None:
            self._key = (self.ground, self.k, tuple(sorted(self.bases)))
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Positroid) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Positroid(k={self.k}, ground={list(self.ground)}, {len(self.bases)} bases)"

    def __contains__(self, basis) -> bool:
        return tuple(sorted(basis)) in self.bases

    # structure
    def loops(self) -> frozenset:
        used = set().union(*map(set, self.bases))
        return frozenset(x for x in self.ground if x not in used)

    def coloops(self) -> frozenset:
        return frozenset(x for x in self.ground if all(x in b for b in self.bases))

    def lex_min_basis(self, start: int) -> tuple:
        """Greedy basis for the cyclic order starting at ``start``."""
        g = self.ground
        i0 = g.index(start)
        order = g[i0:] + g[:i0]
        rank = {x: r for r, x in enumerate(order)}
        return min(self.bases, key=lambda b: sorted(rank[x] for x in b))

    def grassmann_necklace(self) -> list:
        return [self.lex_min_basis(x) for x in self.ground]

    def decorated_permutation(self) -> DecoratedPermutation:
        g = self.ground
        neck = [set(b) for b in self.grassmann_necklace()]
        m = len(g)
        image = []
        loops, coloops = set(), set()
        for i, x in enumerate(g):
            cur, nxt = neck[i], neck[(i + 1) % m]
            if x in cur:
                new = nxt - (cur - {x})
                (y,) = new if len(new) == 1 else (x,)
                image.append(y)
                if y == x:
                    coloops.add(x)
            else:
                image.append(x)
                loops.add(x)
        return DecoratedPermutation(g, tuple(image), frozenset(loops), frozenset(coloops))

    def to_json(self) -> dict:
        return {"k": self.k, "ground": list(self.ground), "bases": [list(b) for b in sorted(self.bases)]}


def positroid_from_support(k: int, ground: Sequence[int], support: Iterable) -> Positroid:
    return Positroid(k, ground, support, check=False)


def trivial_positroid(ground: Iterable[int]) -> Positroid:
    return Positroid(0, ground, [()])


# operations mirroring the matrix ones

def relabel(P: Positroid, mapping) -> Positroid:
    return Positroid(P.k, [mapping[x] for x in P.ground],
                     [[mapping[x] for x in b] for b in P.bases], check=False)


def pre(P: Positroid, I: Iterable[int]) -> Positroid:
    I = set(I)
    if I & set(P.ground):
        raise ValueError("pre: labels already present")
    return Positroid(P.k, list(P.ground) + sorted(I), P.bases, check=False)


def cyc(P: Positroid, times: int = 1) -> Positroid:
    g = P.ground
    m = len(g)
    if m == 0:
        return P
    shift = {x: g[(i + times) % m] for i, x in enumerate(g)}
    return Positroid(P.k, g, [[shift[x] for x in b] for b in P.bases], check=False)


def refl(P: Positroid) -> Positroid:
    g = P.ground
    m = len(g)
    flip = {x: g[m - 1 - i] for i, x in enumerate(g)}
    return Positroid(P.k, g, [[flip[x] for x in b] for b in P.bases], check=False)


def bridge(P: Positroid, i: int, j: int) -> Positroid:
    """Bases after column i += t * column j (t > 0) on a nonnegative point."""
    new = set(P.bases)
    for b in P.bases:
        if j in b and i not in b:
            new.add(tuple(sorted((set(b) - {j}) | {i})))
    return Positroid(P.k, P.ground, new, check=False)


def is_coindependent(J: Iterable[int], P: Positroid) -> bool:
    if P.k == 0:
        return True
    J = set(J)
    return any(not (J & set(b)) for b in P.bases)


def butterfly_positroid(PL: Positroid, PR: Positroid, indices, check=True) -> Positroid:
    """Bases of the BCFW product, built from the six-row table."""
    a, b, c, d, n = indices
    if not is_coindependent({a, b, n}, PL):
        raise ValueError(f"{{a,b,n}}={{{a},{b},{n}}} is not coindependent for the left positroid")
    if not is_coindependent({b, c, d, n}, PR):
        raise ValueError("{b,c,d,n} is not coindependent for the right positroid")
    PLp = bridge(PL, a, b)
    PRp = bridge(bridge(PR, d, n), c, d)
    bases = set()

    def add(IL, f, IR):
        IL, IR = set(IL), set(IR)
        if IL & IR or f in IL or f in IR:
            return
        bases.add(tuple(sorted(IL | IR | {f})))

    for IL in PL.bases:
        for IR in PRp.bases:
            if b not in IL:
                add(IL, a, IR)
            add(IL, b, IR)
    PRset = PR.bases
    for IL in PLp.bases:
        for IR in PR.bases:
            # rows (3) and (4): the right orientation has both d and n as sinks
            if n not in IR:
                if d not in IR:
                    add(IL, c, IR)
                add(IL, d, IR)
            add(IL, n, IR)
        # row (6): I_R holds c but not d, and the c -> d swap is a basis of P_R
        for IR in PRset:
            if d in IR and c not in IR:
                add(IL, n, (set(IR) - {d}) | {c})
    ground = sorted(set(PL.ground) | set(PR.ground))
    return Positroid(PL.k + PR.k + 1, ground, bases, check=False if not check else None)


def uniform(k: int, ground: Iterable[int]) -> Positroid:
    ground = tuple(sorted(ground))
    return Positroid(k, ground, combinations(ground, k), check=False)
