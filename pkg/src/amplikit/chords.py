"""Chord diagrams on ordered marker sets."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, NamedTuple, Sequence


class Chord(NamedTuple):
    a: int
    b: int
    c: int
    d: int


def _chord_sort_key(ch: Chord):
    # by end; among same-end chords the inner one (later start) comes first
    return (ch.c, -ch.a)


@dataclass(frozen=True)
class ChordDiagram:
    markers: tuple
    chords: tuple

    def __init__(self, markers: Iterable[int], chords: Iterable[Sequence[int]] = ()):
        markers = tuple(sorted(int(x) for x in markers))
        chs = tuple(sorted((Chord(*map(int, ch)) for ch in chords), key=_chord_sort_key))
        object.__setattr__(self, "markers", markers)
        object.__setattr__(self, "chords", chs)

    @property
    def n(self) -> int:
        return self.markers[-1]

    @property
    def k(self) -> int:
        return len(self.chords)

    def chord(self, i: int) -> Chord:
        """Chord D_i, 1-based in the canonical order."""
        return self.chords[i - 1]

    @property
    def penultimate(self) -> int:
        return self.markers[-2]

    def rightmost_top(self) -> int:
        return self.k

    def next_marker(self, x: int) -> int | None:
        i = self.markers.index(x)
        return self.markers[i + 1] if i + 1 < len(self.markers) else None

    def to_json(self) -> dict:
        return {"markers": list(self.markers), "chords": [list(ch) for ch in self.chords]}

    @classmethod
    def from_json(cls, data) -> "ChordDiagram":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["markers"], data["chords"])

    @classmethod
    def on_range(cls, n: int, chords: Iterable[Sequence[int]] = ()) -> "ChordDiagram":
        return cls(range(1, n + 1), chords)

    def relabel(self, mapping) -> "ChordDiagram":
        """Apply an order isomorphism of marker sets."""
        return ChordDiagram([mapping[x] for x in self.markers],
                            [[mapping[x] for x in ch] for ch in self.chords])

    def __repr__(self) -> str:
        chs = ",".join("(" + ",".join(map(str, ch)) + ")" for ch in self.chords)
        return f"ChordDiagram(N={list(self.markers)}, {{{chs}}})"


def validate_diagram(D: ChordDiagram) -> list[str]:
    """Empty list when D is a valid chord diagram, otherwise named violations."""
    out = []
    N = D.markers
    pos = {x: i for i, x in enumerate(N)}
    if len(N) < 1:
        return ["empty-marker-set"]
    for idx, ch in enumerate(D.chords, 1):
        if any(x not in pos for x in ch):
            out.append(f"unknown-marker: D_{idx}={tuple(ch)}")
            continue
        if not (ch.a < ch.b < ch.c < ch.d):
            out.append(f"order: D_{idx}={tuple(ch)} is not a<b<c<d")
            continue
        if pos[ch.b] != pos[ch.a] + 1 or pos[ch.d] != pos[ch.c] + 1:
            out.append(f"not-consecutive: D_{idx}={tuple(ch)}")
        if pos[ch.c] <= pos[ch.b]:
            out.append(f"start-end-adjacent: D_{idx}={tuple(ch)}")
        if pos[ch.d] > len(N) - 2:
            out.append(f"end-after-penultimate: D_{idx}={tuple(ch)}")
    if out:
        return out
    chs = D.chords
    for i in range(len(chs)):
        for j in range(len(chs)):
            if i == j:
                continue
            p, q = chs[i], chs[j]
            if i < j and p.a == q.a:
                out.append(f"shared-start: D_{i + 1}, D_{j + 1}")
            if p.a < q.a < p.c < q.c:
                out.append(f"crossing: D_{i + 1}, D_{j + 1}")
    return out


def is_valid(D: ChordDiagram) -> bool:
    return not validate_diagram(D)


def narayana_count(n: int, k: int) -> int:
    """Number of chord diagrams on n markers with k chords."""
    if k == 0:
        return 1 if n >= 0 else 0
    if n < 4:
        return 0
    return comb(n - 4, k) * comb(n - 3, k) // (k + 1)


def enumerate_diagrams(N: Iterable[int] | int, k: int) -> list[ChordDiagram]:
    """All chord diagrams with k chords on marker set N (or [N] for an int)."""
    if isinstance(N, int):
        N = range(1, N + 1)
    N = tuple(sorted(N))
    m = len(N)
    if k == 0:
        return [ChordDiagram(N)]
    # start segment s uses (N[s], N[s+1]); end segment e uses (N[e], N[e+1])
    # with e >= s + 2 and e + 1 <= m - 2
    results = []

    def extend(start_from: int, chosen: list):
        if len(chosen) == k:
            results.append(ChordDiagram(N, [(N[s], N[s + 1], N[e], N[e + 1]) for s, e in chosen]))
            return
        if k - len(chosen) > (m - 3) - start_from:
            return
        for s in range(start_from, m - 4 + 1):
            for e in range(s + 2, m - 2):
                # earlier chords start before s: forbid a_i < s < c_i < e
                if any(si < s < ei < e for si, ei in chosen):
                    continue
                chosen.append((s, e))
                extend(s + 1, chosen)
                chosen.pop()

    extend(0, [])
    results.sort(key=lambda D: [tuple(ch) for ch in D.chords])
    return results


@dataclass
class ChordRelations:
    k: int
    parent: dict = field(default_factory=dict)
    ancestors: dict = field(default_factory=dict)
    children: dict = field(default_factory=dict)
    is_top: dict = field(default_factory=dict)
    siblings: set = field(default_factory=set)  # frozenset pairs
    same_end: set = field(default_factory=set)  # frozenset pairs
    head_to_tail: set = field(default_factory=set)  # (i, j): D_i ends where D_j starts
    sticky: set = field(default_factory=set)  # (p, j): D_j starts right after D_p
    after: dict = field(default_factory=dict)
    below: dict = field(default_factory=dict)
    sticky_stat: dict = field(default_factory=dict)
    nonsticky: dict = field(default_factory=dict)

    # convenience queries used by the domino and seed modules
    def is_sibling(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.siblings

    def is_same_end(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.same_end

    def sticky_parent(self, i: int) -> int | None:
        """p when D_i is a sticky child of D_p (D_p is then the parent)."""
        for p, j in self.sticky:
            if j == i:
                return p
        return None

    def sticky_child(self, i: int) -> int | None:
        for p, j in self.sticky:
            if p == i:
                return j
        return None

    def same_end_parent(self, i: int) -> int | None:
        p = self.parent[i]
        return p if p is not None and self.is_same_end(i, p) else None

    def same_end_child(self, i: int) -> int | None:
        for j in self.children[i]:
            if self.is_same_end(i, j):
                return j
        return None

    def left_h2t_sibling(self, i: int) -> int | None:
        """j with D_j ending where D_i starts, D_j a sibling of D_i."""
        for j, t in self.head_to_tail:
            if t == i and self.is_sibling(i, j):
                return j
        return None

    def right_h2t_sibling(self, i: int) -> int | None:
        for s, j in self.head_to_tail:
            if s == i and self.is_sibling(i, j):
                return j
        return None

    def to_json(self) -> dict:
        return {
            "parent": {str(i): p for i, p in self.parent.items()},
            "ancestors": {str(i): list(v) for i, v in self.ancestors.items()},
            "children": {str(i): list(v) for i, v in self.children.items()},
            "top": [i for i, t in self.is_top.items() if t],
            "siblings": sorted(sorted(p) for p in self.siblings),
            "same_end": sorted(sorted(p) for p in self.same_end),
            "head_to_tail": sorted(list(p) for p in self.head_to_tail),
            "sticky": sorted(list(p) for p in self.sticky),
            "after": {str(i): v for i, v in self.after.items()},
            "below": {str(i): v for i, v in self.below.items()},
            "sticky_stat": {str(i): v for i, v in self.sticky_stat.items()},
        }


def chord_relations(D: ChordDiagram) -> ChordRelations:
    errs = validate_diagram(D)
    if errs:
        raise ValueError(f"invalid chord diagram: {errs}")
    k = D.k
    R = ChordRelations(k)
    ch = {i: D.chord(i) for i in range(1, k + 1)}

    def above(j, i):
        return ch[j].a < ch[i].a and ch[i].c <= ch[j].c

    for i in ch:
        anc = sorted((j for j in ch if j != i and above(j, i)), key=lambda j: -ch[j].a)
        R.ancestors[i] = tuple(anc)
        R.parent[i] = anc[0] if anc else None
        R.is_top[i] = not anc
    for i in ch:
        R.children[i] = tuple(j for j in ch if R.parent[j] == i)
    for i in ch:
        for j in ch:
            if i >= j:
                continue
            if R.parent[i] == R.parent[j]:
                R.siblings.add(frozenset((i, j)))
            if ch[i].c == ch[j].c:
                R.same_end.add(frozenset((i, j)))
    for i in ch:
        for j in ch:
            if i != j and ch[i].c == ch[j].a:
                R.head_to_tail.add((i, j))
            if i != j and ch[i].b == ch[j].a:
                R.sticky.add((i, j))
    for i in ch:
        R.after[i] = sum(1 for j in ch if ch[i].a <= ch[j].a)
        R.below[i] = sum(1 for j in ch if ch[i].a < ch[j].a < ch[j].c <= ch[i].c)
        R.sticky_stat[i] = sum(1 for j in ch if ch[j].b == ch[i].a)
        R.nonsticky[i] = 1 - R.sticky_stat[i]
    return R


def split_subdiagrams(D: ChordDiagram) -> tuple[ChordDiagram, ChordDiagram]:
    """Left and right subdiagrams around the rightmost top chord."""
    if D.k == 0:
        raise ValueError("chordless diagram has no rightmost top chord")
    a, b, c, d = D.chord(D.k)
    if d != D.penultimate:
        raise ValueError(f"rightmost top chord ends at {d}, penultimate marker is {D.penultimate}")
    n = D.n
    NL = [x for x in D.markers if x <= b] + [n]
    NR = [x for x in D.markers if b <= x <= d] + [n]
    left, right = [], []
    for ch in D.chords[:-1]:
        (right if ch.a >= b else left).append(ch)
    return ChordDiagram(NL, left), ChordDiagram(NR, right)
