"""Plabic graphs in a disk, with an explicit rotation system.

Vertex ids are strings. Boundary vertex ``b{label}`` sits on the circle, and
the labels run clockwise. ``rotation[v]`` lists the edge ids at v in clockwise
order. Trips turn maximally right at black vertices (predecessor in the
clockwise list) and maximally left at white ones (successor).
"""
from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .exact import RationalMatrix, plucker_coordinates
from .positroid import DecoratedPermutation, Positroid

BLACK, WHITE = "black", "white"


class PlabicError(ValueError):
    pass


def bid(label: int) -> str:
    return f"b{label}"


class PlabicGraph:
    """Bicoloured graph embedded in a disk."""

    def __init__(self, boundary: Iterable[int], colors: dict, edges: dict, rotation: dict):
        self.boundary = tuple(sorted(boundary))
        self.colors = dict(colors)  # internal vertex -> colour
        self.edges = {int(e): tuple(uv) for e, uv in edges.items()}
        self.rotation = {v: list(r) for v, r in rotation.items()}
        self._check()

    # construction helpers
    def copy(self) -> "PlabicGraph":
        return PlabicGraph(self.boundary, self.colors, self.edges, self.rotation)

    def _check(self):
        verts = set(self.colors) | {bid(i) for i in self.boundary}
        inc = defaultdict(list)
        for e, (u, v) in self.edges.items():
            if u not in verts or v not in verts:
                raise PlabicError(f"edge {e} has an unknown endpoint")
            inc[u].append(e)
            inc[v].append(e)
        for v in verts:
            if sorted(self.rotation.get(v, [])) != sorted(inc[v]):
                raise PlabicError(f"rotation at {v} does not list its edges")
        for i in self.boundary:
            if len(inc[bid(i)]) != 1:
                raise PlabicError(f"boundary vertex {i} must have exactly one edge")
        for v, c in self.colors.items():
            if c not in (BLACK, WHITE):
                raise PlabicError(f"bad colour {c!r}")

    @property
    def n(self) -> int:
        return len(self.boundary)

    def vertices(self) -> list:
        return [bid(i) for i in self.boundary] + sorted(self.colors)

    def is_boundary(self, v: str) -> bool:
        return v not in self.colors

    def label_of(self, v: str) -> int:
        return int(v[1:])

    def other(self, e: int, v: str) -> str:
        u, w = self.edges[e]
        return w if u == v else u

    def degree(self, v: str) -> int:
        return len(self.rotation[v])

    def fresh_vertex(self, prefix: str = "v") -> str:
        i = len(self.colors)
        while f"{prefix}{i}" in self.colors:
            i += 1
        return f"{prefix}{i}"

    def fresh_edge(self) -> int:
        return max(self.edges, default=-1) + 1

    def __eq__(self, other) -> bool:
        return (isinstance(other, PlabicGraph) and self.boundary == other.boundary
                and self.colors == other.colors and self.edges == other.edges
                and self._rot_canon() == other._rot_canon())

    def _rot_canon(self):
        out = {}
        for v, r in self.rotation.items():
            if r:
                i = r.index(min(r))
                r = r[i:] + r[:i]
            out[v] = tuple(r)
        return out

    def __repr__(self) -> str:
        return f"PlabicGraph(boundary={list(self.boundary)}, {len(self.colors)} internal, {len(self.edges)} edges)"

    # serialization
    def to_json(self) -> dict:
        return {
            "boundary": list(self.boundary),
            "vertices": [{"id": v, "color": c} for v, c in sorted(self.colors.items())],
            "edges": [{"id": e, "ends": list(uv)} for e, uv in sorted(self.edges.items())],
            "rotation": {v: r for v, r in sorted(self.rotation.items())},
        }

    @classmethod
    def from_json(cls, data) -> "PlabicGraph":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["boundary"], {d["id"]: d["color"] for d in data["vertices"]},
                   {d["id"]: d["ends"] for d in data["edges"]},
                   {v: [int(e) for e in r] for v, r in data["rotation"].items()})

    def to_dot(self) -> str:
        lines = ["graph plabic {"]
        for i in self.boundary:
            lines.append(f'  {bid(i)} [label="{i}", shape=plaintext];')
        for v, c in sorted(self.colors.items()):
            fill = "black" if c == BLACK else "white"
            lines.append(f'  {v} [label="", shape=circle, style=filled, fillcolor={fill}, width=0.2];')
        for e, (u, v) in sorted(self.edges.items()):
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines)

    # embedding
    def faces(self) -> list[list[tuple]]:
        """Faces of the graph plus boundary arcs, as lists of darts (edge, tail).

        Boundary arcs use edge ids ("arc", i) between consecutive labels. The
        outer face (outside the circle) is included.
        """
        rot = {v: list(r) for v, r in self.rotation.items()}
        ends = dict(self.edges)
        B = self.boundary
        for j, i in enumerate(B):
            if len(B) > 1:
                arc = ("arc", i)
                ends[arc] = (bid(i), bid(B[(j + 1) % len(B)]))
        for j, i in enumerate(B):
            if len(B) == 1:
                continue
            nxt, prv = ("arc", i), ("arc", B[j - 1])
            (e,) = self.rotation[bid(i)]
            rot[bid(i)] = [nxt, e, prv] if len(B) > 2 else [nxt, e]
        if len(B) == 2:
            # both arcs join the same two vertices; order them by hand
            a0, a1 = ("arc", B[0]), ("arc", B[1])
            rot[bid(B[0])] = [a0, self.rotation[bid(B[0])][0], a1]
            rot[bid(B[1])] = [a1, self.rotation[bid(B[1])][0], a0]

        def other(e, v):
            u, w = ends[e]
            return w if u == v else u

        seen = set()
        faces = []
        for e, (u, v) in ends.items():
            for tail in (u, v):
                if (e, tail) in seen:
                    continue
                face = []
                cur_e, cur_t = e, tail
                while (cur_e, cur_t) not in seen:
                    seen.add((cur_e, cur_t))
                    face.append((cur_e, cur_t))
                    head = other(cur_e, cur_t)
                    r = rot[head]
                    nxt = r[(r.index(cur_e) - 1) % len(r)]
                    cur_e, cur_t = nxt, head
                faces.append(face)
        return faces

    def euler_characteristic(self) -> int:
        nb = len(self.boundary)
        V = len(self.colors) + nb
        E = len(self.edges) + (nb if nb > 1 else 0)
        return V - E + len(self.faces())

    def is_planar_embedding(self) -> bool:
        """V - E + F = 1 + (number of components) for the graph with the circle."""
        return self.euler_characteristic() == 1 + self._components_with_circle()

    def _components_with_circle(self) -> int:
        adj = defaultdict(set)
        for u, v in self.edges.values():
            adj[u].add(v)
            adj[v].add(u)
        B = [bid(i) for i in self.boundary]
        for x, y in zip(B, B[1:]):
            adj[x].add(y)
            adj[y].add(x)
        seen, comps = set(), 0
        for v in self.vertices():
            if v in seen:
                continue
            comps += 1
            stack = [v]
            while stack:
                x = stack.pop()
                if x in seen:
                    continue
                seen.add(x)
                stack.extend(adj[x] - seen)
        return comps


# trips

def trip(G: PlabicGraph, start: int) -> list:
    """Vertices visited by the trip from boundary ``start``."""
    v = bid(start)
    (e,) = G.rotation[v]
    path = [v]
    for _ in range(4 * len(G.edges) + 4):
        v = G.other(e, v)
        path.append(v)
        if G.is_boundary(v):
            return path
        r = G.rotation[v]
        i = r.index(e)
        e = r[(i - 1) % len(r)] if G.colors[v] == BLACK else r[(i + 1) % len(r)]
    raise PlabicError("trip does not terminate; malformed embedding")


def trip_permutation(G: PlabicGraph) -> DecoratedPermutation:
    """Trip permutation; a fixed point is white when it is a source of a perfect orientation.

    Fixed points are coloops or loops, so one orientation decides them all and
    the answer does not depend on bivalent vertices next to a lollipop.
    """
    image = []
    for i in G.boundary:
        path = trip(G, i)
        image.append(G.label_of(path[-1]))
    fixed = {i for i, j in zip(G.boundary, image) if i == j}
    loops, coloops = set(), set()
    if fixed:
        O = next(perfect_orientations(G), None)
        if O is None:
            raise PlabicError("graph is not perfectly orientable")
        coloops = fixed & set(O.sources)
        loops = fixed - coloops
    return DecoratedPermutation(G.boundary, tuple(image), frozenset(loops), frozenset(coloops))


# perfect orientations

@dataclass(frozen=True)
class PerfectOrientation:
    heads: tuple  # (edge id, head vertex) pairs, sorted by edge id
    sources: frozenset  # boundary labels whose edge points into the disk

    def head(self, e: int) -> str:
        return dict(self.heads)[e]

    def to_json(self) -> dict:
        return {"heads": {str(e): h for e, h in self.heads}, "sources": sorted(self.sources)}


def perfect_orientations(G: PlabicGraph, sources: Iterable[int] | None = None) -> Iterator[PerfectOrientation]:
    """All perfect orientations, by backtracking on the special edge at each vertex.

    A black vertex has exactly one outgoing edge and a white vertex exactly
    one incoming edge; call that edge special. Passing ``sources`` restricts
    to orientations with that boundary source set.
    """
    want = None if sources is None else frozenset(sources)
    internal = _bfs_order(G)
    special: dict = {}

    def head_of(e):
        """Head of e when its internal endpoints are decided, else None."""
        u, v = G.edges[e]
        votes = set()
        for x, y in ((u, v), (v, u)):
            if x in G.colors:
                if x not in special:
                    continue
                out = (special[x] == e) == (G.colors[x] == BLACK)
                votes.add(y if out else x)
        if len(votes) > 1:
            return False
        return votes.pop() if votes else None

    def consistent(v):
        for e in G.rotation[v]:
            h = head_of(e)
            if h is False:
                return False
            u, w = G.edges[e]
            if want is not None and h is not None:
                for x in (u, w):
                    if G.is_boundary(x):
                        is_src = h != x
                        if is_src != (G.label_of(x) in want):
                            return False
        return True

    def rec(idx):
        if idx == len(internal):
            heads = []
            srcs = set()
            for e in sorted(G.edges):
                h = head_of(e)
                if h is None or h is False:
                    # an edge between two boundary vertices cannot be oriented perfectly
                    u, w = G.edges[e]
                    h = w
                heads.append((e, h))
                u, w = G.edges[e]
                for x in (u, w):
                    if G.is_boundary(x) and h != x:
                        srcs.add(G.label_of(x))
            yield PerfectOrientation(tuple(heads), frozenset(srcs))
            return
        v = internal[idx]
        for e in G.rotation[v]:
            special[v] = e
            if consistent(v):
                yield from rec(idx + 1)
            del special[v]

    yield from rec(0)


def _bfs_order(G: PlabicGraph) -> list:
    order, seen = [], set()
    starts = [G.other(G.rotation[bid(i)][0], bid(i)) for i in G.boundary] + sorted(G.colors)
    for s in starts:
        if s in seen or s not in G.colors:
            continue
        queue = [s]
        seen.add(s)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for e in G.rotation[v]:
                w = G.other(e, v)
                if w in G.colors and w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def is_acyclic(G: PlabicGraph, O: PerfectOrientation) -> bool:
    adj = defaultdict(list)
    for e, h in O.heads:
        adj[G.other(e, h)].append(h)
    state = {}

    def dfs(v):
        state[v] = 1
        for w in adj[v]:
            s = state.get(w)
            if s == 1 or (s is None and not dfs(w)):
                return False
        state[v] = 2
        return True

    import sys
    sys.setrecursionlimit(max(10000, sys.getrecursionlimit()))
    return all(state.get(v) or dfs(v) for v in G.vertices())


def positroid_of_graph(G: PlabicGraph, sinks: Iterable[int] | None = None):
    """Positroid of G; with ``sinks`` also an acyclic orientation having those sinks.

    Returns the positroid, or (positroid, orientation) when ``sinks`` is given.
    """
    bases = set()
    for O in perfect_orientations(G):
        bases.add(tuple(sorted(O.sources)))
    if not bases:
        raise PlabicError("graph is not perfectly orientable")
    k = len(next(iter(bases)))
    P = Positroid(k, G.boundary, bases, check=None)
    if sinks is None:
        return P
    O = acyclic_orientation(G, P, sinks)
    return P, O


def acyclic_orientation(G: PlabicGraph, P: Positroid, sinks: Iterable[int] = ()) -> PerfectOrientation:
    J = set(sinks)
    candidates = []
    for start in G.boundary:
        # greedy basis for the order starting at `start`, among bases avoiding J
        g = G.boundary
        i0 = g.index(start)
        rank = {x: r for r, x in enumerate(g[i0:] + g[:i0])}
        ok = [b for b in P.bases if not J & set(b)]
        if not ok:
            raise PlabicError(f"no basis avoids {sorted(J)}: sinks infeasible")
        b = min(ok, key=lambda b: sorted(rank[x] for x in b))
        if b not in candidates:
            candidates.append(b)
    candidates += sorted(b for b in P.bases if not J & set(b) and b not in candidates)
    for b in candidates:
        for O in perfect_orientations(G, sources=b):
            if is_acyclic(G, O):
                return O
    raise PlabicError("no acyclic perfect orientation with the requested sinks")


def path_matrix(G: PlabicGraph, O: PerfectOrientation, weights: dict | None = None,
                check: bool = False) -> RationalMatrix:
    """Boundary measurement matrix of an acyclic perfect orientation.

    Entry (i, j) is (-1)^s times the weighted path sum from source i to j,
    where s counts sources strictly between i and j.
    """
    if not is_acyclic(G, O):
        raise PlabicError("path_matrix needs an acyclic orientation")
    w = {e: Fraction(1) for e in G.edges}
    if weights:
        w.update({int(e): Fraction(x) for e, x in weights.items()})
    if any(x <= 0 for x in w.values()):
        raise PlabicError("edge weights must be positive")
    out_edges = defaultdict(list)
    for e, h in O.heads:
        out_edges[G.other(e, h)].append((e, h))
    srcs = sorted(O.sources)
    labels = list(G.boundary)
    rows = []
    for i in srcs:
        memo = {}

        def flow(v):
            # weighted number of paths from v to each boundary sink
            if v in memo:
                return memo[v]
            res = defaultdict(Fraction)
            if G.is_boundary(v) and v != bid(i):
                res[G.label_of(v)] += 1
            for e, h in out_edges[v]:
                for j, x in flow(h).items():
                    res[j] += w[e] * x
            memo[v] = res
            return res

        f = flow(bid(i))
        row = []
        for j in labels:
            if j == i:
                row.append(Fraction(1))
            elif j in O.sources:
                row.append(Fraction(0))
            else:
                lo, hi = min(i, j), max(i, j)
                s = sum(1 for x in srcs if lo < x < hi)
                row.append((-1) ** s * f.get(j, Fraction(0)))
        rows.append(row)
    M = RationalMatrix(rows, labels)
    if check and M.k and any(v < 0 for v in plucker_coordinates(M).coords.values()):
        raise PlabicError("path matrix has a negative Plucker coordinate")
    return M


def random_weights(G: PlabicGraph, seed: int = 0) -> dict:
    rng = random.Random(f"amplikit:weights:{seed}")
    return {e: Fraction(rng.randint(1, 50), rng.randint(1, 50)) for e in sorted(G.edges)}


# basic graphs, lollipops and bridges

def lollipop_graph(labels: Iterable[int], colors: dict | None = None) -> PlabicGraph:
    """Lollipops at every label; black unless ``colors`` says otherwise."""
    labels = sorted(labels)
    colors = colors or {}
    cols, edges, rot = {}, {}, {}
    for e, i in enumerate(labels):
        v = f"l{i}"
        cols[v] = colors.get(i, BLACK)
        edges[e] = (bid(i), v)
        rot[bid(i)] = [e]
        rot[v] = [e]
    return PlabicGraph(labels, cols, edges, rot)


def star_graph(labels: Iterable[int], color: str = WHITE) -> PlabicGraph:
    labels = sorted(labels)
    edges = {e: (bid(i), "s0") for e, i in enumerate(labels)}
    rot = {bid(i): [e] for e, i in enumerate(labels)}
    rot["s0"] = list(range(len(labels)))
    return PlabicGraph(labels, {"s0": color}, edges, rot)


def add_lollipop(G: PlabicGraph, label: int, color: str = BLACK) -> PlabicGraph:
    """Insert a new boundary label joined to a lollipop (a zero column when black)."""
    if label in G.boundary:
        raise PlabicError(f"label {label} already on the boundary")
    H = G.copy()
    v = H.fresh_vertex("l")
    e = H.fresh_edge()
    H.colors[v] = color
    H.edges[e] = (bid(label), v)
    H.rotation[bid(label)] = [e]
    H.rotation[v] = [e]
    return PlabicGraph(list(G.boundary) + [label], H.colors, H.edges, H.rotation)


def add_bridge(G: PlabicGraph, i: int, color_i: str = WHITE) -> PlabicGraph:
    """Bridge between boundary i and the next label clockwise.

    The vertex placed on the edge at i gets ``color_i`` and the one at the
    next label the opposite colour. White at i is the x_i bridge (column
    next(i) += t column i); black at i is y_i.
    """
    B = G.boundary
    j = B[(B.index(i) + 1) % len(B)]
    H = G.copy()
    wi, wj = H.fresh_vertex("r"), None
    H.colors[wi] = color_i
    wj = H.fresh_vertex("r")
    H.colors[wj] = WHITE if color_i == BLACK else BLACK
    (ei,) = H.rotation[bid(i)]
    (ej,) = H.rotation[bid(j)]
    ui, uj = H.other(ei, bid(i)), H.other(ej, bid(j))
    # boundary edges now end at the new vertices; new edges continue inward
    fi, fj, br = H.fresh_edge(), H.fresh_edge() + 1, H.fresh_edge() + 2
    H.edges[ei] = (bid(i), wi)
    H.edges[ej] = (bid(j), wj)
    H.edges[fi] = (wi, ui)
    H.edges[fj] = (wj, uj)
    H.edges[br] = (wi, wj)
    H.rotation[ui] = [fi if x == ei else x for x in H.rotation[ui]]
    H.rotation[uj] = [fj if x == ej else x for x in H.rotation[uj]]
    if ui == uj:
        # both boundary edges met the same vertex; rotation already updated twice
        pass
    H.rotation[wi] = [ei, br, fi]
    H.rotation[wj] = [ej, fj, br]
    return PlabicGraph(B, H.colors, H.edges, H.rotation)


def example_top_cell_2_5() -> PlabicGraph:
    """A reduced graph for the top cell of Gr(2,5), built from bridges."""
    G = lollipop_graph(range(1, 6), {1: WHITE, 2: WHITE})
    for i in (2, 1, 3, 2, 4, 3):
        G = add_bridge(G, i, WHITE)
    return contract_leaves(G)


def contract_leaves(G: PlabicGraph) -> PlabicGraph:
    """Merge internal leaves into a same-coloured internal neighbour (M2)."""
    while True:
        for v in sorted(G.colors):
            if G.degree(v) != 1:
                continue
            (e,) = G.rotation[v]
            u = G.other(e, v)
            if u in G.colors and G.colors[u] == G.colors[v]:
                G = apply_move(G, Move("contract", e))
                break
        else:
            return G


# moves

@dataclass(frozen=True)
class Move:
    """M1 square move at a face; M2 contract an edge or expand a vertex; M3 insert or remove a bivalent vertex."""

    kind: str  # "square", "contract", "expand", "insert", "remove"
    site: object = None
    extra: tuple = ()


def internal_faces(G: PlabicGraph) -> list[list[str]]:
    """Faces whose darts all lie on graph edges, as vertex cycles."""
    out = []
    for face in G.faces():
        if any(isinstance(e, tuple) for e, _ in face):
            continue
        out.append([t for _, t in face])
    return out


def square_faces(G: PlabicGraph) -> list[tuple]:
    res = []
    for vs in internal_faces(G):
        if len(vs) == 4 and len(set(vs)) == 4 and all(v in G.colors and G.degree(v) == 3 for v in vs):
            cols = [G.colors[v] for v in vs]
            if all(cols[t] != cols[(t + 1) % 4] for t in range(4)):
                res.append(tuple(vs))
    return res


def contractible_edges(G: PlabicGraph) -> list[int]:
    return [e for e, (u, v) in sorted(G.edges.items())
            if u != v and u in G.colors and v in G.colors and G.colors[u] == G.colors[v]]


def bivalent_vertices(G: PlabicGraph) -> list[str]:
    return [v for v in sorted(G.colors) if G.degree(v) == 2
            and len(set(G.other(e, v) for e in G.rotation[v])) == 2]


def apply_move(G: PlabicGraph, move: Move) -> PlabicGraph:
    H = G.copy()
    if move.kind == "square":
        vs = tuple(move.site)
        if vs not in square_faces(G) and not any(set(vs) == set(f) for f in square_faces(G)):
            raise PlabicError("square move needs a face of four trivalent alternating vertices")
        for v in vs:
            H.colors[v] = WHITE if H.colors[v] == BLACK else BLACK
        return H
    if move.kind == "contract":
        e = move.site
        if e not in contractible_edges(G):
            raise PlabicError(f"edge {e} does not join two internal vertices of one colour")
        u, v = H.edges.pop(e)
        ru, rv = H.rotation.pop(u), H.rotation.pop(v)
        iu, iv = ru.index(e), rv.index(e)
        merged = ru[iu + 1:] + ru[:iu] + rv[iv + 1:] + rv[:iv]
        del H.colors[v]
        H.rotation[u] = merged
        for x in merged:
            a, b = H.edges[x]
            H.edges[x] = (u if a == v else a, u if b == v else b)
        return PlabicGraph(H.boundary, H.colors, H.edges, H.rotation)
    if move.kind == "expand":
        # split vertex `site` so that rotation positions [s, t) move to a new vertex
        v = move.site
        s, t = move.extra
        r = H.rotation[v]
        if v not in H.colors or not (0 <= s < t <= len(r)) or t - s in (0, len(r)):
            raise PlabicError("expand needs an internal vertex and a proper arc of its edges")
        w = H.fresh_vertex("m")
        e = H.fresh_edge()
        moved, kept = r[s:t], r[t:] + r[:s]
        H.colors[w] = H.colors[v]
        H.edges[e] = (v, w)
        for x in moved:
            a, b = H.edges[x]
            H.edges[x] = (w if a == v else a, w if b == v else b)
        H.rotation[v] = kept + [e]
        H.rotation[w] = moved + [e]
        return PlabicGraph(H.boundary, H.colors, H.edges, H.rotation)
    if move.kind == "insert":
        e = move.site
        color = move.extra[0] if move.extra else BLACK
        if e not in H.edges:
            raise PlabicError(f"no edge {e}")
        u, v = H.edges[e]
        w = H.fresh_vertex("m")
        f = H.fresh_edge()
        H.colors[w] = color
        H.edges[e] = (u, w)
        H.edges[f] = (w, v)
        H.rotation[v] = [f if x == e else x for x in H.rotation[v]]
        H.rotation[w] = [e, f]
        return PlabicGraph(H.boundary, H.colors, H.edges, H.rotation)
    if move.kind == "remove":
        w = move.site
        if w not in bivalent_vertices(G):
            raise PlabicError(f"{w} is not a removable bivalent vertex")
        e, f = sorted(H.rotation.pop(w))
        u = H.other(e, w)
        v = H.other(f, w)
        del H.colors[w]
        del H.edges[f]
        H.edges[e] = (u, v) if H.edges[e][0] == u else (v, u) if False else (u, v)
        H.rotation[v] = [e if x == f else x for x in H.rotation[v]]
        return PlabicGraph(H.boundary, H.colors, H.edges, H.rotation)
    raise PlabicError(f"unknown move {move.kind!r}")


def random_move(G: PlabicGraph, rng: random.Random) -> PlabicGraph:
    """Apply one randomly chosen applicable move."""
    options = [Move("square", f) for f in square_faces(G)]
    options += [Move("contract", e) for e in contractible_edges(G)]
    options += [Move("remove", v) for v in bivalent_vertices(G)]
    options += [Move("insert", e, (rng.choice([BLACK, WHITE]),)) for e in sorted(G.edges)]
    for v in sorted(G.colors):
        d = G.degree(v)
        if d >= 4:
            s = rng.randrange(d)
            L = rng.randrange(2, d - 1)
            if s + L <= d:
                options.append(Move("expand", v, (s, s + L)))
    return apply_move(G, rng.choice(options))


def bubble_warnings(G: PlabicGraph) -> list[str]:
    """Heuristic signs of a non-reduced graph: parallel edges and internal leaves."""
    out = []
    seen = defaultdict(list)
    for e, (u, v) in G.edges.items():
        seen[frozenset((u, v))].append(e)
    for pair, es in seen.items():
        if len(es) > 1:
            out.append(f"parallel edges {sorted(es)} between {sorted(pair)}")
    for v in G.colors:
        if G.degree(v) == 1 and not G.is_boundary(G.other(G.rotation[v][0], v)):
            out.append(f"internal leaf {v}")
    return out


# relabelling, dihedral moves and the butterfly

def relabel_boundary(G: PlabicGraph, mapping: dict, mirror: bool = False) -> PlabicGraph:
    vm = {bid(i): bid(mapping[i]) for i in G.boundary}
    ren = lambda v: vm.get(v, v)
    rot = {ren(v): (list(reversed(r)) if mirror else list(r)) for v, r in G.rotation.items()}
    edges = {e: (ren(u), ren(v)) for e, (u, v) in G.edges.items()}
    return PlabicGraph([mapping[i] for i in G.boundary], G.colors, edges, rot)


def graph_cyc(G: PlabicGraph, times: int = 1) -> PlabicGraph:
    B = G.boundary
    m = len(B)
    return relabel_boundary(G, {x: B[(j + times) % m] for j, x in enumerate(B)})


def graph_refl(G: PlabicGraph) -> PlabicGraph:
    B = G.boundary
    m = len(B)
    return relabel_boundary(G, {x: B[m - 1 - j] for j, x in enumerate(B)}, mirror=True)


def graph_pre(G: PlabicGraph, I: Iterable[int]) -> PlabicGraph:
    for i in sorted(I):
        G = add_lollipop(G, i, BLACK)
    return G


def butterfly_graph(GL: PlabicGraph, GR: PlabicGraph, indices) -> PlabicGraph:
    """Glue G_L (on N_L) and G_R (on N_R) through the ten-vertex butterfly.

    The boundary edges of G_L at a, b, n and of G_R at b, c, d, n are cut and
    their inner ends joined to butterfly vertices; black lollipops on those
    labels are dropped since they carry no edges into the cell.
    """
    a, b, c, d, n = indices
    NL, NR = set(GL.boundary), set(GR.boundary)
    if not (a < b < c < d < n) or not {a, b, n} <= NL or not {b, c, d, n} <= NR or NL & NR != {b, n}:
        raise PlabicError("index sets malformed for a BCFW product")
    if max(NL) != n or max(NR) != n or min(NR) != b:
        raise PlabicError("N_L must end at n and N_R must run from b to n")
    colors, rot, edges = {}, {}, {}

    def new_edge(u, v):
        e = len(edges)
        edges[e] = (u, v)
        return e

    attach = {}  # (side, label) -> (inner vertex, slot in its rotation)
    for tag, G, glued in (("L", GL, (a, b, n)), ("R", GR, (b, c, d, n))):
        ren = lambda v, tag=tag, G=G: v if G.is_boundary(v) else f"{tag}{v}"
        emap = {}
        for e, (u, v) in sorted(G.edges.items()):
            bl = [x for x in (u, v) if G.is_boundary(x)]
            if bl and G.label_of(bl[0]) in glued:
                inner = v if u == bl[0] else u
                if G.is_boundary(inner):
                    raise PlabicError("boundary-to-boundary edge at a glued label")
                attach[(tag, G.label_of(bl[0]))] = (ren(inner), G.rotation[inner].index(e))
                emap[e] = None
            else:
                emap[e] = new_edge(ren(u), ren(v))
        for v, col in G.colors.items():
            colors[ren(v)] = col
        for v, lst in G.rotation.items():
            if G.is_boundary(v) and G.label_of(v) in glued:
                continue
            rot[ren(v)] = [emap[x] for x in lst]
    for v in ("Y1", "X", "B", "N1", "NN", "D1", "C"):
        colors[v] = BLACK
    for v in ("Y2", "N2", "D2"):
        colors[v] = WHITE

    def glue(tag, label, bf):
        inner, slot = attach[(tag, label)]
        if len(rot[inner]) == 1:
            if colors[inner] == WHITE:
                raise PlabicError(f"white lollipop at {label}: coindependence fails")
            del colors[inner], rot[inner]
            return None
        e = new_edge(inner, bf)
        rot[inner][slot] = e
        return e

    eLa, eLb, eLn = glue("L", a, "Y1"), glue("L", b, "X"), glue("L", n, "NN")
    eRb, eRc, eRd, eRn = glue("R", b, "B"), glue("R", c, "C"), glue("R", d, "D1"), glue("R", n, "N1")
    gA, gB, gC, gD, gN = (new_edge(bid(x), y) for x, y in ((a, "Y1"), (b, "B"), (c, "C"), (d, "D2"), (n, "NN")))
    for x, e in ((a, gA), (b, gB), (c, gC), (d, gD), (n, gN)):
        rot[bid(x)] = [e]
    y12, y2b, y2x = new_edge("Y1", "Y2"), new_edge("Y2", "B"), new_edge("Y2", "X")
    xn1, n1n2, n2nn = new_edge("X", "N1"), new_edge("N1", "N2"), new_edge("N2", "NN")
    n2d1, d1d2, d2c = new_edge("N2", "D1"), new_edge("D1", "D2"), new_edge("D2", "C")
    layout = {
        "Y1": [gA, y12, eLa],
        "Y2": [y12, y2b, y2x],
        "B": [gB, eRb, y2b],
        "X": [y2x, xn1, eLb],
        "N1": [xn1, eRn, n1n2],
        "N2": [n1n2, n2d1, n2nn],
        "NN": [n2nn, gN, eLn],
        "D1": [n2d1, eRd, d1d2],
        "D2": [d1d2, d2c, gD],
        "C": [eRc, gC, d2c],
    }
    for v, lst in layout.items():
        rot[v] = [e for e in lst if e is not None]
    return PlabicGraph(sorted(NL | NR), colors, edges, rot)


def recipe_graph(r) -> PlabicGraph:
    """Plabic graph of a recipe's cell, built from lollipops and butterflies."""
    if r.step is None:
        return lollipop_graph(r.markers)
    st = r.step
    if st.prod is None:
        G = recipe_graph(r.left)
    else:
        G = butterfly_graph(recipe_graph(r.left), recipe_graph(r.right), st.prod)
    if st.pre:
        G = graph_pre(G, st.pre)
    if st.cyc:
        G = graph_cyc(G, st.cyc)
    if st.refl:
        G = graph_refl(G)
    return G
