"""Twistor coordinates, chain polynomials and functionary expressions.

A functionary is stored as an immutable expression DAG whose leaves are
twistor brackets <<I>> (I a sorted 4-subset of the marker set) and integer or
rational scalars.  Internal nodes are sums, products and quotients.  Chain
polynomials are kept as their own leaf kind so printed forms stay readable;
they evaluate through their signed expansion.

Evaluation is generic over the value ring: ``evaluate`` takes a bracket
callback, so the same DAG can be evaluated at an exact point (Fractions) or
on truncated Laurent series (used for valuations in promotion).
"""
from __future__ import annotations

import re
from collections import Counter
from fractions import Fraction
from itertools import product as iproduct
from typing import Callable, Iterable, Sequence

from .exact import RationalMatrix, det, plucker_coordinates, rref, solve_left, _sort_sign

LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def fmt_label(x: int, letters: bool = False) -> str:
    """Marker label as text; with ``letters`` 10, 11, ... print as A, B, ..."""
    if letters and 10 <= x < 10 + len(LETTERS):
        return LETTERS[x - 10]
    return str(x)


def parse_label(tok: str) -> int:
    tok = tok.strip()
    if len(tok) == 1 and tok.isalpha():
        return 10 + LETTERS.index(tok.upper())
    return int(tok)


def sort_with_sign(idx: Sequence[int]) -> tuple[int, tuple]:
    """(sign, sorted tuple) for an alternating bracket; sign 0 on repeats."""
    idx = tuple(idx)
    if len(set(idx)) != len(idx):
        return 0, tuple(sorted(idx))
    return _sort_sign(idx), tuple(sorted(idx))


class FunctionaryError(ValueError):
    pass


class FunctionaryZeroDivision(ZeroDivisionError):
    def __init__(self, expr: "Expr"):
        text = expr.sexpr()
        if len(text) > 200:
            text = text[:200] + "..."
        super().__init__(f"denominator vanishes: {text}")
        self.expr = expr


# expression nodes

def _deg_add(*degs):
    c = Counter()
    for d in degs:
        if d is None:
            return None
        c.update(dict(d))
    return tuple(sorted((i, m) for i, m in c.items() if m))


def _deg_sub(p, q):
    if p is None or q is None:
        return None
    c = Counter(dict(p))
    c.subtract(dict(q))
    return tuple(sorted((i, m) for i, m in c.items() if m))


class Expr:
    """Base class; subclasses are immutable and compared structurally."""

    __slots__ = ("_key", "_hash", "deg")
    kind = "?"

    def key(self) -> tuple:
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Expr) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def _init(self, key, deg):
        self._key = key
        self._hash = hash(key)
        self.deg = deg

    def children(self) -> tuple:
        return ()

    # arithmetic sugar
    def __add__(self, other):
        return add(self, lift(other))

    def __radd__(self, other):
        return add(lift(other), self)

    def __sub__(self, other):
        return add(self, neg(lift(other)))

    def __rsub__(self, other):
        return add(lift(other), neg(self))

    def __mul__(self, other):
        return mul(self, lift(other))

    def __rmul__(self, other):
        return mul(lift(other), self)

    def __truediv__(self, other):
        return div(self, lift(other))

    def __neg__(self):
        return neg(self)

    def __repr__(self) -> str:
        return self.sexpr()

    # degree helpers
    @property
    def is_pure(self) -> bool:
        return self.deg is not None

    def degree(self, i: int) -> int:
        if self.deg is None:
            raise FunctionaryError(f"expression is not pure: {self.sexpr()[:120]}")
        return dict(self.deg).get(i, 0)

    def total_degree(self) -> int:
        """Degree as a rational function of the brackets (leaf count weighting)."""
        if self.deg is None:
            raise FunctionaryError("expression is not pure")
        return sum(m for _, m in self.deg) // 4

    def labels(self) -> frozenset:
        out = set()
        for node in walk(self):
            if isinstance(node, Tw):
                out.update(node.I)
            elif isinstance(node, Chain):
                out.update(node.indices())
        return frozenset(out)

    def sexpr(self, letters: bool = False) -> str:
        raise NotImplementedError

    def pretty(self, letters: bool = True) -> str:
        return self.sexpr(letters)


class Const(Expr):
    __slots__ = ("value",)
    kind = "const"

    def __init__(self, value):
        self.value = Fraction(value)
        self._init(("const", self.value), ())

    def sexpr(self, letters: bool = False) -> str:
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


class Tw(Expr):
    """Twistor bracket <<I>> with I sorted; use ``tw`` to build from unsorted input."""

    __slots__ = ("I",)
    kind = "tw"

    def __init__(self, I: Sequence[int]):
        I = tuple(int(x) for x in I)
        if len(I) != 4 or list(I) != sorted(set(I)):
            raise FunctionaryError(f"bracket indices must be 4 distinct increasing labels, got {I}")
        self.I = I
        self._init(("tw", I), tuple((i, 1) for i in I))

    def sexpr(self, letters: bool = False) -> str:
        return "(tw " + " ".join(fmt_label(i, letters) for i in self.I) + ")"

    def pretty(self, letters: bool = True) -> str:
        return "<<" + " ".join(fmt_label(i, letters) for i in self.I) + ">>"


class Chain(Expr):
    """Chain polynomial leaf; evaluates through ``ChainExpression.expand``."""

    __slots__ = ("chain", "_expansion")
    kind = "chain"

    def __init__(self, chain: "ChainExpression"):
        self.chain = chain
        self._expansion = None
        c = Counter(chain.indices())
        self._init(("chain", chain.clauses), tuple(sorted(c.items())))

    def indices(self) -> list:
        return self.chain.indices()

    @property
    def expansion(self) -> Expr:
        if self._expansion is None:
            self._expansion = self.chain.expand()
        return self._expansion

    def sexpr(self, letters: bool = False) -> str:
        return "(chain " + " | ".join(" ".join(fmt_label(i, letters) for i in cl)
                                      for cl in self.chain.clauses) + ")"

    def pretty(self, letters: bool = True) -> str:
        return self.chain.pretty(letters)


class Add(Expr):
    __slots__ = ("terms",)
    kind = "add"

    def __init__(self, terms: Sequence[Expr]):
        self.terms = tuple(terms)
        degs = [t.deg for t in self.terms]
        deg = degs[0] if degs and all(d == degs[0] for d in degs) else None
        self._init(("add",) + tuple(t._key for t in self.terms), deg)

    def children(self):
        return self.terms

    def sexpr(self, letters: bool = False) -> str:
        pos, negs = [], []
        for t in self.terms:
            c, rest = split_coefficient(t)
            (negs if c < 0 else pos).append(t if c > 0 else mul(Const(-c), rest))
        if negs and pos:
            p = pos[0].sexpr(letters) if len(pos) == 1 else "(add " + " ".join(x.sexpr(letters) for x in pos) + ")"
            q = negs[0].sexpr(letters) if len(negs) == 1 else "(add " + " ".join(x.sexpr(letters) for x in negs) + ")"
            return f"(sub {p} {q})"
        return "(add " + " ".join(t.sexpr(letters) for t in self.terms) + ")"

    def pretty(self, letters: bool = True) -> str:
        out = ""
        for i, t in enumerate(self.terms):
            c, rest = split_coefficient(t)
            body = mul(Const(abs(c)), rest).pretty(letters)
            if i == 0:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return "(" + out + ")"


class Mul(Expr):
    __slots__ = ("factors",)
    kind = "mul"

    def __init__(self, factors: Sequence[Expr]):
        self.factors = tuple(factors)
        self._init(("mul",) + tuple(f._key for f in self.factors),
                   _deg_add(*(f.deg for f in self.factors)))

    def children(self):
        return self.factors

    def sexpr(self, letters: bool = False) -> str:
        if len(self.factors) == 2 and isinstance(self.factors[0], Const) and self.factors[0].value == -1:
            return "(neg " + self.factors[1].sexpr(letters) + ")"
        return "(mul " + " ".join(f.sexpr(letters) for f in self.factors) + ")"

    def pretty(self, letters: bool = True) -> str:
        parts = []
        for f in self.factors:
            if isinstance(f, Const) and f.value == -1:
                parts.append("-")
            else:
                parts.append(f.pretty(letters))
        s = " ".join(parts)
        return s.replace("- ", "-", 1) if s.startswith("- ") else s


class Quot(Expr):
    __slots__ = ("num", "den")
    kind = "div"

    def __init__(self, num: Expr, den: Expr):
        self.num, self.den = num, den
        self._init(("div", num._key, den._key), _deg_sub(num.deg, den.deg))

    def children(self):
        return (self.num, self.den)

    def sexpr(self, letters: bool = False) -> str:
        return f"(div {self.num.sexpr(letters)} {self.den.sexpr(letters)})"

    def pretty(self, letters: bool = True) -> str:
        return f"{self.num.pretty(letters)} / {self.den.pretty(letters)}"


ZERO = Const(0)
ONE = Const(1)


def lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(x)
    raise TypeError(f"cannot use {type(x).__name__} in a functionary")


def is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0


def split_coefficient(e: Expr) -> tuple[Fraction, Expr]:
    """(c, rest) with e = c * rest and c the leading scalar of a product."""
    if isinstance(e, Const):
        return e.value, ONE
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), e


def tw(*idx) -> Expr:
    """<<i j k l>> from possibly unsorted indices, sign folded in, 0 on repeats."""
    if len(idx) == 1 and not isinstance(idx[0], int):
        idx = tuple(idx[0])
    if len(idx) != 4:
        raise FunctionaryError(f"a twistor bracket needs 4 indices, got {len(idx)}")
    s, I = sort_with_sign(idx)
    if s == 0:
        return ZERO
    return Tw(I) if s > 0 else Mul((Const(-1), Tw(I)))


def add(*terms) -> Expr:
    flat = []
    const = Fraction(0)
    for t in terms:
        t = lift(t)
        if isinstance(t, Add):
            items = t.terms
        else:
            items = (t,)
        for x in items:
            if isinstance(x, Const):
                const += x.value
            else:
                flat.append(x)
    # merge repeated terms
    coeffs: dict = {}
    order = []
    for x in flat:
        c, rest = split_coefficient(x)
        if rest._key not in coeffs:
            coeffs[rest._key] = [Fraction(0), rest]
            order.append(rest._key)
        coeffs[rest._key][0] += c
    out = []
    for k in order:
        c, rest = coeffs[k]
        if c != 0:
            out.append(rest if c == 1 else mul(Const(c), rest))
    if const != 0:
        out.append(Const(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(out)


def mul(*factors) -> Expr:
    flat = []
    const = Fraction(1)
    for f in factors:
        f = lift(f)
        items = f.factors if isinstance(f, Mul) else (f,)
        for x in items:
            if isinstance(x, Const):
                const *= x.value
            else:
                flat.append(x)
    if const == 0:
        return ZERO
    if not flat:
        return Const(const)
    flat.sort(key=lambda x: repr(x._key))
    if const != 1:
        flat.insert(0, Const(const))
    if len(flat) == 1:
        return flat[0]
    return Mul(flat)


def neg(e: Expr) -> Expr:
    return mul(Const(-1), e)


def div(num, den) -> Expr:
    num, den = lift(num), lift(den)
    if isinstance(den, Const):
        if den.value == 0:
            raise FunctionaryZeroDivision(den)
        return mul(Const(1 / den.value), num)
    if is_zero(num):
        return ZERO
    if num == den:
        return ONE
    # pull scalars out of numerator and denominator
    cn, rn = split_coefficient(num)
    cd, rd = split_coefficient(den)
    if cn != 1 or cd != 1:
        return mul(Const(cn / cd), div(rn, rd))
    return Quot(num, den)


def prod(factors: Iterable) -> Expr:
    return mul(*factors)


def walk(e: Expr):
    """Every distinct node of the DAG once (post-order)."""
    seen = set()
    stack = [(e, False)]
    while stack:
        node, done = stack.pop()
        if done:
            yield node
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for c in node.children():
            stack.append((c, False))


# chain polynomials

class ChainExpression:
    """Clauses (a0 b0 c0 | d1 | b1 c1 | d2 | ... | ds | bs cs as), s >= 1.

    A single 4-index clause is accepted as the degree-one chain (a bracket).
    """

    __slots__ = ("clauses",)

    def __init__(self, clauses: Sequence[Sequence[int]]):
        cl = tuple(tuple(int(x) for x in c) for c in clauses)
        errs = chain_errors(cl)
        if errs:
            raise FunctionaryError("malformed chain: " + "; ".join(errs))
        self.clauses = cl

    @property
    def s(self) -> int:
        return (len(self.clauses) - 1) // 2

    @property
    def degree(self) -> int:
        return self.s + 1

    def indices(self) -> list:
        return [x for c in self.clauses for x in c]

    def __eq__(self, other):
        return isinstance(other, ChainExpression) and self.clauses == other.clauses

    def __hash__(self):
        return hash(self.clauses)

    def __repr__(self):
        return f"ChainExpression({self.pretty(False)})"

    def pretty(self, letters: bool = True) -> str:
        return "<" + " | ".join(" ".join(fmt_label(i, letters) for i in c) for c in self.clauses) + ">"

    def terms(self) -> list[tuple[int, list[tuple]]]:
        """The 2^s signed terms as (sign, [4-tuples of indices])."""
        cl = self.clauses
        if len(cl) == 1:
            return [(1, [cl[0]])]
        s = self.s
        first, last = cl[0], cl[-1]
        ds = [cl[2 * i - 1] for i in range(1, s + 1)]
        bcs = [cl[2 * i] for i in range(1, s)]
        out = []
        for t in iproduct((0, 1), repeat=s):
            sign = -1 if sum(t) % 2 else 1
            brs = [first + (ds[0][t[0]],)]
            for i in range(1, s):
                brs.append((ds[i - 1][1 - t[i - 1]],) + bcs[i - 1] + (ds[i][t[i]],))
            brs.append((ds[s - 1][1 - t[s - 1]],) + last)
            out.append((sign, brs))
        return out

    def expand(self) -> Expr:
        return add(*(mul(Const(sg), *(tw(*b) for b in brs)) for sg, brs in self.terms()))

    def simplified(self) -> Expr:
        """Expansion, with the quadratic shared-pair case written as a product.

        If the end clauses of <x p q | d e | p q y> share two indices the
        three-term Plucker relation gives -<p q x y><p q d e>.
        """
        cl = self.clauses
        if len(cl) == 3:
            shared = [x for x in cl[0] if x in cl[2]]
            if len(shared) == 2:
                p, q = shared
                (x,) = [v for v in cl[0] if v not in shared]
                (y,) = [v for v in cl[2] if v not in shared]
                s1, _ = sort_with_sign(cl[0])
                s2, _ = sort_with_sign((p, q, x))
                s3, _ = sort_with_sign(cl[2])
                s4, _ = sort_with_sign((p, q, y))
                sign = -s1 * s2 * s3 * s4
                return mul(Const(sign), tw(p, q, x, y), tw(p, q, *cl[1]))
        return self.expand()

    def as_expr(self) -> Expr:
        """Chain leaf (keeps the clause form), or a plain bracket when s = 0."""
        if len(self.clauses) == 1:
            return tw(*self.clauses[0])
        return Chain(self)

    @classmethod
    def parse(cls, text: str) -> "ChainExpression":
        """'3 4 C | 5 6 | 1 2 C' (angle brackets optional; letters A.. for 10..)."""
        text = text.strip().lstrip("<").rstrip(">")
        return cls([[parse_label(t) for t in part.split()] for part in text.split("|")])


def chain_errors(cl: Sequence[Sequence[int]]) -> list[str]:
    if len(cl) == 1:
        return [] if len(cl[0]) == 4 else [f"a single clause must have 4 indices, got {len(cl[0])}"]
    errs = []
    if len(cl) < 3 or len(cl) % 2 == 0:
        errs.append(f"need an odd number >= 3 of clauses, got {len(cl)}")
        return errs
    if len(cl[0]) != 3:
        errs.append(f"first clause needs 3 indices, got {len(cl[0])}")
    if len(cl[-1]) != 3:
        errs.append(f"last clause needs 3 indices, got {len(cl[-1])}")
    for i, c in enumerate(cl[1:-1], 1):
        if len(c) != 2:
            errs.append(f"clause {i} needs 2 indices, got {len(c)}")
    return errs


def chain(*clauses) -> Expr:
    """Chain leaf from clause sequences, or from one string."""
    if len(clauses) == 1 and isinstance(clauses[0], str):
        return ChainExpression.parse(clauses[0]).as_expr()
    return ChainExpression(clauses).as_expr()


def expand_chain(E: ChainExpression | Sequence) -> Expr:
    if not isinstance(E, ChainExpression):
        E = ChainExpression(E)
    return E.expand()


def expand_all(e: Expr) -> Expr:
    """Replace chain leaves by their expansions."""
    memo = {}

    def go(x):
        if id(x) in memo:
            return memo[id(x)]
        if isinstance(x, Chain):
            r = x.expansion
        elif isinstance(x, Add):
            r = add(*map(go, x.terms))
        elif isinstance(x, Mul):
            r = mul(*map(go, x.factors))
        elif isinstance(x, Quot):
            r = div(go(x.num), go(x.den))
        else:
            r = x
        memo[id(x)] = r
        return r

    return go(e)


# substitution

def map_leaves(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Rebuild e with every bracket or chain leaf replaced by fn(leaf)."""
    memo = {}

    def go(x):
        r = memo.get(id(x))
        if r is not None:
            return r
        if isinstance(x, (Tw, Chain)):
            r = fn(x)
        elif isinstance(x, Add):
            r = add(*map(go, x.terms))
        elif isinstance(x, Mul):
            r = mul(*map(go, x.factors))
        elif isinstance(x, Quot):
            r = div(go(x.num), go(x.den))
        else:
            r = x
        memo[id(x)] = r
        return r

    return go(e)


def relabel_expr(e: Expr, mapping: dict, sort_sign: bool = True) -> Expr:
    """Substitute labels leaf-wise.

    With ``sort_sign`` the image bracket picks up the sign of sorting; without
    it the image set is simply listed in increasing order (the convention for
    the dihedral pullbacks).
    """
    def leaf(x):
        if isinstance(x, Tw):
            img = [mapping.get(i, i) for i in x.I]
            if sort_sign:
                return tw(*img)
            return Tw(tuple(sorted(img)))
        img_cl = [[mapping.get(i, i) for i in c] for c in x.chain.clauses]
        if sort_sign:
            return Chain(ChainExpression(img_cl))
        # chain leaves under an order-changing relabelling: expand first
        return relabel_expr(x.expansion, mapping, sort_sign=False)

    return map_leaves(e, leaf)


def pullback_expr(F: Expr, op: str, n) -> Expr:
    """Dihedral pullbacks on the marker set [n] (or an explicit ordered marker list).

    cyc_star: <<I>> -> <<I-1>>; cyc_star_inv: <<I>> -> <<I+1>>; refl_star:
    <<I>> -> <<n+1-I>>, positions taken in the marker order and image sets
    listed increasingly (no reordering sign).
    """
    labels = list(range(1, n + 1)) if isinstance(n, int) else list(n)
    m = len(labels)
    pos = {x: i for i, x in enumerate(labels)}
    if op == "cyc_star":
        mp = {x: labels[(pos[x] - 1) % m] for x in labels}
    elif op == "cyc_star_inv":
        mp = {x: labels[(pos[x] + 1) % m] for x in labels}
    elif op == "refl_star":
        mp = {x: labels[m - 1 - pos[x]] for x in labels}
    else:
        raise FunctionaryError(f"unknown pullback {op!r}")
    bad = F.labels() - set(labels)
    if bad:
        raise FunctionaryError(f"labels {sorted(bad)} outside the marker set")
    return relabel_expr(F, mp, sort_sign=False)


# evaluation

def evaluate(F: Expr, bracket: Callable[[tuple], object], zero=Fraction(0)):
    """Evaluate F with ``bracket(I)`` giving <<I>> for sorted I.

    Values may live in any field-like type; a zero denominator raises
    FunctionaryZeroDivision naming the offending sub-expression.
    """
    memo: dict = {}

    def go(x):
        k = id(x)
        if k in memo:
            return memo[k]
        if isinstance(x, Tw):
            v = bracket(x.I)
        elif isinstance(x, Const):
            v = x.value + zero
        elif isinstance(x, Chain):
            v = go(x.expansion)
        elif isinstance(x, Add):
            v = zero
            for t in x.terms:
                v = v + go(t)
        elif isinstance(x, Mul):
            v = go(x.factors[0])
            for f in x.factors[1:]:
                v = v * go(f)
        elif isinstance(x, Quot):
            d = go(x.den)
            if d == 0:
                raise FunctionaryZeroDivision(x.den)
            v = go(x.num) / d
        else:
            raise FunctionaryError(f"unknown node {x!r}")
        memo[k] = v
        return v

    return go(F)


class TwistorPoint:
    """A point Y in Gr(k, k+4) together with Z; evaluates <<I>> exactly.

    Rows of Z are indexed by ``labels`` (default 1..n).  Brackets are computed
    by projecting Z modulo Y: with B = [Y; E] for unit rows E off the pivots of
    Y, <<I>> = det(B) * det(W_I) where W = last four coordinates of Z B^-1.
    """

    def __init__(self, Y: RationalMatrix | None, Z: RationalMatrix, labels: Sequence[int] | None = None):
        zrows = [list(r) for r in Z.rows]
        width = len(zrows[0]) if zrows else 0
        yrows = [] if Y is None else [list(r) for r in Y.rows]
        k = len(yrows)
        if width != k + 4:
            raise FunctionaryError(f"Z has {width} columns but Y has {k} rows (need k+4)")
        if Y is not None and Y.n != width:
            raise FunctionaryError("Y and Z have different widths")
        self.k = k
        self.Y = Y
        self.Z = Z
        self.labels = tuple(labels) if labels is not None else tuple(range(1, len(zrows) + 1))
        if len(self.labels) != len(zrows):
            raise FunctionaryError("label count differs from the number of rows of Z")
        self._row = {x: i for i, x in enumerate(self.labels)}
        if k == 0:
            self.scale = Fraction(1)
            self.W = [list(map(Fraction, r)) for r in zrows]
        else:
            red, piv = rref(yrows)
            if len(piv) < k:
                raise FunctionaryError("Y does not have full rank")
            free = [j for j in range(width) if j not in piv]
            B = yrows + [[Fraction(int(j == f)) for j in range(width)] for f in free]
            self.scale = det(B)
            coords = solve_left(B, zrows)
            self.W = [row[k:] for row in coords]
        self._cache: dict = {}

    def bracket(self, I) -> Fraction:
        I = tuple(I)
        v = self._cache.get(I)
        if v is None:
            v = self.scale * det([self.W[self._row[i]] for i in I])
            self._cache[I] = v
        return v

    def restrict(self, labels: Iterable[int]) -> "TwistorPoint":
        """Same point, viewed on a subset of the marker labels."""
        labels = sorted(labels)
        sub = TwistorPoint.__new__(TwistorPoint)
        sub.k, sub.Y, sub.Z, sub.scale = self.k, self.Y, self.Z, self.scale
        sub.labels = tuple(labels)
        sub._row = {x: i for i, x in enumerate(labels)}
        sub.W = [self.W[self._row[x]] for x in labels]
        sub._cache = {}
        return sub

    def __call__(self, F: Expr) -> Fraction:
        return evaluate(F, self.bracket)


def eval_twistor(I: Sequence[int], Y: RationalMatrix | None, Z: RationalMatrix,
                 mode: str = "stacked_det", C: RationalMatrix | None = None,
                 labels: Sequence[int] | None = None) -> Fraction:
    """<<I>> at (Y, Z), by one of three independent routes.

    stacked_det: determinant of Y's rows stacked over Z_I; cauchy_binet:
    sum over J of <J>_C <J, I>_Z for Y = CZ; projected: the TwistorPoint route.
    Unsorted I gives the alternating sign.
    """
    I = tuple(I)
    if len(I) != 4:
        raise FunctionaryError("twistor brackets have 4 indices")
    labels = tuple(labels) if labels is not None else tuple(range(1, Z.k + 1))
    row = {x: i for i, x in enumerate(labels)}
    if any(i not in row for i in I):
        raise FunctionaryError(f"indices {I} not among the labels of Z")
    zr = Z.rows
    width = Z.n
    if mode == "stacked_det":
        yrows = [] if Y is None else [list(r) for r in Y.rows]
        if len(yrows) + 4 != width or (Y is not None and Y.n != width):
            raise FunctionaryError("dimension mismatch between Y and Z")
        return det(yrows + [list(zr[row[i]]) for i in I])
    if mode == "cauchy_binet":
        if C is None:
            raise FunctionaryError("cauchy_binet mode needs C")
        if C.n != len(labels) or C.k + 4 != width:
            raise FunctionaryError("dimension mismatch between C and Z")
        if C.k == 0:
            return det([list(zr[row[i]]) for i in I])
        P = plucker_coordinates(C)
        total = Fraction(0)
        cl = C.labels
        for J, v in P.coords.items():
            if v == 0 or set(J) & set(I):
                continue
            # columns of C correspond to rows of Z in order
            Jrows = [zr[cl.index(j)] for j in J]
            total += v * det(Jrows + [list(zr[row[i]]) for i in I])
        return total
    if mode == "projected":
        s, Is = sort_with_sign(I)
        if s == 0:
            return Fraction(0)
        return s * TwistorPoint(Y, Z, labels).bracket(Is)
    raise FunctionaryError(f"unknown mode {mode!r}")


def eval_expr(F: Expr, Y, Z: RationalMatrix | None = None, labels=None) -> Fraction:
    """Exact value of F at (Y, Z); Y may also be a ready TwistorPoint."""
    if isinstance(Y, TwistorPoint) and Z is None:
        return Y(F)
    return TwistorPoint(Y, Z, labels)(F)


def sign_at(F: Expr, point: TwistorPoint) -> int:
    v = point(F)
    return (v > 0) - (v < 0)


# text form

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_sexpr(text: str) -> Expr:
    """Inverse of ``Expr.sexpr``."""
    toks = _TOKEN.findall(text)
    pos = 0

    def atom(t):
        if "/" in t:
            return Const(Fraction(t))
        return Const(int(t))

    def node():
        nonlocal pos
        t = toks[pos]
        pos += 1
        if t != "(":
            return atom(t)
        head = toks[pos]
        pos += 1
        if head == "tw":
            idx = []
            while toks[pos] != ")":
                idx.append(parse_label(toks[pos]))
                pos += 1
            pos += 1
            return Tw(tuple(idx))
        if head == "chain":
            parts = []
            while toks[pos] != ")":
                parts.append(toks[pos])
                pos += 1
            pos += 1
            return ChainExpression.parse(" ".join(parts)).as_expr()
        args = []
        while toks[pos] != ")":
            args.append(node())
        pos += 1
        if head == "add":
            return add(*args)
        if head == "sub":
            return add(args[0], neg(args[1]))
        if head == "mul":
            return mul(*args)
        if head == "neg":
            return neg(args[0])
        if head == "div":
            return div(args[0], args[1])
        raise FunctionaryError(f"unknown head {head!r}")

    out = node()
    if pos != len(toks):
        raise FunctionaryError("trailing tokens in expression")
    return out
