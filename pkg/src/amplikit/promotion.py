"""Product promotion and rescaled product promotion on functionaries.

Promotion Psi_ac substitutes vectors: on the left side b -> b - <bcdn>/<acdn> a,
on the right side n -> (<acdn> b - <bcdn> a)/<abcd> and d -> d - <abdn>/<abcn> c.
Brackets are promoted by the five explicit rules, chain leaves of the usual
shape by extending their end clauses, and anything else leaf by leaf after
expansion.

Rescaled promotion divides out the Laurent monomial in T' = {<abcn>, <abcd>,
<bcdn>, <acdn>}.  The exponent of each T' element is found as an exact
valuation: the promoted expression is evaluated on truncated Laurent series
along a random line of Gr(4, n) that crosses the hypersurface where that
element vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import functionary as fn
from .exact import det, positive_Z, rng_for
from .functionary import (Chain, ChainExpression, Const, Expr, FunctionaryError, Tw,
                          TwistorPoint, div, evaluate, mul, tw)


class PromotionError(FunctionaryError):
    pass


@dataclass(frozen=True)
class PromotionContext:
    """Indices a, b, c, d, n on an ordered marker set N (n = last marker)."""

    markers: tuple
    a: int
    b: int
    c: int
    d: int

    def __init__(self, markers: Sequence[int], a: int, c: int):
        N = tuple(sorted(markers))
        if a not in N or c not in N:
            raise PromotionError(f"a={a} or c={c} not a marker")
        ia, ic = N.index(a), N.index(c)
        if ia + 1 >= len(N) or ic + 2 != len(N) - 1:
            raise PromotionError("need c, d, n to be the last three markers")
        b, d = N[ia + 1], N[ic + 1]
        if not b < c:
            raise PromotionError(f"need a < b < c, got a={a}, b={b}, c={c}")
        object.__setattr__(self, "markers", N)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_indices(cls, markers, indices) -> "PromotionContext":
        a, b, c, d, n = indices
        ctx = cls(markers, a, c)
        if (ctx.b, ctx.d, ctx.n) != (b, d, n):
            raise PromotionError(f"indices {indices} are not of the form a,b consecutive and c,d,n last")
        return ctx

    @property
    def n(self) -> int:
        return self.markers[-1]

    @property
    def indices(self) -> tuple:
        return (self.a, self.b, self.c, self.d, self.n)

    @property
    def upper(self) -> bool:
        return self.a == self.markers[0]

    @property
    def NL(self) -> tuple:
        return tuple(x for x in self.markers if x <= self.b) + (self.n,)

    @property
    def NR(self) -> tuple:
        return tuple(x for x in self.markers if self.b <= x)

    def _prev(self, x):
        return self.markers[self.markers.index(x) - 1]

    def _next(self, x):
        return self.markers[self.markers.index(x) + 1]

    def degenerate_cases(self) -> list[str]:
        out = []
        pos = self.markers.index(self.a)
        if pos == 0:
            out.append("upper")
        elif pos == 1:
            out.append("a=2")
        elif pos == 2:
            out.append("a=3")
        if self._next(self.b) == self.c:
            out.append("c=b+1")
        return out

    @property
    def T_prime(self) -> tuple:
        a, b, c, d, n = self.indices
        base = [(a, b, c, n), (a, b, c, d), (b, c, d, n)]
        if not self.upper:
            base.append((a, c, d, n))
        return tuple(base)

    def T(self) -> list[Expr]:
        """The additionally frozen variables, with coinciding ones identified."""
        a, b, c, d, n = self.indices
        N = self.markers
        out: list[Expr] = [tw(*I) for I in self.T_prime]
        cases = self.degenerate_cases()
        if "upper" not in cases:
            out.append(tw(a, b, d, n))
            out.append(tw(a, b, self._next(b), n))
            if "a=2" not in cases:
                out.append(fn.chain((N[0], N[1], n), (a, b), (c, d, n)))
                out.append(tw(self._prev(a), a, b, n))
                out.append(tw(N[0], a, b, n))
        uniq = []
        for x in out:
            if x not in uniq:
                uniq.append(x)
        return uniq

    def side_of(self, labels) -> str:
        labels = set(labels)
        if labels <= set(self.NL):
            return "L"
        if labels <= set(self.NR):
            return "R"
        raise PromotionError(f"labels {sorted(labels)} straddle N_L and N_R")

    def __str__(self) -> str:
        return f"Psi_{{{self.a},{self.c}}} (a,b,c,d,n)={self.indices}"


# bracket rules

def _quotient(num_chain: Sequence[Sequence[int]], den: Sequence[int]) -> Expr:
    """Chain over a bracket, cancelling when the chain factors through it."""
    E = ChainExpression(num_chain)
    expanded = E.simplified()
    d = tw(*den)
    c, rest = fn.split_coefficient(expanded)
    factors = list(rest.factors) if isinstance(rest, fn.Mul) else [rest]
    dc, drest = fn.split_coefficient(d)
    if drest in factors:
        factors.remove(drest)
        return mul(Const(c / dc), *factors)
    if isinstance(expanded, (Tw, fn.Mul, Const)):
        return div(expanded, d)
    return div(Chain(E), d)


def promote_bracket(I: Sequence[int], ctx: PromotionContext, side: str | None = None) -> Expr:
    """Psi_ac of <I> (unsorted input allowed, sign folded in)."""
    s, Is = fn.sort_with_sign(I)
    if s == 0:
        return Const(0)
    if side is None:
        side = ctx.side_of(Is)
    elif not set(Is) <= set(ctx.NL if side == "L" else ctx.NR):
        raise PromotionError(f"bracket {Is} is not on side {side}")
    out = _promote_sorted(Is, ctx, side)
    return out if s > 0 else fn.neg(out)


def _promote_sorted(I: tuple, ctx: PromotionContext, side: str) -> Expr:
    a, b, c, d, n = ctx.indices
    S = set(I)
    if side == "L":
        if b not in S or a in S:
            return Tw(I)
        if n in S:  # (a2): <i j b n>
            i, j = [x for x in I if x not in (b, n)]
            return _quotient([(i, j, n), (a, b), (c, d, n)], (a, c, d, n))
        i, j, l = [x for x in I if x != b]  # (a1)
        return _quotient([(i, j, l), (b, a), (c, d, n)], (a, c, d, n))
    if d in S and n not in S:  # (b1)
        if c in S:
            return Tw(I)
        i, j, l = [x for x in I if x != d]
        return _quotient([(i, j, l), (d, c), (a, b, n)], (a, b, c, n))
    if d in S and n in S:  # (b2)
        i, j = [x for x in I if x not in (d, n)]
        return _quotient([(i, j, n), (c, d), (a, b, n)], (a, b, c, n))
    if n in S:  # (b3)
        i, j, l = [x for x in I if x != n]
        return _quotient([(i, j, l), (b, a), (c, d, n)], (a, b, c, d))
    return Tw(I)


def _promote_chain(E: ChainExpression, ctx: PromotionContext, side: str) -> Expr | None:
    """Clause-level promotion for chains of the standard shape, else None."""
    a, b, c, d, n = ctx.indices
    cl = [list(x) for x in E.clauses]
    if len(cl) == 1:
        return None
    if side == "L":
        # b (the penultimate marker of N_L) must sit with a, or be absent
        if any(b in x and a not in x for x in cl):
            return None
        return Chain(E)
    # right side: n only in end clauses; d only next to c
    for pos, x in enumerate(cl):
        if n in x and pos not in (0, len(cl) - 1):
            return None
        if d in x and c not in x:
            return None
    new = cl
    ext = 0
    last = new[-1]
    if n in last and d not in last:
        i, j = [x for x in last if x != n]
        sgn = fn.sort_with_sign(last)[0] * fn.sort_with_sign([i, j, n])[0]
        new = new[:-1] + [[i, j], [b, a], [c, d, n]]
        ext += 1
    else:
        sgn = 1
    first = new[0]
    if n in first and d not in first:
        i, j = [x for x in first if x != n]
        sgn *= fn.sort_with_sign(first)[0] * fn.sort_with_sign([n, i, j])[0]
        new = [[n, c, d], [b, a], [i, j]] + new[1:]
        ext += 1
    if not ext:
        return Chain(E)
    return div(mul(Const(sgn), Chain(ChainExpression(new))), mul(*([tw(a, b, c, d)] * ext)))


def promote_expr(F: Expr, ctx: PromotionContext, side: str | None = None) -> Expr:
    """Leaf-wise promotion; all leaves must lie on one side."""
    labels = F.labels()
    if side is None:
        if not labels:
            return F
        side = ctx.side_of(labels)
    elif not labels <= set(ctx.NL if side == "L" else ctx.NR):
        raise PromotionError(f"expression has labels off side {side}")

    def leaf(x):
        if isinstance(x, Tw):
            return _promote_sorted(x.I, ctx, side)
        out = _promote_chain(x.chain, ctx, side)
        if out is None:
            return fn.map_leaves(x.expansion, leaf)
        return out

    return fn.map_leaves(F, leaf)


def substitution_oracle(F: Expr, ctx: PromotionContext, point: TwistorPoint, side: str) -> Fraction:
    """Psi(F) at ``point`` by literally substituting the promoted vectors.

    Independent of the bracket rules; works on the projected coordinates W,
    where twistor brackets are plain 4x4 minors times a constant.
    """
    a, b, c, d, n = ctx.indices
    W = {x: list(point.W[point._row[x]]) for x in point.labels}
    br = lambda *I: det([W[i] for i in I])
    new = dict(W)
    if side == "L":
        r = br(b, c, d, n) / br(a, c, d, n)
        new[b] = [x - r * y for x, y in zip(W[b], W[a])]
    else:
        abcd, abcn, abdn = br(a, b, c, d), br(a, b, c, n), br(a, b, d, n)
        new[n] = [x - abcn / abcd * y + abdn / abcd * z for x, y, z in zip(W[n], W[d], W[c])]
        new[d] = [x - abdn / abcn * y for x, y in zip(W[d], W[c])]
    return evaluate(F, lambda I: point.scale * det([new[i] for i in I]))


# truncated Laurent series over Q

class Laurent:
    """sum_{e >= v} coeffs[e - v] t^e, exact up to (excluding) t^(v + len(coeffs))."""

    __slots__ = ("v", "c")

    def __init__(self, v: int, coeffs: Sequence[Fraction]):
        coeffs = list(coeffs)
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            v += 1
        self.v, self.c = v, coeffs

    @classmethod
    def const(cls, x, top: int) -> "Laurent":
        """Constant known exactly below t^top."""
        x = Fraction(x)
        top = max(top, 1)
        return cls(0, [x] + [Fraction(0)] * (top - 1)) if x != 0 else cls(top, [])

    @property
    def top(self) -> int:
        return self.v + len(self.c)

    def _at(self, e):
        i = e - self.v
        return self.c[i] if 0 <= i < len(self.c) else Fraction(0)

    def __add__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent.const(other, self.top)
        top = min(self.top, other.top)
        v = min(self.v, other.v)
        return Laurent(v, [self._at(e) + other._at(e) for e in range(v, top)])

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.v, [-x for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            other = Fraction(other)
            return Laurent(self.v, [x * other for x in self.c]) if other else Laurent(self.top, [])
        L = min(len(self.c), len(other.c))
        out = [Fraction(0)] * L
        for i in range(L):
            if self.c[i]:
                for j in range(L - i):
                    out[i + j] += self.c[i] * other.c[j]
        return Laurent(self.v + other.v, out)

    __rmul__ = __mul__

    def inverse(self):
        if not self.c:
            raise ZeroDivisionError("series vanishes to the working precision")
        L = len(self.c)
        inv = [Fraction(0)] * L
        inv[0] = 1 / self.c[0]
        for m in range(1, L):
            s = sum(self.c[j] * inv[m - j] for j in range(1, m + 1))
            inv[m] = -s * inv[0]
        return Laurent(-self.v, inv)

    def __truediv__(self, other):
        if not isinstance(other, Laurent):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.c
        return NotImplemented

    def __hash__(self):
        return hash((self.v, tuple(self.c)))


SERIES_PRECISION = 10


def _line_through(T: Sequence[int], labels: Sequence[int], rng) -> tuple[dict, dict]:
    """Rows Z0, V with <T>(Z0 + t V) vanishing to order exactly one at t = 0."""
    Z = {x: [Fraction(rng.randint(-50, 50)) for _ in range(4)] for x in labels}
    p, q, r, s = T
    coef = [Fraction(rng.randint(1, 20)) * rng.choice((1, -1)) for _ in range(3)]
    Z[s] = [coef[0] * u + coef[1] * w + coef[2] * y for u, w, y in zip(Z[p], Z[q], Z[r])]
    V = {x: [Fraction(0)] * 4 for x in labels}
    V[s] = [Fraction(rng.randint(-50, 50)) for _ in range(4)]
    return Z, V


def valuation(F: Expr, T: Sequence[int], labels: Sequence[int], seed: int = 0,
              prec: int = SERIES_PRECISION) -> int:
    """Order of vanishing of F along {<T> = 0} (negative for poles).

    Uses a random line meeting the hypersurface transversally; brackets are
    affine in t on such a line, so every leaf is an exact polynomial series.
    """
    rng = rng_for(seed, hash(tuple(T)) & 0xFFFF, "valuation")
    for _attempt in range(5):
        Z, V = _line_through(T, labels, rng)
        if det([Z[x] for x in T]) != 0:
            continue

        def br(I):
            # det(Z_I + t V_I) is affine in t since only one row moves
            c0 = det([Z[i] for i in I])
            mov = [i for i in I if any(V[i])]
            c1 = Fraction(0)
            if mov:
                c1 = det([V[i] if i == mov[0] else Z[i] for i in I])
            return Laurent(0, [c0, c1] + [Fraction(0)] * (prec - 2))

        try:
            val = evaluate(F, br, zero=Laurent(prec, []))
        except ZeroDivisionError:
            continue
        if val.c:
            return val.v
    raise PromotionError("could not determine a valuation (expression vanishes on random lines)")


@dataclass
class Monomial:
    """coef * prod <T>^e over T in T'."""

    coef: int = 1
    exps: dict = field(default_factory=dict)

    def expr(self) -> Expr:
        out: list = [Const(self.coef)]
        den: list = []
        for T, e in sorted(self.exps.items()):
            (out if e > 0 else den).extend([Tw(T)] * abs(e))
        return div(mul(*out), mul(*den)) if den else mul(*out)

    def is_one(self) -> bool:
        return self.coef == 1 and not any(self.exps.values())

    def pretty(self) -> str:
        parts = []
        for T, e in sorted(self.exps.items()):
            if e:
                base = "<" + " ".join(map(str, T)) + ">"
                parts.append(base if e == 1 else f"{base}^{e}")
        body = " ".join(parts) or "1"
        return ("-" if self.coef < 0 else "") + body


@dataclass
class RescaledPromotion:
    promoted: Expr  # Psi(x)
    rescaled: Expr  # Psi-bar(x)
    monomial: Monomial  # Psi(x) = monomial * Psi-bar(x)
    determined: bool = True
    note: str = ""


def _cancel(num: Expr, den: Expr) -> Expr:
    """num / den with common bracket factors removed."""
    def parts(e):
        if isinstance(e, fn.Quot):
            n_, d_ = parts(e.num), parts(e.den)
            return n_[0] / d_[0], n_[1] + d_[2], n_[2] + d_[1]
        c, rest = fn.split_coefficient(e)
        fs = list(rest.factors) if isinstance(rest, fn.Mul) else ([] if rest == fn.ONE else [rest])
        return c, fs, []

    cn, nf, nd = parts(num)
    cd, df, dd = parts(den)
    top, bot = nf + dd, nd + df
    for x in list(bot):
        if x in top:
            top.remove(x)
            bot.remove(x)
    return div(mul(Const(cn / cd), *top), mul(*bot)) if bot else mul(Const(cn / cd), *top)


def rescaled_promote(x: Expr, ctx: PromotionContext, side: str | None = None,
                     seed: int = 0, positive_point: TwistorPoint | None = None) -> RescaledPromotion:
    """Psi-bar(x) together with the stripped Laurent monomial in T'.

    The sign of the monomial is fixed so that Psi-bar is positive on the
    totally positive part of Gr(4, n).
    """
    P = promote_expr(x, ctx, side)
    labels = ctx.markers
    exps = {}
    for T in ctx.T_prime:
        e = valuation(P, T, labels, seed)
        if e:
            exps[T] = e
    mono = Monomial(1, exps)
    note = ""
    determined = True
    bare = _cancel(P, mono.expr())
    if isinstance(bare, Const):
        # Psi(x) is itself a monomial; the variable is then a single T' element
        if list(exps.values()) == [1]:
            mono = Monomial(1, {})
            bare = P
        else:
            determined = False
            note = "undetermined-monomial"
    if positive_point is None:
        positive_point = TwistorPoint(None, positive_Z(len(labels), 4, seed=seed + 7), labels)
    v = positive_point(bare)
    if v == 0:
        determined = False
        note = note or "vanishes-at-positive-point"
    elif v < 0:
        mono.coef = -mono.coef
        bare = fn.neg(bare)
    return RescaledPromotion(P, bare, mono, determined, note)
