import random

import pytest
from hypothesis import given, strategies as st

from amplikit.chords import enumerate_diagrams, split_subdiagrams
from amplikit.domino import domino_variables
from amplikit.exact import RationalMatrix, positive_Z
from amplikit.functionary import TwistorPoint, chain, tw
from amplikit.promotion import (PromotionContext, PromotionError, promote_bracket, promote_expr,
                                rescaled_promote, substitution_oracle)


def tp_points(labels, count=5, seed=0):
    """Points of Gr(4, n) with all brackets positive, k = 0."""
    return [TwistorPoint(None, positive_Z(len(labels), 4, seed=seed + s), labels) for s in range(count)]


def generic_points(labels, count=5, seed=0):
    out = []
    for s in range(count):
        rng = random.Random(seed + s)
        Z = RationalMatrix([[rng.randint(-40, 40) for _ in range(4)] for _ in labels])
        out.append(TwistorPoint(None, Z, labels))
    return out


def same_values(F, G, points):
    return all(p(F) == p(G) for p in points)


def test_rescaled_promotion_example_left_product():
    N = (1, 2, 3, 4, 5, 6, 12)
    ctx = PromotionContext(N, 1, 5)
    res = rescaled_promote(tw(3, 4, 6, 12), ctx, "R")
    assert same_values(res.rescaled, chain([3, 4, 12], [5, 6], [1, 2, 12]), generic_points(N))


def test_rescaled_promotion_example_last_product():
    N = tuple(range(1, 13))
    ctx = PromotionContext(N, 5, 10)
    res = rescaled_promote(tw(7, 8, 9, 11), ctx, "R")
    assert same_values(res.rescaled, chain([7, 8, 9], [11, 10], [5, 6, 12]), generic_points(N))


def test_brackets_without_a_pattern_are_fixed():
    ctx = PromotionContext(range(1, 10), 3, 7)
    assert promote_bracket((1, 2, 3, 9), ctx, "L") == tw(1, 2, 3, 9)
    res = rescaled_promote(tw(1, 2, 3, 9), ctx, "L")
    assert res.monomial.is_one() and res.rescaled == tw(1, 2, 3, 9)


def test_context_validation():
    with pytest.raises(PromotionError):
        PromotionContext(range(1, 10), 3, 6)
    ctx = PromotionContext(range(1, 10), 3, 7)
    assert ctx.indices == (3, 4, 7, 8, 9)
    assert ctx.NL == (1, 2, 3, 4, 9) and ctx.NR == (4, 5, 6, 7, 8, 9)
    with pytest.raises(PromotionError):
        ctx.side_of({1, 5})


CONTEXTS = [(tuple(range(1, n + 1)), a, n - 2) for n in (7, 8, 9) for a in range(1, n - 4)]


def random_bracket(side_labels, rng):
    return tuple(sorted(rng.sample(side_labels, 4)))


@pytest.mark.parametrize("N,a,c", CONTEXTS)
def test_bracket_rules_match_vector_substitution(N, a, c):
    ctx = PromotionContext(N, a, c)
    rng = random.Random(a * 100 + c)
    for side, labels in (("L", list(ctx.NL)), ("R", list(ctx.NR))):
        if len(labels) < 4:
            continue
        for _ in range(6):
            I = random_bracket(labels, rng)
            P = promote_bracket(I, ctx, side)
            for pt in tp_points(N, 2, seed=rng.randrange(1000)):
                assert pt(P) == substitution_oracle(tw(*I), ctx, pt, side)


@pytest.mark.parametrize("N,a,c", CONTEXTS[::2])
def test_promotion_is_a_homomorphism(N, a, c):
    ctx = PromotionContext(N, a, c)
    rng = random.Random(c)
    R = list(ctx.NR)
    F = tw(*random_bracket(R, rng))
    G = tw(*random_bracket(R, rng))
    for pt in tp_points(N, 3, seed=9):
        assert pt(promote_expr(F * G, ctx, "R")) == pt(promote_expr(F, ctx, "R")) * pt(promote_expr(G, ctx, "R"))
        assert pt(promote_expr(F + G, ctx, "R")) == pt(promote_expr(F, ctx, "R")) + pt(promote_expr(G, ctx, "R"))


@pytest.mark.parametrize("N,a,c", CONTEXTS[::3])
def test_promotion_keeps_homogeneity_degrees(N, a, c):
    """Scaling Z_i by 2 scales the promoted value by 2^deg_i."""
    ctx = PromotionContext(N, a, c)
    rng = random.Random(a + c)
    R = list(ctx.NR)
    F = tw(*random_bracket(R, rng)) * tw(*random_bracket(R, rng))
    P = promote_expr(F, ctx, "R")
    Z = positive_Z(len(N), 4, seed=3)
    base = TwistorPoint(None, Z, N)(P)
    for i in N:
        rows = [list(r) for r in Z.rows]
        rows[N.index(i)] = [2 * x for x in rows[N.index(i)]]
        val = TwistorPoint(None, RationalMatrix(rows), N)(P)
        d = F.degree(i)
        assert val == base * 2 ** d


DIAGRAMS = [D for n in range(7, 11) for k in (2, 3) for D in enumerate_diagrams(n, k)
            if D.chord(D.k).d == D.penultimate]


@pytest.mark.parametrize("D", random.Random(4).sample(DIAGRAMS, 12), ids=str)
def test_rescaled_promotion_monomial_identity(D):
    """Psi(x) = monomial * Psi-bar(x) at panel points, for the domino variables of D_L and D_R."""
    top = D.chord(D.k)
    ctx = PromotionContext(D.markers, top.a, top.c)
    DL, DR = split_subdiagrams(D)
    pts = tp_points(D.markers, 3, seed=21) + generic_points(D.markers, 2, seed=5)
    for side, sub in (("L", DL), ("R", DR)):
        for v in domino_variables(sub):
            res = rescaled_promote(v.expr, ctx, side)
            for pt in pts:
                assert pt(res.promoted) == pt(res.monomial.expr()) * pt(res.rescaled)
            if res.determined:
                assert all(pt(res.rescaled) > 0 for pt in tp_points(D.markers, 3, seed=40))


@given(st.integers(0, 10 ** 6))
def test_chain_positivity(seed):
    rng = random.Random(seed)
    n = rng.randint(8, 12)
    i, j, a, b, c, d = sorted(rng.sample(range(1, n), 6))
    pt = tp_points(tuple(range(1, n + 1)), 1, seed=seed)[0]
    assert pt(chain([i, j, n], [a, b], [c, d, n])) > 0
