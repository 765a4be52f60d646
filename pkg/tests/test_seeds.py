import random

import pytest

from amplikit.chords import ChordDiagram, chord_relations, enumerate_diagrams
from amplikit.domino import domino_signs
from amplikit.functionary import chain, tw
from amplikit.seeds import (EMPTY, Panel, Quiver, SeedError, build_sigma_D, canonical_vertex,
                            check_exchange_relations, check_shifted, cyc_mutation_order, cyc_mutation_sequence,
                            exchange_data_sigma_D, panel_collisions, random_mutations, rectangles_seed,
                            top_chord_identities, verify_identity_on_panel)
from conftest import cd_example


def matrix_mutation(B, k, frozen):
    """Textbook exchange-matrix mutation; entries between two frozen rows stay zero."""
    n = len(B)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i in frozen and j in frozen:
                continue
            if k in (i, j):
                out[i][j] = -B[i][j]
            else:
                bik, bkj = B[i][k], B[k][j]
                out[i][j] = B[i][j] + (bik * bkj if bik > 0 and bkj > 0 else 0) - (
                    bik * bkj if bik < 0 and bkj < 0 else 0)
    return out


@pytest.mark.parametrize("k,n", [(2, 5), (3, 6), (3, 7), (4, 8)])
def test_quiver_mutation_matches_matrix_rule(k, n):
    S = rectangles_seed(k, n)
    rng = random.Random(k * n)
    Q = S.quiver
    for _ in range(12):
        v = rng.choice(Q.mutable)
        frozen = {Q.vertices.index(u) for u in Q.frozen}
        want = matrix_mutation(Q.matrix(), Q.vertices.index(v), frozen)
        Q = Q.mutate(v)
        assert Q.matrix() == want


@pytest.mark.parametrize("k,n", [(2, 6), (3, 6), (3, 7)])
def test_mutation_is_an_involution(k, n):
    S = rectangles_seed(k, n)
    T, seq = random_mutations(S, 8, random.Random(n))
    for v in seq:
        assert T.mutate(v).mutate(v).values == T.values
        assert T.mutate(v).mutate(v).quiver.same_as(T.quiver)


def test_mutated_values_are_pluckers():
    """Every cluster variable reachable from the Gr(2,n) rectangles seed is a Plucker coordinate."""
    S = rectangles_seed(2, 7)
    pl = {S.panel.bracket_values(I) for I in ((i, j) for i in range(1, 8) for j in range(i + 1, 8))}
    T, _ = random_mutations(S, 30, random.Random(1))
    assert all(v in pl for v in T.values.values())


def test_rectangles_labels_4_7():
    S = rectangles_seed(4, 7)
    assert sorted(S.labels[v] for v in S.quiver.frozen) == ["1234", "1237", "1267", "1567", "2345", "3456", "4567"]
    assert [S.labels[v] for v in cyc_mutation_order(4, 7, 1)] == ["2567", "3567", "2367", "3467", "2347", "3457"]
    assert S.labels[EMPTY] == "4567"


@pytest.mark.parametrize("k,n", [(2, 5), (3, 6), (4, 7), (3, 7), (4, 9)])
def test_cyclic_shift_by_mutation(k, n):
    S = rectangles_seed(k, n)
    assert len(S.quiver.vertices) == k * (n - k) + 1
    up = cyc_mutation_sequence(S, 1)
    assert check_shifted(up, k, n, 1) == []
    assert check_shifted(cyc_mutation_sequence(S, -1), k, n, -1) == []
    back = cyc_mutation_sequence(up, -1)
    assert check_shifted(back, k, n, 0) == [] and back.quiver.same_as(S.quiver)


def test_gr_1_5_has_no_mutable_vertex():
    S = rectangles_seed(1, 5)
    assert S.quiver.mutable == []
    with pytest.raises(SeedError):
        rectangles_seed(0, 5)


def test_cd_example_seed():
    D = cd_example()
    S = build_sigma_D(D)
    assert len(S.quiver.vertices) == 4 * D.n - 15
    assert sorted(S.quiver.mutable) == sorted([("beta", 2), ("delta", 3), ("epsilon", 3), ("alpha", 5),
                                               ("delta", 5), ("epsilon", 5), ("alpha", 6), ("beta", 6)])
    assert canonical_vertex(D, ("beta", 4)) == ("alpha", 5)
    assert S.violations() == []
    assert S.in_sign(("alpha", 6)) == -1 and S.out_sign(("alpha", 6)) == -1


def test_cd_example_exchange_relations():
    D = cd_example()
    ex = {e.vertex: e for e in exchange_data_sigma_D(D)}
    assert ex[("alpha", 5)].monomials == (tuple(sorted([("alpha", 6), ("beta", 5), ("epsilon", 4)])),
                                          tuple(sorted([("alpha", 4), ("epsilon", 5)])))
    assert ex[("delta", 5)].monomials == (tuple(sorted([("epsilon", 5), ("gamma", 4)])),
                                          tuple(sorted([("delta", 4), ("gamma", 5)])))
    P = Panel.positive(D.markers, 4, 6, seed=2)
    primed = {
        ("beta", 2): chain([3, 4, 6], [2, 1], [8, 9, 15]),
        ("delta", 3): chain([15, 8, 9], [2, 1], [5, 6], [8, 9], [13, 14, 15]),
        ("epsilon", 3): tw(5, 6, 8, 15),
        ("alpha", 5): tw(9, 11, 12, 13),
        ("delta", 5): tw(9, 10, 11, 13),
        ("epsilon", 5): chain([10, 11, 12], [9, 8], [13, 14, 15]),
        ("alpha", 6): tw(8, 10, 12, 13),
        ("beta", 6): tw(1, 2, 9, 15),
    }
    assert set(primed) == set(ex)
    for v, want in primed.items():
        assert P.values(ex[v].primed) == P.values(want), v
    checks = check_exchange_relations(D)
    assert len(checks) == 8 and all(c.ok for c in checks)


SWEEP = [D for n in range(6, 10) for k in range(1, n - 3) for D in enumerate_diagrams(n, k)]


@pytest.mark.parametrize("D", random.Random(3).sample(SWEEP, 40), ids=str)
def test_exchange_relations_on_a_panel_of_diagrams(D):
    S = build_sigma_D(D)
    assert S.violations() == []
    assert len(S.quiver.vertices) == 4 * D.n - 15
    signs = domino_signs(D)
    for v in S.quiver.vertices:
        if v[0] != "extra":
            assert S.sigma[v] == signs[v]
    for c in check_exchange_relations(D):
        assert c.ok, (c.vertex, c.case)


def test_signed_mutation_tracks_signs_on_the_tile():
    D = cd_example()
    S = build_sigma_D(D, extras=False)
    tile = Panel.tile(D, 3)
    for ex in exchange_data_sigma_D(D):
        T = S.mutate(ex.vertex)
        assert all(s == T.sigma[ex.vertex] for s in tile.values(ex.primed).signs())


def test_identity_check_rejects_a_false_identity():
    P = Panel.positive(range(1, 9), 4, 6, seed=1)
    lhs = tw(1, 2, 3, 4) * tw(5, 6, 7, 8)
    assert verify_identity_on_panel(lhs, lhs, P)
    assert not verify_identity_on_panel(lhs, tw(1, 2, 3, 5) * tw(4, 6, 7, 8), P)
    assert not verify_identity_on_panel(lhs, lhs + tw(1, 2, 3, 4) * 0 + 1, P)


def test_no_panel_collisions():
    assert panel_collisions(range(1, 13), 2000) == 0


def top_chord_cases():
    out = []
    for n in range(6, 10):
        for k in (2, 3):
            for D in enumerate_diagrams(n, k):
                R = chord_relations(D)
                i = D.k
                for j in list(R.children[i]) + [j for j in range(1, D.k + 1) if R.right_h2t_sibling(j) == i]:
                    out.append((D, i, j))
    return out


TOP = top_chord_cases()


def test_every_identity_pattern_is_exercised():
    names = set()
    for D, i, j in TOP:
        names |= set(top_chord_identities(D.chord(i), D.chord(j), D.markers[-1]))
    assert names == {"R1", "R1'", "R2", "R3a", "R3b", "R3a'", "R3b'"}


@pytest.mark.parametrize("D,i,j", random.Random(6).sample(TOP, 60), ids=str)
def test_top_chord_identities(D, i, j):
    P = Panel.positive(D.markers, 4, 8, seed=i + 10 * j)
    for name, (lhs, rhs) in top_chord_identities(D.chord(i), D.chord(j), D.markers[-1]).items():
        assert verify_identity_on_panel(lhs, rhs, P), name


def test_chordless_seed_is_all_frozen():
    D = ChordDiagram(range(1, 8))
    S = build_sigma_D(D)
    assert S.quiver.mutable == []
    assert len(S.quiver.vertices) == 4 * 7 - 15


def test_quiver_rejects_loops():
    with pytest.raises(SeedError):
        Quiver(["a"], (), [("a", "a")])
