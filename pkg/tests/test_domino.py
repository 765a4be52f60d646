import random

import pytest

from amplikit.amplituhedron import amplituhedron_map
from amplikit.cells import cell_point, recipe_from_diagram
from amplikit.chords import ChordDiagram, enumerate_diagrams
from amplikit.domino import FAMILIES, domino_signs, domino_variables, partition_mutable_frozen
from amplikit.exact import positive_Z
from amplikit.functionary import TwistorPoint, chain, tw
from conftest import cd_example


def twistor_points(D, count, seed=0):
    return [TwistorPoint(None, positive_Z(D.n, 4, seed=seed + s), D.markers) for s in range(count)]


def tile_points(D, count, seed=0):
    r = recipe_from_diagram(D)
    out = []
    for s in range(count):
        C = cell_point(r, seed=seed + s)
        Z = positive_Z(D.n, D.k + 4, seed=seed + 100 + s)
        out.append(TwistorPoint(amplituhedron_map(C, Z), Z, D.markers))
    return out


def test_cd_example_printed_variables():
    V = {v.name: v.expr for v in domino_variables(cd_example())}
    pts = twistor_points(cd_example(), 3)
    want = {
        "alpha_6": tw(9, 13, 14, 15),
        "beta_5": tw(8, 9, 12, 13),
        "gamma_3": chain([15, 1, 2], [8, 9], [13, 14, 15]),
        "gamma_1": chain([15, 8, 9], [2, 1], [3, 4], [5, 6], [8, 9, 15]),
        "delta_6": tw(8, 9, 13, 15),
        "epsilon_6": tw(8, 9, 13, 14),
    }
    for name, expr in want.items():
        assert all(p(V[name]) == p(expr) for p in pts), name


def test_variables_are_ordered_by_chord_then_family():
    V = domino_variables(cd_example())
    assert len(V) == 30
    assert [v.family for v in V[:5]] == list(FAMILIES)
    assert [v.index for v in V[::5]] == [1, 2, 3, 4, 5, 6]


DIAGRAMS = [D for n in range(6, 11) for k in (1, 2, 3) if k <= n - 4 for D in enumerate_diagrams(n, k)]
PANEL = random.Random(7).sample(DIAGRAMS, 20)


@pytest.mark.parametrize("D", [cd_example()] + PANEL, ids=str)
def test_closed_form_equals_recursion(D):
    closed = domino_variables(D)
    rec = domino_variables(D, "recursive")
    for p in twistor_points(D, 3, seed=11):
        for v, w in zip(closed, rec):
            assert (v.family, v.index) == (w.family, w.index)
            assert p(v.expr) == p(w.expr), v.name


def test_cd_example_negative_variables():
    neg = {k for k, s in domino_signs(cd_example()).items() if s < 0}
    assert neg == {("alpha", 2), ("alpha", 3), ("alpha", 5), ("beta", 1), ("beta", 4), ("beta", 6),
                   ("delta", 1), ("delta", 5), ("delta", 6), ("gamma", 2)}


def test_cd_example_mutable_variables():
    mut, frozen = partition_mutable_frozen(cd_example())
    assert mut == {("alpha", 5), ("alpha", 6), ("beta", 2), ("beta", 4), ("beta", 6), ("delta", 3),
                   ("delta", 5), ("epsilon", 3), ("epsilon", 5)}
    assert len(frozen) == 30 - len(mut)


SIGN_PANEL = random.Random(8).sample([D for D in DIAGRAMS if D.k >= 2], 20)


@pytest.mark.parametrize("D", SIGN_PANEL, ids=str)
def test_sign_rule_holds_on_the_tile(D):
    signs = domino_signs(D)
    V = domino_variables(D)
    for p in tile_points(D, 20, seed=3):
        for v in V:
            val = p(v.expr)
            assert val != 0 and (1 if val > 0 else -1) == signs[(v.family, v.index)], v.name


def test_sign_rule_on_cd_example():
    signs = domino_signs(cd_example())
    V = domino_variables(cd_example())
    for p in tile_points(cd_example(), 3):
        for v in V:
            assert (p(v.expr) > 0) == (signs[(v.family, v.index)] > 0), v.name


def test_epsilon_is_always_positive():
    for D in DIAGRAMS[::5]:
        assert all(s == 1 for (f, _), s in domino_signs(D).items() if f == "epsilon")


def test_single_chord_variables():
    D = ChordDiagram(range(1, 8), [(2, 3, 4, 5)])
    V = {v.family: v.expr for v in domino_variables(D)}
    assert V["alpha"] == tw(3, 4, 5, 7) and V["epsilon"] == tw(2, 3, 4, 5)
    assert partition_mutable_frozen(D)[0] == set()
