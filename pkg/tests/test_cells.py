import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from amplikit import positroid as pz
from amplikit.cells import (Recipe, RecipeError, StepTuple, bcfw_matrix, bcfw_matrix_rows, bcfw_product_matrix,
                            cell_point, chart_jacobian_rank, enumerate_general_cells, enumerate_standard_cells,
                            matrix_positroid, parse_recipe, random_parameters, recipe_errors,
                            recipe_from_diagram, recipe_positroid)
from amplikit.chords import ChordDiagram
from amplikit.exact import RationalMatrix, plucker_coordinates, pre
from conftest import cd_example, example_recipe

Z1 = tuple(map(F, (2, 3, 5, 7, 11)))
Z2 = tuple(map(F, (13, 17, 19, 23, 29)))
Z3 = tuple(map(F, (31, 37, 41, 43, 47)))
Z4 = tuple(map(F, (53, 59, 61, 67, 71)))


@pytest.mark.parametrize("n,k,count", [(5, 1, 1), (6, 1, 6), (6, 2, 1), (7, 1, 21), (7, 2, 21),
                                       (8, 1, 56), (8, 2, 176)])
def test_general_cell_counts(n, k, count):
    assert len(enumerate_general_cells(n, k)) == count


@pytest.mark.parametrize("n", [5, 6, 7, 8, 9])
def test_k1_cells_are_five_subsets(n):
    got = {tuple(sorted(b[0] for b in P.bases)) for P, _ in enumerate_general_cells(n, 1).values()}
    assert got == set(combinations(range(1, n + 1), 5))


@pytest.mark.parametrize("n,k", [(6, 1), (7, 2), (8, 2), (8, 3)])
def test_every_cell_is_4_coindependent(n, k):
    for P, _ in enumerate_general_cells(n, k).values():
        for J in combinations(range(1, n + 1), 4):
            assert pz.is_coindependent(J, P)


def test_coindependence_conventions():
    assert pz.is_coindependent({1, 2, 3}, pz.trivial_positroid(range(1, 6)))
    P = pz.Positroid(1, range(1, 6), [(i,) for i in range(1, 6)])
    assert all(pz.is_coindependent(J, P) for J in combinations(range(1, 6), 4))
    assert not pz.is_coindependent(range(1, 6), P)


def test_trivial_product_row():
    M = bcfw_product_matrix(RationalMatrix.zeros(0, [1, 2, 5]), Z1, RationalMatrix.zeros(0, [2, 3, 4, 5]),
                            (1, 2, 3, 4, 5))
    assert [abs(x) for x in M.rows[0]] == list(Z1)
    assert M.rows[0][:2] == Z1[:2]


def test_example_step_two_matrix():
    """First step of the second step-tuple of the twelve-marker example."""
    a1, b1, g1, d1, e1 = Z1
    a2, b2, g2, d2, e2 = Z2
    B0 = bcfw_product_matrix(RationalMatrix.zeros(0, [3, 4, 12]), Z1, RationalMatrix.zeros(0, [4, 5, 6, 12]),
                             (3, 4, 5, 6, 12))
    B = pre(B0, {2})
    assert list(B.rows[0]) == [0, a1, b1, g1, d1, e1]
    M = bcfw_product_matrix(RationalMatrix.zeros(0, [1, 2, 12]), Z2, B, (1, 2, 5, 6, 12))
    dp = d1 + d2 / e2 * e1
    gp = g1 + g2 / d2 * dp
    assert [list(r) for r in M.rows] == [[a2, b2, 0, 0, -g2, -d2, -e2], [0, 0, a1, b1, gp, dp, e1]]


def test_example_step_five_matrix():
    a1, b1, g1, d1, e1 = Z1
    a2, b2, g2, d2, e2 = Z2
    a3, b3, g3, d3, e3 = Z3
    a4, b4, g4, d4, e4 = Z4
    dp = d1 + d2 / e2 * e1
    gp = g1 + g2 / d2 * dp
    ap, mu, nu = a2 + a4 / b4 * e2, a4 / b4 * e1, g4 / d4 * e3
    printed = [[-g2, 0, 0, b2, ap, e2, 0, 0, 0, 0, 0, d2],
               [gp, b1, a1, 0, -mu, -e1, 0, 0, 0, 0, 0, -dp],
               [0, 0, 0, 0, a4, b4, 0, 0, 0, -g4, -d4, -e4],
               [0, 0, 0, 0, 0, a3, b3, g3, d3, nu, e3, 0]]
    M, steps = bcfw_matrix_rows(example_recipe(), [Z1, Z2, Z3, Z4])
    assert steps == [1, 0, 3, 2]
    # the refl step carries a row sign the printed matrix leaves out
    for got, want in zip(M.rows, printed):
        assert list(got) == want or list(got) == [-x for x in want]
    final = bcfw_matrix(example_recipe(4, 1), [Z1, Z2, Z3, Z4])
    assert plucker_coordinates(final).support() == recipe_positroid(example_recipe(4, 1)).bases


def test_trivial_recipe_matrix_is_empty():
    M = bcfw_matrix(Recipe.trivial(range(1, 5)), [])
    assert M.k == 0 and M.labels == (1, 2, 3, 4)


def test_recipe_from_diagram_examples():
    assert recipe_from_diagram(ChordDiagram(range(1, 5))).is_trivial
    r = recipe_from_diagram(ChordDiagram(range(1, 8), [(3, 4, 5, 6)]))
    assert r.step.prod == (3, 4, 5, 6, 7) and r.step.pre == frozenset()
    r = recipe_from_diagram(ChordDiagram(range(1, 9), [(2, 3, 5, 6)]))
    assert r.step.prod == (2, 3, 5, 6, 8) and r.step.pre == frozenset({7})
    r = recipe_from_diagram(cd_example())
    assert len(r.product_steps()) == 6
    assert r.step.prod == (8, 9, 13, 14, 15)
    assert r.left.markers == tuple(range(1, 10)) + (15,)
    assert r.right.markers == tuple(range(9, 16))


def all_recipes(max_n=8):
    out = []
    for n in range(5, max_n + 1):
        for k in range(1, min(3, n - 4) + 1):
            out += [r for _, r in enumerate_general_cells(n, k).values()]
    return out


RECIPES = random.Random(5).sample(all_recipes(), 100)


@pytest.mark.parametrize("r", RECIPES, ids=str)
def test_rank_and_positroid_independent_of_parameters(r):
    want = recipe_positroid(r)
    for s in range(3):
        M = cell_point(r, seed=s)
        assert M.rank() == r.k
        assert matrix_positroid(M) == want
        assert all(v >= 0 for v in plucker_coordinates(M).coords.values())


@pytest.mark.parametrize("r", RECIPES[:25], ids=str)
def test_dimension_is_4k(r):
    assert chart_jacobian_rank(r, seed=1) == 4 * r.k


@pytest.mark.parametrize("r", RECIPES[:20], ids=str)
def test_distinct_parameters_give_distinct_points(r):
    P = plucker_coordinates(cell_point(r, seed=1))
    Q = plucker_coordinates(cell_point(r, seed=2))
    assert not P.proportional(Q)
    scaled = [tuple(3 * x for x in z) for z in random_parameters(r.k, 1)]
    assert plucker_coordinates(bcfw_matrix(r, scaled)).proportional(P)


@pytest.mark.parametrize("r", RECIPES[:30], ids=str)
def test_recipe_json_roundtrip(r):
    assert Recipe.from_json(r.to_json()) == r
    assert Recipe.from_json(r.dumps()) == r


def test_example_recipe_parses_and_roundtrips():
    r = example_recipe(4, 1)
    assert r.k == 4 and recipe_errors(r) == []
    assert Recipe.from_json(r.to_json()) == r


def test_malformed_step_lists_are_rejected():
    with pytest.raises(RecipeError):
        parse_recipe(range(1, 6), [StepTuple((1, 3, 3, 4, 5))])
    with pytest.raises(RecipeError):
        parse_recipe(range(1, 6), [StepTuple((1, 2, 3, 4, 5)), StepTuple((1, 2, 3, 4, 5))])


def test_standard_cells_match_narayana_and_are_general_cells():
    for n, k in ((7, 2), (8, 2), (8, 3)):
        keys = set(enumerate_general_cells(n, k))
        std = enumerate_standard_cells(n, k)
        assert len({recipe_positroid(r).key() for _, r in std}) == len(std)
        assert all(recipe_positroid(r).key() in keys for _, r in std)


def test_butterfly_support_matches_matrix():
    plain = [r for r in all_recipes() if r.step.prod and not (r.step.pre or r.step.cyc or r.step.refl)]
    assert len(plain) >= 20
    for r in random.Random(2).sample(plain, 20):
        A, B = cell_point(r.left, seed=3), cell_point(r.right, seed=4)
        M = bcfw_product_matrix(A, Z3, B, r.step.prod)
        table = pz.butterfly_positroid(recipe_positroid(r.left), recipe_positroid(r.right), r.step.prod)
        assert matrix_positroid(M) == table
