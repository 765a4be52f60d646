import random

import pytest

from amplikit import cells, positroid as pz
from amplikit.exact import plucker_coordinates
from amplikit.plabic import (BLACK, WHITE, Move, PlabicGraph, add_bridge, apply_move, bivalent_vertices,
                             butterfly_graph, contract_leaves, contractible_edges, example_top_cell_2_5,
                             graph_cyc, graph_refl, lollipop_graph, path_matrix, positroid_of_graph,
                             random_move, random_weights, recipe_graph, square_faces, star_graph,
                             trip_permutation)


def support_positroid(M):
    return pz.positroid_from_support(M.k, M.labels, plucker_coordinates(M).support())


def sample_recipes(count, seed=0):
    rng = random.Random(seed)
    pool = []
    for n, k in ((5, 1), (6, 1), (6, 2), (7, 1), (7, 2)):
        pool += [r for _, r in cells.enumerate_general_cells(n, k).values()]
    return rng.sample(pool, count)


def test_example_graph_trip_permutation():
    pi = trip_permutation(example_top_cell_2_5())
    assert pi.as_tuple() == (3, 4, 5, 1, 2)
    assert pi.k == 2


def test_black_lollipop_is_a_black_fixed_point():
    pi = trip_permutation(lollipop_graph([1, 2, 3]))
    assert pi.as_tuple() == (1, 2, 3) and pi.loops == frozenset({1, 2, 3})
    P = positroid_of_graph(lollipop_graph([1, 2, 3]))
    assert P.k == 0 and P.bases == frozenset({()})


def test_white_star_has_singleton_bases():
    P = positroid_of_graph(star_graph(range(1, 6)))
    assert P.k == 1 and P.bases == frozenset({(i,) for i in range(1, 6)})


@pytest.mark.parametrize("seed", range(4))
def test_random_moves_preserve_trip_permutation(seed):
    rng = random.Random(seed)
    G = [example_top_cell_2_5(), square_graph()][seed % 2] if seed < 2 else recipe_graph(sample_recipes(1, seed)[0])
    pi = trip_permutation(G)
    for _ in range(25):
        G = random_move(G, rng)
        assert trip_permutation(G) == pi


def test_insert_then_remove_is_identity():
    G = example_top_cell_2_5()
    for e in sorted(G.edges):
        H = apply_move(G, Move("insert", e, (BLACK,)))
        new = (set(H.colors) - set(G.colors)).pop()
        back = apply_move(H, Move("remove", new))
        assert back == G


def square_graph():
    """Top cell of Gr(2,4) from bridges, then bivalent vertices removed and edges contracted."""
    G = lollipop_graph([1, 2, 3, 4], {1: WHITE, 2: WHITE})
    for i in (2, 1, 3, 2):
        G = add_bridge(G, i, WHITE)
    G = contract_leaves(G)
    while bivalent_vertices(G) or contractible_edges(G):
        if bivalent_vertices(G):
            G = apply_move(G, Move("remove", bivalent_vertices(G)[0]))
        else:
            G = apply_move(G, Move("contract", contractible_edges(G)[0]))
    return G


def test_square_move_switches_colours():
    G = square_graph()
    assert trip_permutation(G).as_tuple() == (3, 4, 1, 2)
    faces = square_faces(G)
    assert faces
    f = faces[0]
    H = apply_move(G, Move("square", f))
    for v in f:
        assert H.colors[v] != G.colors[v]
    assert trip_permutation(H) == trip_permutation(G)
    assert positroid_of_graph(H) == positroid_of_graph(G)


def test_all_unit_weights_on_star():
    G = star_graph(range(1, 6))
    P, O = positroid_of_graph(G, sinks=[2, 3, 4, 5])
    M = path_matrix(G, O)
    assert [abs(x) for x in M.rows[0]] == [1, 1, 1, 1, 1]
    assert all(v >= 0 for v in plucker_coordinates(M).coords.values())


@pytest.mark.parametrize("r", sample_recipes(20), ids=str)
def test_path_matrix_support_is_the_graph_positroid(r):
    G = recipe_graph(r)
    P, O = positroid_of_graph(G, sinks=[])
    for s in range(3):
        M = path_matrix(G, O, random_weights(G, s), check=True)
        for i, src in enumerate(sorted(O.sources)):
            assert M.entry(i, src) == 1
        assert support_positroid(M) == P
    assert P == cells.recipe_positroid(r)


def test_trivial_butterfly_gives_five_singletons():
    GL = lollipop_graph([1, 2, 5])
    GR = lollipop_graph([2, 3, 4, 5])
    G = butterfly_graph(GL, GR, (1, 2, 3, 4, 5))
    P = positroid_of_graph(G)
    assert P.bases == frozenset({(i,) for i in range(1, 6)})


def butterfly_pairs(count, seed=1):
    """Random (left recipe, right recipe, indices) on general marker sets."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(7, 9)
        a = rng.randint(1, n - 5)
        b, c, d = a + 1, n - 2, n - 1
        NL = tuple(range(1, b + 1)) + (n,)
        NR = tuple(range(b, n + 1))
        kL = rng.randint(0, max(0, len(NL) - 4))
        kR = rng.randint(0, max(0, len(NR) - 4))
        if kL + kR > 2:
            continue
        left = [rr for _, rr in cells.enumerate_general_cells(len(NL), kL).values()] if kL else [cells.Recipe.trivial(range(1, len(NL) + 1))]
        right = [rr for _, rr in cells.enumerate_general_cells(len(NR), kR).values()] if kR else [cells.Recipe.trivial(range(1, len(NR) + 1))]
        rL = rng.choice(left).relabel({i + 1: x for i, x in enumerate(NL)})
        rR = rng.choice(right).relabel({i + 1: x for i, x in enumerate(NR)})
        out.append((rL, rR, (a, b, c, d, n)))
    return out


@pytest.mark.parametrize("rL,rR,idx", butterfly_pairs(20), ids=lambda x: str(x))
def test_butterfly_positroid_table_matches_graph_and_matrix(rL, rR, idx):
    PL, PR = cells.recipe_positroid(rL), cells.recipe_positroid(rR)
    if not (pz.is_coindependent({idx[0], idx[1], idx[4]}, PL)
            and pz.is_coindependent(set(idx[1:]), PR)):
        pytest.skip("not coindependent")
    table = pz.butterfly_positroid(PL, PR, idx)
    G = butterfly_graph(recipe_graph(rL), recipe_graph(rR), idx)
    assert positroid_of_graph(G) == table
    A = cells.cell_point(rL, seed=1)
    B = cells.cell_point(rR, seed=2)
    M = cells.bcfw_product_matrix(A, (2, 3, 5, 7, 11), B, idx)
    assert M.rank() == rL.k + rR.k + 1
    assert support_positroid(M) == table
    assert trip_permutation(G) == table.decorated_permutation()


def test_dihedral_graph_operations_match_positroid_operations():
    G = example_top_cell_2_5()
    H = add_bridge(lollipop_graph([1, 2, 3, 4], {1: WHITE}), 1, WHITE)
    for g in (G, H):
        P = positroid_of_graph(g)
        assert positroid_of_graph(graph_cyc(g)) == pz.cyc(P)
        assert positroid_of_graph(graph_refl(g)) == pz.refl(P)


def test_json_roundtrip():
    G = recipe_graph(sample_recipes(1, 3)[0])
    assert PlabicGraph.from_json(G.to_json()) == G
