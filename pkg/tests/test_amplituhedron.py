import random

import pytest

from amplikit import cells
from amplikit.amplituhedron import (TileSpec, amplituhedron_map, coordinate_functionaries,
                                    enumerate_bcfw_collections, functionary_values, invert_tile, parameter_names,
                                    tile_membership, verify_tiling)
from amplikit.cells import Recipe, StepTuple, cell_point
from amplikit.exact import RationalMatrix, plucker_coordinates, positive_Z, same_rowspan, top_cell_C
from amplikit.functionary import TwistorPoint, chain, tw
from conftest import example_recipe


def test_map_shapes():
    C = top_cell_C(2, 7, seed=1)
    Z = positive_Z(7, 6, seed=1)
    assert amplituhedron_map(C, Z).k == 2 and amplituhedron_map(C, Z).n == 6
    with pytest.raises(ValueError):
        amplituhedron_map(C, positive_Z(7, 5, seed=1))
    E = amplituhedron_map(RationalMatrix.zeros(0, range(1, 6)), positive_Z(5, 4, seed=0))
    assert E.k == 0


def C_(s):
    return chain(s)


def example_functionaries():
    """The printed coordinate functionaries of the twelve-marker example, last step first."""
    s4 = [-tw(6, 10, 11, 12), tw(5, 10, 11, 12), -tw(5, 6, 11, 12), tw(5, 6, 10, 12), -tw(5, 6, 10, 11)]
    d = tw(5, 6, 10, 12)
    s3 = [C_("7 8 9|B A|5 6 C") / d, -C_("6 8 9|B A|5 6 C") / d, C_("6 7 9|B A|5 6 C") / d,
          -C_("6 7 8|B A|5 6 C") / d, tw(6, 7, 8, 9)]
    s2 = [-C_("1 4 C|5 6|A B C") / tw(5, 10, 11, 12), tw(1, 5, 6, 12), -tw(4, 5, 6, 12), -tw(1, 4, 5, 6),
          tw(1, 4, 5, 12)]
    s1 = [C_("1 2 C|5 6|A B C") / tw(5, 6, 11, 12), -C_("1 3 C|5 6|A B C") / tw(5, 10, 11, 12),
          -C_("A B C|5 6|2 3|1 C|4 5 6") / (tw(1, 4, 5, 6) * tw(5, 10, 11, 12)),
          C_("1 2 3|4 5|1 2|5 6|A B C") / (tw(1, 4, 5, 12) * tw(5, 10, 11, 12)), -tw(1, 2, 3, 12)]
    return s1 + s2 + s3 + s4


# entries where the printed list agrees with the sign-consistent derivation
AGREE = (1, 5, 6, 8, 9, 10, 11, 12, 13, 14, 15, 16)


def test_example_functionaries_where_consistent():
    F = coordinate_functionaries(example_recipe())
    E = example_functionaries()
    assert len(F) == 20
    for s in range(3):
        pt = TwistorPoint(None, positive_Z(12, 4, seed=5 + s))
        for i in AGREE:
            assert pt(F[i]) == pt(E[i]), i


@pytest.mark.parametrize("final", [(0, 0), (4, 1)])
def test_example_membership_and_inversion(final):
    r = example_recipe(*final)
    T = TileSpec.of(r)
    Z = positive_Z(12, 8, seed=2)
    for s in range(3):
        C = cell_point(r, seed=s)
        Y = amplituhedron_map(C, Z)
        assert tile_membership(Y, Z, T)
        assert same_rowspan(invert_tile(Y, Z, T), C)


def roundtrip_cases(count=40, seed=0):
    rng = random.Random(seed)
    pool = [r for n in range(5, 10) for k in range(1, min(3, n - 4) + 1) if (n, k) != (9, 3)
            for _, r in cells.enumerate_general_cells(n, k).values()]
    return [(r, rng.randrange(10 ** 6)) for r in rng.sample(pool, count)]


@pytest.mark.parametrize("r,seed", roundtrip_cases(), ids=str)
def test_functionaries_recover_parameters(r, seed):
    n = len(r.markers)
    params = cells.random_parameters(r.k, seed)
    C = cells.bcfw_matrix(r, params)
    Z = positive_Z(n, r.k + 4, seed=seed)
    T = TileSpec.of(r)
    vals = functionary_values(amplituhedron_map(C, Z), Z, T)
    assert all(v > 0 for v in vals)
    M = invert_tile(amplituhedron_map(C, Z), Z, T)
    assert plucker_coordinates(M).proportional(plucker_coordinates(C))


def test_points_off_the_tile_are_rejected():
    rng = random.Random(3)
    pool = [r for _, r in cells.enumerate_general_cells(7, 2).values()]
    Z = positive_Z(7, 6, seed=4)
    rejected = 0
    for r in pool:
        T = TileSpec.of(r)
        other = rng.choice([q for q in pool if q is not r])
        Y = amplituhedron_map(cell_point(other, seed=1), Z)
        m = tile_membership(Y, Z, T)
        if not m:
            rejected += 1
            assert m.witness in parameter_names(2)
            with pytest.raises(ValueError):
                invert_tile(Y, Z, T)
    assert rejected >= len(pool) // 2


@pytest.mark.parametrize("n,k,count", [(5, 1, 1), (6, 1, 2), (6, 2, 1), (7, 1, 7), (7, 2, 7), (8, 1, 40)])
def test_collection_counts(n, k, count):
    assert enumerate_bcfw_collections(n, k, "count") == count


def narayana(n, k):
    from math import comb
    return comb(n - 4, k) * comb(n - 3, k) // (k + 1)


@pytest.mark.parametrize("n,k", [(6, 1), (7, 1), (7, 2), (8, 1)])
def test_every_collection_has_narayana_many_tiles(n, k):
    for T in enumerate_bcfw_collections(n, k):
        assert len(T) == narayana(n, k)
        assert len(T.keys) == len(T)


def test_collection_count_8_2():
    assert enumerate_bcfw_collections(8, 2, "count") == 2624


def test_tiling_monte_carlo_and_dropped_tile_control():
    T = enumerate_bcfw_collections(6, 1)[0]
    rep = verify_tiling(T, samples=60, seed=1)
    assert rep.ok and sum(rep.coverage_hits.values()) == 60
    broken = verify_tiling(T.without(0), samples=60, seed=1)
    assert not broken.ok and broken.gaps


def test_tiling_of_a_7_2_collection():
    T = enumerate_bcfw_collections(7, 2)[0]
    assert verify_tiling(T, samples=20, seed=2, threads=2).ok


def product_recipes():
    out = []
    for n, k in ((6, 1), (7, 1), (7, 2), (8, 2)):
        out += [r for _, r in cells.enumerate_general_cells(n, k).values()
                if r.step.prod and not (r.step.pre or r.step.cyc or r.step.refl)]
    return random.Random(9).sample(out, 10)


@pytest.mark.parametrize("r", product_recipes(), ids=str)
def test_chord_twistor_signs(r):
    a, b, c, d, n = r.step.prod
    kR = r.right.k
    s = lambda e: -1 if e % 2 else 1  # noqa: E731
    signed = [s(kR) * tw(b, c, d, n), s(kR + 1) * tw(a, c, d, n), tw(a, b, d, n), -tw(a, b, c, n), tw(a, b, c, d)]
    N = len(r.markers)
    for seed in range(30):
        Z = positive_Z(N, r.k + 4, seed=seed)
        pt = TwistorPoint(amplituhedron_map(cell_point(r, seed=seed), Z), Z, r.markers)
        assert all(pt(f) > 0 for f in signed)


@pytest.mark.parametrize("n,k", [(6, 1), (7, 2), (8, 2)])
def test_boundary_twistor_signs(n, k):
    pool = [r for _, r in cells.enumerate_general_cells(n, k).values()]
    for r in random.Random(n).sample(pool, min(5, len(pool))):
        for seed in range(6):
            Z = positive_Z(n, k + 4, seed=seed)
            pt = TwistorPoint(amplituhedron_map(cell_point(r, seed=seed), Z), Z)
            for i in range(1, n - 2):
                for j in range(i + 2, n - 1):
                    assert pt(tw(i, i + 1, j, j + 1)) > 0
            for i in range(2, n - 2):
                assert (pt(tw(i, i + 1, n, 1)) > 0) == (k % 2 == 1)


def test_tile_spec_json_names_parameters():
    T = TileSpec.of(Recipe(tuple(range(1, 6)), StepTuple((1, 2, 3, 4, 5)),
                           Recipe.trivial((1, 2, 5)), Recipe.trivial((2, 3, 4, 5))))
    js = T.to_json()
    assert list(js["functionaries"]) == parameter_names(1)
