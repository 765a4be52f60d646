from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from amplikit import _pykernels
from amplikit._kernel import det_int, minors_int
from amplikit.exact import (MatrixOpSpec, RationalMatrix, apply_matrix_op, cyc, det, inc, moment_curve,
                            plucker_coordinates, positive_Z, positivity_class, pre, refl, same_rowspan,
                            sample_matrix, top_cell_C)


def cofactor_det(rows):
    """Laplace expansion along the first row; the independent oracle."""
    if not rows:
        return Fraction(1)
    if len(rows) == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j, x in enumerate(rows[0]):
        if x:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * Fraction(x) * cofactor_det(minor)
    return total


fractions = st.fractions(min_value=-20, max_value=20, max_denominator=9)


def matrices(k, n):
    return st.lists(st.lists(fractions, min_size=n, max_size=n), min_size=k, max_size=k)


def test_plucker_trivial_cases():
    P = plucker_coordinates(RationalMatrix([[1, 2]]))
    assert P[(1,)] == 1 and P[(2,)] == 2
    P = plucker_coordinates(RationalMatrix([[1, 0, 3, 5], [0, 1, 7, 2]]))
    assert P[(1, 2)] == 1


@given(matrices(2, 5))
def test_plucker_matches_cofactor_oracle(rows):
    M = RationalMatrix(rows)
    P = plucker_coordinates(M)
    for I in combinations(range(1, 6), 2):
        sub = [[r[i - 1] for i in I] for r in rows]
        assert P[I] == cofactor_det(sub)


@given(matrices(4, 4))
def test_det_matches_cofactor_oracle(rows):
    assert det(rows) == cofactor_det(rows)


@given(st.lists(st.lists(st.integers(-10 ** 12, 10 ** 12), min_size=5, max_size=5), min_size=5, max_size=5))
def test_compiled_and_python_kernels_agree(rows):
    assert det_int(rows) == _pykernels.det_int(rows)
    assert list(minors_int(rows[:3], 5)) == list(_pykernels.minors_int(rows[:3], 5))


def test_unsorted_plucker_index_is_alternating():
    M = top_cell_C(2, 5, seed=3)
    P = plucker_coordinates(M)
    assert P[(3, 1)] == -P[(1, 3)]
    assert P[(2, 2)] == 0


def test_positivity_class_examples():
    ones = plucker_coordinates(RationalMatrix([[1, 1, 1]]))
    assert positivity_class(ones) == "totally_positive"
    mixed = plucker_coordinates(RationalMatrix([[1, -1, 2]]))
    assert positivity_class(mixed) == "neither"
    nonneg = plucker_coordinates(RationalMatrix([[1, 0, 2]]))
    assert positivity_class(nonneg) == "totally_nonnegative"
    flipped = plucker_coordinates(RationalMatrix([[-1, -2, -3]]))
    assert positivity_class(flipped) == "totally_positive"
    with pytest.raises(ValueError):
        positivity_class(plucker_coordinates(RationalMatrix([[0, 0]])))


def test_vandermonde_is_totally_positive():
    M = RationalMatrix([[1, 1, 1, 1, 1], [1, 2, 5, 7, 11]])
    assert positivity_class(plucker_coordinates(M)) == "totally_positive"


def test_sampling_examples():
    assert det(positive_Z(5, 5, seed=4).rows) > 0
    C = top_cell_C(1, 4, seed=2)
    assert C.k == 1 and all(x > 0 for x in C.rows[0])
    P = plucker_coordinates(RationalMatrix([list(r) for r in zip(*positive_Z(7, 6, seed=1).rows)]))
    assert len(P.coords) == 7 and all(v > 0 for v in P.coords.values())


@pytest.mark.parametrize("seed", range(10))
def test_positive_Z_and_top_cell_are_totally_positive(seed):
    Z = sample_matrix("positive_Z", 8, 6, seed=seed)
    Zt = RationalMatrix([list(r) for r in zip(*Z.rows)])
    assert positivity_class(plucker_coordinates(Zt)) == "totally_positive"
    C = sample_matrix("top_cell_C", 3, 7, seed=seed)
    assert positivity_class(plucker_coordinates(C)) == "totally_positive"


def test_distinct_seeds_give_distinct_rays():
    rays = {plucker_coordinates(top_cell_C(2, 6, seed=s)).ray() for s in range(10)}
    assert len(rays) == 10


def test_moment_curve_rows():
    M = moment_curve([Fraction(1, 2), 2], 3)
    assert list(M.rows[0]) == [4, 2, 1] and list(M.rows[1]) == [1, 2, 4]


@pytest.mark.parametrize("seed", range(50))
def test_cyc_shifts_plucker_indices(seed):
    k, n = 1 + seed % 3, 6
    M = top_cell_C(k, n, seed=seed)
    P, Q = plucker_coordinates(M), plucker_coordinates(cyc(M))
    for I in combinations(range(1, n + 1), k):
        shifted = tuple(sorted((i - 2) % n + 1 for i in I))
        assert Q[I] == P[shifted]


@given(matrices(3, 5))
def test_refl_is_an_involution(rows):
    M = RationalMatrix(rows)
    assert refl(refl(M)) == M


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_cyc_n_times_is_plus_minus_identity(k):
    M = top_cell_C(k, 7, seed=k)
    N = cyc(M, 7)
    assert plucker_coordinates(N).proportional(plucker_coordinates(M))
    assert N == M or N == RationalMatrix([[-x for x in r] for r in M.rows], M.labels)


def test_pre_inserts_zero_column():
    M = RationalMatrix([[1, 2, 4]], [1, 2, 4])
    N = pre(M, {3})
    assert N.labels == (1, 2, 3, 4) and N.column(3) == (0,)
    assert N.column(4) == (4,)
    with pytest.raises(ValueError):
        pre(M, {2})


def test_inc_adds_a_row_and_keeps_positivity():
    M = top_cell_C(2, 5, seed=1)
    N = inc(M.submatrix([1, 2, 4, 5]), 3)
    assert N.k == 3
    assert positivity_class(plucker_coordinates(N)) in ("totally_nonnegative", "totally_positive")


def test_bridge_requires_positive_parameter():
    M = top_cell_C(2, 5, seed=1)
    with pytest.raises(ValueError):
        apply_matrix_op(MatrixOpSpec.x(2, 0), M)
    N = apply_matrix_op(MatrixOpSpec.x(2, Fraction(3, 2)), M)
    assert N.column(3) == tuple(a + Fraction(3, 2) * b for a, b in zip(M.column(3), M.column(2)))


@pytest.mark.parametrize("kind", ["x", "y"])
def test_bridges_preserve_nonnegativity(kind):
    for seed in range(5):
        M = top_cell_C(2, 6, seed=seed)
        for i in range(1, 7):
            N = apply_matrix_op(MatrixOpSpec(kind, i=i, t=Fraction(seed + 1, 3)), M)
            assert all(v >= 0 for v in plucker_coordinates(N).coords.values())


def test_same_rowspan_ignores_row_operations():
    M = top_cell_C(2, 5, seed=0)
    r0, r1 = M.rows
    N = RationalMatrix([[a + 3 * b for a, b in zip(r0, r1)], [2 * b for b in r1]], M.labels)
    assert same_rowspan(M, N)
    assert not same_rowspan(M, top_cell_C(2, 5, seed=1))
