from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from deform_kernel.exactlin import (
    ComplexError,
    DoubleComplex,
    GradedComplex,
    RatMatrix,
    block_matrix,
    cohomology,
    cohomology_dims,
    image_basis,
    kernel_basis,
    left_null_combination,
    rref,
    solve,
    total_complex,
)

entries = st.integers(min_value=-3, max_value=3)


def matrices(max_r=5, max_c=5):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(
            lambda c: st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_sympy(rows):
    M = RatMatrix(rows, len(rows[0]))
    assert M.rank() == sympy.Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_vectors_are_killed_and_independent(rows):
    M = RatMatrix(rows, len(rows[0]))
    K = kernel_basis(M)
    assert len(K) == M.ncols - M.rank()
    for v in K:
        assert all(x == 0 for x in M.apply(v))
    if K:
        assert RatMatrix.from_columns(K, M.ncols).rank() == len(K)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_or_certificate(rows, data):
    M = RatMatrix(rows, len(rows[0]))
    b = data.draw(st.lists(entries, min_size=M.nrows, max_size=M.nrows))
    x = solve(M, b)
    if x is not None:
        assert list(M.apply(x)) == [Fraction(v) for v in b]
    else:
        y = left_null_combination(M, b)
        assert y is not None
        assert all(x == 0 for x in M.T.apply(y))
        assert sum(a * Fraction(c) for a, c in zip(y, b)) == 1


def test_rref_pivots_are_deterministic():
    R, piv = rref([[0, 2, 4], [1, 1, 1], [2, 4, 6]], 3)
    assert piv == [0, 1]
    assert R[0] == [1, 0, -1]
    assert R[1] == [0, 1, 2]


def test_image_basis_is_pivot_columns():
    M = RatMatrix([[1, 2, 3], [2, 4, 7]], 3)
    assert image_basis(M) == [(1, 2), (3, 7)]


def test_graded_complex_rejects_bad_shapes_and_nonzero_square():
    with pytest.raises(ComplexError):
        GradedComplex({0: 1, 1: 2}, {0: RatMatrix([[1]], 1)})
    with pytest.raises(ComplexError):
        GradedComplex({0: 1, 1: 1, 2: 1}, {0: RatMatrix([[1]], 1), 1: RatMatrix([[1]], 1)})


def test_cohomology_of_small_complexes():
    # Q --2--> Q is acyclic
    C = GradedComplex({-1: 1, 0: 1}, {-1: RatMatrix([[2]], 1)})
    assert cohomology_dims(C) == {-1: 0, 0: 0}
    # Q^2 --(1 1)--> Q has H^-1 = 1
    C = GradedComplex({-1: 2, 0: 1}, {-1: RatMatrix([[1, 1]], 2)})
    H = cohomology(C)
    assert H.dims() == {-1: 1, 0: 0}
    rep = H.representatives(-1)[0]
    assert H.project(-1, rep) == (1,)
    assert H.project(-1, tuple(3 * x for x in rep)) == (3,)


def test_project_rejects_non_cycles():
    C = GradedComplex({0: 1, 1: 1}, {0: RatMatrix([[1]], 1)})
    with pytest.raises(ValueError):
        cohomology(C).project(0, (1,))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(entries, min_size=3, max_size=3), min_size=2, max_size=2), st.data())
def test_euler_characteristic_of_cohomology(d0_rows, data):
    # 3 -> 2 -> (2-dim target killed by d0)
    d0 = RatMatrix(d0_rows, 3)
    K = kernel_basis(d0.T)
    coeffs = data.draw(st.lists(entries, min_size=len(K), max_size=len(K)))
    row = [sum(c * v[i] for c, v in zip(coeffs, K)) for i in range(2)]
    C = GradedComplex({0: 3, 1: 2, 2: 1}, {0: d0, 1: RatMatrix([row], 2)})
    H = cohomology(C)
    assert H.euler_characteristic() == C.euler_characteristic() == 3 - 2 + 1


def test_total_complex_squares_to_zero_and_counts():
    # two copies of an acyclic column joined by the identity: total is acyclic
    v = RatMatrix([[1]], 1)
    dims = {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1}
    h = {(0, 0): RatMatrix([[1]], 1), (0, 1): RatMatrix([[1]], 1)}
    D = DoubleComplex(dims, h, {(0, 0): v, (1, 0): v})
    T, layout = total_complex(D)
    assert cohomology_dims(T) == {0: 0, 1: 0, 2: 0}
    assert sum(c[3] for c in layout[1]) == 2


def test_block_matrix_places_blocks():
    M = block_matrix({(1, 0): RatMatrix([[5]], 1)}, [1, 1], [1, 2])
    assert M.rows == ((0, 0, 0), (5, 0, 0))
