from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from deform_kernel.artin import (
    AMatrix,
    ArtinLocalAlgebra,
    bch,
    bernoulli,
    dual_numbers,
    from_json,
    lower_central_series,
    make_truncated,
    tensor,
    truncated_poly,
)
from deform_kernel.dgla import sl2
from deform_kernel.exactlin import RatMatrix


def test_truncated_poly_basis_and_table():
    A = truncated_poly(4)
    assert A.dim == 3
    assert [A.name(j) for j in range(3)] == ["t", "t^2", "t^3"]
    assert A.mul(0, 1) == 2
    assert A.mul(1, 1) is None
    assert A.nilpotency == 4


def test_dual_numbers_are_square_zero():
    A = dual_numbers()
    assert A.dim == 1 and A.mul(0, 0) is None


def test_two_variables_total_degree():
    A = make_truncated(["x", "y"], total_degree=3)
    assert A.dim == 5  # x, y, x^2, xy, y^2
    assert A.filtration_dims() == [5, 3, 0]


def test_exponent_truncation():
    A = make_truncated(["x", "y"], exponents=[2, 3])
    assert A.dim == 2 * 3 - 1
    assert A.max_order == 3


def test_rejects_non_artinian():
    with pytest.raises(ValueError):
        ArtinLocalAlgebra(["t"])


@pytest.mark.parametrize("A", [truncated_poly(5), make_truncated(["x", "y"], total_degree=4),
                               make_truncated(["x", "y", "z"], exponents=[2, 2, 3])])
def test_commutative_and_associative(A):
    assert A.check() == []


def test_json_roundtrip():
    A = make_truncated(["x", "y"], exponents=[2, 3])
    B = from_json(A.to_json())
    assert B.basis == A.basis and B.table == A.table


def test_bernoulli_against_sympy():
    for n in [0] + list(range(2, 16)):
        assert bernoulli(n) == Fraction(str(sympy.bernoulli(n)))
    assert bernoulli(1) == Fraction(-1, 2)


# -- BCH against the matrix exponential in the defining representation of sl_2 --------

REP = [RatMatrix([[1, 0], [0, -1]], 2), RatMatrix([[0, 1], [0, 0]], 2), RatMatrix([[0, 0], [1, 0]], 2)]


def as_amatrix(T, v):
    parts = {}
    for j, x in T.components(0, v).items():
        m = RatMatrix.zeros(2, 2)
        for i, c in enumerate(x):
            m = m + REP[i].scale(c)
        parts[j] = m
    return AMatrix(T.A, RatMatrix.zeros(2, 2), parts)


def same(M, N):
    D = M - N
    return D.const.is_zero() and not D.parts


coef = st.integers(-3, 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(coef, min_size=15, max_size=15), st.lists(coef, min_size=15, max_size=15))
def test_bch_matches_matrix_exponential(a, b):
    T = tensor(sl2(), truncated_poly(6))
    lhs = as_amatrix(T, a).exp() @ as_amatrix(T, b).exp()
    rhs = as_amatrix(T, bch(T, a, b)).exp()
    assert same(lhs, rhs)


@settings(max_examples=20, deadline=None)
@given(st.lists(coef, min_size=9, max_size=9), st.lists(coef, min_size=9, max_size=9),
       st.lists(coef, min_size=9, max_size=9))
def test_bch_is_associative(a, b, c):
    T = tensor(sl2(), truncated_poly(4))
    assert bch(T, bch(T, a, b), c) == bch(T, a, bch(T, b, c))


@settings(max_examples=20, deadline=None)
@given(st.lists(coef, min_size=9, max_size=9))
def test_bch_inverse_and_unit(a):
    T = tensor(sl2(), truncated_poly(4))
    a = tuple(Fraction(x) for x in a)
    zero = T.zero(0)
    assert bch(T, a, zero) == a
    assert bch(T, a, tuple(-x for x in a)) == zero


def test_bch_second_order_term():
    # over K[t]/(t^3) with a, b of order 1: bch = a + b + [a, b] / 2
    T = tensor(sl2(), truncated_poly(3))
    h = T.pure(0, (1, 0, 0), 0)
    e = T.pure(0, (0, 1, 0), 0)
    # [h t, e t] = 2 e t^2
    assert bch(T, h, e) == T.from_components(0, {0: (1, 1, 0), 1: (0, 1, 0)})


def test_lower_central_series_of_sl2_over_t4():
    T = tensor(sl2(), truncated_poly(4))
    assert lower_central_series(T) == [9, 6, 3, 0]


def test_amatrix_exp_inverse():
    A = truncated_poly(5)
    M = AMatrix(A, RatMatrix.zeros(2, 2), {0: RatMatrix([[1, 2], [3, 4]], 2), 1: RatMatrix([[0, 1], [1, 0]], 2)})
    assert same(M.exp() @ (-M).exp(), AMatrix.identity(A, 2))
