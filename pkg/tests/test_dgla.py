from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deform_kernel import dgla as dg
from deform_kernel.exactlin import ComplexError, GradedComplex, RatMatrix, cohomology_dims

from gen import random_cocone, rand_vec, rng_for


def test_sl2_passes():
    assert dg.check_axioms(dg.sl2()).ok


def test_sl2_with_rescaled_ef_is_still_lie():
    # [e,f] = 2h only rescales the basis
    assert dg.check_axioms(dg.sl2([2, 0, 0])).ok


def test_broken_sl2_fails_jacobi_with_witness():
    rep = dg.check_axioms(dg.sl2([1, 1, 0]))
    assert not rep.ok
    ids = {v["identity"] for v in rep.violations}
    assert "jacobi" in ids
    wit = next(v["witness"] for v in rep.violations if v["identity"] == "jacobi")
    assert {w[2] for w in wit} == {"h", "e", "f"}


def test_nonzero_square_differential_is_reported():
    # bypass the constructor check to hand the axiom checker a bad complex
    C2 = GradedComplex.__new__(GradedComplex)
    object.__setattr__(C2, "dims", {0: 1, 1: 1, 2: 1})
    object.__setattr__(C2, "d", {0: RatMatrix([[1]], 1), 1: RatMatrix([[1]], 1)})
    object.__setattr__(C2, "check", False)
    L = dg.StructureConstantDGLA(C2, {})
    rep = dg.check_axioms(L)
    assert [v["identity"] for v in rep.violations] == ["d^2"]


def test_leibniz_failure_detected():
    # L^0 = <a, b> abelian, d a = c, [b, c] = c: d[b, a] = 0 but [b, d a] = c
    C = GradedComplex({0: 2, 1: 1}, {0: RatMatrix([[1, 0]], 2)})
    L = dg.from_constants(C, {(0, 1, 1, 0): (1,)})
    rep = dg.check_axioms(L)
    assert "leibniz" in {v["identity"] for v in rep.violations}


def test_json_roundtrip():
    L = dg.sl2()
    L2 = dg.from_json(dg.to_json(L))
    assert dg.to_json(L2) == dg.to_json(L)
    assert dg.check_axioms(L2).ok


def test_hom_complex_of_acyclic_two_term_has_no_cohomology():
    E = GradedComplex({-1: 1, 0: 1}, {-1: RatMatrix([[2]], 1)})
    H = dg.hom_complex(E)
    assert dg.check_axioms(H).ok
    assert cohomology_dims(H.complex()) == {-1: 0, 0: 0, 1: 0}


def test_hom_complex_of_single_term_is_gl():
    E = GradedComplex({0: 2})
    H = dg.hom_complex(E)
    assert H.dim(0) == 4
    assert dg.check_axioms(H).ok
    # [E11, E12] = E12
    e11 = H.from_matrix(0, RatMatrix([[1, 0], [0, 0]], 2))
    e12 = H.from_matrix(0, RatMatrix([[0, 1], [0, 0]], 2))
    assert H.bracket(0, e11, 0, e12) == e12


def test_cocone_rejects_non_cycle_section():
    E = GradedComplex({0: 1, 1: 1}, {0: RatMatrix([[1]], 1)})
    with pytest.raises(ComplexError):
        dg.cocone(dg.hom_complex(E), (1,))


def test_cocone_dimensions_and_sequence():
    E = GradedComplex({-1: 1, 0: 2}, {-1: RatMatrix([[1], [0]], 1)})
    C = dg.cocone(dg.hom_complex(E), (1, 1))
    H = C.base
    for i in C.degrees:
        assert C.dim(i) == H.dim(i) + E.dim(i - 1)
    assert dg.check_axioms(C).ok
    assert dg.cocone_sequence_violations(C) == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_cocones_satisfy_axioms(seed):
    C = random_cocone(rng_for(seed))
    assert dg.check_axioms(C).ok
    assert dg.cocone_sequence_violations(C) == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_twist_iso_is_a_dgla_isomorphism(seed):
    rng = rng_for(seed)
    C = random_cocone(rng)
    r = rand_vec(rng, C.E.dim(-1))
    phi = dg.twist_iso(C, r)
    assert phi.violations() == []
    assert phi.is_bijective()


def test_twist_iso_formula_on_a_sample():
    E = GradedComplex({-1: 1, 0: 1}, {-1: RatMatrix([[1]], 1)})
    C = dg.cocone(dg.hom_complex(E), (0,))
    phi = dg.twist_iso(C, (Fraction(3),))
    assert phi.target.s == (3,)
    # degree 0 element: u = identity on E^-1 (the E^0 part of M^0 is E^-1)
    H = C.base
    u = H.from_matrix(0, RatMatrix([[1, 0], [0, 0]], 2))
    x = C.join(0, u, (0,))
    # (u, x) -> (u, x + u(r)) = (u, 3)
    assert C.split(0, phi.apply(0, x)) == (tuple(u), (3,))


def test_dgla_map_detects_non_morphism():
    L = dg.sl2()
    bad = dg.DGLieMap(L, L, {0: RatMatrix.identity(3).scale(2)})
    assert bad.violations()
