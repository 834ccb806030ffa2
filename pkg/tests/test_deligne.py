from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deform_kernel.artin import bch, dual_numbers, tensor, truncated_poly
from deform_kernel.deligne import (
    def_over_dual_numbers,
    gauge_act,
    gauge_affine_check,
    gauge_compose,
    gauge_conjugation_check,
    hom_gauge_oracle,
    lift_order_by_order,
    materialize_deformation,
    mc_check,
    morphism_equal,
    primary_obstruction,
    section_classes_match,
    stabilizer_element,
    tangent_space,
)
from deform_kernel.dgla import from_constants, hom_complex, sl2
from deform_kernel.exactlin import GradedComplex, RatMatrix

from gen import rand_vec, random_E, random_instance, random_mc, rng_for

seeds = st.integers(0, 10 ** 6)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_gauge_preserves_mc(seed):
    rng = rng_for(seed)
    T, x = random_instance(rng, 3)
    assert mc_check(T, x)["ok"]
    g = rand_vec(rng, T.dim(0), -1, 1)
    assert mc_check(T, gauge_act(T, g, x))["ok"]


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_stabilizer_fixes_x(seed):
    T, x = random_instance(rng_for(seed), 4)
    for nu in T.basis(-1):
        assert gauge_act(T, stabilizer_element(T, x, nu), x) == x


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_action_law(seed):
    rng = rng_for(seed)
    T, x = random_instance(rng, 4)
    a = rand_vec(rng, T.dim(0), -1, 1)
    b = rand_vec(rng, T.dim(0), -1, 1)
    assert gauge_act(T, a, gauge_act(T, b, x)) == gauge_act(T, gauge_compose(T, a, b), x)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_morphisms_differing_by_stabilizer_are_equal(seed):
    rng = rng_for(seed)
    T, x = random_instance(rng, 3)
    a = rand_vec(rng, T.dim(0), -1, 1)
    nu = rand_vec(rng, T.dim(-1), -1, 1)
    b = bch(T, a, stabilizer_element(T, x, nu))
    r = morphism_equal(T, a, b, x)
    assert r["equal"]
    # symmetric
    assert morphism_equal(T, b, a, x)["equal"]


def test_stabilizer_outside_irrelevant_part_gives_distinct_morphisms():
    # sl_2 with zero differential: every a fixes x = 0 but I(0) = 0
    T = tensor(sl2(), dual_numbers())
    a = T.pure(0, (1, 0, 0), 0)
    assert gauge_act(T, a, T.zero(1)) == T.zero(1)
    assert not morphism_equal(T, a, T.zero(0), T.zero(1))["equal"]


def test_morphism_equal_requires_same_target():
    # on E = (Q --1--> Q) the first Hom^0 basis element moves x = 0
    E = GradedComplex({-1: 1, 0: 1}, {-1: RatMatrix([[1]], 1)})
    T = tensor(hom_complex(E), dual_numbers())
    a = T.basis(0)[0]
    assert gauge_act(T, a, T.zero(1)) != T.zero(1)
    with pytest.raises(ValueError):
        morphism_equal(T, a, T.zero(0), T.zero(1))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_hom_gauge_matches_conjugation_oracle(seed):
    rng = rng_for(seed)
    E = random_E(rng)
    T = tensor(hom_complex(E), truncated_poly(3))
    x = random_mc(rng, T)
    assert mc_check(T, x)["square_zero"]
    a = rand_vec(rng, T.dim(0), -1, 1)
    assert hom_gauge_oracle(T, a, x) == gauge_act(T, a, x)


def test_tangent_space_of_hom_example():
    E = GradedComplex({-1: 1, 0: 1}, {-1: RatMatrix([[2]], 1)})
    assert tangent_space(hom_complex(E)) == []
    r = def_over_dual_numbers(hom_complex(E))
    assert r["dim"] == 0 and r["cycles"] == r["boundaries"] == 1


def obstructed_algebra():
    # L^1 = <x>, L^2 = <y>, [x, x] = 2y, d = 0
    return from_constants(GradedComplex({1: 1, 2: 1}), {(1, 0, 1, 0): (2,)})


def test_obstructed_lift_reports_class():
    T = tensor(obstructed_algebra(), truncated_poly(3))
    reps = lift_order_by_order(T, T.pure(1, (1,), 0))
    assert len(reps) == 1 and not reps[0].lifted and reps[0].order == 2
    assert reps[0].obstruction == {"t^2": (1,)}
    assert primary_obstruction(T, T.pure(1, (1,), 0)) == {"t^2": (1,)}


def test_unobstructed_lift_reaches_top_order():
    T, _ = random_instance(rng_for(3), 4)
    reps = lift_order_by_order(T, T.zero(1))
    assert all(r.lifted for r in reps)
    assert mc_check(T, reps[-1].x)["ok"]


def test_lift_rejects_non_cocycle():
    L = from_constants(GradedComplex({0: 1, 1: 1, 2: 1}, {1: RatMatrix([[1]], 1)}), {})
    T = tensor(L, truncated_poly(3))
    with pytest.raises(ValueError):
        lift_order_by_order(T, T.pure(1, (1,), 0))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_materialized_deformation_is_flat(seed):
    # flatness needs E exact in negative degrees
    T, y = random_instance(rng_for(seed), 3, resolution=True)
    m = materialize_deformation(T, y)
    assert m.flat and m.exact


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_gauge_affine_identities(seed):
    rng = rng_for(seed)
    T, y = random_instance(rng, 3)
    g = rand_vec(rng, T.dim(0), -1, 1)
    assert gauge_conjugation_check(T, g, y)
    assert gauge_affine_check(T, g, y)["ok"]
    assert section_classes_match(T, g, y)


def test_gauge_affine_witness_solves_membership():
    rng = rng_for(11)
    T, y = random_instance(rng, 3)
    g = rand_vec(rng, T.dim(0), -1, 1)
    r = gauge_affine_check(T, g, y)
    assert r["ok"] and r["target"] == gauge_act(T, g, y)
    assert all(isinstance(c, Fraction) for c in r["witness"])
