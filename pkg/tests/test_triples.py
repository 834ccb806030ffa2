from fractions import Fraction
from functools import lru_cache

import pytest

from deform_kernel.exactlin import GradedComplex, RatMatrix
from deform_kernel.geom import P1_REDUNDANT, Resolution, line_bundle_resolution
from deform_kernel.triples import (
    FeasibilityCertificate,
    TripleScenario,
    add_acyclic_pair,
    assemble_cocone_scdgla,
    bracket_extension_feasibility,
    comparison_check,
    compute_TI,
    descent_tangent_check,
    eval_problem,
    exactness_certificate,
    forgetful_analysis,
    gamma_dims,
    gamma_problem,
    log_tangent_oracle,
    long_exact_sequence,
    resolution_independence_check,
    split_check,
    twist_section,
    verify_certificate,
    zero_problem,
)

QUAD = "t^2-1"
QUARTIC = "t^4-5*t^2+4"  # four distinct roots
SKYSCRAPER = Resolution({-1: [0], 0: [1]}, {-1: [["t"]]}, ["1"])


@lru_cache(maxsize=None)
def ti(d, sigma):
    return compute_TI(line_bundle_resolution(d, sigma))


@pytest.mark.parametrize("d,sigma", [(2, QUAD), (4, QUARTIC)])
def test_T_of_reduced_divisor_matches_log_tangent(d, sigma):
    r = ti(d, sigma)
    assert r.T_triple == log_tangent_oracle(d)
    assert r.T_triple == gamma_dims(d, sigma, 8)


def test_T_values():
    assert (ti(2, QUAD).T_triple[0], ti(2, QUAD).T_triple[1]) == (1, 0)
    assert (ti(4, QUARTIC).T_triple[0], ti(4, QUARTIC).T_triple[1]) == (0, 1)


@pytest.mark.parametrize("d,sigma", [(2, QUAD), (4, QUARTIC), (2, "0"), (-3, "0")])
def test_sequences_are_exact(d, sigma):
    r = ti(d, sigma)
    for les in (r.les_forget, r.les_top, r.les_bottom):
        assert les.exact and les.euler_ok and les.failures() == []


def test_zero_section_splits():
    r = ti(2, "0")
    assert r.T_triple[0] == 4 and r.T_triple[1] == 3
    assert split_check(r) == {"connecting_zero": True, "dims_add": True}
    # O(2) has three sections and no H^1
    assert r.H_F[0] == 3 and r.H_F[1] == 0


def test_forgetful_map_is_smooth_without_H1():
    for d, sigma in [(-1, "0"), (0, "1"), (2, QUAD)]:
        a = forgetful_analysis(ti(d, sigma))
        assert a["verdict"] == "smooth"
        assert a["tangent_surjective"] and a["obstruction_injective"]


def test_forgetful_criterion_not_applicable_with_H1():
    r = ti(-3, "0")
    assert r.H_F[1] == 2 and r.T_triple[2] == 2
    assert forgetful_analysis(r)["verdict"] == "criterion not applicable"


def test_skyscraper_sheaf():
    r = compute_TI(SKYSCRAPER)
    # Ext^0 = Ext^1 = 1 for a point on a curve
    assert r.H_Hom[0] == 1 and r.H_Hom[1] == 1
    assert r.T_triple[0] == 2 and r.T_triple[1] == 0
    assert r.les_forget.exact and r.les_bottom.exact


def test_les_of_a_split_pair_of_complexes():
    # B = A (+) C with A = (Q -> Q) acyclic, C = Q in degree 0
    B = GradedComplex({0: 2, 1: 1}, {0: RatMatrix([[1, 0]], 2)})
    rep = long_exact_sequence(B, {0: [0], 1: [0]})
    assert rep.exact and rep.euler_ok


@pytest.mark.parametrize("d,sigma", [(2, QUAD), (2, "0")])
def test_descent_classes_match_T1(d, sigma):
    r = descent_tangent_check(line_bundle_resolution(d, sigma), 8)
    assert r["match"] and r["representatives_verified"]


def test_descent_on_redundant_cover():
    r = descent_tangent_check(line_bundle_resolution(1, "t"), 6, P1_REDUNDANT, verify_reps=False)
    assert r["match"]


def test_line_feasibility_is_infeasible_from_D2():
    for D in (2, 3, 5):
        P = gamma_problem("t", D)
        c = bracket_extension_feasibility(P)
        assert c.verdict == "INFEASIBLE" and c.contradiction == 1
        assert "[t^1d,a] has -1 on a" in c.derived and "[t^0d,a] has 0 on a" in c.derived
        # Jacobi on (d/dt, t^2 d/dt, a) leaves -2 [t d/dt, a] = 2a
        assert c.reduced_row == (("jacobi", 0, 2, 0, 0), {(): 2})
        assert verify_certificate(P, c)


def test_line_feasibility_at_D1_has_witness():
    # only d/dt and t d/dt: [d/dt, a] = 0, [t d/dt, a] = -a
    P = gamma_problem("t", 1)
    c = bracket_extension_feasibility(P)
    assert c.verdict == "FEASIBLE" and verify_certificate(P, c)
    assert c.witness == {P.unknown(1, 0, 0): -1}


def test_tampered_certificate_is_rejected():
    P = gamma_problem("t", 2)
    c = bracket_extension_feasibility(P)
    bad = FeasibilityCertificate(c.verdict, [(lab, m * 2 if k == 0 else m) for k, (lab, m) in enumerate(c.combination)],
                                 c.contradiction, c.forced)
    assert not verify_certificate(P, bad)
    assert not verify_certificate(P, FeasibilityCertificate("FEASIBLE", witness={}))
    wrong = FeasibilityCertificate(c.verdict, c.combination, c.contradiction, c.forced,
                                   derived_values={**c.derived_values, P.unknown(1, 0, 0): 1}, reduced_row=c.reduced_row)
    assert not verify_certificate(P, wrong)


def test_evaluation_chart_is_feasible():
    P, cand = eval_problem(2, QUAD, 3)
    c = bracket_extension_feasibility(P, cand)
    assert c.verdict == "FEASIBLE" and verify_certificate(P, c)
    assert bracket_extension_feasibility(zero_problem()).verdict == "FEASIBLE"


def test_certificate_json():
    P = gamma_problem("t", 2)
    js = bracket_extension_feasibility(P).to_json(P)
    assert js["verdict"] == "INFEASIBLE" and js["contradiction"] == "1"
    assert all(Fraction(e["multiplier"]) != 0 for e in js["combination"])


def test_exactness_certificate():
    assert exactness_certificate(SKYSCRAPER)["ok"]
    bad = Resolution({-1: [0], 0: [1]}, {-1: [["0"]]}, ["1"])
    assert not exactness_certificate(bad)["ok"]
    with pytest.raises(ValueError):
        TripleScenario(bad).validate()


def test_adding_an_acyclic_pair_keeps_T():
    R2, phi = add_acyclic_pair(SKYSCRAPER, 1)
    assert comparison_check(SKYSCRAPER, R2, phi) == []
    assert resolution_independence_check(SKYSCRAPER, R2, phi)["ok"]


def test_comparison_check_finds_errors():
    assert comparison_check(SKYSCRAPER, SKYSCRAPER, {0: [["1"]], -1: [["1"]]}) == []
    assert comparison_check(SKYSCRAPER, SKYSCRAPER, {0: [["2"]], -1: [["2"]]}) == ["phi(s) differs from the second section"]
    assert any("chain map" in e for e in comparison_check(SKYSCRAPER, SKYSCRAPER, {0: [["1"]], -1: [["0"]]}))


def test_twisting_the_section_keeps_T():
    R2 = twist_section(SKYSCRAPER, ["1"])
    assert R2.s == [{0: 1, 1: 1}]
    assert resolution_independence_check(SKYSCRAPER, R2, None)["ok"]


def test_assembled_cocone_object_satisfies_identities():
    S = assemble_cocone_scdgla(TripleScenario(line_bundle_resolution(2, QUAD), window=4))
    assert S.identity_violations() == []
    assert S.morphism_violations() == []
