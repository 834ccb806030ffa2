import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deform_kernel.geom import (
    P1_REDUNDANT,
    P1_STANDARD,
    CoconeSheaf,
    DivisorData,
    StabilizationError,
    WindowedSheaf,
    atiyah_check,
    cech_cohomology,
    cech_model,
    format_poly,
    global_sections,
    line_bundle,
    line_bundle_oracle,
    line_bundle_resolution,
    parse_poly,
    poly_divmod,
    padd,
    pmul,
    stabilized,
    tangent_sheaf,
    tjurina_number,
    transition_cocycle_check,
)
from deform_kernel.triples import compute_TI

nonzero = lambda d: {n: v for n, v in d.items() if v}


@pytest.mark.parametrize("d", range(-6, 7))
def test_line_bundle_cohomology_matches_monomial_count(d):
    assert cech_cohomology(line_bundle(d)).dims == nonzero(line_bundle_oracle(d))


@pytest.mark.parametrize("cover", [P1_STANDARD, P1_REDUNDANT])
def test_tangent_sheaf_has_three_sections(cover):
    assert cech_cohomology(tangent_sheaf(), cover).dims == {0: 3}


@pytest.mark.parametrize("d", [-2, 1])
def test_line_bundle_cohomology_is_cover_independent(d):
    assert cech_cohomology(line_bundle(d), P1_REDUNDANT).dims == cech_cohomology(line_bundle(d)).dims


@pytest.mark.parametrize("d", [-2, 0, 3])
def test_atiyah_algebra_has_four_sections(d):
    # 0 -> O -> P(O(d)) -> Theta -> 0 with H^1(O) = 0 gives 1 + 3
    r = compute_TI(line_bundle_resolution(d, "0"), les=False)
    assert r.T_pair[0] == 4 and r.H_Hom[0] == 1 and r.H_Theta[0] == 3
    assert r.T_pair[1] == 0


def test_global_sections_of_O2():
    W = WindowedSheaf(line_bundle(2), P1_STANDARD, 6)
    assert len(global_sections(W)) == 3


@pytest.mark.parametrize("d,sigma", [(2, "t^2-1"), (3, "t"), (0, "1")])
def test_atiyah_sequence_on_charts(d, sigma):
    R = line_bundle_resolution(d, sigma)
    for chart in ("t", "s"):
        r = atiyah_check(R, chart, 6)
        assert r["exact"] and r["anchor_onto"]


@pytest.mark.parametrize("d", [-1, 2, 4])
def test_differential_commutes_with_transition(d):
    assert transition_cocycle_check(line_bundle(d), 6)
    assert transition_cocycle_check(CoconeSheaf(line_bundle_resolution(d, "1" if d >= 0 else "0")), 6)


def test_cech_model_labels_match_dimensions():
    W = WindowedSheaf(tangent_sheaf(), P1_STANDARD, 5)
    M = cech_model(W, P1_STANDARD)
    assert all(len(M.labels[n]) == M.total.dim(n) for n in M.labels)
    assert M.select({"X"}) == {n: list(range(len(lst))) for n, lst in M.labels.items()}


def test_divisor_T1_on_the_line():
    assert DivisorData("t", space="A1").T1_dim("t") == 0
    assert DivisorData("t^2", space="A1").T1_dim("t") == 1
    assert DivisorData("t^3", space="A1").T1_dim("t") == 2


def test_divisor_rejects_bad_sections():
    with pytest.raises(ValueError):
        DivisorData("0", d=2)
    with pytest.raises(ValueError):
        DivisorData("t^3", d=2)


@pytest.mark.parametrize("f,mu", [("x*y", 1), ("y^2-x^3", 2), ("x^2+y^3", 2), ("y^2-x^4", 3)])
def test_tjurina_numbers(f, mu):
    assert tjurina_number(f).dims == {0: mu}


def test_stabilization_reports_failure():
    growing = lambda k: {0: k}
    with pytest.raises(StabilizationError):
        stabilized(growing, 2, 8)
    r = stabilized(lambda k: {0: min(k, 5)}, 2, 20)
    assert r.dims == {0: 5} and r.window == 5


def test_parse_and_format_poly():
    assert parse_poly("t^2 - 1") == {2: 1, 0: -1}
    assert parse_poly("0") == {}
    assert parse_poly("3/2*t - 3/2*t") == {}
    assert format_poly(parse_poly("t^2-1")) == format_poly({0: -1, 2: 1})
    assert parse_poly(format_poly({3: 2, 1: -1})) == {3: 2, 1: -1}


polys = st.dictionaries(st.integers(0, 4), st.integers(-3, 3).filter(bool), max_size=4)


@settings(max_examples=50, deadline=None)
@given(polys, polys.filter(bool))
def test_poly_division(a, b):
    q, r = poly_divmod(a, b)
    assert padd(pmul(q, b), r) == a
    assert not r or max(r) < max(b)
