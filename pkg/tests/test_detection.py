import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

import oracles
from msrs_deploy.detection import (
    DetectorConfig,
    DomainError,
    Mode,
    PfaConvention,
    bessel_i,
    detection_probability,
    marcum_q,
    pfa_of_threshold,
    pfa_peak,
    required_rtsn,
    solve_threshold,
)


def test_marcum_q1_at_one_matches_quadrature():
    assert marcum_q(1, 1.0, 1.0) == pytest.approx(oracles.marcum_q_quad(1, 1.0, 1.0), abs=1e-12)


def test_marcum_q_matches_ncx2_off_grid():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 80))
        a, b = rng.uniform(0, 30, 2)
        ref = oracles.pd_ncx2(a * a / 2, n, b * b / 2)
        assert marcum_q(n, a, b) == pytest.approx(ref, abs=1e-12)


def test_marcum_q_edges():
    assert marcum_q(3, 2.0, 0.0) == 1.0
    assert marcum_q(1, 0.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert marcum_q(5, 0.0, 3.0) == pytest.approx(special.gammaincc(5, 4.5), rel=1e-13)


@pytest.mark.parametrize("args", [(0, 1.0, 1.0), (1, -1.0, 1.0), (1, 1.0, math.nan), (1, math.inf, 1.0)])
def test_marcum_q_domain_errors(args):
    with pytest.raises(DomainError):
        marcum_q(*args)


def test_bessel_i_matches_scipy():
    for order in (0, 1, 5, 30):
        for z in (0.0, 0.3, 2.0, 15.0, 60.0):
            assert bessel_i(order, z) == pytest.approx(special.iv(order, z), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.floats(0.05, 10), st.floats(0, 10))
def test_marcum_recurrence(n, a, b):
    lhs = marcum_q(n + 1, a, b) - marcum_q(n, a, b)
    rhs = (b / a) ** n * math.exp(-(a * a + b * b) / 2) * bessel_i(n, a * b)
    assert abs(lhs - rhs) <= 1e-9


def test_pfa_examples():
    assert pfa_of_threshold(-math.log(1e-6), 1, "standard") == pytest.approx(1e-6, rel=1e-12)
    assert pfa_of_threshold(20.0, 1, "paper_literal") == pytest.approx(math.exp(-20) * 20, rel=1e-14)
    series = math.fsum(60.0**i / math.factorial(i) for i in range(1, 25)) * math.exp(-60.0)
    assert pfa_of_threshold(60.0, 25, "paper_literal") == pytest.approx(series, rel=1e-12)


def test_threshold_examples():
    assert solve_threshold(1e-6, 1, "standard") == pytest.approx(13.815510558, abs=1e-9)
    g = solve_threshold(1e-6, 1, "paper_literal")
    assert g >= 1.0
    assert g == pytest.approx(oracles.threshold_bisect(1e-6, 1, "paper_literal"), rel=1e-12)


@pytest.mark.parametrize("conv", list(PfaConvention))
@pytest.mark.parametrize("order", [1, 2, 4, 25, 64])
def test_threshold_matches_independent_bisection(conv, order):
    for p in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
        assert solve_threshold(p, order, conv) == pytest.approx(oracles.threshold_bisect(p, order, conv.value), rel=1e-11)


def test_pfa_peak_is_maximum():
    for order in (3, 4, 25):
        g = pfa_peak(order, "paper_literal")
        f = pfa_of_threshold(g, order, "paper_literal")
        assert f >= pfa_of_threshold(g * 0.99, order, "paper_literal")
        assert f >= pfa_of_threshold(g * 1.01, order, "paper_literal")


def test_unattainable_pfa_reports_maximum():
    # paper_literal single-sample P_fa peaks at e^-1
    with pytest.raises(DomainError, match="maximum attainable"):
        solve_threshold(0.5, 1, "paper_literal")
    with pytest.raises(DomainError):
        solve_threshold(0.0, 1, "standard")


def test_detector_build_orders():
    coop = DetectorConfig.build("cooperative", 5, 1e-6)
    non = DetectorConfig.build(Mode.NON_COOPERATIVE, 5, 1e-6)
    assert coop.order == 25 and non.order == 1
    assert coop.threshold == solve_threshold(1e-6, 25, "paper_literal")
    assert coop.pfa_convention is PfaConvention.LITERAL


def test_detection_probability_examples():
    det = DetectorConfig.build("non_cooperative", 1, 1e-6, "standard")
    assert detection_probability(0.0, det) == pytest.approx(math.exp(-det.threshold), rel=1e-12)
    assert detection_probability(1e6, det) == pytest.approx(1.0, abs=1e-9)
    chi = 10 ** 1.25
    pd = detection_probability(chi, det)
    assert pd == pytest.approx(oracles.marcum_q_quad(1, math.sqrt(2 * chi), math.sqrt(2 * det.threshold)), abs=1e-12)
    assert 0.7 < pd < 0.85


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 200), st.sampled_from([1, 4, 25]), st.sampled_from(list(PfaConvention)))
def test_pd_bounded_and_increasing(chi, order, conv):
    mode = "non_cooperative" if order == 1 else "cooperative"
    det = DetectorConfig.build(mode, int(math.isqrt(order)), 1e-6, conv)
    lo = detection_probability(chi, det)
    hi = detection_probability(chi + 1e-3 * (1 + chi), det)
    assert 0.0 <= lo <= 1.0
    assert hi >= lo
    if 1e-9 < lo < 1 - 1e-9:
        assert hi > lo


def test_required_rtsn_is_the_coverage_cut():
    for mode, j in (("cooperative", 3), ("non_cooperative", 3)):
        det = DetectorConfig.build(mode, j, 1e-6)
        cut = required_rtsn(det, 0.8)
        assert detection_probability(cut, det) == pytest.approx(0.8, abs=1e-12)
        assert detection_probability(cut * (1 - 1e-6), det) < 0.8
