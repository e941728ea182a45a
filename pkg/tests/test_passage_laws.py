import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from scalekit import HyperExponential, azcue_muler, brownian, build_rational, build_series, cramer_lundberg
from scalekit import passage_laws as pl
from scalekit.errors import DeltaError, DomainError, DriftSignError, RepeatedRootError

from conftest import mp_bdruin, rational_models

CL = cramer_lundberg(1, 1, rate=2)


def test_two_sided_exit():
    s = build_rational(CL, 0.1)
    assert pl.two_sided_exit_up(s, 1.0, 1.0) == pytest.approx(1.0)
    # driftless: kappa = sigma^2 s^2 / 2 has a double root, so use the series backend
    s0 = build_series(brownian(1.0, 0.0), 0.0)
    assert pl.two_sided_exit_up(s0, 0.3, 1.2) == pytest.approx(0.25, rel=1e-12)
    with pytest.raises(DomainError):
        pl.two_sided_exit_up(s, 2.0, 1.0)


def test_ruin_transform_examples():
    bm = build_rational(brownian(1.1, 0.3), 0.2)
    assert pl.gerber_shiu_exit(bm, 0.0, theta=0.4) == pytest.approx(1.0, abs=1e-14)
    s0 = build_rational(CL, 0.0)
    x = np.linspace(0, 5, 11)
    assert pl.gerber_shiu_exit(s0, x) == pytest.approx(1 - 0.5 * s0.W(x), rel=1e-12)
    s0 = build_rational(brownian(math.sqrt(2), 1.0), 0.0)
    assert pl.gerber_shiu_exit(s0, 1.0) == pytest.approx(math.exp(-1), rel=1e-12)


def test_three_level_and_recurrence():
    s = build_rational(CL, 0.1)
    a, i, b = 0.0, 1.0, 3.0
    expected = 1 - s.W(0.0) / s.W(b - i) * s.W(b - a) / s.W(i - a)
    assert pl.three_level_hitting(s, i, i, a, b) == pytest.approx(expected)
    bm = build_rational(brownian(1, 0.4), 0.1)
    assert pl.three_level_hitting(bm, 1.0, 1.0, 0.0, 3.0) == pytest.approx(1.0, abs=1e-12)
    x = np.linspace(-3, 3, 13)
    v = pl.hitting_time_transform(s, x)
    assert np.all((v > 0) & (v <= 1 + 1e-12))


def test_creeping():
    x = np.linspace(0, 4, 9)
    assert np.all(pl.creeping_probability(build_rational(CL, 0.1), x) == 0)
    bm = build_rational(brownian(0.8, 0.2), 0.15)
    assert pl.creeping_probability(bm, x) == pytest.approx(pl.gerber_shiu_exit(bm, x), abs=1e-9)
    am = build_rational(azcue_muler(1.4), 0.1)
    c = pl.creeping_probability(am, 1.0)
    assert 0 < c < pl.gerber_shiu_exit(am, 1.0)


def test_maximal_severity():
    s0 = build_rational(CL, 0.0)
    assert pl.maximal_severity(s0, 1.0, 200.0) == pytest.approx(pl.gerber_shiu_exit(s0, 1.0), rel=1e-9)
    bm0 = build_rational(brownian(1, 0.5), 0.0)
    assert pl.maximal_severity(bm0, 1e-12, 1.0) == pytest.approx(1.0, abs=1e-9)


def test_resolvent():
    s = build_rational(CL, 0.1)
    a, b, x = 0.0, 3.0, 1.2
    mass, _ = integrate.quad(lambda y: float(pl.resolvent_density(s, x, y, a, b)), a, b, points=[x])
    rhs = 1 - s.W(x - a) / s.W(b - a) - pl.gerber_shiu_exit(s, x, b)
    assert s.delta * mass == pytest.approx(rhs, abs=1e-6)
    assert np.all(pl.resolvent_density(build_rational(brownian(1, 0.3), 0.1), 0.0,
                                       np.linspace(0, 2, 5), 0.0, 2.0) == pytest.approx(0, abs=1e-14))
    bm = build_rational(brownian(1.0, 0.0), 0.2)
    a, b = 0.0, 2.0
    assert pl.resolvent_density(bm, 0.5, 1.3, a, b) == pytest.approx(pl.resolvent_density(bm, 1.5, 0.7, a, b))


def test_exit_time():
    s0 = build_rational(CL, 0.0)
    assert pl.exit_time_transform(s0, 0.7, 2.0) == 1.0
    s = build_rational(CL, 0.3)
    assert pl.exit_time_transform(s, 2.0, 2.0) == pytest.approx(1.0)
    # derivative in delta at 0 gives minus the expected exit time
    eps = 1e-6
    d_num = (1 - pl.exit_time_transform(build_rational(CL, eps), 0.7, 2.0)) / eps
    assert d_num == pytest.approx(pl.expected_exit_time(s0, 0.7, 2.0), rel=1e-4)


def test_capital_injections():
    s = build_rational(CL, 0.1)
    assert pl.capital_injection_transform(s, 0.4, 2.0, math.inf) == pytest.approx(s.W(0.4) / s.W(2.0))
    assert pl.capital_injection_transform(s, 2.0, 2.0, 0.7) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        pl.capital_injection_transform(s, 1.0, 2.0, 0.0)


def test_drawdown():
    s = build_rational(CL, 0.1)
    d = 1.3
    total, _ = integrate.quad(lambda m: float(pl.drawdown_deficit(s, d, 0.0, m=m)), 0, math.inf)
    assert total == pytest.approx(pl.drawdown_time_transform(s, d), rel=1e-8)
    assert pl.drawdown_deficit(s, d, variant="no_recovery") <= 1
    sig, mu, dl = 0.9, 0.4, 0.2
    bm = build_rational(brownian(sig, mu), dl)
    gamma = 2 * mu / sig**2
    x = np.linspace(0.1, 3, 7)
    assert bm.delta_zw(x) == pytest.approx(2 / sig**2 * np.exp(-gamma * x), rel=1e-9)


def test_bailout_exponential_time():
    s = build_rational(CL, 0.1)
    b, th = 2.0, 0.6
    a0 = pl.bailout_exponential_time(s, 0.0, b, th)
    assert a0 == pytest.approx(s.delta * s.Wbar(b) / s.Z(b, th), rel=1e-12)
    limit = pl.bailout_exponential_time(s, 0.5, 40.0, th, "up_to_min")
    assert math.isfinite(limit)
    big = pl.bailout_exponential_time(s, 0.5, b, 200.0, "before_tau_b")
    small = pl.bailout_exponential_time(s, 0.5, b, 100.0, "before_tau_b")
    assert abs(big - small) < abs(small) * 0.1 + 1e-3


def test_dividends_penalty():
    s = build_rational(cramer_lundberg(1.2, 1, rate=2, sigma=0.3), 0.1)
    b = 1.5
    x = np.linspace(0, b, 7)
    assert pl.dividends_penalty_transform(s, x, b, 0.3, 0.0) == pytest.approx(
        pl.gerber_shiu_exit(s, x, b, pl.REFLECT, 0.3), rel=1e-12)
    th, vt = -0.2, 0.8
    assert pl.dividends_penalty_transform(s, b, b, th, vt) == pytest.approx(
        pl.dividends_penalty_at_barrier(s, b, th, vt), rel=1e-10)


def test_joint_dividends_bailouts():
    s = build_rational(CL, 0.1)
    b, vt = 2.0, 0.4
    x = np.linspace(0, b, 5)
    v = pl.joint_dividends_bailouts(s, x, b, 0.0, vt)
    assert v == pytest.approx(1 - vt * s.Z(x) / (s.Zp(b) + vt * s.Z(b)), rel=1e-12)
    eps = 1e-6
    deriv = (1 - pl.joint_dividends_bailouts(s, x, b, 0.0, eps)) / eps
    assert deriv == pytest.approx(s.Z(x) / s.Zp(b), rel=1e-5)
    assert pl.joint_dividends_bailouts(s, b, b, 0.5, vt) == pytest.approx(
        pl.joint_dividends_bailouts_at_barrier(s, b, 0.5, vt), rel=1e-10)
    assert pl.joint_dividends_bailouts(s, x, b, 0.5, 0.0) == pytest.approx(
        pl.bailout_exponential_time(s, x, b, 0.5, "doubly_reflected"), rel=1e-12)


def test_expected_ruin_time_brownian():
    s0 = build_rational(brownian(1.0, -1.0), 0.0)
    x = np.linspace(0, 5, 11)
    assert pl.expected_ruin_time(s0, x) == pytest.approx(x, abs=1e-9)
    sig, mu = 1.2, 0.5
    s0 = build_rational(brownian(sig, mu), 0.0)
    g = 2 * mu / sig**2
    assert pl.expected_ruin_time(s0, x, "positive_drift") == pytest.approx(x / mu * np.exp(-g * x), abs=1e-8)
    with pytest.raises(DriftSignError):
        pl.expected_ruin_time(s0, x)


def test_expected_ruin_time_exponential_claims():
    c, lam, mu = 2.0, 1.0, 1.0
    s0 = build_rational(cramer_lundberg(c, lam, rate=mu), 0.0)
    rho = lam / (c * mu)
    gamma = mu - lam / c
    x = np.linspace(0, 6, 13)
    ref = rho / (c**2 * gamma) * np.exp(-gamma * x) * (lam * x + c)
    assert pl.expected_ruin_time(s0, x, "positive_drift") == pytest.approx(ref, abs=1e-8)


def test_expected_hitting_time():
    assert pl.expected_hitting_time(build_rational(brownian(1, 0.7), 0.0), 0.0) == pytest.approx(0, abs=1e-14)
    s0 = build_rational(brownian(0.9, 0.6), 0.0)
    x = np.linspace(0, 4, 9)
    assert pl.expected_hitting_time(s0, x) == pytest.approx(pl.expected_ruin_time(s0, x, "positive_drift"), abs=1e-10)
    with pytest.raises(DeltaError):
        pl.expected_hitting_time(build_rational(CL, 0.1), 1.0)


def test_expected_dividends():
    sig = 0.8
    s0 = build_series(brownian(sig, 0.0), 0.0)
    assert pl.expected_dividends(s0, 0.9, 2.0) == pytest.approx(0.9, rel=1e-10)
    s = build_rational(CL, 0.1)
    assert pl.expected_dividends(s, 2.0, 2.0) == pytest.approx(1 / s.nu(2.0))
    assert pl.expected_dividends(s, 2.0, 2.0, "infinite") == pytest.approx(s.Z(2.0) / (0.1 * s.W(2.0)))


def test_expected_bailouts():
    s = build_rational(CL, 0.1)
    assert pl.expected_bailouts(s, 2.0, 2.0) == pytest.approx(0.0, abs=1e-12)
    x, b = 0.7, 2.0
    ref = s.Z(x) * s.Z(b) / s.Zp(b) - s.Zbar(x) - s.profit / s.delta
    assert pl.expected_bailouts(s, x, b, "infinite") == pytest.approx(ref, rel=1e-12)


def test_smooth_gerber_shiu():
    s = build_rational(cramer_lundberg(1.5, 1, rate=2, sigma=0.4), 0.1)
    assert pl.smooth_gerber_shiu(s, pl.ExponentialPenalty(0.0), 1.3) == pytest.approx(s.Z(1.3))
    assert pl.smooth_gerber_shiu(s, pl.LinearPenalty(1.0, 0.0), 0.0) == pytest.approx(0.0, abs=1e-14)
    for th in (0.3, 1.0):
        for x in (0.5, 2.0):
            assert pl.gs_exponential_decomposition(s, x, th) == pytest.approx(s.Z(x, th), abs=1e-6)


@given(rational_models(), st.floats(0.02, 1.5), st.floats(0.0, 1.0), st.floats(0.1, 4.0),
       st.floats(-0.45, 0.0), st.floats(0.0, 3.0))
def test_consistency_web(m, d, frac, b, theta, vt):
    try:
        s = build_rational(m, d)
    except RepeatedRootError:
        return
    x = frac * b
    tau = pl.exit_time_transform(s, x, b)
    twos = pl.two_sided_exit_up(s, x, b)
    bdruin = s.Z(x) - s.W(x) / s.W(b) * s.Z(b)
    assert tau == pytest.approx(twos + bdruin, abs=1e-10)
    assert pl.gerber_shiu_exit(s, x, b, pl.ABSORB, 0.0) == pytest.approx(bdruin, abs=1e-10)
    assert pl.dividends_penalty_transform(s, x, b, theta, 0.0) == pytest.approx(
        pl.gerber_shiu_exit(s, x, b, pl.REFLECT, theta), abs=1e-10)
    for v in (twos, tau, pl.capital_injection_transform(s, x, b, 1.0 + vt),
              pl.gerber_shiu_exit(s, x, b, pl.ABSORB, theta)):
        assert -1e-12 <= v <= 1 + 1e-12


@given(rational_models(), st.floats(0.02, 1.0), st.floats(-0.45, 0.0))
def test_large_b_limit(m, d, theta):
    try:
        s = build_rational(m, d)
    except RepeatedRootError:
        return
    # the gap scales like W(x) exp(-(Phi - zeta_2) b); check near the origin
    others = [r.real for r in np.atleast_1d(s.roots) if abs(r - s.phi) > 1e-9]
    gap = s.phi - max(others) if others else s.phi
    b = min(max(30 / gap, 10 / s.phi, 10.0), 600 / s.phi)
    x = np.linspace(0, 1, 6)
    assert pl.gerber_shiu_exit(s, x, b, pl.ABSORB, theta) == pytest.approx(
        pl.gerber_shiu_exit(s, x, math.inf, pl.ABSORB, theta), abs=1e-6)


@given(rational_models(), st.floats(0.02, 1.0), st.floats(0.5, 5.0))
def test_monotonicity(m, d, b):
    try:
        s = build_rational(m, d)
    except RepeatedRootError:
        return
    x = np.linspace(0, b, 50)
    assert np.all(np.diff(pl.gerber_shiu_exit(s, x, b)) <= 1e-12)
    assert np.all(np.diff(pl.two_sided_exit_up(s, x, b)) >= -1e-12)


def test_no_cancellation_for_large_phi_b():
    # strongly negative drift: Phi b is about 60, W(b) about e^60
    m = cramer_lundberg(0.25, 2.0, HyperExponential([1.0], [3.3], 2.0))
    d, x, b = 0.717, 2.9, 5.6
    s = build_rational(m, d)
    ref = mp_bdruin(m, mp.mpf(d), mp.mpf(x), mp.mpf(b))
    assert float(pl.gerber_shiu_exit(s, x, b)) == pytest.approx(ref, rel=1e-12)
    tau = pl.exit_time_transform(s, x, b)
    assert float(tau) == pytest.approx(ref + float(pl.two_sided_exit_up(s, x, b)), rel=1e-12)
    # huge b where W(b) itself overflows
    assert float(pl.two_sided_exit_up(s, 1.0, 80.0)) >= 0.0
    assert np.isfinite(pl.gerber_shiu_exit(s, 1.0, 80.0))


@given(rational_models(), st.floats(0.01, 1.0), st.floats(0.0, 1.0), st.floats(0.3, 8.0))
def test_ruin_before_exit_matches_high_precision(m, d, frac, b):
    try:
        s = build_rational(m, d)
    except RepeatedRootError:
        return
    x = frac * b
    ref = mp_bdruin(m, mp.mpf(d), mp.mpf(x), mp.mpf(b))
    assert float(pl.gerber_shiu_exit(s, x, b)) == pytest.approx(ref, abs=1e-11)
