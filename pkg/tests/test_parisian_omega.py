import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from scalekit import azcue_muler, brownian, build_rational, cramer_lundberg
from scalekit import parisian_omega as po
from scalekit import passage_laws as pl
from scalekit.errors import DeltaError, DomainError, GridError, RepeatedRootError

from conftest import rational_models

CL = cramer_lundberg(1, 1, rate=2)
HS = (1 / 128, 1 / 256, 1 / 512)


def test_parisian_scales_large_r():
    s = build_rational(CL, 0.1)
    x = np.linspace(0.2, 3, 8)
    w, z = po.parisian_scales(s, 1e4, x, 0.3, normalized=True)
    assert w == pytest.approx(s.W(x), abs=1e-3)
    assert z == pytest.approx(s.Z(x, 0.3), abs=1e-3)


def test_parisian_scales_below_zero_and_theta_zero():
    s = build_rational(CL, 0.1)
    r = 0.7
    phi_r = CL.phi(0.1 + r)
    x = np.linspace(-2, 0, 5)
    assert po.parisian_scales(s, r, x)[0] == pytest.approx(np.exp(phi_r * x), rel=1e-12)
    x = np.linspace(0, 3, 7)
    z0 = po.parisian_scales(s, r, x, 0.0)[1]
    assert z0 == pytest.approx((r * s.Z(x) + 0.1 * s.Z(x, phi_r)) / (0.1 + r), rel=1e-12)


def test_parisian_z_removable_point():
    s = build_rational(CL, 0.1)
    r = 0.7
    phi_r = CL.phi(0.1 + r)
    at = po.parisian_z(s, r, 1.3, phi_r)
    near = 0.5 * (po.parisian_z(s, r, 1.3, phi_r - 1e-3) + po.parisian_z(s, r, 1.3, phi_r + 1e-3))
    assert at == pytest.approx(near, rel=1e-5)


def test_parisian_survival():
    s0 = build_rational(CL, 0.0)
    r = 0.8
    assert po.parisian_survival(s0, 0.0, r) == pytest.approx(0.5 * CL.phi(r) / r, rel=1e-12)
    x = np.linspace(0, 4, 9)
    assert po.parisian_survival(s0, x, 1e5) == pytest.approx(1 - pl.gerber_shiu_exit(s0, x), abs=2e-3)
    with pytest.raises(DeltaError):
        po.parisian_survival(build_rational(CL, 0.1), 1.0, r)


def test_omega_zero_is_plain_w():
    base0 = build_rational(CL, 0.0)
    om = po.omega_scales(base0, po.OmegaSpec(lambda x: 0 * x, h=1 / 256, x_max=3.0))
    g = np.linspace(0, 3, 31)
    assert om.w(g) == pytest.approx(base0.W(g), rel=1e-12)
    assert om.z(g) == pytest.approx(1.0)


def _const_errors(m, d):
    base0, sd = build_rational(m, 0.0), build_rational(m, d)
    g = np.linspace(0, 4, 81)
    ew, ez = [], []
    for h in HS:
        om = po.omega_scales(base0, po.OmegaSpec(lambda x: d + 0 * x, h=h, x_max=4.0))
        ew.append(np.max(np.abs(om.w(g) - sd.W(g))))
        ez.append(np.max(np.abs(om.z(g) - sd.Z(g))))
    return np.array(ew), np.array(ez)


@pytest.mark.parametrize("m", [CL, azcue_muler(0.0), cramer_lundberg(1.5, 1, rate=2, sigma=0.5)],
                         ids=["cl", "am0", "perturbed"])
def test_omega_constant_rate_converges(m):
    ew, ez = _const_errors(m, 0.1)
    assert ew[-1] < 1e-4 and ez[-1] < 1e-4
    assert np.all(np.log2(ew[:-1] / ew[1:]) >= 1.9)
    assert np.all(np.log2(ez[:-1] / ez[1:]) >= 1.9)


def test_two_level_omega_matches_parisian():
    d, r, L = 0.1, 0.5, 10.0
    sd, sdr, base0 = build_rational(CL, d), build_rational(CL, d + r), build_rational(CL, 0.0)
    xs = np.linspace(-1, 3, 17)
    exact = po.parisian_scales(sd, r, xs)[0]
    errs = []
    for h in HS:
        om = po.omega_scales(base0, po.two_level_omega(d, r, L, h=h, x_max=L + 3))
        approx = om.w(L + xs) * sdr.kappa_prime_phi * math.exp(-sdr.phi * L)
        errs.append(np.max(np.abs(approx - exact) / exact))
    errs = np.array(errs)
    scaled = errs / np.array(HS) ** 2
    assert np.all(np.log2(errs[:-1] / errs[1:]) >= 1.9)
    assert scaled.max() / scaled.min() < 1.1


def test_omega_dominates_plain_w():
    base0 = build_rational(CL, 0.0)
    spec = po.OmegaSpec.steps([{"from": 0, "to": 1, "rate": 2.0}, {"from": 1, "to": 3, "rate": 0.2}],
                              h=1 / 256, x_max=3.0)
    om = po.omega_scales(base0, spec)
    assert np.all(om.W >= base0.W(om.grid) - 1e-14)
    with pytest.raises(GridError):
        om.w(3.5)
    with pytest.raises(DeltaError):
        po.omega_scales(build_rational(CL, 0.1), spec)
    with pytest.raises(DomainError):
        po.OmegaSpec.steps([{"from": 1, "to": 0, "rate": 1}])


def test_omega_json():
    text = json.dumps([{"from": 0, "to": 2, "rate": 0.3}])
    spec = po.OmegaSpec.from_json(text, h=1 / 64)
    assert spec.x_max == 2 and spec.breakpoints == (0.0, 2.0)


def test_occupation_auxiliary():
    d, r = 0.1, 0.6
    s_r, s_d = build_rational(CL, r), build_rational(CL, d)
    x = np.linspace(0, 4, 21)
    assert po.occupation_auxiliary(s_r, s_d, x, -0.5) == pytest.approx(s_d.W(x))
    a = 1.5
    low = x <= a
    assert po.occupation_auxiliary(s_r, s_d, x, a)[low] == pytest.approx(s_r.W(x[low]))
    up = po.occupation_auxiliary(s_r, s_d, x, a, "upper")
    lo = po.occupation_auxiliary(s_r, s_d, x, a, "lower")
    assert up == pytest.approx(lo, abs=1e-9)


def test_occupation_positive_half():
    assert po.occupation_positive_half(CL, 0.2, 0.0) == pytest.approx(1 / 0.2)
    d, r = 0.2, 0.5
    band = [po.occupation_reflected_band(CL, d, b, r) for b in (20.0, 40.0)]
    # b -> infinity: the reflected band law tends to the unreflected one
    assert band[-1] == pytest.approx(po.occupation_positive_half(CL, d, r), rel=1e-8)


def test_occupation_joint_total():
    d, rm, rp = 0.1, 0.7, 0.3
    f = lambda y: po.occupation_joint_density(CL, d, 0.0, y, rm, rp)
    # far below 0 the two terms cancel in floating point; the true tail past -15 is ~1e-9
    tot = integrate.quad(f, -15, 0, limit=400)[0] + integrate.quad(f, 0, 60, limit=200)[0]
    assert tot == pytest.approx(po.occupation_joint_total(CL, d, rm, rp), rel=1e-7)


def test_occupation_dispatch():
    v = po.occupation_time_laws(CL, {"kind": "positive_half", "delta": 0.2, "r": 0.5})
    assert v == pytest.approx(po.occupation_positive_half(CL, 0.2, 0.5))
    with pytest.raises(DomainError):
        po.occupation_time_laws(CL, {"kind": "nope"})


@given(rational_models(positive_profit=True), st.floats(0.05, 3.0), st.floats(0.0, 2.0))
def test_parisian_survival_monotone(m, r, dr):
    # more frequent observation can only detect ruin sooner: nonincreasing in r
    try:
        s0 = build_rational(m, 0.0)
    except RepeatedRootError:
        return
    x = np.linspace(0, 4, 30)
    v = po.parisian_survival(s0, x, r)
    assert np.all(np.diff(v) >= -1e-12)
    assert np.all(po.parisian_survival(s0, x, r + dr) <= v + 1e-12)


@given(rational_models(), st.floats(0.01, 1.0), st.floats(0.05, 3.0), st.floats(-0.45, 2.0))
def test_parisian_z_at_zero(m, d, r, theta):
    s = build_rational(m, d)
    phi_r = m.phi(d + r)
    if abs(m(theta) - d - r) < 1e-6 and abs(theta - phi_r) > 1e-4:
        return
    assert po.parisian_scales(s, r, 0.0, theta)[1] == pytest.approx(1.0, abs=1e-9)
