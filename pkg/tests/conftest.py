import json
import pathlib

import mpmath as mp
import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from scalekit import HyperExponential, azcue_muler, brownian, cramer_lundberg

ORACLES = json.loads((pathlib.Path(__file__).parent / "oracles" / "frozen.json").read_text())

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")


def named_models():
    """The six rational test models shared with the frozen oracle grid."""
    return {
        "bm": brownian(2**0.5, 1.0),
        "cl_exp2": cramer_lundberg(1.0, 1.0, rate=2.0),
        "cl_exp1_c3": cramer_lundberg(3.0, 1.0, rate=1.0),
        "am_1.4": azcue_muler(1.4),
        "am_2": azcue_muler(2.0),
        "perturbed_hyper": cramer_lundberg(2.0, 1.0, HyperExponential([0.4, 0.6], [1.0, 3.0], 1.0), sigma=0.5),
    }


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


@pytest.fixture(scope="session")
def models():
    return named_models()


@st.composite
def rational_models(draw, positive_profit=False):
    """Exponential / hyperexponential claims, optional Brownian part.

    Mixtures of exponentials keep every root of kappa(s) = delta real.
    """
    sigma = draw(st.sampled_from([0.0, 0.0, 0.3, 1.0, 1.7]))
    lam = draw(st.floats(0.2, 3.0))
    if draw(st.booleans()):
        rate = draw(st.floats(0.5, 4.0))
        jumps = HyperExponential([1.0], [rate], lam)
    else:
        r1 = draw(st.floats(0.5, 2.0))
        r2 = r1 + draw(st.floats(0.5, 3.0))
        w = draw(st.floats(0.1, 0.9))
        jumps = HyperExponential([w, 1 - w], [r1, r2], lam)
    mean_claims = lam * jumps.mean()
    lo = 0.2 if not positive_profit else mean_claims * 1.05 + 0.05
    c = draw(st.floats(lo, lo + 4.0))
    return cramer_lundberg(c, lam, jumps, sigma=sigma)


def sup_err(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def mp_scale(m, d):
    """Roots and partial-fraction weights of 1/(kappa - d) at 40 digits.

    Independent reference for hyperexponential claims: builds the numerator
    polynomial of kappa(s) - d directly from the model parameters.
    """
    with mp.workdps(40):
        P = lambda cs: [mp.mpf(c) for c in cs]
        mul = lambda a, b: [sum(a[i] * b[k - i] for i in range(len(a)) if 0 <= k - i < len(b))
                            for k in range(len(a) + len(b) - 1)]
        add = lambda a, b: [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                            for i in range(max(len(a), len(b)))]
        lam = mp.mpf(m.lam)
        comps = m.jumps.components if m.jumps.active else ()
        base = P([-lam - d, m.drift, m.sigma**2 / 2])        # ascending powers
        prod = P([1])
        for _, _, r in comps:
            prod = mul(prod, P([r, 1]))
        num = mul(base, prod)
        for i, (w, _, r) in enumerate(comps):
            term = P([lam * w * r])
            for j, (_, _, rj) in enumerate(comps):
                if j != i:
                    term = mul(term, P([rj, 1]))
            num = add(num, term)
        while abs(num[-1]) == 0:
            num.pop()
        roots = [mp.re(z) for z in mp.polyroots(num[::-1], maxsteps=400, extraprec=200)]

        def kap(s):
            return (m.sigma**2 / 2 * s * s + m.drift * s
                    + sum(lam * w * (r / (r + s) - 1) for w, _, r in comps))

        coef = [1 / mp.diff(kap, z) for z in roots]
    return roots, coef


def mp_bdruin(m, d, x, b):
    roots, coef = mp_scale(m, d)
    with mp.workdps(40):
        W = lambda v: sum(a * mp.exp(z * v) for a, z in zip(coef, roots))
        Z = lambda v: 1 + d * sum(a * (mp.expm1(z * v) / z if z != 0 else v) for a, z in zip(coef, roots))
        return float(Z(x) - W(x) / W(b) * Z(b))



def mp_z_tail(m, d, x, theta, order=0):
    """Z^{(order)}(x, theta) - A W^{(order)}(x) at 40 digits, A = lim Z(b, theta)/W(b)."""
    roots, coef = mp_scale(m, d)
    with mp.workdps(40):
        d, x, th = mp.mpf(d), mp.mpf(x), mp.mpf(theta)
        phi = max(roots)
        lam = mp.mpf(m.lam)
        comps = m.jumps.components if m.jumps.active else ()
        kap = (m.sigma**2 / 2 * th * th + m.drift * th
               + sum(lam * w * (r / (r + th) - 1) for w, _, r in comps))
        gap = d - kap
        a = gap / (phi - th)
        W = sum(c * z**order * mp.exp(z * x) for c, z in zip(coef, roots))
        Z = mp.exp(th * x) + gap * sum(c * (mp.exp(z * x) - mp.exp(th * x)) / (z - th)
                                       for c, z in zip(coef, roots))
        if order == 1:
            Z = th * Z + gap * sum(c * mp.exp(z * x) for c, z in zip(coef, roots))
        return float(Z - a * W)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE = {}


def report(name, ok, detail=""):
    ACCEPTANCE[name] = (bool(ok), detail)
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
