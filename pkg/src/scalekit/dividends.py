"""Barrier functions, value functions and barrier optimizers for dividend problems.

Every objective is a small frozen dataclass exposing

* ``H(s, b)``      the barrier function (vectorised in b),
* ``dH(s, b)``     its b-derivative, used to polish optima,
* ``value(s, x, b)`` the value of the barrier strategy at b started from x,
* ``limit(s)``     the analytic value of H as b grows.

The optimizer always maximizes H.  For the expected-dividend objectives
(DeFinetti, DeFinettiPenalty, SLG, TaxedDrawdown) this maximizes the value.
For DividendsPenalty and DividendsTime the value is a transform
Z(x, theta) - W(x) H(b), so maximizing H minimizes the transform; the
``direction`` attribute records which way the value itself is optimized.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize, signal

from .errors import DegenerateError, DeltaError, DivergentIntegral, DomainError, ScanError

MAXIMIZE, MINIMIZE = "maximize", "minimize"
TIE_RTOL = 1e-9
GOLDEN_XTOL = 1e-8
# wiggles smaller than this (relative) on a flat tail are roundoff, not maxima
NOISE_RTOL = 1e-10


def _arr(b):
    b = np.asarray(b, dtype=float)
    if np.any(b < 0) or np.any(~np.isfinite(b)):
        raise DomainError("barrier must be finite and >= 0")
    return b


def _above_barrier(x, b, inside, outside):
    """Evaluate ``inside`` for x <= b and ``outside`` for x > b."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("initial level must be >= 0")
    xb = np.minimum(x, b)
    out = np.where(x <= b, inside(xb), outside(x))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class DeFinetti:
    direction = MAXIMIZE

    def H(self, s, b):
        return 1.0 / s.W(_arr(b), 1)

    def dH(self, s, b):
        return -s.W(b, 2) / s.W(b, 1) ** 2

    def value(self, s, x, b):
        hb = float(self.H(s, b))
        return _above_barrier(x, b, lambda y: s.W(y) * hb, lambda y: y - b + float(s.W(b)) * hb)

    def limit(self, s):
        return 0.0 if s.phi > 0 else math.inf


@dataclass(frozen=True)
class DeFinettiPenalty:
    """De Finetti dividends with the linear ruin penalty k*deficit - K.

    G(x) = k Z1(x) - K Z(x) is the smooth Gerber-Shiu function of the penalty.
    """
    K: float = 0.0
    k: float = 0.0
    direction = MAXIMIZE

    def _g1(self, s, b):
        # G'(b), with Z1' = Z - kappa'(0) W
        return self.k * (s.Z(b) - s.profit * s.W(b)) - self.K * s.delta * s.W(b)

    def _g2(self, s, b):
        return self.k * (s.delta * s.W(b) - s.profit * s.W(b, 1)) - self.K * s.delta * s.W(b, 1)

    def G(self, s, x):
        return self.k * s.Z1(x) - self.K * s.Z(x)

    def H(self, s, b):
        b = _arr(b)
        return (1.0 - self._g1(s, b)) / s.W(b, 1)

    def dH(self, s, b):
        w1, w2 = s.W(b, 1), s.W(b, 2)
        return (-w2 + self._g1(s, b) * w2 - w1 * self._g2(s, b)) / w1**2

    def value(self, s, x, b):
        hb = float(self.H(s, b))
        vb = float(self.G(s, b) + s.W(b) * hb)
        return _above_barrier(x, b, lambda y: self.G(s, y) + s.W(y) * hb, lambda y: y - b + vb)

    def limit(self, s):
        if s.phi <= 0:
            return math.inf
        return (self.k * (s.profit - s.delta / s.phi) + self.K * s.delta) / s.phi


@dataclass(frozen=True)
class SLG:
    """Dividends minus k times capital injections, both over an infinite horizon."""
    k: float = 1.0
    direction = MAXIMIZE

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("SLG needs k >= 1")

    @staticmethod
    def _need(s):
        if s.delta <= 0:
            raise DeltaError("SLG needs delta > 0")

    def H(self, s, b):
        self._need(s)
        b = _arr(b)
        w = s.W(b)
        safe = np.where(w > 0, w, 1.0)
        # W(0) = 0: the limit is -inf for k > 1 and -kappa'(0) for k = 1
        at0 = -math.inf if self.k > 1 else 0.0
        out = np.where(w > 0, (1.0 - self.k * s.Z(b)) / safe, at0) - s.profit
        return out[()] if out.ndim == 0 else out

    def dH(self, s, b):
        w, w1 = s.W(b), s.W(b, 1)
        return (-self.k * s.delta * w * w - (1.0 - self.k * s.Z(b)) * w1) / w**2

    def value(self, s, x, b):
        self._need(s)
        if b <= 0 and s.w_at_0 == 0:
            raise DomainError("SLG value needs b > 0 when W(0) = 0")
        scale = (1.0 - self.k * (s.Z(b) - s.profit * s.W(b))) / (s.delta * s.W(b))

        def inside(y):
            return self.k * s.Z1(y) + s.Z(y) * scale

        vb = float(inside(b))
        return _above_barrier(x, b, inside, lambda y: y - b + vb)

    def limit(self, s):
        self._need(s)
        return -self.k * s.delta / s.phi - s.profit


@dataclass(frozen=True)
class DividendsPenalty:
    """E_x[exp(-delta T + theta X(T) - vartheta R(T))] under reflection at b."""
    theta: float = 0.0
    vartheta: float = 0.0
    direction = MINIMIZE

    def __post_init__(self):
        if self.theta > 0:
            raise DomainError("theta must be <= 0")
        if self.vartheta < 0:
            raise DomainError("vartheta must be >= 0")

    def H(self, s, b):
        b = _arr(b)
        th, vt = self.theta, self.vartheta
        return (s.Zp(b, th) + vt * s.Z(b, th)) / (s.W(b, 1) + vt * s.W(b))

    def dH(self, s, b):
        th, vt = self.theta, self.vartheta
        z, z1 = s.Z(b, th), s.Zp(b, th)
        z2 = th * z1 + (s.delta - float(s.kappa(th))) * s.W(b, 1)
        num, den = z1 + vt * z, s.W(b, 1) + vt * s.W(b)
        dnum, dden = z2 + vt * z1, s.W(b, 2) + vt * s.W(b, 1)
        return (dnum * den - num * dden) / den**2

    def value(self, s, x, b):
        hb = float(self.H(s, b))
        th = self.theta

        def inside(y):
            return s.Z(y, th) - s.W(y) * hb

        vb = float(inside(b))
        return _above_barrier(x, b, inside, lambda y: np.exp(-self.vartheta * (y - b)) * vb)

    def limit(self, s):
        if s.phi <= 0:
            raise DomainError("limit needs Phi_delta > 0")
        th = self.theta
        if abs(th - s.phi) < 1e-12:
            return s.kappa_prime_phi
        return (s.delta - float(s.kappa(th))) / (s.phi - th)


@dataclass(frozen=True)
class DividendsTime(DividendsPenalty):
    """The theta = 0 case: dividends against the time of ruin."""

    def __init__(self, vartheta=0.0):
        super().__init__(0.0, vartheta)

    def limit(self, s):
        if s.phi <= 0:
            raise DomainError("limit needs Phi_delta > 0")
        return s.delta / s.phi

    def at_zero(self, s):
        return (s.delta * s.w_at_0 + self.vartheta) / (s.wp_at_0 + self.vartheta * s.w_at_0)


@dataclass(frozen=True)
class TaxedDrawdown:
    """Taxation at rate gamma of new maxima, stopped at the affine drawdown time.

    The barrier b is the level from which taxation starts.  H(b) is the
    influence function W(xi(b))^{-1/(1-xi)} v_gamma(b) with xi(x) = (1-xi)x + d.
    """
    xi: float = 0.0
    d: float = 0.0
    gamma: float = 1.0
    direction = MAXIMIZE

    def __post_init__(self):
        if not self.xi < 1:
            raise DomainError("xi must be < 1")
        if self.d < 0:
            raise DomainError("d must be >= 0")
        if not 0 <= self.gamma <= 1:
            raise DomainError("gamma must lie in [0, 1]")

    def level(self, u):
        return (1.0 - self.xi) * np.asarray(u, dtype=float) + self.d

    def v(self, s, u):
        """v_gamma(u): gamma times the expected discounted increase of the maximum."""
        if self.gamma == 0:
            return np.zeros_like(np.asarray(u, dtype=float))[()]
        if self.gamma == 1:
            y = self.level(u)
            _check_level(s, y)
            return s.W(y) / s.W(y, 1)
        return self.gamma * _tail_values(s, np.asarray(u, dtype=float), self)

    def v_one(self, s, u):
        y = self.level(u)
        _check_level(s, y)
        return s.W(y) / s.W(y, 1)

    def H(self, s, b):
        b = _arr(b)
        y = self.level(b)
        _check_level(s, y)
        return s.W(y) ** (-1.0 / (1.0 - self.xi)) * self.v(s, b)

    def dH(self, s, b):
        # same sign as H' (H > 0); its root is the critical point
        y = self.level(b)
        if self.gamma == 1:
            return -self.xi / (1.0 - self.xi) * s.W(y, 1) ** 2 - s.W(y) * s.W(y, 2)
        return self.v(s, b) - self.v_one(s, b)

    def value(self, s, x, b):
        hb = float(self.H(s, b))

        def inside(u):
            return s.W(self.level(u)) ** (1.0 / (1.0 - self.xi)) * hb

        return _above_barrier(x, b, inside, lambda u: self.v(s, u))

    def limit(self, s):
        return math.nan


def _check_level(s, y):
    if np.any(np.asarray(s.W(y)) <= 0):
        raise DomainError("W vanishes at the drawdown level; use d > 0")


def _log_w(s, y):
    with np.errstate(over="ignore", divide="ignore"):
        return np.log(s.W(y))


def _tail_values(s, u, obj):
    """(1/(1-gamma)) int_u^inf [W(xi(u))/W(xi(t))]^p dt for every entry of u.

    Segment integrals are scaled by the integrand at their left end and
    accumulated from the right, which keeps large levels from overflowing.
    """
    if s.phi <= 0:
        raise DivergentIntegral("the tail integral diverges when Phi_delta = 0")
    p = 1.0 / ((1.0 - obj.xi) * (1.0 - obj.gamma))
    flat = np.atleast_1d(u).ravel()
    pts = np.unique(flat)
    rate = p * (1.0 - obj.xi) * s.phi
    seg_len = 0.25 / max(rate, 1e-3)
    nodes, weights = np.polynomial.legendre.leggauss(16)

    def log_i(t):
        return -p * _log_w(s, obj.level(t))

    # tail beyond the last point
    last = pts[-1]
    li_last = float(log_i(last))
    tail, _ = integrate.quad(lambda t: math.exp(float(log_i(t)) - li_last), last, math.inf,
                             epsabs=1e-13, epsrel=1e-11, limit=200)
    r = np.empty(pts.size)
    r[-1] = tail
    for j in range(pts.size - 2, -1, -1):
        a, c = pts[j], pts[j + 1]
        li_a = float(log_i(a))
        m = max(1, int(math.ceil((c - a) / seg_len)))
        edges = np.linspace(a, c, m + 1)
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
        t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        seg = np.sum(np.exp(log_i(t) - li_a).reshape(m, -1) * weights * half[:, None])
        r[j] = seg + math.exp(float(log_i(c)) - li_a) * r[j + 1]
    out = np.interp(flat, pts, r) / (1.0 - obj.gamma)
    out = out.reshape(np.shape(u))
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------- optimizer

def barrier_function(objective, s, b):
    return objective.H(s, b)


def barrier_limit(objective, s):
    """Analytic value of H(b) as b grows (Phi_delta-dominant terms)."""
    return objective.limit(s)


@dataclass
class BarrierResult:
    b_star: float
    h_star: float
    barrier_curve: tuple
    local_optima: list
    multimodal: bool
    objective: object = None
    scale_set: object = field(default=None, repr=False)
    at_scan_edge: bool = False

    def value_at(self, x):
        return value_function(self.objective, self.scale_set, x, self.b_star)


def adjustment_coefficient(model):
    """Positive root R of kappa(-R) = 0 when the mean drift is positive, else None."""
    if model.profit <= 0:
        return None
    if not model.jumps.active:
        return 2.0 * model.drift / model.sigma**2 if model.sigma > 0 else None
    hi = min(abs(p) for p in model.jumps.poles) * (1.0 - 1e-12)
    f = lambda t: float(model.laplace_exponent(-t))
    if f(hi) <= 0:
        return None
    return optimize.brentq(f, hi * 1e-12, hi, xtol=1e-14, rtol=1e-13)


def default_scan(s):
    """b_max = 10 max(1/Phi, 1/R, 1) with 2000 coarse steps."""
    scales = [1.0]
    if s.phi > 0:
        scales.append(1.0 / s.phi)
    r = adjustment_coefficient(s.model)
    if r:
        scales.append(1.0 / r)
    b_max = 10.0 * max(scales)
    return b_max, b_max / 2000


def _refine(objective, s, lo, mid, hi):
    def neg(b):
        return -float(objective.H(s, b))

    # bounded Brent: the scan allows flat plateaus, so (lo, mid, hi) need not be a strict bracket
    res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                   options={"xatol": GOLDEN_XTOL})
    b = float(res.x) if -res.fun >= float(objective.H(s, mid)) else float(mid)
    # polish on the derivative when it changes sign across the bracket
    try:
        g_lo, g_hi = float(objective.dH(s, lo)), float(objective.dH(s, hi))
        if g_lo > 0 > g_hi:
            b = optimize.brentq(lambda t: float(objective.dH(s, t)), lo, hi, xtol=1e-14)
    except (DomainError, ValueError):
        pass
    return b


def optimize_barrier(objective, s, b_max=None, coarse_step=None):
    """Coarse scan of H on [0, b_max] followed by refinement of every local maximum.

    Returns the last global maximizer: among maxima within 1e-9 (relative) of
    the best value the largest b wins.
    """
    if b_max is None:
        b_max = default_scan(s)[0]
    b_max = float(b_max)
    step = b_max / 2000 if coarse_step is None else float(coarse_step)
    if not (b_max > 0 and step > 0):
        raise DomainError("scan range must be positive")
    n = max(int(math.ceil(b_max / step)), 4)
    grid = np.linspace(0.0, b_max, n + 1)
    try:
        h = np.asarray(objective.H(s, grid), dtype=float)
    except (FloatingPointError, OverflowError) as exc:
        raise ScanError(f"barrier function failed on the scan range: {exc}") from exc
    if np.any(np.isnan(h)) or np.any(h == math.inf) or not np.any(np.isfinite(h)):
        raise ScanError("barrier function is not finite on the scan range")
    def eps(v):
        return NOISE_RTOL * max(1.0, abs(float(v)))

    cands = []
    if h[0] > h[1] + eps(h[0]):
        cands.append(0.0)
    peaks, props = signal.find_peaks(np.where(np.isfinite(h), h, -1e300), prominence=0.0)
    inner = [i for i, p in zip(peaks, props["prominences"]) if p > eps(h[i])]
    for i in inner:
        cands.append(_refine(objective, s, grid[i - 1], grid[i], grid[i + 1]))
    edge = bool(h[-1] > h[-2] + eps(h[-1]))
    if edge:
        cands.append(b_max)
    if not cands:
        cands.append(float(grid[int(np.argmax(h))]))
    vals = [float(objective.H(s, b)) for b in cands]
    best = max(vals)
    tol = TIE_RTOL * max(1.0, abs(best))
    b_star = max(b for b, v in zip(cands, vals) if v >= best - tol)
    local = [(b, v) for b, v in zip(cands, vals) if not (edge and b == b_max)]
    return BarrierResult(
        b_star=float(b_star),
        h_star=float(objective.H(s, b_star)),
        barrier_curve=(grid, h),
        local_optima=local,
        multimodal=len(local) >= 2,
        objective=objective,
        scale_set=s,
        at_scan_edge=edge and b_star == b_max,
    )


def value_function(objective, s, x, b):
    if b < 0:
        raise DomainError("barrier must be >= 0")
    return objective.value(s, x, float(b))


# ---------------------------------------------------------------- special cases

class SLGShape(NamedTuple):
    kind: str
    b_star: float


def slg_monotonicity_test(s, k):
    """Classify H_SLG as 'Decreasing' or 'UniqueInteriorMax'.

    The sign of H_SLG' is that of f(b) = k Delta^{ZW}(b)/W'(b) - 1, which
    decreases to -1; H_SLG is decreasing exactly when f(0) <= 0.
    """
    if s.delta <= 0:
        raise DeltaError("SLG needs delta > 0")

    def f(b):
        return k * float(s.delta_zw(b)) / float(s.W(b, 1)) - 1.0

    f0 = k * (1.0 - s.delta * s.w_at_0**2 / s.wp_at_0) - 1.0
    if f0 <= 0:
        return SLGShape("Decreasing", 0.0)
    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e6:
            raise ScanError("no sign change of the SLG optimality function")
    return SLGShape("UniqueInteriorMax", optimize.brentq(f, 0.0, hi, xtol=1e-14))


def lagrange_cost(s, b):
    """K(b) = W''(b)/(delta Delta(b)) with Delta = W'^2 - W W''."""
    if s.delta <= 0:
        raise DeltaError("needs delta > 0")
    wr = s.wronskian(b)
    if np.any(wr <= 1e-14):
        raise DegenerateError("Wronskian too small")
    return s.W(b, 2) / (s.delta * wr)


def lagrange_cost_profile(s, b0, width=2.0, n=50):
    """Samples of K on [b0, b0 + width] and whether they strictly increase."""
    b = np.linspace(b0, b0 + width, n)
    k = lagrange_cost(s, b)
    return b, k, bool(np.all(np.diff(k) > 0))


def bm_optimal_barrier(mu, sigma, delta):
    """Closed-form de Finetti barrier for Brownian motion with drift."""
    if mu <= 0:
        return 0.0
    disc = math.sqrt(mu * mu + 2 * delta * sigma * sigma)
    return sigma**2 / disc * math.log((disc + mu) / (disc - mu))


def bm_slg_equation(x, mu, sigma, delta, k):
    """Residual of cosh(x D/s^2) - (mu/D) sinh(x D/s^2) - k exp(-x mu/s^2)."""
    disc = math.sqrt(mu * mu + 2 * delta * sigma * sigma)
    a = x * disc / sigma**2
    return math.cosh(a) - mu / disc * math.sinh(a) - k * math.exp(-x * mu / sigma**2)


def exponential_claims_optimal_barrier(model, delta, reading="premium"):
    """Last minimum of W' for Cramer-Lundberg with exponential claims.

    Interior iff (delta + lam)^2 - p lam mu < 0.  ``reading`` selects p as
    the premium rate c or the mean drift kappa'(0); only the premium reading
    matches the sign of W''(0).
    """
    jumps = model.jumps
    if model.sigma != 0 or jumps.kind != "exp":
        raise DomainError("needs sigma = 0 and exponential claims")
    lam, mu, c = jumps.intensity, jumps.components[0][2], model.drift
    p = {"premium": c, "profit": model.profit}.get(reading)
    if p is None:
        raise DomainError(f"unknown reading {reading!r}")
    if (delta + lam) ** 2 - p * lam * mu >= 0:
        return 0.0
    root = math.sqrt((mu * c - lam - delta) ** 2 + 4 * mu * delta * c)
    z1 = (-(mu * c - lam - delta) + root) / (2 * c)
    z2 = (-(mu * c - lam - delta) - root) / (2 * c)
    return math.log(z2**2 * (mu + z2) / (z1**2 * (mu + z1))) / (z1 - z2)


# ---------------------------------------------------------------- taxed drawdown

def _taxed_checks(s, u, a, xi, d, gamma):
    if not 0 <= gamma < 1:
        raise DomainError("gamma must lie in [0, 1)")
    if xi > 1:
        raise DomainError("xi must be <= 1")
    if d < 0 or (xi == 1 and d <= 0):
        raise DomainError("d must be positive")
    u = np.asarray(u, dtype=float)
    if np.any(u < 0) or np.any(u > a):
        raise DomainError("need 0 <= u <= a")
    if xi < 1:
        _check_level(s, (1.0 - xi) * u + d)
    return u


def taxed_drawdown_exit(s, u, a, xi, d, gamma):
    """Transform of reaching a before the affine drawdown time, taxed process."""
    u = _taxed_checks(s, u, a, xi, d, gamma)
    if xi == 1:
        return np.exp(-(a - u) * float(s.nu(d)) / (1.0 - gamma))
    p = 1.0 / ((1.0 - xi) * (1.0 - gamma))
    if math.isinf(a):
        return np.zeros_like(u)[()] if s.phi > 0 else _survival(s, u, xi, d, p)
    return (s.W((1 - xi) * u + d) / s.W((1 - xi) * a + d)) ** p


def _survival(s, u, xi, d, p):
    if s.delta != 0 or s.profit <= 0:
        raise DomainError("survival needs delta = 0 and a positive mean drift")
    return (s.profit * s.W((1 - xi) * u + d)) ** p


def taxed_drawdown_survival(s0, u, xi, d, gamma):
    """P_u(the affine drawdown never happens) for the taxed process, delta = 0."""
    return taxed_drawdown_exit(s0, u, math.inf, xi, d, gamma)


def taxed_drawdown_dividends(s, u, a, xi, d, gamma):
    """Expected discounted increase of the running maximum before exit or drawdown.

    (1/(1-gamma)) int_u^a [W(xi(u))/W(xi(t))]^p dt with p = 1/((1-xi)(1-gamma));
    gamma = 1 gives W/W' at xi(u).
    """
    if gamma == 1:
        if xi > 1 or d < 0:
            raise DomainError("bad drawdown parameters")
        y = (1.0 - xi) * np.asarray(u, dtype=float) + d
        _check_level(s, y)
        return s.W(y) / s.W(y, 1)
    u = _taxed_checks(s, u, a, xi, d, gamma)
    if xi == 1:
        rate = float(s.nu(d))
        if math.isinf(a):
            return np.full_like(u, 1.0 / rate)[()]
        return (1.0 - np.exp(-(a - u) * rate / (1.0 - gamma))) / rate
    if math.isinf(a):
        return _tail_values(s, u, TaxedDrawdown(xi, d, gamma))
    p = 1.0 / ((1.0 - xi) * (1.0 - gamma))

    def one(u0):
        if u0 == a:
            return 0.0
        lw = float(_log_w(s, (1 - xi) * u0 + d))
        val, err = integrate.quad(lambda t: math.exp(p * (lw - float(_log_w(s, (1 - xi) * t + d)))),
                                  u0, a, epsabs=1e-12, epsrel=1e-10, limit=200)
        return val / (1.0 - gamma)

    out = np.vectorize(one, otypes=[float])(u)
    return out[()] if out.ndim == 0 else out


class TaxedDelayResult(NamedTuple):
    b_star: float
    value_curve: tuple
    residual: float
    result: BarrierResult


def taxed_delay_optimize(s, xi, d, gamma, b_max=None, coarse_step=None):
    """Optimal level from which taxation starts.

    Maximizes W(xi(b))^{-1/(1-xi)} v_gamma(b).  At an interior optimum
    v_gamma(b*) = v_1(b*); the residual of that identity is reported.
    """
    if s.delta <= 0:
        raise DeltaError("needs delta > 0")
    obj = TaxedDrawdown(xi, d, gamma)
    res = optimize_barrier(obj, s, b_max, coarse_step)
    resid = 0.0
    if res.b_star > 0 and 0 < gamma < 1:
        resid = abs(float(obj.v(s, res.b_star) - obj.v_one(s, res.b_star)))
    return TaxedDelayResult(res.b_star, res.barrier_curve, resid, res)


def bm_drawdown_barrier_ratio(mu, sigma, delta, xi, halved=True):
    """W/W' at xi(b*) for Brownian motion with gamma = 1.

    The critical point solves delta v^2 - mu v + sigma^2 xi/(2(1-xi)) = 0.
    With ``halved=False`` the constant sigma^2 xi/(delta (1-xi)) is used under
    the root instead; the two agree only at xi = 0.
    """
    c = 0.5 if halved else 1.0
    m = mu / (2 * delta)
    disc = m * m - c * sigma**2 * xi / (delta * (1 - xi))
    if disc < 0:
        raise DomainError("no real critical point")
    return m + math.sqrt(disc)
