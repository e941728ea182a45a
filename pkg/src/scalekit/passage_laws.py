"""First-passage laws expressed through W, Z and their relatives.

Every function takes a ``ScaleSet`` as first argument and is pure.  Level
arguments accept scalars or numpy arrays where that makes sense.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .errors import DeltaError, DomainError, DriftSignError

ABSORB, REFLECT = "absorb", "reflect"
PHI_GUARD = 1e-7


def _check_interval(x, b, lo=0.0):
    x = np.asarray(x, dtype=float)
    if np.any(x < lo - 1e-12) or (np.isfinite(b) and np.any(x > b + 1e-12)):
        raise DomainError(f"level outside [{lo:g}, {b:g}]")
    if b <= lo:
        raise DomainError("upper level must exceed the lower one")
    return x


def _need_delta(s):
    if s.delta <= 0:
        raise DeltaError("this law needs a positive killing rate")


def _need_zero_delta(s):
    if s.delta != 0:
        raise DeltaError("this law is stated for the undiscounted scale functions")


def _mode(mode):
    m = str(mode).lower()
    if m not in (ABSORB, REFLECT):
        raise DomainError(f"unknown upper mode {mode!r}")
    return m


def w_ratio(s, x, b, order=0, vartheta=0.0):
    """W(x)/(W^{(order)}(b) + vartheta W(b)) without forming exp(Phi b)."""
    den = s.w_scaled(b, order) + (vartheta * s.w_scaled(b) if vartheta else 0.0)
    return np.exp(s.phi * (np.asarray(x, dtype=float) - b)) * s.w_scaled(x) / den


def two_sided_exit_up(s, x, b):
    """E_x[e^{-delta T_b^+}; T_b^+ < T_0^-]."""
    x = _check_interval(x, b)
    return w_ratio(s, x, b)


def gerber_shiu_exit(s, x, b=math.inf, mode=ABSORB, theta=0.0):
    """Transform of ruin time and deficit, E_x[e^{-delta T + theta X(T)}; ...].

    Absorbing, reflecting or no upper barrier (b = inf).
    """
    mode = _mode(mode)
    theta = float(theta)
    if math.isinf(b):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("initial level must be >= 0")
        if abs(theta - s.phi) < PHI_GUARD:
            return hitting_time_transform(s, x)
        return s.z_tail(x, theta)
    x = _check_interval(x, b)
    # Z(., theta) - A W has no exp(Phi x) mode; the A W parts cancel exactly
    if mode == ABSORB:
        return s.z_tail(x, theta) - w_ratio(s, x, b) * s.z_tail(b, theta)
    return s.z_tail(x, theta) - w_ratio(s, x, b, 1) * s.z_tail(b, theta, 1)


def ruin_transform(s, x, b=math.inf, mode=ABSORB):
    return gerber_shiu_exit(s, x, b, mode, 0.0)


def hitting_time_transform(s, x):
    """E_x[e^{-delta T_{0}}] for the first hitting of the level 0; any real x."""
    x = np.asarray(x, dtype=float)
    return np.exp(s.phi * x) - s.W(x) * s.kappa_prime_phi


def three_level_hitting(s, x, i, a, b):
    """Transform of hitting i before leaving (a, b), started from x."""
    if not a < i < b:
        raise DomainError("need a < i < b")
    x = np.asarray(x, dtype=float)
    if np.any((x < a) | (x > b)):
        raise DomainError("x must lie in [a, b]")
    w_ia = s.W(i - a)
    return s.W(x - a) / w_ia - s.W(x - i) / s.W(b - i) * s.W(b - a) / w_ia


def creeping_probability(s, x):
    """Transform of ruin by creeping."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be >= 0")
    if s.model.sigma == 0:
        return np.zeros_like(x)[()]
    return 0.5 * s.model.sigma**2 * (s.W(x, 1) - s.phi * s.W(x))


def maximal_severity(s, x, u):
    """P_x(ruin occurs and the deficit never passes -u before recovery)."""
    _need_zero_delta(s)
    x, u = np.asarray(x, dtype=float), np.asarray(u, dtype=float)
    if np.any(x <= 0) or np.any(u <= 0):
        raise DomainError("x and u must be positive")
    return (s.W(x + u) - s.W(x)) / s.W(u)


def resolvent_density(s, x, y, a=0.0, b=math.inf, mode=ABSORB):
    """Killed resolvent density in y for the process started at x.

    With ``mode="reflect"`` a pair (density, atom at b) is returned.
    """
    mode = _mode(mode)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any(x < a) or np.any(y < a) or np.any(x > b) or np.any(y > b):
        raise DomainError("x and y must lie in [a, b]")
    if math.isinf(b):
        return s.W(x - a) * np.exp(-s.phi * (y - a)) - s.W(x - y)
    if mode == ABSORB:
        return s.W(x - a) / s.W(b - a) * s.W(b - y) - s.W(x - y)
    scale = s.W(x - a) / s.W(b - a, 1)
    return scale * s.W(b - y, 1) - s.W(x - y), scale * s.w_at_0


def resolvent_atom(s, x, a, b):
    """Mass at the reflecting barrier b."""
    return s.W(np.asarray(x, dtype=float) - a) / s.W(b - a, 1) * s.w_at_0


def exit_time_transform(s, x, b):
    """E_x[e^{-delta T}] with T the exit time of [0, b]."""
    x = _check_interval(x, b)
    # 1 - delta (W(x)/W(b) Wbar(b) - Wbar(x)) regrouped as ruin part + exit part
    return gerber_shiu_exit(s, x, b, ABSORB, 0.0) + w_ratio(s, x, b)


def expected_exit_time(s0, x, b):
    _need_zero_delta(s0)
    x = _check_interval(x, b)
    return s0.W(x) / s0.W(b) * s0.Wbar(b) - s0.Wbar(x)


def capital_injection_transform(s, x, b, theta):
    """E_x[e^{-delta T_b^+ - theta R_*(T_b^+)}] for the process reflected at 0."""
    x = _check_interval(x, b)
    if theta <= 0:
        raise DomainError("theta must be positive (inf allowed)")
    if math.isinf(theta):
        return s.W(x) / s.W(b)
    return s.Z(x, theta) / s.Z(b, theta)


def drawdown_time_transform(s, d):
    """E[e^{-delta S_d}] for the first drawdown of size d."""
    if d <= 0:
        raise DomainError("drawdown size must be positive")
    return 1.0 - s.delta * (s.W(d) ** 2 / s.W(d, 1) - s.Wbar(d))


def drawdown_deficit(s, d, theta=0.0, m=None, x=None, variant="joint"):
    """Joint law of the running maximum and the overshoot at a drawdown.

    ``variant="joint"``: density in the maximum m for a drawdown of size d
    started at x.  ``variant="no_recovery"``: transform of ruin from x given
    that x is not regained first (d plays the role of x).
    """
    if d <= 0:
        raise DomainError("drawdown size must be positive")
    zw = s.delta_zw(d, theta)
    if variant == "no_recovery":
        return s.W(d) / s.W(d, 1) * zw / s.W(d)
    if variant != "joint":
        raise DomainError(f"unknown variant {variant!r}")
    x = 0.0 if x is None else x
    m = np.asarray(x if m is None else m, dtype=float)
    if np.any(m < x):
        raise DomainError("maximum cannot be below the start")
    rate = s.nu(d)
    return np.exp(-(m - x) * rate) * rate * zw / s.W(d, 1)


def bailout_exponential_time(s, x, b, theta, variant="before_tau_b"):
    """Transform of capital injections up to an independent exponential time."""
    _need_delta(s)
    x = _check_interval(x, b)
    zx, zxt = s.Z(x), s.Z(x, theta)
    if variant == "before_tau_b":
        return 1.0 - zx - zxt * (1.0 - s.Z(b)) / s.Z(b, theta)
    if variant == "up_to_min":
        return 1.0 - zx + zxt * s.Z(b) / s.Z(b, theta)
    if variant == "doubly_reflected":
        return 1.0 - zx + zxt * s.Zp(b) / s.Zp(b, theta)
    raise DomainError(f"unknown variant {variant!r}")


def h_dividends_penalty(s, b, theta=0.0, vartheta=0.0):
    b = np.asarray(b, dtype=float)
    num = s.z_tail(b, theta, 1) + vartheta * s.z_tail(b, theta)
    den = s.w_scaled(b, 1) + vartheta * s.w_scaled(b)
    return s.zw_limit(theta) + np.exp(-s.phi * b) * num / den


def dividends_penalty_transform(s, x, b, theta=0.0, vartheta=0.0):
    """E_x[e^{-delta T + theta X(T) - vartheta R(T)}] for the process reflected at b."""
    if vartheta < 0:
        raise DomainError("vartheta must be >= 0")
    x = _check_interval(x, b)
    num = s.z_tail(b, theta, 1) + vartheta * s.z_tail(b, theta)
    return s.z_tail(x, theta) - w_ratio(s, x, b, 1, vartheta) * num


def dividends_penalty_at_barrier(s, b, theta=0.0, vartheta=0.0):
    """Product form at x = b: exponential dividends times overshoot transform."""
    rate = s.nu(b)
    return rate / (rate + vartheta) * s.delta_zw(b, theta) / s.W(b, 1)


def joint_dividends_bailouts(s, x, b, theta=0.0, vartheta=0.0):
    """E_x[e^{-vartheta R(E) - theta R_*(E)}] for the doubly reflected process."""
    _need_delta(s)
    x = _check_interval(x, b)
    at0 = s.delta * (s.W(b) + vartheta * s.Wbar(b)) / (s.Zp(b, theta) + vartheta * s.Z(b, theta))
    return 1.0 - s.Z(x) + s.Z(x, theta) * at0


def joint_dividends_bailouts_at_barrier(s, b, theta=0.0, vartheta=0.0):
    zbt, zpbt = s.Z(b, theta), s.Zp(b, theta)
    return (zbt * s.Zp(b) + zpbt * (1.0 - s.Z(b))) / (zpbt + vartheta * zbt)


def expected_ruin_time(s0, x, variant="negative_drift", b=None):
    """Expected ruin time for the undiscounted process.

    ``negative_drift``: E_x[T]; ``positive_drift``: E_x[T; T < inf];
    ``reflected``: E_x[T] with reflection at b.
    """
    _need_zero_delta(s0)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be >= 0")
    p = s0.profit
    if variant == "negative_drift":
        if p >= 0:
            raise DriftSignError("needs a negative mean drift")
        return s0.W(x) / s0.phi - s0.Wbar(x)
    if variant == "positive_drift":
        if p <= 0:
            raise DriftSignError("needs a positive mean drift")
        k2 = float(s0.model.derivative(0.0, 2))
        return k2 / (2 * p) * s0.W(x) + p * s0.W2(x) - s0.Wbar(x)
    if variant == "reflected":
        if b is None:
            raise DomainError("reflected variant needs b")
        x = _check_interval(x, b)
        return s0.W(x) * s0.W(b) / s0.W(b, 1) - s0.Wbar(x)
    raise DomainError(f"unknown variant {variant!r}")


def expected_hitting_time(s0, x):
    """E_x[T_{0}; T_{0} < inf] for the undiscounted process."""
    _need_zero_delta(s0)
    if s0.profit == 0:
        raise DriftSignError("zero mean drift: the hitting time has infinite mean")
    x = np.asarray(x, dtype=float)
    k1 = s0.kappa_prime_phi
    k2 = float(s0.model.derivative(s0.phi, 2))
    return k1 * s0.W2(x) + k2 / k1 * s0.W(x) - x * np.exp(x * s0.phi) / k1


def expected_dividends(s, x, b, horizon="until_ruin"):
    x = _check_interval(x, b)
    if horizon == "until_ruin":
        return s.W(x) / s.W(b, 1)
    if horizon == "infinite":
        _need_delta(s)
        return s.Z(x) / s.Zp(b)
    raise DomainError(f"unknown horizon {horizon!r}")


def bailout_potential(s, x):
    """Smooth potential Zbar(x) + kappa'(0+)/delta used for bailout expectations."""
    return s.Zbar(x) + s.profit / s.delta


def expected_bailouts(s, x, b, horizon="until_tau_b"):
    _need_delta(s)
    x = _check_interval(x, b)
    if horizon == "until_tau_b":
        return s.Z(x) / s.Z(b) * bailout_potential(s, b) - bailout_potential(s, x)
    if horizon == "infinite":
        return s.Z(x) / s.Zp(b) * s.Z(b) - bailout_potential(s, x)
    raise DomainError(f"unknown horizon {horizon!r}")


@dataclass(frozen=True)
class ExponentialPenalty:
    theta: float


@dataclass(frozen=True)
class LinearPenalty:
    """w(y) = k y - K for y <= 0."""
    k: float
    K: float


def smooth_gerber_shiu(s, penalty, x):
    """Smooth Gerber-Shiu function for exponential or linear penalties."""
    if isinstance(penalty, ExponentialPenalty):
        return s.Z(x, penalty.theta)
    if isinstance(penalty, LinearPenalty):
        return penalty.k * s.Z1(x) - penalty.K * s.Z(x)
    raise DomainError("penalty must be ExponentialPenalty or LinearPenalty")


def _tilted_tail(jumps, u, theta):
    """int_u^inf e^{-theta z} f(z) dz for an Erlang mixture."""
    out = 0.0
    for w, n, mu in jumps.components:
        rate = mu + theta
        if rate <= 0:
            raise DomainError("tilt makes the claim tail diverge")
        out += w * (mu / rate) ** n * stats.gamma.sf(u, n, scale=1.0 / rate)
    return out


def gs_exponential_decomposition(s, x, theta):
    """Right side of the boundary-fit decomposition of Z(x, theta).

    Z(x) + theta sigma^2 W(x)/2 + a jump integral; computed by quadrature as
    an independent route to Z(x, theta).
    """
    x = float(x)
    base = s.Z(x) + 0.5 * theta * s.model.sigma**2 * s.W(x)
    jumps = s.model.jumps
    if not jumps.active or x == 0:
        return float(base)
    lam = jumps.intensity

    def inner(u):
        return lam * (_tilted_tail(jumps, u, 0.0) - math.exp(theta * u) * _tilted_tail(jumps, u, theta))

    val, _ = integrate.quad(lambda y: float(s.W(y)) * inner(x - y), 0.0, x, epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(base) + val
