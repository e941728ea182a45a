"""Parisian scale functions, occupation-time laws and omega-scale functions.

The omega-scale functions solve the renewal equations

    Wω(x) = W(x) + int_0^x W(x - y) ω(y) Wω(y) dy
    Zω(x) = 1    + int_0^x W(x - y) ω(y) Zω(y) dy

with W the undiscounted scale function.  They are solved by forward marching
trapezoid quadrature, implicit in the diagonal term.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import DeltaError, DomainError, DriftSignError, GridError, SingularLimit
from .scale_core import build_rational, divided_exp


@dataclass(frozen=True)
class ParisianParams:
    r: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("observation rate must be positive")
        if self.delta < 0:
            raise DomainError("delta must be >= 0")


def _limit_step(phi):
    return 1e-5 * (1.0 + abs(phi))


def parisian_scales(s, r, x, theta=0.0, normalized=False):
    """(W_{delta,r}(x), Z_{delta,r}(x, theta)) built from the delta scale set ``s``.

    W_{delta,r}(x) = Z_delta(x, Phi_{delta+r}).  With ``normalized=True`` it is
    multiplied by Phi_{delta+r}/r, which leaves every ratio law unchanged and
    makes it converge to W_delta as r grows.
    """
    if not r > 0:
        raise DomainError("observation rate must be positive")
    phi_r = s.model.phi(s.delta + r)
    w = s.Z(x, phi_r)
    if normalized:
        w = w * phi_r / r
    return w, parisian_z(s, r, x, theta, phi_r)


def parisian_z(s, r, x, theta, phi_r=None):
    if phi_r is None:
        phi_r = s.model.phi(s.delta + r)
    theta = float(theta)
    eps = _limit_step(phi_r)
    if abs(theta - phi_r) < eps:
        # removable point: symmetric difference across it
        return 0.5 * (_parisian_z_raw(s, r, x, phi_r - eps, phi_r) + _parisian_z_raw(s, r, x, phi_r + eps, phi_r))
    return _parisian_z_raw(s, r, x, theta, phi_r)


def _parisian_z_raw(s, r, x, theta, phi_r):
    d = s.delta
    kt = float(s.kappa(theta))
    den = d + r - kt
    if abs(den) < 1e-12 * max(1.0, abs(kt)):
        raise SingularLimit("kappa(theta) = delta + r at a non-removable point")
    return r / den * s.Z(x, theta) + (d - kt) / den * s.Z(x, phi_r)


def parisian_survival(s0, x, r):
    """P_x(Parisian ruin is never observed) = E_x[e^{-r T_red}]; undiscounted, positive drift."""
    if s0.delta != 0:
        raise DeltaError("Parisian survival is stated for delta = 0")
    p = s0.profit
    if p <= 0:
        raise DriftSignError("needs a positive mean drift")
    if not r > 0:
        raise DomainError("observation rate must be positive")
    phi_r = s0.model.phi(r)
    return p * phi_r / r * s0.Z(x, phi_r)


@dataclass(frozen=True)
class OmegaSpec:
    """Nonnegative killing-rate function on a uniform grid.

    ``rate`` is a callable, or build one from pieces with ``OmegaSpec.steps``.
    Step functions are averaged at breakpoints lying on grid nodes, which keeps
    the trapezoid rule second order.
    """
    rate: object
    h: float = 1 / 512
    x_max: float = 4.0
    breakpoints: tuple = ()

    @classmethod
    def steps(cls, pieces, h=1 / 512, x_max=None, default=0.0):
        """``pieces`` is a list of dicts with keys from, to, rate."""
        pieces = [(float(p["from"]), float(p["to"]), float(p["rate"])) for p in pieces]
        for lo, hi, w in pieces:
            if hi <= lo:
                raise DomainError("each step needs from < to")
            if w < 0 or not np.isfinite(w):
                raise DomainError("rates must be finite and >= 0")
        if x_max is None:
            finite = [hi for _, hi, _ in pieces if np.isfinite(hi)]
            x_max = max(finite) if finite else 4.0

        def rate(x):
            x = np.asarray(x, dtype=float)
            out = np.full(x.shape, float(default))
            for lo, hi, w in pieces:
                out = np.where((x >= lo) & (x < hi), w, out)
            return out

        bps = sorted({v for lo, hi, _ in pieces for v in (lo, hi) if np.isfinite(v)})
        return cls(rate, h, x_max, tuple(bps))

    @classmethod
    def from_json(cls, text, h=1 / 512, x_max=None):
        return cls.steps(json.loads(text), h=h, x_max=x_max)

    def on_grid(self, grid):
        """Node values (averaged at jumps) and left limits.

        The left limit is what the integral up to that node sees; later
        integrals straddle the node and see the average.
        """
        vals = np.asarray(self.rate(grid), dtype=float) * np.ones_like(grid)
        left = vals.copy()
        tol = 1e-9 * self.h
        for bp in self.breakpoints:
            k = int(round(bp / self.h))
            if 0 < k < len(grid) and abs(grid[k] - bp) < tol:
                lo = float(np.asarray(self.rate(bp - 0.5 * self.h)))
                hi = float(np.asarray(self.rate(bp + 0.5 * self.h)))
                vals[k] = 0.5 * (lo + hi)
                left[k] = lo
        if np.any(vals < 0) or np.any(left < 0) or not np.all(np.isfinite(vals)):
            raise DomainError("omega must be finite and nonnegative")
        return vals, left


@dataclass
class OmegaScales:
    grid: np.ndarray
    W: np.ndarray
    Z: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self._w = CubicSpline(self.grid, self.W)
        self._z = CubicSpline(self.grid, self.Z)

    def w(self, x):
        return self._eval(self._w, x, 0.0)

    def z(self, x):
        return self._eval(self._z, x, 1.0)

    def _eval(self, spl, x, below):
        x = np.asarray(x, dtype=float)
        if np.any(x > self.grid[-1] + 1e-12):
            raise GridError("x beyond the omega grid")
        return np.where(x < 0, below, spl(np.clip(x, 0, None)))[()]


def omega_scales(base0, spec):
    """Solve the omega renewal equations on the grid of ``spec``.

    ``base0`` is a scale set at delta = 0 (only W is used).
    """
    if base0.delta != 0:
        raise DeltaError("omega scales are built on the undiscounted W")
    h = spec.h
    if not (h > 0 and spec.x_max > 0):
        raise GridError("grid step and x_max must be positive")
    n = int(math.ceil(spec.x_max / h - 1e-9))
    grid = np.arange(n + 1) * h
    kern = np.asarray(base0.W(grid), dtype=float)
    om, om_left = spec.on_grid(grid)
    w = np.empty(n + 1)
    z = np.empty(n + 1)
    w[0], z[0] = kern[0], 1.0
    fw, fz = om * w, om * z  # only entries < current node are read
    for i in range(1, n + 1):
        k = kern[i::-1]  # W(x_i - x_j), j = 0..i
        diag = 1.0 - 0.5 * h * kern[0] * om_left[i]
        if diag <= 0:
            raise GridError("grid too coarse for this killing rate")
        sw = 0.5 * k[0] * fw[0] + k[1:i] @ fw[1:i]
        sz = 0.5 * k[0] * fz[0] + k[1:i] @ fz[1:i]
        w[i] = (kern[i] + h * sw) / diag
        z[i] = (1.0 + h * sz) / diag
        fw[i] = om[i] * w[i]
        fz[i] = om[i] * z[i]
    return OmegaScales(grid, w, z, om)


def two_level_omega(delta, r, level, h=1 / 512, x_max=None):
    """Killing delta + r below ``level`` and delta above: the shifted Parisian setting."""
    x_max = level + 4.0 if x_max is None else x_max
    return OmegaSpec.steps([{"from": 0.0, "to": level, "rate": delta + r},
                            {"from": level, "to": math.inf, "rate": delta}], h=h, x_max=x_max)


def occupation_auxiliary(s_r, s_d, x, a, form="upper"):
    """Two-rate auxiliary function: rate r on [0, a], delta above.

    ``form`` picks which of the two equal middle-branch expressions is used:
    "upper" integrates over [a, x], "lower" over [0, a].
    """
    r, d = s_r.delta, s_d.delta
    x = np.asarray(x, dtype=float)
    if a <= 0:
        return s_d.W(x)
    out = np.asarray(s_r.W(x), dtype=float).copy()
    mid = x >= a
    if r == d or not mid.any():
        return out[()]
    xm = x[mid]
    if form == "upper":
        out[mid] = s_r.W(xm) + (d - r) * _conv_tail(s_d, s_r, xm, a)
    elif form == "lower":
        out[mid] = s_d.W(xm) + (r - d) * _conv_head(s_d, s_r, xm, a)
    else:
        raise DomainError("form must be 'upper' or 'lower'")
    return out[()]


def _roots(s):
    return getattr(s, "roots", None), getattr(s, "coeffs", None)


def _conv_tail(s_d, s_r, x, a):
    """int_a^x W_d(x - y) W_r(y) dy."""
    zd, ad = _roots(s_d)
    zr, ar = _roots(s_r)
    if zd is not None and zr is not None:
        L = x - a
        out = np.zeros_like(x)
        for zi, ai in zip(zd, ad):
            for zj, aj in zip(zr, ar):
                out += ai * aj * np.exp(zj * a) * divided_exp(zi, zj, L)
        return out
    return np.array([integrate.quad(lambda y: float(s_d.W(xi - y) * s_r.W(y)), a, xi,
                                    epsabs=1e-13, epsrel=1e-11, limit=200)[0] for xi in x])


def _conv_head(s_d, s_r, x, a):
    """int_0^a W_d(x - y) W_r(y) dy."""
    zd, ad = _roots(s_d)
    zr, ar = _roots(s_r)
    if zd is not None and zr is not None:
        out = np.zeros_like(x)
        for zi, ai in zip(zd, ad):
            for zj, aj in zip(zr, ar):
                out += ai * aj * np.exp(zi * (x - a)) * divided_exp(zj, zi, a)
        return out
    return np.array([integrate.quad(lambda y: float(s_d.W(xi - y) * s_r.W(y)), 0.0, a,
                                    epsabs=1e-13, epsrel=1e-11, limit=200)[0] for xi in x])


def occupation_joint_density(model, delta, x, y, r_minus, r_plus, builder=build_rational):
    """Discounted joint transform of occupation below/above 0, density in the final position y.

    For y far below min(x, 0) the two terms grow like exp(-Phi y) and cancel;
    expect absolute error near 1e-16 * exp(|y| Phi_{delta+r_plus}).
    """
    if not (r_minus > 0 and r_plus > 0):
        raise DomainError("occupation rates must be positive")
    if r_minus == r_plus:
        raise DomainError("rates must differ; equal rates reduce to the resolvent")
    lo, hi = delta + r_minus, delta + r_plus
    s_lo, s_hi = builder(model, lo), builder(model, hi)
    phi_lo, phi_hi = s_lo.phi, s_hi.phi
    x, y = float(x), float(y)
    pref = (phi_hi - phi_lo) / (r_plus - r_minus)
    main = pref * s_hi.Z(x, phi_lo) * s_lo.Z(-y, phi_hi)
    return float(main - occupation_auxiliary(s_lo, s_hi, x - y, -y))


def occupation_joint_total(model, delta, r_minus, r_plus):
    """Integral of the joint density over y, started from 0."""
    phi_lo = model.phi(delta + r_minus)
    return phi_lo / ((delta + r_minus) * model.phi(delta + r_plus))


def occupation_positive_half(model, delta, r):
    """int e^{-delta t} E_0[e^{-r L_+(t)}] dt."""
    if not delta > 0:
        raise DeltaError("needs delta > 0")
    if r < 0:
        raise DomainError("r must be >= 0")
    return model.phi(delta) / (delta * model.phi(delta + r))


def occupation_reflected_band(model, delta, b, r, builder=build_rational):
    """int e^{-delta t} E_0[e^{-r L_[0,b](t)}] dt for the process reflected at b."""
    if model.profit <= 0:
        raise DriftSignError("needs a positive mean drift")
    if not delta > 0:
        raise DeltaError("needs delta > 0")
    if not (r > 0 and b > 0):
        raise DomainError("r and b must be positive")
    # time in the band is killed by both the discount and the occupation rate
    s_r = builder(model, delta + r)
    phi = model.phi(delta)
    zb = s_r.Z(b, phi)
    return phi / delta * zb / (r * s_r.W(b) + phi * zb)


def occupation_ld_rate(model, b, r, builder=build_rational):
    """delta -> 0 limit of the reflected-band transform times delta-free scaling."""
    p = model.profit
    if p <= 0:
        raise DriftSignError("needs a positive mean drift")
    if not (r > 0 and b > 0):
        raise DomainError("r and b must be positive")
    s_r = builder(model, r)
    return s_r.Z(b) / (p * r * s_r.W(b))


def occupation_time_laws(model, request, **kw):
    """Dispatch on ``request["kind"]`` in joint, positive_half, reflected_band, ld_rate."""
    kind = request.get("kind")
    args = {k: v for k, v in request.items() if k != "kind"}
    if kind == "joint":
        return occupation_joint_density(model, **args, **kw)
    if kind == "positive_half":
        return occupation_positive_half(model, **args)
    if kind == "reflected_band":
        return occupation_reflected_band(model, **args, **kw)
    if kind == "ld_rate":
        return occupation_ld_rate(model, **args, **kw)
    raise DomainError(f"unknown occupation law {kind!r}")
