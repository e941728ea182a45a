"""Scale functions W, Z and their relatives, with three interchangeable backends.

* ``RationalScaleSet``: exact exponential sums over the real roots of
  kappa(s) = delta.
* ``SeriesScaleSet``: the killing-rate expansion W_delta = sum delta^k W^{*(k+1)}
  on a uniform grid, starting from a closed-form zero scale function.
* ``InversionScaleSet``: numerical Laplace inversion of the Esscher-shifted
  transform 1/(kappa(s + Phi) - delta), times exp(Phi x).

All three expose the same evaluators through the ``ScaleSet`` base class.
"""

import math

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.optimize import brentq
from scipy.signal import fftconvolve

from .errors import (
    DerivativeUnavailable,
    DomainError,
    GridError,
    InversionError,
    PoleError,
    warn_divergence,
)
from .levy_model import rational_factorization

BACKENDS = ("rational", "series", "inversion")


def phi1(z):
    """(e^z - 1)/z with the removable point filled in."""
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def phi2(z):
    """(e^z - 1 - z)/z^2, accurate near 0."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-2
    zs = z[small]
    out[small] = 0.5 + zs / 6 + zs**2 / 24 + zs**3 / 120 + zs**4 / 720
    zb = z[~small]
    out[~small] = (np.expm1(zb) - zb) / zb**2
    return out


def divided_exp(a, b, x):
    """(e^{a x} - e^{b x})/(a - b), continuous across a = b."""
    m = np.maximum(a, b)
    return np.exp(m * x) * x * phi1(-np.abs(a - b) * x)


class ScaleSet:
    """Evaluator bundle for W_delta and Z_delta at a fixed killing rate.

    Subclasses provide the primitives ``_w``, ``_wbar``, ``_zbar``,
    ``_ztheta`` and ``_w2`` on x >= 0; this class handles negative arguments,
    vectorisation and the identities shared by all backends.
    """

    backend = None

    def __init__(self, model, delta):
        if delta < 0 or not np.isfinite(delta):
            raise DomainError("delta must be finite and >= 0")
        self.model = model
        self.delta = float(delta)
        self.phi = model.phi(self.delta)
        self.kappa_prime_phi = float(model.derivative(self.phi))
        self.profit = model.profit
        c, s2 = model.drift, model.sigma**2
        lam = model.lam
        if model.sigma > 0:
            self.w_at_0 = 0.0
            self.wp_at_0 = 2.0 / s2
            self.wpp_at_0 = -c * (2.0 / s2) ** 2
        else:
            f0 = model.jumps.density_at_zero() if model.jumps.active else 0.0
            self.w_at_0 = 1.0 / c
            self.wp_at_0 = (self.delta + lam) / c**2
            self.wpp_at_0 = (((lam + self.delta) / c) ** 2 - (lam / c) * f0) / c

    def __repr__(self):
        return (f"{type(self).__name__}(delta={self.delta:g}, phi={self.phi:.6g}, "
                f"model={self.model.description or self.model!r})")

    # primitives (x >= 0, 1-d arrays)
    def _w(self, x, order):
        raise NotImplementedError

    def _wbar(self, x):
        raise NotImplementedError

    def _zbar(self, x):
        raise NotImplementedError

    def _ztheta(self, x, theta):
        raise NotImplementedError

    def _w2(self, x):
        raise NotImplementedError

    @staticmethod
    def _eval(x, fn, below):
        xa = np.asarray(x, dtype=float)
        if np.any(~np.isfinite(xa)):
            raise DomainError("x must be finite")
        flat = np.atleast_1d(xa).ravel()
        out = np.empty(flat.shape)
        pos = flat >= 0
        if pos.any():
            out[pos] = fn(flat[pos])
        if (~pos).any():
            out[~pos] = below(flat[~pos])
        out = out.reshape(xa.shape)
        return out[()] if xa.ndim == 0 else out

    def kappa(self, theta):
        return self.model.laplace_exponent(theta)

    def W(self, x, order=0):
        if order not in (0, 1, 2):
            raise DomainError("derivative order must be 0, 1 or 2")
        return self._eval(x, lambda v: self._w(v, order), np.zeros_like)

    def Wp(self, x):
        return self.W(x, 1)

    def Wpp(self, x):
        return self.W(x, 2)

    def Wbar(self, x):
        return self._eval(x, self._wbar, np.zeros_like)

    def Z(self, x, theta=None):
        if theta is None:
            return self._eval(x, lambda v: 1.0 + self.delta * self._wbar(v), np.ones_like)
        theta = float(theta)
        self._check_theta(theta)
        return self._eval(x, lambda v: self._ztheta(v, theta), lambda v: np.exp(theta * v))

    def Zp(self, x, theta=None):
        """x-derivative of Z(x) or Z(x, theta)."""
        if theta is None:
            return self.delta * self.W(x)
        theta = float(theta)
        return theta * self.Z(x, theta) + (self.delta - self.kappa(theta)) * self.W(x)

    def Zbar(self, x):
        return self._eval(x, self._zbar, lambda v: v)

    def Z1(self, x):
        """Derivative of Z(x, theta) in theta at theta = 0."""
        return self.Zbar(x) - self.profit * self.Wbar(x)

    def W2(self, x):
        """Self-convolution W * W."""
        return self._eval(x, self._w2, np.zeros_like)

    def nu(self, x):
        """Rate W'/W of downward excursions."""
        if np.any(np.asarray(x) <= 0):
            raise DomainError("excursion rate needs x > 0")
        return self.W(x, 1) / self.W(x)

    def delta_zw(self, x, theta=None):
        """Z(x,theta) W'(x) - Z'(x,theta) W(x)."""
        return self.Z(x, theta) * self.W(x, 1) - self.Zp(x, theta) * self.W(x)

    def wronskian(self, x):
        """(W')^2 - W W''."""
        return self.W(x, 1) ** 2 - self.W(x) * self.W(x, 2)

    # Cancellation-free pieces.  With A = lim Z(b, theta)/W(b) the tail
    # Z(x, theta) - A W(x) carries no exp(Phi x) mode, so combinations like
    # Z(x) - W(x) Z(b)/W(b) can be formed from bounded quantities.
    def zw_limit(self, theta=None):
        th = 0.0 if theta is None else float(theta)
        if abs(th - self.phi) < 1e-6:
            return self.kappa_prime_phi + 0.5 * float(self.model.derivative(self.phi, 2)) * (th - self.phi)
        return (self.delta - float(self.kappa(th))) / (self.phi - th)

    def w_scaled(self, x, order=0):
        """exp(-Phi x) W^{(order)}(x)."""
        return self._eval(x, lambda v: self._wscaled(v, order), np.zeros_like)

    def z_tail(self, x, theta=None, order=0):
        """Z^{(order)}(x, theta) - A W^{(order)}(x), order 0 or 1."""
        th = 0.0 if theta is None else float(theta)
        self._check_theta(th)
        if order == 0:
            below = lambda v: np.exp(th * v)
        else:
            below = lambda v: th * np.exp(th * v)
        return self._eval(x, lambda v: self._ztail(v, th, order), below)

    def _wscaled(self, x, order):
        return np.exp(-self.phi * x) * self._w(x, order)

    def _ztail(self, x, theta, order):
        a = self.zw_limit(theta)
        if order == 0:
            z = self._ztheta(x, theta)
        else:
            z = theta * self._ztheta(x, theta) + (self.delta - float(self.kappa(theta))) * self._w(x, 0)
        return z - a * self._w(x, order)

    def _check_theta(self, theta):
        if self.model.jumps.active:
            for p in self.model.jumps.poles:
                if theta == p:
                    raise PoleError(f"theta={theta} is a pole of the claim transform")


class RationalScaleSet(ScaleSet):
    backend = "rational"

    def __init__(self, model, delta):
        super().__init__(model, delta)
        fac = rational_factorization(model, self.delta)
        self.factorization = fac
        self.roots = fac.roots
        self.coeffs = fac.coeffs

    def _w(self, x, order):
        e = np.exp(np.outer(x, self.roots))
        out = e @ (self.coeffs * self.roots**order)
        # the sums only reproduce the known boundary values up to roundoff
        out[x == 0] = (self.w_at_0, self.wp_at_0, self.wpp_at_0)[order]
        return out

    def _wbar(self, x):
        z = np.outer(x, self.roots)
        return (x[:, None] * phi1(z)) @ self.coeffs

    def _zbar(self, x):
        z = np.outer(x, self.roots)
        return x + self.delta * ((x**2)[:, None] * phi2(z)) @ self.coeffs

    def _ztheta(self, x, theta):
        # anchor on the root nearest theta so no denominator is small
        j = int(np.argmin(np.abs(self.roots - theta)))
        anchor = np.exp(self.roots[j] * x)
        if self.roots[j] == theta:
            return anchor
        gap = self.delta - float(self.kappa(theta))
        out = anchor.copy()
        for i, (z, a) in enumerate(zip(self.roots, self.coeffs)):
            if i != j:
                out += gap * a * (np.exp(z * x) - anchor) / (z - theta)
        return out

    def _wscaled(self, x, order):
        e = np.exp(np.outer(x, self.roots - self.phi))
        return e @ (self.coeffs * self.roots**order)

    def _ztail(self, x, theta, order):
        lead = int(np.argmin(np.abs(self.roots - self.phi)))
        a = self.zw_limit(theta)
        gap = self.delta - float(self.kappa(theta))
        near = int(np.argmin(np.abs(self.roots - theta)))
        others = [i for i in range(len(self.roots)) if i != lead]
        if near == lead:
            # every non-leading mode has a safe denominator
            out = np.zeros_like(x)
            for i in others:
                z = self.roots[i]
                out += self.coeffs[i] * (gap / (z - theta) - a) * z**order * np.exp(z * x)
            return out
        # anchor on the root nearest theta, as in _ztheta, minus the leading mode
        zk = self.roots[near]
        w0 = 1.0
        out = np.zeros_like(x)
        for i in others:
            z, c = self.roots[i], self.coeffs[i]
            out -= a * c * z**order * np.exp(z * x)
            if i != near:
                w0 -= gap * c / (z - theta)
                out += gap * c / (z - theta) * z**order * np.exp(z * x)
        if near != lead:
            w0 -= gap * self.coeffs[lead] / (self.phi - theta)
        return out + w0 * zk**order * np.exp(zk * x)

    def _w2(self, x):
        out = np.zeros_like(x)
        for zi, ai in zip(self.roots, self.coeffs):
            for zj, aj in zip(self.roots, self.coeffs):
                out += ai * aj * divided_exp(zi, zj, x)
        return out


def _decay_scale(model, delta, phi):
    """Length scale of the slowest exponential mode of W_delta."""
    if phi > 0:
        return 1.0 / phi
    if model.sigma == 0 and not model.jumps.active:
        return 1.0
    if not model.jumps.active:
        return model.sigma**2 / (2 * abs(model.drift)) if model.drift else 1.0
    lo = -min(mu for _, _, mu in model.jumps.components) * (1 - 1e-12)
    if model.profit <= 0:
        return 1.0
    r = brentq(lambda s: model.laplace_exponent(s) - delta, lo, -1e-14)
    return 1.0 / abs(r)


def _zero_scale(model, x):
    """Closed-form W_0 and W_0' on the grid x."""
    c, s2 = model.drift, model.sigma**2
    if not model.jumps.active:
        if model.sigma == 0:
            return np.full_like(x, 1.0 / c), np.zeros_like(x)
        if c == 0:
            return 2.0 * x / s2, np.full_like(x, 2.0 / s2)
        g = 2.0 * c / s2
        return -np.expm1(-g * x) / c, (2.0 / s2) * np.exp(-g * x)
    if model.sigma == 0 and model.jumps.kind == "exp":
        lam, mu = model.lam, model.jumps.components[0][2]
        p = c - lam / mu
        g = mu - lam / c
        if p == 0:
            return (1.0 + mu * x) / c, np.full_like(x, mu / c)
        return 1.0 / p - lam / (g * c**2) * np.exp(-g * x), lam / c**2 * np.exp(-g * x)
    # Pollaczek-Khinchine in exponential-sum form: the delta = 0 partial fractions
    fac = rational_factorization(model, 0.0)
    e = np.exp(np.outer(x, fac.roots))
    return e @ fac.coeffs, e @ (fac.coeffs * fac.roots)


def stencil_d1(f, h):
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return d


def stencil_d2(f, h):
    d = np.empty_like(f)
    d[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
    # one-sided fills, only used to close the spline
    for i in (0, 1):
        d[i] = (35 * f[i] - 104 * f[i + 1] + 114 * f[i + 2] - 56 * f[i + 3] + 11 * f[i + 4]) / (12 * h * h)
        j = -1 - i
        d[j] = (35 * f[j] - 104 * f[j - 1] + 114 * f[j - 2] - 56 * f[j - 3] + 11 * f[j - 4]) / (12 * h * h)
    return d


def grid_convolve(a, b, da, db, h, tilt=0.0):
    """Trapezoid convolution on a uniform grid with Euler-Maclaurin end correction.

    With ``tilt`` > 0 both factors are damped by exp(-tilt x) first; the FFT
    error is relative to the largest entry, so growing inputs lose the small-x
    digits otherwise.
    """
    n = len(a)
    if tilt:
        x = np.arange(n) * h
        e = np.exp(-tilt * x)
        a, da = e * a, e * (da - tilt * a)
        b, db = e * b, e * (db - tilt * b)
    full = fftconvolve(a, b)[:n]
    out = h * (full - 0.5 * a * b[0] - 0.5 * a[0] * b)
    gx = -da[0] * b + a[0] * db
    g0 = -da * b[0] + a * db[0]
    out -= h * h / 12.0 * (gx - g0)
    out[0] = 0.0
    if tilt:
        out *= np.exp(tilt * np.arange(n) * h)
    return out


def cumulative_integral(f, df, h):
    """Running integral of f with Euler-Maclaurin end correction."""
    out = cumulative_trapezoid(f, dx=h, initial=0.0)
    return out - h * h / 12.0 * (df - df[0])


class SeriesScaleSet(ScaleSet):
    backend = "series"
    MAX_TERMS = 200

    def __init__(self, model, delta, h=1 / 512, x_max=None, tol=1e-12):
        super().__init__(model, delta)
        if not (h > 0 and np.isfinite(h)):
            raise GridError("grid step must be positive")
        if x_max is None:
            x_max = max(10.0, 4.0 * max(1.0, _decay_scale(model, self.delta, self.phi)))
        if not x_max > 0:
            raise GridError("x_max must be positive")
        n = max(int(math.ceil(x_max / h - 1e-9)), 8)
        self.h = h
        self.x_max = n * h
        self.grid = np.arange(n + 1) * h
        w0, dw0 = _zero_scale(model, self.grid)
        total = w0.copy()
        self.n_terms = 1
        if self.delta > 0:
            term, dterm = w0, dw0
            for _ in range(self.MAX_TERMS):
                term = self.delta * grid_convolve(w0, term, dw0, dterm, h, self.phi)
                dterm = stencil_d1(term, h)
                total += term
                self.n_terms += 1
                if np.max(np.abs(term)) < tol * np.max(np.abs(total)):
                    break
            else:
                warn_divergence(f"series stopped at {self.MAX_TERMS} terms without meeting the tail criterion")
        w = total
        dw = stencil_d1(w, h)
        d2w = stencil_d2(w, h)
        self._grid_w = w
        self._grid_dw = dw
        self._grid_d2w = d2w
        self._spl_w = CubicHermiteSpline(self.grid, w, dw)
        self._spl_dw = CubicHermiteSpline(self.grid, dw, d2w)
        self._spl_d2w = CubicSpline(self.grid, d2w)
        wbar = cumulative_integral(w, dw, h)
        self._spl_wbar = CubicHermiteSpline(self.grid, wbar, w)
        zbar = self.grid + self.delta * cumulative_integral(wbar, w, h)
        self._spl_zbar = CubicHermiteSpline(self.grid, zbar, 1.0 + self.delta * wbar)
        self._ztheta_cache = {}
        self._w2_spline = None

    def _check_range(self, x):
        if np.any(x > self.x_max + 1e-12):
            raise GridError(f"x beyond the series grid (x_max={self.x_max:g})")

    def _w(self, x, order):
        self._check_range(x)
        if order == 0:
            return self._spl_w(x)
        if order == 1:
            return self._spl_dw(x)
        edge = 2 * self.h
        if np.any((x < edge) | (x > self.x_max - edge)):
            raise DerivativeUnavailable("second derivative is not resolved within two grid steps of the edges")
        return self._spl_d2w(x)

    def _wbar(self, x):
        self._check_range(x)
        return self._spl_wbar(x)

    def _zbar(self, x):
        self._check_range(x)
        return self._spl_zbar(x)

    def _ztheta(self, x, theta):
        self._check_range(x)
        spl = self._ztheta_cache.get(theta)
        if spl is None:
            g = self.grid
            w, dw = self._grid_w, self._grid_dw
            gap = self.delta - float(self.kappa(theta))
            e = np.exp(-theta * g)
            integral = cumulative_integral(e * w, e * (dw - theta * w), self.h)
            z = np.exp(theta * g) * (1.0 + gap * integral)
            spl = CubicHermiteSpline(g, z, theta * z + gap * w)
            self._ztheta_cache[theta] = spl
        return spl(x)

    def _w2(self, x):
        self._check_range(x)
        if self._w2_spline is None:
            w, dw = self._grid_w, self._grid_dw
            w2 = grid_convolve(w, w, dw, dw, self.h, self.phi)
            self._w2_spline = CubicSpline(self.grid, w2)
        return self._w2_spline(x)


def stehfest_weights(n):
    if n % 2:
        raise DomainError("Gaver-Stehfest needs an even number of terms")
    half = n // 2
    v = np.zeros(n)
    for k in range(1, n + 1):
        acc = 0.0
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += (j**half * math.factorial(2 * j)
                    / (math.factorial(half - j) * math.factorial(j) * math.factorial(j - 1)
                       * math.factorial(k - j) * math.factorial(2 * j - k)))
        v[k - 1] = (-1) ** (k + half) * acc
    return v


def talbot_invert(transform, t, nodes=32):
    """Fixed-Talbot inversion of ``transform`` at the positive times ``t``."""
    t = np.asarray(t, dtype=float)
    r = 2.0 * nodes / (5.0 * t)
    k = np.arange(1, nodes)
    th = k * np.pi / nodes
    cot = 1.0 / np.tan(th)
    s = r[:, None] * th * (cot + 1j)
    sig = th + (th * cot - 1.0) * cot
    with np.errstate(over="ignore", invalid="ignore"):
        head = 0.5 * np.real(transform(r.astype(complex))) * np.exp(r * t)
        body = np.real(np.exp(t[:, None] * s) * transform(s) * (1.0 + 1j * sig))
        out = r / nodes * (head + body.sum(axis=1))
    if not np.all(np.isfinite(out)):
        raise InversionError("Talbot contour hit a singularity")
    return out


def stehfest_invert(transform, t, terms=14):
    t = np.asarray(t, dtype=float)
    v = stehfest_weights(terms)
    a = np.log(2.0) / t
    s = a[:, None] * np.arange(1, terms + 1)
    vals = np.real(transform(s.astype(complex)))
    out = a * (vals @ v)
    if not np.all(np.isfinite(out)):
        raise InversionError("Gaver-Stehfest evaluation hit a singularity")
    return out


class InversionScaleSet(ScaleSet):
    backend = "inversion"

    def __init__(self, model, delta, method="talbot", nodes=32, terms=14):
        super().__init__(model, delta)
        if method not in ("talbot", "stehfest"):
            raise DomainError(f"unknown inversion method {method!r}")
        self.method = method
        self.nodes = nodes
        self.terms = terms

    def _what(self, s):
        with np.errstate(divide="raise", invalid="raise"):
            try:
                return 1.0 / (self.model.laplace_exponent(s) - self.delta)
            except (FloatingPointError, ZeroDivisionError, PoleError) as exc:
                raise InversionError(f"transform evaluation failed: {exc}") from None

    def _invert(self, transform, x, at_zero):
        """Invert F via the Esscher-shifted G(s) = F(s + Phi) and undo the tilt."""
        out = np.empty_like(x)
        zero = x == 0
        out[zero] = at_zero
        if (~zero).any():
            xp = x[~zero]
            shifted = lambda s: transform(s + self.phi)
            if self.method == "talbot":
                g = talbot_invert(shifted, xp, self.nodes)
            else:
                g = stehfest_invert(shifted, xp, self.terms)
            out[~zero] = np.exp(self.phi * xp) * g
        return out

    def _w(self, x, order):
        w0, wp0 = self.w_at_0, self.wp_at_0
        if order == 0:
            f = self._what
        elif order == 1:
            f = lambda s: s * self._what(s) - w0
        else:
            f = lambda s: s * s * self._what(s) - s * w0 - wp0
        return self._invert(f, x, (w0, self.wp_at_0, self.wpp_at_0)[order])

    def _wbar(self, x):
        return self._invert(lambda s: self._what(s) / s, x, 0.0)

    def _zbar(self, x):
        return self._invert(lambda s: (1.0 + self.delta * self._what(s)) / (s * s), x, 0.0)

    def _ztheta(self, x, theta):
        kt = float(self.kappa(theta))

        def f(s):
            return (self.model.laplace_exponent(s) - kt) / (s - theta) * self._what(s)

        return self._invert(f, x, 1.0)

    def _w2(self, x):
        return self._invert(lambda s: self._what(s) ** 2, x, 0.0)


def build_rational(model, delta):
    return RationalScaleSet(model, delta)


def build_series(model, delta, h=1 / 512, x_max=None):
    return SeriesScaleSet(model, delta, h=h, x_max=x_max)


def build_inversion(model, delta, method="talbot", nodes=32, terms=14):
    return InversionScaleSet(model, delta, method=method, nodes=nodes, terms=terms)


def build(model, delta, backend="rational", **kw):
    if backend == "rational":
        return build_rational(model, delta)
    if backend == "series":
        return build_series(model, delta, **kw)
    if backend == "inversion":
        return build_inversion(model, delta, **kw)
    raise DomainError(f"unknown backend {backend!r}")


def eval_w(scale_set, x, deriv_order=0):
    return scale_set.W(x, deriv_order)


def eval_z(scale_set, x, theta=None):
    return scale_set.Z(x, theta)


def excursion_rate(scale_set, x):
    return scale_set.nu(x)
