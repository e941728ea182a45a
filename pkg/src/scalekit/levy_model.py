"""Spectrally negative Lévy models with rational claim transforms.

A model is the triplet (sigma, drift, jumps) with Laplace exponent

    kappa(s) = sigma^2 s^2 / 2 + drift * s + lambda * (fhat(s) - 1)

where fhat(s) = E[exp(-s C)] is the transform of the (positive) claim size C.
Claims are finite mixtures of Erlang laws, which covers the exponential,
Erlang and hyperexponential families and keeps kappa rational.
"""

from dataclasses import dataclass, field
import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from .errors import (
    ComplexRootError,
    ConvergenceError,
    DomainError,
    PoleError,
    RepeatedRootError,
)

JUMP_KINDS = ("none", "exp", "erlang", "hyperexp")


@dataclass(frozen=True)
class JumpSpec:
    """Compound Poisson claims: intensity and Erlang-mixture components.

    ``components`` holds (weight, shape, rate) triples of an Erlang mixture;
    ``intensity`` is the claim arrival rate lambda.
    """

    kind: str = "none"
    intensity: float = 0.0
    components: tuple = ()

    def __post_init__(self):
        if self.kind not in JUMP_KINDS:
            raise DomainError(f"unknown jump kind {self.kind!r}")
        if self.intensity < 0 or not np.isfinite(self.intensity):
            raise DomainError("jump intensity must be finite and >= 0")
        if self.kind == "none":
            if self.components:
                raise DomainError("kind 'none' takes no components")
            return
        if not self.components:
            raise DomainError("claim law needs at least one component")
        wsum = 0.0
        for w, n, mu in self.components:
            if not (mu > 0 and np.isfinite(mu)):
                raise DomainError("claim rates must be positive")
            if int(n) != n or n < 1:
                raise DomainError("Erlang shapes must be positive integers")
            if w < 0:
                raise DomainError("mixture weights must be nonnegative")
            wsum += w
        if abs(wsum - 1.0) > 1e-10:
            raise DomainError("mixture weights must sum to 1")

    @property
    def active(self):
        return self.kind != "none" and self.intensity > 0

    @property
    def poles(self):
        return sorted({-mu for _, _, mu in self.components})

    def transform(self, s, order=0):
        """k-th derivative of E[exp(-s C)]."""
        s = np.asarray(s)
        out = np.zeros(s.shape, dtype=np.result_type(s, float))
        for w, n, mu in self.components:
            base = mu + s
            if np.any(base == 0):
                raise PoleError(f"claim transform has a pole at s={-mu}")
            rising = 1.0
            for j in range(order):
                rising *= -(n + j)
            out = out + w * rising * mu**n * base ** (-(n + order))
        return out

    def mean(self):
        return sum(w * n / mu for w, n, mu in self.components)

    def second_moment(self):
        return sum(w * n * (n + 1) / mu**2 for w, n, mu in self.components)

    def density_at_zero(self):
        return sum(w * mu for w, n, mu in self.components if n == 1)

    def tilt(self, p):
        """Esscher tilt of the claim law: returns (tilted claims, fhat(p))."""
        if not self.active:
            return self, 1.0
        if p <= -min(mu for _, _, mu in self.components):
            raise PoleError("tilt beyond the first claim-transform pole")
        parts = [w * (mu / (mu + p)) ** n for w, n, mu in self.components]
        fp = float(sum(parts))
        comps = tuple(
            (pw / fp, n, mu + p) for pw, (_, n, mu) in zip(parts, self.components)
        )
        return JumpSpec(self.kind, self.intensity * fp, comps), fp

    def rational(self):
        """Numerator and denominator polynomials of fhat."""
        rates = sorted({mu for _, _, mu in self.components})
        top = {mu: max(n for _, n, m in self.components if m == mu) for mu in rates}
        den = Polynomial([1.0])
        for mu in rates:
            den = den * Polynomial([mu, 1.0]) ** top[mu]
        num = Polynomial([0.0])
        for w, n, mu in self.components:
            rest = Polynomial([1.0])
            for m in rates:
                k = top[m] - (n if m == mu else 0)
                rest = rest * Polynomial([m, 1.0]) ** k
            num = num + w * mu**n * rest
        return num, den

    def sample(self, rng, size):
        if not self.components:
            return np.zeros(size)
        weights = np.array([w for w, _, _ in self.components])
        idx = rng.choice(len(weights), size=size, p=weights / weights.sum())
        shapes = np.array([n for _, n, _ in self.components], dtype=float)[idx]
        rates = np.array([mu for _, _, mu in self.components])[idx]
        return rng.gamma(shapes, 1.0 / rates)

    def to_dict(self):
        d = {"kind": self.kind, "lambda": self.intensity}
        if self.kind == "exp":
            d["rate"] = self.components[0][2]
        elif self.kind == "erlang":
            d["shape"] = int(self.components[0][1])
            d["rate"] = self.components[0][2]
        elif self.kind == "hyperexp":
            d["weights"] = [c[0] for c in self.components]
            d["rates"] = [c[2] for c in self.components]
        return d


def NoJumps():
    return JumpSpec("none", 0.0, ())


def Exponential(rate, intensity):
    return JumpSpec("exp", float(intensity), ((1.0, 1, float(rate)),))


def Erlang(shape, rate, intensity):
    return JumpSpec("erlang", float(intensity), ((1.0, int(shape), float(rate)),))


def HyperExponential(weights, rates, intensity):
    if len(weights) != len(rates):
        raise DomainError("weights and rates differ in length")
    comps = tuple((float(w), 1, float(m)) for w, m in zip(weights, rates))
    return JumpSpec("hyperexp", float(intensity), comps)


_JUMP_KEYS = {"kind", "lambda", "rate", "mu", "shape", "weights", "rates"}
_MODEL_KEYS = {"sigma", "drift", "jumps", "description"}


def _no_extra(d, allowed, what):
    extra = sorted(set(d) - allowed)
    if extra:
        raise DomainError(f"unknown {what} field(s): {', '.join(extra)}")


def jumps_from_dict(d):
    _no_extra(d, _JUMP_KEYS, "jump")
    kind = d.get("kind", "none")
    lam = float(d.get("lambda", 0.0))
    if kind == "none":
        return NoJumps()
    rate = d.get("rate", d.get("mu"))
    if kind == "exp":
        return Exponential(rate, lam)
    if kind == "erlang":
        return Erlang(d["shape"], rate, lam)
    if kind == "hyperexp":
        return HyperExponential(d["weights"], d["rates"], lam)
    raise DomainError(f"unknown jump kind {kind!r}")


@dataclass(frozen=True)
class LevyModel:
    sigma: float
    drift: float
    jumps: JumpSpec = field(default_factory=NoJumps)
    description: str = ""

    def __post_init__(self):
        if not (self.sigma >= 0 and np.isfinite(self.sigma)):
            raise DomainError("sigma must be finite and >= 0")
        if not np.isfinite(self.drift):
            raise DomainError("drift must be finite")
        if self.sigma == 0 and self.drift <= 0:
            raise DomainError("bounded variation model needs a positive premium rate")

    @property
    def lam(self):
        return self.jumps.intensity if self.jumps.active else 0.0

    @property
    def bounded_variation(self):
        return self.sigma == 0

    @property
    def profit(self):
        """kappa'(0+), the mean drift per unit time."""
        return float(self.derivative(0.0, 1))

    def __call__(self, s):
        return self.laplace_exponent(s)

    def laplace_exponent(self, s):
        s = np.asarray(s)
        val = 0.5 * self.sigma**2 * s * s + self.drift * s
        if self.jumps.active:
            val = val + self.lam * (self.jumps.transform(s) - 1.0)
        return val if val.ndim else val[()]

    def derivative(self, s, order=1):
        if order not in (1, 2):
            raise DomainError("derivative order must be 1 or 2")
        s = np.asarray(s)
        if order == 1:
            val = self.sigma**2 * s + self.drift
        else:
            val = self.sigma**2 + 0.0 * s
        if self.jumps.active:
            val = val + self.lam * self.jumps.transform(s, order)
        return val if val.ndim else val[()]

    def phi(self, delta):
        """Largest nonnegative root of kappa(s) = delta."""
        if delta < 0 or not np.isfinite(delta):
            raise DomainError("delta must be finite and >= 0")
        if delta == 0 and self.profit >= 0:
            return 0.0
        lo = 0.0
        if delta == 0:
            # kappa dips below zero right of the origin; start past its minimum
            hi = 1.0
            while self.derivative(hi) <= 0:
                hi *= 2.0
                if hi > 1e12:
                    raise ConvergenceError("kappa never turns upward")
            lo = brentq(lambda s: self.derivative(s), 0.0, hi, xtol=1e-300)
        hi = max(1.0, 2 * lo)
        while self.laplace_exponent(hi) <= delta:
            hi *= 2.0
            if hi > 1e12:
                raise ConvergenceError("could not bracket the Cramer-Lundberg root")
        root = brentq(lambda s: self.laplace_exponent(s) - delta, lo, hi,
                      xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        for _ in range(2):
            d1 = self.derivative(root)
            if d1 <= 0:
                break
            step = (self.laplace_exponent(root) - delta) / d1
            if not np.isfinite(step):
                break
            root -= step
        return float(root)

    def esscher_shift(self, p):
        """Model whose exponent is kappa(s + p) - kappa(p)."""
        if p == 0:
            return self
        jumps, _ = self.jumps.tilt(p)
        return LevyModel(self.sigma, self.drift + self.sigma**2 * p, jumps,
                         self.description + f" [tilted by {p:.6g}]")

    def to_dict(self):
        return {"sigma": self.sigma, "drift": self.drift,
                "jumps": self.jumps.to_dict(), "description": self.description}

    @classmethod
    def from_dict(cls, d):
        _no_extra(d, _MODEL_KEYS, "model")
        try:
            return cls(float(d.get("sigma", 0.0)), float(d["drift"]),
                       jumps_from_dict(d.get("jumps", {"kind": "none"})),
                       str(d.get("description", "")))
        except KeyError as exc:
            raise DomainError(f"model is missing field {exc}") from None


def laplace_exponent(model, theta):
    return model.laplace_exponent(theta)


def phi(model, delta):
    return model.phi(delta)


def kappa_derivative(model, theta, order=1):
    return model.derivative(theta, order)


def esscher_shift(model, p):
    return model.esscher_shift(p)


def brownian(sigma, mu, description=""):
    return LevyModel(float(sigma), float(mu), NoJumps(), description or "Brownian motion")


def cramer_lundberg(c, lam, jumps=None, sigma=0.0, rate=None, description=""):
    """Perturbed Cramer-Lundberg model; exponential claims if ``rate`` is given."""
    if jumps is None:
        jumps = Exponential(rate, lam)
    elif jumps.intensity != lam:
        jumps = JumpSpec(jumps.kind, float(lam), jumps.components)
    return LevyModel(float(sigma), float(c), jumps, description)


def azcue_muler(sigma):
    """Erlang(2,1) claims, lambda=10, premium 107/5."""
    return LevyModel(float(sigma), 107 / 5, Erlang(2, 1.0, 10.0),
                     f"Azcue-Muler example, sigma={sigma}")


@dataclass(frozen=True)
class RationalExponent:
    roots: np.ndarray
    coeffs: np.ndarray
    delta: float

    def reconstruct(self, s):
        """Partial fraction sum, equal to 1/(kappa(s) - delta)."""
        s = np.asarray(s)[..., None]
        return np.sum(self.coeffs / (s - self.roots), axis=-1)


def _polynomial(model, delta):
    base = Polynomial([-model.lam - delta, model.drift, 0.5 * model.sigma**2])
    if not model.jumps.active:
        return Polynomial([-delta, model.drift, 0.5 * model.sigma**2])
    num, den = model.jumps.rational()
    return den * base + model.lam * num


def rational_factorization(model, delta, gap_tol=1e-8):
    """Real roots of kappa(s) = delta with coefficients A_i = 1/kappa'(zeta_i)."""
    if delta < 0:
        raise DomainError("delta must be >= 0")
    poly = _polynomial(model, delta)
    poly = poly.trim(tol=0)
    raw = poly.roots()
    scale = np.maximum(1.0, np.abs(raw))
    if np.any(np.abs(raw.imag) > 1e-7 * scale):
        raise ComplexRootError(
            "kappa(s) = delta has complex roots; the exponential-sum form needs real roots",
            roots=raw)
    roots = np.sort(raw.real)[::-1]
    polished = []
    for z in roots:
        for _ in range(3):
            d1 = model.derivative(z)
            if d1 == 0:
                break
            step = (model.laplace_exponent(z) - delta) / d1
            if not np.isfinite(step) or abs(step) > 1e-6 * max(1.0, abs(z)):
                break
            z = z - step
        polished.append(float(z))
    roots = np.array(polished)
    if delta == 0:
        # the origin is always a root; pin it exactly
        i = np.argmin(np.abs(roots))
        roots[i] = 0.0
    gaps = -np.diff(roots)
    if len(gaps) and np.min(gaps) < gap_tol:
        raise RepeatedRootError("kappa(s) = delta has (nearly) repeated roots", roots=roots)
    coeffs = 1.0 / np.asarray(model.derivative(roots), dtype=float)
    return RationalExponent(roots, coeffs, float(delta))


def kappa_poles(model):
    return model.jumps.poles if model.jumps.active else []
