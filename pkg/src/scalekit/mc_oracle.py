"""Monte Carlo oracle for the analytic laws.

Paths are X(t) = x + c t + sigma B(t) - (compound Poisson claims).  With
sigma = 0 the simulation is exact: paths are piecewise linear between claim
epochs and every passage time, regulator increment and occupation time is
computed in closed form.  With sigma > 0 the Brownian part is advanced on
sub-steps between the exact claim epochs, with a Brownian-bridge test for
crossings of absorbing levels inside a sub-step.  Sub-steps have length
``dt`` near a boundary and grow with the squared distance to the nearest
boundary away from it.

Randomness comes from independent Philox streams, one per block of
``BLOCK`` paths, spawned from the master seed.  The estimate therefore does
not depend on how blocks are scheduled.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ConfigError, IncompatibleDynamics

BLOCK = 4096
FAR_SIGMAS = 6.0
MAX_STEP = 0.25

# event kinds
NONE, RUIN, EXIT_UP, DRAWDOWN, PARISIAN = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 100_000
    seed: int = 0
    dt: float = 1e-3
    horizon: float = None
    antithetic: bool = False

    def __post_init__(self):
        if self.n_paths < 100:
            raise ConfigError("n_paths must be >= 100")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.horizon is not None and not self.horizon > 0:
            raise ConfigError("horizon must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.antithetic and self.n_paths % 2:
            raise ConfigError("antithetic sampling needs an even number of paths")


# ---------------------------------------------------------------- dynamics

@dataclass(frozen=True)
class Free:
    pass


@dataclass(frozen=True)
class ReflectBelow0:
    pass


@dataclass(frozen=True)
class ReflectAt:
    b: float


@dataclass(frozen=True)
class DoublyReflect:
    b: float


@dataclass(frozen=True)
class Taxed:
    """Tax at rate gamma on new maxima once the taxed level reaches b_start."""
    gamma: float
    b_start: float = 0.0


@dataclass(frozen=True)
class ParisianObserved:
    r: float


# ---------------------------------------------------------------- functionals

@dataclass(frozen=True)
class RuinProb:
    """P(ruin before the horizon); Parisian ruin under ParisianObserved."""


@dataclass(frozen=True)
class KilledExitUp:
    delta: float
    b: float


@dataclass(frozen=True)
class RuinTransform:
    """E[e^{-delta T + theta X(T)}; T < inf], optionally below an upper level b."""
    delta: float
    theta: float = 0.0
    b: float = math.inf


@dataclass(frozen=True)
class DiscountedDividends:
    delta: float
    b: float


@dataclass(frozen=True)
class DiscountedInjections:
    delta: float
    b: float


@dataclass(frozen=True)
class InjectionTransform:
    """E[e^{-delta T_b^+ - theta R_*(T_b^+)}] for the process reflected at 0."""
    delta: float
    b: float
    theta: float


@dataclass(frozen=True)
class RegulatorTransform:
    """E[e^{-vartheta R(e) - theta R_*(e)}] at an independent exponential time e."""
    delta: float
    vartheta: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class OccupationBelow0LT:
    """E[e^{-r L_-(e)}], L_- the time spent below 0 up to an exponential time e."""
    r: float
    delta: float


@dataclass(frozen=True)
class DrawdownDeficit:
    """E[e^{-delta S + theta (X(S) - max + d)}] at the first drawdown S of size d."""
    delta: float
    d: float
    theta: float = 0.0


@dataclass(frozen=True)
class TaxedExit:
    delta: float
    a: float
    xi: float
    d: float
    gamma: float


@dataclass(frozen=True)
class PathEstimate:
    mean: float
    std_error: float
    n_effective: int
    counts: dict = field(default_factory=dict)

    def within(self, value, k=3.0):
        # the floor only matters for zero-variance (deterministic) payoffs
        return abs(self.mean - value) <= k * self.std_error + 1e-12 * max(1.0, abs(value))

    def __str__(self):
        return f"{self.mean:.12g} +- {self.std_error:.3g}"


@dataclass
class Ensemble:
    model: object
    config: SimConfig
    dynamics: object
    x0: float


def simulate(model, config, dynamics, x0):
    """Bind model, configuration, dynamics and start level into an ensemble handle.

    Paths are generated lazily by ``estimate``; the same seed gives the same
    random streams for every functional.
    """
    if not isinstance(config, SimConfig):
        raise ConfigError("config must be a SimConfig")
    if isinstance(dynamics, (ReflectAt, DoublyReflect)) and not dynamics.b > 0:
        raise ConfigError("reflecting level must be positive")
    if isinstance(dynamics, Taxed) and not 0 <= dynamics.gamma < 1:
        raise ConfigError("tax rate must lie in [0, 1)")
    if isinstance(dynamics, ParisianObserved) and not dynamics.r > 0:
        raise ConfigError("observation rate must be positive")
    if x0 < 0 and not isinstance(dynamics, (Free, ParisianObserved)):
        raise ConfigError("start level must be >= 0")
    return Ensemble(model, config, dynamics, float(x0))


# ---------------------------------------------------------------- engine

@dataclass
class _Watch:
    delta: float = 0.0
    up: float = math.inf           # absorbing upper level
    low_absorb: bool = True        # absorb below 0
    low_reflect: bool = False
    up_reflect: float = math.inf   # reflecting upper level
    parisian: float = 0.0          # observation rate
    occupation: bool = False
    exp_clock: float = 0.0         # independent exponential horizon rate
    drawdown: object = None        # (kind, params)
    tax: object = None             # (gamma, m0)
    escape: float = math.inf       # level above which a path is retired


class _State:
    def __init__(self, n, x0):
        self.t = np.zeros(n)
        self.x = np.full(n, x0)
        self.xmax = np.full(n, x0)
        self.alive = np.ones(n, bool)
        self.kind = np.zeros(n, np.int8)
        self.t_event = np.full(n, np.inf)
        self.x_event = np.zeros(n)
        self.div = np.zeros(n)        # discounted dividends or taxes
        self.inj = np.zeros(n)        # discounted injections
        self.R = np.zeros(n)
        self.Rs = np.zeros(n)
        self.occ = np.zeros(n)
        self.horizon = None
        self.next_jump = None


def _disc_integral(delta, t0, t1):
    """int_{t0}^{t1} e^{-delta s} ds, vectorised."""
    if delta == 0:
        return t1 - t0
    return (np.exp(-delta * t0) - np.exp(-delta * t1)) / delta


def _drawdown_level(w, m):
    kind, p = w.drawdown
    if kind == "classic":
        return m - p
    xi, d, gamma, m0 = p
    g = m - gamma * np.maximum(m - m0, 0.0)
    return m - (1.0 - xi) * g - d


class _Engine:
    def __init__(self, model, cfg, watch, x0, rng, n, horizon):
        self.m, self.cfg, self.w, self.rng = model, cfg, watch, rng
        self.c, self.sigma = model.drift, model.sigma
        self.lam = model.lam
        self.st = _State(n, x0)
        st = self.st
        st.horizon = np.full(n, horizon)
        if watch.exp_clock > 0:
            st.horizon = np.minimum(st.horizon, self._exp(None, watch.exp_clock))
        st.next_jump = self._exp(None, self.lam) if self.lam > 0 else np.full(n, np.inf)

    # antithetic pairing: path i and path i + n/2 of a block use mirrored draws
    def _draw(self, idx, gen, mirror):
        n = self.st.t.size
        if not self.cfg.antithetic:
            return gen(n if idx is None else idx.size)
        k = (n + 1) // 2
        u = gen(k)
        full = np.concatenate([u, mirror(u)])[:n]
        return full if idx is None else full[idx]

    def _uniform(self, idx):
        return self._draw(idx, self.rng.random, lambda u: 1.0 - u)

    def _normal(self, idx):
        return self._draw(idx, self.rng.standard_normal, lambda z: -z)

    def _exp(self, idx, rate):
        return -np.log1p(-self._uniform(idx)) / rate

    def _kill(self, idx, kind, t, x):
        st = self.st
        st.alive[idx] = False
        st.kind[idx] = kind
        st.t_event[idx] = t
        st.x_event[idx] = x

    def run(self):
        st = self.st
        guard = 0
        while st.alive.any():
            guard += 1
            if guard > 50_000_000:
                raise ConfigError("simulation did not terminate")
            idx = np.flatnonzero(st.alive)
            if self.sigma == 0:
                self._segment_exact(idx)
            else:
                self._segment_euler(idx)
        return st

    # -- sigma = 0: drift segment up to the next claim, exact
    def _segment_exact(self, idx):
        st, w, c = self.st, self.w, self.c
        t0, x0 = st.t[idx], st.x[idx]
        t1 = np.minimum(st.next_jump[idx], st.horizon[idx])
        h = t1 - t0
        live = np.ones(idx.size, bool)

        if w.parisian > 0 or w.occupation:
            below = np.where(x0 < 0, np.minimum(h, -x0 / c) if c > 0 else h, 0.0)
            if w.occupation:
                st.occ[idx] += below
            if w.parisian > 0:
                g = self._exp(idx, w.parisian)
                hit = g < below
                if hit.any():
                    j = idx[hit]
                    self._kill(j, PARISIAN, t0[hit] + g[hit], x0[hit] + c * g[hit])
                    live &= ~hit

        x1 = x0 + c * h
        if math.isfinite(w.up):
            hit = live & (x1 >= w.up)
            if hit.any():
                te = t0[hit] + (w.up - x0[hit]) / c
                self._kill(idx[hit], EXIT_UP, te, w.up)
                live &= ~hit
        if math.isfinite(w.escape):
            hit = live & (x1 >= w.escape)
            if hit.any():
                self._kill(idx[hit], NONE, t1[hit], x1[hit])
                live &= ~hit
        if math.isfinite(w.up_reflect):
            b = w.up_reflect
            over = live & (x1 > b)
            if over.any():
                tb = t0[over] + np.maximum(b - x0[over], 0.0) / c
                st.div[idx[over]] += c * _disc_integral(w.delta, tb, t1[over])
                st.R[idx[over]] += x1[over] - np.maximum(x0[over], b)
                x1[over] = b
        if w.tax is not None:
            gamma, m0 = w.tax
            newmax = np.maximum(x1, st.xmax[idx])
            # taxes on increases of the maximum above m0
            lo = np.maximum(st.xmax[idx], m0)
            taxed = live & (newmax > lo)
            if taxed.any():
                j = np.flatnonzero(taxed)
                ta = t0[j] + (lo[j] - x0[j]) / c
                tb = t0[j] + (newmax[j] - x0[j]) / c
                st.div[idx[j]] += gamma * c * _disc_integral(w.delta, ta, tb)
        st.xmax[idx] = np.maximum(st.xmax[idx], x1)
        st.x[idx] = x1
        st.t[idx] = t1

        done = live & (t1 >= st.horizon[idx])
        if done.any():
            self._kill(idx[done], NONE, t1[done], x1[done])
            live &= ~done
        if live.any():
            self._claim(idx[live])

    # -- sigma > 0: one Euler sub-step
    def _segment_euler(self, idx):
        st, w, c, sig = self.st, self.w, self.c, self.sigma
        t0, x0 = st.t[idx], st.x[idx]
        t1 = np.minimum.reduce([st.next_jump[idx], st.horizon[idx], t0 + self._step(idx, x0)])
        h = t1 - t0
        x1 = x0 + c * h + sig * np.sqrt(h) * self._normal(idx)
        live = np.ones(idx.size, bool)
        s2h = sig * sig * np.maximum(h, 1e-300)

        def bridge(dist0, dist1):
            # probability the bridge crossed a level at signed distances dist0, dist1 > 0
            p = np.exp(-2.0 * np.maximum(dist0, 0) * np.maximum(dist1, 0) / s2h)
            return (dist1 <= 0) | (self.rng.random(idx.size) < p)

        if w.low_absorb and w.parisian == 0 and not w.occupation and w.drawdown is None:
            hit = live & bridge(x0, x1)
            if hit.any():
                self._kill(idx[hit], RUIN, t1[hit], 0.0)
                live &= ~hit
        if w.parisian > 0 or w.occupation:
            below = h * 0.5 * ((x0 < 0).astype(float) + (x1 < 0))
            if w.occupation:
                st.occ[idx] += below
            if w.parisian > 0:
                g = self._exp(idx, w.parisian)
                hit = live & (g < below)
                if hit.any():
                    self._kill(idx[hit], PARISIAN, t0[hit] + g[hit], x1[hit])
                    live &= ~hit
        if math.isfinite(w.up):
            hit = live & bridge(w.up - x0, w.up - x1)
            if hit.any():
                self._kill(idx[hit], EXIT_UP, t1[hit], w.up)
                live &= ~hit
        if math.isfinite(w.escape):
            hit = live & (x1 >= w.escape)
            if hit.any():
                self._kill(idx[hit], NONE, t1[hit], x1[hit])
                live &= ~hit
        if math.isfinite(w.up_reflect):
            over = live & (x1 > w.up_reflect)
            if over.any():
                inc = x1[over] - w.up_reflect
                st.div[idx[over]] += np.exp(-w.delta * t1[over]) * inc
                st.R[idx[over]] += inc
                x1[over] = w.up_reflect
        if w.low_reflect:
            under = live & (x1 < 0)
            if under.any():
                inc = -x1[under]
                st.inj[idx[under]] += np.exp(-w.delta * t1[under]) * inc
                st.Rs[idx[under]] += inc
                x1[under] = 0.0
        if w.tax is not None:
            gamma, m0 = w.tax
            lo = np.maximum(st.xmax[idx], m0)
            gain = np.maximum(x1 - lo, 0.0)
            st.div[idx] += gamma * gain * np.exp(-w.delta * t1)
        if w.drawdown is not None:
            newmax = np.maximum(st.xmax[idx], x1)
            level = _drawdown_level(w, newmax)
            hit = live & (x1 < level)
            if hit.any():
                self._kill(idx[hit], DRAWDOWN, t1[hit], x1[hit] - level[hit])
                live &= ~hit
        st.xmax[idx] = np.maximum(st.xmax[idx], x1)
        st.x[idx] = x1
        st.t[idx] = t1
        done = live & (t1 >= st.horizon[idx])
        if done.any():
            self._kill(idx[done], NONE, t1[done], x1[done])
            live &= ~done
        jumping = live & (t1 >= st.next_jump[idx])
        if jumping.any():
            self._claim(idx[jumping])

    def _step(self, idx, x):
        """dt near a boundary, larger steps (up to MAX_STEP) when the nearest one is far."""
        w = self.w
        dist = np.full(x.size, np.inf)
        if w.low_absorb or w.low_reflect or w.parisian > 0 or w.occupation:
            dist = np.minimum(dist, np.abs(x))
        for lvl in (w.up, w.up_reflect, w.escape):
            if math.isfinite(lvl):
                dist = np.minimum(dist, np.abs(lvl - x))
        if w.drawdown is not None:
            dist = np.minimum(dist, x - _drawdown_level(w, self.st.xmax[idx]))
        free = (dist / (FAR_SIGMAS * self.sigma)) ** 2
        return np.clip(free, self.cfg.dt, max(MAX_STEP, self.cfg.dt))

    def _claim(self, idx):
        st, w = self.st, self.w
        t = st.t[idx]
        size = self.m.jumps.sample(self.rng, idx.size)
        x = st.x[idx] - size
        st.next_jump[idx] = t + self._exp(idx, self.lam)
        live = np.ones(idx.size, bool)
        if w.drawdown is not None:
            level = _drawdown_level(w, st.xmax[idx])
            hit = x < level
            if hit.any():
                self._kill(idx[hit], DRAWDOWN, t[hit], x[hit] - level[hit])
                live &= ~hit
        elif w.low_reflect:
            under = x < 0
            inc = np.where(under, -x, 0.0)
            st.inj[idx] += np.exp(-w.delta * t) * inc
            st.Rs[idx] += inc
            x = np.maximum(x, 0.0)
        elif w.low_absorb and w.parisian == 0 and not w.occupation:
            hit = x < 0
            if hit.any():
                self._kill(idx[hit], RUIN, t[hit], x[hit])
                live &= ~hit
        st.x[idx[live]] = x[live]


# ---------------------------------------------------------------- estimation

def _ruin_escape(model, target):
    """Level L with ruin probability from L below ``target`` (delta = 0)."""
    from .scale_core import build_rational

    p = model.profit
    if p <= 0:
        return math.inf
    s0 = build_rational(model, 0.0)
    lvl = 1.0
    while 1.0 - p * float(s0.W(lvl)) > target:
        lvl *= 1.5
        if lvl > 1e6:
            return math.inf
    return lvl


def _watch_for(ens, fn):
    dyn, m = ens.dynamics, ens.model
    need = lambda *ok: isinstance(dyn, ok) or _incompatible(dyn, fn)
    w = _Watch()
    if isinstance(fn, RuinProb):
        need(Free, ParisianObserved, ReflectAt)
        if isinstance(dyn, ParisianObserved):
            w.parisian = dyn.r
        if isinstance(dyn, ReflectAt):
            w.up_reflect = dyn.b
        elif m.profit > 0:
            w.escape = _ruin_escape(m, 0.05 / math.sqrt(ens.config.n_paths))
    elif isinstance(fn, KilledExitUp):
        need(Free, ReflectBelow0)
        w.delta, w.up = fn.delta, fn.b
        w.low_absorb = isinstance(dyn, Free)
        w.low_reflect = isinstance(dyn, ReflectBelow0)
    elif isinstance(fn, RuinTransform):
        need(Free, ReflectAt)
        w.delta, w.up = fn.delta, fn.b
        if isinstance(dyn, ReflectAt):
            w.up, w.up_reflect = math.inf, dyn.b
    elif isinstance(fn, DiscountedDividends):
        need(ReflectAt, DoublyReflect)
        if dyn.b != fn.b:
            _incompatible(dyn, fn)
        w.delta, w.up_reflect = fn.delta, fn.b
        if isinstance(dyn, DoublyReflect):
            w.low_absorb, w.low_reflect = False, True
    elif isinstance(fn, (DiscountedInjections, InjectionTransform)):
        need(ReflectBelow0, DoublyReflect)
        w.delta = fn.delta
        w.low_absorb, w.low_reflect = False, True
        if isinstance(dyn, DoublyReflect):
            if isinstance(fn, InjectionTransform) or dyn.b != fn.b:
                _incompatible(dyn, fn)
            w.up_reflect = fn.b
        else:
            w.up = fn.b
    elif isinstance(fn, RegulatorTransform):
        need(DoublyReflect, ReflectBelow0)
        w.exp_clock = fn.delta
        w.low_absorb, w.low_reflect = False, True
        if isinstance(dyn, DoublyReflect):
            w.up_reflect = dyn.b
    elif isinstance(fn, OccupationBelow0LT):
        need(Free)
        w.occupation, w.exp_clock = True, fn.delta
        w.low_absorb = False
    elif isinstance(fn, DrawdownDeficit):
        need(Free)
        w.delta, w.drawdown = fn.delta, ("classic", fn.d)
        w.low_absorb = False
    elif isinstance(fn, TaxedExit):
        need(Taxed)
        if abs(dyn.gamma - fn.gamma) > 0:
            _incompatible(dyn, fn)
        m0 = max(ens.x0, dyn.b_start)
        w.delta = fn.delta
        w.low_absorb = False
        w.tax = (dyn.gamma, m0)
        w.drawdown = ("affine", (fn.xi, fn.d, dyn.gamma, m0))
        # the taxed level reaches a when the untaxed maximum reaches this level
        w.up = fn.a if fn.a <= m0 else (fn.a - dyn.gamma * m0) / (1.0 - dyn.gamma)
    else:
        raise IncompatibleDynamics(f"unknown functional {fn!r}")
    return w


def _incompatible(dyn, fn):
    raise IncompatibleDynamics(f"{type(fn).__name__} is not defined under {type(dyn).__name__}")


def _horizon(ens, w):
    if ens.config.horizon is not None:
        return ens.config.horizon
    if w.delta > 0:
        return 30.0 / w.delta
    if w.exp_clock > 0:
        return 40.0 / w.exp_clock
    return 1e4


def _payoff(fn, st, w):
    delta = getattr(fn, "delta", 0.0)
    disc = np.exp(-delta * np.where(np.isfinite(st.t_event), st.t_event, 0.0))
    if isinstance(fn, RuinProb):
        return (st.kind == RUIN) | (st.kind == PARISIAN)
    if isinstance(fn, KilledExitUp):
        return np.where(st.kind == EXIT_UP, disc, 0.0)
    if isinstance(fn, RuinTransform):
        return np.where(st.kind == RUIN, disc * np.exp(fn.theta * st.x_event), 0.0)
    if isinstance(fn, DiscountedDividends):
        return st.div
    if isinstance(fn, DiscountedInjections):
        return st.inj
    if isinstance(fn, InjectionTransform):
        return np.where(st.kind == EXIT_UP, disc * np.exp(-fn.theta * st.Rs), 0.0)
    if isinstance(fn, RegulatorTransform):
        return np.exp(-fn.vartheta * st.R - fn.theta * st.Rs)
    if isinstance(fn, OccupationBelow0LT):
        return np.exp(-fn.r * st.occ)
    if isinstance(fn, DrawdownDeficit):
        return np.where(st.kind == DRAWDOWN, disc * np.exp(fn.theta * st.x_event), 0.0)
    if isinstance(fn, TaxedExit):
        return np.where(st.kind == EXIT_UP, disc, 0.0)
    raise IncompatibleDynamics(f"unknown functional {fn!r}")


def _blocks(cfg):
    seeds = np.random.SeedSequence(int(cfg.seed)).spawn((cfg.n_paths + BLOCK - 1) // BLOCK)
    for i, ss in enumerate(seeds):
        n = min(BLOCK, cfg.n_paths - i * BLOCK)
        yield n, np.random.Generator(np.random.Philox(ss))


def run_paths(ens, fn):
    """Per-path payoffs and the raw final states, block by block."""
    w = _watch_for(ens, fn)
    horizon = _horizon(ens, w)
    pay, states = [], []
    for n, rng in _blocks(ens.config):
        st = _Engine(ens.model, ens.config, w, ens.x0, rng, n, horizon).run()
        pay.append(np.asarray(_payoff(fn, st, w), dtype=float))
        states.append(st)
    return np.concatenate(pay), states


def estimate(ens, fn):
    """Sample mean and standard error of the functional over the ensemble."""
    pay, states = run_paths(ens, fn)
    n = pay.size
    if ens.config.antithetic:
        pairs = []
        for p in np.split(pay, np.cumsum([st.t.size for st in states])[:-1]):
            k = p.size // 2
            pairs.append(0.5 * (p[:k] + p[k:2 * k]))
        pm = np.concatenate(pairs)
        mean, se, neff = float(pm.mean()), float(pm.std(ddof=1) / math.sqrt(pm.size)), pm.size
    else:
        mean, se, neff = float(pay.mean()), float(pay.std(ddof=1) / math.sqrt(n)), n
    kinds = np.concatenate([st.kind for st in states])
    counts = {
        "ruin": int(np.sum(kinds == RUIN)),
        "exit": int(np.sum(kinds == EXIT_UP)),
        "drawdown": int(np.sum(kinds == DRAWDOWN)),
        "parisian_ruin": int(np.sum(kinds == PARISIAN)),
    }
    return PathEstimate(mean, se, neff, counts)


def regulator_samples(model, config, b, delta, x0=None):
    """R(e) for the process doubly reflected at 0 and b, e ~ Exp(delta)."""
    ens = simulate(model, config, DoublyReflect(b), b if x0 is None else x0)
    _, states = run_paths(ens, RegulatorTransform(delta))
    return np.concatenate([st.R for st in states])


def duality_samples(model, t, n_paths=20_000, seed=0, dt=1e-3):
    """Samples of (max, max - X(t)) and (X(t) - min, -min) started from 0.

    Both pairs have the same law; returned as two (n, 2) arrays computed from
    independent streams.
    """
    cfg = SimConfig(n_paths=n_paths, seed=seed, dt=dt, horizon=t)
    out = []
    for rng_seed in (seed, seed + 1):
        rows = []
        for n, rng in _blocks(SimConfig(n_paths=n_paths, seed=rng_seed, dt=dt, horizon=t)):
            rows.append(_extremes(model, cfg, rng, n, t))
        out.append(np.concatenate(rows))
    a, b = out
    return np.column_stack([a[:, 0], a[:, 0] - a[:, 2]]), np.column_stack([b[:, 2] - b[:, 1], -b[:, 1]])


def _extremes(model, cfg, rng, n, t):
    """(max, min, X(t)) on [0, t] from 0; exact for sigma = 0."""
    c, sig, lam = model.drift, model.sigma, model.lam
    x = np.zeros(n)
    hi, lo = np.zeros(n), np.zeros(n)
    now = np.zeros(n)
    nxt = rng.exponential(1.0 / lam, n) if lam > 0 else np.full(n, np.inf)
    while True:
        act = now < t
        if not act.any():
            break
        i = np.flatnonzero(act)
        end = np.minimum(nxt[i], t)
        if sig > 0:
            end = np.minimum(end, now[i] + cfg.dt)
        h = end - now[i]
        move = c * h + (sig * np.sqrt(h) * rng.standard_normal(i.size) if sig > 0 else 0.0)
        x[i] += move
        hi[i] = np.maximum(hi[i], x[i])
        lo[i] = np.minimum(lo[i], x[i])
        now[i] = end
        jump = (end >= nxt[i]) & (end < t)
        if jump.any():
            j = i[jump]
            x[j] -= model.jumps.sample(rng, j.size)
            lo[j] = np.minimum(lo[j], x[j])
            nxt[j] = end[jump] + rng.exponential(1.0 / lam, j.size)
    return np.column_stack([hi, lo, x])


def ks_distance(a, b):
    """Two-sample Kolmogorov-Smirnov statistic and p-value."""
    res = stats.ks_2samp(a, b)
    return float(res.statistic), float(res.pvalue)
