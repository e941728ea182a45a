"""Command-line front end.

Exit status: 0 success, 2 usage error, 3 domain error, 4 numerical failure.
Numbers are printed with 12 significant digits; CSV goes to stdout unless
``--out`` is given.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import mc_oracle as mc
from . import passage_laws as pl
from . import parisian_omega as po
from .dividends import (DeFinetti, DeFinettiPenalty, DividendsPenalty, DividendsTime, SLG,
                        TaxedDrawdown, default_scan, optimize_barrier)
from .errors import DomainError, NumericalError
from .levy_model import LevyModel, azcue_muler
from .scale_core import build


class UsageError(Exception):
    pass


def fmt(v):
    s = f"{float(v):.12g}"
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def load_model(text):
    """Inline JSON, a path to a JSON file, or the preset ``azcue-muler:<sigma>``."""
    if text is None:
        raise UsageError("--model is required")
    if text.startswith("azcue-muler"):
        _, _, sig = text.partition(":")
        return azcue_muler(float(sig or 0.0))
    try:
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text, encoding="utf-8") as fh:
                data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read model: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("model JSON must be an object")
    return LevyModel.from_dict(data)


def parse_params(text):
    out = {}
    for item in filter(None, (text or "").split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"bad parameter {item!r}; expected key=value")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"parameter {key!r} is not a number") from None
    return out


def write_csv(header, rows, out):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- eval

def cmd_eval(a):
    s = build(load_model(a.model), a.delta, a.backend)
    xs = np.linspace(0.0, a.x_max, a.n) if a.x is None else np.array(a.x, dtype=float)
    theta = a.theta
    cols = [xs, s.W(xs), s.W(xs, 1), s.W(xs, 2), s.Z(xs), s.Zbar(xs), s.Z(xs, theta)]
    write_csv(["x", "W", "Wp", "Wpp", "Z", "Zbar", "Ztheta"], zip(*cols), a.out)


# ---------------------------------------------------------------- law

def _need(a, *names):
    for n in names:
        if getattr(a, n) is None:
            raise UsageError(f"this law needs --{n.replace('_', '-')}")


def _law_value(name, s, a, x):
    th, vt = a.theta or 0.0, a.vartheta or 0.0
    b = a.b
    if name == "two-sided-exit":
        _need(a, "b")
        return pl.two_sided_exit_up(s, x, b)
    if name == "ruin-transform":
        return pl.gerber_shiu_exit(s, x, math.inf if b is None else b, pl.ABSORB, th)
    if name == "reflected-ruin-transform":
        _need(a, "b")
        return pl.gerber_shiu_exit(s, x, b, pl.REFLECT, th)
    if name == "hitting-time":
        return pl.hitting_time_transform(s, x)
    if name == "exit-time":
        _need(a, "b")
        return pl.exit_time_transform(s, x, b)
    if name == "capital-injections":
        _need(a, "b")
        return pl.capital_injection_transform(s, x, b, th if th > 0 else math.inf)
    if name == "dividends":
        _need(a, "b")
        return pl.expected_dividends(s, x, b)
    if name == "dividends-infinite":
        _need(a, "b")
        return pl.expected_dividends(s, x, b, "infinite")
    if name == "bailouts":
        _need(a, "b")
        return pl.expected_bailouts(s, x, b)
    if name == "bailouts-infinite":
        _need(a, "b")
        return pl.expected_bailouts(s, x, b, "infinite")
    if name == "dividends-penalty":
        _need(a, "b")
        return pl.dividends_penalty_transform(s, x, b, th, vt)
    if name == "dividends-bailouts":
        _need(a, "b")
        return pl.joint_dividends_bailouts(s, x, b, th, vt)
    if name == "drawdown":
        _need(a, "d")
        return pl.drawdown_deficit(s, a.d, th, variant="no_recovery")
    if name == "parisian-survival":
        _need(a, "r")
        return po.parisian_survival(s, x, a.r)
    if name == "expected-ruin-time":
        variant = "negative_drift" if s.profit < 0 else "positive_drift"
        if b is not None:
            variant = "reflected"
        return pl.expected_ruin_time(s, x, variant, b)
    raise UsageError(f"unknown law {name!r}")


LAWS = ["two-sided-exit", "ruin-transform", "reflected-ruin-transform", "hitting-time", "exit-time",
        "capital-injections", "dividends", "dividends-infinite", "bailouts", "bailouts-infinite",
        "dividends-penalty", "dividends-bailouts", "drawdown", "parisian-survival",
        "expected-ruin-time"]


def cmd_law(a):
    s = build(load_model(a.model), a.delta, a.backend)
    if a.csv:
        top = a.b if a.b is not None else a.x_max
        xs = np.linspace(0.0, top, a.n)
        vals = np.asarray(_law_value(a.law, s, a, xs), dtype=float) * np.ones_like(xs)
        write_csv(["x", "value"], zip(xs, vals), a.out)
        return
    _need(a, "x")
    print(fmt(_law_value(a.law, s, a, a.x)))


# ---------------------------------------------------------------- omega

def cmd_omega(a):
    model = load_model(a.model)
    text = a.steps
    if not text.lstrip().startswith("["):
        try:
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read steps: {exc}") from None
    try:
        spec = po.OmegaSpec.from_json(text, h=a.h, x_max=a.x_max)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"bad step spec: {exc}") from None
    res = po.omega_scales(build(model, 0.0, "rational"), spec)
    write_csv(["x", "omega", "W_omega", "Z_omega"], zip(res.grid, res.omega, res.W, res.Z), a.out)


# ---------------------------------------------------------------- optimize / figure

def make_objective(tag, p):
    tag = tag.lower().replace("_", "-")
    if tag == "definetti":
        return DeFinetti()
    if tag == "definetti-penalty":
        return DeFinettiPenalty(K=p.get("K", 0.0), k=p.get("k", 0.0))
    if tag == "slg":
        return SLG(p.get("k", 1.0))
    if tag == "dividends-penalty":
        return DividendsPenalty(p.get("theta", 0.0), p.get("vartheta", 0.0))
    if tag == "dividends-time":
        return DividendsTime(p.get("vartheta", 0.0))
    if tag == "taxed":
        return TaxedDrawdown(p.get("xi", 0.0), p.get("d", 0.0), p.get("gamma", 1.0))
    raise UsageError(f"unknown objective {tag!r}")


def cmd_optimize(a):
    s = build(load_model(a.model), a.delta, a.backend)
    obj = make_objective(a.objective, parse_params(a.params))
    res = optimize_barrier(obj, s, a.b_max, a.step)
    print(f"b_star={fmt(res.b_star)}")
    print(f"H_b_star={fmt(res.h_star)}")
    print(f"multimodal={str(res.multimodal).lower()}")
    for b, h in res.local_optima:
        print(f"local_max b={fmt(b)} H={fmt(h)}")


PRESETS = {
    "azcue-hd": lambda a: DeFinetti(),
    "azcue-hdp": lambda a: DividendsPenalty(-0.01 if a.theta is None else a.theta,
                                            1.0 if a.vartheta is None else a.vartheta),
    "azcue-hdt": lambda a: DividendsTime(0.5 if a.vartheta is None else a.vartheta),
}


def cmd_figure(a):
    if a.preset not in PRESETS:
        raise UsageError(f"unknown preset {a.preset!r}")
    if a.n < 400:
        raise UsageError("--n must be >= 400")
    s = build(azcue_muler(a.sigma), 0.1, "rational")
    obj = PRESETS[a.preset](a)
    b_max = default_scan(s)[0] if a.b_max is None else a.b_max
    bs = np.linspace(0.0, b_max, a.n)
    write_csv(["b", "H"], zip(bs, obj.H(s, bs)), a.out)


# ---------------------------------------------------------------- simulate

def _dynamics(a):
    kind = a.dynamics
    if kind == "free":
        return mc.Free()
    if kind == "reflect-below0":
        return mc.ReflectBelow0()
    if kind in ("reflect-at", "doubly"):
        _need(a, "b")
        return mc.ReflectAt(a.b) if kind == "reflect-at" else mc.DoublyReflect(a.b)
    if kind == "taxed":
        _need(a, "gamma")
        return mc.Taxed(a.gamma, a.b_start)
    if kind == "parisian":
        _need(a, "r")
        return mc.ParisianObserved(a.r)
    raise UsageError(f"unknown dynamics {kind!r}")


def _functional(a):
    d, th, vt = a.delta, a.theta or 0.0, a.vartheta or 0.0
    f = a.functional
    if f == "ruin-prob":
        return mc.RuinProb()
    if f == "exit-up":
        _need(a, "b")
        return mc.KilledExitUp(d, a.b)
    if f == "ruin-transform":
        return mc.RuinTransform(d, th, math.inf if a.b is None or a.dynamics == "reflect-at" else a.b)
    if f == "dividends":
        _need(a, "b")
        return mc.DiscountedDividends(d, a.b)
    if f == "injections":
        _need(a, "b")
        return mc.DiscountedInjections(d, a.b)
    if f == "injection-transform":
        _need(a, "b")
        return mc.InjectionTransform(d, a.b, th)
    if f == "occupation":
        _need(a, "r")
        return mc.OccupationBelow0LT(a.r, d)
    if f == "drawdown":
        _need(a, "d")
        return mc.DrawdownDeficit(d, a.d, th)
    if f == "taxed-exit":
        _need(a, "a", "d", "gamma")
        return mc.TaxedExit(d, a.a, a.xi or 0.0, a.d, a.gamma)
    raise UsageError(f"unknown functional {f!r}")


def _analytic(model, dyn, fn, x):
    """Matching closed-form value, or None."""
    from .dividends import taxed_drawdown_exit

    d = getattr(fn, "delta", 0.0)
    s = build(model, d, "rational")
    if isinstance(fn, mc.RuinProb):
        if isinstance(dyn, mc.ParisianObserved):
            return 1.0 - float(po.parisian_survival(s, x, dyn.r))
        if isinstance(dyn, mc.Free) and s.profit > 0:
            return 1.0 - s.profit * float(s.W(x))
        return None
    if isinstance(fn, mc.KilledExitUp):
        if isinstance(dyn, mc.Free):
            return float(pl.two_sided_exit_up(s, x, fn.b))
        return float(s.Z(x) / s.Z(fn.b))
    if isinstance(fn, mc.RuinTransform):
        if isinstance(dyn, mc.ReflectAt):
            return float(pl.gerber_shiu_exit(s, x, dyn.b, pl.REFLECT, fn.theta))
        return float(pl.gerber_shiu_exit(s, x, fn.b, pl.ABSORB, fn.theta))
    if isinstance(fn, mc.DiscountedDividends):
        horizon = "infinite" if isinstance(dyn, mc.DoublyReflect) else "until_ruin"
        return float(pl.expected_dividends(s, x, fn.b, horizon))
    if isinstance(fn, mc.DiscountedInjections):
        horizon = "infinite" if isinstance(dyn, mc.DoublyReflect) else "until_tau_b"
        return float(pl.expected_bailouts(s, x, fn.b, horizon))
    if isinstance(fn, mc.InjectionTransform):
        if fn.theta == 0:
            return float(s.Z(x) / s.Z(fn.b))
        return float(pl.capital_injection_transform(s, x, fn.b, fn.theta))
    if isinstance(fn, mc.OccupationBelow0LT):
        if x != 0:
            return None
        return d * model.phi(d + fn.r) / ((d + fn.r) * model.phi(d))
    if isinstance(fn, mc.DrawdownDeficit):
        return float(s.delta_zw(fn.d, fn.theta) / s.W(fn.d, 1))
    if isinstance(fn, mc.TaxedExit):
        return float(taxed_drawdown_exit(s, x, fn.a, fn.xi, fn.d, fn.gamma))
    return None


def cmd_simulate(a):
    model = load_model(a.model)
    cfg = mc.SimConfig(n_paths=a.paths, seed=a.seed, dt=a.dt, horizon=a.horizon, antithetic=a.antithetic)
    dyn, fn = _dynamics(a), _functional(a)
    est = mc.estimate(mc.simulate(model, cfg, dyn, a.x), fn)
    print(f"mean={fmt(est.mean)}")
    print(f"std_error={fmt(est.std_error)}")
    print(f"band=[{fmt(est.mean - 3 * est.std_error)}, {fmt(est.mean + 3 * est.std_error)}]")
    val = _analytic(model, dyn, fn, a.x)
    if val is not None:
        print(f"analytic={fmt(val)}")
        print(f"within_3se={str(est.within(val)).lower()}")


# ---------------------------------------------------------------- parser

def _common(p, delta=True):
    p.add_argument("--model", required=True, help="inline JSON, JSON file, or azcue-muler:<sigma>")
    if delta:
        p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--backend", default="rational", choices=["rational", "series", "inversion"])
    p.add_argument("--out")


def build_parser():
    ap = argparse.ArgumentParser(prog="scalekit", description="Scale functions of spectrally negative Levy processes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="W, Z and relatives on a grid")
    _common(p)
    p.add_argument("--x", type=float, nargs="+")
    p.add_argument("--x-max", type=float, default=5.0)
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--theta", type=float, default=0.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("law", help="first-passage and dividend laws")
    _common(p)
    p.add_argument("--law", required=True, choices=LAWS)
    for name in ("x", "b", "theta", "vartheta", "r", "d"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--csv", action="store_true", help="sweep x over [0, b]")
    p.add_argument("--x-max", type=float, default=5.0)
    p.add_argument("--n", type=int, default=101)
    p.set_defaults(func=cmd_law)

    p = sub.add_parser("omega", help="omega-scale functions for a step killing rate")
    p.add_argument("--model", required=True)
    p.add_argument("--steps", required=True, help='JSON list [{"from":..,"to":..,"rate":..}] or file')
    p.add_argument("--h", type=float, default=1 / 512)
    p.add_argument("--x-max", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("optimize", help="optimal dividend barrier")
    _common(p)
    p.add_argument("--objective", required=True)
    p.add_argument("--params", default="")
    p.add_argument("--b-max", type=float)
    p.add_argument("--step", type=float)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("figure", help="barrier-function curves for the Erlang(2,1) example")
    p.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p.add_argument("--sigma", type=float, default=1.4)
    p.add_argument("--theta", type=float)
    p.add_argument("--vartheta", type=float)
    p.add_argument("--b-max", type=float)
    p.add_argument("--n", type=int, default=801)
    p.add_argument("--out")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of a functional")
    p.add_argument("--model", required=True)
    p.add_argument("--dynamics", default="free",
                   choices=["free", "reflect-below0", "reflect-at", "doubly", "taxed", "parisian"])
    p.add_argument("--functional", required=True,
                   choices=["ruin-prob", "exit-up", "ruin-transform", "dividends", "injections",
                            "injection-transform", "occupation", "drawdown", "taxed-exit"])
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    for name in ("b", "theta", "vartheta", "r", "d", "a", "xi", "gamma"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--b-start", type=float, default=0.0)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float)
    p.add_argument("--antithetic", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None):
    """Run the CLI and return the exit status."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    return 0


run = main


if __name__ == "__main__":
    sys.exit(main())
