"""Command-line front end.

Config and state files are flat ``key = value`` text; ``#`` starts a comment and
blank lines are ignored. Exit codes: 0 success, 1 a verification check failed,
2 the input could not be parsed, 3 the input parses but describes an invalid
state or scenario.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, dephasing, measures, oracles, radiative
from .errors import InvalidStateError, ValidationError, XDiscordError
from .states import XState, from_bell_diagonal, random_xstate, validate

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3

STATE_KEYS = ("rho11", "rho22", "rho33", "rho44", "re14", "im14", "re23", "im23")
BELL_KEYS = ("c1", "c2", "c3")
DEPHASING_KEYS = ("c1", "c2", "c3", "v1", "v2", "s", "lambda", "omega", "beta",
                  "t_max", "n_steps", "eps_flat", "window")
RADIATIVE_KEYS = ("gamma_ratio", "k0r", "mu_dot_rhat", "tau_max", "n_steps", "eps_zero")
DEFAULT_POINTS = 400

DEPHASING_COLUMNS = ("t", "gamma_t", "lqu", "d_t", "conc")
RADIATIVE_COLUMNS = ("tau", "a", "b", "c", "lqu", "d_t", "conc")

_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ConfigParseError(XDiscordError):
    def __init__(self, path: str, line: int, column: int, message: str):
        where = f"{path}:{line}:{column}" if line else path
        super().__init__(f"{where}: {message}")
        self.line, self.column = line, column


@dataclass(frozen=True)
class Entry:
    value: str
    line: int
    column: int  # column of the value


def parse_kv(text: str, path: str = "<input>") -> dict[str, Entry]:
    """Parse ``key = value`` lines into {key: Entry}; values stay strings."""
    out: dict[str, Entry] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ConfigParseError(path, lineno, col, "expected 'key = value'")
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if not _KEY_RE.fullmatch(key):
            raise ConfigParseError(path, lineno, key_col, f"malformed key {key!r}")
        value = value_part.strip()
        value_col = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        if not value:
            raise ConfigParseError(path, lineno, value_col, f"missing value for {key!r}")
        if key in out:
            raise ConfigParseError(path, lineno, key_col, f"duplicate key {key!r}")
        out[key] = Entry(value, lineno, value_col)
    return out


def _check_keys(entries: dict[str, Entry], allowed, path: str) -> None:
    for key, e in entries.items():
        if key not in allowed:
            raise ConfigParseError(path, e.line, 1, f"unknown key {key!r}")


def _float(entries: dict[str, Entry], key: str, path: str, default=None,
           allow_inf: bool = False) -> float:
    e = entries.get(key)
    if e is None:
        if default is None:
            raise ConfigParseError(path, 0, 0, f"missing required key {key!r}")
        return default
    try:
        v = float(e.value)
    except ValueError:
        raise ConfigParseError(path, e.line, e.column, f"{key}: {e.value!r} is not a number") from None
    if math.isnan(v) or (math.isinf(v) and not (allow_inf and v > 0)):
        raise ConfigParseError(path, e.line, e.column, f"{key}: {e.value!r} is not a finite number")
    return v


def _int(entries: dict[str, Entry], key: str, path: str, default: int) -> int:
    e = entries.get(key)
    if e is None:
        return default
    try:
        return int(e.value)
    except ValueError:
        raise ConfigParseError(path, e.line, e.column, f"{key}: {e.value!r} is not an integer") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigParseError(path, 0, 0, f"cannot read file: {exc.strerror}") from None


def load_state(path: str) -> tuple[XState, dict]:
    entries = parse_kv(_read(path), path)
    _check_keys(entries, STATE_KEYS + BELL_KEYS, path)
    state_keys = [k for k in entries if k in STATE_KEYS]
    bell_keys = [k for k in entries if k in BELL_KEYS]
    if state_keys and bell_keys:
        e = entries[bell_keys[0]] if entries[bell_keys[0]].line > entries[state_keys[0]].line else entries[state_keys[0]]
        raise ConfigParseError(path, e.line, 1, "cannot mix rho/re/im keys with c1, c2, c3")
    if bell_keys:
        c = [_float(entries, k, path) for k in BELL_KEYS]
        return from_bell_diagonal(*c), dict(zip(BELL_KEYS, c))
    if not state_keys:
        raise ConfigParseError(path, 0, 0, "no state keys found")
    vals = {k: _float(entries, k, path, default=0.0 if k.startswith(("re", "im")) else None)
            for k in STATE_KEYS}
    x = XState(vals["rho11"], vals["rho22"], vals["rho33"], vals["rho44"],
               complex(vals["re14"], vals["im14"]), complex(vals["re23"], vals["im23"]))
    return validate(x), vals


# --- output helpers ---------------------------------------------------------------

def _num(v: float) -> str:
    return repr(float(v))


def write_csv(path: Path, columns, rows) -> None:
    lines = [",".join(columns)]
    lines += [",".join(_num(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n")


def _json_float(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else str(v)


def _grid(t_max: float, n_steps: int) -> np.ndarray:
    if n_steps < 1:
        raise ValidationError("n_steps must be at least 1")
    if t_max < 0:
        raise ValidationError("the time span must be non-negative")
    if n_steps == 1 or t_max == 0:
        return np.array([0.0])
    return np.linspace(0.0, t_max, n_steps)


# --- commands ---------------------------------------------------------------------

def cmd_measures(args) -> int:
    x, source = load_state(args.state)
    m = measures.measure_set(x)
    print(f"lqu  = {m.lqu:.12g}")
    print(f"d_t  = {m.trace_discord:.12g}")
    print(f"conc = {m.concurrence:.12g}")
    if args.json:
        write_json(Path(args.json), {
            "scenario": {"state": source},
            "measures": {"lqu": m.lqu, "d_t": m.trace_discord, "conc": m.concurrence},
            "events": [],
            "warnings": [],
        })
    return EXIT_OK


def load_dephasing(path: str):
    entries = parse_kv(_read(path), path)
    _check_keys(entries, DEPHASING_KEYS, path)
    omega = _float(entries, "omega", path, default=1.0)
    cfg = {
        "c1": _float(entries, "c1", path), "c2": _float(entries, "c2", path),
        "c3": _float(entries, "c3", path),
        "s": _float(entries, "s", path), "lambda": _float(entries, "lambda", path),
        "omega": omega, "beta": _float(entries, "beta", path, default=math.inf, allow_inf=True),
        "v1": _float(entries, "v1", path, default=omega), "v2": _float(entries, "v2", path, default=omega),
        "t_max": _float(entries, "t_max", path, default=10.0 / omega),
        "n_steps": _int(entries, "n_steps", path, DEFAULT_POINTS),
        "eps_flat": _float(entries, "eps_flat", path, default=-1.0),
        "window": _int(entries, "window", path, 5),
    }
    res = dephasing.ReservoirSpec(cfg["s"], cfg["lambda"], omega, cfg["beta"])
    sc = dephasing.DephasingScenario(cfg["c1"], cfg["c2"], cfg["c3"], res, cfg["v1"], cfg["v2"])
    times = _grid(cfg["t_max"], cfg["n_steps"])
    return cfg, sc, times


def cmd_dephasing_sweep(args) -> int:
    cfg, sc, times = load_dephasing(args.config)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        trace = analysis.dephasing_trace(sc, times)
        eps_flat = None if cfg["eps_flat"] < 0 else cfg["eps_flat"]
        events = analysis.dephasing_features(trace, eps_flat, cfg["window"]) if len(times) > 1 else []
        t_star = analysis.crossing_time(sc.c1, sc.c3, sc.reservoir)
    rows = zip(times, trace.extra["gamma_t"], trace.lqu, trace.d_t, trace.conc)
    prefix = Path(args.out)
    write_csv(prefix.with_name(prefix.name + ".csv"), DEPHASING_COLUMNS, rows)
    scenario = {k: _json_float(v) if isinstance(v, float) else v for k, v in cfg.items()
                if k not in ("eps_flat",)}
    scenario["model"] = "dephasing"
    scenario["regime"] = sc.reservoir.regime
    scenario["crossing_time"] = _json_float(t_star)
    write_json(prefix.with_name(prefix.name + ".json"), {
        "scenario": scenario,
        "events": [e.as_dict() for e in events],
        "warnings": sorted({str(w.message) for w in caught}),
    })
    return EXIT_OK


def load_radiative(path: str):
    entries = parse_kv(_read(path), path)
    _check_keys(entries, RADIATIVE_KEYS, path)
    has_ratio = "gamma_ratio" in entries
    has_geom = "k0r" in entries or "mu_dot_rhat" in entries
    if has_ratio and has_geom:
        e = entries["k0r"] if "k0r" in entries else entries["mu_dot_rhat"]
        raise ConfigParseError(path, e.line, 1, "gamma_ratio and k0r/mu_dot_rhat are mutually exclusive")
    cfg = {}
    if has_ratio:
        g = _float(entries, "gamma_ratio", path)
        cfg["gamma_ratio"] = g
    elif has_geom:
        geom = radiative.AtomPairGeometry(_float(entries, "k0r", path),
                                          _float(entries, "mu_dot_rhat", path, default=0.0))
        g = radiative.coupling_gamma12(geom)
        cfg.update(k0r=geom.k0r, mu_dot_rhat=geom.mu_dot_rhat, gamma_ratio=g,
                   omega12=radiative.coupling_omega12(geom))
    else:
        raise ConfigParseError(path, 0, 0, "need gamma_ratio or k0r (with optional mu_dot_rhat)")
    if not -1.0 <= g <= 1.0:
        raise ValidationError(f"gamma_ratio must lie in [-1, 1], got {g!r}")
    cfg["tau_max"] = _float(entries, "tau_max", path, default=5.0)
    cfg["n_steps"] = _int(entries, "n_steps", path, DEFAULT_POINTS)
    cfg["eps_zero"] = _float(entries, "eps_zero", path, default=analysis.EPS_ZERO)
    return cfg, _grid(cfg["tau_max"], cfg["n_steps"])


def cmd_radiative_sweep(args) -> int:
    cfg, taus = load_radiative(args.config)
    g = cfg["gamma_ratio"]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        trace = analysis.radiative_trace(taus, g)
        events = analysis.radiative_features(trace, cfg["eps_zero"])
    ex = trace.extra
    rows = zip(taus, ex["a"], ex["b"], ex["c"], trace.lqu, trace.d_t, trace.conc)
    prefix = Path(args.out)
    write_csv(prefix.with_name(prefix.name + ".csv"), RADIATIVE_COLUMNS, rows)
    births = {m: analysis.first_time(events, "birth", m) for m in analysis.MEASURES}
    conc_b = births["conc"]
    others = [b for k, b in births.items() if k != "conc" and b is not None]
    delayed = None
    if others:
        # a concurrence that is never born within the window counts as delayed
        delayed = conc_b is None or all(conc_b > b for b in others)
    scenario = {k: _json_float(v) if isinstance(v, float) else v for k, v in cfg.items()}
    scenario["model"] = "radiative"
    write_json(prefix.with_name(prefix.name + ".json"), {
        "scenario": scenario,
        "events": [e.as_dict() for e in events],
        "birth_times": {k: _json_float(v) for k, v in births.items()},
        "concurrence_birth_delayed": delayed,
        "warnings": sorted({str(w.message) for w in caught}),
    })
    return EXIT_OK


# --- verification -----------------------------------------------------------------

def _check(name: str, deviation: float, tolerance: float, note: str = "", passed=None) -> dict:
    ok = bool(deviation <= tolerance) if passed is None else bool(passed)
    return {"name": name, "max_deviation": _json_float(deviation), "tolerance": tolerance,
            "passed": ok, "note": note}


def run_verify(seed: int = 0, restarts: int = 50, battery: int = 100, *,
               denominator: radiative.Denominator = "1-gamma^2") -> list[dict]:
    """Run every oracle battery; ``denominator`` selects the b, c convention under test."""
    rival = "1-gamma" if denominator == "1-gamma^2" else "1-gamma^2"
    rng = np.random.default_rng(seed)
    checks = []

    states = [random_xstate(rng) for _ in range(battery)]
    dev = max((abs(measures.lqu(x) - oracles.lqu_bruteforce(x)) for x in states), default=0.0)
    checks.append(_check("lqu_closed_vs_bruteforce", dev, 1e-6, f"{battery} random X states"))

    n_td = max(1, battery // 10)
    worst_gap, worst_below = 0.0, 0.0
    for i, x in enumerate(states[:n_td]):
        bf = oracles.trace_discord_bruteforce(x, restarts, seed=seed + i).value
        cf = measures.trace_discord(x)
        worst_gap = max(worst_gap, bf - cf)
        worst_below = max(worst_below, cf - bf)
    checks.append(_check("trace_discord_closed_vs_bruteforce", worst_gap, 1e-3,
                         f"{n_td} random X states, {restarts} restarts; closed form exceeds "
                         f"search by at most {worst_below:.3e}",
                         passed=worst_gap < 1e-3 and worst_below <= 1e-9))

    worst = 0.0
    minus_ok = True
    for s in (0.5, 1.0, 1.5):
        for beta in (1.0, math.inf):
            r = dephasing.ReservoirSpec(s, 0.1, 1.0, beta)
            for t in np.linspace(0.0, 20.0, 50):
                gi = dephasing.gamma_integral(r, float(t))
                gc = dephasing.gamma_closed(r, float(t))
                if gi > 0:
                    worst = max(worst, abs(gc - gi) / gi)
                if s < 1 and gi > 0:
                    gm = dephasing.gamma_closed(r, float(t), subohmic_variant="minus")
                    if not (math.isfinite(gm) and abs(gm - gi) <= 1e-6 * gi):
                        minus_ok = False
    checks.append(_check("gamma_closed_vs_quadrature", worst, 1e-6,
                         "sub-Ohmic vacuum term uses (1 + Omega^2 t^2); s in {0.5,1,1.5}, "
                         "Omega beta in {1, inf}, 50 times in [0, 20]"))
    checks.append(_check("subohmic_minus_variant_rejected", 0.0, 0.0,
                         "the (1 - Omega^2 t^2) reading fails the quadrature check",
                         passed=not minus_ok))

    worst, worst_loser = 0.0, 0.0
    for g in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0 - 1e-8):
        taus, rhos = radiative.integrate_master_equation(g, 5.0, 1e-3, sample_every=10)
        for tau, rho in zip(taus, rhos):
            num = np.array([rho[0, 0].real, rho[1, 1].real, rho[1, 2].real])
            worst = max(worst, float(np.max(np.abs(np.array(radiative.abc(tau, g, denominator)) - num))))
            loser = np.array(radiative.abc(tau, g, rival))
            worst_loser = max(worst_loser, float(np.max(np.abs(loser - num))))
    checks.append(_check("radiative_abc_vs_master_equation", worst, 1e-6,
                         f"denominator {denominator}; six gamma values, tau in [0, 5]"))
    checks.append(_check("radiative_rival_denominator_rejected", worst_loser, 1e-6,
                         f"the {rival} denominator must disagree with the master equation",
                         passed=worst_loser > 1e-3))

    worst = 0.0
    n_bd = 0
    while n_bd < 10 * battery:
        c = rng.uniform(-1.0, 1.0, size=3)
        try:
            x = from_bell_diagonal(*c)
        except InvalidStateError:
            continue
        n_bd += 1
        worst = max(worst, abs(measures.trace_discord(x) - measures.trace_discord_bell_diagonal(*c)))
    checks.append(_check("bell_diagonal_reduction", worst, 1e-12, f"{n_bd} random Bell-diagonal states"))
    return checks


def cmd_verify(args) -> int:
    start = time.perf_counter()
    checks = run_verify(args.seed, args.restarts, args.battery)
    failed = [c["name"] for c in checks if not c["passed"]]
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"{status}  {c['name']}  max_deviation={c['max_deviation']}  tol={c['tolerance']}")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed in {time.perf_counter() - start:.1f} s")
    if args.json:
        write_json(Path(args.json), {
            "scenario": {"command": "verify", "seed": args.seed, "restarts": args.restarts,
                         "battery": args.battery},
            "events": [],
            "warnings": [],
            "checks": checks,
        })
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="xdiscord",
        description="Quantum correlations (LQU, trace discord, concurrence) of two-qubit X states.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            "files are 'key = value' lines, '#' comments\n"
            "exit codes: 0 ok, 1 verification failed, 2 parse error, 3 invalid state"),
    )
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measures", help="measures of a single state",
                       description="State keys: rho11 rho22 rho33 rho44 re14 im14 re23 im23, "
                                   "or c1 c2 c3 for a Bell-diagonal state.")
    m.add_argument("--state", required=True, metavar="FILE")
    m.add_argument("--json", metavar="FILE")
    m.set_defaults(func=cmd_measures)

    d = sub.add_parser("dephasing-sweep", help="time sweep of the dephasing model",
                       description="Config keys: c1 c2 c3 s lambda [omega=1] [beta=inf] "
                                   "[v1=v2=omega] [t_max=10/omega] [n_steps=400] [eps_flat] [window=5]. "
                                   "Writes PREFIX.csv with columns t,gamma_t,lqu,d_t,conc and PREFIX.json.")
    d.add_argument("--config", required=True, metavar="FILE")
    d.add_argument("--out", required=True, metavar="PREFIX")
    d.set_defaults(func=cmd_dephasing_sweep)

    r = sub.add_parser("radiative-sweep", help="time sweep of the collective-decay model",
                       description="Config keys: gamma_ratio, or k0r [mu_dot_rhat=0]; "
                                   "[tau_max=5] [n_steps=400] [eps_zero=1e-4]. Writes PREFIX.csv "
                                   "with columns tau,a,b,c,lqu,d_t,conc and PREFIX.json.")
    r.add_argument("--config", required=True, metavar="FILE")
    r.add_argument("--out", required=True, metavar="PREFIX")
    r.set_defaults(func=cmd_radiative_sweep)

    v = sub.add_parser("verify", help="run the oracle batteries",
                       description="LQU battery uses N states, trace-discord battery N/10, "
                                   "Bell-diagonal battery 10N.")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--restarts", type=int, default=50)
    v.add_argument("--battery", type=int, default=100, metavar="N")
    v.add_argument("--json", metavar="FILE")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidStateError as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
