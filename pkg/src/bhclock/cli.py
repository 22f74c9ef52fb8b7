"""Command-line harness: ``bhclock <command> [--config FILE] [-p key=value ...]``.

Exit codes: 0 when every check passes, 1 for configuration errors, 2 for
numerical failures (a violated tolerance or a solver error).
"""

import argparse
import configparser
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import coherent, horizon, paw, su11, thermal
from .errors import BHClockError, NumericalError, TruncationError
from .io import matrix_rows, write_csv, write_json

COMMANDS = ("algebra-check", "crossover-scan", "thermal", "isotherm", "geodesic-compare", "paw-demo")


class ConfigError(Exception):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


# --------------------------------------------------------------------------
# Value parsers
# --------------------------------------------------------------------------

def _float(s):
    x = float(s)
    if not math.isfinite(x):
        raise ValueError("must be finite")
    return x


def _int(s):
    return int(str(s).strip())


def _complex(s):
    s = str(s).strip().replace(" ", "").replace("i", "j")
    return complex(s)


def _floats(s):
    vals = [_float(x) for x in str(s).split(",") if x.strip()]
    if not vals:
        raise ValueError("empty list")
    return vals


def _bool(s):
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _positive(x):
    if not x > 0:
        raise ValueError("must be > 0")


def _disk(x):
    if not abs(x) < 1:
        raise ValueError(f"|xi| = {abs(x):g} is outside the open unit disk")


def _bargmann(x):
    if not x >= 0.5:
        raise ValueError("Bargmann index must be >= 1/2")


def _bargmann_list(xs):
    for x in xs:
        _bargmann(x)


def _at_least(n):
    def check(x):
        if x < n:
            raise ValueError(f"must be >= {n}")
    return check


def _ascending(xs):
    _bargmann_list(xs)
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("must be strictly ascending")


def _near_horizon_ratio(x):
    if not 0 < x <= 0.1:
        raise ValueError("must lie in (0, 0.1]")


# key -> (parser, default, validator)
SCHEMAS = {
    "algebra-check": {
        "K": (_floats, "0.5,1,2.5,10", _bargmann_list),
        "cutoff": (_int, "60", _at_least(2)),
        "J": (_float, "1.0", _positive),
        "dump_matrices": (_bool, "false", None),
    },
    "crossover-scan": {
        "xi1": (_complex, "0", _disk),
        "xi2": (_complex, "0.6", _disk),
        "K": (_floats, "1,2,4,8,16,32", _ascending),
        "xi": (_complex, "0.4+0.1j", _disk),
        "J": (_float, "1.0", _positive),
        "n_random": (_int, "20", _at_least(0)),
    },
    "thermal": {
        "xi": (_complex, "0.5", _disk),
        "J": (_float, "1.0", _positive),
        "N_xi": (_int, "1", _at_least(1)),
        "n_cut": (_int, "60", _at_least(2)),
    },
    "isotherm": {
        "J": (_float, "1.0", _positive),
        "N_xi": (_int, "1", _at_least(1)),
        "M": (_float, "1.0", _positive),
        "T": (_float, "0", None),
        "angles": (_floats, "0,30,60,90,120,150,180,210,240,270,300,330", None),
    },
    "geodesic-compare": {
        "M": (_float, "1.0", _positive),
        "m": (_float, "1.0", _positive),
        "q0_ratio": (_float, "1e-3", _near_horizon_ratio),
        "steps": (_int, "4000", _at_least(10)),
    },
    "paw-demo": {
        "K": (_float, "0.5", _bargmann),
        "d_xi": (_int, "80", _at_least(3)),
        "J": (_float, "1.0", _positive),
        "d_gamma": (_int, "2", _at_least(1)),
        "n_match": (_int, "-1", None),
        "E": (_float, "0", None),
        "t_max": (_float, "0.5", _positive),
        "n_t": (_int, "21", _at_least(2)),
        "m": (_float, "1.0", _positive),
        "a": (_float, "1.0", _positive),
        "threshold": (_float, "1e-8", _positive),
        "q_max": (_float, "3.0", _positive),
        "n_q": (_int, "31", _at_least(2)),
    },
}

COMMON_KEYS = {"command", "units", "seed", "out"}


@dataclass
class RunConfig:
    command: str
    params: dict
    units: str = "natural"
    seed: int = 0
    output_path: Path = Path("out")


@dataclass
class RunReport:
    command: str
    checks: list = field(default_factory=list)  # (name, value, limit, passed)
    artifacts: list = field(default_factory=list)
    wall_time: float = 0.0

    def check(self, name, value, limit, passed=None):
        if passed is None:
            passed = value is not None and value == value and value <= limit
        self.checks.append((name, value, limit, bool(passed)))

    @property
    def passed(self):
        return all(c[3] for c in self.checks)


def _read_config_file(path):
    text = Path(path).read_text(encoding="utf-8")
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    cp.read_string(text)
    values = {}
    for section in cp.sections():
        values.update(cp[section])
    return values


def parse_config(command=None, config_path=None, overrides=None, units=None, seed=None, out=None):
    """Merge file values and flag overrides into a validated :class:`RunConfig`.

    Raises
    ------
    ConfigError
        Naming the offending key, for unknown keys or invalid values.
    """
    raw = {}
    if config_path is not None:
        try:
            raw.update(_read_config_file(config_path))
        except (OSError, configparser.Error) as exc:
            raise ConfigError("config", str(exc)) from None
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    if units is not None:
        raw["units"] = units
    if seed is not None:
        raw["seed"] = str(seed)
    if out is not None:
        raw["out"] = out
    cmd = command or raw.get("command")
    if cmd not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}, got {cmd!r}")
    if command and raw.get("command", command) != command:
        raise ConfigError("command", f"file says {raw['command']!r} but {command!r} was requested")
    schema = SCHEMAS[cmd]
    for key in raw:
        if key not in schema and key not in COMMON_KEYS:
            raise ConfigError(key, f"unknown key for {cmd}")
    params = {}
    for key, (parse, default, validate) in schema.items():
        text = raw.get(key, default)
        try:
            value = parse(text)
            if validate is not None:
                validate(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(key, f"invalid value {text!r} ({exc})") from None
        params[key] = value
    u = raw.get("units", "natural")
    if u not in horizon.UNIT_SYSTEMS:
        raise ConfigError("units", f"must be natural or si, got {u!r}")
    try:
        s = _int(raw.get("seed", "0"))
    except ValueError:
        raise ConfigError("seed", "must be an integer") from None
    return RunConfig(cmd, params, u, s, Path(raw.get("out", "out")))


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def _run_algebra(cfg, rep_out):
    p = cfg.params
    rows = []
    for K in p["K"]:
        rep = su11.build_rep(K, p["cutoff"])
        H = su11.build_H_xi(rep, p["J"])
        comm = su11.commutator_residual(rep)
        cas = su11.casimir_interior_error(rep)
        herm = su11.hermiticity_residual(H.matrix)
        h00 = abs(H.matrix[0, 0] - H.J)
        rows.append((K, rep.cutoff, comm, cas, herm, h00))
        rep_out.check(f"commutator K={K:g}", comm, 1e-10)
        rep_out.check(f"casimir K={K:g}", cas, 1e-10)
        rep_out.check(f"hermiticity K={K:g}", herm, 1e-14)
        rep_out.check(f"<0|H|0>=J K={K:g}", h00, 1e-12)
        if p["dump_matrices"]:
            for name, mat in (("k0", rep.k0), ("kplus", rep.kplus), ("kminus", rep.kminus), ("H", H.matrix)):
                path = cfg.output_path / f"matrix_{name}_K{K:g}.csv"
                write_csv(path, ["row", "col", "re", "im"], matrix_rows(mat))
                rep_out.artifacts.append(path.name)
    path = cfg.output_path / "algebra.csv"
    write_csv(path, ["K", "cutoff", "commutator_residual", "casimir_error", "hermiticity", "h00_error"], rows)
    rep_out.artifacts.append(path.name)


def _run_crossover(cfg, rep_out):
    p = cfg.params
    rows = coherent.overlap_decay_scan(p["xi1"], p["xi2"], p["K"])
    path = cfg.output_path / "overlap_scan.csv"
    write_csv(path, ["K", "re_xi1", "im_xi1", "re_xi2", "im_xi2", "abs_overlap", "log_abs_overlap"],
              [(r.K, r.xi1.real, r.xi1.imag, r.xi2.real, r.xi2.imag, r.abs_overlap, r.log_abs_overlap)
               for r in rows])
    rep_out.artifacts.append(path.name)
    if len(rows) >= 2:
        slope, _, resid = coherent.fit_log_overlap(rows)
        rep_out.check("log-overlap fit residual", resid, 1e-10)
        rep_out.check("slope vs closed form", abs(slope - coherent.log_overlap_slope(p["xi1"], p["xi2"])), 1e-6)

    frows = coherent.energy_fluctuation_scan(p["xi"], p["J"], p["K"])
    path = cfg.output_path / "fluctuation_scan.csv"
    write_csv(path, ["K", "mean", "stddev", "ratio"], frows)
    rep_out.artifacts.append(path.name)
    classical = coherent.classical_energy(p["xi"], p["J"])
    rep_out.check("mean = J w", max(abs(r.mean - classical) for r in frows), 1e-8)
    by_k = {r.K: r for r in frows}
    for r in frows:
        if 4 * r.K in by_k:
            q = by_k[4 * r.K].ratio / r.ratio
            rep_out.check(f"ratio(4K)/ratio(K) K={r.K:g}", abs(q - 0.5) / 0.5, 0.05)

    if p["n_random"]:
        rng = np.random.default_rng(cfg.seed)
        rrows = []
        for _ in range(p["n_random"]):
            r = 0.95 * np.sqrt(rng.uniform(size=2))
            th = rng.uniform(0, 2 * np.pi, size=2)
            a, b = r * np.exp(1j * th)
            rrows.append((a.real, a.imag, b.real, b.imag, coherent.log_overlap_slope(a, b)))
        path = cfg.output_path / "random_slopes.csv"
        write_csv(path, ["re_xi1", "im_xi1", "re_xi2", "im_xi2", "slope"], rrows)
        rep_out.artifacts.append(path.name)
        rep_out.check("random pairs: slope < 0", max(r[-1] for r in rrows), 0.0, max(r[-1] for r in rrows) < 0)


def _run_thermal(cfg, rep_out):
    p = cfg.params
    tcfg = thermal.TwoModeConfig(N_xi=p["N_xi"], J=p["J"], n_cut=p["n_cut"])
    report = thermal.thermal_report(p["xi"], tcfg)
    state = thermal.two_mode_squeezed(p["xi"], tcfg)
    reduced = thermal.reduce_to_R(state)
    lam = abs(p["xi"]) ** 2
    geometric = float(np.max(np.abs(reduced.probs - (1 - lam) * lam ** np.arange(tcfg.n_cut + 1))))
    report["checks"] = {
        "reduced_state_geometric_error": geometric,
        "two_mode_energy_residual": thermal.two_mode_energy_check(p["xi"], tcfg),
    }
    rep_out.check("reduced state geometric", geometric, 1e-12)
    rep_out.check("two-mode energy = J w", report["checks"]["two_mode_energy_residual"], 1e-10)
    if report["status"] == "ok":
        split = thermal.energy_split_residual(p["xi"], tcfg)
        report["checks"]["energy_split_residual"] = split
        rep_out.check("energy split identity", split, 1e-12)
    path = cfg.output_path / "thermal.json"
    write_json(path, report)
    rep_out.artifacts.append(path.name)


def _run_isotherm(cfg, rep_out):
    p = cfg.params
    params = horizon.schwarzschild_params(p["M"], cfg.units)
    T_target = p["T"] if p["T"] > 0 else horizon.hawking_temperature(params)
    tcfg = thermal.TwoModeConfig(N_xi=p["N_xi"], J=p["J"], n_cut=2)
    pts = thermal.microstate_isotherm(T_target, tcfg, p["angles"])
    rows = [(pt.angle_deg,
             pt.xi.real if pt.xi is not None else math.nan,
             pt.xi.imag if pt.xi is not None else math.nan,
             pt.T, pt.residual, pt.status) for pt in pts]
    path = cfg.output_path / "isotherm.csv"
    write_csv(path, ["angle_deg", "re_xi", "im_xi", "T", "residual", "status"], rows)
    rep_out.artifacts.append(path.name)
    solved = [pt for pt in pts if pt.status == "ok"]
    if solved:
        worst = max(pt.residual / T_target for pt in solved)
        rep_out.check("isotherm relative residual", worst, 1e-10)
        rep_out.check("solutions inside disk", max(abs(pt.xi) for pt in solved), 1.0,
                      max(abs(pt.xi) for pt in solved) < 1.0)


def _run_geodesic(cfg, rep_out):
    p = cfg.params
    params = horizon.schwarzschild_params(p["M"], cfg.units)
    rows, traj = horizon.geodesic_comparison(params, p["m"], p["q0_ratio"], p["steps"])
    path = cfg.output_path / "trajectory.csv"
    write_csv(path, ["tau", "q", "p", "h"], traj.rows())
    rep_out.artifacts.append(path.name)
    path = cfg.output_path / "comparison.csv"
    write_csv(path, ["tau", "q_full", "q_approx", "rel_err"], rows)
    rep_out.artifacts.append(path.name)
    rep_out.check("near-horizon max rel_err", max(r.rel_err for r in rows), 0.01)
    rep_out.check("RK4 energy drift", traj.energy_drift, 1e-9)


def _run_paw(cfg, rep_out):
    p = cfg.params
    n_match = p["d_gamma"] if p["n_match"] < 0 else p["n_match"]
    E = p["E"] if p["E"] > 0 else p["J"]
    if p["d_gamma"] >= p["d_xi"]:
        raise ConfigError("d_gamma", "must be smaller than d_xi")
    if n_match > p["d_gamma"]:
        raise ConfigError("n_match", "cannot exceed d_gamma")
    report, psi, rep, sysm = paw.paw_demo(K=p["K"], d_xi=p["d_xi"], J=p["J"], d_gamma=p["d_gamma"],
                                          n_match=n_match, E=E, t_max=p["t_max"], n_t=p["n_t"])
    path = cfg.output_path / "paw.json"
    write_json(path, report)
    rep_out.artifacts.append(path.name)
    rep_out.check("kernel dim = matches", report["kernel_dim"], n_match, report["kernel_dim"] == n_match)
    rep_out.check("spectrum = Kronecker differences", report["spectrum_residual"], 1e-10)
    if psi is not None:
        rep_out.check("kernel residual", report["max_residual"], 1e-12)
        rep_out.check("conditional fidelity >= 0.99", report["min_fidelity"], 0.99,
                      report["min_fidelity"] >= 0.99)
        ts = np.linspace(-p["t_max"] / p["J"], p["t_max"] / p["J"], p["n_t"])
        qs = np.linspace(0.0, p["q_max"], p["n_q"])
        _, cells = paw.spacetime_support(psi, rep, sysm.H_gamma, ts, qs, p["threshold"],
                                         p["m"], p["a"], p["J"], E)
        path = cfg.output_path / "support.csv"
        write_csv(path, ["t", "q", "abs_z2", "marked"], cells)
        rep_out.artifacts.append(path.name)


RUNNERS = {
    "algebra-check": _run_algebra,
    "crossover-scan": _run_crossover,
    "thermal": _run_thermal,
    "isotherm": _run_isotherm,
    "geodesic-compare": _run_geodesic,
    "paw-demo": _run_paw,
}


def run(cfg):
    """Execute one command, write its artifacts and ``summary.json``."""
    report = RunReport(cfg.command)
    cfg.output_path.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    RUNNERS[cfg.command](cfg, report)
    report.wall_time = time.perf_counter() - t0
    summary = {
        "command": cfg.command,
        "units": cfg.units,
        "seed": cfg.seed,
        "params": {k: (list(v) if isinstance(v, list) else v) for k, v in cfg.params.items()},
        "checks": [{"name": n, "value": v, "limit": lim, "passed": ok} for n, v, lim, ok in report.checks],
        "passed": report.passed,
        "artifacts": sorted(report.artifacts),
    }
    write_json(cfg.output_path / "summary.json", summary)
    return report


def _print_report(report, stream):
    width = max([len(c[0]) for c in report.checks] + [10])
    print(f"{report.command}  ({report.wall_time:.3f} s)", file=stream)
    for name, value, limit, ok in report.checks:
        v = "n/a" if value is None else f"{value:.3e}" if isinstance(value, float) else str(value)
        print(f"  {'PASS' if ok else 'FAIL'}  {name:<{width}}  {v:>12}  (limit {limit})", file=stream)
    print(f"  artifacts: {', '.join(sorted(report.artifacts))}", file=stream)


def build_parser():
    ap = argparse.ArgumentParser(prog="bhclock", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS,
                    help="experiment to run (may also come from the config file)")
    ap.add_argument("--config", "-c", help="INI-style key = value file")
    ap.add_argument("-p", "--param", action="append", default=[], metavar="KEY=VALUE",
                    help="override a parameter; repeatable")
    ap.add_argument("--units", choices=sorted(horizon.UNIT_SYSTEMS))
    ap.add_argument("--out", help="output directory (default: out)")
    ap.add_argument("--seed", type=int)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.command, args.config, args.param, args.units, args.seed, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        report = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, TruncationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except BHClockError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    _print_report(report, sys.stdout)
    return 0 if report.passed else 2


if __name__ == "__main__":
    sys.exit(main())
