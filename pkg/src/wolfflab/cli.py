"""Batch front-end.

    wolfflab classify --n 3 --p 2 --q 5
    wolfflab verify-singular --config run.toml --format csv --out res.csv
    wolfflab sweep --config sweep.json --jobs 4

A config is one flat JSON or TOML document.  Keys (per command):

    all           command, n, p, q, a, beta, format, out, tol
    iterate       sequence ("nonexistence" | "bootstrap"), start, max_iter
    wolff         profile ("singular" | "bubble"), radii
    shoot         alpha, r_max, ode_tol
    verify-singular  radii
    pohozaev      profile ("bubble" | "shoot"), alpha, ss
    scaling       profile ("bubble" | "singular" | "shoot"), alpha, lambdas, theta, etas
    sweep         q_values (list or {start, stop, step}), max_iter, jobs

Command-line flags override config entries.  ``--tol`` is the relative
tolerance of whatever the command integrates (Wolff quadrature, ODE
solver) and the critical band for ``classify``.

Exit status: 0 ok, 2 assumption violation, 3 numerical failure,
4 config error, 5 invalid input for the command, 6 output not writable.
"""
from __future__ import annotations

import argparse
import concurrent.futures as cf
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AssumptionViolation, ConfigError, NumericalFailure, WolffLabError
from .exponents import nonexistence_sequence, slow_bootstrap
from .identities import energy_report, pohozaev_check, scaling_check
from .params import ProblemParams, classify_regime, derive_exponents, validate_params
from .profiles import BubbleProfile
from .radgeom import QuadratureConfig
from .shoot import pde_residual, shoot_radial, singular_profile
from .wolff import ratio_R, wolff_exponent

EXIT_OK = 0
EXIT_ASSUMPTION = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4
EXIT_INPUT = 5
EXIT_IO = 6

COMMANDS = ("classify", "iterate", "wolff", "shoot", "verify-singular", "pohozaev", "scaling", "sweep")
COMMON_KEYS = {"command", "n", "p", "q", "a", "beta", "format", "out", "tol"}
COMMAND_KEYS = {
    "classify": set(),
    "iterate": {"sequence", "start", "max_iter"},
    "wolff": {"profile", "radii"},
    "shoot": {"alpha", "r_max", "ode_tol"},
    "verify-singular": {"radii"},
    "pohozaev": {"profile", "alpha", "ss"},
    "scaling": {"profile", "alpha", "lambdas", "theta", "etas"},
    "sweep": {"q_values", "max_iter", "jobs"},
}
ALL_KEYS = COMMON_KEYS.union(*COMMAND_KEYS.values())


@dataclass
class RunConfig:
    command: str
    params: dict
    options: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"
    tol: float | None = None

    def to_mapping(self) -> dict:
        m = {"command": self.command}
        m.update(self.params)
        m.update(self.options)
        if self.out is not None:
            m["out"] = self.out
        if self.format != "json":
            m["format"] = self.format
        if self.tol is not None:
            m["tol"] = self.tol
        return m


def config_from_mapping(raw: dict, command: str | None = None) -> RunConfig:
    """Build a RunConfig, rejecting unknown keys and keys foreign to the command."""
    for key in raw:
        if key not in ALL_KEYS:
            raise ConfigError(key, f"unknown config key {key!r}")
    cmd = command or raw.get("command")
    if cmd is None:
        raise ConfigError("command", "no command given")
    if cmd not in COMMANDS:
        raise ConfigError("command", f"unknown command {cmd!r}")
    allowed = COMMON_KEYS | COMMAND_KEYS[cmd]
    for key in raw:
        if key not in allowed:
            raise ConfigError(key, f"key {key!r} does not apply to {cmd!r}")
    fmt = raw.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError("format", "format must be json or csv")
    tol = raw.get("tol")
    if tol is not None and not (isinstance(tol, (int, float)) and tol > 0):
        raise ConfigError("tol", "tol must be a positive number")
    params = {k: raw[k] for k in ("n", "p", "q", "a", "beta") if k in raw}
    options = {k: raw[k] for k in COMMAND_KEYS[cmd] if k in raw}
    return RunConfig(cmd, params, options, raw.get("out"), fmt, tol)


def _parse_text(text: str, suffix: str) -> dict:
    if suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib

        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("<file>", f"invalid TOML: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("<file>", "config must be a flat object")
    return data


def load_config(path, command: str | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
    return config_from_mapping(_parse_text(text, path.suffix.lower()), command)


def dump_config(cfg: RunConfig) -> str:
    """Canonical JSON text of a config; load_config(dump) reproduces it."""
    return json.dumps(cfg.to_mapping(), indent=2) + "\n"


def save_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(dump_config(cfg))


# ---------------------------------------------------------------- reports


@dataclass
class Report:
    data: dict
    columns: list
    rows: list

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.data), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    if hasattr(v, "value"):
        return v.value
    return v


def write_report(report: Report, cfg: RunConfig, stream=None) -> str:
    text = report.to_csv() if cfg.format == "csv" else report.to_json()
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        (stream or sys.stdout).write(text)
    return text


# ---------------------------------------------------------------- commands


def _params(cfg: RunConfig, *, allow_low_q=False) -> ProblemParams:
    return validate_params(cfg.params, allow_low_q=allow_low_q)


def _floats(cfg, key, default):
    val = cfg.options.get(key, default)
    if isinstance(val, (int, float)):
        val = [val]
    try:
        return [float(v) for v in val]
    except (TypeError, ValueError):
        raise ConfigError(key, f"{key} must be a number or a list of numbers") from None


def _number(cfg, key, default):
    val = cfg.options.get(key, default)
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ConfigError(key, f"{key} must be a number")
    return float(val)


def _choice(cfg, key, default, choices):
    val = cfg.options.get(key, default)
    if val not in choices:
        raise ConfigError(key, f"{key} must be one of {', '.join(choices)}")
    return val


def _quad(cfg):
    return QuadratureConfig(rtol=cfg.tol) if cfg.tol else QuadratureConfig()


def cmd_classify(cfg):
    params = _params(cfg)
    rep = classify_regime(params, cfg.tol) if cfg.tol else classify_regime(params)
    data = rep.to_dict()
    flat = [("regime", rep.regime.value), ("lpImpossible", rep.lp_impossible)]
    flat += list(rep.exponents.to_dict().items())
    return Report(data, ["quantity", "value"], flat)


def cmd_iterate(cfg):
    params = _params(cfg, allow_low_q=True)
    max_iter = int(_number(cfg, "max_iter", 10000))
    kind = _choice(cfg, "sequence", "nonexistence", ("nonexistence", "bootstrap"))
    if kind == "nonexistence":
        seq = nonexistence_sequence(params, max_iter)
    else:
        if "start" not in cfg.options:
            raise ConfigError("start", "bootstrap sequence needs a start value")
        seq = slow_bootstrap(_number(cfg, "start", 0.0), params, max_iter)
    rows = [(j, t) for j, t in enumerate(seq.terms)]
    return Report(seq.to_dict(), ["j", "term"], rows)


def _wolff_profile(cfg, params):
    kind = _choice(cfg, "profile", "singular", ("singular", "bubble"))
    if kind == "bubble":
        return BubbleProfile(params.n, params.p, params.a)
    return singular_profile(params)


def cmd_wolff(cfg):
    params = _params(cfg)
    u = _wolff_profile(cfg, params)
    radii = _floats(cfg, "radii", [0.01, 0.1, 1.0, 10.0, 100.0])
    rep = ratio_R(u, params, radii, _quad(cfg))
    data = {"params": params.to_dict()}
    data.update(rep.to_dict())
    if hasattr(u, "exponent"):
        data["wolffExponent"] = wolff_exponent(params, u.exponent)
    rows = [(r, uv, ev.value, ev.w1, ev.w2, ratio)
            for r, uv, ev, ratio in zip(rep.radii, rep.u_values, rep.evaluations, rep.ratios)]
    return Report(data, ["radius", "u", "W", "w1", "w2", "ratio"], rows)


def _shoot(cfg, params, alpha_default=1.0):
    alpha = _number(cfg, "alpha", alpha_default)
    kw = {}
    if "r_max" in cfg.options:
        kw["r_max"] = _number(cfg, "r_max", 0.0)
    if "ode_tol" in cfg.options:
        kw["ode_tol"] = _number(cfg, "ode_tol", 0.0)
    elif cfg.tol:
        kw["ode_tol"] = cfg.tol
    return shoot_radial(alpha, params, **kw)


def cmd_shoot(cfg):
    params = _params(cfg)
    res = _shoot(cfg, params)
    data = {"params": params.to_dict()}
    data.update(res.to_dict())
    rows = list(zip(res.r, res.U, res.w))
    return Report(data, ["r", "U", "w"], rows)


def cmd_verify_singular(cfg):
    params = _params(cfg)
    u = singular_profile(params)
    radii = _floats(cfg, "radii", list(np.logspace(-3, 3, 13)))
    res = np.atleast_1d(pde_residual(u, params, np.array(radii)))
    data = {"params": params.to_dict(), "t": u.exponent, "c": u.coeff,
            "maxAbsResidual": float(np.max(np.abs(res)))}
    rows = [(r, float(u(r)), float(x)) for r, x in zip(radii, res)]
    return Report(data, ["r", "u", "residual"], rows)


def _energy_profile(cfg, params, choices):
    kind = _choice(cfg, "profile", choices[0], choices)
    if kind == "bubble":
        return BubbleProfile(params.n, params.p, params.a)
    if kind == "singular":
        return singular_profile(params)
    bubble = BubbleProfile(params.n, params.p, params.a)
    return _shoot(cfg, params, float(bubble.amplitude)).profile


def cmd_pohozaev(cfg):
    params = _params(cfg)
    u = _energy_profile(cfg, params, ("bubble", "shoot"))
    ss = _floats(cfg, "ss", [])
    rep = energy_report(u, params, ss)
    data = {"params": params.to_dict()}
    data.update(rep.to_dict())
    if rep.gradient_energy is not None and rep.source_energy is not None:
        data["balanceResidual"] = pohozaev_check(u, params).balance_residual
    rows = [(name, v, v is not None) for name, v in rep.rows()]
    return Report(data, ["quantity", "value", "finite"], rows)


def cmd_scaling(cfg):
    params = _params(cfg)
    ex = derive_exponents(params)
    u = _energy_profile(cfg, params, ("bubble", "singular", "shoot"))
    theta = _number(cfg, "theta", ex.slow_rate)
    etas = _floats(cfg, "etas", [ex.s0, ex.s0 + 1.0])
    lambdas = _floats(cfg, "lambdas", [0.1, 2.0, 10.0])
    reports = [scaling_check(u, params, lam, theta, etas) for lam in lambdas]
    data = {"params": params.to_dict(), "theta": theta, "s0": ex.s0,
            "checks": [r.to_dict() for r in reports]}
    rows = [(r.lam, eta, r.norm_ratios[eta], r.power_ratios[eta], r.predicted_power_ratios[eta])
            for r in reports for eta in etas]
    return Report(data, ["lambda", "eta", "normRatio", "powerRatio", "predictedPowerRatio"], rows)


def expand_q_values(spec):
    """An explicit list, or {start, stop, step} with stop included."""
    if isinstance(spec, dict):
        extra = set(spec) - {"start", "stop", "step"}
        if extra:
            raise ConfigError(f"q_values.{sorted(extra)[0]}", "q_values range takes start, stop, step")
        try:
            start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        except KeyError as exc:
            raise ConfigError(f"q_values.{exc.args[0]}", "missing range entry") from None
        if not step > 0 or stop < start:
            raise ConfigError("q_values", "range needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    if isinstance(spec, list) and spec:
        return [float(v) for v in spec]
    raise ConfigError("q_values", "q_values must be a non-empty list or a {start, stop, step} range")


def sweep_point(params_dict: dict, max_iter: int) -> dict:
    """One sweep row.  Module-level so worker processes can import it."""
    row = {"q": params_dict["q"]}
    try:
        params = validate_params(params_dict, allow_low_q=True)
        ex = derive_exponents(params)
        row.update(slowRate=ex.slow_rate, fastRate=ex.fast_rate)
        try:
            row["regime"] = classify_regime(validate_params(params_dict)).regime.value
        except AssumptionViolation:
            row["regime"] = "Invalid"
        seq = nonexistence_sequence(params, max_iter)
        row.update(verdict=seq.verdict.value, j0=seq.j0)
    except (AssumptionViolation, NumericalFailure) as exc:
        row.update(regime="Invalid", slowRate=None, fastRate=None, verdict="Error", j0=None, error=str(exc))
    return row


def default_jobs() -> int:
    raw = os.environ.get("WOLFFLAB_JOBS")
    if raw is None:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise ConfigError("WOLFFLAB_JOBS", "WOLFFLAB_JOBS must be an integer") from None
    if jobs < 1:
        raise ConfigError("WOLFFLAB_JOBS", "WOLFFLAB_JOBS must be >= 1")
    return jobs


def cmd_sweep(cfg):
    if "q" in cfg.params:
        raise ConfigError("q", "sweep takes q_values, not q")
    base = dict(cfg.params)
    qs = expand_q_values(cfg.options.get("q_values"))
    max_iter = int(_number(cfg, "max_iter", 10000))
    jobs = int(cfg.options.get("jobs", default_jobs()))
    if jobs < 1:
        raise ConfigError("jobs", "jobs must be >= 1")
    points = [dict(base, q=q) for q in qs]
    if jobs == 1 or len(points) == 1:
        rows = [sweep_point(pt, max_iter) for pt in points]
    else:
        with cf.ProcessPoolExecutor(max_workers=min(jobs, len(points))) as pool:
            rows = list(pool.map(sweep_point, points, [max_iter] * len(points)))
    cols = ["q", "regime", "slowRate", "fastRate", "verdict", "j0"]
    data = {"base": base, "rows": rows}
    return Report(data, cols, [[row.get(c) for c in cols] for row in rows])


HANDLERS = {
    "classify": cmd_classify,
    "iterate": cmd_iterate,
    "wolff": cmd_wolff,
    "shoot": cmd_shoot,
    "verify-singular": cmd_verify_singular,
    "pohozaev": cmd_pohozaev,
    "scaling": cmd_scaling,
    "sweep": cmd_sweep,
}


def run(cfg: RunConfig, stream=None) -> int:
    """Dispatch ``cfg`` and write its report.  Returns the exit status."""
    err = sys.stderr
    try:
        report = HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error [{exc.key}]: {exc}", file=err)
        return EXIT_CONFIG
    except AssumptionViolation as exc:
        print(f"assumption violated: {exc}", file=err)
        return EXIT_ASSUMPTION
    except NumericalFailure as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=err)
        return EXIT_NUMERICAL
    except (WolffLabError, ValueError) as exc:
        print(f"invalid input ({type(exc).__name__}): {exc}", file=err)
        return EXIT_INPUT
    try:
        write_report(report, cfg, stream)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=err)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wolfflab", description="Wolff potentials and radial p-Laplace solutions.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat JSON or TOML config")
        sp.add_argument("--out", help="report path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--tol", type=float)
        sp.add_argument("--jobs", type=int, help="worker processes for sweep (default $WOLFFLAB_JOBS or 1)")
        for key in ("n", "p", "q", "a", "beta"):
            sp.add_argument(f"--{key}", type=float)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = {}
        if args.config:
            path = Path(args.config)
            try:
                raw = _parse_text(path.read_text(), path.suffix.lower())
            except OSError as exc:
                raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
        for key in ("n", "p", "q", "a", "beta", "out", "format", "tol"):
            val = getattr(args, key)
            if val is not None:
                raw[key] = int(val) if key == "n" and float(val).is_integer() else val
        if args.jobs is not None:
            if args.command != "sweep":
                raise ConfigError("jobs", "--jobs applies to sweep only")
            raw["jobs"] = args.jobs
        if raw.get("command", args.command) != args.command:
            raise ConfigError("command", f"config is for {raw['command']!r}, not {args.command!r}")
        raw.pop("command", None)
        cfg = config_from_mapping(raw, args.command)
    except ConfigError as exc:
        print(f"config error [{exc.key}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
