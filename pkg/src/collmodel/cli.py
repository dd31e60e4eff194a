"""Command-line front end.

    collmodel evolve --input werner:0.9712 --T 1 --theta 0 --steps 6
    collmodel sweep  --T 1,0.25,0.0625 --theta pi/2 --steps 6 --out sweep.csv
    collmodel tomo   --input werner:0.9712 --T 1 --steps 6 --shots 10000 --mc 100 --seed 7
    collmodel nm     --input werner:0.9712 --T 1 --theta pi/2 --steps 6

Exit codes: 0 success, 1 invalid configuration, 2 numerical invariant violation.
Without ``--out`` output goes to ``$COLLMODEL_OUTPUT_DIR/<command>.<format>``
when that variable is set, otherwise to stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Dict, List, Optional

import numpy as np

from .dynamics import SweepPointError, concurrence, evolve, nm_measure, sweep
from .errors import InvalidInputError, InvariantViolation
from .model import InputSpec, StepConfig
from .oracle import compare
from .tomography import mc_errorbars, projector_set

OUTPUT_DIR_ENV = "COLLMODEL_OUTPUT_DIR"
COMMANDS = ("evolve", "sweep", "tomo", "nm", "verify-oracle")
COMMAND_HELP = {
    "evolve": "per-step concurrences of one trajectory",
    "sweep": "trajectories over a (T, theta) grid",
    "tomo": "simulated tomography with Monte-Carlo error bars",
    "nm": "non-Markovianity measure of one trajectory",
}

EVOLVE_COLUMNS = ["step", "T", "theta", "C_as", "C_ae", "purity", "N_cum"]
SWEEP_COLUMNS = ["T", "theta", "step", "C_as", "C_ae", "N_cum"]
TOMO_COLUMNS = ["step", "T", "theta", "C_as_true", "C_as_mean", "C_as_std", "C_as_hat"]

DEFAULTS = {
    "input": "bell+",
    "steps": 6,
    "r": 0.5,
    "T": "1",
    "theta": "0",
    "eta_s": 1.0,
    "eta_e": 1.0,
    "shots": 10000,
    "mc": 100,
    "seed": 0,
    "format": "csv",
    "out": None,
    "workers": 1,
    "samples": 20,
}

_ANGLE_TOKENS = {"pi": math.pi, "pi/2": math.pi / 2, "pi/4": math.pi / 4}


class ConfigError(InvalidInputError):
    pass


def parse_number(tok) -> float:
    """Float, or one of the angle tokens pi, pi/2, pi/4 (optionally negated)."""
    if isinstance(tok, (int, float)):
        return float(tok)
    t = str(tok).strip().lower()
    sign = 1.0
    if t.startswith("-"):
        sign, t = -1.0, t[1:]
    if t in _ANGLE_TOKENS:
        return sign * _ANGLE_TOKENS[t]
    try:
        return sign * float(t)
    except ValueError:
        raise ConfigError(f"cannot parse number {tok!r}") from None


def parse_grid(spec) -> List[float]:
    """``a,b,c`` list, ``start:stop:count`` inclusive range, a number, or a JSON list."""
    if isinstance(spec, (list, tuple)):
        vals = [parse_number(v) for v in spec]
    elif isinstance(spec, (int, float)):
        vals = [float(spec)]
    else:
        text = str(spec).strip()
        if not text:
            raise ConfigError("empty grid")
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ConfigError(f"range must be start:stop:count, got {text!r}")
            start, stop = parse_number(parts[0]), parse_number(parts[1])
            try:
                count = int(parts[2])
            except ValueError:
                raise ConfigError(f"range count must be an integer in {text!r}") from None
            if count < 1:
                raise ConfigError(f"range count must be >= 1 in {text!r}")
            vals = [start] if count == 1 else list(np.linspace(start, stop, count))
        else:
            vals = [parse_number(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise ConfigError("grid has no values")
    return [float(v) for v in vals]


def fmt(x) -> str:
    if x is None:
        return ""
    return f"{float(x) + 0.0:.12g}"


def _num(x):
    return None if x is None else float(fmt(x))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collmodel", description="Linear-optics collisional model simulator")
    sub = parser.add_subparsers(dest="command", metavar="{evolve,sweep,tomo,nm}")
    for name in COMMANDS:
        # a subparser without help text is left out of the listing
        p = sub.add_parser(name, **({"help": COMMAND_HELP[name]} if name in COMMAND_HELP else {}))
        p.add_argument("--config", help="JSON file whose keys mirror the flag names")
        p.add_argument("--input", help="bell+, bell- or werner:F")
        p.add_argument("--steps", type=int)
        p.add_argument("--r", type=float, help="beam-splitter reflectivity")
        p.add_argument("--T", help="filter transmissivity (value, list or start:stop:count)")
        p.add_argument("--theta", help="phase in radians; pi, pi/2, pi/4 accepted")
        p.add_argument("--eta-s", dest="eta_s", type=float)
        p.add_argument("--eta-e", dest="eta_e", type=float)
        p.add_argument("--shots", type=int)
        p.add_argument("--mc", type=int, help="Monte-Carlo runs")
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out", help="output file")
        p.add_argument("--workers", type=int)
        p.add_argument("--samples", type=int, help=argparse.SUPPRESS)
    return parser


def resolve_config(args: argparse.Namespace) -> Dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in data.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = value
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    return _validate(cfg)


def _validate(cfg: Dict) -> Dict:
    cfg["input_spec"] = InputSpec.parse(cfg["input"])
    try:
        steps = int(cfg["steps"])
    except (TypeError, ValueError):
        raise ConfigError(f"steps must be an integer, got {cfg['steps']!r}") from None
    if steps != cfg["steps"] or steps < 1:
        raise ConfigError(f"steps must be >= 1, got {cfg['steps']!r}")
    cfg["steps"] = steps
    cfg["T_grid"] = parse_grid(cfg["T"])
    cfg["theta_grid"] = parse_grid(cfg["theta"])
    for name in ("r", "eta_s", "eta_e"):
        cfg[name] = parse_number(cfg[name])
    # StepConfig performs the range checks
    for T in cfg["T_grid"]:
        StepConfig(cfg["r"], T, 0.0, cfg["eta_s"], cfg["eta_e"])
    for theta in cfg["theta_grid"]:
        if not math.isfinite(theta):
            raise ConfigError(f"theta must be finite, got {theta}")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    if int(cfg["shots"]) < 1:
        raise ConfigError("shots must be >= 1")
    if int(cfg["mc"]) < 2:
        raise ConfigError("mc must be >= 2")
    if int(cfg["workers"]) < 1:
        raise ConfigError("workers must be >= 1")
    if cfg["command"] in ("evolve", "tomo", "nm"):
        if len(cfg["T_grid"]) != 1 or len(cfg["theta_grid"]) != 1:
            raise ConfigError(f"{cfg['command']} takes a single T and theta; use sweep for grids")
    return cfg


def _step_config(cfg: Dict, T: float, theta: float) -> StepConfig:
    return StepConfig(cfg["r"], T, theta, cfg["eta_s"], cfg["eta_e"])


def _csv(columns: List[str], rows: List[Dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) if c not in ("step",) else str(row[c]) for c in columns])
    return buf.getvalue()


def _json(payload: Dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _meta(cfg: Dict) -> Dict:
    return {
        "input": str(cfg["input_spec"]),
        "steps": cfg["steps"],
        "r": cfg["r"],
        "eta_s": cfg["eta_s"],
        "eta_e": cfg["eta_e"],
        "theta_convention": "phase of the e1 path relative to the s path, radians",
    }


def cmd_evolve(cfg: Dict) -> str:
    step = _step_config(cfg, cfg["T_grid"][0], cfg["theta_grid"][0])
    traj = evolve(cfg["input_spec"], step, cfg["steps"])
    ncum = traj.n_cumulative()
    rows = [
        {"step": rec.k, "T": step.T, "theta": step.theta, "C_as": rec.C_as, "C_ae": rec.C_ae,
         "purity": rec.purity_joint, "N_cum": ncum[rec.k]}
        for rec in traj.records
    ]
    if cfg["format"] == "csv":
        return _csv(EVOLVE_COLUMNS, rows)
    return _json({"command": "evolve", **_meta(cfg), "rows": [{c: _row_value(r, c) for c in EVOLVE_COLUMNS} for r in rows]})


def _row_value(row: Dict, col: str):
    return row[col] if col == "step" else _num(row[col])


def cmd_sweep(cfg: Dict) -> str:
    base = _step_config(cfg, 1.0, 0.0)
    table = sweep(cfg["input_spec"], cfg["T_grid"], cfg["theta_grid"], cfg["steps"], base, max_workers=int(cfg["workers"]))
    rows = [{"T": r.T, "theta": r.theta, "step": r.step, "C_as": r.C_as, "C_ae": r.C_ae, "N_cum": r.N_cum} for r in table]
    if cfg["format"] == "csv":
        return _csv(SWEEP_COLUMNS, rows)
    return _json({"command": "sweep", **_meta(cfg), "rows": [{c: _row_value(r, c) for c in SWEEP_COLUMNS} for r in rows]})


def _matrix_json(m: np.ndarray) -> Dict:
    return {"real": [[_num(x) for x in row] for row in m.real], "imag": [[_num(x) for x in row] for row in m.imag]}


def cmd_tomo(cfg: Dict) -> str:
    step = _step_config(cfg, cfg["T_grid"][0], cfg["theta_grid"][0])
    traj = evolve(cfg["input_spec"], step, cfg["steps"])
    shots, runs, seed = int(cfg["shots"]), int(cfg["mc"]), int(cfg["seed"])
    pset = projector_set()
    rows = []
    for rec in traj.records:
        row = {"step": rec.k, "T": step.T, "theta": step.theta, "C_as_true": rec.C_as,
               "C_as_mean": None, "C_as_std": None, "C_as_hat": None, "rho_hat": None, "seed": None}
        if rec.rho_as is not None:
            step_seed = seed + rec.k * runs
            res = mc_errorbars(rec.rho_as, shots, runs, step_seed, pset)
            row.update(C_as_mean=res.C_mean, C_as_std=res.C_std, C_as_hat=concurrence(res.rho_hat),
                       rho_hat=res.rho_hat, seed=step_seed)
        rows.append(row)
    if cfg["format"] == "csv":
        return _csv(TOMO_COLUMNS, rows)
    out_rows = []
    for r in rows:
        d = {c: _row_value(r, c) for c in TOMO_COLUMNS}
        d["seed"] = r["seed"]
        d["rho_hat"] = None if r["rho_hat"] is None else _matrix_json(r["rho_hat"])
        out_rows.append(d)
    payload = {"command": "tomo", **_meta(cfg), "seed": seed, "shots_per_projector": shots, "mc_runs": runs, "rows": out_rows}
    return _json(payload)


def cmd_nm(cfg: Dict) -> str:
    step = _step_config(cfg, cfg["T_grid"][0], cfg["theta_grid"][0])
    traj = evolve(cfg["input_spec"], step, cfg["steps"])
    res = nm_measure(traj.C_as)
    if cfg["format"] == "json":
        return _json({"command": "nm", **_meta(cfg), "T": step.T, "theta": step.theta, "N": _num(res.N),
                      "increments": [{"step": k, "dC": _num(d)} for k, d in res.increments]})
    lines = [f"N={res.N:.6f}"]
    lines += [f"increment step={k} dC={fmt(d)}" for k, d in res.increments]
    lines.append(f"# input={cfg['input_spec']} T={fmt(step.T)} theta={fmt(step.theta)} steps={cfg['steps']}"
                 f" r={fmt(cfg['r'])} eta_s={fmt(cfg['eta_s'])} eta_e={fmt(cfg['eta_e'])}")
    lines.append("# theta: phase of the e1 path relative to the s path")
    return "\n".join(lines) + "\n"


def cmd_verify_oracle(cfg: Dict) -> str:
    rng = np.random.default_rng(int(cfg["seed"]))
    worst = 0.0
    lines = ["sample,r,T,theta,trace_distance"]
    for i in range(int(cfg["samples"])):
        step = StepConfig(rng.random(), rng.random(), 2 * math.pi * rng.random(), cfg["eta_s"], cfg["eta_e"])
        d = compare(cfg["input_spec"], step, min(cfg["steps"], 3))
        worst = max(worst, d)
        lines.append(",".join([str(i), fmt(step.r), fmt(step.T), fmt(step.theta), fmt(d)]))
    lines.append(f"# max_trace_distance={fmt(worst)}")
    if worst > 1e-10:
        raise InvariantViolation(f"oracle disagreement {worst:.3e} exceeds 1e-10\n" + "\n".join(lines))
    return "\n".join(lines) + "\n"


HANDLERS = {"evolve": cmd_evolve, "sweep": cmd_sweep, "tomo": cmd_tomo, "nm": cmd_nm, "verify-oracle": cmd_verify_oracle}


def _destination(cfg: Dict) -> Optional[str]:
    if cfg["out"]:
        return cfg["out"]
    outdir = os.environ.get(OUTPUT_DIR_ENV)
    if outdir and cfg["command"] in ("evolve", "sweep", "tomo"):
        return os.path.join(outdir, f"{cfg['command']}.{cfg['format']}")
    return None


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfg = resolve_config(args)
        text = HANDLERS[args.command](cfg)
    except InvariantViolation as exc:
        print(f"error: numerical invariant violated: {exc}", file=sys.stderr)
        return 2
    except SweepPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, InvariantViolation) else 1
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    dest = _destination(cfg)
    if dest:
        os.makedirs(os.path.dirname(os.path.abspath(dest)), exist_ok=True)
        with open(dest, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
