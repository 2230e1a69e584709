"""Scenario configs in; trajectory CSV and JSON reports out.

trajectory.csv has the fixed header ``t,s,i,r,p_i,g_i`` and every value is
written with 17 significant digits, which round-trips doubles exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .errors import InvalidConfig, SirkitError
from .integrator import COLUMNS, IntegratorConfig, Trajectory
from .model import SirParams, SirState
from .monitor import MonitorConfig, run_all
from .representations import representation_residuals
from .threshold import analyze

SCHEMA_VERSION = 1
CSV_HEADER = ("t",) + COLUMNS

_REQUIRED = ("beta", "gamma", "init_s", "init_i", "init_r", "t_end")
_INTEGRATOR_KEYS = ("rtol", "atol", "h_init", "h_max", "max_steps")
_MONITOR_KEYS = ("cons_tol", "sign_tol", "mono_slack", "km_tol", "s_floor", "n_samples")
_INT_KEYS = ("max_steps", "n_samples")


@dataclass(frozen=True)
class Scenario:
    params: SirParams
    init: SirState
    t_end: float
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig.default)
    monitor: MonitorConfig = field(default_factory=MonitorConfig)

    def echo(self) -> dict:
        """Flat dict that :func:`scenario_from_dict` parses back to an equal scenario."""
        out = {
            "beta": self.params.beta,
            "gamma": self.params.gamma,
            "init_s": self.init.s,
            "init_i": self.init.i,
            "init_r": self.init.r,
            "t_end": self.t_end,
        }
        out.update(asdict(self.integrator))
        out.update(asdict(self.monitor))
        return out


def _number(key, value, integer=False):
    if value is None and key not in _REQUIRED:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfig(f"{key}: expected a number, got {value!r}")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise InvalidConfig(f"{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def scenario_from_dict(data: dict) -> Scenario:
    """Parse a flat scenario mapping. Unknown keys are rejected.

    Raises:
        InvalidConfig: missing/unknown/mistyped keys or values violating a constraint.
        NonPositiveParameter, NonFiniteParameter: bad ``beta``/``gamma``.
    """
    if not isinstance(data, dict):
        raise InvalidConfig("scenario must be a JSON object")
    known = set(_REQUIRED) | set(_INTEGRATOR_KEYS) | set(_MONITOR_KEYS)
    unknown = sorted(set(data) - known)
    if unknown:
        raise InvalidConfig(f"unknown scenario keys: {', '.join(unknown)}")
    missing = [k for k in _REQUIRED if k not in data]
    if missing:
        raise InvalidConfig(f"missing scenario keys: {', '.join(missing)}")
    vals = {k: _number(k, v, integer=k in _INT_KEYS) for k, v in data.items()}
    params = SirParams(vals["beta"], vals["gamma"])
    init = SirState(vals["init_s"], vals["init_i"], vals["init_r"])
    if not init.is_nonnegative():
        raise InvalidConfig(f"initial data must be nonnegative, got {init.as_tuple()}")
    t_end = vals["t_end"]
    if not (math.isfinite(t_end) and t_end > 0):
        raise InvalidConfig(f"t_end must be a finite positive time, got {t_end!r}")
    base = IntegratorConfig.default()
    integ = IntegratorConfig(**{k: vals.get(k, getattr(base, k)) for k in _INTEGRATOR_KEYS})
    mon = MonitorConfig(**{k: vals[k] for k in _MONITOR_KEYS if k in vals})
    return Scenario(params, init, t_end, integ, mon)


def load_scenarios(path) -> list[Scenario]:
    """Read a config file holding one scenario object or a list of them."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    if isinstance(data, list):
        return [scenario_from_dict(d) for d in data]
    return [scenario_from_dict(data)]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_trajectory_csv(tr: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t, row in zip(tr.ts, tr.ys):
            w.writerow([_fmt(t)] + [_fmt(v) for v in row])


def read_trajectory_csv(path, params: SirParams) -> Trajectory:
    """Rebuild a trajectory from its node table.

    Raises:
        InvalidConfig: unreadable file, wrong header, non-numeric or bad node data.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InvalidConfig(f"cannot read trajectory {path}: {exc}") from exc
    if not rows or tuple(c.strip() for c in rows[0]) != CSV_HEADER:
        got = rows[0] if rows else []
        raise InvalidConfig(f"trajectory header must be {','.join(CSV_HEADER)}, got {','.join(got)}")
    ts, ys = [], []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise InvalidConfig(f"line {n}: expected {len(CSV_HEADER)} columns, got {len(row)}")
        try:
            values = [float(v) for v in row]
        except ValueError as exc:
            raise InvalidConfig(f"line {n}: {exc}") from exc
        if not all(math.isfinite(v) for v in values):
            raise InvalidConfig(f"line {n}: non-finite value")
        ts.append(values[0])
        ys.append(values[1:])
    try:
        return Trajectory.from_nodes(params, ts, ys)
    except SirkitError as exc:
        raise InvalidConfig(str(exc)) from exc


def build_report(tr: Trajectory, scenario_echo: dict, monitor: MonitorConfig, source: str) -> dict:
    monitor = monitor.resolved(tr)
    inv = run_all(tr, monitor)
    thr = analyze(tr, monitor)
    rep = representation_residuals(tr, monitor.n_samples)
    end = tr.ys[-1]
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario_echo,
        "integration": {
            "source": source,
            "t_end": tr.t_end,
            "accepted_steps": tr.stats.get("accepted_steps", tr.accepted_steps),
            "rejected_steps": tr.stats.get("rejected_steps"),
            "population": tr.population,
            "endpoint": {name: float(v) for name, v in zip(COLUMNS, end)},
        },
        "invariants": inv.to_dict(),
        "threshold": thr.to_dict(),
        "representations": asdict(rep),
    }


def report_ok(report: dict) -> bool:
    """False when any evaluated check (invariants or the subthreshold I check) failed."""
    return report["invariants"]["overall"] and report["threshold"]["i_monotone"]["status"] != "fail"


def verdicts(report: dict) -> dict:
    """The pass/fail outcomes of a report, without residual values."""
    out = {c["name"]: c["status"] for c in report["invariants"]["checks"]}
    thr = report["threshold"]
    out["i_nonincreasing"] = thr["i_monotone"]["status"]
    out["initial_verdict"] = thr["initial_verdict"]
    out["crossing"] = thr["crossing"] is not None
    return out


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def report_schema() -> dict:
    return json.loads(resources.files("sirkit").joinpath("report.schema.json").read_text())
