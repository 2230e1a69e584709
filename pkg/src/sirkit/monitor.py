"""Sampled checks of the qualitative SIR invariants along a trajectory.

Every check certifies its property at the sampled points only. The sample
set is every accepted node, every step midpoint and a uniform grid, and its
size is recorded in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import InvalidConfig, NonpositiveS
from .integrator import I, R, S, Trajectory
from .model import SirParams, SirState


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class CheckRecord:
    name: str
    status: Status
    worst_residual: float | None
    worst_t: float | None
    tolerance_used: float
    note: str = ""

    @property
    def passed(self) -> bool | None:
        """True/False for evaluated checks, None for skipped or not-applicable ones."""
        if self.status is Status.PASS:
            return True
        if self.status is Status.FAIL:
            return False
        return None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "pass": self.passed,
            "worst_residual": self.worst_residual,
            "worst_t": self.worst_t,
            "tolerance_used": self.tolerance_used,
            "note": self.note,
        }


@dataclass(frozen=True)
class InvariantReport:
    checks: tuple[CheckRecord, ...]
    n_samples: int

    @property
    def overall(self) -> bool:
        return all(c.status is not Status.FAIL for c in self.checks)

    @property
    def failing(self) -> list[str]:
        return [c.name for c in self.checks if c.status is Status.FAIL]

    def get(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "n_samples": self.n_samples,
            "failing": self.failing,
            "checks": [c.to_dict() for c in self.checks],
        }


@dataclass(frozen=True)
class MonitorConfig:
    """Tolerances, all relative to ``max(1, N)`` except ``km_tol`` (relative to ``max(1, |V(0)|)``).

    ``s_floor`` and ``n_samples`` default to ``None`` and are resolved per
    trajectory: ``1e-9 * max(1, N)`` and ``max(1000, 4 * accepted_steps)``.
    """

    cons_tol: float = 1e-9
    sign_tol: float = 1e-9
    mono_slack: float = 1e-12
    km_tol: float = 1e-7
    s_floor: float | None = None
    n_samples: int | None = None

    def __post_init__(self):
        for name in ("cons_tol", "sign_tol", "mono_slack", "km_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidConfig(f"{name} must be a finite positive number, got {value!r}")
        if self.s_floor is not None and not self.s_floor > 0:
            raise InvalidConfig(f"s_floor must be > 0, got {self.s_floor!r}")
        if self.n_samples is not None and self.n_samples < 2:
            raise InvalidConfig(f"n_samples must be >= 2, got {self.n_samples!r}")

    def resolved(self, tr: Trajectory) -> "MonitorConfig":
        scale = max(1.0, tr.population)
        return replace(
            self,
            s_floor=self.s_floor if self.s_floor is not None else 1e-9 * scale,
            n_samples=self.n_samples if self.n_samples is not None else max(1000, 4 * tr.accepted_steps),
        )


@dataclass
class _Samples:
    times: np.ndarray
    ys: np.ndarray
    n: float
    scale: float
    cfg: MonitorConfig = field(repr=False)


def sample_times(tr: Trajectory, n_samples: int) -> np.ndarray:
    """Nodes, step midpoints and ``n_samples`` uniform times, sorted and deduplicated."""
    grid = np.linspace(0.0, tr.t_end, n_samples)
    grid[-1] = tr.t_end
    mids = (tr.ts[:-1] + tr.ts[1:]) / 2
    return np.unique(np.concatenate([tr.ts, mids, grid]))


def _prepare(tr: Trajectory, cfg: MonitorConfig | None) -> _Samples:
    cfg = (cfg or MonitorConfig()).resolved(tr)
    times = sample_times(tr, cfg.n_samples)
    ys = tr.sample_many(times)
    n = tr.population
    return _Samples(times, ys, n, max(1.0, n), cfg)


def _record(name, worst, worst_t, tol, ok, note="") -> CheckRecord:
    return CheckRecord(
        name=name,
        status=Status.PASS if ok else Status.FAIL,
        worst_residual=float(worst),
        worst_t=float(worst_t),
        tolerance_used=float(tol),
        note=note,
    )


def _conservation(smp: _Samples) -> CheckRecord:
    drift = np.abs(smp.ys[:, S] + smp.ys[:, I] + smp.ys[:, R] - smp.n) / smp.scale
    k = int(np.argmax(drift))
    tol = smp.cfg.cons_tol
    return _record("conservation", drift[k], smp.times[k], tol, drift[k] <= tol)


def _nonnegativity(smp: _Samples) -> CheckRecord:
    lowest = smp.ys[:, S:R + 1].min(axis=1)
    k = int(np.argmin(lowest))
    tol = smp.cfg.sign_tol * smp.scale
    return _record("nonnegativity", lowest[k], smp.times[k], tol, lowest[k] >= -tol)


def _bounds(smp: _Samples) -> CheckRecord:
    comp = smp.ys[:, S:R + 1]
    # distance outside [0, N], <= 0 when inside
    excess = np.maximum(-comp, comp - smp.n).max(axis=1)
    k = int(np.argmax(excess))
    tol = smp.cfg.sign_tol * smp.scale
    return _record("bounds", excess[k], smp.times[k], tol, excess[k] <= tol)


def _monotone(smp: _Samples, column: int, name: str, increasing: bool) -> CheckRecord:
    x = smp.ys[:, column]
    step = np.diff(x)
    # positive values are violations of the required direction
    violation = -step if increasing else step
    slack = smp.cfg.mono_slack * smp.scale
    if violation.size == 0:
        return _record(name, 0.0, 0.0, slack, True)
    k = int(np.argmax(violation))
    return _record(name, violation[k], smp.times[k + 1], slack, violation[k] <= slack)


def _simplex(smp: _Samples) -> CheckRecord:
    tol = smp.cfg.cons_tol
    comp = smp.ys[:, S:R + 1]
    sign_excess = np.maximum(0.0, -comp.min(axis=1) - tol)
    sum_excess = np.maximum(0.0, np.abs(comp.sum(axis=1) - smp.n) - tol * smp.scale)
    excess = np.maximum(sign_excess, sum_excess)
    k = int(np.argmax(excess))
    return _record(
        "simplex_containment",
        excess[k],
        smp.times[k],
        tol,
        excess[k] == 0.0,
        note="residual is the amount by which the worst sample exceeds the membership tolerance",
    )


def km_value(p: SirParams, x: SirState) -> float:
    """Kermack-McKendrick level value ``I + S - (gamma/beta) ln S`` (reference S* = 1)."""
    if not x.s > 0:
        raise NonpositiveS(f"the level-curve value needs S > 0, got S={x.s!r}")
    return x.i + x.s - (p.gamma / p.beta) * math.log(x.s)


def _km(smp: _Samples, p: SirParams) -> CheckRecord:
    tol = smp.cfg.km_tol
    s0 = smp.ys[0, S]
    if not s0 > smp.cfg.s_floor:
        return CheckRecord(
            name="km_constancy",
            status=Status.SKIPPED,
            worst_residual=None,
            worst_t=None,
            tolerance_used=tol,
            note="S(0) is not above s_floor; the level-curve invariant needs S(0) > 0",
        )
    v0 = km_value(p, SirState(s0, smp.ys[0, I], smp.ys[0, R]))
    use = smp.ys[:, S] > smp.cfg.s_floor
    s, i = smp.ys[use, S], smp.ys[use, I]
    v = i + s - (p.gamma / p.beta) * np.log(s)
    drift = np.abs(v - v0) / max(1.0, abs(v0))
    k = int(np.argmax(drift))
    note = "" if use.all() else f"{int((~use).sum())} samples with S <= s_floor excluded"
    return _record("km_constancy", drift[k], smp.times[use][k], tol, drift[k] <= tol, note)


def check_conservation(tr: Trajectory, cfg: MonitorConfig | None = None) -> CheckRecord:
    return _conservation(_prepare(tr, cfg))


def check_nonnegativity(tr: Trajectory, cfg: MonitorConfig | None = None) -> CheckRecord:
    return _nonnegativity(_prepare(tr, cfg))


def check_bounds(tr: Trajectory, cfg: MonitorConfig | None = None) -> CheckRecord:
    return _bounds(_prepare(tr, cfg))


def check_monotonicity(tr: Trajectory, cfg: MonitorConfig | None = None) -> tuple[CheckRecord, CheckRecord]:
    """S nonincreasing and R nondecreasing over consecutive samples."""
    smp = _prepare(tr, cfg)
    return (
        _monotone(smp, S, "s_nonincreasing", increasing=False),
        _monotone(smp, R, "r_nondecreasing", increasing=True),
    )


def check_km_constancy(tr: Trajectory, cfg: MonitorConfig | None = None) -> CheckRecord:
    return _km(_prepare(tr, cfg), tr.params)


def check_simplex(tr: Trajectory, cfg: MonitorConfig | None = None) -> CheckRecord:
    return _simplex(_prepare(tr, cfg))


def check_i_nonincreasing(tr: Trajectory, cfg: MonitorConfig | None = None) -> CheckRecord:
    """I nonincreasing over consecutive samples, with the same slack as S and R."""
    return _monotone(_prepare(tr, cfg), I, "i_nonincreasing", increasing=False)


def run_all(tr: Trajectory, cfg: MonitorConfig | None = None) -> InvariantReport:
    smp = _prepare(tr, cfg)
    checks = (
        _conservation(smp),
        _nonnegativity(smp),
        _bounds(smp),
        _monotone(smp, S, "s_nonincreasing", increasing=False),
        _monotone(smp, R, "r_nondecreasing", increasing=True),
        _km(smp, tr.params),
        _simplex(smp),
    )
    return InvariantReport(checks=checks, n_samples=int(smp.times.size))
