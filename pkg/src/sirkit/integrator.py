"""Adaptive Dormand-Prince 5(4) integration of the SIR system.

The state is augmented with two running quadratures that share the step
error control:

    p_i' = I              (cumulative infectious load)
    g_i' = beta * S - gamma   (cumulative excess growth rate)

so the integrating-factor representations can be evaluated directly from the
trajectory. Dense output is a quintic Hermite interpolant built from node
values and the analytic first and second derivatives at the nodes. It needs
nothing beyond the node table, so a trajectory can be rebuilt bit-for-bit
from its CSV export (see :meth:`Trajectory.from_nodes`).

Negative compartment values are never clamped. The exact flow keeps the
nonnegative orthant invariant, so any negativity is integration error and
has to show up in the monitoring reports.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InvalidConfig,
    NegativeInitialData,
    StepBudgetExhausted,
    StepUnderflow,
    TimeOutOfRange,
)
from .model import SirParams, SirState

# Column layout of the augmented state vector.
S, I, R, P_I, G_I = range(5)
COLUMNS = ("s", "i", "r", "p_i", "g_i")

TOL_ENV_VAR = "SIRKIT_DEFAULT_TOL"

# Dormand-Prince 5(4) tableau (nodes c_i unused: the field is autonomous).
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# Difference between the 5th-order and embedded 4th-order weights.
_E1 = 71 / 57600
_E3 = -71 / 16695
_E4 = 71 / 1920
_E5 = -17253 / 339200
_E6 = 22 / 525
_E7 = -1 / 40

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_PI_BETA = 0.04
_PI_ALPHA = 0.2 - 0.75 * _PI_BETA


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control settings. ``None`` for ``h_init``/``h_max`` means "derive from t_end"."""

    rtol: float = 1e-8
    atol: float = 1e-14
    h_init: float | None = None
    h_max: float | None = None
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not self.rtol > 0:
            raise InvalidConfig(f"rtol must be > 0, got {self.rtol!r}")
        if not self.atol > 0:
            raise InvalidConfig(f"atol must be > 0, got {self.atol!r}")
        if self.h_init is not None and not self.h_init > 0:
            raise InvalidConfig(f"h_init must be > 0, got {self.h_init!r}")
        if self.h_max is not None and self.h_init is not None and self.h_max < self.h_init:
            raise InvalidConfig("h_max must be >= h_init")
        if self.max_steps <= 0:
            raise InvalidConfig(f"max_steps must be > 0, got {self.max_steps!r}")

    @classmethod
    def default(cls) -> "IntegratorConfig":
        """Defaults, with ``rtol`` overridable through ``SIRKIT_DEFAULT_TOL``."""
        raw = os.environ.get(TOL_ENV_VAR)
        if raw is None or raw.strip() == "":
            return cls()
        try:
            rtol = float(raw)
        except ValueError:
            raise InvalidConfig(f"{TOL_ENV_VAR}={raw!r} is not a number") from None
        return cls(rtol=rtol)

    def resolved(self, t_end: float) -> "IntegratorConfig":
        h_init = self.h_init if self.h_init is not None else 1e-3 * t_end
        h_max = self.h_max if self.h_max is not None else t_end / 10
        h_init = min(h_init, h_max)
        return replace(self, h_init=h_init, h_max=h_max)


@dataclass(frozen=True)
class AugmentedState:
    core: SirState
    p_i: float
    g_i: float

    @classmethod
    def from_row(cls, row) -> "AugmentedState":
        return cls(SirState(row[S], row[I], row[R]), float(row[P_I]), float(row[G_I]))


def augmented_rhs(p: SirParams, ys: np.ndarray) -> np.ndarray:
    """Right-hand side of the augmented system for an (n, 5) array of node states."""
    ys = np.atleast_2d(ys)
    s, i = ys[:, S], ys[:, I]
    infection = p.beta * s * i
    recovery = p.gamma * i
    out = np.empty_like(ys, dtype=float)
    out[:, S] = -infection
    out[:, I] = infection - recovery
    out[:, R] = recovery
    out[:, P_I] = i
    out[:, G_I] = p.beta * s - p.gamma
    # match vector_field: I == 0 gives exact zeros, not -0.0
    zero = i == 0.0
    out[zero, S:R + 1] = 0.0
    return out


def augmented_second_derivative(p: SirParams, ys: np.ndarray, fs: np.ndarray) -> np.ndarray:
    """Time derivative of :func:`augmented_rhs` along the flow (chain rule, no differencing)."""
    ds, di = fs[:, S], fs[:, I]
    out = np.empty_like(ys, dtype=float)
    d_inf = p.beta * (ds * ys[:, I] + ys[:, S] * di)
    out[:, S] = -d_inf
    out[:, I] = d_inf - p.gamma * di
    out[:, R] = p.gamma * di
    out[:, P_I] = di
    out[:, G_I] = p.beta * ds
    return out


@dataclass(frozen=True)
class Trajectory:
    """Accepted nodes of an integration on ``[0, t_end]`` plus Hermite dense output.

    ``ys`` holds the augmented state per node in the column order
    ``s, i, r, p_i, g_i``; ``fs`` and ``accs`` hold the matching first and
    second time derivatives.
    """

    params: SirParams
    init: SirState
    t_end: float
    ts: np.ndarray
    ys: np.ndarray
    fs: np.ndarray
    accs: np.ndarray
    stats: dict = field(default_factory=dict)

    @classmethod
    def from_nodes(cls, params: SirParams, ts, ys, stats: dict | None = None) -> "Trajectory":
        ts = np.array(ts, dtype=float)
        ys = np.array(ys, dtype=float)
        if ts.ndim != 1 or ys.shape != (len(ts), 5):
            raise InvalidConfig("node table must have shape (n, 5) matching n times")
        if len(ts) < 2:
            raise InvalidConfig("a trajectory needs at least two nodes")
        if ts[0] != 0.0:
            raise InvalidConfig("first node must be at t=0")
        if not np.all(np.diff(ts) > 0):
            raise InvalidConfig("node times must be strictly increasing")
        init = SirState(ys[0, S], ys[0, I], ys[0, R])
        if stats is None:
            stats = {"accepted_steps": len(ts) - 1, "rejected_steps": None}
        ts.setflags(write=False)
        ys.setflags(write=False)
        fs = augmented_rhs(params, ys)
        accs = augmented_second_derivative(params, ys, fs)
        fs.setflags(write=False)
        accs.setflags(write=False)
        return cls(params, init, float(ts[-1]), ts, ys, fs, accs, dict(stats))

    @property
    def accepted_steps(self) -> int:
        return len(self.ts) - 1

    @property
    def population(self) -> float:
        return self.init.s + self.init.i + self.init.r

    @property
    def step_widths(self) -> np.ndarray:
        return np.diff(self.ts)

    def hermite_coefficients(self) -> np.ndarray:
        """Per-step polynomial coefficients ``sum_j c_j * u**j`` with ``u = t - t_k``.

        Shape is (steps, 6, 5). :meth:`sample_many` evaluates the equivalent
        basis form instead, which reproduces node values exactly.
        """
        h = self.step_widths[:, None]
        y0, y1 = self.ys[:-1], self.ys[1:]
        f0, f1 = self.fs[:-1], self.fs[1:]
        a0, a1 = self.accs[:-1], self.accs[1:]
        # remaining cubic..quintic terms from the three endpoint conditions at u = h
        e0 = y1 - (y0 + f0 * h + a0 * h**2 / 2)
        e1 = f1 - (f0 + a0 * h)
        e2 = a1 - a0
        c3 = (10 * e0 - 4 * e1 * h + e2 * h**2 / 2) / h**3
        c4 = (-15 * e0 + 7 * e1 * h - e2 * h**2) / h**4
        c5 = (6 * e0 - 3 * e1 * h + e2 * h**2 / 2) / h**5
        return np.stack([y0, f0, a0 / 2, c3, c4, c5], axis=1)

    def sample_many(self, times) -> np.ndarray:
        """Evaluate the dense output at each time; returns an (m, 5) array."""
        t = np.atleast_1d(np.asarray(times, dtype=float))
        if t.size and (np.isnan(t).any() or t.min() < 0.0 or t.max() > self.t_end):
            raise TimeOutOfRange(f"sample times must lie in [0, {self.t_end!r}]")
        k = np.searchsorted(self.ts, t, side="right") - 1
        k = np.clip(k, 0, len(self.ts) - 2)
        t0, t1 = self.ts[k], self.ts[k + 1]
        h = (t1 - t0)[:, None]
        th = ((t - t0)[:, None]) / h
        th2, th3 = th * th, th * th * th
        th4, th5 = th3 * th, th3 * th2
        h0 = 1 - 10 * th3 + 15 * th4 - 6 * th5
        h1 = th - 6 * th3 + 8 * th4 - 3 * th5
        h2 = (th2 - 3 * th3 + 3 * th4 - th5) / 2
        g0 = 10 * th3 - 15 * th4 + 6 * th5
        g1 = -4 * th3 + 7 * th4 - 3 * th5
        g2 = (th3 - 2 * th4 + th5) / 2
        out = (
            h0 * self.ys[k]
            + h * h1 * self.fs[k]
            + h * h * h2 * self.accs[k]
            + g0 * self.ys[k + 1]
            + h * g1 * self.fs[k + 1]
            + h * h * g2 * self.accs[k + 1]
        )
        # node times return the stored node exactly
        on_left = t == t0
        on_right = t == t1
        out[on_left] = self.ys[k[on_left]]
        out[on_right] = self.ys[k[on_right] + 1]
        return out

    def sample(self, t: float) -> AugmentedState:
        return AugmentedState.from_row(self.sample_many([t])[0])

    def endpoint(self) -> SirState:
        last = self.ys[-1]
        return SirState(last[S], last[I], last[R])


def _validate_inputs(init: SirState, t_end: float):
    if not init.is_nonnegative():
        raise NegativeInitialData(f"initial data must be nonnegative, got {init.as_tuple()}")
    if not (math.isfinite(t_end) and t_end > 0):
        raise InvalidConfig(f"t_end must be a finite positive time, got {t_end!r}")


def integrate(
    p: SirParams,
    init: SirState,
    t_end: float,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate from ``t=0`` to exactly ``t_end``.

    Raises:
        NegativeInitialData: some initial compartment is negative.
        StepBudgetExhausted: ``cfg.max_steps`` accepted+rejected attempts used up.
        StepUnderflow: the controller asked for a step below time resolution.
    """
    _validate_inputs(init, t_end)
    cfg = (cfg or IntegratorConfig.default()).resolved(t_end)
    beta, gamma = p.beta, p.gamma
    rtol, atol = cfg.rtol, cfg.atol

    def rhs(s, i):
        if i == 0.0:
            return 0.0, 0.0, 0.0, i, beta * s - gamma
        inf = beta * s * i
        rec = gamma * i
        return -inf, inf - rec, rec, i, beta * s - gamma

    t = 0.0
    y = (init.s, init.i, init.r, 0.0, 0.0)
    k1 = rhs(y[0], y[1])
    ts = [t]
    ys = [y]
    h = cfg.h_init
    err_prev = 1e-4
    accepted = rejected = 0
    rejected_last = False
    attempts = 0

    while t < t_end:
        if attempts >= cfg.max_steps:
            raise StepBudgetExhausted(t, cfg.max_steps)
        attempts += 1
        h = min(h, cfg.h_max)
        last = t + h >= t_end
        if last:
            h = t_end - t
        if h <= 8 * np.finfo(float).eps * max(abs(t), 1.0):
            raise StepUnderflow(t, h)

        y2 = [y[n] + h * _A21 * k1[n] for n in range(5)]
        k2 = rhs(y2[0], y2[1])
        y3 = [y[n] + h * (_A31 * k1[n] + _A32 * k2[n]) for n in range(5)]
        k3 = rhs(y3[0], y3[1])
        y4 = [y[n] + h * (_A41 * k1[n] + _A42 * k2[n] + _A43 * k3[n]) for n in range(5)]
        k4 = rhs(y4[0], y4[1])
        y5 = [
            y[n] + h * (_A51 * k1[n] + _A52 * k2[n] + _A53 * k3[n] + _A54 * k4[n])
            for n in range(5)
        ]
        k5 = rhs(y5[0], y5[1])
        y6 = [
            y[n] + h * (_A61 * k1[n] + _A62 * k2[n] + _A63 * k3[n] + _A64 * k4[n] + _A65 * k5[n])
            for n in range(5)
        ]
        k6 = rhs(y6[0], y6[1])
        y_new = tuple(
            y[n] + h * (_B1 * k1[n] + _B3 * k3[n] + _B4 * k4[n] + _B5 * k5[n] + _B6 * k6[n])
            for n in range(5)
        )
        k7 = rhs(y_new[0], y_new[1])

        acc = 0.0
        for n in range(5):
            e = h * (
                _E1 * k1[n] + _E3 * k3[n] + _E4 * k4[n] + _E5 * k5[n] + _E6 * k6[n] + _E7 * k7[n]
            )
            sc = atol + rtol * max(abs(y[n]), abs(y_new[n]))
            acc += (e / sc) ** 2
        err = math.sqrt(acc / 5)

        if err <= 1.0:
            t = t_end if last else t + h
            y = y_new
            k1 = k7
            ts.append(t)
            ys.append(y)
            accepted += 1
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err**-_PI_ALPHA * err_prev**_PI_BETA
                factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            if rejected_last:
                factor = min(factor, 1.0)
            err_prev = max(err, 1e-4)
            rejected_last = False
            h *= factor
        else:
            rejected += 1
            rejected_last = True
            factor = max(_MIN_FACTOR, _SAFETY * err**-0.2)
            h *= factor

    stats = {"accepted_steps": accepted, "rejected_steps": rejected}
    return Trajectory.from_nodes(p, ts, ys, stats)


def refine_convergence(
    p: SirParams,
    init: SirState,
    t_end: float,
    cfg_sequence,
) -> list[SirState]:
    """Endpoint states for a sequence of progressively tighter configurations.

    Callers compare successive differences; shrinking differences are the
    numerical stand-in for uniqueness of the flow.
    """
    cfgs = list(cfg_sequence)
    for prev, cur in zip(cfgs, cfgs[1:]):
        if not cur.rtol < prev.rtol:
            raise InvalidConfig("cfg_sequence tolerances must be strictly decreasing")
    return [integrate(p, init, t_end, cfg).endpoint() for cfg in cfgs]


def endpoint_differences(endpoints: list[SirState]) -> list[float]:
    """Max-norm differences between consecutive endpoint states."""
    return [
        max(abs(a - b) for a, b in zip(x.as_tuple(), y.as_tuple()))
        for x, y in zip(endpoints, endpoints[1:])
    ]
