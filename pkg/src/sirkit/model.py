"""Parameter and state types for the mass-action SIR system.

The model is

    S' = -beta * S * I
    I' =  beta * S * I - gamma * I
    R' =  gamma * I

on an unnormalized population scale. If compartments are fractions the
caller is responsible for absorbing the population size into ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NegativeTolerance, NonFiniteParameter, NonFiniteState, NonPositiveParameter


@dataclass(frozen=True)
class SirParams:
    """Transmission coefficient ``beta`` and recovery rate ``gamma``, both > 0."""

    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise NonFiniteParameter(name, value)
            if value <= 0:
                raise NonPositiveParameter(name, value)
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def threshold_s(self) -> float:
        """Susceptible level ``gamma / beta`` at which ``I' = 0``."""
        return self.gamma / self.beta


@dataclass(frozen=True)
class SirState:
    """One (S, I, R) triple. Signs are not constrained here; they are checked on trajectories."""

    s: float
    i: float
    r: float

    def __post_init__(self):
        for name in ("s", "i", "r"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise NonFiniteState(f"state field {name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.s, self.i, self.r)

    def is_nonnegative(self) -> bool:
        return self.s >= 0 and self.i >= 0 and self.r >= 0


@dataclass(frozen=True)
class Derivative:
    ds: float
    di: float
    dr: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.ds, self.di, self.dr)


def validate_params(beta: float, gamma: float) -> SirParams:
    return SirParams(beta, gamma)


def vector_field(p: SirParams, x: SirState) -> Derivative:
    """Evaluate the SIR right-hand side at ``x``.

    ``I = 0`` yields an exact zero triple regardless of ``S`` and ``R``.
    """
    if x.i == 0.0:
        return Derivative(0.0, 0.0, 0.0)
    infection = p.beta * x.s * x.i
    recovery = p.gamma * x.i
    # factored so the sign of di is exactly the sign of beta*S - gamma
    return Derivative(-infection, x.i * (p.beta * x.s - p.gamma), recovery)


def total_population(x: SirState) -> float:
    return x.s + x.i + x.r


def in_simplex(x: SirState, n: float, tol: float) -> bool:
    """Membership in the conserved nonnegative simplex ``{S,I,R >= 0, S+I+R = n}``.

    Signs are relaxed by ``tol`` and the sum by ``tol * max(1, n)``.
    """
    if tol < 0:
        raise NegativeTolerance(f"tol must be >= 0, got {tol!r}")
    if min(x.s, x.i, x.r) < -tol:
        return False
    return abs(total_population(x) - n) <= tol * max(1.0, n)
