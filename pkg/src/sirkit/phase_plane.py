"""Kermack-McKendrick level curves in the (S, I) plane.

A trajectory with S(0) > 0 stays on the curve

    I + S - (gamma/beta) ln S = v0.

Writing ``g(S) = S - (gamma/beta) ln S``, the curve is ``I = v0 - g(S)``.
``g`` is strictly convex with its minimum at ``S = gamma/beta``, so each
level ``I`` has at most one solution on either side of that point.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidRange, NonFiniteInput, NonpositiveS
from .model import SirParams, SirState
from .monitor import km_value

REL_TOL = 1e-12


class Branch(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class LevelCurve:
    v0: float
    s_min: float
    s_max: float
    s: np.ndarray
    i: np.ndarray

    @property
    def feasible(self) -> np.ndarray:
        """Points with I >= 0; the rest lie on the level set but outside the orthant."""
        return self.i >= 0

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.s.tolist(), self.i.tolist()))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "i", "feasible"])
            for s, i, ok in zip(self.s, self.i, self.feasible):
                w.writerow([f"{s:.17g}", f"{i:.17g}", "true" if ok else "false"])


def _g(p: SirParams, s: float) -> float:
    return s - (p.gamma / p.beta) * math.log(s)


def level_value(p: SirParams, init: SirState) -> float:
    return km_value(p, init)


def i_on_level(p: SirParams, v0: float, s: float) -> float:
    """I on the level curve at susceptible level ``s``; negative means off the orthant."""
    if not s > 0:
        raise NonpositiveS(f"s must be > 0, got {s!r}")
    return v0 - s + (p.gamma / p.beta) * math.log(s)


def s_on_level(p: SirParams, v0: float, i: float, branch: Branch | str) -> float | None:
    """Invert the level curve for S on one side of ``gamma/beta``.

    Returns None when the level ``i`` is above the curve's maximum, i.e.
    ``v0 - i < g(gamma/beta)``.
    """
    branch = Branch(branch)
    if not (math.isfinite(v0) and math.isfinite(i)):
        raise NonFiniteInput(f"v0 and i must be finite, got v0={v0!r}, i={i!r}")
    c = p.threshold_s
    target = v0 - i
    g_min = _g(p, c)
    # v0 - i carries rounding from both operands; treat that band as tangency
    tangency = 4 * np.finfo(float).eps * max(abs(v0), abs(i), abs(g_min))
    if abs(target - g_min) <= tangency:
        return c
    if target < g_min:
        return None

    def excess(s):
        return _g(p, s) - target

    # g decreases on (0, c] and increases on [c, inf): expand outward from c
    if branch is Branch.LEFT:
        near, far = c, c / 2
        while excess(far) < 0:
            if far < 1e-300:
                return None
            near, far = far, far / 2
    else:
        near, far = c, c * 2
        while excess(far) < 0:
            if far > 1e300:
                return None
            near, far = far, far * 2
    # excess(near) < 0 <= excess(far)
    lo, hi = min(near, far), max(near, far)
    while hi - lo > REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        inside = excess(mid) < 0
        if (branch is Branch.LEFT) == inside:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def trace_level_curve(p: SirParams, v0: float, s_range: tuple[float, float], n_points: int) -> LevelCurve:
    """Geometrically spaced samples of the level curve over ``s_range``.

    Points with negative I are kept; :attr:`LevelCurve.feasible` flags them.
    """
    s_min, s_max = s_range
    if not (0 < s_min < s_max and math.isfinite(s_max)):
        raise InvalidRange(f"need 0 < s_min < s_max, got ({s_min!r}, {s_max!r})")
    if n_points < 2:
        raise InvalidRange(f"n_points must be >= 2, got {n_points!r}")
    if not math.isfinite(v0):
        raise NonFiniteInput(f"v0 must be finite, got {v0!r}")
    s = np.geomspace(s_min, s_max, n_points)
    s[0], s[-1] = s_min, s_max
    i = v0 - s + (p.gamma / p.beta) * np.log(s)
    return LevelCurve(v0=v0, s_min=s_min, s_max=s_max, s=s, i=i)
