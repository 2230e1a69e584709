"""Threshold ratios, initial-growth classification and the stationary-infection crossing.

``r_init = beta * S(0) / gamma`` is the initial effective threshold ratio for
the given initial state. It equals the disease-free quantity ``beta * N / gamma``
only when ``S(0) = N``; the latter is reported for display and nothing here
depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import NegativeI
from .integrator import I, S, Trajectory
from .model import SirParams, SirState, vector_field
from .monitor import CheckRecord, MonitorConfig, Status, check_i_nonincreasing, sample_times

EQ_TOL = 1e-9


class Verdict(str, Enum):
    GROWTH = "growth"
    DECLINE = "decline"
    NON_GROWTH = "non_growth"
    NO_INFECTION = "no_infection"


@dataclass(frozen=True)
class Crossing:
    t_star: float
    s_at: float
    i_at: float
    i_prime_at: float

    def to_dict(self) -> dict:
        return {"t_star": self.t_star, "s_at": self.s_at, "i_at": self.i_at, "i_prime_at": self.i_prime_at}


@dataclass(frozen=True)
class ThresholdClassification:
    r_init: float
    r0_dfe: float
    initial_verdict: Verdict
    i_prime_initial: float
    i_monotone: CheckRecord
    crossing: Crossing | None
    sampled_peak_t: float

    @property
    def i_monotone_checked(self) -> bool:
        return self.i_monotone.status in (Status.PASS, Status.FAIL)

    def to_dict(self) -> dict:
        return {
            "r_init": self.r_init,
            "r0_dfe": self.r0_dfe,
            "initial_verdict": self.initial_verdict.value,
            "i_prime_initial": self.i_prime_initial,
            "i_monotone_checked": self.i_monotone_checked,
            "i_monotone": self.i_monotone.to_dict(),
            "crossing": None if self.crossing is None else self.crossing.to_dict(),
            "sampled_peak_t": self.sampled_peak_t,
        }


def r_init(p: SirParams, init: SirState) -> float:
    return p.beta * init.s / p.gamma


def r_eff(p: SirParams, x: SirState) -> float:
    return p.beta * x.s / p.gamma


def r0_dfe(p: SirParams, init: SirState) -> float:
    """Disease-free ratio ``beta * N / gamma``; explanatory only."""
    return p.beta * (init.s + init.i + init.r) / p.gamma


def classify_initial(p: SirParams, init: SirState, eq_tol: float = EQ_TOL) -> Verdict:
    """Initial growth verdict.

    ``|r_init - 1| <= eq_tol`` is reported as NON_GROWTH: exact equality cannot
    be decided in floating point, and the band covers it.
    """
    if init.i == 0.0:
        return Verdict.NO_INFECTION
    ratio = r_init(p, init)
    if abs(ratio - 1.0) <= eq_tol:
        return Verdict.NON_GROWTH
    return Verdict.GROWTH if ratio > 1.0 else Verdict.DECLINE


def growth_condition(p: SirParams, x: SirState) -> bool:
    """``I > 0 and beta*S > gamma``, equivalent to ``I' > 0`` when ``I >= 0``.

    Raises:
        NegativeI: for ``I < 0`` the equivalence does not hold.
    """
    if x.i < 0:
        raise NegativeI(f"growth condition requires I >= 0, got I={x.i!r}")
    return x.i > 0 and p.beta * x.s > p.gamma


def check_i_monotone_subthreshold(
    tr: Trajectory,
    cfg: MonitorConfig | None = None,
    eq_tol: float = EQ_TOL,
) -> CheckRecord:
    """Sampled nonincrease of I, applicable only when ``r_init <= 1 + eq_tol``."""
    ratio = r_init(tr.params, tr.init)
    if ratio > 1.0 + eq_tol:
        slack = (cfg or MonitorConfig()).mono_slack
        return CheckRecord(
            name="i_nonincreasing",
            status=Status.NOT_APPLICABLE,
            worst_residual=None,
            worst_t=None,
            tolerance_used=slack,
            note=f"r_init={ratio!r} > 1",
        )
    return check_i_nonincreasing(tr, cfg)


def _s_minus_threshold(tr: Trajectory, t: float) -> float:
    return float(tr.sample_many([t])[0, S]) - tr.params.threshold_s


def detect_stationary_crossing(tr: Trajectory) -> Crossing | None:
    """Locate ``S(t*) = gamma/beta`` by bisection on the dense output.

    Only a downward crossing from ``S(0) > gamma/beta`` to ``S(t_end) < gamma/beta``
    is reported; ``S(0) == gamma/beta`` returns ``t* = 0``. Nothing is claimed
    about whether I actually peaks there.
    """
    c = tr.params.threshold_s
    s0, s1 = tr.ys[0, S], tr.ys[-1, S]
    if s0 == c:
        return _crossing_at(tr, 0.0)
    if not (s0 > c and s1 < c):
        return None
    # narrow the bracket to one step using the nodes, then bisect inside it
    k = int((tr.ys[:, S] < c).argmax())
    if tr.ys[k - 1, S] == c:
        return _crossing_at(tr, float(tr.ts[k - 1]))
    lo, hi = float(tr.ts[k - 1]), float(tr.ts[k])
    resolution = 1e-12 * tr.t_end
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _s_minus_threshold(tr, mid) > 0:
            lo = mid
        else:
            hi = mid
    # pick whichever bracket end sits closer to the threshold
    t_star = lo if abs(_s_minus_threshold(tr, lo)) <= abs(_s_minus_threshold(tr, hi)) else hi
    return _crossing_at(tr, t_star)


def _crossing_at(tr: Trajectory, t: float) -> Crossing:
    row = tr.sample_many([t])[0]
    s, i = float(row[S]), float(row[I])
    return Crossing(t_star=t, s_at=s, i_at=i, i_prime_at=i * (tr.params.beta * s - tr.params.gamma))


def sampled_peak_time(tr: Trajectory, n_samples: int | None = None) -> float:
    """Time of the largest sampled I (nodes, midpoints and a uniform grid)."""
    n_samples = n_samples or max(1000, 4 * tr.accepted_steps)
    times = sample_times(tr, n_samples)
    ys = tr.sample_many(times)
    return float(times[int(ys[:, I].argmax())])


def analyze(tr: Trajectory, cfg: MonitorConfig | None = None, eq_tol: float = EQ_TOL) -> ThresholdClassification:
    p, init = tr.params, tr.init
    resolved = (cfg or MonitorConfig()).resolved(tr)
    return ThresholdClassification(
        r_init=r_init(p, init),
        r0_dfe=r0_dfe(p, init),
        initial_verdict=classify_initial(p, init, eq_tol),
        i_prime_initial=vector_field(p, init).di,
        i_monotone=check_i_monotone_subthreshold(tr, resolved, eq_tol),
        crossing=detect_stationary_crossing(tr),
        sampled_peak_t=sampled_peak_time(tr, resolved.n_samples),
    )


__all__ = [
    "Crossing",
    "EQ_TOL",
    "ThresholdClassification",
    "Verdict",
    "analyze",
    "check_i_monotone_subthreshold",
    "classify_initial",
    "detect_stationary_crossing",
    "growth_condition",
    "r0_dfe",
    "r_eff",
    "r_init",
    "sampled_peak_time",
]
