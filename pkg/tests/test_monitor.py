"""Invariant checks: clean runs pass, and each check catches a fault planted in the node table."""

import numpy as np
import pytest

from sirkit import MonitorConfig, SirParams, SirState, Trajectory, integrate, km_value, run_all
from sirkit.errors import InvalidConfig, NonpositiveS
from sirkit.integrator import I, R, S
from sirkit.monitor import (
    Status,
    check_bounds,
    check_conservation,
    check_i_nonincreasing,
    check_km_constancy,
    check_monotonicity,
    check_nonnegativity,
    check_simplex,
    sample_times,
)

NAMES = (
    "conservation",
    "nonnegativity",
    "bounds",
    "s_nonincreasing",
    "r_nondecreasing",
    "km_constancy",
    "simplex_containment",
)


def corrupted(tr, edit):
    ys = np.array(tr.ys)
    edit(ys)
    return Trajectory.from_nodes(tr.params, tr.ts, ys)


def test_canonical_all_pass(canon):
    rep = run_all(canon)
    assert tuple(c.name for c in rep.checks) == NAMES
    assert rep.overall and rep.failing == []
    assert all(c.status is Status.PASS for c in rep.checks)
    assert rep.n_samples >= 1000


def test_canonical_residual_levels(canon):
    rep = run_all(canon)
    assert rep.get("conservation").worst_residual <= 1e-12
    assert rep.get("km_constancy").worst_residual <= 1e-7
    assert rep.get("nonnegativity").worst_residual == 0.0  # R(0)


def test_sample_set_contains_nodes_and_midpoints(canon):
    t = sample_times(canon, 1000)
    assert set(canon.ts) <= set(t)
    mids = (canon.ts[:-1] + canon.ts[1:]) / 2
    assert set(mids) <= set(t)
    assert np.all(np.diff(t) > 0)


def test_conservation_fault(canon):
    def leak(ys):
        ys[60:, R] += 1e-6

    bad = corrupted(canon, leak)
    rec = check_conservation(bad)
    assert rec.status is Status.FAIL
    assert rec.worst_residual == pytest.approx(1e-6, rel=1e-3)
    assert check_simplex(bad).status is Status.FAIL


def test_negativity_fault(canon):
    def dip(ys):
        ys[-1, I] = -1e-6
        ys[-1, R] += 1e-6 + canon.ys[-1, I]

    bad = corrupted(canon, dip)
    assert check_nonnegativity(bad).status is Status.FAIL
    assert check_bounds(bad).status is Status.FAIL
    assert check_simplex(bad).status is Status.FAIL
    assert check_conservation(bad).status is Status.PASS


def test_bounds_fault_above_population():
    p = SirParams(0.3, 0.1)
    ts = [0.0, 1.0, 2.0]
    ys = [[0.5, 0.5, 0.0, 0.0, 0.0], [1.2, 0.0, -0.2, 0.0, 0.0], [0.5, 0.0, 0.5, 0.0, 0.0]]
    rec = check_bounds(Trajectory.from_nodes(p, ts, ys))
    assert rec.status is Status.FAIL
    assert rec.worst_residual >= 0.2 - 1e-12


def test_monotonicity_fault(canon):
    def bump(ys):
        # S rises and R falls relative to the previous node
        ys[40, S] = ys[39, S] + 1e-6
        ys[40, R] = ys[39, R] - 1e-6

    s_rec, r_rec = check_monotonicity(corrupted(canon, bump))
    assert s_rec.status is Status.FAIL and r_rec.status is Status.FAIL
    assert s_rec.worst_t <= canon.ts[40] + 1e-12


def test_time_reversed_trajectory_fails_monotonicity(canon):
    def reverse(ys):
        ys[:] = ys[::-1]

    bad = corrupted(canon, reverse)
    rep = run_all(bad)
    assert rep.get("s_nonincreasing").status is Status.FAIL
    assert rep.get("r_nondecreasing").status is Status.FAIL
    assert rep.get("conservation").status is Status.PASS


def test_km_fault(canon):
    def shift(ys):
        ys[30:, I] += 1e-5
        ys[30:, R] -= 1e-5

    rec = check_km_constancy(corrupted(canon, shift))
    assert rec.status is Status.FAIL
    assert rec.worst_residual > 1e-6


def test_km_skipped_without_susceptibles():
    tr = integrate(SirParams(0.3, 0.1), SirState(0.0, 0.4, 0.6), 20.0)
    rec = check_km_constancy(tr)
    assert rec.status is Status.SKIPPED
    assert rec.passed is None and rec.worst_residual is None
    assert run_all(tr).overall


def test_km_value():
    p = SirParams(0.3, 0.1)
    assert km_value(p, SirState(1.0, 0.25, 0.0)) == 1.25
    with pytest.raises(NonpositiveS):
        km_value(p, SirState(0.0, 1.0, 0.0))


def test_i_nonincreasing_on_decline():
    tr = integrate(SirParams(0.1, 0.2), SirState(0.9, 0.1, 0.0), 50.0)
    assert check_i_nonincreasing(tr).status is Status.PASS


def test_looser_tolerance_never_flips_pass_to_fail(canon):
    def bump(ys):
        ys[40, S] = ys[39, S] + 1e-9
        ys[40, R] = ys[39, R] - 1e-9

    bad = corrupted(canon, bump)
    previous = False
    for slack in (1e-13, 1e-11, 1e-9, 1e-7, 1e-5, 1e-3, 1e-1):
        ok = check_monotonicity(bad, MonitorConfig(mono_slack=slack))[0].passed
        assert ok or not previous
        previous = ok
    assert previous


def test_checks_are_deterministic(canon):
    assert run_all(canon).to_dict() == run_all(canon).to_dict()


def test_sample_count_recorded(canon):
    rep = run_all(canon, MonitorConfig(n_samples=5000))
    assert rep.n_samples >= 5000
    assert rep.to_dict()["n_samples"] == rep.n_samples


def test_large_population_scaling():
    tr = integrate(SirParams(0.3 / 1000, 0.1), SirState(990.0, 10.0, 0.0), 100.0)
    rep = run_all(tr)
    assert rep.overall
    assert MonitorConfig().resolved(tr).s_floor == pytest.approx(1e-6)


@pytest.mark.parametrize(
    "kwargs", [{"cons_tol": 0.0}, {"km_tol": -1.0}, {"mono_slack": float("nan")}, {"s_floor": 0.0}, {"n_samples": 1}]
)
def test_monitor_config_validation(kwargs):
    with pytest.raises(InvalidConfig):
        MonitorConfig(**kwargs)


def test_record_serialization(canon):
    d = run_all(canon).get("bounds").to_dict()
    assert d["status"] == "pass" and d["pass"] is True
    assert set(d) == {"name", "status", "pass", "worst_residual", "worst_t", "tolerance_used", "note"}
