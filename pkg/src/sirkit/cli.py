"""Command-line front end.

Exit codes: 0 success, 2 bad input/config, 3 integration failure,
4 an invariant check failed and ``--strict`` was given.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .errors import SirkitError, StepBudgetExhausted, StepUnderflow
from .integrator import integrate
from .io import (
    build_report,
    dump_json,
    load_scenarios,
    read_trajectory_csv,
    report_ok,
    write_trajectory_csv,
)
from .model import SirParams, SirState
from .monitor import MonitorConfig
from .phase_plane import level_value, trace_level_curve

log = logging.getLogger("sirkit")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_STRICT = 4


def _simulate_one(scenario, out_dir: Path, strict: bool, samples: int | None) -> int:
    if samples is not None:
        scenario = replace(scenario, monitor=replace(scenario.monitor, n_samples=samples))
    try:
        tr = integrate(scenario.params, scenario.init, scenario.t_end, scenario.integrator)
    except (StepBudgetExhausted, StepUnderflow) as exc:
        log.error("integration failed: %s", exc)
        return EXIT_INTEGRATION
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(tr, out_dir / "trajectory.csv")
    report = build_report(tr, scenario.echo(), scenario.monitor, source="integrate")
    dump_json(report, out_dir / "report.json")
    if not report_ok(report):
        log.warning("invariant checks failed: %s", ", ".join(report["invariants"]["failing"]) or "i_nonincreasing")
        if strict:
            return EXIT_STRICT
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenarios = load_scenarios(args.config)
    out = Path(args.out)
    if len(scenarios) == 1 and not args.sweep:
        return _simulate_one(scenarios[0], out, args.strict, args.samples)
    if not args.sweep:
        raise SirkitError("config holds several scenarios; pass --sweep to run them all")
    dirs = [out / f"scenario_{k:03d}" for k in range(len(scenarios))]
    with ThreadPoolExecutor() as pool:
        codes = list(pool.map(lambda sd: _simulate_one(sd[0], sd[1], args.strict, args.samples), zip(scenarios, dirs)))
    return max(codes)


def cmd_check(args) -> int:
    params = SirParams(args.beta, args.gamma)
    tr = read_trajectory_csv(args.trajectory, params)
    monitor = MonitorConfig(n_samples=args.samples)
    echo = {
        "beta": params.beta,
        "gamma": params.gamma,
        "init_s": tr.init.s,
        "init_i": tr.init.i,
        "init_r": tr.init.r,
        "t_end": tr.t_end,
    }
    report = build_report(tr, echo, monitor, source=str(args.trajectory))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(report, out / "report.json")
    if not report_ok(report):
        log.warning("invariant checks failed: %s", ", ".join(report["invariants"]["failing"]) or "i_nonincreasing")
        if args.strict:
            return EXIT_STRICT
    return EXIT_OK


def cmd_levelcurve(args) -> int:
    params = SirParams(args.beta, args.gamma)
    if args.from_init is not None:
        s, i, r = args.from_init
        init = SirState(s, i, r)
        if not init.s > 0:
            raise SirkitError("--from-init needs S > 0: the level-curve invariant is only stated for S(a) > 0")
        v0 = level_value(params, init)
    else:
        v0 = args.v0
    curve = trace_level_curve(params, v0, (args.s_min, args.s_max), args.n)
    curve.write_csv(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sirkit", description="SIR integration and invariant monitoring")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a scenario and check its invariants")
    sim.add_argument("--config", required=True, help="scenario JSON (object, or list with --sweep)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--strict", action="store_true", help="exit 4 if any invariant check fails")
    sim.add_argument("--samples", type=int, default=None, help="uniform monitoring samples")
    sim.add_argument("--sweep", action="store_true", help="run every scenario in a list config")
    sim.set_defaults(func=cmd_simulate)

    chk = sub.add_parser("check", help="re-run the invariant checks on a trajectory.csv")
    chk.add_argument("--trajectory", required=True)
    chk.add_argument("--beta", type=float, required=True)
    chk.add_argument("--gamma", type=float, required=True)
    chk.add_argument("--out", default=".", help="directory for report.json (default: cwd)")
    chk.add_argument("--strict", action="store_true")
    chk.add_argument("--samples", type=int, default=None)
    chk.set_defaults(func=cmd_check)

    lvl = sub.add_parser("levelcurve", help="export a Kermack-McKendrick level curve as CSV")
    lvl.add_argument("--beta", type=float, required=True)
    lvl.add_argument("--gamma", type=float, required=True)
    src = lvl.add_mutually_exclusive_group(required=True)
    src.add_argument("--v0", type=float)
    src.add_argument("--from-init", type=float, nargs=3, metavar=("S", "I", "R"))
    lvl.add_argument("--s-min", type=float, required=True)
    lvl.add_argument("--s-max", type=float, required=True)
    lvl.add_argument("--n", type=int, required=True)
    lvl.add_argument("--out", required=True)
    lvl.set_defaults(func=cmd_levelcurve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (StepBudgetExhausted, StepUnderflow) as exc:
        log.error("integration failed: %s", exc)
        return EXIT_INTEGRATION
    except SirkitError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
