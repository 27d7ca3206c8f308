"""Matched-accuracy calibration of strategy tolerances.

For one problem, runs the fixed strategy at the default step size and scans
the tolerance of every other strategy on a logarithmic grid, reporting the
fault-free global error relative to the fixed strategy. Only tolerances with
an error ratio within a factor 2 qualify.

For eps_tol only tolerances at which the controller is active (the run
differs from the fixed one) count; those restarting only on the first step
are preferred, and the ratio closest to 1 is proposed. For conv_tol the error
stops changing once the collocation problem is solved; the loosest tolerance
on that plateau is proposed if it qualifies, otherwise the tightest
qualifying one.

    python scripts/calibrate.py --problem lorenz
"""
from __future__ import annotations

import argparse
import json
import math
import time

import numpy as np

from sdc_res.controllers import Integrator, StepFailure
from sdc_res.defaults import problem_defaults
from sdc_res.harness import global_error, strategy_config
from sdc_res.problems import make_problem
from sdc_res.problems.base import SolverFailure

SCANS = {
    "k_adaptive": ("conv_tol", np.logspace(-6, -13, 15)),
    "dt_adaptive": ("eps_tol", np.logspace(-4, -12, 17)),
    "dt_k_adaptive": ("eps_tol", np.logspace(-2, -10, 17)),
}


def error_of(problem, cfg, dt, reference):
    t0 = time.perf_counter()
    try:
        with np.errstate(all="ignore"):
            run = Integrator(problem, cfg, dt).run()
    except (SolverFailure, StepFailure) as err:
        return math.inf, {"failed": str(err)}
    err, _ = global_error(problem, run.u, reference)
    st = run.stats
    return err, {"steps": st.steps, "restarts": st.restarts,
                 "late_restarts": sum(i > 0 for i in st.restart_steps), "iterations": st.iterations,
                 "seconds": round(time.perf_counter() - t0, 3)}


def propose(rows, name, fixed_error=None, plateau_rtol=5e-3):
    """Pick a tolerance from scan rows ordered from loose to tight."""
    ok = [r for r in rows if 0.5 <= r["ratio"] <= 2.0]
    if name == "eps_tol":
        ok = [r for r in ok if r["error"] != fixed_error]
        ok = [r for r in ok if r.get("late_restarts") == 0] or ok
        if not ok:
            return None
        best = min(ok, key=lambda r: abs(math.log(r["ratio"])))
        return best[name], best["ratio"]
    if not ok:
        return None
    finite = [r for r in rows if math.isfinite(r["error"])]
    plateau = float(np.median([r["error"] for r in finite[-3:]]))
    start = None
    for i, r in enumerate(finite):
        if all(abs(q["error"] / plateau - 1) < plateau_rtol for q in finite[i:]):
            start = r
            break
    if start is not None and start in ok:
        return start[name], start["ratio"]
    return ok[-1][name], ok[-1]["ratio"]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problem", default="lorenz")
    ap.add_argument("--dt", type=float, default=None)
    ap.add_argument("--strategies", nargs="*", default=list(SCANS))
    ap.add_argument("--out", default=None, help="write the scan as JSON here")
    args = ap.parse_args(argv)

    problem = make_problem(args.problem)
    dt = args.dt or problem_defaults(args.problem).dt
    reference = problem.reference_solution(problem.t_end)
    fixed_err, info = error_of(problem, strategy_config(args.problem, "fixed"), dt, reference)
    print(f"{args.problem}: dt={dt} fixed error {fixed_err:.3e} {info}")
    report = {"problem": args.problem, "dt": dt, "fixed_error": fixed_err, "scans": {}}
    for kind in args.strategies:
        name, grid = SCANS[kind]
        rows = []
        for val in grid:
            cfg = strategy_config(args.problem, kind, {name: float(val)})
            err, info = error_of(problem, cfg, dt, reference)
            ratio = err / fixed_err
            rows.append({name: float(val), "error": err, "ratio": ratio, **info})
            print(f"  {kind:14s} {name}={val:.2e} error {err:.3e} ratio {ratio:8.3f} {info}", flush=True)
        best = propose(rows, name, fixed_err)
        report["scans"][kind] = {"parameter": name, "rows": rows, "proposed": best}
        print(f"  -> proposed {name} for {kind}: {best}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, default=str)


if __name__ == "__main__":
    main()
