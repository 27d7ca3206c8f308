"""Convergence orders of converged collocation and of k fixed sweeps.

Prints the global error table and the fitted slopes on Lorenz (t_end = 1)
and on the Dahlquist test equation, optionally writing them as CSV.

    python scripts/order_study.py --csv results/orders.csv
"""
from __future__ import annotations

import argparse
import csv
import math

import numpy as np

from sdc_res.controllers import Integrator, StrategyConfig
from sdc_res.problems import Dahlquist
from sdc_res.problems.lorenz import Lorenz, LorenzParams


def _error(problem, cfg, dt, ref):
    return float(np.max(np.abs(Integrator(problem, cfg, dt).run().u - ref)))


def study(problem, ref, dts, k_values):
    rows = []
    cfgs = [(f"k={k}", StrategyConfig("fixed", k_max=k)) for k in k_values]
    cfgs.append(("collocation", StrategyConfig("k_adaptive", conv_tol=1e-13, k_cap=40)))
    for label, cfg in cfgs:
        errs = [_error(problem, cfg, dt, ref) for dt in dts]
        slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
        rows.append((label, errs, slope))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv", default=None, help="write problem,method,dt,error,slope rows here")
    args = ap.parse_args(argv)
    lorenz = Lorenz(LorenzParams(t_end=1.0))
    dq = Dahlquist(lam=-1.0, t_end=1.0)
    cases = [("lorenz", lorenz, lorenz.reference_solution(1.0), [2e-2, 1e-2, 5e-3, 2.5e-3]),
             ("dahlquist", dq, np.array([math.exp(-1.0)]), [0.2, 0.1, 0.05])]
    out = []
    for name, problem, ref, dts in cases:
        print(f"{name}: dt = {dts}")
        for label, errs, slope in study(problem, ref, dts, range(1, 6)):
            print(f"  {label:12s} slope {slope:5.2f}  errors " + " ".join(f"{e:.2e}" for e in errs))
            out += [(name, label, dt, e, slope) for dt, e in zip(dts, errs)]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["problem", "method", "dt", "error", "slope"])
            w.writerows(out)


if __name__ == "__main__":
    main()
