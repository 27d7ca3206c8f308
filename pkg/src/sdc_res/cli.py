"""Command-line entry point ``sdc-res`` with subcommands run, campaign and stats.

Exit codes: 0 success, 1 configuration error, 2 I/O error. Numerical
failures inside trials are results, not errors, and never change the code.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .controllers import KINDS
from .defaults import problem_defaults
from .faults import FaultSpec
from .harness import (ConfigError, CampaignConfig, aggregate, crashed_under_all, read_trials, recoverable_filter,
                      run_campaign, run_trial, strategy_config)
from .problems import PROBLEMS, make_problem

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

_FAULT_KEYS = {"bit": "bit", "node": "node", "iter": "iteration", "iteration": "iteration",
               "component": "component", "comp": "component"}


def parse_fault(text: str, t_fault: float) -> FaultSpec:
    """Parse ``bit=..,node=..,iter=..,component=..`` into a FaultSpec."""
    vals = {}
    for part in text.split(","):
        if not part.strip():
            continue
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep or key not in _FAULT_KEYS:
            raise ConfigError(f"bad fault field {part!r}; expected bit=,node=,iter=,component=")
        try:
            vals[_FAULT_KEYS[key]] = int(val)
        except ValueError as err:
            raise ConfigError(f"fault field {key} needs an integer, got {val!r}") from err
    missing = {"bit", "node", "iteration"} - set(vals)
    if missing:
        raise ConfigError(f"fault is missing {sorted(missing)}")
    vals.setdefault("component", 0)
    try:
        return FaultSpec(t_fault=t_fault, **vals)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def _cmd_run(args) -> int:
    name = args.problem.replace("_", "-")
    problem = make_problem(name)
    over = {}
    if args.eps_tol is not None:
        over["eps_tol"] = args.eps_tol
    if args.conv_tol is not None:
        over["conv_tol"] = args.conv_tol
    if args.threshold_hot_rod is not None:
        over["hot_rod_threshold"] = args.threshold_hot_rod
    cfg = strategy_config(name, args.strategy, over, args.restart_on_crash)
    if args.dt is not None and not args.dt > 0:
        raise ConfigError("--dt must be positive")
    dt = args.dt or problem_defaults(name).dt
    t_fault = problem.t_fault if args.t_fault is None else args.t_fault
    fault = parse_fault(args.fault, t_fault) if args.fault else None
    if fault is not None and fault.node > 3:
        raise ConfigError("node must be in [0, M] with M = 3")
    if fault is not None and fault.component >= problem.n_words:
        raise ConfigError(f"component must be below {problem.n_words}")
    reference = problem.reference_solution(problem.t_end)
    base = run_trial(problem, cfg, dt, None, reference)
    rec = base if fault is None else run_trial(problem, cfg, dt, fault, reference, base.global_error)
    rec.faultfree_error = base.global_error
    out = {"problem": name, "strategy": cfg.kind, "dt": dt, "fault": fault.to_dict() if fault else None,
           "global_error": rec.global_error, "faultfree_error": base.global_error, "error_kind": rec.error_kind,
           "ratio": rec.ratio, "crashed": rec.crashed, "crash_reason": rec.crash_reason, "restarts": rec.restarts,
           "iterations": rec.total_iterations, "steps": rec.steps, "fired": rec.fired}
    json.dump({k: (str(v) if isinstance(v, float) and not math.isfinite(v) else v) for k, v in out.items()},
              sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_campaign(args) -> int:
    cfg = CampaignConfig.from_json(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    if args.restart_on_crash:
        cfg.restart_on_crash = True
    CampaignConfig.__post_init__(cfg)
    progress = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    result = run_campaign(cfg, progress=progress)
    summary = result.manifest["summary"]
    print(f"{cfg.problem}: {result.manifest['n_faults']} faults, results in {cfg.output_dir}")
    for kind, s in summary.items():
        print(f"  {kind:14s} recovery {_fmt(s['recovery_rate'])}  recoverable {_fmt(s['recoverable_recovery_rate'])}"
              f"  crashed {s['crashed']}/{s['trials']}")
    return EXIT_OK


def _fmt(x):
    return "   n/a" if x is None else f"{100 * x:6.2f}%"


def _cmd_stats(args) -> int:
    records = read_trials(args.input)
    rows = aggregate(records, args.by, args.threshold, args.last_iteration)
    key = "recoverable_rate" if args.recoverable_only else "rate"
    nkey = "n_recoverable" if args.recoverable_only else "n"
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["strategy", args.by, "n", "rate"])
    for row in rows:
        rate = row[key]
        w.writerow([row["strategy"], row[args.by], row[nkey], "" if rate is None else f"{rate:.6f}"])
    if args.recoverable_only:
        crashed = crashed_under_all(records)
        n = sum(recoverable_filter(r, crashed, args.last_iteration) for r in records)
        print(f"# {n} of {len(records)} trials recoverable", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sdc-res", description="Resilient adaptive SDC experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one fault-free or faulty run")
    run.add_argument("--problem", required=True, choices=sorted(set(PROBLEMS) | {"allen_cahn"}))
    run.add_argument("--strategy", default="fixed", choices=KINDS)
    run.add_argument("--fault", default=None, help="bit=..,node=..,iter=..,component=..")
    run.add_argument("--dt", type=float, default=None)
    run.add_argument("--eps-tol", type=float, default=None)
    run.add_argument("--conv-tol", type=float, default=None)
    run.add_argument("--threshold-hot-rod", type=float, default=None)
    run.add_argument("--t-fault", type=float, default=None)
    run.add_argument("--restart-on-crash", action="store_true")
    run.set_defaults(func=_cmd_run)

    camp = sub.add_parser("campaign", help="fault-injection campaign from a JSON config or manifest")
    camp.add_argument("--config", required=True)
    camp.add_argument("--workers", type=int, default=None)
    camp.add_argument("--output-dir", default=None)
    camp.add_argument("--restart-on-crash", action="store_true")
    camp.add_argument("--quiet", action="store_true")
    camp.set_defaults(func=_cmd_campaign)

    st = sub.add_parser("stats", help="recovery rates from a trial CSV")
    st.add_argument("--input", required=True)
    st.add_argument("--by", choices=("bit", "node", "iteration"), default="bit")
    st.add_argument("--recoverable-only", action="store_true")
    st.add_argument("--threshold", type=float, default=1.1)
    st.add_argument("--last-iteration", type=int, default=5)
    st.set_defaults(func=_cmd_stats)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"sdc-res: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"sdc-res: I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except ValueError as err:
        print(f"sdc-res: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
