"""
Fault-injection campaigns: baselines, trials, recovery classification and output.

A campaign runs every strategy once without faults (the baseline), keeps a
snapshot of that run just before the step containing ``t_fault`` and starts
each fault trial from a copy of the snapshot. Everything before the fault
is deterministic, so this gives the same trajectories as integrating from
``t0`` while halving the cost of a trial.
"""
from __future__ import annotations

import copy
import csv
import dataclasses
import hashlib
import json
import math
import os
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from . import __version__
from .collocation import make_table
from .controllers import KINDS, Integrator, StepFailure, StrategyConfig
from .defaults import problem_defaults
from .faults import FaultSpec, enumerate_faults, sample_faults
from .hotrod import calibrate_threshold
from .problems import make_problem
from .problems.base import SolverFailure, SolverNonConvergence, SolverOverflow

TRIAL_HEADER = ["problem", "strategy", "seed", "bit", "node", "iteration", "component", "t_fault",
                "global_error", "faultfree_error", "restarts", "crashed", "recovered"]
DETAIL_HEADER = ["seed", "strategy", "fired", "crash_reason", "iterations", "rhs_evaluations", "steps",
                 "wall_time"]


class ConfigError(ValueError):
    """Invalid campaign or command-line configuration."""


# ---------------------------------------------------------------------------
# records


@dataclass
class TrialRecord:
    problem: str
    strategy: str
    fault: FaultSpec | None
    global_error: float
    faultfree_error: float | None
    crashed: bool = False
    restarts: int = 0
    total_iterations: int = 0
    total_rhs_evaluations: int = 0
    steps: int = 0
    wall_time: float = 0.0
    fired: bool = False
    crash_reason: str = ""
    error_kind: str = "absolute"

    @property
    def ratio(self) -> float:
        if self.faultfree_error is None or self.faultfree_error <= 0:
            return math.nan
        return self.global_error / self.faultfree_error

    def fault_key(self):
        f = self.fault
        return None if f is None else (f.seed, f.iteration, f.node, f.component, f.bit)

    def csv_row(self, threshold: float) -> list[str]:
        f = self.fault
        cells = [self.problem, self.strategy]
        if f is None:
            cells += ["", "", "", "", "", ""]
        else:
            cells += [str(f.seed), str(f.bit), str(f.node), str(f.iteration), str(f.component), repr(f.t_fault)]
        ffe = "" if self.faultfree_error is None else repr(self.faultfree_error)
        cells += [repr(self.global_error), ffe, str(self.restarts), str(int(self.crashed)),
                  str(int(classify_recovered(self, threshold)))]
        return cells

    @classmethod
    def from_row(cls, row: dict) -> "TrialRecord":
        fault = None
        if row.get("bit", "") != "":
            fault = FaultSpec(iteration=int(row["iteration"]), node=int(row["node"]),
                              component=int(row["component"]), bit=int(row["bit"]),
                              t_fault=float(row["t_fault"]), seed=int(row["seed"]))
        ffe = row.get("faultfree_error", "")
        return cls(problem=row["problem"], strategy=row["strategy"], fault=fault,
                   global_error=float(row["global_error"]), faultfree_error=float(ffe) if ffe else None,
                   crashed=row["crashed"] in ("1", "True", "true"), restarts=int(row["restarts"]))


def classify_recovered(record: TrialRecord, threshold: float = 1.1) -> bool:
    """Recovered iff the trial did not crash and its error stayed within ``threshold`` of the baseline."""
    if record.faultfree_error is None:
        raise ValueError("recovery needs the fault-free error of the same strategy")
    if record.crashed or not math.isfinite(record.global_error):
        return False
    return record.global_error <= threshold * record.faultfree_error


def recovery_rate(records, threshold: float = 1.1, predicate=None) -> float | None:
    """Fraction of (filtered) records that recovered; None for an empty selection."""
    sel = [r for r in records if predicate is None or predicate(r)]
    if not sel:
        return None
    return sum(classify_recovered(r, threshold) for r in sel) / len(sel)


def crashed_under_all(records) -> set:
    """Fault keys whose trial crashed under every strategy that ran them."""
    by_fault = defaultdict(list)
    for r in records:
        if r.fault is not None:
            by_fault[r.fault_key()].append(r.crashed)
    return {k for k, v in by_fault.items() if v and all(v)}


def recoverable_filter(record: TrialRecord, crashed_everywhere=frozenset(), last_iteration: int = 5) -> bool:
    """False for faults no strategy can be expected to recover from.

    These are faults to the initial condition (node 0) before the last
    iteration of the fixed strategy, and faults whose trial crashed under
    every strategy.
    """
    f = record.fault
    if f is None:
        return False
    if f.node == 0 and f.iteration < last_iteration:
        return False
    return record.fault_key() not in crashed_everywhere


def threshold_scan(records, thresholds, predicate=None) -> list[tuple[float, str, float | None]]:
    """Recovery rate per strategy at each threshold."""
    by_strategy = defaultdict(list)
    for r in records:
        if r.fault is not None:
            by_strategy[r.strategy].append(r)
    out = []
    for thr in thresholds:
        for strat in sorted(by_strategy, key=_strategy_order):
            out.append((float(thr), strat, recovery_rate(by_strategy[strat], thr, predicate)))
    return out


def _strategy_order(kind: str) -> int:
    return KINDS.index(kind) if kind in KINDS else len(KINDS)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class CampaignConfig:
    problem: str = "lorenz"
    strategies: list = field(default_factory=lambda: list(KINDS))
    fault_mode: str = "enumerate"
    n_faults: int | None = None
    n_recoverable: int | None = None
    seed: int = 0
    recovery_threshold: float = 1.1
    output_dir: str = "results/campaign"
    workers: int = 1
    dt: float | None = None
    t_fault: float | None = None
    M: int = 3
    restart_on_crash: bool = False
    hot_rod_safety: float = 5.0
    problem_params: dict = field(default_factory=dict)
    strategy_overrides: dict = field(default_factory=dict)
    thresholds: list = field(default_factory=lambda: [1.0, 1.01, 1.05, 1.1, 1.2, 1.5, 2.0, 5.0, 10.0, math.inf])
    batch_size: int = 100

    def __post_init__(self):
        if not self.strategies:
            raise ConfigError("need at least one strategy")
        for s in self.strategies:
            if s not in KINDS:
                raise ConfigError(f"unknown strategy {s!r}, expected one of {KINDS}")
        if len(set(self.strategies)) != len(self.strategies):
            raise ConfigError("duplicate strategies")
        if "fixed" not in self.strategies:
            raise ConfigError("the strategy list must include 'fixed' as the no-resilience reference")
        if self.fault_mode not in ("enumerate", "sample"):
            raise ConfigError("fault_mode is 'enumerate' or 'sample'")
        if self.fault_mode == "sample" and not (self.n_faults or self.n_recoverable):
            raise ConfigError("sampling needs n_faults or n_recoverable")
        if self.recovery_threshold < 1.0:
            raise ConfigError("recovery_threshold must be >= 1")
        if self.workers < 1:
            raise ConfigError("need at least one worker")
        if self.M < 3:
            raise ConfigError("M >= 3 is needed by the interpolation-based error estimate")
        for kind in self.strategy_overrides:
            if kind not in KINDS:
                raise ConfigError(f"override for unknown strategy {kind!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["thresholds"] = [_json_float(t) for t in self.thresholds]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        if "config" in d and isinstance(d["config"], dict):
            d = d["config"]  # a manifest
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "thresholds" in d:
            d["thresholds"] = [math.inf if t in (None, "inf", "Infinity") else float(t) for t in d["thresholds"]]
        try:
            return cls(**d)
        except TypeError as err:
            raise ConfigError(str(err)) from err

    @classmethod
    def from_json(cls, path) -> "CampaignConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as err:
                raise ConfigError(f"{path}: invalid JSON ({err})") from err
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_dict(data)


def strategy_config(problem_name: str, kind: str, overrides: dict | None = None,
                    restart_on_crash: bool = False) -> StrategyConfig:
    """Calibrated defaults for ``kind`` on ``problem_name`` plus explicit overrides."""
    base = dict(problem_defaults(problem_name).strategies.get(kind, {}))
    base.update(overrides or {})
    base["kind"] = kind
    base["restart_on_solver_failure"] = restart_on_crash or base.get("restart_on_solver_failure", False)
    known = {f.name for f in dataclasses.fields(StrategyConfig)}
    unknown = set(base) - known
    if unknown:
        raise ConfigError(f"unknown strategy parameters: {sorted(unknown)}")
    try:
        return StrategyConfig(**base)
    except ValueError as err:
        raise ConfigError(str(err)) from err


# ---------------------------------------------------------------------------
# trials


def global_error(problem, u, reference) -> tuple[float, str]:
    """Max-norm error at t_end, relative for problems flagged so (Lorenz)."""
    if not np.all(np.isfinite(u)):
        return math.inf, "relative" if problem.relative_error else "absolute"
    err = problem.norm(np.asarray(u) - reference)
    if problem.relative_error:
        return err / problem.norm(reference), "relative"
    return err, "absolute"


def _crash_reason(err) -> str:
    if isinstance(err, SolverOverflow):
        return "solver-overflow"
    if isinstance(err, SolverNonConvergence):
        return "solver-nonconvergence"
    if isinstance(err, SolverFailure):
        return "non-finite"
    if isinstance(err, StepFailure):
        return "step-failure"
    return type(err).__name__


def run_trial(problem, cfg: StrategyConfig, dt: float, fault: FaultSpec | None = None, reference=None,
              faultfree_error: float | None = None, table=None, start: Integrator | None = None,
              max_steps: int | None = None) -> TrialRecord:
    """Integrate to t_end with ``fault`` installed; numerical failures become record fields.

    ``start`` is an integrator snapshot to resume from (copied, not modified).
    """
    if reference is None:
        reference = problem.reference_solution(problem.t_end)
    t_start = time.perf_counter()
    if start is not None:
        integ = copy.deepcopy(start)
        integ.set_fault(fault)
    else:
        integ = Integrator(problem, cfg, dt, table=table, fault=fault, max_steps=max_steps)
    crashed, reason = False, ""
    with np.errstate(all="ignore"):
        try:
            integ.run()
            err, kind = global_error(problem, integ.u, reference)
            if not math.isfinite(err):
                crashed, reason = True, "non-finite-final"
        except (SolverFailure, StepFailure, FloatingPointError, OverflowError) as exc:
            crashed, reason = True, _crash_reason(exc)
            err, kind = math.inf, "relative" if problem.relative_error else "absolute"
    st = integ.stats
    return TrialRecord(problem=problem.name, strategy=cfg.kind, fault=fault, global_error=err,
                       faultfree_error=faultfree_error, crashed=crashed, restarts=st.restarts,
                       total_iterations=st.iterations, total_rhs_evaluations=st.rhs_evaluations, steps=st.steps,
                       wall_time=time.perf_counter() - t_start, fired=integ.injector.fired,
                       crash_reason=reason, error_kind=kind)


@dataclass
class Baseline:
    strategy: str
    cfg: StrategyConfig
    snapshot: Integrator
    faultfree_error: float
    steps: int
    restarts: int
    iterations: int
    rhs_evaluations: int
    max_delta: float | None = None
    false_positive_restarts: int | None = None
    error_kind: str = "absolute"
    late_restarts: int = 0

    def summary(self) -> dict:
        return {"faultfree_error": self.faultfree_error, "error_kind": self.error_kind, "steps": self.steps,
                "restarts": self.restarts, "late_restarts": self.late_restarts, "iterations": self.iterations,
                "rhs_evaluations": self.rhs_evaluations,
                "max_delta": self.max_delta, "hot_rod_threshold": self.cfg.hot_rod_threshold,
                "false_positive_restarts": self.false_positive_restarts}


def make_baseline(problem, cfg: StrategyConfig, dt: float, reference, table, t_fault: float,
                  max_steps: int | None = None, hot_rod_safety: float = 5.0) -> Baseline:
    """Fault-free run with a snapshot before the fault step; calibrates Hot Rod."""
    integ = Integrator(problem, cfg, dt, table=table, max_steps=max_steps)
    with np.errstate(all="ignore"):
        integ.run(until=t_fault)
        snapshot = copy.deepcopy(integ)
        integ.run()
    err, kind = global_error(problem, integ.u, reference)
    if not math.isfinite(err) or err <= 0:
        raise RuntimeError(f"baseline for {cfg.kind} produced global error {err}")
    base = Baseline(strategy=cfg.kind, cfg=cfg, snapshot=snapshot, faultfree_error=err, steps=integ.stats.steps,
                    restarts=integ.stats.restarts, iterations=integ.stats.iterations,
                    rhs_evaluations=integ.stats.rhs_evaluations, error_kind=kind,
                    late_restarts=sum(i > 0 for i in integ.stats.restart_steps))
    if cfg.kind == "hot_rod":
        deltas = [d for d in integ.hotrod.deltas if math.isfinite(d)]
        base.max_delta = max(deltas) if deltas else None
        thr = calibrate_threshold(deltas, hot_rod_safety) if deltas else math.inf
        cfg = dataclasses.replace(cfg, hot_rod_threshold=thr)
        base.cfg = cfg
        snapshot.cfg = dataclasses.replace(snapshot.cfg, hot_rod_threshold=thr)
        snapshot.hotrod.threshold = thr
        check = Integrator(problem, cfg, dt, table=table, max_steps=max_steps)
        with np.errstate(all="ignore"):
            check.run()
        base.false_positive_restarts = check.stats.restarts
    return base


# ---------------------------------------------------------------------------
# campaign


_CTX: dict = {}


def _run_indices(indices):
    ctx = _CTX
    out = []
    for i in indices:
        fault = ctx["faults"][i]
        for kind in ctx["strategies"]:
            b = ctx["baselines"][kind]
            rec = run_trial(ctx["problem"], b.cfg, ctx["dt"], fault, ctx["reference"], b.faultfree_error,
                            start=b.snapshot)
            out.append((i, kind, rec))
    return out


def _execute(indices, workers):
    """Run the trials of ``indices`` and return them ordered by (index, strategy)."""
    results = []
    if workers <= 1 or len(indices) < 2:
        results = _run_indices(indices)
    else:
        chunks = [indices[j::workers * 4] for j in range(workers * 4)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork")) as pool:
            for part in pool.map(_run_indices, chunks):
                results.extend(part)
    order = {k: n for n, k in enumerate(_CTX["strategies"])}
    results.sort(key=lambda r: (r[0], order[r[1]]))
    return results


def validate_output_dir(path) -> Path:
    """Create ``path`` and make sure files can be written there (raises OSError)."""
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    probe = p / ".write-test"
    with open(probe, "w") as fh:
        fh.write("ok")
    probe.unlink()
    return p


@dataclass
class CampaignResult:
    config: CampaignConfig
    records: list
    baselines: dict
    manifest: dict
    details: list = field(default_factory=list)


def run_campaign(config: CampaignConfig, write: bool = True, progress=None) -> CampaignResult:
    out_dir = validate_output_dir(config.output_dir) if write else None
    try:
        problem = make_problem(config.problem, config.problem_params)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err
    defaults = problem_defaults(config.problem)
    dt = config.dt or defaults.dt
    t_fault = problem.t_fault if config.t_fault is None else config.t_fault
    if not problem.t0 <= t_fault < problem.t_end:
        raise ConfigError(f"t_fault={t_fault} outside [{problem.t0}, {problem.t_end})")
    table = make_table(config.M)
    strategies = list(config.strategies)
    cfgs = {k: strategy_config(config.problem, k, config.strategy_overrides.get(k), config.restart_on_crash)
            for k in strategies}
    last_iteration = cfgs["fixed"].k_max
    max_steps = int(50 * math.ceil((problem.t_end - problem.t0) / dt)) + 100

    t0 = time.perf_counter()
    reference = problem.reference_solution(problem.t_end)
    baselines = {k: make_baseline(problem, cfgs[k], dt, reference, table, t_fault, max_steps, config.hot_rod_safety)
                 for k in strategies}
    if progress:
        progress(f"baselines done in {time.perf_counter() - t0:.1f}s")

    n_words, M = problem.n_words, table.M
    _CTX.clear()
    _CTX.update(problem=problem, dt=dt, reference=reference, baselines=baselines, strategies=strategies)

    if config.fault_mode == "enumerate":
        faults = enumerate_faults(n_words, M, t_fault)
        if config.n_faults is not None:
            faults = faults[: config.n_faults]
        _CTX["faults"] = faults
        results = _execute(list(range(len(faults))), config.workers)
    else:
        faults, results = _sampled(config, n_words, M, t_fault, last_iteration, progress)

    records = [r for _, _, r in results]
    manifest = build_manifest(config, problem, dt, t_fault, cfgs, baselines, records, faults, last_iteration)
    manifest["timing"] = {"campaign_seconds": time.perf_counter() - t0}
    result = CampaignResult(config, records, baselines, manifest)
    if write:
        emit_results(result, out_dir)
    return result


def _sampled(config, n_words, M, t_fault, last_iteration, progress):
    """Sample faults until ``n_faults`` are drawn or ``n_recoverable`` recoverable ones are run."""
    target = config.n_recoverable
    limit = config.n_faults if target is None else max(50 * target, 1000)
    faults, results, next_index = [], [], 0
    n_rec = 0
    while next_index < limit:
        n = min(config.batch_size, limit - next_index)
        batch = sample_faults(config.seed, n_words, M, t_fault, n, start=next_index)
        next_index += n
        if target is not None:
            # node-0 faults before the final fixed iteration can never be recovered
            batch = [f for f in batch if not (f.node == 0 and f.iteration < last_iteration)]
        start = len(faults)
        faults.extend(batch)
        _CTX["faults"] = faults
        part = _execute(list(range(start, len(faults))), config.workers)
        results.extend(part)
        if target is None:
            continue
        by_idx = defaultdict(list)
        for i, _, r in part:
            by_idx[i].append(r.crashed)
        cut = None
        for i in sorted(by_idx):
            if not all(by_idx[i]):
                n_rec += 1
                if n_rec == target:
                    cut = i
                    break
        if progress:
            progress(f"{len(faults)} faults run, {n_rec} recoverable")
        if cut is not None:
            faults = faults[: cut + 1]
            results = [r for r in results if r[0] <= cut]
            break
    return faults, results


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _json_float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def build_manifest(config, problem, dt, t_fault, cfgs, baselines, records, faults, last_iteration) -> dict:
    crashed_all = crashed_under_all(records)
    pred = lambda r: recoverable_filter(r, crashed_all, last_iteration)  # noqa: E731
    rates = {}
    for kind in config.strategies:
        sel = [r for r in records if r.strategy == kind]
        rates[kind] = {
            "trials": len(sel),
            "fired": sum(r.fired for r in sel),
            "crashed": sum(r.crashed for r in sel),
            "recovery_rate": recovery_rate(sel, config.recovery_threshold),
            "recoverable_trials": sum(pred(r) for r in sel),
            "recoverable_recovery_rate": recovery_rate(sel, config.recovery_threshold, pred),
        }
    return _sanitize({
        "config": config.to_dict(),
        "library_version": __version__,
        "problem": problem.metadata(),
        "dt": dt,
        "t_fault": t_fault,
        "M": config.M,
        "n_words": problem.n_words,
        "strategies": {k: baselines[k].cfg.to_dict() for k in config.strategies},
        "baselines": {k: baselines[k].summary() for k in config.strategies},
        "n_faults": len(faults),
        "crashed_under_all_strategies": len(crashed_all),
        "summary": rates,
        "files": {"trials": "trials.csv", "details": "trial_details.csv", "by_bit": "by_bit.csv",
                  "by_node": "by_node.csv", "by_iteration": "by_iteration.csv",
                  "threshold_scan": "threshold_scan.csv"},
    })


# ---------------------------------------------------------------------------
# output


def aggregate(records, by: str, threshold: float = 1.1, last_iteration: int = 5) -> list[dict]:
    """Counts and recovery rates per strategy and per value of ``by`` (bit, node or iteration)."""
    if by not in ("bit", "node", "iteration"):
        raise ValueError("aggregate by 'bit', 'node' or 'iteration'")
    crashed_all = crashed_under_all(records)
    groups = defaultdict(list)
    for r in records:
        if r.fault is not None:
            groups[(r.strategy, getattr(r.fault, by))].append(r)
    rows = []
    for (strat, key) in sorted(groups, key=lambda k: (_strategy_order(k[0]), k[1])):
        sel = groups[(strat, key)]
        rec = [r for r in sel if recoverable_filter(r, crashed_all, last_iteration)]
        n_ok = sum(classify_recovered(r, threshold) for r in sel)
        n_rok = sum(classify_recovered(r, threshold) for r in rec)
        rows.append({"strategy": strat, by: key, "n": len(sel), "recovered": n_ok,
                     "rate": n_ok / len(sel), "n_recoverable": len(rec), "recoverable_recovered": n_rok,
                     "recoverable_rate": (n_rok / len(rec)) if rec else None})
    return rows


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])


def emit_results(result: CampaignResult, out_dir) -> dict:
    """Write trial CSV, details, aggregates, threshold scan and manifest; returns the paths."""
    out = Path(out_dir)
    cfg = result.config
    thr = cfg.recovery_threshold
    last_iteration = result.baselines["fixed"].cfg.k_max if "fixed" in result.baselines else 5
    paths = {k: out / v for k, v in result.manifest["files"].items()}
    _write_rows(paths["trials"], TRIAL_HEADER, [r.csv_row(thr) for r in result.records])
    _write_rows(paths["details"], DETAIL_HEADER,
                [[r.fault.seed if r.fault else "", r.strategy, int(r.fired), r.crash_reason, r.total_iterations,
                  r.total_rhs_evaluations, r.steps, round(r.wall_time, 6)] for r in result.records])
    for by in ("bit", "node", "iteration"):
        rows = aggregate(result.records, by, thr, last_iteration)
        header = ["strategy", by, "n", "recovered", "rate", "n_recoverable", "recoverable_recovered",
                  "recoverable_rate"]
        _write_rows(paths[f"by_{by}"], header, [[row[h] for h in header] for row in rows])
    crashed_all = crashed_under_all(result.records)
    pred = lambda r: recoverable_filter(r, crashed_all, last_iteration)  # noqa: E731
    scan = threshold_scan(result.records, cfg.thresholds)
    scan_rec = threshold_scan(result.records, cfg.thresholds, pred)
    _write_rows(paths["threshold_scan"], ["threshold", "strategy", "rate", "recoverable_rate"],
                [[_json_float(t), s, r, rr] for (t, s, r), (_, _, rr) in zip(scan, scan_rec)])
    manifest = dict(result.manifest)
    manifest["trials_sha256"] = hashlib.sha256(paths["trials"].read_bytes()).hexdigest()
    mpath = out / "manifest.json"
    tmp = mpath.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump(_sanitize(manifest), fh, indent=2, sort_keys=True)
    os.replace(tmp, mpath)
    paths["manifest"] = mpath
    result.manifest = manifest
    return paths


def read_trials(path) -> list[TrialRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRIAL_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [TrialRecord.from_row(row) for row in reader]
