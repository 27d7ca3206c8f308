"""
Stepping strategies: fixed, k-adaptive, dt-adaptive, dt-k-adaptive and Hot Rod.

``run_step`` performs one attempt at a step and reports whether it was
accepted; ``Integrator`` drives a whole run, handling restarts, step-size
updates, the fault hook and the Hot Rod history.
"""
from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .collocation import CollocationTable, interpolate, make_table
from .faults import FaultInjector, FaultSpec
from .hotrod import HotRodState
from .problems.base import Problem, SolverFailure
from .sweeper import (SweepState, collocation_update, increment, residual, respread, spread,
                      sweep)

KINDS = ("fixed", "k_adaptive", "dt_adaptive", "dt_k_adaptive", "hot_rod")


class StepFailure(RuntimeError):
    """A step was restarted more often than allowed, or the run took too many steps."""


@dataclass
class StrategyConfig:
    kind: str = "fixed"
    k_max: int = 5
    eps_tol: float = 1e-7
    conv_tol: float = 1e-10
    conv_measure: str = "residual"
    k_cap: int = 30
    beta: float = 0.9
    dt_min: float | None = None
    dt_max: float | None = None
    growth_max: float = 10.0
    restart_cap: int = 10
    restart_on_solver_failure: bool = False
    hot_rod_threshold: float = math.inf

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}, expected one of {KINDS}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("safety factor must lie in (0, 1)")
        if self.k_max < 1 or self.k_cap < self.k_max:
            raise ValueError("need k_cap >= k_max >= 1")
        if self.dt_min is not None and self.dt_max is not None and self.dt_min > self.dt_max:
            raise ValueError("dt_min must not exceed dt_max")
        if not self.eps_tol > 0 or not self.conv_tol >= 0 or not self.hot_rod_threshold >= 0:
            raise ValueError("tolerances and the Hot Rod threshold must be non-negative (eps_tol positive)")
        if self.growth_max < 1 or self.restart_cap < 0:
            raise ValueError("need growth_max >= 1 and restart_cap >= 0")
        if self.conv_measure not in ("residual", "increment"):
            raise ValueError("conv_measure is 'residual' or 'increment'")

    def with_span(self, span: float) -> "StrategyConfig":
        """Fill in the default step-size guards for a run of length ``span``."""
        cfg = copy.copy(self)
        if cfg.dt_min is None:
            cfg.dt_min = 1e-10 * span
        if cfg.dt_max is None:
            cfg.dt_max = span
        return cfg

    def to_dict(self):
        return asdict(self)


@dataclass
class StepOutcome:
    accepted: bool
    u_end: np.ndarray | None
    dt_next: float
    k_used: int
    error_estimate: float | None = None
    restart_reason: str | None = None
    converged: bool = True
    delta: float | None = None


def embedded_error_estimate(state: SweepState, problem: Problem) -> float:
    """Increment of the last sweep, estimating the second-to-last iterate's error."""
    if state.k < 2:
        raise ValueError("embedded estimate needs at least two sweeps")
    return increment(state, problem)


def optimal_step_size(eps: float, eps_tol: float, dt: float, p: int, cfg: StrategyConfig) -> float:
    """Step size that would have produced ``eps_tol`` for an order-p estimate."""
    dt_min = cfg.dt_min if cfg.dt_min is not None else 0.0
    dt_max = cfg.dt_max if cfg.dt_max is not None else math.inf
    if not np.isfinite(eps):
        return dt_min if dt_min > 0 else dt / cfg.growth_max
    if eps == 0.0:
        return min(cfg.growth_max * dt, dt_max)
    dt_opt = cfg.beta * dt * (eps_tol / eps) ** (1.0 / (p + 1))
    dt_opt = min(dt_opt, cfg.growth_max * dt)
    return min(max(dt_opt, dt_min), dt_max)


def interp_error_estimate(state: SweepState, table: CollocationTable, problem: Problem) -> float:
    """Compare u_{M-1} with the interpolant through all other nodes (incl. 0)."""
    M = table.M
    if M < 3:
        raise ValueError("interpolation-based estimate needs M >= 3")
    tau = np.concatenate(([0.0], table.nodes))
    keep = [i for i in range(M + 1) if i != M - 1]
    guess = interpolate(tau[keep], state.u[keep], tau[M - 1])
    return problem.norm(state.u[M - 1] - guess)


def _converged(state, table, problem, cfg) -> bool:
    if cfg.conv_measure == "increment":
        val = increment(state, problem)
        if not np.isfinite(val):
            from .sweeper import NonFiniteState

            raise NonFiniteState("non-finite increment", state.k, None)
    else:
        val = residual(state, table, problem)
    return val < cfg.conv_tol


def run_step(cfg: StrategyConfig, state: SweepState, table: CollocationTable, problem: Problem,
             fault_hook=None, hotrod: HotRodState | None = None) -> StepOutcome:
    """One attempt at the step described by ``state`` (mutated in place)."""
    dt = state.dt

    def do_sweep():
        sweep(state, table, problem)
        if fault_hook is not None:
            fault_hook(state, state.k)

    kind = cfg.kind
    if kind == "fixed":
        for _ in range(cfg.k_max):
            do_sweep()
        return StepOutcome(True, collocation_update(state, table), dt, state.k)

    if kind in ("k_adaptive", "dt_k_adaptive"):
        converged = False
        while True:
            do_sweep()
            if _converged(state, table, problem, cfg):
                converged = True
                break
            if state.k >= cfg.k_cap:
                break
        if kind == "k_adaptive":
            return StepOutcome(True, collocation_update(state, table), dt, state.k, converged=converged)
        eps = interp_error_estimate(state, table, problem)
        dt_opt = optimal_step_size(eps, cfg.eps_tol, dt, table.M - 1, cfg)
        if not converged:
            return StepOutcome(False, None, min(dt_opt, 0.5 * dt), state.k, eps, "not-converged", False)
        if eps <= cfg.eps_tol:
            return StepOutcome(True, collocation_update(state, table), dt_opt, state.k, eps)
        return StepOutcome(False, None, min(dt_opt, dt), state.k, eps, "error-exceeded")

    if kind == "dt_adaptive":
        for _ in range(cfg.k_max):
            do_sweep()
        eps = embedded_error_estimate(state, problem)
        dt_opt = optimal_step_size(eps, cfg.eps_tol, dt, cfg.k_max - 1, cfg)
        if eps <= cfg.eps_tol:
            return StepOutcome(True, collocation_update(state, table), dt_opt, state.k, eps)
        return StepOutcome(False, None, min(dt_opt, dt), state.k, eps, "error-exceeded")

    if kind == "hot_rod":
        M = table.M
        for _ in range(cfg.k_max):
            do_sweep()
        u_adv = state.u[M].copy()
        do_sweep()
        eps1 = state.u[M] - u_adv
        delta = None
        if hotrod is not None and hotrod.armed(dt):
            with np.errstate(all="ignore"):
                fi, fe = problem.eval_f(u_adv, state.t + dt)
                f_adv = fi if fe is None else fi + fe
                eps2 = hotrod.estimate(u_adv, f_adv, dt)
                trigger = hotrod.check(eps1, eps2, problem.norm)
            delta = hotrod.deltas[-1]
            if trigger:
                return StepOutcome(False, None, dt, state.k, problem.norm(eps1), "detector-triggered",
                                   delta=delta)
        return StepOutcome(True, u_adv, dt, state.k, problem.norm(eps1), delta=delta)

    raise ValueError(f"unknown strategy {kind!r}")


@dataclass
class RunStats:
    steps: int = 0
    restarts: int = 0
    iterations: int = 0
    rhs_evaluations: int = 0
    restart_reasons: dict = field(default_factory=dict)
    nonconverged_steps: int = 0
    error_estimates: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    # index of the step being attempted at each restart (0 is the first step)
    restart_steps: list = field(default_factory=list)


class Integrator:
    """Time integration of one problem with one strategy and optional fault.

    The integrator is a plain value object: ``copy.deepcopy`` gives an
    independent snapshot that continues bit-identically.
    """

    def __init__(self, problem: Problem, cfg: StrategyConfig, dt: float,
                 table: CollocationTable | None = None, fault: FaultSpec | None = None,
                 record_trajectory: bool = False, max_steps: int | None = None):
        self.problem = problem
        self.max_steps = max_steps
        self.table = table or make_table(3)
        span = problem.t_end - problem.t0
        self.cfg = cfg.with_span(span)
        self.t = problem.t0
        self.u = problem.u_init()
        self.dt = float(dt)
        self.stats = RunStats()
        self.injector = FaultInjector(fault, self.table, problem)
        self.hotrod = HotRodState(self.cfg.k_max, self.cfg.hot_rod_threshold) if cfg.kind == "hot_rod" else None
        self.trajectory = [(self.t, self.u.copy())] if record_trajectory else None

    def __deepcopy__(self, memo):
        # problems and tables are read-only and shared between copies
        new = copy.copy(self)
        for name in ("cfg", "stats", "injector", "hotrod", "trajectory"):
            setattr(new, name, copy.deepcopy(getattr(self, name), memo))
        new.injector.problem, new.injector.table = self.problem, self.table
        new.u = self.u.copy()
        return new

    def set_fault(self, fault: FaultSpec | None):
        self.injector = FaultInjector(fault, self.table, self.problem)

    @property
    def done(self) -> bool:
        return self.t >= self.problem.t_end - 1e-12 * (self.problem.t_end - self.problem.t0)

    def _step_size(self) -> float:
        remaining = self.problem.t_end - self.t
        dt = self.dt
        if dt >= remaining - 1e-8 * dt:
            dt = remaining
        return dt

    def next_step_contains(self, t: float) -> bool:
        dt = self._step_size()
        return self.t <= t < self.t + dt

    def step(self) -> StepOutcome:
        cfg, table, problem = self.cfg, self.table, self.problem
        if self.max_steps is not None and self.stats.steps >= self.max_steps:
            raise StepFailure(f"run exceeded {self.max_steps} steps at t={self.t}")
        dt = self._step_size()
        clipped = dt != self.dt
        state = spread(self.u, self.t, dt, table, problem)
        self.stats.rhs_evaluations += 1
        while True:
            try:
                out = run_step(cfg, state, table, problem, self.injector, self.hotrod)
            except SolverFailure:
                self.stats.iterations += state.k
                self.stats.rhs_evaluations += state.k * table.M
                if not cfg.restart_on_solver_failure:
                    raise
                out = StepOutcome(False, None, state.dt, state.k, None, "solver-failure")
            else:
                self.stats.iterations += state.k
                self.stats.rhs_evaluations += state.k * table.M
                if self.hotrod is not None and out.delta is not None:
                    self.stats.rhs_evaluations += 1
            if out.accepted:
                break
            reasons = self.stats.restart_reasons
            reasons[out.restart_reason] = reasons.get(out.restart_reason, 0) + 1
            self.stats.restarts += 1
            self.stats.restart_steps.append(self.stats.steps)
            state.restarts += 1
            if state.restarts > cfg.restart_cap:
                raise StepFailure(f"step at t={self.t} restarted more than {cfg.restart_cap} times")
            if self.hotrod is not None:
                # the retried step runs unchecked; the detector re-arms once the history refills
                self.hotrod.reset()
            restarts = state.restarts
            state.dt = min(out.dt_next, self._step_size())
            state = respread(state, table, problem)
            state.restarts = restarts
            self.stats.rhs_evaluations += 1

        if not out.converged:
            self.stats.nonconverged_steps += 1
        if out.error_estimate is not None:
            self.stats.error_estimates.append(out.error_estimate)
        self.stats.step_sizes.append(state.dt)
        self.stats.steps += 1
        t_new = self.t + state.dt
        if clipped and state.dt == dt:
            t_new = self.problem.t_end
        if self.hotrod is not None:
            fi, fe = problem.eval_f(out.u_end, t_new)
            self.hotrod.push(t_new, state.dt, out.u_end, fi if fe is None else fi + fe)
        self.t = t_new
        self.u = out.u_end
        if cfg.kind in ("dt_adaptive", "dt_k_adaptive") and not (clipped and state.dt == dt):
            self.dt = out.dt_next
        if self.trajectory is not None:
            self.trajectory.append((self.t, self.u.copy()))
        return out

    def run(self, until: float | None = None):
        """Integrate to ``t_end`` (or stop before the step that contains ``until``)."""
        while not self.done:
            if until is not None and self.next_step_contains(until):
                return self
            self.step()
        return self
