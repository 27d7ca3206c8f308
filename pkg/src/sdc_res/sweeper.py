"""
SDC sweeps over one time step.

State arrays carry M + 1 entries along the leading axis: index 0 holds the
step's initial condition, indices 1..M the iterates at the collocation
nodes. One sweep updates nodes 1..M in order by forward substitution with
the lower-triangular preconditioner(s) of the table; the unit-interval
weights are multiplied by ``dt`` here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from ._kernels import kernels_for
from .collocation import CollocationTable
from .problems.base import Problem, SolverFailure, SolverNonConvergence, SolverOverflow


class NonFiniteState(SolverFailure):
    pass


@dataclass
class SweepState:
    """Iterate of one step. ``f_expl`` is None for unsplit problems."""

    t: float
    dt: float
    u: np.ndarray
    f_impl: np.ndarray
    f_expl: np.ndarray | None = None
    u_prev: np.ndarray | None = None
    k: int = 0
    restarts: int = 0

    @property
    def u0(self):
        return self.u[0]

    def f_total(self, i=slice(None)):
        if self.f_expl is None:
            return self.f_impl[i]
        return self.f_impl[i] + self.f_expl[i]

    def copy(self) -> "SweepState":
        return SweepState(
            t=self.t, dt=self.dt, u=self.u.copy(), f_impl=self.f_impl.copy(),
            f_expl=None if self.f_expl is None else self.f_expl.copy(),
            u_prev=None if self.u_prev is None else self.u_prev.copy(),
            k=self.k, restarts=self.restarts,
        )


def node_times(state: SweepState, table: CollocationTable) -> np.ndarray:
    return state.t + state.dt * np.concatenate(([0.0], table.nodes))


def spread(u0, t, dt, table: CollocationTable, problem: Problem) -> SweepState:
    """Initial iterate: copy of ``u0`` at every node, with matching f values."""
    u0 = np.asarray(u0)
    u = np.empty((table.M + 1,) + u0.shape, dtype=u0.dtype)
    u[:] = u0
    fi, fe = problem.eval_f(u0, t)
    f_impl = np.empty_like(u)
    f_impl[:] = fi
    f_expl = None
    if fe is not None:
        f_expl = np.empty_like(u)
        f_expl[:] = fe
    # non-autonomous problems need f at the actual node times
    if getattr(problem, "autonomous", True) is False:
        ts = t + dt * table.nodes
        for m in range(1, table.M + 1):
            f_impl[m], fe_m = problem.eval_f(u0, ts[m - 1])
            if f_expl is not None:
                f_expl[m] = fe_m
    return SweepState(t=t, dt=dt, u=u, f_impl=f_impl, f_expl=f_expl)


def respread(state: SweepState, table: CollocationTable, problem: Problem) -> SweepState:
    """Restart a step from its (possibly corrupted) stored initial condition."""
    new = spread(state.u[0].copy(), state.t, state.dt, table, problem)
    new.restarts = state.restarts
    return new


def refresh_f(state: SweepState, m: int, problem: Problem, table: CollocationTable) -> None:
    tm = state.t if m == 0 else state.t + state.dt * table.nodes[m - 1]
    fi, fe = problem.eval_f(state.u[m], tm)
    state.f_impl[m] = fi
    if state.f_expl is not None:
        state.f_expl[m] = fe


def sweep(state: SweepState, table: CollocationTable, problem: Problem) -> SweepState:
    """One SDC iteration, updating ``state`` in place (and returning it)."""
    M = table.M
    dt = state.dt
    u, fI, fE = state.u, state.f_impl, state.f_expl
    state.u_prev = u.copy()
    iteration = state.k + 1
    kernels = getattr(problem, "kernels", None)
    if kernels is not None and fE is None and u.ndim == 2:
        return _compiled_sweep(state, table, kernels, iteration)
    shape = u.shape[1:]
    # flat views, so the node sums are plain matrix products
    uf = u.reshape(M + 1, -1)
    fIf = fI.reshape(M + 1, -1)
    fEf = None if fE is None else fE.reshape(M + 1, -1)

    # contributions of the previous iterate, for all nodes at once
    rhs_all = uf[0] + dt * (table.Q_minus_Qd_impl @ fIf[1:])
    if fEf is not None:
        rhs_all += dt * (table.Q_minus_Qd_expl @ fEf[1:])
    Qd = dt * table.Qd_impl
    QE = dt * table.Qd_expl
    times = state.t + dt * table.nodes

    for m in range(1, M + 1):
        rhs = rhs_all[m - 1]
        if m > 1:
            rhs = rhs + Qd[m - 1, : m - 1] @ fIf[1:m]
            if fEf is not None:
                rhs += QE[m - 1, : m - 1] @ fEf[1:m]
        tm = times[m - 1]
        try:
            u[m], fi, fe = problem.solve_and_eval(rhs.reshape(shape), Qd[m - 1, m - 1], tm, u[m])
        except SolverFailure as err:
            err.iteration, err.node = iteration, m
            raise
        except (FloatingPointError, OverflowError) as err:
            raise NonFiniteState(f"floating point failure: {err}", iteration, m) from err
        if not (np.isfinite(u[m]).all() and np.isfinite(fi).all()):
            raise NonFiniteState("non-finite value after node solve", iteration, m)
        fI[m] = fi
        if fE is not None:
            if not np.isfinite(fe).all():
                raise NonFiniteState("non-finite explicit right-hand side", iteration, m)
            fE[m] = fe
    state.k = iteration
    return state


def _compiled_sweep(state, table, kernels, iteration):
    solve, rhs, params = kernels
    sweep_kernel, _ = kernels_for(solve, rhs)
    status, node = sweep_kernel(state.u, state.f_impl, table.Q_minus_Qd_impl, table.Qd_impl, state.dt, params)
    if status == _k.OVERFLOW:
        raise SolverOverflow("solver overflowed", iteration, node)
    if status == _k.MAXITER:
        raise SolverNonConvergence("solver did not converge", iteration, node)
    if status == _k.NONFINITE:
        raise NonFiniteState("non-finite value after node solve", iteration, node)
    state.k = iteration
    return state


def residual(state: SweepState, table: CollocationTable, problem: Problem) -> float:
    """Max over nodes of the collocation defect ``u0 + dt Q f(u) - u_m``."""
    kernels = getattr(problem, "kernels", None)
    if kernels is not None and state.f_expl is None and state.u.ndim == 2:
        res = kernels_for(kernels[0], kernels[1])[1](state.u, state.f_impl, table.Q, state.dt)
    else:
        F = state.f_total(slice(1, None))
        defect = state.u[0] + state.dt * np.tensordot(table.Q, F, axes=(1, 0)) - state.u[1:]
        res = problem.norm(defect)
    if not np.isfinite(res):
        raise NonFiniteState("non-finite residual", state.k, None)
    return res


def increment(state: SweepState, problem: Problem) -> float:
    """Max over nodes 1..M of the difference between the last two iterates."""
    if state.k < 1 or state.u_prev is None:
        raise ValueError("increment needs at least one completed sweep")
    return problem.norm(state.u[1:] - state.u_prev[1:])


def collocation_update(state: SweepState, table: CollocationTable) -> np.ndarray:
    """Step-end solution: copy of the last node for Radau-right tables."""
    if table.endpoint_weights is None:
        return state.u[table.M].copy()
    F = state.f_total(slice(1, None))
    return state.u[0] + state.dt * np.tensordot(table.endpoint_weights, F, axes=(0, 0))
