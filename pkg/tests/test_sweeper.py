import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sdc_res.collocation import make_table
from sdc_res.faults import flip_word
from sdc_res.problems import Dahlquist, Lorenz
from sdc_res.problems.base import Problem
from sdc_res.sweeper import (NonFiniteState, collocation_update, increment, residual, spread, sweep)


class Linear(Problem):
    """u' = A u with a dense matrix, solved exactly."""

    name = "linear"

    def __init__(self, A):
        self.A = np.asarray(A, dtype=float)
        self.shape = (self.A.shape[0],)

    def u_init(self):
        return np.ones(self.shape)

    def eval_f_impl(self, u, t):
        return self.A @ u

    def solve_system(self, rhs, a, t, guess):
        return np.linalg.solve(np.eye(self.shape[0]) - a * self.A, rhs)


class Split(Linear):
    """Same linear problem split into an implicit and an explicit half."""

    has_explicit = True

    def eval_f_impl(self, u, t):
        return 0.5 * self.A @ u

    def eval_f_expl(self, u, t):
        return 0.5 * self.A @ u

    def solve_system(self, rhs, a, t, guess):
        return np.linalg.solve(np.eye(self.shape[0]) - 0.5 * a * self.A, rhs)


def dense_collocation(lam, dt, u0, table):
    """Collocation solution of u' = lam u from the dense linear system."""
    M = table.M
    return np.linalg.solve(np.eye(M) - dt * lam * table.Q, np.full(M, u0))


def run_sweeps(problem, table, dt, k, u0=None):
    state = spread(problem.u_init() if u0 is None else u0, 0.0, dt, table, problem)
    for _ in range(k):
        sweep(state, table, problem)
    return state


def test_zero_rhs_keeps_initial_value(table3):
    p = Dahlquist(lam=0.0, compiled=False)
    state = run_sweeps(p, table3, 0.3, 4)
    assert np.all(state.u == 1.0)
    assert residual(state, table3, p) == 0.0
    assert increment(state, p) == 0.0
    assert collocation_update(state, table3)[0] == 1.0


@pytest.mark.parametrize("compiled", [False, True])
def test_single_node_is_implicit_euler(compiled):
    table = make_table(1)
    p = Dahlquist(lam=-2.0, compiled=compiled)
    state = run_sweeps(p, table, 0.1, 1)
    assert state.u[1, 0] == pytest.approx(1.0 / (1.0 + 0.2), rel=1e-15)


@pytest.mark.parametrize("compiled", [False, True])
def test_ten_sweeps_match_dense_collocation(table3, compiled):
    p = Dahlquist(lam=-1.0, compiled=compiled)
    state = run_sweeps(p, table3, 0.1, 10)
    np.testing.assert_allclose(state.u[1:, 0], dense_collocation(-1.0, 0.1, 1.0, table3), atol=1e-10)


def test_residual_of_exact_collocation_solution(table3):
    p = Dahlquist(lam=-1.0, compiled=False)
    state = spread(p.u_init(), 0.0, 0.1, table3, p)
    state.u[1:, 0] = dense_collocation(-1.0, 0.1, 1.0, table3)
    state.f_impl[:] = -state.u
    assert residual(state, table3, p) <= 1e-15


def test_imex_sweep_converges_to_collocation(table3, rng):
    A = -np.eye(3) + 0.3 * rng.standard_normal((3, 3))
    lin, split = Linear(A), Split(A)
    s1 = run_sweeps(lin, table3, 0.05, 12)
    s2 = run_sweeps(split, table3, 0.05, 12)
    np.testing.assert_allclose(s2.u, s1.u, atol=1e-12)
    assert residual(s2, table3, split) < 1e-12


# bits are numbered from the sign bit; these flips dwarf the current defect
@given(st.integers(1, 3), st.integers(0, 2), st.integers(2, 24))
def test_bit_flip_increases_residual(node, comp, bit):
    table = make_table(3)
    A = np.array([[-1.0, 0.5, 0.0], [0.2, -2.0, 0.3], [0.0, 0.4, -0.5]])
    p = Linear(A)
    state = run_sweeps(p, table, 0.1, 3)
    before = residual(state, table, p)
    flip_word(state.u[node], comp, bit)
    state.f_impl[node] = p.eval_f_impl(state.u[node], 0.0)
    assert residual(state, table, p) > before


def test_increment_needs_a_sweep(table3):
    p = Dahlquist(compiled=False)
    state = spread(p.u_init(), 0.0, 0.1, table3, p)
    with pytest.raises(ValueError):
        increment(state, p)


def test_increment_contracts_at_iteration_matrix_rate(table3):
    lam, dt = -1.0, 0.1
    p = Dahlquist(lam=lam, compiled=False)
    state = spread(p.u_init(), 0.0, dt, table3, p)
    incs = []
    for _ in range(6):
        sweep(state, table3, p)
        incs.append(increment(state, p))
    # dense oracle: error propagation matrix of the sweep for u' = lam u
    Qd = table3.Qd_impl
    K = np.linalg.solve(np.eye(3) - dt * lam * Qd, dt * lam * (table3.Q - Qd))
    rho = np.max(np.abs(np.linalg.eigvals(K)))
    ratios = np.array(incs[2:]) / np.array(incs[1:-1])
    assert np.all(ratios < 1.0)
    # a nearly nilpotent matrix: successive ratios are bounded by its norm and decay
    assert np.all(ratios <= np.linalg.norm(K, 2) * 1.0001)
    assert rho < np.linalg.norm(K, 2)


def test_collocation_update_copies_last_node(table3):
    p = Dahlquist(compiled=False)
    state = run_sweeps(p, table3, 0.1, 3)
    out = collocation_update(state, table3)
    assert out[0] == state.u[3, 0]
    out[0] = 7.0
    assert state.u[3, 0] != 7.0


def test_general_endpoint_rule(table3):
    from dataclasses import replace

    weights = table3.Q[-1].copy()
    table = replace(table3, endpoint_weights=weights)
    p = Dahlquist(compiled=False)
    state = run_sweeps(p, table, 0.1, 10)
    assert collocation_update(state, table)[0] == pytest.approx(state.u[3, 0], abs=1e-12)


def test_last_iteration_fault_off_last_node_does_not_change_step_end(table3):
    p = Lorenz()
    state = run_sweeps(p, table3, 0.01, 5, np.array([-4.9, -3.7, 24.7]))
    clean = collocation_update(state, table3)
    flip_word(state.u[1], 0, 0)
    assert np.array_equal(collocation_update(state, table3), clean)


def test_compiled_and_numpy_sweeps_agree(table3):
    fast, slow = Lorenz(), Lorenz()
    slow.kernels = None
    u0 = np.array([-4.9, -3.7, 24.7])
    a = run_sweeps(fast, table3, 0.01, 6, u0)
    b = run_sweeps(slow, table3, 0.01, 6, u0)
    np.testing.assert_allclose(a.u, b.u, rtol=1e-14, atol=1e-13)
    assert residual(a, table3, fast) == pytest.approx(residual(b, table3, slow), rel=1e-6, abs=1e-14)


def test_sweeps_are_deterministic(table3):
    p = Lorenz()
    a = run_sweeps(p, table3, 0.02, 4)
    b = run_sweeps(p, table3, 0.02, 4)
    assert a.u.tobytes() == b.u.tobytes()


@pytest.mark.parametrize("compiled", [False, True])
def test_overflow_reports_location(table3, compiled):
    p = Lorenz()
    if not compiled:
        p.kernels = None
    state = spread(np.array([1.0, 1.0, 1.0]), 0.0, 0.01, table3, p)
    sweep(state, table3, p)
    state.u[0, 0] = 1e300
    with pytest.raises(Exception) as info:
        sweep(state, table3, p)
    err = info.value
    assert err.iteration == 2 and err.node == 1


def test_nonfinite_linear_state_is_detected(table3):
    p = Dahlquist(compiled=False)
    state = spread(np.array([np.inf]), 0.0, 0.1, table3, p)
    with pytest.raises(NonFiniteState) as info:
        sweep(state, table3, p)
    assert info.value.node == 1


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_fixed_sweep_order_on_dahlquist(k):
    from sdc_res.controllers import Integrator, StrategyConfig

    p = Dahlquist(lam=-1.0, t_end=1.0)
    dts = [0.2, 0.1, 0.05]
    errs = []
    for dt in dts:
        run = Integrator(p, StrategyConfig("fixed", k_max=k), dt).run()
        errs.append(abs(run.u[0] - np.exp(-1.0)))
    order = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert abs(order - min(k, 5)) < 0.3
