"""Lorenz attractor, integrated fully implicitly with a hand-written Newton solver."""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy.integrate import solve_ivp

from .base import Problem, SolverNonConvergence, SolverOverflow

_CONVERGED, _OVERFLOW, _MAXITER = 0, 1, 2


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta_l: float = 8.0 / 3.0
    u0: tuple = (1.0, 1.0, 1.0)
    t0: float = 0.0
    t_end: float = 20.0
    t_fault: float = 10.0
    newton_tol: float = 1e-12
    newton_max_iter: int = 99

    def __post_init__(self):
        if min(self.sigma, self.rho, self.beta_l) <= 0:
            raise ValueError("Lorenz parameters must be positive")


@numba.njit(cache=True)
def _rhs(u, out, params):
    s, r, b = params[0], params[1], params[2]
    x, y, z = u[0], u[1], u[2]
    out[0] = s * (y - x)
    out[1] = r * x - y - x * z
    out[2] = x * y - b * z


@numba.njit(cache=True)
def _newton(rhs, a, guess, out, params):
    """Newton for ``v - a f(v) = rhs``; returns a status code."""
    s, r, b, tol = params[0], params[1], params[2], params[3]
    max_iter = int(params[4])
    r0, r1, r2 = rhs[0], rhs[1], rhs[2]
    x, y, z = guess[0], guess[1], guess[2]
    for it in range(max_iter + 1):
        g0 = x - a * s * (y - x) - r0
        g1 = y - a * (r * x - y - x * z) - r1
        g2 = z - a * (x * y - b * z) - r2
        if not (np.isfinite(g0) and np.isfinite(g1) and np.isfinite(g2)):
            return _OVERFLOW
        if max(abs(g0), abs(g1), abs(g2)) <= tol:
            out[0], out[1], out[2] = x, y, z
            return _CONVERGED
        if it == max_iter:
            break
        # Jacobian of g = I - a * df/du, inverted by cofactors
        j00, j01 = 1.0 + a * s, -a * s
        j10, j11, j12 = -a * (r - z), 1.0 + a, a * x
        j20, j21, j22 = -a * y, -a * x, 1.0 + a * b
        c00 = j11 * j22 - j12 * j21
        c01 = j12 * j20 - j10 * j22
        c02 = j10 * j21 - j11 * j20
        det = j00 * c00 + j01 * c01
        if det == 0.0 or not np.isfinite(det):
            return _OVERFLOW
        dx = (g0 * c00 - g1 * j01 * j22 + g2 * j01 * j12) / det
        dy = (g0 * c01 + g1 * j00 * j22 - g2 * j00 * j12) / det
        dz = (g0 * c02 + g1 * (j01 * j20 - j00 * j21) + g2 * (j00 * j11 - j01 * j10)) / det
        x, y, z = x - dx, y - dy, z - dz
    return _MAXITER


def _param_array(params: LorenzParams) -> np.ndarray:
    return np.array([params.sigma, params.rho, params.beta_l, params.newton_tol, params.newton_max_iter],
                    dtype=np.float64)


def lorenz_f(u, params: LorenzParams = LorenzParams()) -> np.ndarray:
    out = np.empty(3)
    _rhs(np.asarray(u, dtype=np.float64), out, _param_array(params))
    return out


def lorenz_solve_system(rhs, a, guess, params: LorenzParams = LorenzParams()) -> np.ndarray:
    """Solve ``v - a f(v) = rhs`` by Newton's method from ``guess``.

    Raises SolverOverflow on non-finite iterates and SolverNonConvergence
    when ``newton_max_iter`` iterations do not reach ``newton_tol`` in the
    max-norm of the residual.
    """
    out = np.empty(3)
    status = _newton(np.asarray(rhs, dtype=np.float64), float(a), np.asarray(guess, dtype=np.float64),
                     out, _param_array(params))
    if status == _OVERFLOW:
        raise SolverOverflow("Newton solver overflowed")
    if status == _MAXITER:
        raise SolverNonConvergence(f"Newton solver did not converge in {params.newton_max_iter} iterations")
    return out


class Lorenz(Problem):
    name = "lorenz"
    relative_error = True

    def __init__(self, params: LorenzParams | None = None):
        self.params = params or LorenzParams()
        self.shape = (3,)
        self.t0 = self.params.t0
        self.t_end = self.params.t_end
        self.t_fault = self.params.t_fault
        self._ref_cache = {}
        self._p = _param_array(self.params)
        # compiled solve/rhs pair picked up by the sweeper's fast path
        self.kernels = (_newton, _rhs, self._p)

    def u_init(self):
        return np.array(self.params.u0, dtype=float)

    def eval_f_impl(self, u, t):
        out = np.empty(3)
        _rhs(u, out, self._p)
        return out

    def solve_system(self, rhs, a, t, guess):
        return lorenz_solve_system(rhs, a, guess, self.params)

    def jacobian(self, u):
        p = self.params
        x, y, z = u
        return np.array([[-p.sigma, p.sigma, 0.0], [p.rho - z, -1.0, -x], [y, x, -p.beta_l]])

    def reference_solution(self, t, method="RK45", tol=1e-13):
        """High-accuracy embedded explicit Runge-Kutta run from t0 to t."""
        key = (float(t), method, tol)
        if key not in self._ref_cache:
            if t == self.t0:
                self._ref_cache[key] = self.u_init()
            else:
                sol = solve_ivp(lambda _t, u: lorenz_f(u, self.params), (self.t0, t), self.u_init(),
                                method=method, rtol=tol, atol=tol)
                if not sol.success:
                    raise RuntimeError(f"reference solution failed: {sol.message}")
                self._ref_cache[key] = sol.y[:, -1].copy()
        return self._ref_cache[key].copy()

    def metadata(self):
        meta = super().metadata()
        meta.update(sigma=self.params.sigma, rho=self.params.rho, beta=self.params.beta_l,
                    newton_tol=self.params.newton_tol, newton_max_iter=self.params.newton_max_iter)
        return meta
