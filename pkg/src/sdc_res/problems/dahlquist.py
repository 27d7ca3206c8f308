import numba
import numpy as np

from .base import Problem


@numba.njit(cache=True)
def _rhs(u, out, params):
    out[0] = params[0] * u[0]


@numba.njit(cache=True)
def _solve(rhs, a, guess, out, params):
    out[0] = rhs[0] / (1.0 - a * params[0])
    return 0


class Dahlquist(Problem):
    """Scalar test equation ``u' = lam * u`` with ``u(0) = u0``."""

    name = "dahlquist"

    def __init__(self, lam=-1.0, t_end=1.0, t_fault=0.5, u0=1.0, compiled=True):
        self.lam = lam
        self.shape = (1,)
        self.t_end = t_end
        self.t_fault = t_fault
        self.u0 = u0
        if compiled:
            self.kernels = (_solve, _rhs, np.array([lam], dtype=np.float64))

    def u_init(self):
        return np.array([self.u0], dtype=float)

    def eval_f_impl(self, u, t):
        return self.lam * u

    def solve_system(self, rhs, a, t, guess):
        return rhs / (1.0 - a * self.lam)

    def reference_solution(self, t):
        return self.u_init() * np.exp(self.lam * (t - self.t0))
