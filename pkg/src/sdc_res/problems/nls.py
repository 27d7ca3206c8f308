"""Focusing nonlinear Schroedinger equation on the periodic square, IMEX split.

    u_t = i Lap(u) + c i |u|^2 u,   (x, y) in [0, 2 pi)^2

The Laplacian is integrated implicitly through a diagonal solve in Fourier
space, the cubic term explicitly in physical space. With ``c = 2`` (the
default) the initial condition below does not evolve into a closed-form
breather; ``c = 4`` does, which ``analytic_solution`` exploits as a check on
the discretisation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Problem
from .spectral import SpectralGrid2D


@dataclass(frozen=True)
class NLSParams:
    n: int = 64
    nonlin: float = 2.0
    t0: float = 0.0
    t_end: float = 1.0
    t_fault: float = 0.3

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("grid size must be a power of two")


def breather(tau, s):
    """One-dimensional breather, solving ``psi_t = i psi_ss + 2 i |psi|^2 psi``."""
    ch, sh = np.cosh(tau), np.sinh(tau)
    return np.exp(1j * tau) * ((ch + 1j * sh) / (ch - np.cos(s) / np.sqrt(2.0)) - 1.0)


class NonlinearSchroedinger(Problem):
    name = "nls"
    dtype = np.complex128
    has_explicit = True
    # step of the converged-collocation reference, an eighth of the campaign step
    reference_dt = 3.125e-4

    def __init__(self, params: NLSParams | None = None):
        self.params = params or NLSParams()
        p = self.params
        self.grid = SpectralGrid2D(p.n, p.n)
        self.shape = self.grid.shape
        self.t0, self.t_end, self.t_fault = p.t0, p.t_end, p.t_fault
        self._ilap = 1j * self.grid.lap

    def u_init(self):
        s = self.grid.X + self.grid.Y
        return ((1.0 / (1.0 - np.cos(s) / np.sqrt(2.0)) - 1.0) / np.sqrt(2.0)).astype(np.complex128)

    def eval_f_impl(self, u, t):
        g = self.grid
        return g.inverse(self._ilap * g.forward(u))

    def eval_f_expl(self, u, t):
        return self.params.nonlin * 1j * (u.real**2 + u.imag**2) * u

    def solve_system(self, rhs, a, t, guess):
        return self.grid.solve_shifted(rhs, 1.0 - a * self._ilap)

    def solve_and_eval(self, rhs, a, t, guess):
        g = self.grid
        v_hat = g.forward(rhs) / (1.0 - a * self._ilap)
        v = g.inverse(v_hat)
        return v, g.inverse(self._ilap * v_hat), self.eval_f_expl(v, t)

    def analytic_solution(self, t):
        """Closed-form solution, valid only for ``nonlin == 4``."""
        if self.params.nonlin != 4.0:
            raise ValueError("the breather is an exact solution only for nonlin = 4")
        return breather(2.0 * t, self.grid.X + self.grid.Y) / np.sqrt(2.0)

    def reference_solution(self, t):
        from ..reference import collocation_reference

        return collocation_reference(self, t)

    def metadata(self):
        meta = super().metadata()
        meta.update(n=self.params.n, nonlin=self.params.nonlin)
        return meta
