"""Forced Allen-Cahn equation with a circular interface, IMEX split.

    u_t = Lap(u) - (2/eps^2) u (1-u) (1-2u) - 6 u (1-u) F(u, t)

The forcing ``F`` balances the mean of the unforced right-hand side and is
modulated in time so the circle alternately grows and shrinks. The
Laplacian is treated implicitly, reaction and forcing explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Problem
from .spectral import SpectralGrid2D


@dataclass(frozen=True)
class AllenCahnParams:
    n: int = 128
    eps_ac: float = 0.04
    R0: float = 0.25
    L: float = 1.0
    t0: float = 0.0
    t_end: float = 0.025
    t_fault: float = 0.01
    period: float = 0.032
    amplitude: float = 1e-2

    def __post_init__(self):
        if self.eps_ac <= 0:
            raise ValueError("interface width must be positive")
        if not 0 < self.R0 < self.L / 2:
            raise ValueError("circle must lie inside the domain")
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("grid size must be a power of two")


class AllenCahn(Problem):
    name = "allen-cahn"
    has_explicit = True
    autonomous = False
    # step of the converged-collocation reference, 1/100 of the campaign step
    reference_dt = 5e-6

    def __init__(self, params: AllenCahnParams | None = None):
        self.params = params or AllenCahnParams()
        p = self.params
        self.grid = SpectralGrid2D(p.n, p.n, p.L, p.L, -p.L / 2, -p.L / 2, real=True)
        self.shape = self.grid.shape
        self.t0, self.t_end, self.t_fault = p.t0, p.t_end, p.t_fault
        self._c = 2.0 / p.eps_ac**2

    def u_init(self):
        p = self.params
        r = np.hypot(self.grid.X, self.grid.Y)
        # exact 1-D interface profile between the phases 0 (outside) and 1 (inside)
        return 0.5 * (1.0 + np.tanh((p.R0 - r) / (np.sqrt(2.0) * p.eps_ac)))

    def reaction(self, u):
        return -self._c * u * (1.0 - u) * (1.0 - 2.0 * u)

    def forcing(self, u, t, lap_u=None):
        p = self.params
        if lap_u is None:
            lap_u = self.grid.laplacian(u)
        den = np.sum(6.0 * u * (1.0 - u))
        if den == 0.0:
            return 0.0
        num = np.sum(lap_u + self.reaction(u))
        return num / den * (1.0 - np.sin(4.0 * np.pi * t / p.period) * p.amplitude)

    def eval_f_impl(self, u, t):
        return self.grid.laplacian(u)

    def eval_f_expl(self, u, t, lap_u=None):
        return self.reaction(u) - 6.0 * u * (1.0 - u) * self.forcing(u, t, lap_u)

    def eval_f(self, u, t):
        lap_u = self.grid.laplacian(u)
        return lap_u, self.eval_f_expl(u, t, lap_u)

    def solve_system(self, rhs, a, t, guess):
        return self.grid.solve_shifted(rhs, 1.0 - a * self.grid.lap)

    def solve_and_eval(self, rhs, a, t, guess):
        g = self.grid
        v_hat = g.forward(rhs) / (1.0 - a * g.lap)
        v = g.inverse(v_hat)
        lap_v = g.inverse(g.lap * v_hat)
        return v, lap_v, self.eval_f_expl(v, t, lap_v)

    def reference_solution(self, t):
        from ..reference import collocation_reference

        return collocation_reference(self, t)

    def metadata(self):
        meta = super().metadata()
        p = self.params
        meta.update(n=p.n, eps_ac=p.eps_ac, R0=p.R0, period=p.period, amplitude=p.amplitude)
        return meta
