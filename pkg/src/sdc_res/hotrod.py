"""
Hot Rod soft-fault detector.

Two local-error estimates are compared at the end of every step: the SDC
increment between the last two iterates, and a linear-multistep estimate
built from the last few step-end solutions and right-hand sides. Their
difference is tiny on smooth fault-free runs and jumps when a fault
corrupts the solution.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(A)
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular order-condition system")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                fac = M[r][col]
                M[r] = [a - fac * c for a, c in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def lmm_window(p: int) -> tuple[int, int]:
    """Smallest history window for an order-``p`` estimate.

    Returns ``(s, r)``: solutions at ``t_n, ..., t_{n-s}`` and right-hand
    sides at ``t_n, ..., t_{n-r+1}``, with ``(s + 1) + r = p + 3`` unknowns.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    s = math.ceil((p + 1) / 2)
    r = p + 3 - (s + 1)
    return s, r


def lmm_error_coefficients(p: int, exact: bool = False):
    """Coefficients ``(alpha, beta)`` of the multistep local-error estimate.

    ``sum_i alpha[i] u_{n-i} + dt * sum_i beta[i] f_{n-i}`` annihilates
    polynomials up to degree p + 1 on an equidistant grid and, applied to
    a numerical solution whose every step adds a local error ``d``, returns
    ``-d`` (normalisation ``sum_i i * alpha[i] = 1``). The result therefore
    estimates the error of the advancing method to O(dt^(p+2)).
    """
    s, r = lmm_window(p)
    n_a, n_b = s + 1, r
    rows, rhs = [], []
    for q in range(p + 2):
        row = [Fraction(-i) ** q for i in range(n_a)]
        row += [q * Fraction(-i) ** (q - 1) if q > 0 else Fraction(0) for i in range(n_b)]
        rows.append(row)
        rhs.append(Fraction(0))
    rows.append([Fraction(i) for i in range(n_a)] + [Fraction(0)] * n_b)
    rhs.append(Fraction(1))
    sol = _solve_exact(rows, rhs)
    alpha, beta = sol[:n_a], sol[n_a:]
    if exact:
        return alpha, beta
    return np.array([float(a) for a in alpha]), np.array([float(b) for b in beta])


def hot_rod_delta(eps1, eps2, norm=None) -> float:
    """Max-norm of the difference of the two (state-shaped) estimates.

    Non-finite input gives ``inf`` so that the detector always fires.
    """
    diff = np.asarray(eps1) - np.asarray(eps2)
    val = float(norm(diff)) if norm is not None else float(np.max(np.abs(diff)))
    return val if np.isfinite(val) else math.inf


def calibrate_threshold(fault_free_deltas, safety_margin: float = 5.0) -> float:
    deltas = [d for d in fault_free_deltas]
    if not deltas:
        raise ValueError("need at least one fault-free delta to calibrate")
    return safety_margin * max(deltas)


@dataclass
class _Entry:
    t: float
    dt: float
    u: np.ndarray
    f: np.ndarray


class HotRodState:
    """History buffer and threshold of one trial's detector.

    The buffer holds the last ``s`` committed step ends, newest first. The
    detector is armed only when the buffer is full and all buffered steps
    used the current step size.
    """

    def __init__(self, p: int, threshold: float = math.inf):
        self.p = p
        self.alpha, self.beta_c = lmm_error_coefficients(p)
        self.s, self.r = lmm_window(p)
        self.threshold = threshold
        self.history: deque[_Entry] = deque(maxlen=self.s)
        self.deltas: list[float] = []

    def armed(self, dt: float) -> bool:
        if len(self.history) < self.s:
            return False
        return all(math.isclose(e.dt, dt, rel_tol=1e-9) for e in self.history)

    def estimate(self, u_n, f_n, dt):
        """Multistep estimate ``eps2`` for the step ending in ``u_n``."""
        us = [u_n] + [e.u for e in self.history]
        fs = [f_n] + [e.f for e in self.history]
        est = sum(a * u for a, u in zip(self.alpha, us))
        est = est + dt * sum(b * f for b, f in zip(self.beta_c, fs[: self.r]))
        return est

    def check(self, eps1, eps2, norm=None) -> bool:
        """True if the step must be restarted."""
        delta = hot_rod_delta(eps1, eps2, norm)
        self.deltas.append(delta)
        return hot_rod_check(self, delta)

    def push(self, t, dt, u, f):
        self.history.appendleft(_Entry(t, dt, np.array(u, copy=True), np.array(f, copy=True)))

    def reset(self):
        self.history.clear()


def hot_rod_check(state: HotRodState, delta: float) -> bool:
    """Trigger iff the delta exceeds the threshold (non-finite always triggers)."""
    if not np.isfinite(delta):
        return True
    return delta > state.threshold
