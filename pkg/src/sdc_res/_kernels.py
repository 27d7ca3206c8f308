"""
Compiled sweep and residual for small unsplit problems.

Problems exposing ``kernels = (solve, rhs, params)`` with numba-jitted
``solve(rhs, a, guess, out, params) -> status`` and ``rhs(u, out, params)``
get their sweeps run here instead of through numpy. The arithmetic is the
same as in ``sweeper.sweep``; only the summation order may differ.
"""
from __future__ import annotations

import numba
import numpy as np

OK, OVERFLOW, MAXITER, NONFINITE = 0, 1, 2, 3

_cache = {}


def _build(solve, rhs):
    @numba.njit
    def sweep_kernel(u, fI, QmQd, Qd, dt, params):
        M = Qd.shape[0]
        n = u.shape[1]
        rhs_all = np.empty((M, n))
        for m in range(M):
            for c in range(n):
                acc = 0.0
                for j in range(M):
                    acc += QmQd[m, j] * fI[j + 1, c]
                rhs_all[m, c] = u[0, c] + dt * acc
        r = np.empty(n)
        out = np.empty(n)
        for m in range(M):
            for c in range(n):
                acc = 0.0
                for j in range(m):
                    acc += Qd[m, j] * fI[j + 1, c]
                r[c] = rhs_all[m, c] + dt * acc
            status = solve(r, dt * Qd[m, m], u[m + 1], out, params)
            if status != OK:
                return status, m + 1
            for c in range(n):
                u[m + 1, c] = out[c]
            rhs(out, r, params)
            for c in range(n):
                if not (np.isfinite(out[c]) and np.isfinite(r[c])):
                    return NONFINITE, m + 1
                fI[m + 1, c] = r[c]
        return OK, 0

    @numba.njit
    def residual_kernel(u, fI, Q, dt):
        M = Q.shape[0]
        n = u.shape[1]
        res = 0.0
        for m in range(M):
            for c in range(n):
                acc = 0.0
                for j in range(M):
                    acc += Q[m, j] * fI[j + 1, c]
                d = abs(u[0, c] + dt * acc - u[m + 1, c])
                if not np.isfinite(d):
                    return np.inf
                if d > res:
                    res = d
        return res

    return sweep_kernel, residual_kernel


def kernels_for(solve, rhs):
    key = (solve, rhs)
    if key not in _cache:
        _cache[key] = _build(solve, rhs)
    return _cache[key]
