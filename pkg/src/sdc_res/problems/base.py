"""Problem contract shared by the sweeper, controllers and fault injector."""
from __future__ import annotations

import numpy as np


class SolverFailure(RuntimeError):
    """A node solve diverged, overflowed or produced non-finite values.

    ``iteration`` and ``node`` are filled in by the sweeper when the failure
    happens inside a sweep.
    """

    def __init__(self, msg: str, iteration: int | None = None, node: int | None = None):
        super().__init__(msg)
        self.iteration = iteration
        self.node = node

    def __str__(self):
        loc = ""
        if self.iteration is not None:
            loc = f" (iteration {self.iteration}, node {self.node})"
        return super().__str__() + loc


class SolverOverflow(SolverFailure):
    pass


class SolverNonConvergence(SolverFailure):
    pass


class Problem:
    """Base class for the benchmark problems.

    Subclasses set ``shape``, ``dtype``, ``t0``, ``t_end``, ``t_fault`` and
    implement the right-hand side and the implicit solve. Unsplit problems
    leave ``has_explicit`` False and only provide ``eval_f_impl``.
    """

    name = "problem"
    shape: tuple = ()
    dtype = np.float64
    t0 = 0.0
    t_end = 1.0
    t_fault = 0.5
    has_explicit = False
    autonomous = True
    relative_error = False

    def u_init(self) -> np.ndarray:
        raise NotImplementedError

    def eval_f_impl(self, u, t):
        raise NotImplementedError

    def eval_f_expl(self, u, t):
        return np.zeros_like(u)

    def eval_f(self, u, t):
        """Both parts of the right-hand side as a pair ``(f_impl, f_expl)``."""
        if self.has_explicit:
            return self.eval_f_impl(u, t), self.eval_f_expl(u, t)
        return self.eval_f_impl(u, t), None

    def solve_system(self, rhs, a, t, guess):
        """Solve ``v - a * f_impl(v, t) = rhs`` for v."""
        raise NotImplementedError

    def solve_and_eval(self, rhs, a, t, guess):
        """Node solve followed by the right-hand side at the result: ``(v, f_impl, f_expl)``.

        Problems whose solve already produces ``f_impl`` cheaply override this.
        """
        v = self.solve_system(rhs, a, t, guess)
        fi, fe = self.eval_f(v, t)
        return v, fi, fe

    def norm(self, u) -> float:
        """Max-norm over all scalar components (complex modulus for complex)."""
        return float(np.max(np.abs(u))) if np.size(u) else 0.0

    def reference_solution(self, t):
        raise NotImplementedError

    @property
    def n_words(self) -> int:
        """Number of 64-bit words in one state (complex scalars count twice)."""
        n = int(np.prod(self.shape, dtype=np.int64))
        return 2 * n if np.issubdtype(np.dtype(self.dtype), np.complexfloating) else n

    def metadata(self) -> dict:
        return {"name": self.name, "shape": list(self.shape), "t0": self.t0,
                "t_end": self.t_end, "t_fault": self.t_fault}
