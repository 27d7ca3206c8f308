"""
Per-problem campaign defaults: fixed step size and strategy tolerances.

The step sizes come from a convergence study of the fixed strategy and the
tolerances from a matched-accuracy calibration (each strategy's fault-free
global error within a factor 2 of the fixed strategy's); both are produced
by ``scripts/calibrate.py`` and recorded in every campaign manifest.

Within the factor-2 band, eps_tol is the value whose error ratio is closest
to 1. For k-adaptivity the error is flat once the collocation problem is
solved, so conv_tol is the loosest value on that plateau, or the tightest
value inside the band when the plateau lies outside it.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ProblemDefaults:
    dt: float
    strategies: dict = field(default_factory=dict)


_DEFAULTS = {
    "lorenz": ProblemDefaults(
        dt=0.01,
        strategies={
            "fixed": {"k_max": 5},
            "k_adaptive": {"conv_tol": 1e-10},
            "dt_adaptive": {"k_max": 5, "eps_tol": 3.16e-7},
            "dt_k_adaptive": {"eps_tol": 3.16e-4, "conv_tol": 1e-10},
            "hot_rod": {"k_max": 5},
        },
    ),
    "nls": ProblemDefaults(
        dt=0.0025,
        strategies={
            "fixed": {"k_max": 5},
            "k_adaptive": {"conv_tol": 1e-11},
            "dt_adaptive": {"k_max": 5, "eps_tol": 3.16e-8},
            "dt_k_adaptive": {"eps_tol": 2e-6, "conv_tol": 1e-9},
            "hot_rod": {"k_max": 5},
        },
    ),
    "allen-cahn": ProblemDefaults(
        dt=5e-4,
        strategies={
            "fixed": {"k_max": 5},
            "k_adaptive": {"conv_tol": 3.16e-9},
            # the IMEX iteration stops contracting near dt = 1e-3, so growth is capped
            "dt_adaptive": {"k_max": 5, "eps_tol": 1e-7, "dt_max": 5e-4},
            "dt_k_adaptive": {"eps_tol": 1e-6, "conv_tol": 1e-9, "dt_max": 5e-4},
            "hot_rod": {"k_max": 5},
        },
    ),
    "dahlquist": ProblemDefaults(
        dt=0.05,
        strategies={
            "fixed": {"k_max": 5},
            "k_adaptive": {"conv_tol": 1e-11},
            "dt_adaptive": {"k_max": 5, "eps_tol": 3e-10},
            "dt_k_adaptive": {"eps_tol": 3e-6, "conv_tol": 1e-13},
            "hot_rod": {"k_max": 5},
        },
    ),
}


def problem_defaults(name: str) -> ProblemDefaults:
    if name not in _DEFAULTS:
        raise ValueError(f"no defaults for problem {name!r}")
    return _DEFAULTS[name]
