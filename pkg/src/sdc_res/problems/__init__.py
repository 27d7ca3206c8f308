"""Benchmark problems and their registry."""
from __future__ import annotations

import dataclasses

from .allen_cahn import AllenCahn, AllenCahnParams
from .base import Problem, SolverFailure, SolverNonConvergence, SolverOverflow
from .dahlquist import Dahlquist
from .lorenz import Lorenz, LorenzParams
from .nls import NLSParams, NonlinearSchroedinger

PROBLEMS = {
    "lorenz": (Lorenz, LorenzParams),
    "nls": (NonlinearSchroedinger, NLSParams),
    "allen-cahn": (AllenCahn, AllenCahnParams),
    "dahlquist": (Dahlquist, None),
}


def make_problem(name: str, params: dict | None = None) -> Problem:
    """Instantiate a registered problem, overriding parameter fields by name."""
    if name not in PROBLEMS:
        raise ValueError(f"unknown problem {name!r}, expected one of {sorted(PROBLEMS)}")
    cls, params_cls = PROBLEMS[name]
    params = dict(params or {})
    if params_cls is None:
        return cls(**params)
    known = {f.name for f in dataclasses.fields(params_cls)}
    unknown = set(params) - known
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {sorted(unknown)}")
    if "u0" in params:
        params["u0"] = tuple(params["u0"])
    return cls(params_cls(**params))


__all__ = ["AllenCahn", "AllenCahnParams", "Dahlquist", "Lorenz", "LorenzParams", "NLSParams",
           "NonlinearSchroedinger", "PROBLEMS", "Problem", "SolverFailure", "SolverNonConvergence",
           "SolverOverflow", "make_problem"]
