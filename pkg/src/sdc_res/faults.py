"""
Transient bit flips in IEEE-754 binary64 solution data.

Bits are numbered from the most significant end: bit 0 is the sign, bits
1-11 the exponent and bits 12-63 the mantissa. Complex states are addressed
as interleaved (real, imag) pairs of 64-bit words.
"""
from __future__ import annotations

import itertools
import json
import struct
from dataclasses import asdict, dataclass

import numpy as np

N_ITERATIONS = 5
N_BITS = 64


def flip_bit(value: float, bit: int) -> float:
    if not 0 <= bit < N_BITS:
        raise ValueError(f"bit must be in [0, 63], got {bit}")
    (word,) = struct.unpack(">Q", struct.pack(">d", float(value)))
    word ^= 1 << (N_BITS - 1 - bit)
    return struct.unpack(">d", struct.pack(">Q", word))[0]


def float_to_bits(value: float) -> str:
    (word,) = struct.unpack(">Q", struct.pack(">d", float(value)))
    return format(word, "064b")


def bits_to_float(bits: str) -> float:
    return struct.unpack(">d", struct.pack(">Q", int(bits, 2)))[0]


def flip_word(array: np.ndarray, index: int, bit: int) -> None:
    """Flip ``bit`` of the ``index``-th 64-bit word of ``array`` in place."""
    if not 0 <= bit < N_BITS:
        raise ValueError(f"bit must be in [0, 63], got {bit}")
    words = array.reshape(-1).view(np.uint64)
    if not np.shares_memory(words, array):
        raise ValueError("array must be contiguous to flip bits in place")
    words[index] ^= np.uint64(1 << (N_BITS - 1 - bit))


@dataclass(frozen=True, order=True)
class FaultSpec:
    """Coordinates of one transient bit flip."""

    iteration: int
    node: int
    component: int
    bit: int
    t_fault: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.iteration <= N_ITERATIONS:
            raise ValueError(f"iteration must be in [1, {N_ITERATIONS}], got {self.iteration}")
        if not 0 <= self.bit < N_BITS:
            raise ValueError(f"bit must be in [0, 63], got {self.bit}")
        if self.node < 0 or self.component < 0:
            raise ValueError("node and component must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "FaultSpec":
        return cls(iteration=int(d["iteration"]), node=int(d["node"]), component=int(d["component"]),
                   bit=int(d["bit"]), t_fault=float(d.get("t_fault", 0.0)), seed=int(d.get("seed", 0)))

    @classmethod
    def from_json(cls, s: str) -> "FaultSpec":
        return cls.from_dict(json.loads(s))


def enumerate_faults(n_words: int, M: int, t_fault: float) -> list[FaultSpec]:
    """Every (iteration, node, component, bit) combination, lexicographically."""
    return [
        FaultSpec(iteration=i, node=n, component=c, bit=b, t_fault=t_fault, seed=idx)
        for idx, (i, n, c, b) in enumerate(
            itertools.product(range(1, N_ITERATIONS + 1), range(M + 1), range(n_words), range(N_BITS))
        )
    ]


def sample_faults(seed: int, n_words: int, M: int, t_fault: float, n: int, start: int = 0) -> list[FaultSpec]:
    """``n`` faults drawn uniformly with replacement.

    Trial ``i`` uses a Philox stream keyed by ``(seed, i)``, so any trial can
    be regenerated without drawing the ones before it.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    specs = []
    for i in range(start, start + n):
        rng = np.random.Generator(np.random.Philox(key=[seed, i]))
        it, node, comp, bit = (int(v) for v in rng.integers(
            [1, 0, 0, 0], [N_ITERATIONS + 1, M + 1, n_words, N_BITS]))
        specs.append(FaultSpec(iteration=it, node=node, component=comp, bit=bit, t_fault=t_fault, seed=i))
    return specs


class FaultInjector:
    """Per-trial hook that fires one FaultSpec at most once.

    Called after every completed sweep. A step "contains" ``t_fault`` when
    ``t <= t_fault < t + dt``; once fired, restarts of the step do not see
    the fault again.
    """

    def __init__(self, spec: FaultSpec | None, table=None, problem=None):
        self.spec = spec
        self.fired = False
        self.table = table
        self.problem = problem
        self.old_value = None
        self.new_value = None

    def __call__(self, state, k_just_completed: int) -> bool:
        spec = self.spec
        if spec is None or self.fired or k_just_completed != spec.iteration:
            return False
        if not (state.t <= spec.t_fault < state.t + state.dt):
            return False
        inject(state, spec, self.problem, self.table)
        self.fired = True
        return True


def inject(state, spec: FaultSpec, problem, table) -> None:
    """Flip the addressed bit of ``state.u[spec.node]`` and refresh f there."""
    row = state.u[spec.node]
    if not row.flags.c_contiguous:
        raise ValueError("state rows must be contiguous")
    words = row.reshape(-1).view(np.uint64)
    if spec.component >= words.size:
        raise ValueError(f"component {spec.component} out of range for {words.size} words")
    words[spec.component] ^= np.uint64(1 << (N_BITS - 1 - spec.bit))
    if problem is not None and table is not None:
        from .sweeper import refresh_f

        with np.errstate(all="ignore"):
            refresh_f(state, spec.node, problem, table)
