"""Threshold oracles and execution of query algorithms.

A query algorithm is ``U_T O U_{T-1} ... U_1 O U_0`` applied to |0>. The
unitaries are opaque callables on amplitude arrays, so structured
algorithms never materialize a dense matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .state_core import (
    BasisLayout,
    StateVector,
    measure_index_distribution,
    random_state,
    zero_state,
)

DEFAULT_SUCCESS_THRESHOLD = 0.75


@dataclass(frozen=True)
class ThresholdInput:
    """The monotone input x_1 = ... = x_k = 0, x_{k+1} = ... = x_n = 1.

    ``k`` may equal ``n`` (the all-zero list): the adversary needs that oracle
    when its interval reaches the right end of [1, n]. No index-register
    value encodes that answer, so its success probability is 0.
    """

    k: int
    n: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"threshold k={self.k} outside [0, {self.n}]")

    def bit(self, i: int) -> int:
        """x_i for the 1-based list index ``i``."""
        if not 1 <= i <= self.n:
            raise ValueError(f"list index {i} outside [1, {self.n}]")
        return int(i > self.k)

    def bits(self) -> list[int]:
        return [int(i > self.k) for i in range(1, self.n + 1)]


Unitary = Callable[[np.ndarray], np.ndarray]


class IdentityUnitary:
    def __call__(self, amps):
        return np.array(amps, copy=True)


class PermutationUnitary:
    """Basis permutation: amplitude at basis ``x`` moves to ``dest[x]``."""

    def __init__(self, dest):
        dest = np.asarray(dest, dtype=np.int64)
        if not np.array_equal(np.sort(dest), np.arange(dest.shape[0])):
            raise ValueError("dest is not a permutation")
        self.dest = dest
        self.dest.setflags(write=False)

    def __call__(self, amps):
        out = np.empty_like(amps)
        out[self.dest] = amps
        return out


class RotationUnitary:
    """Ordered product of two-level rotations acting on basis pairs (ia[j], ib[j])."""

    def __init__(self, ia, ib, u00, u01, u10, u11):
        self.ia = np.ascontiguousarray(ia, dtype=np.int64)
        self.ib = np.ascontiguousarray(ib, dtype=np.int64)
        self.coeffs = tuple(np.ascontiguousarray(c, dtype=np.complex128) for c in (u00, u01, u10, u11))
        if np.any(self.ia == self.ib):
            raise ValueError("two-level rotation needs distinct basis states")

    def __len__(self):
        return self.ia.shape[0]

    def __call__(self, amps):
        out = np.array(amps, dtype=np.complex128, copy=True)
        return kernels.apply_rotations(out, self.ia, self.ib, *self.coeffs)


@dataclass(frozen=True)
class QueryAlgorithm:
    layout: BasisLayout
    unitaries: tuple = field(repr=False)
    name: str = "algorithm"

    def __post_init__(self):
        object.__setattr__(self, "unitaries", tuple(self.unitaries))
        if not self.unitaries:
            raise ValueError("an algorithm needs at least U_0")

    @property
    def T(self) -> int:
        return len(self.unitaries) - 1

    def apply_unitary(self, j: int, s: StateVector) -> StateVector:
        out = np.asarray(self.unitaries[j](s.amplitudes), dtype=np.complex128)
        if out.shape != s.amplitudes.shape:
            raise ValueError(f"unitary {j} changed the state dimension")
        return StateVector._trusted(s.layout, out)


def _check_input(layout: BasisLayout, x: ThresholdInput):
    if x.n != layout.n:
        raise ValueError(f"input size {x.n} does not match layout n={layout.n}")


def apply_oracle(s: StateVector, x: ThresholdInput) -> StateVector:
    """O_k: |i, b, z> -> |i, b xor x_i, z>."""
    _check_input(s.layout, x)
    out = kernels.flip_answer_bit(s.amplitudes, s.layout.n, x.k)
    return StateVector._trusted(s.layout, out)


def prefix_states(alg: QueryAlgorithm, x: ThresholdInput, s: int) -> list[StateVector]:
    """States before queries 1..min(s, T) under oracle ``x``."""
    _check_input(alg.layout, x)
    steps = min(s, alg.T)
    states = []
    if steps == 0:
        return states
    state = alg.apply_unitary(0, zero_state(alg.layout))
    states.append(state)
    for j in range(1, steps):
        state = alg.apply_unitary(j, apply_oracle(state, x))
        states.append(state)
    return states


def run_prefix(alg: QueryAlgorithm, x: ThresholdInput, s: int) -> StateVector:
    """State right before the ``s``-th query (after U_{s-1})."""
    if not 1 <= s <= alg.T:
        raise ValueError(f"step {s} outside [1, {alg.T}]")
    return prefix_states(alg, x, s)[-1]


def run_hybrid(alg: QueryAlgorithm, i: int, early: ThresholdInput, late: ThresholdInput) -> StateVector:
    """Final state when queries 1..i use ``early`` and queries i+1..T use ``late``."""
    if not 0 <= i <= alg.T:
        raise ValueError(f"hybrid index {i} outside [0, {alg.T}]")
    _check_input(alg.layout, early)
    _check_input(alg.layout, late)
    state = alg.apply_unitary(0, zero_state(alg.layout))
    for j in range(1, alg.T + 1):
        state = apply_oracle(state, early if j <= i else late)
        state = alg.apply_unitary(j, state)
    return state


def run_full(alg: QueryAlgorithm, x: ThresholdInput) -> StateVector:
    return run_hybrid(alg, 0, x, x)


def success_probability(alg: QueryAlgorithm, x: ThresholdInput, final: StateVector | None = None) -> float:
    """Probability that measuring the index register yields the i-field value ``k``."""
    if final is None:
        final = run_full(alg, x)
    if x.k >= alg.layout.n:
        return 0.0
    return float(measure_index_distribution(final)[x.k])


def unitarity_defect(unitary: Unitary, layout: BasisLayout, samples: int = 100, seed: int = 0) -> float:
    """Largest | ||U s|| - 1 | over ``samples`` random unit states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        s = random_state(layout, rng)
        worst = max(worst, abs(float(np.linalg.norm(unitary(s.amplitudes))) - 1.0))
    return worst


def dense_matrix(unitary: Unitary, dimension: int) -> np.ndarray:
    """Column-by-column matrix of ``unitary``; test utility for small dimensions."""
    if dimension > 1 << 12:
        raise ValueError("dense_matrix is meant for small dimensions only")
    cols = []
    for j in range(dimension):
        e = np.zeros(dimension, dtype=np.complex128)
        e[j] = 1.0
        cols.append(unitary(e))
    return np.stack(cols, axis=1)


def identity_algorithm(layout: BasisLayout, T: int = 0, name: str = "identity") -> QueryAlgorithm:
    return QueryAlgorithm(layout, [IdentityUnitary() for _ in range(T + 1)], name=name)

