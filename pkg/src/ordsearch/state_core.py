"""State vectors over the query register layout |i, b, z>.

Basis index encoding (most significant first)::

    index = (i_field << (w + 1)) | (b << w) | z

where ``i_field = i - 1`` for the 1-based list index ``i``. States are
immutable: every operation returns a new :class:`StateVector`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

NORM_TOL = 1e-9
IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class BasisLayout:
    n: int
    workspace_bits: int = 0

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 2, got {self.n}")
        if self.workspace_bits < 0:
            raise ValueError("workspace_bits must be nonnegative")

    @property
    def index_bits(self) -> int:
        return self.n.bit_length() - 1

    @property
    def workspace_size(self) -> int:
        return 1 << self.workspace_bits

    @property
    def dimension(self) -> int:
        return self.n * 2 * self.workspace_size

    def encode(self, i: int, b: int = 0, z: int = 0) -> int:
        """Basis index for list index ``i`` (1-based), answer bit ``b``, workspace ``z``."""
        if not 1 <= i <= self.n:
            raise ValueError(f"list index {i} outside [1, {self.n}]")
        if b not in (0, 1) or not 0 <= z < self.workspace_size:
            raise ValueError(f"invalid b={b} or z={z}")
        return ((i - 1) << (self.workspace_bits + 1)) | (b << self.workspace_bits) | z

    def decode(self, index: int) -> tuple[int, int, int]:
        """Inverse of :meth:`encode`; returns (i, b, z) with 1-based ``i``."""
        w = self.workspace_bits
        return (index >> (w + 1)) + 1, (index >> w) & 1, index & ((1 << w) - 1)


class StateVector:
    """Complex amplitudes over a :class:`BasisLayout`. May be sub-normalized."""

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout: BasisLayout, amplitudes):
        amps = np.array(amplitudes, dtype=np.complex128, copy=True).reshape(-1)
        if amps.shape[0] != layout.dimension:
            raise ValueError(
                f"expected {layout.dimension} amplitudes for {layout}, got {amps.shape[0]}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @classmethod
    def _trusted(cls, layout, amps):
        # Skips the copy and finiteness scan for arrays produced internally.
        obj = cls.__new__(cls)
        amps.setflags(write=False)
        object.__setattr__(obj, "layout", layout)
        object.__setattr__(obj, "amplitudes", amps)
        return obj

    def __sub__(self, other: StateVector) -> StateVector:
        _check_same_layout(self, other)
        return StateVector._trusted(self.layout, self.amplitudes - other.amplitudes)

    def __repr__(self):
        return f"StateVector(n={self.layout.n}, w={self.layout.workspace_bits}, norm={norm(self):.6g})"


def _check_same_layout(a: StateVector, b: StateVector):
    if a.layout != b.layout:
        raise ValueError(f"layout mismatch: {a.layout} vs {b.layout}")


def zero_state(layout: BasisLayout) -> StateVector:
    amps = np.zeros(layout.dimension, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector._trusted(layout, amps)


def basis_state(layout: BasisLayout, i: int, b: int = 0, z: int = 0) -> StateVector:
    amps = np.zeros(layout.dimension, dtype=np.complex128)
    amps[layout.encode(i, b, z)] = 1.0
    return StateVector._trusted(layout, amps)


def random_state(layout: BasisLayout, rng: np.random.Generator) -> StateVector:
    """Haar-like random unit state (normalized complex Gaussian)."""
    amps = rng.normal(size=layout.dimension) + 1j * rng.normal(size=layout.dimension)
    amps /= np.linalg.norm(amps)
    return StateVector._trusted(layout, amps)


def norm(s: StateVector) -> float:
    return float(np.linalg.norm(s.amplitudes))


def l2_distance(a: StateVector, b: StateVector) -> float:
    _check_same_layout(a, b)
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def _check_range(layout: BasisLayout, lo: int, hi: int):
    if not 1 <= lo <= hi <= layout.n:
        raise ValueError(f"query range [{lo}, {hi}] not within [1, {layout.n}]")


def project_query_range(s: StateVector, lo: int, hi: int) -> StateVector:
    """Keep amplitudes whose list index lies in [lo, hi]; zero the rest."""
    layout = s.layout
    _check_range(layout, lo, hi)
    out = np.zeros(layout.dimension, dtype=np.complex128)
    row = 2 * layout.workspace_size
    out[(lo - 1) * row : hi * row] = s.amplitudes[(lo - 1) * row : hi * row]
    return StateVector._trusted(layout, out)


def index_mass(s: StateVector) -> np.ndarray:
    """Squared norm of the part of ``s`` querying each list index (i-field order)."""
    return kernels.index_mass(s.amplitudes, s.layout.n)


def range_norm(s: StateVector, lo: int, hi: int) -> float:
    """Norm of ``project_query_range(s, lo, hi)`` without materializing it."""
    _check_range(s.layout, lo, hi)
    return float(np.sqrt(index_mass(s)[lo - 1 : hi].sum()))


def block_norms(s: StateVector, lo: int, hi: int, parts: int) -> np.ndarray:
    """Norms of the projections onto ``parts`` equal consecutive blocks of [lo, hi]."""
    _check_range(s.layout, lo, hi)
    width = hi - lo + 1
    if width % parts:
        raise ValueError(f"range of width {width} does not split into {parts} parts")
    mass = index_mass(s)[lo - 1 : hi].reshape(parts, width // parts).sum(axis=1)
    return np.sqrt(mass)


def measure_index_distribution(s: StateVector) -> np.ndarray:
    """Outcome probabilities of measuring the index register.

    Entry ``j`` is the probability of reading i-field ``j``, i.e. list index ``j + 1``.
    """
    return index_mass(s)


def variational_distance(p, p2) -> float:
    p = np.asarray(p, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p.shape != p2.shape:
        raise ValueError(f"distribution length mismatch: {p.shape} vs {p2.shape}")
    return float(np.abs(p - p2).sum())
