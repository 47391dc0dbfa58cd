"""Reference query algorithms.

* ``lifted_binary_search`` -- classical binary search made reversible: every
  U_j is a basis permutation, so runs are exact.
* ``truncated_binary_search`` -- the same with only the first few rounds.
* ``zero_query`` -- T = 0, U_0 = identity.
* ``random_algorithm`` -- seeded products of random two-level rotations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .query_model import (
    IdentityUnitary,
    PermutationUnitary,
    QueryAlgorithm,
    RotationUnitary,
)
from .state_core import BasisLayout

MAX_RANDOM_DIMENSION = 1 << 14
MAX_PERMUTATION_DIMENSION = 1 << 23


def _log2(n: int) -> int:
    if n < 2 or n & (n - 1):
        raise ValueError(f"n must be a power of two >= 2, got {n}")
    return n.bit_length() - 1


def _answer_prefix(z: np.ndarray, count: int) -> np.ndarray:
    # High bits of k recovered from the first `count` stored answers (MSB first).
    # Answer x_M = 0 means k >= M, i.e. the next bit of k is 1.
    prefix = np.zeros_like(z)
    for j in range(count):
        prefix = (prefix << 1) | (1 - ((z >> j) & 1))
    return prefix


def _probe_field(z: np.ndarray, j: int, p: int) -> np.ndarray:
    """i-field probed by query ``j`` (1-based) given answers stored in ``z``."""
    prefix = _answer_prefix(z, j - 1)
    midpoint = (prefix << (p - j + 1)) + (1 << (p - j))
    return midpoint - 1


def _final_field(z: np.ndarray, queries: int, p: int) -> np.ndarray:
    return _answer_prefix(z, queries) << (p - queries)


def _decision_tree(n: int, queries: int, workspace_bits: int | None, name: str) -> QueryAlgorithm:
    p = _log2(n)
    w = queries if workspace_bits is None else workspace_bits
    if w < queries:
        raise ValueError(f"need at least {queries} workspace bits, got {w}")
    layout = BasisLayout(n, w)
    if layout.dimension > MAX_PERMUTATION_DIMENSION:
        raise ValueError(
            f"dimension {layout.dimension} too large for {name} (max {MAX_PERMUTATION_DIMENSION}); "
            "lower n or the workspace"
        )
    x = np.arange(layout.dimension, dtype=np.int64)
    field = x >> (w + 1)
    b = (x >> w) & 1
    z = x & ((1 << w) - 1)

    def pack(f, bb, zz):
        return (f << (w + 1)) | (bb << w) | zz

    unitaries = []
    first = _probe_field(z, 1, p) if queries else _final_field(z, 0, p)
    unitaries.append(PermutationUnitary(pack(field ^ first, b, z)))
    for j in range(1, queries + 1):
        f = field ^ _probe_field(z, j, p)  # uncompute probe j
        bit = 1 << (j - 1)
        zb = (z & bit) >> (j - 1)
        z2 = (z & ~bit) | (b << (j - 1))  # swap b with workspace bit j-1
        b2 = zb
        nxt = _probe_field(z2, j + 1, p) if j < queries else _final_field(z2, queries, p)
        unitaries.append(PermutationUnitary(pack(f ^ nxt, b2, z2)))
    return QueryAlgorithm(layout, unitaries, name=name)


def lifted_binary_search(n: int, workspace_bits: int | None = None) -> QueryAlgorithm:
    """Exact binary search with log2(n) queries; answers i-field k on input k."""
    p = _log2(n)
    return _decision_tree(n, p, workspace_bits, "lifted-bs")


def truncated_binary_search(n: int, T_cut: int, workspace_bits: int | None = None) -> QueryAlgorithm:
    """First ``T_cut`` rounds of binary search; outputs the known high bits of k."""
    p = _log2(n)
    if not 0 <= T_cut < p:
        raise ValueError(f"T_cut must lie in [0, {p - 1}], got {T_cut}")
    return _decision_tree(n, T_cut, workspace_bits, f"truncated-bs:{T_cut}")


def zero_query(n: int, workspace_bits: int = 0) -> QueryAlgorithm:
    return QueryAlgorithm(BasisLayout(n, workspace_bits), [IdentityUnitary()], name="zero-query")


def random_rotations(dimension: int, count: int, rng: np.random.Generator) -> RotationUnitary:
    ia = rng.integers(0, dimension, size=count)
    ib = rng.integers(0, dimension - 1, size=count)
    ib = ib + (ib >= ia)
    theta = rng.uniform(0.0, 2 * np.pi, size=count)
    alpha, beta, gamma = rng.uniform(0.0, 2 * np.pi, size=(3, count))
    c, s = np.cos(theta), np.sin(theta)
    g = np.exp(1j * gamma)
    return RotationUnitary(
        ia,
        ib,
        g * np.exp(1j * alpha) * c,
        g * np.exp(1j * beta) * s,
        -g * np.exp(-1j * beta) * s,
        g * np.exp(-1j * alpha) * c,
    )


def random_algorithm(n: int, T: int, workspace_bits: int, seed: int, rotations: int | None = None) -> QueryAlgorithm:
    """Seeded algorithm whose U_j are products of random two-level rotations.

    Each U_j uses ``rotations`` rotations; the default 4*d spreads |0> over
    essentially every basis state, while d rotations leave U_0|0> on a handful.
    """
    layout = BasisLayout(n, workspace_bits)
    d = layout.dimension
    if d > MAX_RANDOM_DIMENSION:
        raise ValueError(f"dimension {d} too large for dense randomization (max {MAX_RANDOM_DIMENSION})")
    if T < 0:
        raise ValueError("T must be nonnegative")
    count = 4 * d if rotations is None else rotations
    if count < d:
        raise ValueError(f"need at least {d} rotations per unitary")
    rng = np.random.default_rng(seed)
    unitaries = [random_rotations(d, count, rng) for _ in range(T + 1)]
    return QueryAlgorithm(layout, unitaries, name=f"random:T={T},w={workspace_bits},seed={seed}")


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: str
    n: int
    T: int | None = None
    seed: int = 0
    workspace_bits: int | None = None

    @property
    def queries(self) -> int:
        if self.kind == "lifted_bs":
            return _log2(self.n)
        if self.kind == "zero_query":
            return 0
        return self.T

    def build(self) -> QueryAlgorithm:
        if self.kind == "lifted_bs":
            return lifted_binary_search(self.n, self.workspace_bits)
        if self.kind == "truncated_bs":
            return truncated_binary_search(self.n, self.T, self.workspace_bits)
        if self.kind == "zero_query":
            return zero_query(self.n, self.workspace_bits or 0)
        if self.kind == "random":
            return random_algorithm(self.n, self.T, self.workspace_bits or 0, self.seed)
        raise ValueError(f"unknown algorithm kind {self.kind!r}")


_KINDS = {"lifted-bs": "lifted_bs", "truncated-bs": "truncated_bs", "zero-query": "zero_query", "random": "random"}


def parse_algorithm_spec(text: str, n: int, seed: int = 0) -> AlgorithmSpec:
    """Parse ``lifted-bs``, ``truncated-bs:2``, ``zero-query``, ``random:T=4,w=3,seed=17``."""
    m = re.fullmatch(r"\s*([a-z-]+)\s*(?::\s*(.*))?", text)
    if not m or m.group(1) not in _KINDS:
        raise ValueError(f"unrecognized algorithm string {text!r}; kinds: {sorted(_KINDS)}")
    kind = _KINDS[m.group(1)]
    args = (m.group(2) or "").strip()
    if kind == "truncated_bs":
        if not args.isdigit():
            raise ValueError("truncated-bs needs a round count, e.g. truncated-bs:2")
        return AlgorithmSpec(kind, n, T=int(args))
    if kind == "random":
        opts = {"T": None, "w": 0, "seed": seed}
        for part in filter(None, (a.strip() for a in args.split(","))):
            key, _, value = part.partition("=")
            if key not in opts or not value.strip().lstrip("-").isdigit():
                raise ValueError(f"bad random option {part!r}; expected T=, w=, seed=")
            opts[key] = int(value)
        if opts["T"] is None:
            raise ValueError("random algorithm needs T=<queries>")
        return AlgorithmSpec(kind, n, T=opts["T"], seed=opts["seed"], workspace_bits=opts["w"])
    if args:
        raise ValueError(f"{m.group(1)} takes no parameters")
    return AlgorithmSpec(kind, n)
