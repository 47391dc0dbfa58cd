"""Inequality suites over seeded algorithm corpora.

Each check feeds a :class:`Tally`, which records how many instances were
tested, how many failed, and the worst slack (bound minus value; negative
means violated).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .adversary import AdversaryParams, Interval, SubdivideRecord, subdivide
from .algorithms import lifted_binary_search, random_algorithm
from .state_core import BasisLayout, l2_distance, measure_index_distribution, random_state, variational_distance
from .verifier import DEFAULT_BV_CONSTANT, HybridReport, hybrid_profile

TOL = 1e-9


@dataclass
class Tally:
    name: str
    checks: int = 0
    violations: int = 0
    worst_slack: float = float("inf")
    examples: list = field(default_factory=list)

    def add(self, value: float, bound: float, tol: float = TOL, where: str = ""):
        self.checks += 1
        slack = float(bound - value)
        self.worst_slack = min(self.worst_slack, slack)
        if slack < -tol:
            self.violations += 1
            if len(self.examples) < 5:
                self.examples.append(f"{where}: {value!r} > {bound!r}")

    def row(self) -> dict:
        return {
            "inequality": self.name,
            "checks": self.checks,
            "violations": self.violations,
            "worst_slack": self.worst_slack if self.checks else None,
        }


class Suite:
    def __init__(self):
        self.tallies: dict[str, Tally] = {}
        self.extras: dict = {}

    def __getitem__(self, name) -> Tally:
        if name not in self.tallies:
            self.tallies[name] = Tally(name)
        return self.tallies[name]

    @property
    def ok(self) -> bool:
        return all(t.violations == 0 for t in self.tallies.values())

    def rows(self) -> list[dict]:
        return [t.row() for t in self.tallies.values()]


CONTRACTION = "S' <= q' S"
BLOCK_MIN = "min_r S_r <= S / sqrt(t)"
BLOCK_SUM = "sum_r S_r <= sqrt(t) S"
PREFIX_DRIFT = "||phi_i - phi'_i|| <= 2 sum_{j<i} ||psi_j||"
BLOCK_DRIFT = "||psi_{i,r} - psi'_i|| <= 2 sum_{j<i} ||psi_j||"
PYTH = "sum_r ||psi_{i,r}||^2 = ||psi_i||^2"
GEOM = "sum_{i=1..N} q^-i < 1/(q-1)"
PERTURB = "||phi_i - phi_{i-1}|| <= 2 ||psi_i||"
TRIANGLE = "||phi_0 - phi_T|| <= sum_i ||phi_i - phi_{i-1}||"
HYBRID_STEP = "||phi_i - phi_{i-1}|| <= (1-1/q)/(5 q^(s-i)) given per-step psi bound"
TOTAL = "||phi_0 - phi_T|| <= 1/5 given per-step psi bound"
BV = "variational <= c * l2"


def check_record(suite: Suite, rec: SubdivideRecord, params: AdversaryParams, where: str = ""):
    """Feed every per-subdivide inequality for ``rec`` into ``suite``."""
    t = params.t
    suite[CONTRACTION].add(rec.S_after, params.q_prime * rec.S_before, where=where)
    suite[BLOCK_MIN].add(rec.S_values.min(), rec.S_before / np.sqrt(t), where=where)
    suite[BLOCK_SUM].add(rec.S_values.sum(), np.sqrt(t) * rec.S_before, where=where)
    prefix = np.concatenate([[0.0], np.cumsum(rec.parent_norms)[:-1]])
    r = rec.chosen_r - 1
    for i in range(rec.s):
        suite[PREFIX_DRIFT].add(rec.phi_gaps[i], 2 * prefix[i], where=f"{where} i={i + 1}")
        suite[BLOCK_DRIFT].add(rec.psi_gaps[i], 2 * prefix[i], where=f"{where} i={i + 1}")
        lhs = float(np.sum(rec.psi_norms[i] ** 2))
        rhs = float(rec.parent_norms[i] ** 2)
        suite[PYTH].add(abs(lhs - rhs), 0.0, tol=1e-12, where=f"{where} i={i + 1}")
    # the S_r used in (S' <= S_r + 2/(q-1) S) is the chosen block's sum
    suite["S' <= S_r + 2 S/(q-1)"].add(
        rec.S_after, rec.S_values[r] + 2 * rec.S_before / (params.q - 1), where=where
    )


def check_hybrid(suite: Suite, h: HybridReport, where: str = ""):
    for i, d in enumerate(h.per_step_distance):
        suite[PERTURB].add(d, 2 * h.position_norms[i], where=f"{where} i={i + 1}")
        suite[PERTURB].add(d, 2 * h.interval_norms[i], where=f"{where} i={i + 1}")
    suite[TRIANGLE].add(h.total_distance, h.triangle_sum, where=where)
    if h.psi_bound_holds:
        for i, d in enumerate(h.per_step_distance):
            suite[HYBRID_STEP].add(d, h.per_step_bound[i], where=f"{where} i={i + 1}")
        suite[TOTAL].add(h.total_distance, 0.2, where=where)


def subdivide_chain(alg, params: AdversaryParams, s: int, depth: int | None = None) -> list[SubdivideRecord]:
    """Nested subdivides at a fixed step value, starting from [1, n]."""
    n = alg.layout.n
    interval = Interval(1, n, n)
    out = []
    while interval.m >= params.t and (depth is None or len(out) < depth):
        rec = subdivide(alg, interval, s, params)
        out.append(rec)
        interval = rec.child
    return out


def geometric_checks(suite: Suite, q: float, up_to: int = 64):
    """Finite geometric tails stay strictly below 1/(q-1); checked in exact rationals."""
    qf = Fraction(q)
    limit = 1 / (qf - 1)
    total = Fraction(0)
    for N in range(1, up_to + 1):
        total += qf**-N
        gap = limit - total
        suite[GEOM].add(0.0, float(gap) if gap > 0 else -1.0, tol=0.0, where=f"N={N}")


def bv_sampling(suite: Suite, n: int = 16, w: int = 1, pairs: int = 1000, seed: int = 0,
                constant: float = DEFAULT_BV_CONSTANT) -> float:
    """Random unit pairs (half independent, half nearby); returns the max variational/l2 ratio."""
    layout = BasisLayout(n, w)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for j in range(pairs):
        a = random_state(layout, rng)
        if j % 2:
            eps = 10.0 ** rng.uniform(-6, 0)
            noise = random_state(layout, rng).amplitudes
            amps = a.amplitudes + eps * noise
            b = type(a)(layout, amps / np.linalg.norm(amps))
        else:
            b = random_state(layout, rng)
        l2 = l2_distance(a, b)
        var = variational_distance(measure_index_distribution(a), measure_index_distribution(b))
        suite[BV].add(var, constant * l2, tol=1e-12, where=f"pair {j}")
        if l2 > 0:
            worst = max(worst, var / l2)
    return worst


def lifted_pair_checks(suite: Suite, n: int = 64, q: float = 18.3):
    alg = lifted_binary_search(n)
    for k in range(1, n):
        h = hybrid_profile(alg, Interval(k, 1, n), alg.T, q)
        check_hybrid(suite, h, where=f"lifted n={n} pair ({k - 1},{k})")
        suite["lifted-bs pair success"].add(1.0 - min(h.success_lo, h.success_hi), 0.0)


def run_suite(
    params: AdversaryParams,
    n: int = 512,
    count: int = 20,
    T: int = 4,
    workspace_bits: int = 1,
    seed: int = 0,
    bv_constant: float = DEFAULT_BV_CONSTANT,
    bv_pairs: int = 1000,
    lifted_n: int = 64,
) -> Suite:
    """The full inequality suite over ``count`` seeded random algorithms."""
    suite = Suite()
    records = 0
    for a in range(count):
        alg = random_algorithm(n, T, workspace_bits, seed + a)
        for s in range(1, T + 1):
            chain = subdivide_chain(alg, params, s)
            for depth, rec in enumerate(chain):
                check_record(suite, rec, params, where=f"alg {seed + a} s={s} depth={depth}")
            records += len(chain)
        final = chain[-1].child if chain else Interval(1, n, n)
        check_hybrid(suite, hybrid_profile(alg, final, T, params.q), where=f"alg {seed + a}")
    geometric_checks(suite, params.q)
    suite.extras["subdivides"] = records
    suite.extras["algorithms"] = count
    suite.extras["bv_max_ratio"] = bv_sampling(suite, pairs=bv_pairs, seed=seed, constant=bv_constant)
    if lifted_n:
        lifted_pair_checks(suite, lifted_n, params.q)
    return suite
