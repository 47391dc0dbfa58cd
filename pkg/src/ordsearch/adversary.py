"""Weighted-potential adversary for ordered search.

The adversary keeps an interval [(l-1)m+1, lm] and answers queries with the
threshold oracle k = lm. Each ``subdivide`` splits the interval into t
blocks and descends into the block with the smallest geometrically weighted
query mass

    S_r = sum_{i=1..s} q^(s-i) * ||psi_{i,r}||,

where psi_{i,r} is the part of the state before query i that queries block r.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf

from .errors import ConfigError, RegimeError
from .query_model import QueryAlgorithm, ThresholdInput, prefix_states
from .state_core import index_mass

TOL = 1e-9


@dataclass(frozen=True)
class AdversaryParams:
    q: float
    t: int
    u: int
    q_prime: float
    v: int

    @property
    def contraction(self) -> float:
        """q * q'^u; must be < 1."""
        return self.q * self.q_prime**self.u

    @property
    def threshold(self) -> float:
        """(1/10)(1 - q q'^u)(1 - 1/q), the target that q'^v must reach."""
        return 0.1 * (1 - self.contraction) * (1 - 1 / self.q)

    @property
    def coefficient(self) -> Fraction:
        """Leading coefficient 1/(u log2 t) of the query lower bound."""
        return Fraction(1, self.u * (self.t.bit_length() - 1))

    @property
    def start_bound(self) -> float:
        return 1 / (1 - self.contraction)

    @property
    def end_bound(self) -> float:
        return self.q_prime**self.u / (1 - self.contraction)

    @property
    def final_target(self) -> float:
        return 0.1 * (1 - 1 / self.q)


def _mp_q(q) -> mpf:
    # Decimal string route so that 18.3 means 183/10, not its binary neighbour.
    return mpf(repr(float(q)))


def _check_raw(q, t, u):
    if not q > 1:
        raise ConfigError(f"q must exceed 1, got {q}")
    if t < 2 or t & (t - 1):
        raise ConfigError(f"t must be a power of two >= 2, got {t}")
    if u < 1:
        raise ConfigError(f"u must be a positive integer, got {u}")


def compute_v(q: float, t: int, u: int) -> int:
    """Smallest integer v with q'^v <= (1/10)(1 - q q'^u)(1 - 1/q).

    Evaluated at 50 significant digits: for (18.3, 8, 4) the ratio of logs is
    5.99326..., close enough to 6 that double rounding deserves a check.
    """
    _check_raw(q, t, u)
    with mp.workdps(50):
        qm = _mp_q(q)
        qp = 1 / mp.sqrt(t) + 2 / (qm - 1)
        contraction = qm * qp**u
        if contraction >= 1:
            raise ConfigError(f"q*q'^u = {float(contraction):.6g} >= 1; v is undefined")
        threshold = (1 - contraction) * (1 - 1 / qm) / 10
        v = int(mp.ceil(mp.log(threshold) / mp.log(qp)))
        # ceiling characterization guards the log-ratio evaluation
        while qp**v > threshold:
            v += 1
        while v > 1 and qp ** (v - 1) <= threshold:
            v -= 1
        return v


def derive_params(q: float, t: int, u: int) -> AdversaryParams:
    _check_raw(q, t, u)
    q_prime = 1 / np.sqrt(t) + 2 / (q - 1)
    contraction = q * q_prime**u
    if not contraction < 1:
        raise ConfigError(
            f"rejected: q*q'^u < 1 fails (q'={q_prime:.6g}, q*q'^u={contraction:.6g})"
        )
    v = compute_v(q, t, u)
    if v < u:
        raise ConfigError(f"rejected: v >= u fails (v={v}, u={u})")
    return AdversaryParams(float(q), int(t), int(u), float(q_prime), v)


@dataclass(frozen=True)
class Interval:
    """The block [(l-1)m+1, lm] of [1, n]."""

    l: int
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n % self.m or not 1 <= self.l <= self.n // self.m:
            raise ValueError(f"invalid interval l={self.l}, m={self.m}, n={self.n}")

    @property
    def lo(self) -> int:
        return (self.l - 1) * self.m + 1

    @property
    def hi(self) -> int:
        return self.l * self.m

    def oracle(self) -> ThresholdInput:
        """Input x_1..x_{lm} = 0, the rest 1."""
        return ThresholdInput(self.hi, self.n)

    def child(self, r: int, t: int) -> Interval:
        """The r-th of t equal subintervals (1-based r)."""
        if self.m % t:
            raise ConfigError(f"block length {self.m} is not divisible by t={t}")
        if not 1 <= r <= t:
            raise ValueError(f"r={r} outside [1, {t}]")
        return Interval((self.l - 1) * t + r, self.m // t, self.n)

    def contains(self, other: Interval) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def weighted_sum(norms, q: float) -> float:
    """sum_{i=1..s} q^(s-i) norms[i-1] (Horner form)."""
    norms = list(norms)
    if not norms:
        raise ValueError("weighted_sum needs at least one term")
    acc = 0.0
    for x in norms:
        acc = acc * q + float(x)
    return acc


@dataclass(frozen=True)
class SubdivideRecord:
    parent: Interval
    child: Interval
    s: int
    S_values: np.ndarray
    chosen_r: int
    S_before: float
    S_after: float
    psi_norms: np.ndarray  # (s, t): ||psi_{i,r}|| for i = 1..s
    parent_norms: np.ndarray  # ||psi_i|| on the parent interval, parent oracle
    child_norms: np.ndarray  # ||psi'_i|| on the child interval, child oracle
    phi_gaps: np.ndarray  # ||phi_i - phi'_i||
    psi_gaps: np.ndarray  # ||psi_{i,r} - psi'_i||


def _masses(alg: QueryAlgorithm, x: ThresholdInput, s: int):
    """Per-index mass of the states before queries 1..s (zeros past T)."""
    states = prefix_states(alg, x, s)
    masses = np.zeros((s, alg.layout.n))
    for i, st in enumerate(states):
        masses[i] = index_mass(st)
    return states, masses


def subdivide(alg: QueryAlgorithm, interval: Interval, s: int, params: AdversaryParams) -> SubdivideRecord:
    """Split ``interval`` into t blocks and descend into the argmin of S_r.

    Prefix states past the algorithm's last query carry no query mass, so
    psi_i = 0 for i > T.
    """
    t, q = params.t, params.q
    if s < 1:
        raise ValueError(f"step s must be >= 1, got {s}")
    if interval.n != alg.layout.n:
        raise ValueError(f"interval over n={interval.n} but algorithm has n={alg.layout.n}")
    if interval.m % t:
        raise ConfigError(f"block length {interval.m} is not divisible by t={t}")
    lo, hi = interval.lo, interval.hi

    states, masses = _masses(alg, interval.oracle(), s)
    blocks = masses[:, lo - 1 : hi].reshape(s, t, -1).sum(axis=2)
    psi_norms = np.sqrt(blocks)
    parent_norms = np.sqrt(masses[:, lo - 1 : hi].sum(axis=1))
    S_values = np.array([weighted_sum(psi_norms[:, r], q) for r in range(t)])
    r = int(np.argmin(S_values)) + 1  # first minimum: ties go to the smallest r
    child = interval.child(r, t)

    child_states, child_masses = _masses(alg, child.oracle(), s)
    clo, chi = child.lo, child.hi
    child_norms = np.sqrt(child_masses[:, clo - 1 : chi].sum(axis=1))
    phi_gaps = np.zeros(s)
    psi_gaps = np.zeros(s)
    for i, (a, b) in enumerate(zip(states, child_states)):
        diff = a - b
        phi_gaps[i] = np.linalg.norm(diff.amplitudes)
        psi_gaps[i] = np.sqrt(index_mass(diff)[clo - 1 : chi].sum())

    return SubdivideRecord(
        parent=interval,
        child=child,
        s=s,
        S_values=S_values,
        chosen_r=r,
        S_before=weighted_sum(parent_norms, q),
        S_after=weighted_sum(child_norms, q),
        psi_norms=psi_norms,
        parent_norms=parent_norms,
        child_norms=child_norms,
        phi_gaps=phi_gaps,
        psi_gaps=psi_gaps,
    )


def interval_norms(alg: QueryAlgorithm, interval: Interval, s: int) -> np.ndarray:
    """||psi_i|| for i = 1..s: query mass on ``interval`` under its own oracle."""
    _, masses = _masses(alg, interval.oracle(), s)
    return np.sqrt(masses[:, interval.lo - 1 : interval.hi].sum(axis=1))


def potential(alg: QueryAlgorithm, interval: Interval, s: int, q: float) -> float:
    return weighted_sum(interval_norms(alg, interval, s), q)


@dataclass(frozen=True)
class Schedule:
    """Step values for each subdivide, grouped by outer iteration."""

    iterations: tuple  # (s, count) for each execution of step 2
    final_steps: int  # subdivides in step 3
    final_s: int
    v_used: int
    truncated: bool  # the interval reached a single element before the schedule ended

    @property
    def total(self) -> int:
        return sum(c for _, c in self.iterations) + self.final_steps


def plan_schedule(n: int, params: AdversaryParams, v_override: int | None = None) -> Schedule:
    """Lay out the outer loop without running anything.

    Step 3 continues at the step value of the last loop iteration; only this
    reading makes the final potential at most q'^v / (1 - q q'^u). A
    subdivide needs at least t elements, so at desk scale the schedule may
    bottom out early; that is flagged as ``truncated``.
    """
    v = params.v if v_override is None else int(v_override)
    if v < 1:
        raise ConfigError(f"stopping depth must be >= 1, got {v}")
    t, u = params.t, params.u
    tb = t.bit_length() - 1
    levels = n.bit_length() - 1
    if n < t or n & (n - 1) or levels % tb:
        raise ConfigError(f"n={n} is not a power of t={t}")
    left = levels // tb
    m, s, iterations, truncated = n, 1, [], False
    while m >= t**v:
        count = min(u, left)
        truncated |= count < u
        iterations.append((s, count))
        left -= count
        m //= t**count
        s += 1
    final_steps = max(0, v - u)
    if final_steps > left:
        final_steps, truncated = left, True
    final_s = iterations[-1][0] if iterations else 1
    return Schedule(tuple(iterations), final_steps, final_s, v, truncated)


@dataclass(frozen=True)
class IterationSummary:
    s: int
    S_start: float
    S_end: float
    first: int  # index of the first record
    last: int


@dataclass(frozen=True)
class AdversaryTrace:
    params: AdversaryParams
    n: int
    records: tuple
    iterations: tuple
    outer_iterations: int
    final_interval: Interval
    final_S: float
    final_s: int
    final_psi_norms: np.ndarray
    v_used: int
    truncated: bool = False
    algorithm: str = field(default="")


def construct_hard_input(
    alg: QueryAlgorithm,
    params: AdversaryParams,
    n: int | None = None,
    v_override: int | None = None,
) -> AdversaryTrace:
    """Run the outer loop and return the full trace.

    Raises :class:`RegimeError` when the algorithm makes more queries than the
    schedule's final step value: the potential says nothing about the later
    queries, which is outside the regime where the construction yields a
    contradiction.
    """
    n = alg.layout.n if n is None else n
    if n != alg.layout.n:
        raise ConfigError(f"n={n} does not match the algorithm's n={alg.layout.n}")
    schedule = plan_schedule(n, params, v_override)
    if alg.T > schedule.final_s:
        raise RegimeError(
            f"algorithm exceeds the regime of the lower-bound construction: "
            f"T={alg.T} queries but the schedule controls only {schedule.final_s} "
            f"(n={n}, t={params.t}, u={params.u}, v={schedule.v_used})"
        )
    interval = Interval(1, n, n)
    records, summaries = [], []
    for s, count in schedule.iterations:
        first = len(records)
        for _ in range(count):
            rec = subdivide(alg, interval, s, params)
            records.append(rec)
            interval = rec.child
        summaries.append(IterationSummary(s, records[first].S_before, records[-1].S_after, first, len(records) - 1))
    for _ in range(schedule.final_steps):
        rec = subdivide(alg, interval, schedule.final_s, params)
        records.append(rec)
        interval = rec.child
    final_norms = interval_norms(alg, interval, schedule.final_s)
    return AdversaryTrace(
        params=params,
        n=n,
        records=tuple(records),
        iterations=tuple(summaries),
        outer_iterations=len(schedule.iterations),
        final_interval=interval,
        final_S=weighted_sum(final_norms, params.q),
        final_s=schedule.final_s,
        final_psi_norms=final_norms,
        v_used=schedule.v_used,
        truncated=schedule.truncated,
        algorithm=alg.name,
    )


@dataclass
class InvariantReport:
    start_checks: list = field(default_factory=list)  # (s, S, bound, ok)
    end_checks: list = field(default_factory=list)
    advance_checks: list = field(default_factory=list)  # (S_new, 1 + q S_old, ok)
    contraction_checks: list = field(default_factory=list)  # (S_after, q' S_before, ok)
    final_S: float = 0.0
    final_bound: float = float("inf")
    final_target: float = 0.0
    target_guaranteed: bool = False
    psi_checks: list = field(default_factory=list)  # (i, ||psi_i||, bound, ok)

    @property
    def final_bound_ok(self) -> bool:
        return self.final_S <= self.final_bound + TOL

    @property
    def target_met(self) -> bool:
        return self.final_S <= self.final_target + TOL

    @property
    def psi_bound_holds(self) -> bool:
        return all(ok for *_, ok in self.psi_checks)

    def violations(self) -> list[str]:
        out = []
        for name, rows in (
            ("iteration-start bound", self.start_checks),
            ("iteration-end bound", self.end_checks),
            ("step advance", self.advance_checks),
            ("S' <= q' S", self.contraction_checks),
        ):
            out += [f"{name}: {row}" for row in rows if not row[-1]]
        if not self.final_bound_ok:
            out.append(f"final bound: S={self.final_S} > {self.final_bound}")
        if self.target_guaranteed and not self.target_met:
            out.append(f"final target: S={self.final_S} > {self.final_target}")
        if self.target_guaranteed and not self.psi_bound_holds:
            out.append("per-step bound on ||psi_i|| fails")
        return out

    @property
    def ok(self) -> bool:
        return not self.violations()


def check_step_invariant(trace: AdversaryTrace) -> InvariantReport:
    """Check every potential bound along a completed trace (tolerance 1e-9)."""
    p = trace.params
    rep = InvariantReport()
    for it in trace.iterations:
        done = it.last - it.first + 1
        end_bound = p.q_prime**done * p.start_bound  # equals the stated bound when done == u
        rep.start_checks.append((it.s, it.S_start, p.start_bound, it.S_start <= p.start_bound + TOL))
        rep.end_checks.append((it.s, it.S_end, end_bound, it.S_end <= end_bound + TOL))
    for prev, nxt in zip(trace.iterations, trace.iterations[1:]):
        bound = 1 + p.q * prev.S_end
        rep.advance_checks.append((nxt.S_start, bound, nxt.S_start <= bound + TOL))
    for rec in trace.records:
        bound = p.q_prime * rec.S_before
        rep.contraction_checks.append((rec.S_after, bound, rec.S_after <= bound + TOL))

    # subdivides performed at the final step value since the last reset of s
    step3 = len(trace.records) - (trace.iterations[-1].last + 1 if trace.iterations else 0)
    if trace.iterations:
        last = trace.iterations[-1]
        rep.final_bound = p.q_prime ** (last.last - last.first + 1 + step3) * p.start_bound
    else:
        rep.final_bound = p.q_prime**step3  # S = ||psi_1|| <= 1 before step 3
    rep.target_guaranteed = bool(trace.iterations) and trace.v_used >= p.v and not trace.truncated
    rep.final_S = trace.final_S
    rep.final_target = p.final_target
    s = trace.final_s
    for i, x in enumerate(trace.final_psi_norms, start=1):
        bound = (1 - 1 / p.q) / (10 * p.q ** (s - i))
        rep.psi_checks.append((i, float(x), bound, x <= bound + TOL))
    return rep


def params_to_dict(p: AdversaryParams) -> dict:
    return {"q": p.q, "t": p.t, "u": p.u, "q_prime": p.q_prime, "v": p.v}


def _interval_dict(iv: Interval) -> dict:
    return {"l": iv.l, "m": iv.m}


def record_to_dict(rec: SubdivideRecord) -> dict:
    return {
        "s": rec.s,
        "parent": _interval_dict(rec.parent),
        "child": _interval_dict(rec.child),
        "S_values": [float(x) for x in rec.S_values],
        "chosen_r": rec.chosen_r,
        "S_before": float(rec.S_before),
        "S_after": float(rec.S_after),
    }


def trace_to_dict(trace: AdversaryTrace) -> dict:
    return {
        "params": params_to_dict(trace.params),
        "n": trace.n,
        "algorithm": trace.algorithm,
        "v_used": trace.v_used,
        "records": [record_to_dict(r) for r in trace.records],
        "outer_iterations": trace.outer_iterations,
        "final_interval": _interval_dict(trace.final_interval),
        "final_S": float(trace.final_S),
        "final_s": trace.final_s,
        "truncated": trace.truncated,
    }
