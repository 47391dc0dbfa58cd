"""Hybrid-argument distances, the l2-to-variational bound, and verdicts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adversary import Interval
from .errors import ConfigError, InequalityViolation
from .query_model import (
    DEFAULT_SUCCESS_THRESHOLD,
    QueryAlgorithm,
    ThresholdInput,
    apply_oracle,
    prefix_states,
    run_full,
    success_probability,
)
from .state_core import (
    StateVector,
    index_mass,
    l2_distance,
    measure_index_distribution,
    norm,
    variational_distance,
)

TOL = 1e-9
DEFAULT_BV_CONSTANT = 4.0


def hybrid_states(alg: QueryAlgorithm, early: ThresholdInput, late: ThresholdInput) -> list[StateVector]:
    """Final states phi_0..phi_T; phi_i answers queries 1..i with ``early``, the rest with ``late``."""
    T = alg.T
    prefixes = prefix_states(alg, early, T)
    out = []
    for i in range(T):
        state = prefixes[i]  # before query i+1
        for j in range(i + 1, T + 1):
            state = alg.apply_unitary(j, apply_oracle(state, late))
        out.append(state)
    out.append(run_full(alg, early))
    return out


@dataclass(frozen=True)
class HybridReport:
    k_early: int
    k_late: int
    s: int
    q: float
    per_step_distance: np.ndarray
    per_step_bound: np.ndarray  # (1 - 1/q) / (5 q^(s-i))
    interval_norms: np.ndarray  # ||psi_i|| on the adversary interval
    position_norms: np.ndarray  # query mass on the single differing position
    total_distance: float
    triangle_sum: float
    success_lo: float
    success_hi: float
    variational: float

    @property
    def total_bound(self) -> float:
        return float(self.per_step_bound.sum())

    @property
    def triangle_ok(self) -> bool:
        return self.total_distance <= self.triangle_sum + TOL

    @property
    def perturbation_ok(self) -> bool:
        d = self.per_step_distance
        return bool(np.all(d <= 2 * self.position_norms + TOL) and np.all(d <= 2 * self.interval_norms + TOL))

    @property
    def psi_bound_holds(self) -> bool:
        return bool(np.all(self.interval_norms <= self.per_step_bound / 2 + TOL))

    @property
    def step_bounds_ok(self) -> bool:
        return bool(np.all(self.per_step_distance <= self.per_step_bound + TOL))

    @property
    def total_ok(self) -> bool:
        return self.total_distance <= 0.2 + TOL


def hybrid_profile(
    alg: QueryAlgorithm,
    interval: Interval,
    s: int,
    q: float,
) -> HybridReport:
    """Distances between consecutive hybrids for the pair (lm, lm - 1).

    ``s`` is the adversary's final step value; it only enters the bounds.
    """
    T = alg.T
    if T > s:
        raise ConfigError(f"algorithm has T={T} queries but the potential covers only s={s}")
    k = interval.hi
    early = ThresholdInput(k, alg.layout.n)
    late = ThresholdInput(k - 1, alg.layout.n)
    hybrids = hybrid_states(alg, early, late)
    dist = np.array([l2_distance(hybrids[i], hybrids[i - 1]) for i in range(1, T + 1)])
    steps = np.arange(1, T + 1)
    bound = (1 - 1 / q) / (5 * q ** (s - steps).astype(float))
    iv_norms = np.zeros(T)
    pos_norms = np.zeros(T)
    for i, st in enumerate(prefix_states(alg, early, T)):
        mass = index_mass(st)
        iv_norms[i] = np.sqrt(mass[interval.lo - 1 : interval.hi].sum())
        pos_norms[i] = np.sqrt(mass[k - 1])
    final_hi, final_lo = hybrids[-1], hybrids[0]
    return HybridReport(
        k_early=k,
        k_late=k - 1,
        s=s,
        q=q,
        per_step_distance=dist,
        per_step_bound=bound,
        interval_norms=iv_norms,
        position_norms=pos_norms,
        total_distance=l2_distance(final_hi, final_lo),
        triangle_sum=float(dist.sum()),
        success_lo=success_probability(alg, late, final_lo),
        success_hi=success_probability(alg, early, final_hi),
        variational=variational_distance(
            measure_index_distribution(final_lo), measure_index_distribution(final_hi)
        ),
    )


def hybrid_to_dict(h: HybridReport) -> dict:
    return {
        "k_early": h.k_early,
        "k_late": h.k_late,
        "s": h.s,
        "per_step_distance": [float(x) for x in h.per_step_distance],
        "per_step_bound": [float(x) for x in h.per_step_bound],
        "interval_norms": [float(x) for x in h.interval_norms],
        "total_distance": h.total_distance,
        "triangle_sum": h.triangle_sum,
        "total_bound": h.total_bound,
        "success_lo": h.success_lo,
        "success_hi": h.success_hi,
        "variational": h.variational,
    }


def bv_gap(psi: StateVector, phi: StateVector, constant: float = DEFAULT_BV_CONSTANT) -> tuple[float, float]:
    """(||psi - phi||, variational distance of index measurements).

    Raises :class:`InequalityViolation` if variational > constant * l2.
    """
    for s in (psi, phi):
        if abs(norm(s) - 1) > TOL:
            raise ValueError(f"bv_gap needs unit states, got norm {norm(s)!r}")
    l2 = l2_distance(psi, phi)
    var = variational_distance(measure_index_distribution(psi), measure_index_distribution(phi))
    if var > constant * l2 + 1e-12:
        raise InequalityViolation(f"variational {var} exceeds {constant} * l2 = {constant * l2}")
    return l2, var


def min_distinguishing_distance(threshold: float = DEFAULT_SUCCESS_THRESHOLD, bv_constant: float = DEFAULT_BV_CONSTANT) -> float:
    """Minimum final-state distance for an algorithm correct with probability ``threshold``.

    The variational distance on an adjacent pair is at least 2(2*threshold - 1);
    the l2-to-variational bound turns that into an l2 lower bound (1/4 by default).
    """
    return 2 * (2 * threshold - 1) / bv_constant


@dataclass(frozen=True)
class Verdict:
    distinguishable: bool
    reason: str
    l2: float
    success_lo: float
    success_hi: float
    variational: float
    min_distance: float
    threshold_used: float = DEFAULT_SUCCESS_THRESHOLD

    @property
    def consistent(self) -> bool:
        """False only if both answers succeed although the states are too close."""
        both = self.success_lo >= self.threshold_used and self.success_hi >= self.threshold_used
        return not (both and self.l2 < self.min_distance - TOL)


def verdict(
    alg: QueryAlgorithm,
    k_lo: ThresholdInput,
    k_hi: ThresholdInput,
    threshold: float = DEFAULT_SUCCESS_THRESHOLD,
    bv_constant: float = DEFAULT_BV_CONSTANT,
) -> Verdict:
    if k_lo.n != k_hi.n or k_lo.k != k_hi.k - 1:
        raise ConfigError(f"verdict needs adjacent inputs, got k={k_lo.k} and k={k_hi.k}")
    lo, hi = run_full(alg, k_lo), run_full(alg, k_hi)
    l2 = l2_distance(lo, hi)
    p_lo = success_probability(alg, k_lo, lo)
    p_hi = success_probability(alg, k_hi, hi)
    var = variational_distance(measure_index_distribution(lo), measure_index_distribution(hi))
    need = min_distinguishing_distance(threshold, bv_constant)
    if l2 < need:
        reason = f"final states within {l2:.6g} < {need:.6g}: no correct algorithm can be this close"
        if l2 <= 0.2:
            reason += " (inside the 1/5 hybrid bound)"
        dist = False
    elif min(p_lo, p_hi) < threshold:
        reason = f"success probability {min(p_lo, p_hi):.6g} below {threshold:.6g}"
        dist = False
    else:
        reason = f"final states {l2:.6g} apart and both succeed with probability >= {threshold:.6g}"
        dist = True
    return Verdict(dist, reason, l2, p_lo, p_hi, var, need, threshold)


def verdict_to_dict(v: Verdict) -> dict:
    return {
        "distinguishable": v.distinguishable,
        "reason": v.reason,
        "l2": v.l2,
        "success_lo": v.success_lo,
        "success_hi": v.success_hi,
        "variational": v.variational,
        "min_distance": v.min_distance,
        "consistent": v.consistent,
    }
