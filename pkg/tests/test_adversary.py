import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from ordsearch.adversary import (
    Interval,
    check_step_invariant,
    compute_v,
    construct_hard_input,
    derive_params,
    plan_schedule,
    potential,
    subdivide,
    trace_to_dict,
    weighted_sum,
)
from ordsearch.algorithms import random_algorithm, truncated_binary_search, zero_query
from ordsearch.errors import ConfigError, RegimeError
from ordsearch.query_model import identity_algorithm
from ordsearch.state_core import BasisLayout


def _v_by_search(q, t, u, digits=80):
    """Independent oracle: walk v upward until q'^v drops to the threshold."""
    with mp.workdps(digits):
        qm = mpf(q)
        qp = 1 / mp.sqrt(t) + 2 / (qm - 1)
        thr = (1 - qm * qp**u) * (1 - 1 / qm) / 10
        if thr <= 0:
            raise ValueError("parameters rejected")
        v = 1
        while qp**v > thr:
            v += 1
        return v, qp, qm * qp**u, thr


def test_default_triple_parameters(default_params):
    p = default_params
    assert p.q_prime == pytest.approx(0.4692, abs=5e-5)
    assert p.contraction == pytest.approx(0.887, abs=5e-4)
    assert p.contraction < 1
    assert p.coefficient == Fraction(1, 12)
    assert p.v == 6


def test_v_matches_extended_precision_search():
    v, qp, contraction, thr = _v_by_search("18.3", 8, 4)
    assert v == compute_v(18.3, 8, 4) == 6
    with mp.workdps(50):
        ratio = mp.log(thr) / mp.log(qp)
    assert 5.99 < float(ratio) < 6  # close to the ceiling boundary
    for q, t, u in [(10, 16, 2), (25, 16, 3), (40, 64, 2), (18.3, 16, 3)]:
        try:
            expected = _v_by_search(repr(float(q)), t, u)[0]
        except ValueError:
            continue
        assert compute_v(q, t, u) == expected


def test_v_weakly_decreases_with_t():
    vs = [compute_v(60, t, 6) for t in (8, 16, 32, 64)]
    assert all(a >= b for a, b in zip(vs, vs[1:]))


def test_rejections_name_the_inequality():
    with pytest.raises(ConfigError, match=r"q\*q'\^u < 1"):
        derive_params(3, 4, 1)
    with pytest.raises(ConfigError):
        derive_params(1.0, 8, 4)
    with pytest.raises(ConfigError):
        derive_params(18.3, 6, 4)


def test_weighted_sum_examples():
    assert weighted_sum([1], 7.5) == 1
    assert weighted_sum([0.1, 0.2], 2) == pytest.approx(0.4, abs=1e-15)
    assert weighted_sum([0, 0, 0], 3) == 0
    with pytest.raises(ValueError):
        weighted_sum([], 2)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=8), st.floats(1.01, 50))
def test_weighted_sum_matches_direct_formula(norms, q):
    s = len(norms)
    direct = sum(q ** (s - i) * x for i, x in enumerate(norms, start=1))
    assert weighted_sum(norms, q) == pytest.approx(direct, rel=1e-12, abs=1e-300)


def test_interval_geometry():
    iv = Interval(2, 8, 64)
    assert (iv.lo, iv.hi) == (9, 16)
    assert iv.oracle().k == 16
    child = iv.child(3, 4)
    assert (child.l, child.m) == (7, 2) and (child.lo, child.hi) == (13, 14)
    assert iv.contains(child)
    with pytest.raises(ValueError):
        Interval(9, 8, 64)


def test_subdivide_zero_mass_ties_to_first_block(default_params):
    alg = zero_query(64)
    rec = subdivide(alg, Interval(2, 8, 64), 1, default_params)
    assert np.array_equal(rec.S_values, np.zeros(8))
    assert rec.chosen_r == 1 and rec.S_before == 0 and rec.S_after == 0


def test_subdivide_hand_computed(default_params):
    # one query on |0>: all query mass sits on list index 1, block 1 of 8
    alg = identity_algorithm(BasisLayout(8), T=1)
    rec = subdivide(alg, Interval(1, 8, 8), 1, default_params)
    assert list(rec.S_values) == [1, 0, 0, 0, 0, 0, 0, 0]
    assert rec.chosen_r == 2
    assert (rec.child.l, rec.child.m) == (2, 1)
    assert rec.S_before == 1 and rec.S_after == 0


def test_subdivide_past_T_has_no_mass(default_params):
    alg = random_algorithm(64, 1, 0, 2)
    rec = subdivide(alg, Interval(1, 64, 64), 3, default_params)
    assert np.all(rec.psi_norms[1:] == 0)
    assert rec.S_before == pytest.approx(default_params.q**2 * rec.parent_norms[0])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 8))
def test_contraction_on_random_algorithms(seed, s, l):
    params = derive_params(18.3, 8, 4)
    alg = random_algorithm(64, 3, 0, seed)
    rec = subdivide(alg, Interval(l, 8, 64), s, params)
    assert rec.S_after <= params.q_prime * rec.S_before + 1e-9
    assert rec.S_values.min() <= rec.S_before / math.sqrt(8) + 1e-9
    assert rec.S_values.sum() <= math.sqrt(8) * rec.S_before + 1e-9
    assert np.allclose((rec.psi_norms**2).sum(axis=1), rec.parent_norms**2, atol=1e-12)


def test_potential_matches_record(default_params):
    alg = random_algorithm(64, 2, 0, 5)
    rec = subdivide(alg, Interval(1, 64, 64), 2, default_params)
    assert potential(alg, rec.parent, 2, default_params.q) == pytest.approx(rec.S_before, abs=1e-14)
    assert potential(alg, rec.child, 2, default_params.q) == pytest.approx(rec.S_after, abs=1e-14)


def test_schedule_layout(default_params):
    sched = plan_schedule(4096, default_params, 4)
    assert sched.iterations == ((1, 4),) and sched.final_steps == 0 and sched.final_s == 1
    assert not sched.truncated
    one = plan_schedule(8**6, default_params)
    assert one.iterations == ((1, 4),) and one.final_steps == 2 and one.total == 6 and one.final_s == 1
    two = plan_schedule(8**10, default_params)
    assert two.iterations == ((1, 4), (2, 4)) and two.final_steps == 2 and two.final_s == 2
    small = plan_schedule(512, default_params, 3)
    assert small.iterations == ((1, 3),) and small.truncated
    with pytest.raises(ConfigError):
        plan_schedule(1024, default_params)
    with pytest.raises(ConfigError):
        plan_schedule(512, default_params, 0)


@pytest.mark.parametrize("name", ["zero", "cut0", "cut1"])
def test_trace_invariants_at_4096(default_params, name):
    alg = {"zero": zero_query(4096), "cut0": truncated_binary_search(4096, 0, 0),
           "cut1": truncated_binary_search(4096, 1)}[name]
    trace = construct_hard_input(alg, default_params, 4096, v_override=4)
    rep = check_step_invariant(trace)
    assert rep.ok, rep.violations()
    assert rep.target_met and rep.psi_bound_holds
    assert trace.final_interval.m == 4096 // 8 ** len(trace.records)
    p = default_params
    assert trace.outer_iterations >= (12 - 4 * 3) / (p.u * 3)
    assert rep.start_checks[0][1] <= 1


def test_regime_error_for_long_algorithms(default_params):
    with pytest.raises(RegimeError, match="regime"):
        construct_hard_input(truncated_binary_search(4096, 2), default_params, 4096, 4)


def test_truncated_schedule_is_flagged(default_params):
    trace = construct_hard_input(zero_query(512), default_params, 512, 1)
    assert trace.truncated and trace.final_interval.m == 1
    rep = check_step_invariant(trace)
    assert not rep.target_guaranteed and rep.ok


def test_trace_serialization_fields(default_params):
    trace = construct_hard_input(zero_query(4096), default_params, 4096, 4)
    doc = trace_to_dict(trace)
    assert set(doc["records"][0]) == {"s", "parent", "child", "S_values", "chosen_r", "S_before", "S_after"}
    assert doc["params"]["v"] == 6 and doc["v_used"] == 4
