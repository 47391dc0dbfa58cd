import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordsearch.state_core import (
    BasisLayout,
    StateVector,
    basis_state,
    block_norms,
    l2_distance,
    measure_index_distribution,
    norm,
    project_query_range,
    random_state,
    range_norm,
    variational_distance,
    zero_state,
)


def test_layout_dimensions():
    L = BasisLayout(16, 3)
    assert L.index_bits == 4
    assert L.dimension == 16 * 2 * 8
    for idx in range(L.dimension):
        assert L.encode(*L.decode(idx)) == idx
    assert L.decode(0) == (1, 0, 0)


@pytest.mark.parametrize("n", [0, 1, 3, 12])
def test_layout_rejects_non_powers_of_two(n):
    with pytest.raises(ValueError):
        BasisLayout(n)


def test_zero_state():
    s = zero_state(BasisLayout(4, 0))
    expected = np.zeros(8)
    expected[0] = 1
    assert np.array_equal(s.amplitudes, expected)
    assert norm(s) == 1
    p = measure_index_distribution(s)
    assert p[0] == 1 and p[1:].sum() == 0


def test_states_are_immutable():
    s = zero_state(BasisLayout(4))
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2
    with pytest.raises(AttributeError):
        s.layout = BasisLayout(8)


def test_state_rejects_bad_amplitudes():
    L = BasisLayout(4)
    with pytest.raises(ValueError):
        StateVector(L, np.zeros(3))
    bad = np.zeros(L.dimension, dtype=complex)
    bad[1] = np.nan
    with pytest.raises(ValueError):
        StateVector(L, bad)


def test_norm_examples():
    L = BasisLayout(4)
    assert norm(StateVector(L, np.zeros(L.dimension))) == 0
    assert norm(basis_state(L, 3, 1)) == 1
    amps = np.zeros(L.dimension, dtype=complex)
    amps[[0, 5]] = 1 / np.sqrt(2)
    assert norm(StateVector(L, amps)) == pytest.approx(1, abs=1e-15)


def test_l2_distance_examples():
    L = BasisLayout(4)
    a, b = basis_state(L, 1), basis_state(L, 2)
    assert l2_distance(a, a) == 0
    assert l2_distance(a, b) == pytest.approx(np.sqrt(2))
    neg = StateVector(L, -a.amplitudes)
    assert l2_distance(a, neg) == pytest.approx(2)
    with pytest.raises(ValueError):
        l2_distance(a, zero_state(BasisLayout(8)))


def _uniform_index(n):
    L = BasisLayout(n)
    amps = np.zeros(L.dimension, dtype=complex)
    for i in range(1, n + 1):
        amps[L.encode(i)] = 1 / np.sqrt(n)
    return StateVector(L, amps)


def test_projection_examples(rng):
    s = random_state(BasisLayout(8, 1), rng)
    assert np.array_equal(project_query_range(s, 1, 8).amplitudes, s.amplitudes)
    assert norm(project_query_range(_uniform_index(4), 1, 2)) == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(ValueError):
        project_query_range(s, 0, 3)
    with pytest.raises(ValueError):
        project_query_range(s, 5, 4)


def test_block_norms_match_projections(rng):
    s = random_state(BasisLayout(16, 2), rng)
    parts = block_norms(s, 5, 12, 4)
    for r in range(4):
        lo = 5 + 2 * r
        assert parts[r] == pytest.approx(norm(project_query_range(s, lo, lo + 1)), abs=1e-14)
    assert range_norm(s, 5, 12) == pytest.approx(norm(project_query_range(s, 5, 12)), abs=1e-14)
    with pytest.raises(ValueError):
        block_norms(s, 1, 6, 4)


def test_measurement_examples():
    L = BasisLayout(4, 2)
    p = measure_index_distribution(basis_state(L, 3))
    assert np.array_equal(p, [0, 0, 1, 0])
    uniform = StateVector(L, np.full(L.dimension, 1 / np.sqrt(L.dimension)))
    assert np.allclose(measure_index_distribution(uniform), 0.25, atol=1e-15)


def test_variational_distance_examples():
    assert variational_distance([0.5, 0.5], [0.5, 0.5]) == 0
    assert variational_distance([1, 0, 0], [0, 0, 1]) == 2
    assert variational_distance([0.75, 0.25, 0, 0], [0.25, 0.75, 0, 0]) == pytest.approx(1)
    with pytest.raises(ValueError):
        variational_distance([1, 0], [1, 0, 0])


@st.composite
def states(draw, n=16, w=1):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_state(BasisLayout(n, w), np.random.default_rng(seed))


@st.composite
def ranges(draw, n=16):
    lo = draw(st.integers(1, n))
    hi = draw(st.integers(lo, n))
    return lo, hi


@settings(max_examples=60, deadline=None)
@given(states(), ranges())
def test_projection_idempotent(s, r):
    once = project_query_range(s, *r)
    assert np.array_equal(project_query_range(once, *r).amplitudes, once.amplitudes)


@settings(max_examples=60, deadline=None)
@given(states(), st.lists(st.integers(1, 15), unique=True, max_size=6))
def test_pythagorean_decomposition(s, cuts):
    edges = [0] + sorted(cuts) + [16]
    total = norm(project_query_range(s, 1, 16)) ** 2
    parts = sum(norm(project_query_range(s, a + 1, b)) ** 2 for a, b in zip(edges, edges[1:]))
    assert abs(parts - total) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(states(), states(), ranges())
def test_projection_contracts_distances(a, b, r):
    assert norm(project_query_range(a - b, *r)) <= l2_distance(a, b) + 1e-12


@settings(max_examples=60, deadline=None)
@given(states(), states(), states())
def test_variational_is_a_metric(a, b, c):
    pa, pb, pc = (measure_index_distribution(x) for x in (a, b, c))
    assert variational_distance(pa, pb) == pytest.approx(variational_distance(pb, pa))
    assert 0 <= variational_distance(pa, pb) <= 2 + 1e-12
    assert variational_distance(pa, pc) <= variational_distance(pa, pb) + variational_distance(pb, pc) + 1e-12
