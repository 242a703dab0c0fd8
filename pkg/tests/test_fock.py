import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homrates.errors import StateError
from homrates.fock import Occupation4, SparseState, expectation, make_state

occupations = st.tuples(*[st.integers(0, 6)] * 4)


@st.composite
def random_states(draw, max_terms=12):
    keys = draw(st.lists(occupations, min_size=1, max_size=max_terms, unique=True))
    raw = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=len(keys), max_size=len(keys)))
    scale = draw(st.floats(0.1, 1.0))
    norm = math.sqrt(sum(a * a for a in raw)) or 1.0
    return make_state([(k, scale * a / norm) for k, a in zip(keys, raw)], truncation_order=6)


def test_vacuum_state():
    vac = make_state([((0, 0, 0, 0), 1.0)], 0)
    assert len(vac) == 1
    assert vac.norm_deficit == 0.0
    assert vac.amplitude((0, 0, 0, 0)) == 1.0
    assert expectation(vac, lambda o: o.total) == 0.0


def test_two_term_state_expectation():
    s = make_state([((1, 0, 1, 0), 0.6), ((2, 0, 0, 0), 0.8)], 1)
    assert expectation(s, lambda o: o.n_a * o.n_b) == pytest.approx(0.36)
    assert expectation(s, lambda o: o.n_a) == pytest.approx(0.36 + 2 * 0.64)


def test_zero_amplitudes_dropped():
    s = make_state([((1, 0, 0, 0), 0.0), ((0, 1, 0, 0), 1.0)], 0)
    assert len(s) == 1
    assert s.amplitude((1, 0, 0, 0)) == 0.0


def test_canonical_order():
    s = make_state([((0, 0, 0, 2), 0.5), ((2, 0, 0, 0), 0.5), ((0, 1, 1, 0), 0.5)], 1)
    rows = [tuple(r) for r in s.occupations.tolist()]
    assert rows == sorted(rows)


@pytest.mark.parametrize(
    "entries, message",
    [
        ([((1, 0, 0, 0), 0.5), ((1, 0, 0, 0), 0.5)], "duplicate"),
        ([((-1, 0, 0, 0), 0.5)], "non-negative"),
        ([((1, 0, 0, 0), 0.9), ((0, 1, 0, 0), 0.9)], "exceeds"),
        ([((1, 0, 0), 0.5)], "four modes"),
    ],
)
def test_invalid_states_rejected(entries, message):
    with pytest.raises(StateError, match=message):
        make_state(entries, 1)


def test_negative_truncation_rejected():
    with pytest.raises(StateError):
        make_state([((0, 0, 0, 0), 1.0)], -1)


def test_state_is_read_only():
    s = make_state([((1, 0, 1, 0), 1.0)], 1)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0.5
    with pytest.raises(ValueError):
        s.occupations[0, 0] = 3


def test_empty_state():
    s = make_state([], 0)
    assert len(s) == 0
    assert s.norm_deficit == 1.0
    assert expectation(s, lambda o: 1.0) == 0.0


def test_complex_amplitudes():
    s = make_state([((1, 0, 1, 0), 0.6j), ((0, 0, 2, 0), -0.8)], 1)
    assert s.is_complex
    assert expectation(s, lambda o: 1.0) == pytest.approx(1.0)


def test_occupation_properties():
    o = Occupation4(1, 2, 3, 4)
    assert (o.n_a, o.n_b, o.total) == (3, 7, 10)


def test_iteration_matches_dict():
    s = make_state([((1, 0, 1, 0), 0.6), ((0, 0, 2, 0), 0.8)], 1)
    d = s.as_dict()
    assert d[Occupation4(1, 0, 1, 0)] == pytest.approx(0.6)
    assert list(d) == [o for o, _ in s]


@settings(max_examples=60, deadline=None)
@given(random_states(), st.floats(-3, 3), st.floats(-3, 3))
def test_expectation_is_linear(state, a, b):
    f = lambda o: o.n_a * o.n_b  # noqa: E731
    g = lambda o: o.total**2  # noqa: E731
    combined = expectation(state, lambda o: a * f(o) + b * g(o))
    split = a * expectation(state, f) + b * expectation(state, g)
    assert combined == pytest.approx(split, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(random_states())
def test_constant_expectation_is_weight(state):
    assert expectation(state, lambda o: 1.0) == pytest.approx(1.0 - state.norm_deficit, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(random_states(), st.randoms(use_true_random=False))
def test_permutation_invariance(state, rnd):
    entries = list(state)
    rnd.shuffle(entries)
    shuffled = make_state(entries, state.truncation_order)
    assert np.array_equal(shuffled.occupations, state.occupations)
    assert np.array_equal(shuffled.amplitudes, state.amplitudes)
    obs = lambda o: o.n_a * o.n_b + o.k  # noqa: E731
    assert expectation(shuffled, obs) == expectation(state, obs)


def test_direct_construction_from_arrays():
    occ = np.array([[0, 0, 2, 0], [2, 0, 0, 0]])
    s = SparseState(occ, np.array([0.5, -0.5]), 1)
    assert s.amplitude((2, 0, 0, 0)) == -0.5
    assert s.norm_deficit == pytest.approx(0.5)
