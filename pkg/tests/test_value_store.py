import math
import random
import statistics
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from voi_arbiter.value_store import (
    QStore, SoftmaxParams, argmax, load_qtable_csv, population_variance, softmax_probs,
)

q_values = st.floats(min_value=-20, max_value=20, allow_nan=False)
rows = st.lists(q_values, min_size=2, max_size=8)


def exact_pvariance(xs):
    return float(statistics.pvariance([Fraction(x) for x in xs])) if len(xs) >= 2 else 0.0


def exact_softmax(xs, rho):
    mpmath.mp.dps = 50
    w = [mpmath.exp(mpmath.mpf(rho) * mpmath.mpf(x)) for x in xs]
    total = mpmath.fsum(w)
    return [float(x / total) for x in w]


def test_read_after_write():
    q = QStore(3, 2)
    q.write_q(1, 1, 1.0)
    assert q.read_q(1, 1) == 1.0


def test_history_is_a_ring_buffer():
    q = QStore(1, 1, window=4)
    for v in range(5):
        q.write_q(0, 0, float(v))
    assert list(q.history[0][0]) == [1.0, 2.0, 3.0, 4.0]


def test_history_preserves_order():
    q = QStore(1, 1)
    for v in (0.0, 1.0, 2.0):
        q.write_q(0, 0, v)
    assert list(q.history[0][0]) == [0.0, 1.0, 2.0]


def test_window_must_be_positive():
    with pytest.raises(ValueError):
        QStore(1, 1, window=0)


@pytest.mark.parametrize(
    "history, expected",
    [([1.0, 1.0, 1.0], 0.0), ([0.0, 1.0, 2.0], 2 / 3), ([], 0.0), ([5.0], 0.0)],
)
def test_pair_uncertainty(history, expected):
    q = QStore(1, 1)
    for v in history:
        q.write_q(0, 0, v)
    assert q.pair_uncertainty(0, 0) == pytest.approx(expected, abs=1e-15)
    assert q.pair_uncertainty(0, 0) == pytest.approx(exact_pvariance(history), abs=1e-15)


@pytest.mark.parametrize(
    "row, expected",
    [([0.0] * 6, 0.0), ([0.0, 3.0, 0.0, 0.0, 0.0, 0.0], 1.25), ([7.5] * 6, 0.0)],
)
def test_state_spread(row, expected):
    q = QStore.from_array([row])
    assert q.state_spread(0) == pytest.approx(expected, abs=1e-15)


@given(rows)
def test_variance_matches_exact_oracle(xs):
    assert abs(population_variance(xs) - exact_pvariance(xs)) <= 1e-12


@given(rows, st.floats(min_value=-100, max_value=100, allow_nan=False))
def test_state_spread_is_shift_invariant(xs, c):
    base = QStore.from_array([xs]).state_spread(0)
    shifted = QStore.from_array([[x + c for x in xs]]).state_spread(0)
    assert abs(base - shifted) <= 1e-9


def test_history_variance_uses_only_window():
    q = QStore(1, 1, window=3)
    for v in (100.0, 0.0, 1.0, 2.0):
        q.write_q(0, 0, v)
    assert q.pair_uncertainty(0, 0) == pytest.approx(2 / 3)


def test_softmax_examples():
    assert softmax_probs([0.0, 0.0], 0.9) == [0.5, 0.5]
    p = softmax_probs([1.0, 0.0], 1.0)
    assert p[0] == pytest.approx(math.e / (math.e + 1), abs=1e-15)
    assert p == pytest.approx([0.7311, 0.2689], abs=1e-4)
    big = softmax_probs([1000.0, 0.0], 0.9)
    assert all(math.isfinite(x) for x in big)
    assert big[0] == pytest.approx(1.0)


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=10),
       st.floats(min_value=1e-3, max_value=10))
def test_softmax_sums_to_one(xs, rho):
    assert abs(sum(softmax_probs(xs, rho)) - 1.0) <= 1e-12


@given(rows, st.floats(min_value=0.05, max_value=5))
def test_softmax_matches_high_precision_oracle(xs, rho):
    assert np.allclose(softmax_probs(xs, rho), exact_softmax(xs, rho), rtol=0, atol=1e-12)


def test_softmax_params_reject_nonpositive():
    with pytest.raises(ValueError):
        SoftmaxParams(0.0)


def test_softmax_select_is_seeded():
    q = QStore.from_array([[0.3, -1.0, 2.0, 0.0]])
    params = SoftmaxParams(0.9)
    a = [q.softmax_select(0, params, random.Random(5)) for _ in range(3)]
    assert len(set(a)) == 1


def test_softmax_select_frequencies():
    q = QStore.from_array([[1.0, 0.0, -0.5, 2.0]])
    params = SoftmaxParams(0.9)
    rng = random.Random(11)
    n = 100_000
    counts = np.bincount([q.softmax_select(0, params, rng) for _ in range(n)], minlength=4)
    p = np.array(exact_softmax([1.0, 0.0, -0.5, 2.0], 0.9))
    se = np.sqrt(p * (1 - p) / n)
    assert np.all(np.abs(counts / n - p) <= 3 * se)


def test_argmax_breaks_ties_low():
    assert argmax([0.0, 0.0, 0.0]) == 0
    assert argmax([1.0, 3.0, 3.0]) == 1


def test_qtable_csv_round_trip(tmp_path):
    q = QStore.from_array(np.arange(12, dtype=float).reshape(4, 3) / 7)
    q.to_csv(tmp_path / "q.csv")
    loaded = load_qtable_csv(tmp_path / "q.csv", 4, 3)
    assert np.array_equal(loaded, q.as_array())


def test_qtable_csv_shape_error(tmp_path):
    QStore(3, 2).to_csv(tmp_path / "q.csv")
    with pytest.raises(ValueError, match="expected a 4x2 table"):
        load_qtable_csv(tmp_path / "q.csv", 4, 2)
