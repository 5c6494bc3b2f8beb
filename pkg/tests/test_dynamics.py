import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringflow.dynamics import (TimeSeries, current_at, current_double_sum,
                               current_rank2, reduced_phase, sample_current,
                               series_to_csv)
from ringflow.errors import InvalidGridError
from ringflow.spectral import instantaneous_bounds
from ringflow.state import basis_state, normalize, random_state


@pytest.mark.parametrize("m", [0, 1, 2, 7, 30])
def test_basis_state_current_is_constant(m):
    s = basis_state(m, 30)
    t = np.array([0.0, 0.3, 1.7, 100.0])
    np.testing.assert_allclose(current_at(s, t), m / math.pi, atol=1e-15)


def test_two_level_superposition():
    s = normalize([1.0, 1.0])
    # j(t) = (1 + cos t) / (2 pi)
    assert current_at(s, 0.0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert current_at(s, math.pi) == pytest.approx(0.0, abs=1e-15)
    t = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(current_at(s, t), (1 + np.cos(t)) / (2 * math.pi), atol=1e-15)


def test_three_evaluation_routes_agree(rng):
    for _ in range(100):
        n = int(rng.integers(1, 301))
        s = random_state(n, rng)
        ts = rng.uniform(-10, 10, size=100)
        fast = current_at(s, ts)
        scale = n / math.pi
        # the double sum takes cos of unreduced phases up to N^2 |t|
        tol = scale * (1e-12 + 4e-16 * n * n * 10)
        for t, f in zip(ts[:10], fast[:10]):
            assert current_double_sum(s, t) == pytest.approx(f, abs=tol)
            assert current_rank2(s, t) == pytest.approx(f, abs=1e-12 * scale)
        if n <= 60:
            slow = np.array([current_double_sum(s, t) for t in ts])
            np.testing.assert_allclose(fast, slow, atol=tol)


@given(st.integers(1, 40), st.floats(-50, 50), st.integers(0, 2**32 - 1))
def test_periodicity_and_time_reversal(n, t, seed):
    s = random_state(n, np.random.default_rng(seed))
    scale = max(n, 1) ** 2
    assert current_at(s, t + 2 * math.pi) == pytest.approx(current_at(s, t), abs=1e-12 * scale)
    assert current_at(s, -t) == pytest.approx(current_at(s, t), abs=1e-12 * scale)


@given(st.integers(1, 11585), st.floats(-100, 100))
def test_reduced_phase_against_multiprecision(m, t):
    m2 = m * m  # exact splitting needs m^2 < 2^27
    mpmath.mp.dps = 60
    exact = mpmath.mpf(m2) * mpmath.mpf(t)
    exact = exact - 2 * mpmath.pi * mpmath.nint(exact / (2 * mpmath.pi))
    got = float(reduced_phase(np.array([m2]), t)[0])
    # got may land on the other side of +-pi; compare on the circle
    diff = float((mpmath.mpf(got) - exact + mpmath.pi) % (2 * mpmath.pi) - mpmath.pi)
    assert abs(diff) <= 2e-15 + 4 * 2.0**-78 * m2 * abs(t)


@pytest.mark.parametrize("n", [1, 10, 100])
def test_pointwise_sandwich(n, rng):
    lo, hi = instantaneous_bounds(n)
    for _ in range(200):
        j = current_at(random_state(n, rng), rng.uniform(-10, 10, size=50))
        assert np.all(j >= lo - 1e-9) and np.all(j <= hi + 1e-9)


def test_sampling_grid_and_values(rng):
    s = random_state(80, rng)
    series = sample_current(s, -0.5, 1.25, 1001)
    assert series.count == 1001
    assert series.times[0] == -0.5 and series.times[-1] == 1.25
    direct = current_at(s, series.times)
    np.testing.assert_allclose(series.samples, direct, rtol=0, atol=1e-12 * 80)
    assert series.state_digest == s.digest()


def test_sampling_zero_current():
    series = sample_current(basis_state(0, 5), 0.0, 1.0, 100)
    assert np.all(series.samples == 0.0)


def test_sampling_independent_of_threads(rng):
    s = random_state(500, rng)
    one = sample_current(s, 0.0, 1.1, 20_000, threads=1)
    four = sample_current(s, 0.0, 1.1, 20_000, threads=4)
    assert one.samples.tobytes() == four.samples.tobytes()


def test_invalid_grids():
    s = basis_state(1, 2)
    with pytest.raises(InvalidGridError):
        sample_current(s, 0.0, 1.0, 1)
    with pytest.raises(InvalidGridError):
        sample_current(s, 1.0, 1.0, 10)
    with pytest.raises(InvalidGridError):
        TimeSeries(np.array([1.0]), 0.0, 1.0)


def test_optimal_state_shows_backflow(optimum_9999):
    s = optimum_9999.state
    lo, hi = instantaneous_bounds(s.n_max)
    series = sample_current(s, -s.alpha, s.alpha, 4001)
    assert series.samples.min() < 0
    assert lo - 1e-9 <= series.samples.min() and series.samples.max() <= hi + 1e-9
    # most of the window is spent with negative flow
    assert np.mean(series.samples < 0) > 0.5


def test_csv_layout():
    text = series_to_csv(sample_current(normalize([1.0, 1.0]), 0.0, 1.0, 3))
    lines = text.strip().split("\n")
    assert lines[0] == "t,j"
    assert len(lines) == 4
    assert float(lines[1].split(",")[1]) == pytest.approx(1 / math.pi)
