import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from ringflow.errors import (InvalidStateError, InvalidValueError, ParseError,
                             ZeroVectorError)
from ringflow.state import (CoefficientVector, DimensionalParams, basis_state,
                            format_state, load_state, mean_energy, normalize,
                            parse_state, save_state, to_dimensional_current,
                            to_dimensional_time, to_dimensionless_time,
                            window_to_alpha)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vectors = arrays(np.float64, st.integers(2, 40), elements=finite).filter(
    lambda v: np.linalg.norm(v) > 1e-6)


def test_normalize_examples():
    s = normalize([3.0, 4.0])
    np.testing.assert_allclose(s.coeffs, [0.6, 0.8], rtol=0, atol=1e-15)
    s = normalize([-1.0, 1.0])
    np.testing.assert_allclose(s.coeffs, [1 / math.sqrt(2), -1 / math.sqrt(2)], atol=1e-15)
    assert s.n_max == 1


def test_normalize_rejects_zero_and_nan():
    with pytest.raises(ZeroVectorError):
        normalize([0.0, 0.0, 0.0])
    with pytest.raises(InvalidValueError):
        normalize([1.0, float("nan")])
    with pytest.raises(InvalidValueError):
        normalize([1.0])


@given(vectors)
def test_normalize_unit_norm_and_sign(v):
    s = normalize(v)
    assert abs(math.fsum(s.coeffs**2) - 1.0) <= 1e-12
    assert s.coeffs[0] >= 0


@given(vectors)
def test_normalize_idempotent(v):
    once = normalize(v)
    twice = normalize(once.coeffs)
    np.testing.assert_allclose(twice.coeffs, once.coeffs, rtol=0, atol=1e-15)


@given(vectors, st.floats(0.1, 10))
def test_normalize_scale_invariant(v, scale):
    np.testing.assert_allclose(normalize(scale * v).coeffs, normalize(v).coeffs, atol=1e-13)


def test_unnormalized_construction_rejected():
    with pytest.raises(InvalidStateError):
        CoefficientVector(np.array([1.0, 1.0]))
    with pytest.raises(InvalidValueError):
        CoefficientVector(np.array([1.0, 0.0]), alpha=-1.0)


def test_coefficients_are_read_only():
    s = basis_state(1, 3)
    with pytest.raises(ValueError):
        s.coeffs[0] = 2.0


def test_mean_energy_basis_states():
    p = DimensionalParams()
    assert mean_energy(basis_state(0, 4), p) == 0.0
    assert mean_energy(basis_state(1, 4), p) == pytest.approx(p.energy_unit)
    assert mean_energy(basis_state(3, 4), p) == pytest.approx(9 * p.energy_unit)


@given(vectors)
def test_mean_energy_sign_invariant(v):
    a = CoefficientVector(v / np.linalg.norm(v))
    b = CoefficientVector(-a.coeffs)
    assert mean_energy(a) == mean_energy(b)


def test_mean_energy_scales_with_units():
    s = normalize([1.0, 2.0, 3.0])
    base = mean_energy(s)
    heavy = mean_energy(s, DimensionalParams(mass=2.0, radius=3.0, hbar=5.0))
    assert heavy == pytest.approx(base * 25.0 / (2.0 * 9.0))


@given(st.floats(1e-6, 1e6), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
def test_time_round_trip(T, mass, radius, hbar):
    p = DimensionalParams(mass, radius, hbar)
    assert to_dimensional_time(to_dimensionless_time(T, p), p) == pytest.approx(T, rel=1e-14)


def test_unit_conversions():
    p = DimensionalParams(mass=2.0, radius=1.5, hbar=3.0)
    # t = hbar T / (2 M R^2)
    assert to_dimensionless_time(9.0, p) == pytest.approx(3.0 * 9.0 / (2 * 2.0 * 2.25))
    assert window_to_alpha(9.0, p) == pytest.approx(3.0 * 9.0 / (4 * 2.0 * 2.25))
    assert to_dimensional_current(1.0, p) == pytest.approx(3.0 / (2 * 2.0 * 2.25))
    with pytest.raises(InvalidValueError):
        DimensionalParams(mass=0.0)


@given(vectors, st.floats(0.01, 10))
def test_save_load_round_trip_is_bitwise(tmp_path_factory, v, alpha):
    s = normalize(v, alpha)
    path = tmp_path_factory.mktemp("st") / "s.txt"
    save_state(path, s)
    back = load_state(path)
    assert back.alpha == s.alpha
    assert back.coeffs.tobytes() == s.coeffs.tobytes()
    assert back.digest() == s.digest()


def test_parse_length_mismatch_reports_header_line():
    text = format_state(normalize([1.0, 1.0, 1.0])).replace("N=2", "N=3")
    with pytest.raises(ParseError) as exc:
        parse_state(text, path="x.txt")
    assert exc.value.line == 1
    assert "x.txt" in str(exc.value)


def test_parse_bad_number_reports_line():
    text = "N=1 alpha=1.0\n1.0\nabc\n"
    with pytest.raises(ParseError) as exc:
        parse_state(text)
    assert exc.value.line == 3


def test_parse_bad_header():
    with pytest.raises(ParseError):
        parse_state("hello\n1\n0\n")
    with pytest.raises(ParseError):
        parse_state("")


def test_load_rejects_unnormalized():
    with pytest.raises(InvalidStateError):
        parse_state("N=1 alpha=1.0\n1.0\n0.5\n")


def test_load_tolerates_small_drift():
    s = parse_state("N=1 alpha=1.0\n1.0\n1e-5\n")
    assert s.n_max == 1
