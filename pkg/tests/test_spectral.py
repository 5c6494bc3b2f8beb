import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringflow.errors import DegenerateOperatorError
from ringflow.linalg import jacobi_eigh
from ringflow.spectral import (asymptotic_bounds, brute_force_spectrum,
                               closed_form_spectrum, current_operator_matrix,
                               expectation, instantaneous_bounds,
                               verify_rank2_decomposition)
from ringflow.state import random_state


def test_operator_matrix_small():
    j = current_operator_matrix(1)
    np.testing.assert_allclose(j, np.array([[0.0, 1.0], [1.0, 2.0]]) / (2 * math.pi))
    with pytest.raises(DegenerateOperatorError):
        current_operator_matrix(0)


def test_n1_against_quadratic_formula():
    # eigenvalues of [[0,1],[1,2]]/2pi are (1 +- sqrt 2)/2pi
    lo, hi = instantaneous_bounds(1)
    assert lo == pytest.approx((1 - math.sqrt(2)) / (2 * math.pi), abs=1e-15)
    assert hi == pytest.approx((1 + math.sqrt(2)) / (2 * math.pi), abs=1e-15)
    sp = closed_form_spectrum(1)
    assert sp.a_plus == pytest.approx(1 / math.sqrt(2))
    assert sp.a_minus == -sp.a_plus


@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_jacobi_matches_lapack(size, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((size, size))
    a = a + a.T
    w, v = jacobi_eigh(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-12)
    np.testing.assert_allclose(v.T @ v, np.eye(size), atol=1e-12)
    np.testing.assert_allclose(a @ v, v * w, atol=1e-11)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20, 50])
def test_closed_form_matches_brute_force(n):
    sp = closed_form_spectrum(n)
    w = brute_force_spectrum(n)
    assert w[0] == pytest.approx(sp.lambda_minus, abs=1e-11)
    assert w[-1] == pytest.approx(sp.lambda_plus, abs=1e-11)
    assert np.all(np.abs(w[1:-1]) < 1e-11)


@pytest.mark.parametrize("n,tol", [(1, 1e-14), (50, 1e-12), (200, 1e-12), (9999, 1e-9)])
def test_rank2_reconstruction(n, tol):
    assert verify_rank2_decomposition(n) <= tol


@pytest.mark.parametrize("n", [1, 5, 50, 200])
def test_eigenvectors_orthonormal_and_signed(n):
    sp = closed_form_spectrum(n)
    p, m = sp.chi_plus.coeffs, sp.chi_minus.coeffs
    assert abs(p @ p - 1) < 1e-13 and abs(m @ m - 1) < 1e-13
    assert abs(p @ m) < 1e-12
    assert p[-1] > 0 and m[-1] > 0
    assert expectation(sp.chi_plus) == pytest.approx(sp.lambda_plus, rel=1e-12)
    assert expectation(sp.chi_minus) == pytest.approx(sp.lambda_minus, rel=1e-10)


@pytest.mark.parametrize("n", [1, 5, 50])
def test_sandwich_for_random_states(n, rng):
    lo, hi = instantaneous_bounds(n)
    j = current_operator_matrix(n)
    for _ in range(1000):
        c = random_state(n, rng).coeffs
        e = float(c @ j @ c)
        assert lo - 1e-12 <= e <= hi + 1e-12
        assert e == pytest.approx(expectation(c), abs=1e-12 * max(1, hi))


def test_asymptotic_bounds_within_one_percent():
    n = 10_000
    lo, hi = instantaneous_bounds(n)
    alo, ahi = asymptotic_bounds(n)
    assert abs(lo / alo - 1) < 0.01
    assert abs(hi / ahi - 1) < 0.01


@given(st.integers(1, 10**6))
def test_bounds_sign_and_order(n):
    lo, hi = instantaneous_bounds(n)
    assert lo < 0 < hi
    assert abs(lo) < hi
