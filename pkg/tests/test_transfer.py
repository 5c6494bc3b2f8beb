import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringflow.dynamics import current_at
from ringflow.errors import InvalidValueError
from ringflow.spectral import closed_form_spectrum
from ringflow.state import ALPHA_OPT, CoefficientVector, basis_state, normalize, random_state
from ringflow.transfer import (kernel_rows, simpson, simpson_mode_weights, sinc,
                               transfer_by_quadrature, transfer_decomposed,
                               transfer_double_sum)

seeds = st.integers(0, 2**32 - 1)


def test_sinc_values():
    assert sinc(0.0) == 1.0
    assert sinc(1e-9) == pytest.approx(1.0, abs=1e-17)
    assert sinc(math.pi) == pytest.approx(0.0, abs=1e-16)
    z = np.array([-3.0, -0.5, 0.5, 3.0])
    np.testing.assert_allclose(sinc(z), np.sin(z) / z)
    # continuity across the series cutoff
    assert abs(sinc(1.0001e-8) - sinc(0.9999e-8)) < 1e-15


def test_kernel_diagonal_and_symmetry():
    k = kernel_rows(0, 31, 30, ALPHA_OPT)
    np.testing.assert_allclose(np.diag(k), 2 * ALPHA_OPT * np.arange(31) / math.pi, rtol=1e-15)
    np.testing.assert_allclose(k, k.T, atol=1e-15)


@pytest.mark.parametrize("m", [0, 1, 5, 40])
def test_basis_state_transfer(m):
    s = basis_state(m, 40)
    assert transfer_double_sum(s) == pytest.approx(2 * ALPHA_OPT * m / math.pi, abs=1e-14)
    for method in ("modes", "nodes"):
        q = transfer_by_quadrature(s, panels=64, method=method)
        assert q == pytest.approx(2 * ALPHA_OPT * m / math.pi, abs=1e-12)


def test_two_level_state_at_alpha_pi():
    # j = (1 + cos t)/2pi integrates to exactly 1 over [-pi, pi]
    s = normalize([1.0, 1.0], alpha=math.pi)
    assert transfer_double_sum(s) == pytest.approx(1.0, abs=1e-14)
    assert transfer_by_quadrature(s, panels=2**12, method="nodes") == pytest.approx(1.0, abs=1e-10)
    assert transfer_by_quadrature(s, panels=2**12) == pytest.approx(1.0, abs=1e-10)


def test_simpson_rule_basics():
    x = np.linspace(0, 2, 5)
    assert simpson(x**3, 0.5) == pytest.approx(4.0, abs=1e-15)
    with pytest.raises(InvalidValueError):
        simpson(np.ones(4), 0.1)


@given(st.integers(-3000, 3000), st.sampled_from([64, 256, 4096]), st.floats(0.1, 3.0))
def test_closed_form_simpson_matches_nodes(k, panels, alpha):
    h = 2 * alpha / panels
    t = np.linspace(-alpha, alpha, panels + 1)
    direct = simpson(np.cos(k * t), h)
    got = float(simpson_mode_weights(np.array([float(k)]), alpha, panels)[0])
    assert got == pytest.approx(direct, abs=1e-12 * max(1.0, 2 * alpha))


@given(st.integers(1, 15), seeds)
def test_node_and_mode_quadrature_agree(n, seed):
    s = random_state(n, np.random.default_rng(seed))
    a = transfer_by_quadrature(s, panels=2000, method="nodes")
    b = transfer_by_quadrature(s, panels=2000, method="modes")
    assert a == pytest.approx(b, abs=1e-11 * n)


def test_quadrature_converges_to_double_sum(rng):
    s = random_state(50, rng)
    exact = transfer_double_sum(s)
    err14 = abs(transfer_by_quadrature(s, panels=2**14) - exact)
    err18 = abs(transfer_by_quadrature(s, panels=2**18) - exact)
    assert err14 < 1e-6
    assert err18 < err14 / 100
    assert abs(transfer_by_quadrature(s) - exact) < 1e-10


def test_odd_panels_warn_and_round_up():
    s = basis_state(1, 3)
    with pytest.warns(RuntimeWarning):
        v = transfer_by_quadrature(s, panels=101)
    assert v == pytest.approx(2 * ALPHA_OPT / math.pi)
    with pytest.raises(InvalidValueError):
        transfer_by_quadrature(s, panels=10)


def test_ground_state_decomposition():
    n = 10
    sp = closed_form_spectrum(n)
    parts = transfer_decomposed(basis_state(0, n))
    assert parts.plus_part == pytest.approx(sp.a_plus * ALPHA_OPT / (2 * math.pi), rel=1e-12)
    assert parts.minus_part == pytest.approx(-sp.a_plus * ALPHA_OPT / (2 * math.pi), rel=1e-12)
    assert parts.total == pytest.approx(0.0, abs=1e-14)


@given(st.integers(1, 60), seeds)
def test_three_routes_and_signs(n, seed):
    s = random_state(n, np.random.default_rng(seed))
    exact = transfer_double_sum(s)
    quad = transfer_by_quadrature(s)
    parts = transfer_decomposed(s)
    assert quad == pytest.approx(exact, abs=1e-9)
    assert parts.total == pytest.approx(exact, abs=1e-9)
    assert parts.plus_part >= 0 >= parts.minus_part


def test_decomposition_nodes_route(rng):
    s = random_state(8, rng)
    a = transfer_decomposed(s, panels=4000, method="nodes")
    b = transfer_decomposed(s, panels=4000, method="modes")
    assert a.plus_part == pytest.approx(b.plus_part, abs=1e-10)
    assert a.minus_part == pytest.approx(b.minus_part, abs=1e-10)


@given(st.integers(1, 30), seeds)
def test_sign_flip_invariance(n, seed):
    s = random_state(n, np.random.default_rng(seed))
    flipped = CoefficientVector(-s.coeffs, s.alpha)
    assert transfer_double_sum(flipped) == pytest.approx(transfer_double_sum(s), abs=1e-14)


@given(st.integers(1, 30), seeds)
def test_parallelogram_law(n, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(n + 1), rng.standard_normal(n + 1)

    def q(v):
        r = np.linalg.norm(v)
        return r * r * transfer_double_sum(CoefficientVector(v / r))

    lhs = q(x + y) + q(x - y)
    rhs = 2 * q(x) + 2 * q(y)
    assert lhs == pytest.approx(rhs, abs=1e-10 * n * (x @ x + y @ y))


def test_transfer_equals_integral_of_current(rng):
    # independent check with a plain trapezoid on a very fine grid
    s = random_state(6, rng)
    t = np.linspace(-s.alpha, s.alpha, 200_001)
    j = current_at(s, t)
    trap = float(np.sum((j[1:] + j[:-1]) * 0.5 * (t[1] - t[0])))
    assert trap == pytest.approx(transfer_double_sum(s), abs=1e-7)
