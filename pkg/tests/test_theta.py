import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import PI, TAU_GRID, mp_theta, rel
from elliptic_loewner.errors import DomainError, PoleError, TruncationError
from elliptic_loewner.theta import (
    ModularParam,
    ModularPoint,
    check_tau,
    log_theta_taylor,
    theta,
    theta_constants,
    theta_derivatives,
    theta_log_derivative,
    theta_tau_derivative,
    zero_distance,
)

# theta_3(0|i) = pi^(1/4) / Gamma(3/4), theta_2(0|i) = theta_4(0|i) = 2^(-1/4) theta_3(0|i)
THETA3_AT_I = math.pi**0.25 / math.gamma(0.75)


def test_theta3_at_i_closed_form():
    assert theta(3, 0, 1j) == pytest.approx(THETA3_AT_I, rel=1e-14)
    th2, th3, th4 = theta_constants(1j)
    assert th2 == pytest.approx(2**-0.25 * THETA3_AT_I, rel=1e-14)
    assert th4 == pytest.approx(2**-0.25 * THETA3_AT_I, rel=1e-14)


def test_theta1_vanishes_at_origin():
    assert theta(1, 0, 1j) == 0.0


@pytest.mark.parametrize("tau", TAU_GRID)
def test_theta1prime_identity(tau):
    th2, th3, th4 = theta_constants(tau)
    assert rel(theta(1, 0, tau, 1), PI * th2 * th3 * th4) < 1e-12


@pytest.mark.parametrize("a", [1, 2, 3, 4])
@pytest.mark.parametrize(
    "u,tau",
    [(0.23 + 0.17j, 1.3j), (-0.4 + 0.05j, 0.35j), (2.7 - 1.9j, 0.8j), (0.1 + 0.2j, 0.4 + 1.1j), (5.3 + 4.1j, 2.2j)],
)
def test_values_and_derivatives_match_mpmath(a, u, tau):
    d = theta_derivatives(a, u, tau, 3)
    for j in range(4):
        ref = mp_theta(a, u, tau, j)
        assert abs(d[j] - ref) <= 1e-12 * max(abs(ref), abs(mp_theta(a, u, tau))), (a, j)


@pytest.mark.parametrize("a", [1, 2, 3, 4])
def test_tau_derivative_matches_mpmath_difference(a):
    import mpmath as mp

    u, tau = 0.31 - 0.42j, 0.9j

    def f(t):
        return mp.jtheta(a, mp.pi * mp.mpc(u), mp.exp(1j * mp.pi * t))

    ref = complex(mp.diff(f, mp.mpc(tau)))
    assert rel(theta_tau_derivative(a, u, tau), ref) < 1e-12


@pytest.mark.parametrize("a", [1, 2, 3, 4])
def test_heat_equation(a):
    for u in (0.2 + 0.1j, 1.7 - 0.9j, -0.45 + 0.6j):
        for tau in TAU_GRID:
            lhs = theta_tau_derivative(a, u, tau)
            assert rel(lhs, theta(a, u, tau, 2) / (4j * PI)) < 1e-11


def test_reduced_argument_far_from_cell():
    # u far outside the fundamental cell goes through the quasi-periodicity
    u, tau = 7.3 + 3.4j, 0.7j
    for a in (1, 2, 3, 4):
        assert rel(theta(a, u, tau), mp_theta(a, u, tau)) < 1e-11


_EPS_ONE = {1: -1, 2: -1, 3: 1, 4: 1}
_EPS_TAU = {1: -1, 2: 1, 3: 1, 4: -1}

cells = st.tuples(
    st.floats(-1.0, 1.0), st.floats(-0.5, 0.5), st.floats(0.3, 3.0), st.sampled_from([1, 2, 3, 4])
)


@settings(max_examples=80, deadline=None)
@given(cells)
def test_quasi_periodicity_and_parity(args):
    x, s, y, a = args
    tau = 1j * y
    u = complex(x, s * y)
    # near a zero the rounding of u + 1 alone spoils relative accuracy, so
    # the property is checked on the pole-guarded region
    assume(zero_distance(a, u, tau) > 1e-3)
    t = theta(a, u, tau)
    assert rel(theta(a, u + 1, tau), _EPS_ONE[a] * t) < 1e-12
    shifted = _EPS_TAU[a] * cmath.exp(-1j * PI * tau - 2j * PI * u) * t
    assert rel(theta(a, u + tau, tau), shifted) < 1e-12
    assert rel(theta(a, -u, tau), -t if a == 1 else t) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.45, 0.45), st.floats(0.3, 3.0))
def test_jacobi_quartic_identity(x, s, y):
    # theta_3^4 = theta_2^4 + theta_4^4 at u = 0, and the u-dependent form
    # theta_3(u)^2 theta_4(0)^2 = theta_4(u)^2 theta_3(0)^2 - theta_1(u)^2 theta_2(0)^2
    tau = 1j * y
    th2, th3, th4 = theta_constants(tau)
    assert abs(th3**4 - th2**4 - th4**4) < 1e-12 * abs(th3) ** 4
    u = complex(x, s * y)
    lhs = theta(3, u, tau) ** 2 * th4**2
    rhs = theta(4, u, tau) ** 2 * th3**2 - theta(1, u, tau) ** 2 * th2**2
    assert abs(lhs - rhs) <= 1e-11 * max(abs(lhs), abs(theta(4, u, tau) ** 2 * th3**2))


def test_log_derivative_and_taylor():
    u, tau = 0.3 + 0.2j, 1.1j
    d = theta_derivatives(1, u, tau, 2)
    assert rel(theta_log_derivative(1, u, tau), d[1] / d[0]) < 1e-15
    b = log_theta_taylor(1, u, tau, 6)
    assert b[0] == 0
    # b_1 = theta'/theta, 2 b_2 = (theta''/theta) - (theta'/theta)^2
    assert rel(b[1], d[1] / d[0]) < 1e-14
    assert rel(2 * b[2], d[2] / d[0] - (d[1] / d[0]) ** 2) < 1e-12
    # compare the whole Taylor series with mpmath
    import mpmath as mp

    q = mp.exp(1j * mp.pi * tau)
    ref = mp.taylor(lambda h: mp.log(mp.jtheta(1, mp.pi * (u + h), q)), 0, 6)
    for j in range(1, 7):
        assert abs(b[j] - complex(ref[j])) < 1e-10 * max(1, abs(complex(ref[j])))


def test_zero_distance_lattices():
    tau = 1.2j
    assert zero_distance(1, 3 + 2 * tau, tau) == pytest.approx(0.0, abs=1e-15)
    assert zero_distance(2, 0.5, tau) == pytest.approx(0.0, abs=1e-15)
    assert zero_distance(3, 0.5 + 0.5 * tau, tau) == pytest.approx(0.0, abs=1e-15)
    assert zero_distance(4, 0.5 * tau - 1, tau) == pytest.approx(0.0, abs=1e-15)
    assert zero_distance(1, 0.25, tau) == pytest.approx(0.25)


def test_pole_guard():
    with pytest.raises(PoleError) as info:
        theta_log_derivative(1, 1e-6, 1j)
    assert info.value.argument == 1e-6
    with pytest.raises(PoleError):
        theta_log_derivative(4, 0.5j + 1e-5, 1j)


def test_domain_errors():
    with pytest.raises(DomainError):
        check_tau(0.01j)
    with pytest.raises(DomainError):
        check_tau(-1j)
    with pytest.raises(DomainError):
        theta(5, 0, 1j)
    with pytest.raises(DomainError):
        theta(1, 0, 1j, du=5)
    with pytest.raises(DomainError):
        theta_derivatives(1, 0, 1j, 40)
    with pytest.raises(DomainError):
        ModularParam.imaginary(0.01)
    with pytest.raises(DomainError):
        ModularParam(0.2 + 1j, purely_imaginary=True)
    with pytest.raises(DomainError):
        ModularPoint(complex("nan"), 1j)


def test_truncation_error_below_strip():
    # with the strip bound disabled a tiny Im(tau) needs too many terms
    with pytest.raises(TruncationError):
        theta(3, 0, 1e-4j, y_min=0.0)


def test_modular_param_accepted_everywhere():
    tau = ModularParam.imaginary(1.0)
    assert theta(3, 0, tau) == pytest.approx(THETA3_AT_I, rel=1e-14)
    assert ModularPoint(0.1, 1j).tau.tau == 1j


def test_small_imaginary_part_accuracy():
    # near the strip bound the series is long but still accurate
    for a in (1, 2, 3, 4):
        assert rel(theta(a, 0.13 + 0.01j, 0.06j), mp_theta(a, 0.13 + 0.01j, 0.06j)) < 1e-10


def test_vectorized_consistency(rng):
    # theta_derivatives order 0 entry agrees with theta()
    for _ in range(20):
        y = rng.uniform(0.3, 3)
        u = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        for a in (1, 2, 3, 4):
            assert theta_derivatives(a, u, 1j * y, 0)[0] == theta(a, u, 1j * y)
    assert np.isfinite(theta(3, 0.5 + 10j, 0.5j))
