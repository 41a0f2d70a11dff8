"""Shared fixtures and independent oracles."""

import math

import mpmath as mp
import numpy as np
import pytest

from elliptic_loewner.hodograph import Reduction, TimesVector
from elliptic_loewner.loewner import DrivingFunction, ReductionState

mp.mp.dps = 30


def mp_theta(a, u, tau, d=0):
    """theta_a(u|tau) and its u-derivatives via mpmath (nome q = exp(i pi tau))."""
    q = mp.exp(1j * mp.pi * mp.mpc(tau))
    return complex(mp.jtheta(a, mp.pi * mp.mpc(u), q, d) * mp.pi**d)


def mp_log_derivative(a, u, tau):
    q = mp.exp(1j * mp.pi * mp.mpc(tau))
    z = mp.pi * mp.mpc(u)
    return complex(mp.pi * mp.jtheta(a, z, q, 1) / mp.jtheta(a, z, q))


def mp_s_prime(u, tau):
    return mp_log_derivative(1, u, tau) - mp_log_derivative(4, u, tau)


def mp_s_derivatives(v, tau, order):
    """Taylor coefficients of S(v + h) in h, orders 0..order, via mpmath."""
    q = mp.exp(1j * mp.pi * mp.mpc(tau))

    def S(x):
        return mp.log(mp.jtheta(1, mp.pi * x, q) / mp.jtheta(4, mp.pi * x, q))

    return [complex(c) for c in mp.taylor(S, mp.mpc(v), order)]


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@pytest.fixture(scope="session")
def kappa_sin():
    return DrivingFunction.sinusoid(0.1, 0.7, offset=0.05)


@pytest.fixture(scope="session")
def hodo_setup(kappa_sin):
    """Reduction of order 2 over y in [0.5, 1.5] and generic times."""
    state = ReductionState.initial(1.5, 0.6, [1.0, 0.3 + 0.2j, -0.1j])
    red = Reduction.build(state, kappa_sin, 0.5, 2)
    times = TimesVector(0.3, [0.5 + 0.2j, -0.4 + 0.1j])
    return red, times


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


TAU_GRID = [0.3j, 0.5j, 1.0j, 2.0j, 3.0j]
PI = math.pi


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
