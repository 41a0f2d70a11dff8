"""The S-function S(u) = log(theta_1(u)/theta_4(u)) and its companions.

Besides S, S' and the partial tau-derivative of S, this module provides
E^(a) = d/du log theta_a, the combination E = E^(1) + E^(4) and residual
evaluators for the theta identities the reduction relies on.

Every function that needs S' looks it up as the module attribute
:func:`s_prime`, so swapping that single function changes the whole
identity layer consistently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import defaults
from .errors import PoleError
from .theta import (
    check_tau,
    log_theta_taylor,
    theta,
    theta_constants,
    theta_derivatives,
    theta_log_derivative,
    zero_distance,
)

_PI = math.pi
_FOUR_PI_I = 4j * math.pi


@dataclass(frozen=True)
class SValue:
    """S, S' and partial_tau S at one point."""

    s: complex
    s_prime: complex
    s_dot: complex


def normalized_residual(lhs, rhs, terms=()):
    """|lhs - rhs| / (1 + largest magnitude among lhs, rhs and ``terms``)."""
    scale = max([abs(lhs), abs(rhs)] + [abs(t) for t in terms])
    return abs(lhs - rhs) / (1.0 + scale)


def log_derivative(a, u, tau, *, pole_guard=defaults.POLE_GUARD):
    """E^(a)(u|tau)."""
    return theta_log_derivative(a, u, tau, pole_guard=pole_guard)


def s_prime(u, tau, *, pole_guard=defaults.POLE_GUARD):
    """S'(u) = E^(1)(u) - E^(4)(u)."""
    return log_derivative(1, u, tau, pole_guard=pole_guard) - log_derivative(
        4, u, tau, pole_guard=pole_guard
    )


def s_prime_closed_form(u, tau):
    """pi theta_4(0)^2 theta_2(u) theta_3(u) / (theta_1(u) theta_4(u))."""
    th4 = theta_constants(check_tau(tau))[2]
    return (
        _PI * th4**2 * theta(2, u, tau) * theta(3, u, tau)
        / (theta(1, u, tau) * theta(4, u, tau))
    )


def s_prime_printed_form(u, tau):
    """The theta_1 theta_2 denominator variant, kept for comparison only."""
    th4 = theta_constants(check_tau(tau))[2]
    return (
        _PI * th4**2 * theta(2, u, tau) * theta(3, u, tau)
        / (theta(1, u, tau) * theta(2, u, tau))
    )


def _guard_s(u, tau, pole_guard):
    for a in (1, 4):
        if zero_distance(a, u, tau) < pole_guard:
            raise PoleError(f"S is singular near u={u!r} (zero of theta_{a})", argument=u)


def s_eval(u, tau, *, pole_guard=defaults.POLE_GUARD):
    """Evaluate S (principal branch), S' and the partial tau-derivative of S.

    The tau-derivative uses the heat relation 4 pi i d_tau theta = theta'',
    i.e. ``s_dot = (theta_1''/theta_1 - theta_4''/theta_4) / (4 pi i)``.
    """
    tau = check_tau(tau)
    u = complex(u)
    _guard_s(u, tau, pole_guard)
    d1 = theta_derivatives(1, u, tau, 2)
    d4 = theta_derivatives(4, u, tau, 2)
    s = cmath.log(d1[0] / d4[0])
    sp = s_prime(u, tau, pole_guard=pole_guard)
    sd = (d1[2] / d1[0] - d4[2] / d4[0]) / _FOUR_PI_I
    return SValue(s=s, s_prime=sp, s_dot=sd)


def e_combined(u, tau, *, pole_guard=defaults.POLE_GUARD):
    """E(u) = E^(1)(u|tau) + E^(4)(u|tau)."""
    return log_derivative(1, u, tau, pole_guard=pole_guard) + log_derivative(
        4, u, tau, pole_guard=pole_guard
    )


def e_half_period(u, tau, *, pole_guard=defaults.POLE_GUARD):
    """E^(1)(u|tau/2), which must coincide with :func:`e_combined`."""
    return theta_log_derivative(
        1, u, 0.5 * complex(tau), pole_guard=pole_guard, y_min=0.5 * defaults.Y_MIN
    )


def s_taylor(v, tau, order, *, pole_guard=defaults.POLE_GUARD):
    """Coefficients S^(m)(v)/m! for m = 0..order, with entry 0 set to zero."""
    return log_theta_taylor(1, v, tau, order, pole_guard=pole_guard) - log_theta_taylor(
        4, v, tau, order, pole_guard=pole_guard
    )


def e_taylor(v, tau, order, *, pole_guard=defaults.POLE_GUARD):
    """Coefficients E^(m)(v)/m! for m = 0..order."""
    b = log_theta_taylor(1, v, tau, order + 1, pole_guard=pole_guard) + log_theta_taylor(
        4, v, tau, order + 1, pole_guard=pole_guard
    )
    m = np.arange(order + 1)
    return (m + 1) * b[1:]


def theta4_zero_fourth(tau):
    """pi^2 theta_4(0)^4, the constant term in the S identities."""
    return _PI**2 * theta_constants(check_tau(tau))[2] ** 4


def identity_residual_ss2(u, tau, *, pole_guard=defaults.POLE_GUARD):
    """Residual of 4 pi i Sdot(u) = 2 S'(u) E^(2)(u) + pi^2 theta_4(0)^4."""
    sv = s_eval(u, tau, pole_guard=pole_guard)
    lhs = _FOUR_PI_I * sv.s_dot
    t1 = 2.0 * s_prime(u, tau, pole_guard=pole_guard) * log_derivative(
        2, u, tau, pole_guard=pole_guard
    )
    t2 = theta4_zero_fourth(tau)
    return normalized_residual(lhs, t1 + t2, (t1, t2))


def identity_residual_ss3(x1, x2, tau, *, pole_guard=defaults.POLE_GUARD):
    """Residual of
    S'(x1-x2) (-E(x1) + E(x2) + 2 E^(2)(x1-x2)) + pi^2 theta_4(0)^4 = S'(x1) S'(x2).
    """
    x1, x2 = complex(x1), complex(x2)
    d = x1 - x2
    t1 = s_prime(d, tau, pole_guard=pole_guard) * (
        -e_combined(x1, tau, pole_guard=pole_guard)
        + e_combined(x2, tau, pole_guard=pole_guard)
        + 2.0 * log_derivative(2, d, tau, pole_guard=pole_guard)
    )
    t2 = theta4_zero_fourth(tau)
    rhs = s_prime(x1, tau, pole_guard=pole_guard) * s_prime(x2, tau, pole_guard=pole_guard)
    return normalized_residual(t1 + t2, rhs, (t1, t2))


def total_s_derivative(u, tau, dtau_u, *, pole_guard=defaults.POLE_GUARD):
    """dS(u)/dtau along a path with partial_tau u = ``dtau_u``.

    Uses the closed form
    (1/4 pi i) [S'(u) (4 pi i dtau_u + 2 E^(2)(u)) + pi^2 theta_4(0)^4].
    """
    sp = s_prime(u, tau, pole_guard=pole_guard)
    e2 = log_derivative(2, u, tau, pole_guard=pole_guard)
    return (sp * (_FOUR_PI_I * dtau_u + 2.0 * e2) + theta4_zero_fourth(tau)) / _FOUR_PI_I


def landen_residual(u, tau, *, pole_guard=defaults.POLE_GUARD):
    """Relative mismatch between E(u|tau) and E^(1)(u|tau/2)."""
    lhs = e_combined(u, tau, pole_guard=pole_guard)
    rhs = e_half_period(u, tau, pole_guard=pole_guard)
    return abs(lhs - rhs) / max(abs(rhs), 1.0)


def sprime_form_residuals(u, tau, *, pole_guard=defaults.POLE_GUARD):
    """Relative distance of S' = E^(1) - E^(4) from both printed closed forms."""
    sp = s_prime(u, tau, pole_guard=pole_guard)
    scale = max(abs(sp), 1.0)
    return {
        "theta1_theta4": abs(sp - s_prime_closed_form(u, tau)) / scale,
        "theta1_theta2": abs(sp - s_prime_printed_form(u, tau)) / scale,
    }
