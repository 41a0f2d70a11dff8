"""Theta-function uniformization of the spectral curve

    R^2 (f^2 g^2 + 1) + C f g = f^2 + g^2,   W + 1/W - R^2 (P + 1/P) = C,

with f = theta_4(u)/theta_1(u), g = theta_4(u+eta)/theta_1(u+eta), P = f g and
W = f / g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import defaults
from .elliptic import normalized_residual
from .errors import DegenerateError, DomainError, PoleError, RealityError
from .theta import ModularParam, check_tau, theta, theta_constants, zero_distance

_PI = math.pi


@dataclass(frozen=True)
class CurveParams:
    eta: float
    tau: complex
    R: float
    C: float


@dataclass(frozen=True)
class CurvePointValues:
    f: complex
    g: complex
    P: complex
    W: complex


def _as_imaginary_tau(tau):
    if isinstance(tau, ModularParam):
        tau = tau.tau
    tau = check_tau(tau)
    if abs(tau.real) >= defaults.PURE_IMAG_TOL:
        raise DomainError(f"curve parameters need purely imaginary tau, got {tau!r}")
    return tau


def _real(value, name):
    if abs(value.imag) >= defaults.REALITY_TOL * max(1.0, abs(value.real)):
        raise RealityError(f"{name} has imaginary part {value.imag:.3e}")
    return value.real


def curve_params(eta, tau, *, pole_guard=defaults.POLE_GUARD):
    """R = theta_1(eta)/theta_4(eta) and
    C = 2 theta_4(0)^2 theta_2(eta) theta_3(eta) / (theta_4(eta)^2 theta_2(0) theta_3(0)).
    """
    tau = _as_imaginary_tau(tau)
    eta = float(eta)
    if zero_distance(4, eta, tau) < pole_guard:
        raise PoleError(f"eta={eta!r} is too close to a zero of theta_4", argument=eta)
    th2, th3, th4 = theta_constants(tau)
    t4 = theta(4, eta, tau)
    R = theta(1, eta, tau) / t4
    C = 2.0 * th4**2 * theta(2, eta, tau) * theta(3, eta, tau) / (t4**2 * th2 * th3)
    return CurveParams(eta=eta, tau=tau, R=_real(R, "R"), C=_real(C, "C"))


def _guard_theta1(u, tau, pole_guard, what):
    if zero_distance(1, u, tau) < pole_guard:
        raise PoleError(f"{what}={u!r} is too close to a zero of theta_1", argument=u)


def curve_point(u, params, *, pole_guard=defaults.POLE_GUARD):
    """f, g, P, W at the uniformizing coordinate ``u``."""
    u = complex(u)
    tau = params.tau
    _guard_theta1(u, tau, pole_guard, "u")
    _guard_theta1(u + params.eta, tau, pole_guard, "u+eta")
    f = theta(4, u, tau) / theta(1, u, tau)
    g = theta(4, u + params.eta, tau) / theta(1, u + params.eta, tau)
    return CurvePointValues(f=f, g=g, P=f * g, W=f / g)


def residual_t3(values, params):
    """Normalized residual of W + 1/W - R^2 (P + 1/P) = C."""
    W, P = values.W, values.P
    terms = (W, 1.0 / W, params.R**2 * P, params.R**2 / P, params.C)
    lhs = W + 1.0 / W - params.R**2 * (P + 1.0 / P)
    return normalized_residual(lhs, params.C, terms)


def residual_t6(values, params):
    """Normalized residual of R^2 (f^2 g^2 + 1) + C f g = f^2 + g^2."""
    f, g = values.f, values.g
    R2 = params.R**2
    terms = (R2 * f * f * g * g, R2, params.C * f * g, f * f, g * g)
    return normalized_residual(R2 * (f * f * g * g + 1.0) + params.C * f * g, f * f + g * g, terms)


def quotient_identity_residuals(u1, u2, params, mixed=False, *, pole_guard=defaults.POLE_GUARD):
    """Residual of the theta representation of (W1 - W2)/(1 - P1 P2).

    With ``mixed=False``::

        (W1 - W2)/(1 - P1 P2) = R * t(u1+eta) t(u2+eta) * t(u1-u2)

    and with ``mixed=True`` (``u2`` then plays the role of the barred point)::

        (1 - W1 W2)/(1 - P1 P2) = R * t(u1+eta) t(u2+eta) * t(u1+u2+eta)

    where t = theta_1/theta_4.
    """
    u1, u2 = complex(u1), complex(u2)
    tau, eta = params.tau, params.eta
    v1 = curve_point(u1, params, pole_guard=pole_guard)
    v2 = curve_point(u2, params, pole_guard=pole_guard)
    den = 1.0 - v1.P * v2.P
    if abs(den) < defaults.DEGENERATE_TOL:
        raise DegenerateError(f"|1 - P1 P2| = {abs(den):.3e}")
    last = u1 + u2 + eta if mixed else u1 - u2
    for arg in (u1 + eta, u2 + eta, last):
        if zero_distance(4, arg, tau) < pole_guard:
            raise PoleError(f"theta_4 vanishes near {arg!r}", argument=arg)

    def t(x):
        return theta(1, x, tau) / theta(4, x, tau)

    lhs = ((1.0 - v1.W * v2.W) if mixed else (v1.W - v2.W)) / den
    rhs = params.R * t(u1 + eta) * t(u2 + eta) * t(last)
    return normalized_residual(lhs, rhs)


def rho_from_c1(c1, tau):
    """rho = pi c_1 theta_2(0) theta_3(0)."""
    th2, th3, _ = theta_constants(check_tau(tau))
    return _PI * complex(c1) * th2 * th3
