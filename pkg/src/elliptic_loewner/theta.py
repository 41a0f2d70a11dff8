"""Jacobi theta functions on the strip Im(tau) >= y_min.

Conventions: ``theta(a, u, tau)`` is theta_a(u|tau) with nome q = exp(i pi tau),
so that theta_1(u+1) = -theta_1(u), theta_3(u+tau) = exp(-i pi tau - 2 pi i u)
theta_3(u), and theta_1'(0) = pi theta_2(0) theta_3(0) theta_4(0).

The sums are evaluated over k in Z directly from the exponential form::

    theta_1(u) = -sum exp(i pi tau (k+1/2)^2 + 2 pi i (u+1/2)(k+1/2))
    theta_2(u) =  sum exp(i pi tau (k+1/2)^2 + 2 pi i u (k+1/2))
    theta_3(u) =  sum exp(i pi tau k^2 + 2 pi i u k)
    theta_4(u) =  sum exp(i pi tau k^2 + 2 pi i (u+1/2) k)

after reducing u into the fundamental cell by integer shifts u -> u - m - n tau.
All derivatives are term-wise; no finite differences are used here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import defaults
from .errors import DomainError, NumericalError, PoleError, TruncationError

__all__ = [
    "ModularParam",
    "ModularPoint",
    "check_tau",
    "theta",
    "theta_derivatives",
    "theta_log_derivative",
    "theta_tau_derivative",
    "log_theta_taylor",
    "zero_distance",
    "theta_constants",
]

_PI = math.pi
_TWO_PI_I = 2j * math.pi

# sign picked up by theta_a under u -> u + 1 and under u -> u + tau
_EPS_ONE = {1: -1, 2: -1, 3: 1, 4: 1}
_EPS_TAU = {1: -1, 2: 1, 3: 1, 4: -1}


@dataclass(frozen=True)
class ModularParam:
    """Modular parameter tau with an optional purely-imaginary constraint."""

    tau: complex
    purely_imaginary: bool = False
    y_min: float = defaults.Y_MIN

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        check_tau(self.tau, y_min=self.y_min)
        if self.purely_imaginary and abs(self.tau.real) >= defaults.PURE_IMAG_TOL:
            raise DomainError(f"tau={self.tau!r} is not purely imaginary")

    @classmethod
    def imaginary(cls, y, **kwargs):
        return cls(complex(0.0, y), purely_imaginary=True, **kwargs)

    def __complex__(self):
        return self.tau


@dataclass(frozen=True)
class ModularPoint:
    """Argument pair (u, tau) of the theta-level functions."""

    u: complex
    tau: ModularParam

    def __post_init__(self):
        u = complex(self.u)
        if not (math.isfinite(u.real) and math.isfinite(u.imag)):
            raise DomainError(f"u={u!r} is not finite")
        object.__setattr__(self, "u", u)
        if not isinstance(self.tau, ModularParam):
            object.__setattr__(self, "tau", ModularParam(self.tau))


def check_tau(tau, y_min=defaults.Y_MIN):
    """Return ``tau`` as a complex number, raising if Im(tau) < y_min."""
    tau = complex(tau)
    if not (math.isfinite(tau.real) and math.isfinite(tau.imag)):
        raise DomainError(f"tau={tau!r} is not finite")
    if tau.imag < y_min:
        raise DomainError(f"Im(tau)={tau.imag:g} is below y_min={y_min:g}")
    return tau


def _reduce(u, tau):
    """Split u = u_r + m + n*tau with |Im u_r| <= Im(tau)/2 and |Re u_r| <= 1/2."""
    n = round(u.imag / tau.imag)
    v = u - n * tau
    m = round(v.real)
    return v - m, m, n


def _nu_grid(a, K):
    if a in (1, 2):
        return np.arange(-K, K, dtype=float) + 0.5
    return np.arange(-K, K + 1, dtype=float)


def _phase(a, nu):
    if a == 1:
        # -exp(i pi (k + 1/2)) = -i (-1)^k, kept exact
        k = nu - 0.5
        return np.where(np.mod(k, 2.0) == 0.0, -1j, 1j)
    if a == 4:
        return np.where(np.mod(nu, 2.0) == 0.0, 1.0, -1.0).astype(complex)
    return np.ones_like(nu, dtype=complex)


def _log_mag(nu, y, im_u):
    return -_PI * y * nu * nu - 2.0 * _PI * nu * im_u


def _qsum(a, ur, tau, order, with_tau):
    """Term-wise sums at a reduced argument.

    Returns ``(derivs, dtau)`` where ``derivs[j]`` is the j-th u-derivative and
    ``dtau`` the tau-derivative (``None`` unless requested).
    """
    y = tau.imag
    # first guess for the number of terms, refined below until the first
    # omitted term is negligible against the absolute partial sum
    K = int(math.ceil(abs(ur.imag) / y + math.sqrt(45.0 / (_PI * y)))) + 2
    half = a in (1, 2)
    while True:
        nterms = 2 * K if half else 2 * K + 1
        if nterms > defaults.SERIES_MAX_TERMS:
            raise TruncationError(
                f"theta_{a} q-series did not converge within "
                f"{defaults.SERIES_MAX_TERMS} terms (tau={tau!r})"
            )
        nu = _nu_grid(a, K)
        w = _phase(a, nu) * np.exp(1j * _PI * tau * nu * nu + _TWO_PI_I * ur * nu)
        powers = np.vander(_TWO_PI_I * nu, order + 1, increasing=True)
        weighted = w[:, None] * powers
        abs_sum = np.abs(weighted).sum(axis=0)
        # magnitude of the first omitted terms (both signs) for every order
        nxt = np.array([K + 0.5, -K - 0.5]) if half else np.array([K + 1.0, -K - 1.0])
        nxt_mag = np.exp(_log_mag(nxt, y, ur.imag))
        nxt_w = nxt_mag[:, None] * np.abs(
            np.vander(2 * _PI * nxt, order + 1, increasing=True)
        )
        if with_tau:
            tau_abs = np.abs(w * (1j * _PI * nu * nu)).sum()
            tau_next = (nxt_mag * _PI * nxt * nxt).max()
            tau_ok = tau_next <= defaults.SERIES_REL_TOL * tau_abs or tau_abs == 0.0
        else:
            tau_ok = True
        if np.all(nxt_w.max(axis=0) <= defaults.SERIES_REL_TOL * abs_sum) and tau_ok:
            break
        K = int(K * 1.5) + 1
    derivs = weighted.sum(axis=0)
    dtau = (w * (1j * _PI * nu * nu)).sum() if with_tau else None
    return derivs, dtau


def _zero_offset(a, tau):
    return {1: 0.0, 2: 0.5, 3: 0.5 + 0.5 * tau, 4: 0.5 * tau}[a]


def zero_distance(a, u, tau):
    """Distance from ``u`` to the nearest zero of theta_a(.|tau)."""
    tau = complex(tau)
    w = complex(u) - _zero_offset(a, tau)
    n0 = round(w.imag / tau.imag)
    best = math.inf
    for n in (n0 - 1, n0, n0 + 1):
        v = w - n * tau
        m0 = round(v.real)
        for m in (m0 - 1, m0, m0 + 1):
            best = min(best, abs(v - m))
    return best


def _check_order(order, cap):
    if int(order) != order or order < 0:
        raise DomainError(f"derivative order must be a non-negative integer, got {order!r}")
    if order > cap:
        raise DomainError(f"derivative order {order} exceeds the cap {cap}")
    return int(order)


def _check_index(a):
    if a not in (1, 2, 3, 4):
        raise DomainError(f"theta index must be 1, 2, 3 or 4, got {a!r}")


def theta_derivatives(a, u, tau, order=0, *, y_min=defaults.Y_MIN):
    """All u-derivatives of theta_a at ``u`` up to ``order``.

    Parameters
    ----------
    a : int
        Theta index in {1, 2, 3, 4}.
    u, tau : complex
        Argument and modular parameter; ``tau`` may be a :class:`ModularParam`.
    order : int
        Highest derivative returned (at most ``MAX_SERIES_ORDER + 2``).

    Returns
    -------
    numpy.ndarray
        Complex array ``d`` with ``d[j]`` the j-th derivative.
    """
    _check_index(a)
    order = _check_order(order, defaults.MAX_SERIES_ORDER + 2)
    tau = check_tau(tau, y_min)
    u = complex(u)
    ur, m, n = _reduce(u, tau)
    base, _ = _qsum(a, ur, tau, order, with_tau=False)
    if n == 0:
        out = base
    else:
        # Leibniz rule against the quasi-periodicity factor exp(-2 pi i n u)
        lam = -_TWO_PI_I * n
        out = np.empty_like(base)
        for j in range(order + 1):
            out[j] = sum(math.comb(j, i) * lam**i * base[j - i] for i in range(j + 1))
    sign = _EPS_ONE[a] ** (m % 2) * _EPS_TAU[a] ** (n % 2)
    pref = sign * cmath.exp(-1j * _PI * n * n * tau - _TWO_PI_I * n * ur)
    out = pref * out
    if zero_distance(a, u, tau) == 0.0:
        out[0] = 0.0
    if not np.all(np.isfinite(out)):
        raise NumericalError(f"theta_{a}({u!r}|{tau!r}) overflowed")
    return out


def theta(a, u, tau, du=0, *, y_min=defaults.Y_MIN):
    """Evaluate the ``du``-th u-derivative of theta_a(u|tau), ``du`` <= 4.

    >>> round(theta(3, 0, 1j).real, 7)
    1.0864348
    """
    du = _check_order(du, 4)
    return complex(theta_derivatives(a, u, tau, du, y_min=y_min)[du])


def theta_tau_derivative(a, u, tau, *, y_min=defaults.Y_MIN):
    """Partial derivative of theta_a(u|tau) in tau at fixed u."""
    _check_index(a)
    tau = check_tau(tau, y_min)
    u = complex(u)
    ur, m, n = _reduce(u, tau)
    d, dtau = _qsum(a, ur, tau, 1, with_tau=True)
    sign = _EPS_ONE[a] ** (m % 2) * _EPS_TAU[a] ** (n % 2)
    pref = sign * cmath.exp(-1j * _PI * n * n * tau - _TWO_PI_I * n * ur)
    # u_r = u - m - n tau moves with tau, hence the -n theta' term
    return complex(pref * (1j * _PI * n * n * d[0] + dtau - n * d[1]))


def _guard(a, u, tau, pole_guard):
    dist = zero_distance(a, u, tau)
    if dist < pole_guard:
        raise PoleError(
            f"u={u!r} lies within {dist:.3g} of a zero of theta_{a}(.|{tau!r})",
            argument=u,
        )


def theta_log_derivative(a, u, tau, *, pole_guard=defaults.POLE_GUARD, y_min=defaults.Y_MIN):
    """Logarithmic derivative theta_a'(u)/theta_a(u)."""
    _check_index(a)
    tau = check_tau(tau, y_min)
    _guard(a, u, tau, pole_guard)
    d = theta_derivatives(a, u, tau, 1, y_min=y_min)
    return complex(d[1] / d[0])


def log_theta_taylor(a, u, tau, order, *, pole_guard=defaults.POLE_GUARD, y_min=defaults.Y_MIN):
    """Taylor coefficients of log theta_a(u + h) in h, orders 1..``order``.

    Entry 0 of the result is set to zero; only differences of logarithms are
    ever needed and this sidesteps the branch choice.
    """
    _check_index(a)
    tau = check_tau(tau, y_min)
    _guard(a, u, tau, pole_guard)
    d = theta_derivatives(a, u, tau, order, y_min=y_min)
    t = d / np.array([math.factorial(j) for j in range(order + 1)], dtype=float)
    # B' = A'/A  =>  j b_j a_0 = j a_j - sum_{k=1}^{j-1} k b_k a_{j-k}
    b = np.zeros(order + 1, dtype=complex)
    for j in range(1, order + 1):
        acc = j * t[j]
        for k in range(1, j):
            acc -= k * b[k] * t[j - k]
        b[j] = acc / (j * t[0])
    return b


@lru_cache(maxsize=4096)
def theta_constants(tau):
    """(theta_2(0), theta_3(0), theta_4(0)) at ``tau``."""
    tau = check_tau(tau, 0.0)
    return tuple(theta(a, 0.0, tau, y_min=0.0) for a in (2, 3, 4))
