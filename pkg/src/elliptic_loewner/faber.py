"""Elliptic Faber coefficients and hydrodynamic velocities.

For a Laurent tail u(z) = c_1/z + ... + c_N/z^N the Faber coefficients at v
are read off the expansion

    S(u(z) + v) = S(v) + sum_{k>=1} z^-k / k * B'_k(v)

by Taylor-expanding S around v and composing with u(z). The constant term of
this expansion is S(v); B'_0(v) = S'(v) is a separate convention.

Velocities of the reduced hierarchy are phi_k = B'_k(xi)/S'(xi) and
psi_k = -Bbar'_k(xibar)/S'(xi), where Bbar' is built from the conjugate tail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import defaults, elliptic, series
from .errors import DegenerateError, InputError

_FORMS = ("operational", "generating")


@dataclass(frozen=True)
class FaberCoefficients:
    order: int
    values: np.ndarray  # B'_1 .. B'_N
    v: complex
    b0: complex  # B'_0 = S'(v)

    def __getitem__(self, k):
        if k == 0:
            return self.b0
        if not 1 <= k <= self.order:
            raise IndexError(k)
        return self.values[k - 1]

    def to_dict(self):
        return {str(k): _cjson(self[k]) for k in range(self.order + 1)}


@dataclass(frozen=True)
class VelocityTable:
    order: int
    phi: np.ndarray  # phi_0 .. phi_N
    psi: np.ndarray  # psi_0 .. psi_N
    xi: complex
    xibar: complex
    tau: complex

    def to_dict(self):
        return {
            "xi": _cjson(self.xi),
            "xibar": _cjson(self.xibar),
            "tau": _cjson(self.tau),
            "velocities": {
                str(k): {"phi": _cjson(self.phi[k]), "psi": _cjson(self.psi[k])}
                for k in range(self.order + 1)
            },
        }


def _cjson(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _coeffs_of(tail):
    c = getattr(tail, "coeffs", tail)
    c = np.asarray(c, dtype=complex).reshape(-1)
    if c.size < 1 or c.size > defaults.MAX_SERIES_ORDER:
        raise InputError(f"series order must be between 1 and {defaults.MAX_SERIES_ORDER}")
    return c


def _compose_tail(taylor, coeffs, order):
    inner = series.laurent_to_series(coeffs, order)
    outer = taylor.copy()
    outer[0] = 0.0
    comp = series.compose(outer, inner, order)
    k = np.arange(1, order + 1)
    return k * comp[1:]


def faber_coeffs(tail, v, tau, *, order=None, pole_guard=defaults.POLE_GUARD):
    """B'_k(v) = k [z^-k] S(u(z) + v) for k = 1..order.

    Parameters
    ----------
    tail : LaurentTailSeries or array_like
        Coefficients c_1..c_N.
    v, tau : complex
        Base point and modular parameter.
    order : int, optional
        Truncation order, at most N (default N).
    """
    c = _coeffs_of(tail)
    N = c.size if order is None else int(order)
    if not 1 <= N <= c.size:
        raise InputError(f"order must be between 1 and {c.size}")
    s = elliptic.s_taylor(v, tau, N, pole_guard=pole_guard)
    return FaberCoefficients(
        order=N,
        values=_compose_tail(s, c, N),
        v=complex(v),
        b0=elliptic.s_prime(v, tau, pole_guard=pole_guard),
    )


def faber_prime_coeffs(tail, v, tau, *, order=None, pole_guard=defaults.POLE_GUARD):
    """k [z^-k] S'(u(z) + v), the v-derivatives of :func:`faber_coeffs`."""
    c = _coeffs_of(tail)
    N = c.size if order is None else int(order)
    if not 1 <= N <= c.size:
        raise InputError(f"order must be between 1 and {c.size}")
    s = elliptic.s_taylor(v, tau, N + 1, pole_guard=pole_guard)
    m = np.arange(N + 1)
    sp = (m + 1) * s[1:]  # Taylor coefficients of S'
    return FaberCoefficients(
        order=N,
        values=_compose_tail(sp, c, N),
        v=complex(v),
        b0=elliptic.s_prime(v, tau, pole_guard=pole_guard),
    )


def velocities(state, kappa, order=None, *, form="operational", pole_guard=defaults.POLE_GUARD):
    """Velocity table phi_k, psi_k (k = 0..order) at a reduction state.

    ``form="operational"`` uses :func:`faber_coeffs`; ``form="generating"``
    uses :func:`faber_prime_coeffs`, i.e. the coefficients of
    S'(u(z) + xi)/S'(xi).
    """
    if form not in _FORMS:
        raise InputError(f"form must be one of {_FORMS}")
    N = state.series.order if order is None else int(order)
    tau = state.tau
    k = kappa(state.y) if callable(kappa) else float(kappa)
    xi, xib = state.xi(k)
    sp_xi = elliptic.s_prime(xi, tau, pole_guard=pole_guard)
    if abs(sp_xi) <= defaults.SPRIME_MIN:
        raise DegenerateError(f"|S'(xi)| = {abs(sp_xi):.3e} is too small")
    sp_xib = elliptic.s_prime(xib, tau, pole_guard=pole_guard)
    phi = np.empty(N + 1, dtype=complex)
    psi = np.empty(N + 1, dtype=complex)
    phi[0] = 1.0
    psi[0] = -sp_xib / sp_xi
    if N >= 1:
        fn = faber_coeffs if form == "operational" else faber_prime_coeffs
        b = fn(state.series, xi, tau, order=N, pole_guard=pole_guard)
        bb = fn(state.series_bar, xib, tau, order=N, pole_guard=pole_guard)
        phi[1:] = b.values / sp_xi
        psi[1:] = -bb.values / sp_xi
    return VelocityTable(order=N, phi=phi, psi=psi, xi=xi, xibar=xib, tau=tau)


__all__ = [
    "FaberCoefficients",
    "VelocityTable",
    "faber_coeffs",
    "faber_prime_coeffs",
    "velocities",
]
