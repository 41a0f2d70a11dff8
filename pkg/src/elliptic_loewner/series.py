"""Dense truncated power-series arithmetic.

A series is a 1-D complex array ``a`` standing for sum_j a[j] w**j, truncated
at a fixed order. Laurent tails u(z) = sum_k c_k z**-k are handled as series
in w = 1/z with a zero constant term.
"""

import numpy as np


def mul(a, b, order):
    """Product of two series truncated at ``order``."""
    return _pad(np.convolve(a, b), order)


def compose(outer, inner, order):
    """Series of sum_m outer[m] * inner**m, truncated at ``order``.

    ``inner`` must have a vanishing constant term, so only ``outer[:order+1]``
    contributes.
    """
    inner = np.asarray(inner, dtype=complex)
    if inner.size and inner[0] != 0:
        raise ValueError("inner series must have zero constant term")
    out = np.zeros(order + 1, dtype=complex)
    power = np.zeros(order + 1, dtype=complex)
    power[0] = 1.0
    top = min(len(outer) - 1, order)
    for m in range(top + 1):
        out += outer[m] * power
        power = mul(power, _pad(inner, order), order)
    return out


def laurent_to_series(coeffs, order):
    """Embed c_1..c_N as the series 0 + c_1 w + c_2 w**2 + ..."""
    out = np.zeros(order + 1, dtype=complex)
    c = np.asarray(coeffs, dtype=complex)[:order]
    out[1 : 1 + len(c)] = c
    return out


def _pad(a, order):
    out = np.zeros(order + 1, dtype=complex)
    n = min(len(a), order + 1)
    out[:n] = a[:n]
    return out
