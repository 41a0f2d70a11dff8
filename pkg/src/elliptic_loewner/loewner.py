"""Coupled elliptic Loewner flow of a one-variable reduction.

With tau = i y, xi = eta/2 + i kappa(y) and xibar = eta/2 - i kappa(y), the
state (eta, u, ubar, c_k, cbar_k) evolves by

    4 pi deta/dy = -E(xi) - E(xibar)
    4 pi du/dy   = -E(u + xi) + E(xi)
    4 pi dubar/dy = -E(ubar + xibar) + E(xibar)

where E = E^(1) + E^(4). The Laurent coefficients of u(z) = sum c_k z^-k follow
by expanding -E(u + xi) + E(xi) = -sum_m E^(m)(xi) u^m / m! in powers of 1/z.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults, elliptic, series
from .errors import (
    BlowUpError,
    DomainError,
    InputError,
    PoleError,
    RangeError,
    RealityError,
    StepSizeError,
)
from .report import ResidualReport
from .theta import check_tau, theta_constants, theta_tau_derivative, zero_distance

_PI = math.pi
_FOUR_PI = 4.0 * math.pi
_FOUR_PI_I = 4j * math.pi


# --------------------------------------------------------------------------
# driving function

_KINDS = ("constant", "piecewise_linear", "sinusoid", "table")
_KEYS = {
    "constant": {"value"},
    "piecewise_linear": {"knots", "values"},
    "sinusoid": {"offset", "amplitude", "frequency", "phase"},
    "table": {"knots", "values"},
}


@dataclass(frozen=True)
class DrivingFunction:
    """Real driving function kappa(y).

    ``kind`` selects the parametrization:

    * ``constant``: ``{"value": k}``
    * ``piecewise_linear``: ``{"knots": [...], "values": [...]}``, held
      constant beyond the end knots
    * ``sinusoid``: ``{"offset", "amplitude", "frequency", "phase"}`` giving
      offset + amplitude * sin(2 pi frequency y + phase)
    * ``table``: ``{"knots": [...], "values": [...]}``, linear interpolation,
      evaluation outside the knots is an error

    An optional ``domain = (lo, hi)`` restricts every kind.
    """

    kind: str
    params: dict = field(default_factory=dict)
    domain: tuple | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown driving function kind {self.kind!r}")
        p = self.params
        extra = set(p) - _KEYS[self.kind]
        if extra:
            raise InputError(f"unknown keys for a {self.kind} driving function: {sorted(extra)}")
        if self.kind == "constant":
            _need(p, ("value",), self.kind)
            _finite(p["value"], "value")
        elif self.kind in ("piecewise_linear", "table"):
            _need(p, ("knots", "values"), self.kind)
            knots = np.asarray(p["knots"], dtype=float)
            values = np.asarray(p["values"], dtype=float)
            if knots.ndim != 1 or knots.shape != values.shape or knots.size < 2:
                raise InputError("knots and values must be 1-D arrays of equal length >= 2")
            if np.any(np.diff(knots) <= 0):
                raise InputError("knots must be strictly increasing")
            if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(values))):
                raise InputError("knots and values must be finite")
        elif self.kind == "sinusoid":
            _need(p, ("amplitude", "frequency"), self.kind)
            for k in ("offset", "amplitude", "frequency", "phase"):
                _finite(p.get(k, 0.0), k)
        if self.domain is not None:
            lo, hi = map(float, self.domain)
            if not lo < hi:
                raise InputError(f"empty domain {self.domain!r}")
            object.__setattr__(self, "domain", (lo, hi))

    @classmethod
    def constant(cls, value, domain=None):
        return cls("constant", {"value": float(value)}, domain)

    @classmethod
    def sinusoid(cls, amplitude, frequency, offset=0.0, phase=0.0, domain=None):
        return cls(
            "sinusoid",
            {"offset": offset, "amplitude": amplitude, "frequency": frequency, "phase": phase},
            domain,
        )

    @classmethod
    def piecewise_linear(cls, knots, values, domain=None):
        return cls("piecewise_linear", {"knots": list(knots), "values": list(values)}, domain)

    @classmethod
    def table(cls, knots, values):
        return cls("table", {"knots": list(knots), "values": list(values)})

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("kind", None)
        domain = d.pop("domain", None)
        return cls(kind, d, tuple(domain) if domain is not None else None)

    def to_dict(self):
        out = {"kind": self.kind, **self.params}
        if self.domain is not None:
            out["domain"] = list(self.domain)
        return out

    def __call__(self, y):
        y = float(y)
        if self.domain is not None and not (self.domain[0] <= y <= self.domain[1]):
            raise DomainError(f"kappa is undefined at y={y!r} (domain {self.domain})")
        p = self.params
        if self.kind == "constant":
            return float(p["value"])
        if self.kind == "sinusoid":
            return float(
                p.get("offset", 0.0)
                + p["amplitude"] * math.sin(2 * _PI * p["frequency"] * y + p.get("phase", 0.0))
            )
        knots, values = p["knots"], p["values"]
        if self.kind == "table" and not (knots[0] <= y <= knots[-1]):
            raise DomainError(f"y={y!r} is outside the kappa table [{knots[0]}, {knots[-1]}]")
        return float(np.interp(y, knots, values))


def _need(p, keys, kind):
    missing = [k for k in keys if k not in p]
    if missing:
        raise InputError(f"{kind} driving function is missing {missing}")


def _finite(x, name):
    if not math.isfinite(float(x)):
        raise InputError(f"{name} must be finite")


# --------------------------------------------------------------------------
# state


@dataclass(frozen=True)
class LaurentTailSeries:
    """Coefficients c_1..c_N of u(z) = sum_k c_k z^-k."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size < 1:
            raise InputError("a Laurent tail needs at least one coefficient")
        if c.size > defaults.MAX_SERIES_ORDER:
            raise InputError(f"series order {c.size} exceeds {defaults.MAX_SERIES_ORDER}")
        if not np.all(np.isfinite(c)):
            raise InputError("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self):
        return self.coeffs.size

    def __call__(self, z):
        w = 1.0 / complex(z)
        # Horner in w
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = (acc + c) * w
        return acc

    def conjugate(self):
        return LaurentTailSeries(np.conj(self.coeffs))


@dataclass(frozen=True)
class ReductionState:
    """Full state of a reduction at y = Im(tau)."""

    y: float
    eta: float
    labels: tuple
    u: np.ndarray
    ubar: np.ndarray
    series: LaurentTailSeries
    series_bar: LaurentTailSeries

    def __post_init__(self):
        u = np.array(self.u, dtype=complex).reshape(-1)
        ub = np.array(self.ubar, dtype=complex).reshape(-1)
        labels = tuple(str(x) for x in self.labels)
        if not (u.size == ub.size == len(labels)):
            raise InputError("labels, u and ubar must have the same length")
        if self.series.order != self.series_bar.order:
            raise InputError("series and series_bar must have the same order")
        if not math.isfinite(self.eta) or not math.isfinite(self.y):
            raise InputError("eta and y must be finite")
        u.setflags(write=False)
        ub.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "ubar", ub)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "y", float(self.y))

    @classmethod
    def initial(cls, y, eta, coeffs=(1.0,), points=None, coeffs_bar=None, ubar=None):
        """Conjugate-symmetric initial data with u initialized from the series.

        ``points`` maps labels to spectral points z; u(z) is evaluated from the
        series and ubar from the conjugate series at conj(z), unless given.
        """
        s = LaurentTailSeries(coeffs)
        sb = s.conjugate() if coeffs_bar is None else LaurentTailSeries(coeffs_bar)
        points = dict(points or {})
        labels = tuple(points)
        u = [s(points[k]) for k in labels]
        ub = [sb(np.conj(complex(points[k]))) for k in labels] if ubar is None else ubar
        return cls(y=y, eta=eta, labels=labels, u=u, ubar=ub, series=s, series_bar=sb)

    @property
    def tau(self):
        return complex(0.0, self.y)

    def xi(self, kappa_value):
        return complex(0.5 * self.eta, kappa_value), complex(0.5 * self.eta, -kappa_value)

    def pack(self):
        return np.concatenate(
            [[self.eta], self.u, self.ubar, self.series.coeffs, self.series_bar.coeffs]
        ).astype(complex)

    def unpack(self, y, vec):
        n, N = len(self.labels), self.series.order
        return ReductionState(
            y=y,
            eta=vec[0].real,
            labels=self.labels,
            u=vec[1 : 1 + n],
            ubar=vec[1 + n : 1 + 2 * n],
            series=LaurentTailSeries(vec[1 + 2 * n : 1 + 2 * n + N]),
            series_bar=LaurentTailSeries(vec[1 + 2 * n + N :]),
        )


@dataclass(frozen=True)
class StateRates:
    """y-derivatives of every component of a :class:`ReductionState`."""

    eta: float
    u: np.ndarray
    ubar: np.ndarray
    coeffs: np.ndarray
    coeffs_bar: np.ndarray

    def pack(self):
        return np.concatenate([[self.eta], self.u, self.ubar, self.coeffs, self.coeffs_bar]).astype(
            complex
        )


def _series_rate(xi, tau, coeffs, pole_guard):
    N = coeffs.size
    a = elliptic.e_taylor(xi, tau, N, pole_guard=pole_guard)
    outer = a.copy()
    outer[0] = 0.0
    inner = series.laurent_to_series(coeffs, N)
    return -series.compose(outer, inner, N)[1:] / _FOUR_PI


def rhs(state, kappa, *, pole_guard=defaults.POLE_GUARD):
    """y-derivative of ``state`` under the flow driven by ``kappa``."""
    tau = check_tau(state.tau)
    k = kappa(state.y)
    xi, xib = state.xi(k)
    e_xi = elliptic.e_combined(xi, tau, pole_guard=pole_guard)
    e_xib = elliptic.e_combined(xib, tau, pole_guard=pole_guard)
    total = e_xi + e_xib
    if abs(total.imag) >= defaults.REALITY_TOL * (1.0 + abs(e_xi)):
        raise RealityError(f"E(xi) + E(xibar) has imaginary part {total.imag:.3e}")
    d_eta = -2.0 * e_xi.real / _FOUR_PI
    d_u = np.array(
        [(-elliptic.e_combined(x + xi, tau, pole_guard=pole_guard) + e_xi) / _FOUR_PI for x in state.u],
        dtype=complex,
    )
    d_ub = np.array(
        [(-elliptic.e_combined(x + xib, tau, pole_guard=pole_guard) + e_xib) / _FOUR_PI for x in state.ubar],
        dtype=complex,
    )
    d_c = _series_rate(xi, tau, state.series.coeffs, pole_guard)
    d_cb = _series_rate(xib, tau, state.series_bar.coeffs, pole_guard)
    return StateRates(eta=d_eta, u=d_u, ubar=d_ub, coeffs=d_c, coeffs_bar=d_cb)


# --------------------------------------------------------------------------
# Dormand-Prince 5(4) with quartic dense output

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)


@dataclass(frozen=True)
class _Step:
    y0: float
    h: float
    vec0: np.ndarray
    K: np.ndarray

    def at(self, y):
        theta = (y - self.y0) / self.h
        Q = self.K.T @ _P
        return self.vec0 + self.h * (Q @ (theta ** np.arange(1, 5)))


class Trajectory:
    """Result of :func:`integrate`: sampled states plus a dense interpolant.

    Indexing and iteration go over the sampled states; :meth:`state_at`
    evaluates the interpolant anywhere between the first and last y.
    """

    def __init__(self, template, kappa, steps, sample_ys, rtol):
        self.template = template
        self.kappa = kappa
        self.rtol = rtol
        self._steps = steps
        self._starts = np.array([s.y0 for s in steps])
        self.y_start = steps[0].y0 if steps else template.y
        self.y_end = steps[-1].y0 + steps[-1].h if steps else template.y
        self.states = [self.state_at(y) for y in sample_ys]

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self):
        return iter(self.states)

    @property
    def n_steps(self):
        return len(self._steps)

    @property
    def y_range(self):
        return (min(self.y_start, self.y_end), max(self.y_start, self.y_end))

    def state_at(self, y):
        y = float(y)
        lo, hi = self.y_range
        if not (lo <= y <= hi):
            raise RangeError(f"y={y!r} is outside the trajectory range [{lo}, {hi}]")
        if not self._steps:
            return self.template
        if y == self.y_start:
            return self.template.unpack(y, self._steps[0].vec0)
        forward = self.y_end > self.y_start
        if forward:
            i = int(np.searchsorted(self._starts, y, side="right")) - 1
        else:
            i = int(np.searchsorted(-self._starts, -y, side="right")) - 1
        i = min(max(i, 0), len(self._steps) - 1)
        vec = self._steps[i].at(y)
        vec[0] = vec[0].real
        return self.template.unpack(y, vec)

    def csv_header(self):
        cols = ["y", "eta", "kappa"]
        for lab in self.template.labels:
            cols += [f"re_u_{lab}", f"im_u_{lab}"]
        N = self.template.series.order
        for k in range(1, N + 1):
            cols += [f"re_c_{k}", f"im_c_{k}"]
        for lab in self.template.labels:
            cols += [f"re_ubar_{lab}", f"im_ubar_{lab}"]
        for k in range(1, N + 1):
            cols += [f"re_cbar_{k}", f"im_cbar_{k}"]
        return cols

    def csv_rows(self):
        for s in self.states:
            row = [s.y, s.eta, self.kappa(s.y)]
            for x in s.u:
                row += [x.real, x.imag]
            for x in s.series.coeffs:
                row += [x.real, x.imag]
            for x in s.ubar:
                row += [x.real, x.imag]
            for x in s.series_bar.coeffs:
                row += [x.real, x.imag]
            yield [repr(float(v)) for v in row]

    def to_csv(self, path=None):
        """Write the sampled states as CSV; return the text if ``path`` is None."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        w.writerows(self.csv_rows())
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def integrate(
    initial,
    kappa,
    y_end,
    *,
    rtol=defaults.ODE_RTOL,
    atol=None,
    samples=None,
    h0=None,
    h_min=defaults.ODE_H_MIN,
    max_halvings=defaults.ODE_MAX_HALVINGS,
    pole_guard=defaults.POLE_GUARD,
    y_min=defaults.Y_MIN,
    max_steps=100_000,
):
    """Integrate the reduction from ``initial.y`` to ``y_end``.

    Parameters
    ----------
    initial : ReductionState
    kappa : DrivingFunction
    y_end : float
        Final y; may lie below or above ``initial.y``.
    rtol, atol : float
        Per-step tolerances; ``atol`` defaults to ``rtol``.
    samples : int or array_like, optional
        Dense-output ys (an int requests that many equispaced points).
        Defaults to the accepted step points.

    Returns
    -------
    Trajectory

    Raises
    ------
    BlowUpError
        A pole guard kept failing after ``max_halvings`` step halvings.
    StepSizeError
        Error control demanded a step below ``h_min``.
    """
    atol = rtol if atol is None else atol
    y0 = float(initial.y)
    y_end = float(y_end)
    if min(y0, y_end) < y_min:
        raise DomainError(f"integration range reaches below y_min={y_min}")
    span = y_end - y0
    direction = 1.0 if span >= 0 else -1.0

    def f(y, vec):
        return rhs(initial.unpack(y, vec), kappa, pole_guard=pole_guard).pack()

    y = y0
    vec = initial.pack()
    steps = []
    step_ys = [y0]
    if span == 0.0:
        return Trajectory(initial, kappa, steps, _sample_ys(samples, y0, y_end, step_ys), rtol)

    try:
        k0 = f(y, vec)
    except PoleError as exc:
        raise BlowUpError(f"initial state violates a pole guard: {exc}", y=y, argument=exc.argument) from exc
    h = direction * min(abs(span), 1e-2 if h0 is None else abs(h0))
    halvings = 0
    n = 0
    while direction * (y_end - y) > 0:
        n += 1
        if n > max_steps:
            raise StepSizeError(f"more than {max_steps} steps")
        if direction * (y + h - y_end) > 0:
            h = y_end - y
        K = np.empty((7, vec.size), dtype=complex)
        K[0] = k0
        try:
            for i in range(1, 7):
                yi = vec + h * (np.dot(_A[i], K[:i]))
                K[i] = f(y + _C[i] * h, yi)
        except PoleError as exc:
            halvings += 1
            h *= 0.5
            if halvings > max_halvings or abs(h) < h_min:
                raise BlowUpError(
                    f"pole guard violated near y={y:.12g}: {exc}", y=y, argument=exc.argument
                ) from exc
            continue
        except DomainError:
            raise
        new = vec + h * (_B @ K)
        err = h * (_E @ K)
        scale = atol + rtol * np.maximum(np.abs(vec), np.abs(new))
        norm = float(np.max(np.abs(err) / scale))
        if norm <= 1.0:
            steps.append(_Step(y, h, vec.copy(), K.copy()))
            y = y + h
            if direction * (y - y_end) >= 0 or abs(y_end - y) < 1e-14 * max(1.0, abs(y_end)):
                y = y_end
            vec = new
            vec[0] = vec[0].real
            k0 = K[6]
            step_ys.append(y)
            halvings = 0
            factor = 5.0 if norm == 0 else min(5.0, max(0.2, 0.9 * norm ** -0.2))
            h *= factor
        else:
            h *= max(0.2, 0.9 * norm ** -0.2)
            if abs(h) < h_min:
                raise StepSizeError(f"step size fell below h_min={h_min:g} at y={y:.12g}")
    return Trajectory(initial, kappa, steps, _sample_ys(samples, y0, y_end, step_ys), rtol)


def _sample_ys(samples, y0, y_end, step_ys):
    if samples is None:
        return list(step_ys)
    if np.isscalar(samples):
        n = int(samples)
        if n < 2:
            raise InputError("need at least two samples")
        return list(np.linspace(y0, y_end, n))
    ys = [float(v) for v in samples]
    lo, hi = min(y0, y_end), max(y0, y_end)
    for v in ys:
        if not lo <= v <= hi:
            raise RangeError(f"sample y={v} lies outside [{lo}, {hi}]")
    return ys


# --------------------------------------------------------------------------
# reduction consistency identities


def _rates_tau(eta, xi, xib, tau, pole_guard):
    """partial_tau of a point u (or ubar) and of eta under the flow."""
    def E(x):
        return elliptic.e_combined(x, tau, pole_guard=pole_guard)

    e_xi, e_xib = E(xi), E(xib)

    def du(x):
        return (-E(x + xi) + e_xi) / _FOUR_PI_I

    def dub(x):
        return (-E(x + xib) + e_xib) / _FOUR_PI_I

    d_eta = (E(xi - eta) - e_xi) / _FOUR_PI_I
    return du, dub, d_eta


def dlog_rho_dtau(xi, tau, *, pole_guard=defaults.POLE_GUARD):
    """d log(rho)/dtau with rho = pi c_1 theta_2(0) theta_3(0).

    c_1 obeys 4 pi i dc_1/dtau = -E'(xi) c_1; the theta constants are
    differentiated term-wise in tau.
    """
    e1 = elliptic.e_taylor(xi, tau, 1, pole_guard=pole_guard)[1]
    th2, th3, _ = theta_constants(tau)
    d_consts = theta_tau_derivative(2, 0.0, tau) / th2 + theta_tau_derivative(3, 0.0, tau) / th3
    return -e1 / _FOUR_PI_I + d_consts


def _near_pole(x, tau, pole_guard):
    return min(zero_distance(1, x, tau), zero_distance(4, x, tau)) < pole_guard


def reduction_identity_residuals(eta, kappa_value, u1, u2, ubar1, tau, *, pole_guard=defaults.POLE_GUARD):
    """Normalized residuals of the reduction identities at one state.

    Every total derivative dS(x)/dtau is assembled from the flow rates of the
    argument x through :func:`elliptic.total_s_derivative`. Returns a dict
    keyed by identity name: ``ap1, ap2, ap3, ap3a, ap4, ap4_bar, ap5, ap6,
    ss5, ss6, ss7``.
    """
    tau = check_tau(tau)
    eta = float(eta)
    u1, u2, ubar1 = complex(u1), complex(u2), complex(ubar1)
    xi = complex(0.5 * eta, kappa_value)
    xib = complex(0.5 * eta, -kappa_value)
    du, dub, d_eta = _rates_tau(eta, xi, xib, tau, pole_guard)

    def Sp(x):
        return elliptic.s_prime(x, tau, pole_guard=pole_guard)

    def dS(x, dx):
        return elliptic.total_s_derivative(x, tau, dx, pole_guard=pole_guard)

    def res(lhs, rhs):
        return elliptic.normalized_residual(lhs, rhs)

    du1, du2, dub1 = du(u1), du(u2), dub(ubar1)
    sp_xi, sp_xib = Sp(xi), Sp(xib)
    sp_u1x, sp_u2x = Sp(u1 + xi), Sp(u2 + xi)
    sp_ub1x = Sp(ubar1 + xib)

    # reduced forms (right-hand sides divided by 4 pi i)
    r_u1 = sp_u1x * sp_xi / _FOUR_PI_I
    r_u2 = sp_u2x * sp_xi / _FOUR_PI_I
    r_rho = sp_xi**2 / _FOUR_PI_I
    r_u2eta = sp_u2x * Sp(xi - eta) / _FOUR_PI_I
    r_diff = sp_u1x * sp_u2x / _FOUR_PI_I
    r_eta = sp_xi * Sp(xi - eta) / _FOUR_PI_I
    r_ub1 = sp_ub1x * sp_xib / _FOUR_PI_I
    r_mix = sp_ub1x * Sp(-u2 - xi) / _FOUR_PI_I

    ds_u1 = dS(u1, du1)
    ds_u2 = dS(u2, du2)
    dlr = dlog_rho_dtau(xi, tau, pole_guard=pole_guard)
    ds_u2eta = dS(u2 + eta, du2 + d_eta)
    # u1 = u2 makes S(u1 - u2) singular; that factor is then taken in reduced form
    diff_arg = u1 - u2
    ds_diff = r_diff if _near_pole(diff_arg, tau, pole_guard) else dS(diff_arg, du1 - du2)
    ds_eta = dS(eta, d_eta)
    ds_ub1 = dS(ubar1, dub1)
    mix_arg = ubar1 + u2 + eta
    ds_mix = dS(mix_arg, dub1 + du2 + d_eta)

    out = {
        "ap1": res(_FOUR_PI_I * ds_u1, _FOUR_PI_I * r_u1),
        "ap2": res(_FOUR_PI_I * dlr, _FOUR_PI_I * r_rho),
        "ap3": res(_FOUR_PI_I * ds_u2eta, _FOUR_PI_I * r_u2eta),
        "ap3a": res(_FOUR_PI_I * ds_diff, _FOUR_PI_I * r_diff),
        "ap4": res(_FOUR_PI_I * ds_eta, _FOUR_PI_I * r_eta),
        "ap4_bar": res(_FOUR_PI_I * ds_eta, sp_xib * Sp(xib - eta)),
        "ap5": res(_FOUR_PI_I * ds_ub1, _FOUR_PI_I * r_ub1),
        "ap6": res(_FOUR_PI_I * ds_mix, _FOUR_PI_I * r_mix),
    }
    scale = _FOUR_PI_I**2
    out["ss5"] = res(scale * ds_u1 * ds_u2, scale * dlr * ds_diff)
    out["ss6"] = res(scale * ds_u1 * ds_u2eta, scale * ds_eta * ds_diff)
    out["ss7"] = res(scale * ds_ub1 * ds_u2, scale * ds_eta * ds_mix)
    return out


AP_NAMES = ("ap1", "ap2", "ap3", "ap3a", "ap4", "ap4_bar", "ap5", "ap6", "ss5", "ss6", "ss7")


def consistency_residuals(state, kappa, *, tol=defaults.IDENTITY_TOL, pole_guard=defaults.POLE_GUARD):
    """Reduction identities evaluated at ``state``.

    The first two marked points serve as u1 and u2 (the first one twice if
    only one point is present) and the first barred point as ubar1.
    """
    if len(state.labels) == 0:
        raise InputError("consistency residuals need at least one marked point")
    u1 = state.u[0]
    u2 = state.u[1] if len(state.u) > 1 else state.u[0]
    vals = reduction_identity_residuals(
        state.eta, kappa(state.y), u1, u2, state.ubar[0], state.tau, pole_guard=pole_guard
    )
    report = ResidualReport(meta={"y": state.y})
    for name in AP_NAMES:
        report.add(name, [vals[name]], tol)
    return report
