"""Hodograph solution of the reduced hydrodynamic hierarchy.

Given a tabulated reduction (a Loewner trajectory and its velocity tables),
the modular parameter tau = i y as a function of the times is defined
implicitly by

    t_0 phi_0 + sum_{k>=1} t_k phi_k(y) + sum_{k>=0} tbar_k psi_k(y) = Phi(y).

Only the real part is solved for, since y is real; the imaginary part at the
root is returned as a diagnostic.

Derivatives of y with respect to the times are Wirtinger derivatives: t_k and
tbar_k are perturbed independently, along the real and imaginary axes, and
combined as d/dt = (d/da - i d/db)/2 for t = a + i b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults, elliptic
from .errors import InputError, MaxIterError, NoBracketError, RangeError
from .faber import velocities
from .loewner import integrate
from .report import ResidualReport


@dataclass(frozen=True)
class TimesVector:
    """Times (t_0, t_1..t_K) of the real form; tbar_k = conj(t_k), tbar_0 = t_0."""

    t0: float
    t: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        t0 = complex(self.t0)
        if abs(t0.imag) > 0:
            raise InputError("t_0 must be real")
        t = np.array(self.t, dtype=complex).reshape(-1)
        if not (math.isfinite(t0.real) and np.all(np.isfinite(t))):
            raise InputError("times must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "t0", t0.real)
        object.__setattr__(self, "t", t)

    @property
    def K(self):
        return self.t.size

    def components(self):
        """Holomorphic and antiholomorphic slots (t_0..t_K), (tbar_0..tbar_K)."""
        hol = np.concatenate([[self.t0], self.t]).astype(complex)
        return hol, np.conj(hol)

    @classmethod
    def from_real(cls, row):
        """Decode ``[t0, re t1, im t1, ..., re tK, im tK]``."""
        row = np.asarray(row, dtype=float).reshape(-1)
        if row.size % 2 != 1:
            raise InputError("encoded times need an odd number of entries")
        t = row[1::2] + 1j * row[2::2]
        return cls(row[0], t)

    def to_real(self):
        out = [self.t0]
        for x in self.t:
            out += [x.real, x.imag]
        return np.array(out)


_PROFILE_KINDS = ("polynomial_in_y", "table")


@dataclass(frozen=True)
class ProfileFunction:
    """Real profile Phi(y): ascending polynomial coefficients or a table."""

    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in _PROFILE_KINDS:
            raise InputError(f"unknown profile kind {self.kind!r}")
        allowed = {"coeffs"} if self.kind == "polynomial_in_y" else {"knots", "values"}
        if set(self.params) - allowed:
            raise InputError(f"unknown keys for a {self.kind} profile: {sorted(set(self.params) - allowed)}")
        if self.kind == "polynomial_in_y":
            if "coeffs" not in self.params or len(self.params["coeffs"]) == 0:
                raise InputError("polynomial profile needs 'coeffs'")
        else:
            knots = np.asarray(self.params.get("knots", []), dtype=float)
            values = np.asarray(self.params.get("values", []), dtype=float)
            if knots.size < 2 or knots.shape != values.shape or np.any(np.diff(knots) <= 0):
                raise InputError("table profile needs strictly increasing knots and matching values")

    @classmethod
    def constant(cls, value):
        return cls("polynomial_in_y", {"coeffs": [float(value)]})

    @classmethod
    def polynomial(cls, coeffs):
        return cls("polynomial_in_y", {"coeffs": [float(c) for c in coeffs]})

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(d.pop("kind", None), d)

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    def __call__(self, y):
        if self.kind == "polynomial_in_y":
            return float(np.polynomial.polynomial.polyval(y, self.params["coeffs"]))
        knots = self.params["knots"]
        if not knots[0] <= y <= knots[-1]:
            raise RangeError(f"profile table does not cover y={y}")
        return float(np.interp(y, knots, self.params["values"]))

    def derivative(self, y, h=1e-6):
        if self.kind == "polynomial_in_y":
            d = np.polynomial.polynomial.polyder(self.params["coeffs"])
            return float(np.polynomial.polynomial.polyval(y, d)) if len(d) else 0.0
        return (self(y + h) - self(y - h)) / (2 * h)


class Reduction:
    """A tabulated one-variable reduction: trajectory, driving function, order."""

    def __init__(self, trajectory, kappa, order, *, form="operational", pole_guard=defaults.POLE_GUARD):
        if order > trajectory.template.series.order:
            raise InputError("velocity order exceeds the series order of the trajectory")
        self.trajectory = trajectory
        self.kappa = kappa
        self.order = int(order)
        self.form = form
        self.pole_guard = pole_guard

    @classmethod
    def build(cls, initial, kappa, y_end, order, *, rtol=1e-11, atol=None, form="operational", **kwargs):
        traj = integrate(initial, kappa, y_end, rtol=rtol, atol=atol, **kwargs)
        return cls(traj, kappa, order, form=form)

    @property
    def y_range(self):
        return self.trajectory.y_range

    def state_at(self, y):
        return self.trajectory.state_at(y)

    def table(self, y):
        return velocities(self.state_at(y), self.kappa, self.order, form=self.form, pole_guard=self.pole_guard)


def _components(times, K):
    if isinstance(times, TimesVector):
        hol, anti = times.components()
    else:
        hol, anti = (np.asarray(x, dtype=complex) for x in times)
    if hol.size != anti.size:
        raise InputError("holomorphic and antiholomorphic times differ in length")
    if hol.size - 1 > K:
        raise InputError(f"times have K={hol.size - 1} but the reduction has order {K}")
    return hol, anti


def lhs_from_table(hol, anti, table):
    n = hol.size
    return complex(np.dot(hol, table.phi[:n]) + np.dot(anti, table.psi[:n]))


def hodograph_lhs(times, y, reduction):
    """t_0 + sum_k t_k phi_k(y) + sum_k tbar_k psi_k(y).

    ``times`` is a :class:`TimesVector` or an explicit pair ``(hol, anti)``
    of arrays (t_0..t_K) and (tbar_0..tbar_K).
    """
    hol, anti = _components(times, reduction.order)
    return lhs_from_table(hol, anti, reduction.table(y))


@dataclass(frozen=True)
class HodographRoot:
    y: float
    re_residual: float
    im_residual: float
    iterations: int

    def __float__(self):
        return self.y


def scan(times, profile, reduction, bracket, n=100):
    """Table of (y, Re(lhs) - Phi) on ``n`` equispaced points of ``bracket``."""
    ys = np.linspace(bracket[0], bracket[1], n)
    hol, anti = _components(times, reduction.order)
    return [(float(y), lhs_from_table(hol, anti, reduction.table(y)).real - profile(y)) for y in ys]


def solve(
    times,
    profile,
    reduction,
    bracket=None,
    *,
    seed=None,
    tol=defaults.ROOT_TOL,
    max_iter=defaults.NEWTON_MAX_ITER,
):
    """Root y* of Re(hodograph_lhs(times, y)) = Phi(y).

    Safeguarded Newton iteration with a centered finite-difference slope and
    bisection fallback. Once the residual is below ``tol`` the iterate is
    polished until Newton steps stop shrinking, so that downstream finite
    differences in the times see a root accurate to rounding.

    Raises
    ------
    NoBracketError
        ``bracket`` has no sign change and no ``seed`` was supplied.
    MaxIterError
        No convergence within ``max_iter`` iterations.
    """
    hol, anti = _components(times, reduction.order)
    lo_r, hi_r = reduction.y_range

    def F(y):
        val = lhs_from_table(hol, anti, reduction.table(y))
        return val.real - profile(y), val.imag

    if bracket is not None:
        a, b = sorted(map(float, bracket))
        if a < lo_r or b > hi_r:
            raise RangeError(f"bracket [{a}, {b}] leaves the reduction range [{lo_r}, {hi_r}]")
        fa, fb = F(a)[0], F(b)[0]
        bracketed = fa * fb <= 0
        if not bracketed and seed is None:
            raise NoBracketError(f"Re residual does not change sign on [{a}, {b}] ({fa:.3e}, {fb:.3e})")
        if fa == 0.0:
            return HodographRoot(a, 0.0, F(a)[1], 0)
        if fb == 0.0:
            return HodographRoot(b, 0.0, F(b)[1], 0)
    else:
        if seed is None:
            raise NoBracketError("need a bracket or a seed")
        a, b = lo_r, hi_r
        bracketed = False
        fa = fb = None

    y = float(seed) if seed is not None else 0.5 * (a + b)
    y = min(max(y, a), b)
    fy, _ = F(y)
    last_step = math.inf
    for it in range(1, max_iter + 1):
        h = 1e-6 * (1.0 + abs(y))
        y_m, y_p = max(y - h, lo_r), min(y + h, hi_r)
        slope = (F(y_p)[0] - F(y_m)[0]) / (y_p - y_m)
        if bracketed and abs(fy) >= tol:
            if (fy < 0) == (fa < 0):
                a, fa = y, fy
            else:
                b, fb = y, fy
        step = -fy / slope if slope != 0 else math.inf
        y_new = y + step
        if bracketed and not (a <= y_new <= b):
            y_new = 0.5 * (a + b)
            step = y_new - y
        elif not bracketed:
            y_new = min(max(y_new, a), b)
            step = y_new - y
        if abs(fy) < tol and abs(step) >= 0.5 * last_step:
            # polished: Newton steps no longer contract
            return HodographRoot(y, fy, F(y)[1], it)
        last_step = abs(step)
        y = y_new
        fy, _ = F(y)
        if fy == 0.0 or (abs(fy) < tol and abs(step) <= 4 * np.finfo(float).eps * (1 + abs(y))):
            return HodographRoot(y, fy, F(y)[1], it)
    raise MaxIterError(f"hodograph solve did not converge in {max_iter} iterations (y={y}, residual={fy:.3e})")


# --------------------------------------------------------------------------
# finite-difference verification of the hydrodynamic equations


def _perturbed(hol, anti, slot, idx, delta):
    hol, anti = hol.copy(), anti.copy()
    if slot == "hol":
        hol[idx] += delta
    else:
        anti[idx] += delta
    return hol, anti


def _root_at(hol, anti, profile, reduction, bracket, seed):
    return solve((hol, anti), profile, reduction, bracket, seed=seed).y


def wirtinger_derivative(times, slot, idx, profile, reduction, bracket, h, *, seed=None):
    """Centered-difference estimate of dy/dt (slot 'hol') or dy/dtbar (slot 'anti')."""
    hol, anti = _components(times, reduction.order)
    vals = {}
    for key, delta in (("re+", h), ("re-", -h), ("im+", 1j * h), ("im-", -1j * h)):
        vals[key] = _root_at(*_perturbed(hol, anti, slot, idx, delta), profile, reduction, bracket, seed)
    d_re = (vals["re+"] - vals["re-"]) / (2 * h)
    d_im = (vals["im+"] - vals["im-"]) / (2 * h)
    return 0.5 * (d_re - 1j * d_im)


def node_residuals(times, profile, reduction, bracket, h):
    """L9 and L11 residuals at one node of the times grid.

    Returns ``(root, residuals)`` with residual names ``L9_t<k>``,
    ``L9_tbar<k>`` (k = 1..K) and ``L11``.
    """
    hol, anti = _components(times, reduction.order)
    K = hol.size - 1
    root = solve((hol, anti), profile, reduction, bracket)
    y = root.y
    table = reduction.table(y)
    D = {
        (slot, k): wirtinger_derivative((hol, anti), slot, k, profile, reduction, bracket, h, seed=y)
        for slot in ("hol", "anti")
        for k in range(K + 1)
    }
    d0 = D[("hol", 0)]
    out = {}
    for k in range(1, K + 1):
        out[f"L9_t{k}"] = abs(D[("hol", k)] - table.phi[k] * d0) / abs(d0)
        out[f"L9_tbar{k}"] = abs(D[("anti", k)] - table.psi[k] * d0) / abs(d0)
    tau = complex(0.0, y)
    sp_xi = elliptic.s_prime(table.xi, tau)
    sp_xib = elliptic.s_prime(table.xibar, tau)
    a, b = sp_xib * d0, sp_xi * D[("anti", 0)]
    out["L11"] = abs(a + b) / (abs(a) + abs(b))
    return root, out


def mixed_derivative(times, j, k, profile, reduction, bracket, h_outer, h_inner, *, seed=None):
    """d^2 y / dt_j dt_k by nesting centered differences (outer in t_j)."""
    hol, anti = _components(times, reduction.order)
    total = 0j
    for dj, wj in ((1.0, 1.0), (1j, -1j)):
        for dk, wk in ((1.0, 1.0), (1j, -1j)):
            acc = 0.0
            for sj in (1, -1):
                for sk in (1, -1):
                    hh, aa = _perturbed(hol, anti, "hol", j, sj * h_outer * dj)
                    hh, aa = _perturbed(hh, aa, "hol", k, sk * h_inner * dk)
                    acc += sj * sk * _root_at(hh, aa, profile, reduction, bracket, seed)
            total += 0.25 * wj * wk * acc / (4 * h_outer * h_inner)
    return total


def cross_symmetry(times, j, k, profile, reduction, bracket, h):
    """Relative mismatch between the two nestings of d^2 y / dt_j dt_k.

    The outer difference uses step 2h and the inner one h, so the stencils
    differ and their agreement is O(h^2).
    """
    y = solve(times, profile, reduction, bracket).y
    a = mixed_derivative(times, j, k, profile, reduction, bracket, 2 * h, h, seed=y)
    b = mixed_derivative(times, k, j, profile, reduction, bracket, 2 * h, h, seed=y)
    return abs(a - b) / max(abs(a), abs(b))


def _order(coarse, fine):
    if coarse <= 0 or fine <= 0:
        return math.nan
    return math.log2(coarse / fine)


def hydrodynamic_residuals(times_grid, profile, reduction, bracket, h=1e-2, *, tol_factor=None):
    """L9/L11 residuals over a grid of times at steps ``h`` and ``h/2``.

    Returns ``(report, rows)``. ``rows`` carry, per node, the encoded times,
    the root and its residuals; the report has one entry per equation with the
    maxima at both steps and the observed convergence order
    log2(max_h / max_{h/2}). With ``tol_factor`` set an entry passes when its
    maximum at ``h/2`` is below ``tol_factor * (h/2)**2``.
    """
    rows = []
    per = {}
    for times in times_grid:
        root, r1 = node_residuals(times, profile, reduction, bracket, h)
        _, r2 = node_residuals(times, profile, reduction, bracket, h / 2)
        rows.append({"times": times, "root": root, "coarse": r1, "fine": r2})
        for name in r1:
            per.setdefault(name, ([], []))
            per[name][0].append(r1[name])
            per[name][1].append(r2[name])
    report = ResidualReport(meta={"h": h, "nodes": len(rows)})
    tol = math.inf if tol_factor is None else tol_factor * (h / 2) ** 2
    for name, (coarse, fine) in per.items():
        report.add(
            name,
            fine,
            tol,
            max_coarse=max(coarse),
            order=_order(max(coarse), max(fine)),
            node_orders=[_order(c, f) for c, f in zip(coarse, fine)],
        )
    return report, rows
