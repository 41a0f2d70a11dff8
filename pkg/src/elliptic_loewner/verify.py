"""Randomized identity suites.

Each suite draws samples from a generator seeded by ``(seed, sample index)``,
evaluates one or more residuals per sample and summarizes them in a
:class:`~elliptic_loewner.report.ResidualReport`. Samples that hit the pole
guard (or a degenerate quotient) are rejected and redrawn from the same
per-sample generator, so the output does not depend on how samples are
distributed over workers.

The worker count comes from ``ELL_LOEWNER_THREADS`` (default 1).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import curve, elliptic, loewner
from .errors import DegenerateError, InputError, NumericalError, PoleError
from .report import ResidualReport
from .theta import theta, theta_constants, theta_tau_derivative

MAX_ATTEMPTS = 100
THREADS_ENV = "ELL_LOEWNER_THREADS"

_PI = math.pi


def worker_count():
    """Worker cap from ``ELL_LOEWNER_THREADS``; invalid values mean 1."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


# --------------------------------------------------------------------------
# samplers: rng -> tuple of arguments


def _y(rng, lo=0.3, hi=2.5):
    return float(rng.uniform(lo, hi))


def _u(rng, y):
    # a point of the fundamental cell [0,1) x [-y/2, y/2)
    return complex(rng.uniform(0.0, 1.0), rng.uniform(-0.5, 0.5) * y)


def _sample_theta(rng):
    y = _y(rng)
    return (1j * y, _u(rng, y))


def _sample_point(rng):
    y = _y(rng)
    return (_u(rng, y), 1j * y)


def _sample_pair(rng):
    y = _y(rng)
    return (_u(rng, y), _u(rng, y), 1j * y)


def _sample_curve(rng):
    y = _y(rng, 0.5, 2.5)
    eta = float(rng.uniform(0.05, 0.95))
    return (eta, 1j * y, _u(rng, y), _u(rng, y))


def _sample_ap(rng):
    y = _y(rng, 0.5, 2.0)
    eta = float(rng.uniform(0.05, 0.95))
    kappa = float(rng.uniform(-0.4, 0.4) * y)
    return (eta, kappa, _u(rng, y), _u(rng, y), _u(rng, y), 1j * y)


# --------------------------------------------------------------------------
# evaluators: args -> {name: residual}


def _eval_theta(tau, u):
    th2, th3, th4 = theta_constants(tau)
    out = {"theta1prime": _rel(theta(1, 0.0, tau, 1), _PI * th2 * th3 * th4)}
    heat = parity = quasi = 0.0
    q = np.exp(-1j * _PI * tau - 2j * _PI * u)
    for a, e1, e2 in ((1, -1, -1), (2, -1, 1), (3, 1, 1), (4, 1, -1)):
        heat = max(heat, _rel(theta_tau_derivative(a, u, tau), theta(a, u, tau, 2) / (4j * _PI)))
        t = theta(a, u, tau)
        parity = max(parity, _rel(theta(a, -u, tau), -t if a == 1 else t))
        quasi = max(quasi, _rel(theta(a, u + 1, tau), e1 * t), _rel(theta(a, u + tau, tau), e2 * q * t))
    out["heat"] = heat
    out["parity"] = parity
    out["quasi_period"] = quasi
    return out


def _eval_ss2(u, tau):
    return {"ss2": elliptic.identity_residual_ss2(u, tau)}


def _eval_ss3(x1, x2, tau):
    return {"ss3": elliptic.identity_residual_ss3(x1, x2, tau)}


def _eval_landen(u, tau):
    return {"landen": elliptic.landen_residual(u, tau)}


def _eval_sprime(u, tau):
    r = elliptic.sprime_form_residuals(u, tau)
    return {"sprime_theta1_theta4": r["theta1_theta4"], "sprime_theta1_theta2": r["theta1_theta2"]}


def _eval_curve(eta, tau, u, _):
    params = curve.curve_params(eta, tau)
    vals = curve.curve_point(u, params)
    return {"t3": curve.residual_t3(vals, params), "t6": curve.residual_t6(vals, params)}


def _eval_quotient(eta, tau, u1, u2):
    params = curve.curve_params(eta, tau)
    return {
        "quotient": curve.quotient_identity_residuals(u1, u2, params),
        "quotient_mixed": curve.quotient_identity_residuals(u1, u2, params, mixed=True),
    }


def _eval_ap(eta, kappa, u1, u2, ubar1, tau):
    return loewner.reduction_identity_residuals(eta, kappa, u1, u2, ubar1, tau)


@dataclass(frozen=True)
class Suite:
    """A sampler, an evaluator, default tolerances and a pole-adjacent sample."""

    name: str
    sampler: Callable
    evaluate: Callable
    tols: dict
    planted: tuple | None = None
    informational: tuple = ()


_G = 1e-9  # offset of planted samples from a theta zero, well inside the guard

SUITES = {
    "theta": Suite(
        "theta",
        _sample_theta,
        _eval_theta,
        {"theta1prime": 1e-12, "heat": 1e-11, "parity": 1e-12, "quasi_period": 1e-12},
    ),
    "ss2": Suite("ss2", _sample_point, _eval_ss2, {"ss2": 1e-10}, planted=(_G + 0j, 1j)),
    "ss3": Suite("ss3", _sample_pair, _eval_ss3, {"ss3": 1e-10}, planted=(0.3 + 0.1j, 0.3 + 0.1j + _G, 1j)),
    "curve": Suite(
        "curve", _sample_curve, _eval_curve, {"t3": 1e-11, "t6": 1e-11}, planted=(0.4, 1j, _G + 0j, 0.2 + 0j)
    ),
    "quotient": Suite(
        "quotient",
        _sample_curve,
        _eval_quotient,
        {"quotient": 1e-10, "quotient_mixed": 1e-10},
        planted=(0.4, 1j, -0.4 + _G + 0j, 0.1 + 0.2j),
    ),
    "ap": Suite(
        "ap",
        _sample_ap,
        _eval_ap,
        {name: 1e-10 for name in loewner.AP_NAMES},
        planted=(0.6, 0.1, -0.3 - 0.1j + _G, 0.2 + 0.1j, 0.1 - 0.2j, 1j),
    ),
    "landen": Suite("landen", _sample_point, _eval_landen, {"landen": 1e-12}, planted=(_G + 0j, 1j)),
    "sprime": Suite(
        "sprime",
        _sample_point,
        _eval_sprime,
        {"sprime_theta1_theta4": 1e-11, "sprime_theta1_theta2": 1e-11},
        planted=(_G + 0j, 1j),
        informational=("sprime_theta1_theta2",),
    ),
}

SUITE_ORDER = ("theta", "ss2", "ss3", "curve", "quotient", "ap", "landen", "sprime")


def _one_sample(suite, seed, index, plant_pole):
    rng = np.random.default_rng([seed, index])
    rejected = 0
    for attempt in range(MAX_ATTEMPTS):
        if plant_pole and attempt == 0 and suite.planted is not None:
            args = suite.planted
        else:
            args = suite.sampler(rng)
        try:
            return suite.evaluate(*args), rejected
        except (PoleError, DegenerateError):
            rejected += 1
    raise NumericalError(f"suite {suite.name}: sample {index} rejected {MAX_ATTEMPTS} times")


def run_suite(name, samples, seed, *, tol=None, workers=None, plant_pole=False):
    """Run one suite and return its report.

    Parameters
    ----------
    name : str
        A key of :data:`SUITES`.
    samples : int
        Number of accepted samples.
    seed : int
        Master seed; sample ``i`` uses ``default_rng([seed, i])``.
    tol : float, optional
        Overrides every default tolerance of the suite.
    workers : int, optional
        Thread count (default from ``ELL_LOEWNER_THREADS``).
    plant_pole : bool
        Replace the first draw of every sample by a pole-adjacent point, to
        exercise rejection and resampling.
    """
    suite = SUITES[name]
    if samples < 1:
        raise InputError("samples must be positive")
    workers = worker_count() if workers is None else max(1, int(workers))

    def job(i):
        return _one_sample(suite, seed, i, plant_pole)

    if workers == 1:
        results = [job(i) for i in range(samples)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(job, range(samples)))

    rejected = sum(r for _, r in results)
    report = ResidualReport(meta={"suite": name, "samples": samples, "seed": seed})
    for key, default_tol in suite.tols.items():
        vals = [res[key] for res, _ in results]
        report.add(
            key,
            vals,
            default_tol if tol is None else tol,
            attempted=samples + rejected,
            rejected=rejected,
            informational=key in suite.informational,
        )
    return report


def run(suites, samples, seed, *, tol=None, workers=None, plant_pole=False):
    """Run several suites ("all" expands to every suite) into one report."""
    if isinstance(suites, str):
        suites = [suites]
    names = []
    for s in suites:
        names.extend(SUITE_ORDER if s == "all" else [s])
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise InputError(f"unknown suite(s): {', '.join(unknown)}")
    report = ResidualReport(meta={"suites": names, "samples": samples, "seed": seed, "tol": tol})
    for s in names:
        report.merge(run_suite(s, samples, seed, tol=tol, workers=workers, plant_pole=plant_pole))
    return report


__all__ = ["SUITES", "SUITE_ORDER", "Suite", "run", "run_suite", "worker_count"]
