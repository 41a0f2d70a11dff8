"""Command-line front end.

Subcommands: ``theta``, ``verify``, ``loewner``, ``faber`` and ``hodograph``.

Exit codes are the same for every subcommand: 0 on success, 1 when an
identity or tolerance check fails, 2 for invalid input and 3 for a numerical
failure. Complex numbers are written ``a+bi`` on the command line and
``{"re": a, "im": b}`` in JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import re
import sys
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import defaults, faber, hodograph, loewner, verify
from .errors import BlowUpError, InputError, NoBracketError, NumericalError, PoleError
from .report import ResidualReport
from .theta import theta

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3

_COMPLEX_RE = re.compile(r"^[0-9eE.+\-ij\s]+$")


def parse_complex(text):
    """Parse ``a+bi`` (``j`` is accepted too) into a complex number."""
    s = str(text).strip().replace(" ", "")
    if not s or not _COMPLEX_RE.match(s):
        raise InputError(f"not a complex number: {text!r}")
    s = s.replace("i", "j")
    if s.endswith("j") and s[:-1] in ("", "+", "-"):
        s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError:
        raise InputError(f"not a complex number: {text!r}") from None


def cjson(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True)


# --------------------------------------------------------------------------
# config schemas


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CNumber(_Strict):
    re: float
    im: float = 0.0

    def value(self):
        return complex(self.re, self.im)


Complexish = Union[float, CNumber]


def _c(x):
    return x.value() if isinstance(x, CNumber) else complex(x)


class InitialSpec(_Strict):
    y: float
    eta: float
    coeffs: list[Complexish] = Field(default_factory=lambda: [1.0])
    points: dict[str, Complexish] = Field(default_factory=dict)

    def state(self, order=None):
        c = [_c(x) for x in self.coeffs]
        if order is not None:
            if order < len(c):
                raise InputError(f"order {order} is below the number of initial coefficients {len(c)}")
            c = c + [0j] * (order - len(c))
        return loewner.ReductionState.initial(self.y, self.eta, c, {k: _c(v) for k, v in self.points.items()})


class LoewnerConfig(_Strict):
    kappa: dict
    initial: InitialSpec
    y_end: float
    samples: int = Field(51, ge=2)
    order: Optional[int] = Field(None, ge=1, le=defaults.MAX_SERIES_ORDER)
    rtol: float = Field(defaults.ODE_RTOL, gt=0)
    atol: Optional[float] = Field(None, gt=0)
    residual_samples: int = Field(11, ge=1)
    tol: float = Field(1e-8, gt=0)
    pole_guard: float = Field(defaults.POLE_GUARD, gt=0)
    seed: Optional[int] = None
    csv: Optional[str] = None
    report: Optional[str] = None


class TimesSpec(_Strict):
    t0: float
    t: list[Complexish] = Field(default_factory=list)


class HodographConfig(_Strict):
    kappa: dict
    initial: InitialSpec
    y_end: float
    order: Optional[int] = Field(None, ge=0, le=defaults.MAX_SERIES_ORDER)
    rtol: float = Field(1e-11, gt=0)
    profile: dict
    times: TimesSpec
    grid: dict[str, list[float]] = Field(default_factory=dict)
    bracket: tuple[float, float]
    h: float = Field(1e-3, gt=0)
    tol_factor: float = Field(1e4, gt=0)
    cross_symmetry: list[tuple[int, int]] = Field(default_factory=list)
    form: str = "operational"
    seed: Optional[int] = None
    csv: Optional[str] = None
    report: Optional[str] = None


DEFAULT_LOEWNER = {
    "kappa": {"kind": "sinusoid", "offset": 0.05, "amplitude": 0.1, "frequency": 0.7, "phase": 0.0},
    "initial": {
        "y": 1.5,
        "eta": 0.6,
        "coeffs": [{"re": 1.0, "im": 0.0}, {"re": 0.3, "im": 0.2}, {"re": 0.0, "im": -0.1}],
        "points": {"a": {"re": 3.0, "im": 1.0}, "b": {"re": -2.5, "im": 2.0}},
    },
    "y_end": 0.5,
    "samples": 51,
}


def load_config(path, model):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path!r} is not valid JSON: {exc}") from None
    return validate_config(data, model)


def validate_config(data, model):
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise InputError(f"invalid config:\n{exc}") from None


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


# --------------------------------------------------------------------------
# subcommands


def cmd_theta(args, out):
    value = theta(args.a, parse_complex(args.u), parse_complex(args.tau), args.du)
    print(json.dumps(cjson(value)), file=out)
    return EXIT_OK


def cmd_verify(args, out):
    report = verify.run(args.suite, args.samples, args.seed, tol=args.tol, plant_pole=args.plant_pole)
    for line in report.summary_lines():
        print(line, file=out)
    if args.report:
        _write(args.report, report.to_json() + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def _probe_points(state):
    # identity checks need two points and one barred point; unmarked runs use
    # the series at fixed spectral points
    if len(state.u) >= 2:
        return state.u[0], state.u[1], state.ubar[0]
    if len(state.u) == 1:
        return state.u[0], state.u[0], state.ubar[0]
    z1, z2 = 3.0 + 1.0j, -2.5 + 2.0j
    return state.series(z1), state.series(z2), state.series_bar(np.conj(z1))


def cmd_loewner(args, out):
    cfg = load_config(args.config, LoewnerConfig) if args.config else validate_config(DEFAULT_LOEWNER, LoewnerConfig)
    csv_path = args.csv or cfg.csv
    report_path = args.report or cfg.report
    kappa = loewner.DrivingFunction.from_dict(cfg.kappa)
    initial = cfg.initial.state(cfg.order)
    meta = {"y_start": cfg.initial.y, "y_end": cfg.y_end, "kappa": kappa.to_dict(), "seed": cfg.seed}
    try:
        traj = loewner.integrate(
            initial,
            kappa,
            cfg.y_end,
            rtol=cfg.rtol,
            atol=cfg.atol,
            samples=cfg.samples,
            pole_guard=cfg.pole_guard,
        )
    except BlowUpError as exc:
        report = ResidualReport(meta={**meta, "error": str(exc), "last_good_y": exc.y})
        if report_path:
            _write(report_path, report.to_json() + "\n")
        raise
    text = traj.to_csv(csv_path)
    if not csv_path:
        out.write(text)
    report = ResidualReport(meta={**meta, "n_steps": traj.n_steps})
    vals = {name: [] for name in loewner.AP_NAMES}
    rejected = 0
    for y in np.linspace(cfg.initial.y, cfg.y_end, cfg.residual_samples):
        st = traj.state_at(y)
        u1, u2, ub1 = _probe_points(st)
        try:
            r = loewner.reduction_identity_residuals(
                st.eta, kappa(st.y), u1, u2, ub1, st.tau, pole_guard=cfg.pole_guard
            )
        except PoleError:
            # e.g. eta = 1, where S(eta) sits on a theta_1 zero
            rejected += 1
            continue
        for name in loewner.AP_NAMES:
            vals[name].append(r[name])
    for name in loewner.AP_NAMES:
        if vals[name]:
            report.add(name, vals[name], cfg.tol, rejected=rejected)
        else:
            report.add(name, [], cfg.tol, rejected=rejected, informational=True, note="no admissible probe")
    etas = [s.eta for s in traj]
    report.add("eta_drift", [abs(e - etas[0]) for e in etas], math.inf, informational=True)
    if report_path:
        _write(report_path, report.to_json() + "\n")
    summary = sys.stderr if not csv_path else out
    for line in report.summary_lines():
        print(line, file=summary)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_faber(args, out):
    coeffs = [parse_complex(c) for c in args.coeffs.split(",")]
    tau = parse_complex(args.tau)
    if args.eta is None:
        fn = faber.faber_coeffs if args.form == "operational" else faber.faber_prime_coeffs
        res = fn(coeffs, parse_complex(args.v), tau, order=args.order)
        print(_dumps(res.to_dict()), file=out)
        return EXIT_OK
    if abs(tau.real) > defaults.PURE_IMAG_TOL:
        raise InputError("velocities need a purely imaginary tau")
    state = loewner.ReductionState.initial(tau.imag, args.eta, coeffs)
    table = faber.velocities(state, args.kappa, args.order, form=args.form)
    print(_dumps(table.to_dict()), file=out)
    return EXIT_OK


def _axis_index(name, K):
    if name == "t0":
        return 0
    m = re.fullmatch(r"(re|im)_t(\d+)", name)
    if not m or not 1 <= int(m.group(2)) <= K:
        raise InputError(f"unknown grid axis {name!r}")
    k = int(m.group(2))
    return 2 * k - 1 if m.group(1) == "re" else 2 * k


def _times_grid(base, axes):
    enc = base.to_real()
    names = list(axes)
    idx = [_axis_index(n, base.K) for n in names]
    grid = []
    for offsets in itertools.product(*(axes[n] for n in names)):
        row = enc.copy()
        for i, d in zip(idx, offsets):
            row[i] += d
        grid.append(hodograph.TimesVector.from_real(row))
    return grid


def cmd_hodograph(args, out):
    cfg = load_config(args.config, HodographConfig)
    csv_path = args.csv or cfg.csv
    report_path = args.report or cfg.report
    kappa = loewner.DrivingFunction.from_dict(cfg.kappa)
    initial = cfg.initial.state()
    base = hodograph.TimesVector(cfg.times.t0, [_c(x) for x in cfg.times.t])
    order = base.K if cfg.order is None else cfg.order
    reduction = hodograph.Reduction.build(initial, kappa, cfg.y_end, order, rtol=cfg.rtol, form=cfg.form)
    prof = dict(cfg.profile)
    if prof.get("kind") == "planted":
        if set(prof) != {"kind", "y0"}:
            raise InputError("a planted profile takes exactly the key 'y0'")
        y0 = float(prof["y0"])
        profile = hodograph.ProfileFunction.constant(hodograph.hodograph_lhs(base, y0, reduction).real)
    else:
        profile = hodograph.ProfileFunction.from_dict(prof)
    grid = _times_grid(base, cfg.grid) if cfg.grid else [base]
    try:
        report, rows = hodograph.hydrodynamic_residuals(
            grid, profile, reduction, cfg.bracket, cfg.h, tol_factor=cfg.tol_factor
        )
    except NoBracketError:
        print("y,re_residual", file=sys.stderr)
        for y, r in hodograph.scan(base, profile, reduction, cfg.bracket):
            print(f"{y!r},{r!r}", file=sys.stderr)
        raise
    report.meta.update({"kappa": kappa.to_dict(), "order": order, "bracket": list(cfg.bracket), "seed": cfg.seed})
    roots = [r["root"] for r in rows]
    report.add("root_residual", [abs(r.re_residual) for r in roots], defaults.ROOT_TOL)
    report.add("imag_residual", [abs(r.im_residual) for r in roots], math.inf, informational=True)
    if prof.get("kind") == "planted":
        y_base = hodograph.solve(base, profile, reduction, cfg.bracket).y
        report.add("planted_root", [abs(y_base - float(prof["y0"]))], defaults.ROOT_TOL)
    for j, k in cfg.cross_symmetry:
        if not (0 <= j <= base.K and 0 <= k <= base.K):
            raise InputError(f"cross_symmetry indices ({j}, {k}) out of range")
        coarse = [hodograph.cross_symmetry(t, j, k, profile, reduction, cfg.bracket, cfg.h) for t in grid]
        fine = [hodograph.cross_symmetry(t, j, k, profile, reduction, cfg.bracket, cfg.h / 2) for t in grid]
        report.add(
            f"cross_t{j}_t{k}",
            fine,
            cfg.tol_factor * (cfg.h / 2) ** 2,
            max_coarse=max(coarse),
            order=math.log2(max(coarse) / max(fine)) if min(coarse + fine) > 0 else math.nan,
        )

    names = list(rows[0]["fine"])
    header = ["t0"] + [f"{p}_t{k}" for k in range(1, base.K + 1) for p in ("re", "im")]
    header += ["y_star", "re_residual", "im_residual"] + names
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        root = row["root"]
        vals = list(row["times"].to_real()) + [root.y, root.re_residual, root.im_residual]
        vals += [row["fine"][n] for n in names]
        w.writerow([repr(float(v)) for v in vals])
    if csv_path:
        _write(csv_path, buf.getvalue())
    else:
        out.write(buf.getvalue())
    if report_path:
        _write(report_path, report.to_json() + "\n")
    summary = sys.stderr if not csv_path else out
    for line in report.summary_lines():
        print(line, file=summary)
    return EXIT_OK if report.passed else EXIT_FAIL


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser():
    p = _Parser(prog="elliptic-loewner", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("theta", help="evaluate a theta function")
    t.add_argument("--a", type=int, required=True, choices=(1, 2, 3, 4))
    t.add_argument("--u", required=True)
    t.add_argument("--tau", required=True)
    t.add_argument("--du", type=int, default=0)
    t.set_defaults(func=cmd_theta)

    v = sub.add_parser("verify", help="run randomized identity suites")
    v.add_argument("--suite", default="all", choices=("all",) + verify.SUITE_ORDER)
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--tol", type=float, default=None, help="override every suite tolerance")
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--plant-pole", action="store_true", help="start every sample at a pole-adjacent point")
    v.set_defaults(func=cmd_verify)

    lo = sub.add_parser("loewner", help="integrate a reduction")
    lo.add_argument("--config", help="JSON run configuration (built-in default if omitted)")
    lo.add_argument("--csv", help="trajectory CSV path (stdout if omitted)")
    lo.add_argument("--report", help="residual report JSON path")
    lo.set_defaults(func=cmd_loewner)

    f = sub.add_parser("faber", help="elliptic Faber coefficients or velocities")
    f.add_argument("--coeffs", required=True, help="comma separated c_1,...,c_N")
    f.add_argument("--v", default="0", help="base point (coefficients mode)")
    f.add_argument("--tau", required=True)
    f.add_argument("--order", type=int, default=None)
    f.add_argument("--form", default="operational", choices=("operational", "generating"))
    f.add_argument("--eta", type=float, default=None, help="switch to velocities at this eta")
    f.add_argument("--kappa", type=float, default=0.0)
    f.set_defaults(func=cmd_faber)

    h = sub.add_parser("hodograph", help="solve the hodograph relation on a grid of times")
    h.add_argument("--config", required=True)
    h.add_argument("--csv", help="grid CSV path (stdout if omitted)")
    h.add_argument("--report", help="residual report JSON path")
    h.set_defaults(func=cmd_hodograph)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
