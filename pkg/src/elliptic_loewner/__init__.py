"""Elliptic Loewner reductions of the dispersionless Pfaff-Toda hierarchy.

Modules
-------
theta      Jacobi theta functions and their derivatives
elliptic   the S-function, E-functions and identity residuals
curve      uniformized spectral curve
loewner    Loewner flow of a one-variable reduction
faber      elliptic Faber coefficients and velocities
hodograph  hodograph solution and hydrodynamic checks
verify     randomized identity suites
cli        command-line front end
"""

from .curve import CurveParams, curve_params, curve_point
from .elliptic import e_combined, s_eval, s_prime
from .errors import (
    BlowUpError,
    DegenerateError,
    DomainError,
    EllipticLoewnerError,
    InputError,
    MaxIterError,
    NoBracketError,
    NumericalError,
    PoleError,
    RangeError,
    RealityError,
    StepSizeError,
    TruncationError,
)
from .faber import faber_coeffs, velocities
from .hodograph import ProfileFunction, Reduction, TimesVector, hodograph_lhs, solve
from .loewner import DrivingFunction, LaurentTailSeries, ReductionState, integrate
from .report import ResidualReport
from .theta import ModularParam, ModularPoint, theta, theta_derivatives, theta_tau_derivative

__version__ = "0.1.0"
