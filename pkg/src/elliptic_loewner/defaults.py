"""Central table of numerical defaults.

Every tolerance used by the library and the CLI is listed here so that a run
can be reproduced from its config alone.

=====================  ===========  ==========================================
name                   value        meaning
=====================  ===========  ==========================================
``Y_MIN``              0.05         lower bound on Im(tau)
``POLE_GUARD``         1e-3         minimum distance to a theta zero lattice
``SERIES_REL_TOL``     1e-17        q-series truncation threshold
``SERIES_MAX_TERMS``   200          q-series hard cap
``PURE_IMAG_TOL``      1e-14        |Re tau| allowed for purely imaginary tau
``REALITY_TOL``        1e-12        imaginary part tolerated in real outputs
``DEGENERATE_TOL``     1e-10        |1 - P1 P2| below which quotients refuse
``ODE_RTOL``           1e-10        Loewner integrator relative tolerance
``ODE_H_MIN``          1e-12        smallest allowed integrator step
``ODE_MAX_HALVINGS``   40           pole-driven step halvings before blow-up
``MAX_SERIES_ORDER``   16           largest Laurent/Taylor truncation order
``SPRIME_MIN``         1e-10        |S'(xi)| below which velocities refuse
``NEWTON_MAX_ITER``    100          hodograph root finder iteration cap
``ROOT_TOL``           1e-10        hodograph residual tolerance
``IDENTITY_TOL``       1e-10        default pass threshold for identity suites
=====================  ===========  ==========================================
"""

Y_MIN = 0.05
POLE_GUARD = 1e-3
SERIES_REL_TOL = 1e-17
SERIES_MAX_TERMS = 200
PURE_IMAG_TOL = 1e-14
REALITY_TOL = 1e-12
DEGENERATE_TOL = 1e-10
ODE_RTOL = 1e-10
ODE_H_MIN = 1e-12
ODE_MAX_HALVINGS = 40
MAX_SERIES_ORDER = 16
SPRIME_MIN = 1e-10
NEWTON_MAX_ITER = 100
ROOT_TOL = 1e-10
IDENTITY_TOL = 1e-10

TABLE = {
    "y_min": Y_MIN,
    "pole_guard": POLE_GUARD,
    "series_rel_tol": SERIES_REL_TOL,
    "series_max_terms": SERIES_MAX_TERMS,
    "pure_imag_tol": PURE_IMAG_TOL,
    "reality_tol": REALITY_TOL,
    "degenerate_tol": DEGENERATE_TOL,
    "ode_rtol": ODE_RTOL,
    "ode_h_min": ODE_H_MIN,
    "ode_max_halvings": ODE_MAX_HALVINGS,
    "max_series_order": MAX_SERIES_ORDER,
    "sprime_min": SPRIME_MIN,
    "newton_max_iter": NEWTON_MAX_ITER,
    "root_tol": ROOT_TOL,
    "identity_tol": IDENTITY_TOL,
}
