"""scikit-learn style front end for the hodograph solution.

``fit`` integrates the reduction once; ``predict`` maps rows of encoded times
``[t0, re t1, im t1, ..., re tK, im tK]`` to the root y* = Im tau*.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .hodograph import ProfileFunction, Reduction, TimesVector, solve
from .loewner import DrivingFunction, ReductionState


class HodographSolver(BaseEstimator):
    """Solve the hodograph relation for y on a precomputed reduction.

    Parameters
    ----------
    kappa : dict
        Driving function spec, e.g. ``{"kind": "constant", "value": 0.0}``.
    coeffs : sequence of complex
        Initial Laurent tail c_1..c_N of the reduction.
    eta0 : float
        Initial eta.
    y_start, y_end : float
        Integration range in y = Im tau.
    order : int, optional
        Velocity order K (defaults to the series order).
    profile : dict or float
        Profile spec for :class:`ProfileFunction`, or a constant.
    bracket : tuple of float, optional
        Search interval; defaults to the full reduction range.
    rtol : float
        Integrator tolerance.
    """

    def __init__(
        self,
        kappa=None,
        coeffs=(1.0,),
        eta0=0.5,
        y_start=1.5,
        y_end=0.5,
        order=None,
        profile=0.0,
        bracket=None,
        rtol=1e-11,
    ):
        self.kappa = kappa
        self.coeffs = coeffs
        self.eta0 = eta0
        self.y_start = y_start
        self.y_end = y_end
        self.order = order
        self.profile = profile
        self.bracket = bracket
        self.rtol = rtol

    def _profile(self):
        if isinstance(self.profile, dict):
            return ProfileFunction.from_dict(self.profile)
        return ProfileFunction.constant(float(self.profile))

    def fit(self, X=None, y=None):
        """Integrate the reduction. ``X`` and ``y`` are ignored."""
        kappa = DrivingFunction.from_dict(self.kappa or {"kind": "constant", "value": 0.0})
        state = ReductionState.initial(self.y_start, self.eta0, list(self.coeffs))
        order = len(self.coeffs) if self.order is None else int(self.order)
        self.reduction_ = Reduction.build(state, kappa, self.y_end, order, rtol=self.rtol)
        self.profile_ = self._profile()
        self.n_features_in_ = 2 * order + 1
        return self

    def predict(self, X):
        """Root y* for each row of encoded times."""
        check_is_fitted(self, "reduction_")
        X = check_array(X, dtype=float)
        if X.shape[1] % 2 != 1 or X.shape[1] > self.n_features_in_:
            raise ValueError(f"rows must have an odd length <= {self.n_features_in_}, got {X.shape[1]}")
        bracket = self.reduction_.y_range if self.bracket is None else tuple(self.bracket)
        return np.array(
            [solve(TimesVector.from_real(row), self.profile_, self.reduction_, bracket).y for row in X]
        )
