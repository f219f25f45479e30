"""scikit-learn style wrappers: fit on a profile, predict k from polar indices m."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .cavity import classify, profile_from_dict
from .errors import PreconditionError


def _as_m(X):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    m = X.reshape(-1) if X.ndim == 1 or X.shape[1] == 1 else None
    if m is None:
        raise PreconditionError("X must hold a single column of polar indices m")
    if np.any(m < 1) or np.any(m != np.round(m)):
        raise PreconditionError("polar indices must be integers >= 1")
    return m.astype(int)


class AsymptoticResonance(BaseEstimator, RegressorMixin):
    """Real resonance from the truncated expansion of the profile's well.

    ``fit`` ignores X and y; it classifies the profile and builds the series.
    """

    def __init__(self, profile=None, p=1, j=0, order=None):
        self.profile = profile
        self.p = p
        self.j = j
        self.order = order

    def fit(self, X=None, y=None):
        from .asymptotics import expansion

        if self.p not in (1, -1):
            raise PreconditionError("p must be +1 or -1")
        if int(self.j) != self.j or self.j < 0:
            raise PreconditionError("j must be a non-negative integer")
        prof = profile_from_dict(self.profile or {"family": "constant", "n0": 1.5})
        self.profile_ = prof
        self.classification_ = classify(prof)
        self.expansion_ = expansion(prof, self.p, int(self.j), self.order, self.classification_)
        self.coefficients_ = np.array(self.expansion_.coefficients)
        return self

    def predict(self, X):
        check_is_fitted(self, "expansion_")
        return np.array([self.expansion_(m) for m in _as_m(X)])


class ModalResonance(BaseEstimator):
    """Complex resonance of a homogeneous disk from the modal equation."""

    def __init__(self, n0=1.5, R=1.0, p=1, j=0):
        self.n0 = n0
        self.R = R
        self.p = p
        self.j = j

    def fit(self, X=None, y=None):
        if not self.n0 > 1 or not self.R > 0:
            raise PreconditionError("need n0 > 1 and R > 0")
        if self.p not in (1, -1):
            raise PreconditionError("p must be +1 or -1")
        self.fitted_ = True
        return self

    def predict(self, X):
        from .modal import find_mode

        check_is_fitted(self, "fitted_")
        return np.array([find_mode(self.p, self.n0, self.R, m, int(self.j)).k for m in _as_m(X)])
