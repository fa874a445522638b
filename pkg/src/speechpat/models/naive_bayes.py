"""Gaussian naive Bayes for binary labels."""

from dataclasses import dataclass

import numpy as np

from .ensemble import _check_binary, _check_xy, _names
from .cart import _as_matrix

VAR_SMOOTHING = 1e-9


@dataclass
class GaussianNbModel:
    priors: np.ndarray  # (2,)
    means: np.ndarray  # (2, d)
    variances: np.ndarray  # (2, d)
    var_floor: float
    feature_names: list
    kind: str = "gaussian_nb"

    @property
    def n_features(self):
        return self.means.shape[1]

    is_classifier = True

    def joint_log_likelihood(self, X):
        X = _as_matrix(X, self.n_features)
        diff = X[:, None, :] - self.means[None, :, :]
        ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.variances)[None] + diff ** 2 / self.variances[None], axis=2)
        return ll + np.log(self.priors)[None, :]

    def predict_proba(self, X):
        """Posterior probability of class 1."""
        jll = self.joint_log_likelihood(X)
        return np.exp(jll[:, 1] - np.logaddexp(jll[:, 0], jll[:, 1]))

    def predict(self, X):
        jll = self.joint_log_likelihood(X)
        return (jll[:, 1] > jll[:, 0]).astype(np.int64)

    def to_dict(self):
        return {
            "kind": self.kind,
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "var_floor": self.var_floor,
            "feature_names": list(self.feature_names),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["priors"]), np.asarray(d["means"]), np.asarray(d["variances"]),
                   float(d["var_floor"]), list(d["feature_names"]))


def fit_gaussian_nb(X, y, feature_names=None):
    X, y = _check_xy(X, y)
    _check_binary(y)
    max_var = float(np.var(X, axis=0).max()) if X.size else 0.0
    floor = VAR_SMOOTHING * (max_var if max_var > 0 else 1e-9)
    priors = np.array([np.mean(y == 0), np.mean(y == 1)])
    means = np.stack([X[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.maximum(np.stack([X[y == c].var(axis=0) for c in (0, 1)]), floor)
    return GaussianNbModel(priors, means, variances, floor, _names(feature_names, X.shape[1]))
