"""Tree ensembles: gradient boosting, random forest, discrete AdaBoost."""

from dataclasses import dataclass, field
import math

import numpy as np

from ..errors import DimensionMismatch, NoSplits, SingleClass
from .cart import CartTree, _as_matrix, build_cart

GBM_CLASSIFIER = "gbm_classifier"
GBM_REGRESSOR = "gbm_regressor"
RANDOM_FOREST = "random_forest"
RANDOM_FOREST_REGRESSOR = "random_forest_regressor"
ADABOOST = "adaboost"
KINDS = (GBM_CLASSIFIER, GBM_REGRESSOR, RANDOM_FOREST, RANDOM_FOREST_REGRESSOR, ADABOOST)
CLASSIFIER_KINDS = (GBM_CLASSIFIER, RANDOM_FOREST, ADABOOST)

HESSIAN_FLOOR = 1e-12
ADABOOST_EPS = 1e-10


@dataclass
class TreeEnsembleModel:
    kind: str
    trees: list
    stage_weights: np.ndarray
    init_value: float
    learning_rate: float
    feature_names: list
    seed: int = 0
    params: dict = field(default_factory=dict)
    train_loss: list = field(default_factory=list)  # gbm only: loss after init and after each stage

    @property
    def n_features(self):
        return len(self.feature_names)

    @property
    def is_classifier(self):
        return self.kind in CLASSIFIER_KINDS


_P_LO = np.nextafter(0.0, 1.0)
_P_HI = np.nextafter(1.0, 0.0)


def sigmoid(z):
    """Logistic function, clipped so the result stays strictly inside (0, 1)."""
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.clip(np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e)), _P_LO, _P_HI)


def logistic_loss(y, raw):
    """Mean negative log-likelihood of labels ``y`` under log-odds ``raw``."""
    return float(np.mean(np.logaddexp(0.0, raw) - y * raw))


def _check_xy(X, y):
    X = _as_matrix(X)
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows but y has shape {y.shape}")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise ValueError("inputs must be finite")
    return X, y


def _check_binary(y):
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    if np.unique(y).size < 2:
        raise SingleClass("both classes must be present")


def _names(feature_names, d):
    if feature_names is None:
        return [f"x{i}" for i in range(d)]
    if len(feature_names) != d:
        raise DimensionMismatch(f"{len(feature_names)} feature names for {d} columns")
    return list(feature_names)


def gbm_fit(X, y, loss="logistic", n_estimators=100, learning_rate=0.1, max_depth=3,
            min_samples_split=2, min_samples_leaf=1, feature_names=None, seed=0):
    """Gradient boosting with shrinkage.

    ``loss="logistic"`` fits trees to ``y - sigmoid(F)`` and replaces each
    leaf by the Newton step ``sum(r) / sum(p (1 - p))``.  ``loss="squared"``
    fits trees to plain residuals.  The fitting itself is deterministic; the
    seed is only recorded.
    """
    X, y = _check_xy(X, y)
    if X.shape[0] < 2:
        raise DimensionMismatch("need at least two samples")
    if loss == "logistic":
        _check_binary(y)
        p_bar = y.mean()
        init = math.log(p_bar / (1.0 - p_bar))
        kind = GBM_CLASSIFIER
    elif loss == "squared":
        init = float(y.mean())
        kind = GBM_REGRESSOR
    else:
        raise ValueError(f"unknown loss {loss!r}")

    raw = np.full(X.shape[0], init)
    losses = [logistic_loss(y, raw) if loss == "logistic" else float(np.mean((y - raw) ** 2))]
    trees = []
    for _ in range(n_estimators):
        if loss == "logistic":
            p = sigmoid(raw)
            resid = y - p
            tree = build_cart(X, resid, None, max_depth, min_samples_split, min_samples_leaf)
            leaves = tree.apply(X)
            hess = p * (1.0 - p)
            num = np.bincount(leaves, weights=resid, minlength=tree.node_count)
            den = np.bincount(leaves, weights=hess, minlength=tree.node_count)
            newton = num / np.maximum(den, HESSIAN_FLOOR)
            tree.value = np.where(tree.is_leaf, newton, tree.value)
            raw = raw + learning_rate * tree.value[leaves]
            losses.append(logistic_loss(y, raw))
        else:
            tree = build_cart(X, y - raw, None, max_depth, min_samples_split, min_samples_leaf)
            raw = raw + learning_rate * tree.predict(X)
            losses.append(float(np.mean((y - raw) ** 2)))
        trees.append(tree)

    return TreeEnsembleModel(
        kind=kind, trees=trees, stage_weights=np.full(len(trees), learning_rate),
        init_value=init, learning_rate=learning_rate, feature_names=_names(feature_names, X.shape[1]),
        seed=seed, train_loss=losses,
        params=dict(loss=loss, n_estimators=n_estimators, learning_rate=learning_rate,
                    max_depth=max_depth, min_samples_split=min_samples_split,
                    min_samples_leaf=min_samples_leaf),
    )


def fit_random_forest(X, y, n_trees=100, max_depth=None, seed=0, max_features="sqrt",
                      min_samples_split=2, min_samples_leaf=1, task="classify", feature_names=None):
    """Bagged CART trees with per-split feature subsampling.

    Tree ``t`` draws its bootstrap and feature subsets from
    ``default_rng([seed, t])``, so trees are independent of fitting order.
    ``max_features`` is ``"sqrt"`` (ceil of sqrt d), an int, or ``None`` for all.
    """
    X, y = _check_xy(X, y)
    n, d = X.shape
    if task == "classify":
        _check_binary(y)
        kind = RANDOM_FOREST
    elif task == "regress":
        kind = RANDOM_FOREST_REGRESSOR
    else:
        raise ValueError(f"unknown task {task!r}")
    if max_features == "sqrt":
        m = int(math.ceil(math.sqrt(d)))
    elif max_features is None:
        m = d
    else:
        m = int(max_features)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        rows = rng.integers(0, n, n)
        trees.append(build_cart(X[rows], y[rows], None, max_depth, min_samples_split,
                                min_samples_leaf, max_features=m, rng=rng))
    return TreeEnsembleModel(
        kind=kind, trees=trees, stage_weights=np.full(n_trees, 1.0 / max(n_trees, 1)),
        init_value=0.0, learning_rate=1.0, feature_names=_names(feature_names, d), seed=seed,
        params=dict(n_trees=n_trees, max_depth=max_depth, max_features=m,
                    min_samples_split=min_samples_split, min_samples_leaf=min_samples_leaf),
    )


def fit_adaboost(X, y, n_stumps=100, feature_names=None, seed=0):
    """Discrete AdaBoost over depth-1 CART stumps.

    Stops early when a stump's weighted error reaches 0.5, and after a stump
    with zero error (further rounds would repeat it).
    """
    X, y = _check_xy(X, y)
    _check_binary(y)
    n = X.shape[0]
    signed = 2.0 * y - 1.0
    w = np.full(n, 1.0 / n)
    trees, alphas = [], []
    for _ in range(n_stumps):
        stump = build_cart(X, y, w, max_depth=1)
        h = np.where(stump.predict(X) >= 0.5, 1.0, -1.0)
        err = float(w[h != signed].sum() / w.sum())
        if err >= 0.5:
            break
        eps = min(max(err, ADABOOST_EPS), 1.0 - ADABOOST_EPS)
        alpha = 0.5 * math.log((1.0 - eps) / eps)
        trees.append(stump)
        alphas.append(alpha)
        if err == 0.0:
            break
        w = w * np.exp(-alpha * signed * h)
        w /= w.sum()
    return TreeEnsembleModel(
        kind=ADABOOST, trees=trees, stage_weights=np.array(alphas, dtype=np.float64),
        init_value=0.0, learning_rate=1.0, feature_names=_names(feature_names, X.shape[1]), seed=seed,
        params=dict(n_stumps=n_stumps),
    )


def decision_function(model, X):
    """Raw ensemble score: log-odds for gbm classifiers, value for regressors,
    vote fraction for forests, signed weighted vote for AdaBoost."""
    X = _as_matrix(X, model.n_features)
    if model.kind in (GBM_CLASSIFIER, GBM_REGRESSOR):
        raw = np.full(X.shape[0], model.init_value)
        for tree, lr in zip(model.trees, model.stage_weights):
            raw = raw + lr * tree.predict(X)
        return raw
    if model.kind == RANDOM_FOREST:
        votes = np.zeros(X.shape[0])
        for tree in model.trees:
            votes += tree.predict(X) >= 0.5
        return votes / max(len(model.trees), 1)
    if model.kind == RANDOM_FOREST_REGRESSOR:
        return np.mean([tree.predict(X) for tree in model.trees], axis=0)
    if model.kind == ADABOOST:
        score = np.zeros(X.shape[0])
        for tree, alpha in zip(model.trees, model.stage_weights):
            score += alpha * np.where(tree.predict(X) >= 0.5, 1.0, -1.0)
        return score
    raise ValueError(f"unknown model kind {model.kind!r}")


def ensemble_predict(model, X):
    """Per-row prediction: probability (gbm classifier), vote share (forest),
    label in {0, 1} (AdaBoost), or value (regressors).  A 1-D ``X`` is one row
    and yields a scalar."""
    single = np.ndim(X) == 1
    raw = decision_function(model, X)
    if model.kind == GBM_CLASSIFIER:
        out = sigmoid(raw)
    elif model.kind == ADABOOST:
        out = (raw >= 0.0).astype(np.float64)
    else:
        out = raw
    return float(out[0]) if single else out


def predict_labels(model, X):
    if not model.is_classifier:
        raise ValueError(f"{model.kind} does not produce labels")
    X = _as_matrix(X, model.n_features)
    return (ensemble_predict(model, X) >= 0.5).astype(np.int64)


def mdi_importance(model):
    """Mean decrease in impurity, summed over trees and normalised to 1."""
    total = np.zeros(model.n_features)
    for tree in model.trees:
        total += tree.importance_contributions()
    s = total.sum()
    if not s > 0.0:
        raise NoSplits("no tree in the model has a split")
    return total / s


def model_to_dict(model):
    return {
        "kind": model.kind,
        "init_value": model.init_value,
        "learning_rate": model.learning_rate,
        "stage_weights": np.asarray(model.stage_weights, dtype=np.float64).tolist(),
        "feature_names": list(model.feature_names),
        "seed": model.seed,
        "params": model.params,
        "train_loss": list(model.train_loss),
        "trees": [t.to_dict() for t in model.trees],
    }


def model_from_dict(d):
    return TreeEnsembleModel(
        kind=d["kind"],
        trees=[CartTree.from_dict(t) for t in d["trees"]],
        stage_weights=np.asarray(d["stage_weights"], dtype=np.float64),
        init_value=float(d["init_value"]),
        learning_rate=float(d["learning_rate"]),
        feature_names=list(d["feature_names"]),
        seed=int(d["seed"]),
        params=dict(d["params"]),
        train_loss=list(d.get("train_loss", [])),
    )
