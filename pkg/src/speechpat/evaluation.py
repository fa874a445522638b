"""Cross-validation, metrics, and feature correlation."""

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyConfusion, EmptyInput, LengthMismatch, NoSplits, SingleClass, TooFewSamples
from .models import (
    fit_adaboost, fit_gaussian_nb, fit_random_forest, gbm_fit, mdi_importance, ensemble_predict,
    predict_labels,
)
from .models.naive_bayes import GaussianNbModel

MODEL_KINDS = ("gbm", "rf", "adaboost", "gnb")
TASKS = ("classify", "regress")


@dataclass
class LabeledDataset:
    ids: list
    X: np.ndarray
    labels: np.ndarray
    scores: np.ndarray
    feature_names: list

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        n = len(self.ids)
        if self.X.shape != (n, len(self.feature_names)) or self.labels.shape != (n,) \
                or self.scores.shape != (n,):
            raise LengthMismatch("dataset arrays disagree on shape")

    def __len__(self):
        return len(self.ids)


@dataclass
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int
    stratified: bool

    def test_indices(self, fold):
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.assignments != fold)

    @property
    def sizes(self):
        return np.bincount(self.assignments, minlength=self.k)


def kfold_split(n, labels=None, k=5, seed=0, stratified=None):
    """Seeded shuffle, then round-robin fold assignment.

    When stratified the shuffled indices are grouped by class (class 0
    first) and the round-robin continues across the class boundary, which
    keeps both the fold sizes and the per-fold class counts within 1.
    """
    if stratified is None:
        stratified = labels is not None
    if k < 2 or n < k:
        raise TooFewSamples(f"need n >= k >= 2, got n={n}, k={k}")
    order = np.random.default_rng(seed).permutation(n)
    if stratified:
        if labels is None:
            raise ValueError("stratified split needs labels")
        labels = np.asarray(labels)
        if labels.shape != (n,):
            raise LengthMismatch("labels length differs from n")
        order = np.concatenate([order[labels[order] == c] for c in np.unique(labels)])
    assignments = np.empty(n, dtype=np.int64)
    assignments[order] = np.arange(n) % k
    return FoldPlan(k, assignments, seed, bool(stratified))


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other):
        return Confusion(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)

    def as_dict(self):
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def confusion_counts(predicted, actual):
    p = np.asarray(predicted).astype(bool)
    a = np.asarray(actual).astype(bool)
    if p.shape != a.shape:
        raise LengthMismatch("predicted and actual differ in length")
    return Confusion(int(np.sum(p & a)), int(np.sum(p & ~a)), int(np.sum(~p & a)), int(np.sum(~p & ~a)))


def classification_metrics(c: Confusion):
    if c.total <= 0:
        raise EmptyConfusion("confusion matrix is empty")
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"accuracy": (c.tp + c.tn) / c.total, "precision": precision, "recall": recall, "f1": f1}


def regression_metrics(predicted, actual):
    """MAE, MSE and R^2.  R^2 is 0 with ``r2_defined`` False when ``actual`` is constant."""
    p = np.asarray(predicted, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape:
        raise LengthMismatch(f"{p.size} predictions for {a.size} targets")
    if a.size == 0:
        raise EmptyInput("no samples")
    err = p - a
    ss_tot = float(np.sum((a - a.mean()) ** 2))
    out = {"mae": float(np.mean(np.abs(err))), "mse": float(np.mean(err ** 2))}
    if ss_tot > 0:
        out["r2"] = 1.0 - float(np.sum(err ** 2)) / ss_tot
        out["r2_defined"] = True
    else:
        out["r2"] = 0.0
        out["r2_defined"] = False
    return out


@dataclass
class Correlation:
    matrix: np.ndarray
    constant: np.ndarray  # bool per feature


def pearson_matrix(features):
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise TooFewSamples("need at least two rows")
    centred = X - X.mean(axis=0)
    norms = np.sqrt(np.sum(centred ** 2, axis=0))
    constant = ~(norms > 0)
    safe = np.where(constant, 1.0, norms)
    r = (centred.T @ centred) / np.outer(safe, safe)
    r = np.clip(0.5 * (r + r.T), -1.0, 1.0)
    r[constant, :] = 0.0
    r[:, constant] = 0.0
    np.fill_diagonal(r, 1.0)
    return Correlation(r, constant)


def fit_model(model_kind, task, X, y, seed=0, feature_names=None, **hyper):
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}")
    if model_kind == "gbm":
        return gbm_fit(X, y, "logistic" if task == "classify" else "squared",
                       feature_names=feature_names, seed=seed, **hyper)
    if model_kind == "rf":
        return fit_random_forest(X, y, seed=seed, task=task, feature_names=feature_names, **hyper)
    if task == "regress":
        raise ValueError(f"model {model_kind!r} supports classification only")
    if model_kind == "adaboost":
        return fit_adaboost(X, y, feature_names=feature_names, seed=seed, **hyper)
    if model_kind == "gnb":
        return fit_gaussian_nb(X, y, feature_names=feature_names)
    raise ValueError(f"model must be one of {MODEL_KINDS}")


def _predict(model, X, task):
    if isinstance(model, GaussianNbModel):
        return model.predict(X)
    if task == "classify":
        return predict_labels(model, X)
    return ensemble_predict(model, X)


def _mean_metrics(rows, keys):
    return {key: float(np.mean([r[key] for r in rows])) for key in keys}


@dataclass
class EvalReport:
    task: str
    model: str
    seed: int
    k: int
    n: int
    per_fold: list
    aggregate: dict
    confusion: Confusion | None = None
    pooled: dict = field(default_factory=dict)
    importance: list = field(default_factory=list)  # (name, score) descending
    hyperparameters: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "task": self.task,
            "model": self.model,
            "seed": self.seed,
            "k": self.k,
            "n": self.n,
            "hyperparameters": self.hyperparameters,
            "per_fold": self.per_fold,
            "aggregate": self.aggregate,
            "confusion": self.confusion.as_dict() if self.confusion else None,
            "pooled": self.pooled,
            "importance": [{"feature": f, "score": s} for f, s in self.importance],
        }


def ranked_importance(model):
    scores = mdi_importance(model)
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return [(model.feature_names[i], float(scores[i])) for i in order]


def cross_validate(dataset: LabeledDataset, task="classify", model_kind="gbm", hyperparameters=None,
                   seed=0, k=5):
    """k-fold evaluation; stratified by label for classification.

    Aggregate metrics are means of the per-fold metrics.  For
    classification the fold confusions are also summed and the pooled
    metrics of that sum are reported.  Importance comes from one refit on
    the full dataset (tree ensembles only).
    """
    hyper = dict(hyperparameters or {})
    n = len(dataset)
    if task == "classify":
        if np.unique(dataset.labels).size < 2:
            raise SingleClass("dataset holds a single class")
        plan = kfold_split(n, dataset.labels, k, seed, stratified=True)
        target = dataset.labels.astype(np.float64)
    elif task == "regress":
        plan = kfold_split(n, None, k, seed, stratified=False)
        target = dataset.scores
    else:
        raise ValueError(f"task must be one of {TASKS}")

    per_fold, total = [], Confusion(0, 0, 0, 0)
    for fold in range(k):
        tr, te = plan.train_indices(fold), plan.test_indices(fold)
        if task == "classify" and np.unique(target[tr]).size < 2:
            raise SingleClass(f"training split of fold {fold} holds a single class")
        model = fit_model(model_kind, task, dataset.X[tr], target[tr], seed,
                          dataset.feature_names, **hyper)
        pred = _predict(model, dataset.X[te], task)
        row = {"fold": fold, "n_test": int(te.size)}
        if task == "classify":
            c = confusion_counts(pred, target[te])
            total = total + c
            row.update(classification_metrics(c))
            row["confusion"] = c.as_dict()
        else:
            row.update(regression_metrics(pred, target[te]))
        per_fold.append(row)

    if task == "classify":
        aggregate = _mean_metrics(per_fold, ("accuracy", "precision", "recall", "f1"))
        pooled = classification_metrics(total)
    else:
        aggregate = _mean_metrics(per_fold, ("mae", "mse", "r2"))
        pooled = {}

    full = fit_model(model_kind, task, dataset.X, target, seed, dataset.feature_names, **hyper)
    importance = []
    if not isinstance(full, GaussianNbModel):
        try:
            importance = ranked_importance(full)
        except NoSplits:
            pass
    return EvalReport(
        task=task, model=model_kind, seed=seed, k=k, n=n, per_fold=per_fold, aggregate=aggregate,
        confusion=total if task == "classify" else None, pooled=pooled, importance=importance,
        hyperparameters=hyper,
    )
