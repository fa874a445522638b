import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from speechpat.errors import EmptyConfusion, LengthMismatch, SingleClass, TooFewSamples
from speechpat.evaluation import (
    Confusion, LabeledDataset, classification_metrics, confusion_counts, cross_validate, fit_model,
    kfold_split, pearson_matrix, regression_metrics,
)


def dataset(X, labels, scores=None):
    n = len(labels)
    scores = np.zeros(n) if scores is None else scores
    return LabeledDataset([f"r{i}" for i in range(n)], X, labels, scores,
                          [f"f{j}" for j in range(X.shape[1])])


def test_fold_sizes_44():
    plan = kfold_split(44, k=5, seed=0, stratified=False)
    assert sorted(plan.sizes.tolist(), reverse=True) == [9, 9, 9, 9, 8]


@settings(max_examples=50)
@given(st.integers(10, 80), st.integers(2, 8), st.integers(0, 1000), st.floats(0.2, 0.8))
def test_stratified_plan_properties(n, k, seed, frac):
    labels = (np.random.default_rng(seed).random(n) < frac).astype(int)
    plan = kfold_split(n, labels, k, seed)
    assert plan.sizes.max() - plan.sizes.min() <= 1
    pos = np.array([labels[plan.test_indices(f)].sum() for f in range(k)])
    neg = np.array([(1 - labels[plan.test_indices(f)]).sum() for f in range(k)])
    assert pos.max() - pos.min() <= 1 and neg.max() - neg.min() <= 1
    covered = np.concatenate([plan.test_indices(f) for f in range(k)])
    assert np.array_equal(np.sort(covered), np.arange(n))
    for f in range(k):
        assert np.intersect1d(plan.train_indices(f), plan.test_indices(f)).size == 0


def test_plan_deterministic():
    a = kfold_split(30, k=5, seed=3, stratified=False)
    b = kfold_split(30, k=5, seed=3, stratified=False)
    c = kfold_split(30, k=5, seed=4, stratified=False)
    assert np.array_equal(a.assignments, b.assignments)
    assert not np.array_equal(a.assignments, c.assignments)


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        kfold_split(3, k=5)
    with pytest.raises(TooFewSamples):
        kfold_split(10, k=1)


def test_perfect_and_inverted_classifier():
    assert classification_metrics(Confusion(1, 0, 0, 1)) == {"accuracy": 1, "precision": 1, "recall": 1, "f1": 1}
    assert classification_metrics(Confusion(0, 1, 1, 0)) == {"accuracy": 0, "precision": 0, "recall": 0, "f1": 0}
    with pytest.raises(EmptyConfusion):
        classification_metrics(Confusion(0, 0, 0, 0))


def test_f1_is_harmonic_mean():
    p, r = 0.8473, 0.9696
    # tp / (tp + fp) = p and tp / (tp + fn) = r exactly with these counts
    c = Confusion(tp=8473 * 9696, fp=(10000 - 8473) * 9696, fn=8473 * (10000 - 9696), tn=0)
    m = classification_metrics(c)
    assert m["precision"] == pytest.approx(p) and m["recall"] == pytest.approx(r)
    assert m["f1"] == pytest.approx(0.9043, abs=1e-4)


def test_confusion_counts():
    c = confusion_counts([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert c == Confusion(2, 1, 1, 1)
    with pytest.raises(LengthMismatch):
        confusion_counts([1], [1, 0])


def test_regression_arithmetic():
    assert regression_metrics([1, 2], [2, 4]) == {"mae": 1.5, "mse": 2.5, "r2": -1.5, "r2_defined": True}
    a = np.array([1.0, 3.0, 8.0])
    assert regression_metrics(np.full(3, a.mean()), a)["r2"] == 0.0
    assert regression_metrics(a, a) == {"mae": 0.0, "mse": 0.0, "r2": 1.0, "r2_defined": True}
    const = regression_metrics([1, 2], [3, 3])
    assert const["r2_defined"] is False and const["r2"] == 0.0


def test_pearson_values():
    r = pearson_matrix(np.array([[1, 1, -1], [2, 2, -2], [3, 4, -3.0]])).matrix
    assert r[0, 1] == pytest.approx(0.9820, abs=1e-4)
    assert r[0, 2] == pytest.approx(-1.0)
    np.testing.assert_allclose(np.diag(r), 1.0)


def test_pearson_constant_column():
    c = pearson_matrix(np.array([[1.0, 5.0], [2.0, 5.0], [4.0, 5.0]]))
    assert c.constant.tolist() == [False, True]
    assert c.matrix[0, 1] == 0.0 and np.all(np.isfinite(c.matrix))


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(3, 30), st.integers(1, 6))
def test_pearson_symmetric_bounded(seed, n, d):
    X = np.random.default_rng(seed).normal(size=(n, d)) * 10 ** np.random.default_rng(seed).uniform(-3, 3, d)
    r = pearson_matrix(X).matrix
    assert np.max(np.abs(r - r.T)) <= 1e-12
    assert np.all((r >= -1) & (r <= 1))


@pytest.fixture(scope="module")
def clusters():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(-5, 1, (25, 3)), rng.normal(5, 1, (25, 3))])
    labels = np.array([0] * 25 + [1] * 25)
    return dataset(X, labels, np.clip(0.5 + X[:, 0] / 20, 0, 1))


@pytest.mark.parametrize("model", ["gbm", "rf", "adaboost", "gnb"])
def test_separated_clusters_perfect(clusters, model):
    rep = cross_validate(clusters, "classify", model, {"n_estimators": 20} if model == "gbm" else None, seed=1)
    assert rep.aggregate["accuracy"] == 1.0
    assert rep.confusion.total == len(clusters)
    assert rep.pooled["accuracy"] == 1.0


def test_aggregate_is_mean_of_folds(clusters):
    rep = cross_validate(clusters, "classify", "gbm", {"n_estimators": 5}, seed=2)
    for key in ("accuracy", "precision", "recall", "f1"):
        assert rep.aggregate[key] == pytest.approx(np.mean([f[key] for f in rep.per_fold]))
    c = rep.confusion
    assert abs((c.tp + c.tn) / c.total - rep.aggregate["accuracy"]) <= 1 / min(f["n_test"] for f in rep.per_fold)


def test_linear_regression_target():
    rng = np.random.default_rng(3)
    X = rng.uniform(size=(120, 3))
    y = 0.2 + 0.6 * X[:, 1]
    rep = cross_validate(dataset(X, (X[:, 0] > 0.5).astype(int), y), "regress", "gbm", seed=0)
    assert rep.aggregate["r2"] >= 0.9
    assert {"mae", "mse", "r2"} <= set(rep.per_fold[0])
    assert rep.importance[0][0] == "f1"


def test_cross_validate_deterministic(clusters):
    a = cross_validate(clusters, "classify", "rf", {"n_trees": 10}, seed=5).to_dict()
    b = cross_validate(clusters, "classify", "rf", {"n_trees": 10}, seed=5).to_dict()
    assert a == b


def test_single_class_dataset(clusters):
    one = dataset(clusters.X, np.ones(50, dtype=int))
    with pytest.raises(SingleClass):
        cross_validate(one, "classify")


def test_classify_only_models():
    with pytest.raises(ValueError):
        fit_model("gnb", "regress", np.zeros((4, 1)), np.zeros(4))
    with pytest.raises(ValueError):
        fit_model("svm", "classify", np.zeros((4, 1)), np.array([0, 1, 0, 1.0]))


def test_dataset_shape_checked():
    with pytest.raises(LengthMismatch):
        LabeledDataset(["a"], np.zeros((2, 1)), [0, 1], [0, 0], ["f"])
