"""Weighted squared-error CART regression trees stored as flat arrays."""

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import DimensionMismatch

# relative margin a split must win by; absorbs summation-order rounding
SPLIT_TOL = 1e-10


@dataclass
class CartTree:
    """Node ``i`` is a leaf when ``feature[i] == -1``.  Rows with
    ``x[feature] <= threshold`` go left.  ``gain`` is the weighted
    sum-of-squares reduction of each split (0 at leaves).
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    weighted_n: np.ndarray
    gain: np.ndarray
    depth: np.ndarray
    n_features: int

    @property
    def node_count(self):
        return self.feature.shape[0]

    @property
    def is_leaf(self):
        return self.feature < 0

    @property
    def max_depth(self):
        return int(self.depth.max())

    @property
    def n_splits(self):
        return int(np.count_nonzero(self.feature >= 0))

    def apply(self, X):
        """Leaf index reached by each row."""
        X = _as_matrix(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            f = self.feature[node]
            live = np.flatnonzero(f >= 0)
            if live.size == 0:
                return node
            nl = node[live]
            go_left = X[live, f[live]] <= self.threshold[nl]
            node[live] = np.where(go_left, self.left[nl], self.right[nl])

    def predict(self, X):
        return self.value[self.apply(X)]

    def importance_contributions(self):
        """Per-feature sum of (n_node / n_root) * impurity decrease."""
        out = np.zeros(self.n_features)
        internal = self.feature >= 0
        np.add.at(out, self.feature[internal], self.gain[internal] / self.weighted_n[0])
        return out

    def to_dict(self):
        return {
            "n_features": self.n_features,
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
            "weighted_n": self.weighted_n.tolist(),
            "gain": self.gain.tolist(),
            "depth": self.depth.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        ints = ("feature", "left", "right", "n_samples", "depth")
        arrays = {
            k: np.asarray(d[k], dtype=np.int64 if k in ints else np.float64)
            for k in ("feature", "threshold", "left", "right", "value", "n_samples",
                      "weighted_n", "gain", "depth")
        }
        return cls(n_features=int(d["n_features"]), **arrays)


def _as_matrix(X, n_features=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionMismatch("expected a 2-D feature matrix")
    if n_features is not None and X.shape[1] != n_features:
        raise DimensionMismatch(f"expected {n_features} features, got {X.shape[1]}")
    return X


def build_cart(X, y, sample_weight=None, max_depth=None, min_samples_split=2, min_samples_leaf=1,
               max_features=None, rng=None):
    """Grow a CART regression tree greedily.

    ``max_features`` restricts every split to that many features drawn
    uniformly without replacement from ``rng``; ``None`` searches all.
    Candidate thresholds are midpoints between consecutive distinct values.
    """
    X = np.ascontiguousarray(_as_matrix(X))
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    if y.shape != (n,) or w.shape != (n,):
        raise DimensionMismatch(f"X has {n} rows, y {y.shape}, weights {w.shape}")
    if n < 1:
        raise DimensionMismatch("need at least one sample")
    if np.any(w < 0):
        raise ValueError("sample weights must be nonnegative")
    if max_depth is None:
        max_depth = np.iinfo(np.int64).max
    all_features = np.arange(d, dtype=np.int64)
    if max_features is not None and max_features < d and rng is None:
        raise ValueError("max_features needs an rng")

    nodes = []  # [feature, threshold, left, right, value, n, wn, gain, depth]
    stack = [(np.arange(n, dtype=np.int64), 0, -1, False)]
    while stack:
        idx, depth, parent, is_right = stack.pop()
        node_id = len(nodes)
        if parent >= 0:
            nodes[parent][3 if is_right else 2] = node_id
        ww = w[idx]
        wn = ww.sum()
        yy = y[idx]
        mean = (ww * yy).sum() / wn if wn > 0 else yy.mean()
        nodes.append([-1, 0.0, -1, -1, mean, idx.size, wn, 0.0, depth])

        if depth >= max_depth or idx.size < min_samples_split or idx.size < 2 * min_samples_leaf:
            continue
        sse = (ww * (yy - mean) ** 2).sum()
        if not sse > 0.0:
            continue
        if max_features is not None and max_features < d:
            feats = np.sort(rng.choice(d, size=max_features, replace=False)).astype(np.int64)
        else:
            feats = all_features
        f, thr, gain = _kernels.best_split(X, y, w, idx, feats, min_samples_leaf, SPLIT_TOL * sse)
        if f < 0:
            continue
        nodes[node_id][0] = f
        nodes[node_id][1] = thr
        nodes[node_id][7] = gain
        go_left = X[idx, f] <= thr
        # push right first so the left subtree is numbered first (preorder)
        stack.append((idx[~go_left], depth + 1, node_id, True))
        stack.append((idx[go_left], depth + 1, node_id, False))

    cols = list(zip(*nodes))
    return CartTree(
        feature=np.array(cols[0], dtype=np.int64),
        threshold=np.array(cols[1], dtype=np.float64),
        left=np.array(cols[2], dtype=np.int64),
        right=np.array(cols[3], dtype=np.int64),
        value=np.array(cols[4], dtype=np.float64),
        n_samples=np.array(cols[5], dtype=np.int64),
        weighted_n=np.array(cols[6], dtype=np.float64),
        gain=np.array(cols[7], dtype=np.float64),
        depth=np.array(cols[8], dtype=np.int64),
        n_features=d,
    )
