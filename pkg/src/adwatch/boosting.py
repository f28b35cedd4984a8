"""Gradient-boosted regression trees, built from scratch on numpy.

Two modes share the same tree machinery: squared-error regression (leaf
values are residual means) and binary logistic classification (leaf values
are single Newton steps on the log-odds). Split search is exact greedy over
axis-aligned thresholds at midpoints of consecutive distinct feature values,
with deterministic tie-breaking (lowest feature index, then lowest
threshold), so a fit is fully reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DataError

MODE_REGRESSION = "squared_error_regression"
MODE_CLASSIFICATION = "logistic_classification"

# Newton leaf steps are clipped to keep log-odds updates bounded.
_MAX_LEAF_LOGIT = 4.0
_MIN_GAIN = 1e-12


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TreeNode":
        if "value" in obj:
            return cls(value=float(obj["value"]))
        return cls(
            feature=int(obj["feature"]),
            threshold=float(obj["threshold"]),
            left=cls.from_dict(obj["left"]),
            right=cls.from_dict(obj["right"]),
        )


def _tree_predict(node: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X), dtype=np.float64)
    stack = [(node, np.arange(len(X)))]
    while stack:
        nd, idx = stack.pop()
        if nd.is_leaf:
            out[idx] = nd.value
            continue
        go_left = X[idx, nd.feature] <= nd.threshold
        stack.append((nd.left, idx[go_left]))
        stack.append((nd.right, idx[~go_left]))
    return out


def _best_split(X: np.ndarray, grad: np.ndarray):
    """Return (gain, feature, threshold) of the best SSE-reducing split.

    gain is the decrease in sum of squared residuals; None when no valid
    split improves on the parent.
    """
    n = len(grad)
    if n < 2:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    gs = grad[order]
    prefix = np.cumsum(gs, axis=0)
    total = prefix[-1]
    nl = np.arange(1, n, dtype=np.float64)[:, None]
    nr = n - nl
    left_sum = prefix[:-1]
    right_sum = total[None, :] - left_sum
    score = left_sum**2 / nl + right_sum**2 / nr
    valid = xs[1:] > xs[:-1]
    # parent score is the same for every feature column
    parent_score = (np.sum(grad) ** 2) / n
    gain = score - parent_score
    gain[~valid] = -np.inf
    best = float(np.max(gain))
    if not np.isfinite(best) or best <= _MIN_GAIN:
        return None
    rows, cols = np.nonzero(gain == best)
    # deterministic tie-break: lowest feature index, then lowest threshold
    candidates = sorted(
        zip(cols.tolist(), rows.tolist()),
        key=lambda fc: (fc[0], xs[fc[1], fc[0]]),
    )
    f, r = candidates[0][0], candidates[0][1]
    threshold = 0.5 * (xs[r, f] + xs[r + 1, f])
    return best, f, float(threshold)


def _build_tree(
    X: np.ndarray,
    grad: np.ndarray,
    hess: Optional[np.ndarray],
    depth: int,
    max_depth: int,
    min_samples_leaf: int,
) -> TreeNode:
    def leaf_value(idx: np.ndarray) -> float:
        if hess is None:
            return float(np.mean(grad[idx]))
        h = float(np.sum(hess[idx]))
        if h <= 0:
            return 0.0
        v = float(np.sum(grad[idx])) / h
        return float(np.clip(v, -_MAX_LEAF_LOGIT, _MAX_LEAF_LOGIT))

    def build(idx: np.ndarray, d: int) -> TreeNode:
        if d >= max_depth or len(idx) < 2 * min_samples_leaf:
            return TreeNode(value=leaf_value(idx))
        split = _best_split(X[idx], grad[idx])
        if split is None:
            return TreeNode(value=leaf_value(idx))
        _, f, thr = split
        go_left = X[idx, f] <= thr
        li, ri = idx[go_left], idx[~go_left]
        if len(li) < min_samples_leaf or len(ri) < min_samples_leaf:
            return TreeNode(value=leaf_value(idx))
        return TreeNode(
            feature=f, threshold=thr, left=build(li, d + 1), right=build(ri, d + 1)
        )

    return build(np.arange(len(X)), depth)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -35.0, 35.0)))


@dataclass
class BoostedEnsemble:
    """Additive tree model: prediction = base + learning_rate * sum(trees)."""

    mode: str
    learning_rate: float
    max_depth: int
    base_prediction: float
    n_features: int
    trees: list[TreeNode] = field(default_factory=list)
    train_loss_curve: list[float] = field(default_factory=list)

    def raw_predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise DataError(
                f"expected {self.n_features} features, got {X.shape[1]}"
            )
        out = np.full(len(X), self.base_prediction, dtype=np.float64)
        for tree in self.trees:
            out += self.learning_rate * _tree_predict(tree, X)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        raw = self.raw_predict(X)
        if self.mode == MODE_CLASSIFICATION:
            return _sigmoid(raw)
        return raw

    def predict_one(self, x) -> float:
        return float(self.predict(np.asarray(x, dtype=np.float64))[0])

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "base_prediction": self.base_prediction,
            "n_features": self.n_features,
            "trees": [t.to_dict() for t in self.trees],
            "train_loss_curve": self.train_loss_curve,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "BoostedEnsemble":
        return cls(
            mode=str(obj["mode"]),
            learning_rate=float(obj["learning_rate"]),
            max_depth=int(obj["max_depth"]),
            base_prediction=float(obj["base_prediction"]),
            n_features=int(obj["n_features"]),
            trees=[TreeNode.from_dict(t) for t in obj["trees"]],
            train_loss_curve=[float(v) for v in obj.get("train_loss_curve", [])],
        )


@dataclass
class BoostConfig:
    n_stages: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_samples_leaf: int = 1
    mode: str = MODE_REGRESSION


def fit_boosted(X: np.ndarray, y: np.ndarray, config: Optional[BoostConfig] = None) -> BoostedEnsemble:
    """Fit a boosted ensemble; stops early once residuals are exhausted.

    Regression tracks per-stage training MSE, classification per-stage
    log-loss; both curves are stored on the model and are nonincreasing.
    """
    config = config or BoostConfig()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if len(X) == 0 or len(y) == 0:
        raise DataError("empty training data")
    if len(X) != len(y):
        raise DataError(f"X and y lengths differ: {len(X)} vs {len(y)}")
    if len(X) < 10:
        raise DataError(f"need at least 10 training rows, got {len(X)}")
    if not np.all(np.isfinite(X)):
        raise DataError("non-finite feature values in X")
    if not np.all(np.isfinite(y)):
        raise DataError("non-finite target values in y")
    if not 0.0 < config.learning_rate <= 1.0:
        raise DataError(f"learning_rate must be in (0, 1], got {config.learning_rate}")

    classification = config.mode == MODE_CLASSIFICATION
    if classification:
        labels = set(np.unique(y).tolist())
        if not labels <= {0.0, 1.0}:
            raise DataError(f"classification targets must be 0/1, got {sorted(labels)}")
        p0 = float(np.clip(np.mean(y), 1e-6, 1 - 1e-6))
        base = float(np.log(p0 / (1 - p0)))
    else:
        base = float(np.mean(y))

    model = BoostedEnsemble(
        mode=config.mode,
        learning_rate=config.learning_rate,
        max_depth=config.max_depth,
        base_prediction=base,
        n_features=X.shape[1],
    )
    raw = np.full(len(y), base, dtype=np.float64)

    def loss(raw_scores: np.ndarray) -> float:
        if classification:
            p = _sigmoid(raw_scores)
            eps = 1e-12
            return float(-np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))
        return float(np.mean((y - raw_scores) ** 2))

    model.train_loss_curve.append(loss(raw))
    for _ in range(config.n_stages):
        if classification:
            p = _sigmoid(raw)
            grad = y - p           # negative gradient of log-loss
            hess = p * (1 - p)
        else:
            grad = y - raw
            hess = None
        if np.max(np.abs(grad)) < 1e-12:
            break                  # targets fully explained; no further trees
        tree = _build_tree(
            X, grad, hess, 0, config.max_depth, config.min_samples_leaf
        )
        raw = raw + config.learning_rate * _tree_predict(tree, X)
        model.trees.append(tree)
        model.train_loss_curve.append(loss(raw))
    return model


def predict_boosted(model: BoostedEnsemble, x) -> float:
    """Predict a single feature vector; probability in classification mode."""
    return model.predict_one(x)
