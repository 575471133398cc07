"""CART-style decision tree with Gini impurity.

Exact split search: every boundary between distinct sorted feature
values is scored; ties break to the lowest feature index and then the
lowest threshold, so training is fully deterministic.  Leaves store
the training class distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..classes import N_CLASSES
from .base import Dataset, argmax_lowest, check_width


@dataclass
class TreeConfig:
    max_depth: Optional[int] = None
    min_leaf: int = 1
    seed: int = 0


@dataclass(eq=True)
class Node:
    """Leaf (distribution set) or internal split node."""

    distribution: Optional[tuple] = None
    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["Node"] = None
    right: Optional["Node"] = None

    @property
    def is_leaf(self) -> bool:
        return self.distribution is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"dist": list(self.distribution)}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Node":
        if "dist" in d:
            return cls(distribution=tuple(d["dist"]))
        return cls(
            feature=d["feature"],
            threshold=d["threshold"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.dot(p, p))


def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    features: np.ndarray,
    min_leaf: int,
) -> Optional[tuple[float, int, float]]:
    """Lowest weighted-Gini split over the given features, or None.

    Returns (weighted_impurity, feature, threshold); the scan order
    (features ascending, thresholds ascending, strict improvement)
    realizes the documented tie-break.
    """
    n = idx.size
    onehot = np.eye(N_CLASSES)[y[idx]]
    best: Optional[tuple[float, int, float]] = None
    for j in features:
        v = X[idx, j]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        cum = np.cumsum(onehot[order], axis=0)
        boundaries = np.flatnonzero(sv[:-1] < sv[1:]) + 1  # left sizes
        if boundaries.size == 0:
            continue
        if min_leaf > 1:
            boundaries = boundaries[
                (boundaries >= min_leaf) & (n - boundaries >= min_leaf)
            ]
            if boundaries.size == 0:
                continue
        left = cum[boundaries - 1]
        total = cum[-1]
        right = total - left
        nl = boundaries.astype(float)
        nr = n - nl
        gini_l = 1.0 - np.sum((left / nl[:, None]) ** 2, axis=1)
        gini_r = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
        weighted = (nl * gini_l + nr * gini_r) / n
        k = int(np.argmin(weighted))  # first minimum -> lowest threshold
        score = float(weighted[k])
        if best is None or score < best[0] - 1e-15:
            pos = boundaries[k]
            threshold = float((sv[pos - 1] + sv[pos]) / 2.0)
            if threshold >= sv[pos]:
                # adjacent floats: midpoint rounded up; fall back to the
                # left value so both children stay non-empty
                threshold = float(sv[pos - 1])
            best = (score, int(j), threshold)
    return best


def _build(
    X: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    depth: int,
    config: TreeConfig,
    rng: Optional[np.random.Generator],
    mtry: Optional[int],
) -> Node:
    counts = np.bincount(y[idx], minlength=N_CLASSES).astype(float)
    dist = counts / counts.sum()
    impurity = _gini(counts)
    if (
        impurity == 0.0
        or (config.max_depth is not None and depth >= config.max_depth)
        or idx.size < 2 * config.min_leaf
    ):
        return Node(distribution=tuple(dist))
    p = X.shape[1]
    if mtry is not None and mtry < p:
        features = np.sort(rng.choice(p, size=mtry, replace=False))
    else:
        features = np.arange(p)
    best = _best_split(X, y, idx, features, config.min_leaf)
    if best is None or best[0] >= impurity - 1e-12:
        return Node(distribution=tuple(dist))
    _, j, threshold = best
    mask = X[idx, j] <= threshold
    left = _build(X, y, idx[mask], depth + 1, config, rng, mtry)
    right = _build(X, y, idx[~mask], depth + 1, config, rng, mtry)
    return Node(feature=j, threshold=threshold, left=left, right=right)


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    config: TreeConfig,
    rng: Optional[np.random.Generator] = None,
    mtry: Optional[int] = None,
) -> Node:
    return _build(X, y, idx, 0, config, rng, mtry)


def _proba_into(node: Node, X: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
    if node.is_leaf:
        out[idx] = node.distribution
        return
    mask = X[idx, node.feature] <= node.threshold
    _proba_into(node.left, X, idx[mask], out)
    _proba_into(node.right, X, idx[~mask], out)


def tree_proba(node: Node, X: np.ndarray) -> np.ndarray:
    out = np.zeros((X.shape[0], N_CLASSES))
    _proba_into(node, X, np.arange(X.shape[0]), out)
    return out


def impurity_importances(node: Node, X: np.ndarray, y: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Per-feature total impurity decrease, weighted by node size."""
    p = X.shape[1]
    out = np.zeros(p)
    n_total = idx.size

    def walk(nd: Node, sub: np.ndarray) -> None:
        if nd.is_leaf or sub.size == 0:
            return
        counts = np.bincount(y[sub], minlength=N_CLASSES).astype(float)
        mask = X[sub, nd.feature] <= nd.threshold
        left, right = sub[mask], sub[~mask]
        cl = np.bincount(y[left], minlength=N_CLASSES).astype(float)
        cr = np.bincount(y[right], minlength=N_CLASSES).astype(float)
        decrease = _gini(counts) - (
            left.size * _gini(cl) + right.size * _gini(cr)
        ) / max(sub.size, 1)
        out[nd.feature] += (sub.size / n_total) * decrease
        walk(nd.left, left)
        walk(nd.right, right)

    walk(node, idx)
    return out


@dataclass
class TreeModel:
    kind: str = "tree"
    root: Node = None  # type: ignore[assignment]
    n_features: int = 0
    feature_names: list[str] = field(default_factory=list)
    config: TreeConfig = field(default_factory=TreeConfig)
    importances_: np.ndarray = None  # type: ignore[assignment]

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = check_width(self.n_features, X)
        return tree_proba(self.root, X)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return argmax_lowest(self.predict_proba(X))

    def feature_importances(self) -> np.ndarray:
        total = self.importances_.sum()
        if total <= 0:
            return np.full(self.n_features, 1.0 / self.n_features)
        return self.importances_ / total

    def to_dict(self) -> dict:
        return {
            "root": self.root.to_dict(),
            "n_features": self.n_features,
            "feature_names": self.feature_names,
            "config": {
                "max_depth": self.config.max_depth,
                "min_leaf": self.config.min_leaf,
                "seed": self.config.seed,
            },
            "importances": self.importances_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeModel":
        return cls(
            root=Node.from_dict(d["root"]),
            n_features=d["n_features"],
            feature_names=list(d["feature_names"]),
            config=TreeConfig(**d["config"]),
            importances_=np.asarray(d["importances"], dtype=float),
        )


def train_tree(dataset: Dataset, config: TreeConfig | None = None) -> TreeModel:
    config = config or TreeConfig()
    dataset.require_trainable()
    idx = np.arange(len(dataset.y))
    root = build_tree(dataset.X, dataset.y, idx, config)
    importances = impurity_importances(root, dataset.X, dataset.y, idx)
    return TreeModel(
        root=root,
        n_features=dataset.n_features,
        feature_names=list(dataset.feature_names),
        config=config,
        importances_=importances,
    )
