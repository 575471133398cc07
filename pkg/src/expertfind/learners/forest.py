"""Random forest over the CART builder.

Per-tree RNG streams derive deterministically from the master seed, so
forests are reproducible and trees are order-independent.  With
n_trees=1, bootstrap disabled and full mtry the forest degenerates to
exactly the plain tree (the per-split RNG is never consulted then).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..classes import N_CLASSES
from .base import Dataset, argmax_lowest, check_width
from .tree import Node, TreeConfig, build_tree, impurity_importances, tree_proba


@dataclass
class ForestConfig:
    n_trees: int = 100
    max_depth: Optional[int] = None
    mtry: Optional[int] = None  # default ceil(sqrt(p))
    min_leaf: int = 1
    bootstrap: bool = True
    seed: int = 0


@dataclass
class ForestModel:
    kind: str = "forest"
    trees: list[Node] = field(default_factory=list)
    n_features: int = 0
    feature_names: list[str] = field(default_factory=list)
    config: ForestConfig = field(default_factory=ForestConfig)
    importances_: np.ndarray = None  # type: ignore[assignment]
    oob_accuracy: Optional[float] = None

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = check_width(self.n_features, X)
        acc = np.zeros((X.shape[0], N_CLASSES))
        for root in self.trees:
            acc += tree_proba(root, X)
        return acc / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return argmax_lowest(self.predict_proba(X))

    def feature_importances(self) -> np.ndarray:
        total = self.importances_.sum()
        if total <= 0:
            return np.full(self.n_features, 1.0 / self.n_features)
        return self.importances_ / total

    def to_dict(self) -> dict:
        return {
            "trees": [t.to_dict() for t in self.trees],
            "n_features": self.n_features,
            "feature_names": self.feature_names,
            "config": {
                "n_trees": self.config.n_trees,
                "max_depth": self.config.max_depth,
                "mtry": self.config.mtry,
                "min_leaf": self.config.min_leaf,
                "bootstrap": self.config.bootstrap,
                "seed": self.config.seed,
            },
            "importances": self.importances_.tolist(),
            "oob_accuracy": self.oob_accuracy,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        return cls(
            trees=[Node.from_dict(t) for t in d["trees"]],
            n_features=d["n_features"],
            feature_names=list(d["feature_names"]),
            config=ForestConfig(**d["config"]),
            importances_=np.asarray(d["importances"], dtype=float),
            oob_accuracy=d.get("oob_accuracy"),
        )


def train_forest(dataset: Dataset, config: ForestConfig | None = None) -> ForestModel:
    config = config or ForestConfig()
    dataset.require_trainable()
    X, y = dataset.X, dataset.y
    n, p = X.shape
    mtry = config.mtry if config.mtry is not None else max(1, math.ceil(math.sqrt(p)))
    mtry = min(mtry, p)
    tree_config = TreeConfig(
        max_depth=config.max_depth, min_leaf=config.min_leaf, seed=config.seed
    )
    children = np.random.SeedSequence(config.seed).spawn(config.n_trees)

    trees: list[Node] = []
    importances = np.zeros(p)
    oob_votes = np.zeros((n, N_CLASSES))
    oob_counts = np.zeros(n)
    for i in range(config.n_trees):
        rng = np.random.default_rng(children[i])
        if config.bootstrap:
            idx = np.sort(rng.integers(0, n, size=n))
        else:
            idx = np.arange(n)
        root = build_tree(X, y, idx, tree_config, rng=rng, mtry=mtry)
        trees.append(root)
        importances += impurity_importances(root, X, y, idx)
        if config.bootstrap:
            oob = np.setdiff1d(np.arange(n), idx, assume_unique=False)
            if oob.size:
                oob_votes[oob] += tree_proba(root, X[oob])
                oob_counts[oob] += 1

    oob_accuracy = None
    if config.bootstrap:
        covered = oob_counts > 0
        if covered.any():
            preds = argmax_lowest(oob_votes[covered])
            oob_accuracy = float(np.mean(preds == y[covered]))

    return ForestModel(
        trees=trees,
        n_features=p,
        feature_names=list(dataset.feature_names),
        config=config,
        importances_=importances,
        oob_accuracy=oob_accuracy,
    )
