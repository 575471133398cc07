"""Shared learner contract: train / predict / predict_proba /
feature_importances, with versioned JSON persistence.

All learners are deterministic functions of (dataset, config, seed) and
always predict over the fixed three-class space; a class absent from
training simply keeps (near-)zero probability.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from ..classes import N_CLASSES

_FORMAT = "expertfind-model"
_VERSION = 1


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2:
            raise ValueError("X must be 2-dimensional")
        if len(self.X) != len(self.y):
            raise ValueError("X and y length mismatch")
        if len(self.y) and not set(np.unique(self.y)) <= set(range(N_CLASSES)):
            raise ValueError("labels must be drawn from the 3-class code set")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("features must be finite")
        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.X.shape[1])]
        if len(self.feature_names) != self.X.shape[1]:
            raise ValueError("feature_names length mismatch")

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def subset(self, idx: Sequence[int]) -> "Dataset":
        idx = np.asarray(idx, dtype=np.intp)
        return Dataset(self.X[idx], self.y[idx], list(self.feature_names))

    def select_features(self, keep: Sequence[int]) -> "Dataset":
        keep = list(keep)
        return Dataset(
            self.X[:, keep], self.y, [self.feature_names[j] for j in keep]
        )

    def require_trainable(self) -> None:
        if len(np.unique(self.y)) < 2:
            raise ValueError("training requires at least two classes present")


class TrainedModel(Protocol):
    kind: str

    def predict_proba(self, X: np.ndarray) -> np.ndarray: ...
    def predict(self, X: np.ndarray) -> np.ndarray: ...
    def feature_importances(self) -> np.ndarray: ...
    def to_dict(self) -> dict: ...


def check_width(model_width: int, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model_width:
        raise ValueError(
            f"feature width mismatch: model expects {model_width}, got {X.shape[1]}"
        )
    return X


def argmax_lowest(proba: np.ndarray) -> np.ndarray:
    """Row-wise argmax; np.argmax already resolves ties to the lowest
    class index, which is the documented behaviour."""
    return np.argmax(proba, axis=1)


def train(kind: str, dataset: Dataset, config=None):
    """Dispatch to a learner by kind: logistic, tree, forest, rulefit."""
    from .forest import ForestConfig, train_forest
    from .logistic import LogisticConfig, train_logistic
    from .rulefit import RulefitConfig, train_rulefit
    from .tree import TreeConfig, train_tree

    table = {
        "logistic": (train_logistic, LogisticConfig),
        "tree": (train_tree, TreeConfig),
        "forest": (train_forest, ForestConfig),
        "rulefit": (train_rulefit, RulefitConfig),
    }
    if kind not in table:
        raise ValueError(f"unknown learner kind: {kind!r}")
    fn, cfg_cls = table[kind]
    if config is None:
        config = cfg_cls()
    elif isinstance(config, dict):
        config = cfg_cls(**config)
    return fn(dataset, config)


def save_model(path: str | Path, model) -> None:
    payload = {"format": _FORMAT, "version": _VERSION, "kind": model.kind}
    payload["model"] = model.to_dict()
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path):
    from .forest import ForestModel
    from .logistic import LogisticModel
    from .rulefit import RulefitModel
    from .tree import TreeModel

    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != _FORMAT:
        raise ValueError(f"{path}: not a model file")
    kind = payload["kind"]
    table = {
        "logistic": LogisticModel,
        "tree": TreeModel,
        "forest": ForestModel,
        "rulefit": RulefitModel,
    }
    if kind not in table:
        raise ValueError(f"{path}: unknown model kind {kind!r}")
    return table[kind].from_dict(payload["model"])
