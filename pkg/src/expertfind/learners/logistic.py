"""Multinomial softmax regression, first-order optimization.

Features are standardized internally (the scaler travels with the
model); weights start at zero, so a zero-iteration budget yields
uniform probabilities.  Plain gradient descent with a 1/L step, where
L bounds the softmax Hessian spectral norm; stops when the gradient
norm drops below tol.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..classes import N_CLASSES
from .base import Dataset, argmax_lowest, check_width


@dataclass
class LogisticConfig:
    l2_penalty: float = 1e-4
    max_iter: int = 1000
    tol: float = 1e-6
    seed: int = 0


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class LogisticModel:
    kind: str = "logistic"
    weights: np.ndarray = None  # (K, p)
    bias: np.ndarray = None  # (K,)
    mean: np.ndarray = None
    scale: np.ndarray = None
    feature_names: list[str] = field(default_factory=list)
    config: LogisticConfig = field(default_factory=LogisticConfig)
    n_iter_: int = 0

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = check_width(self.n_features, X)
        z = self._standardize(X) @ self.weights.T + self.bias
        return _softmax(z)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return argmax_lowest(self.predict_proba(X))

    def feature_importances(self) -> np.ndarray:
        mass = np.abs(self.weights).sum(axis=0)
        total = mass.sum()
        if total <= 0:
            return np.full(self.n_features, 1.0 / self.n_features)
        return mass / total

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "feature_names": self.feature_names,
            "config": {
                "l2_penalty": self.config.l2_penalty,
                "max_iter": self.config.max_iter,
                "tol": self.config.tol,
                "seed": self.config.seed,
            },
            "n_iter": self.n_iter_,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        return cls(
            weights=np.asarray(d["weights"], dtype=float),
            bias=np.asarray(d["bias"], dtype=float),
            mean=np.asarray(d["mean"], dtype=float),
            scale=np.asarray(d["scale"], dtype=float),
            feature_names=list(d["feature_names"]),
            config=LogisticConfig(**d["config"]),
            n_iter_=d.get("n_iter", 0),
        )


def train_logistic(dataset: Dataset, config: LogisticConfig | None = None) -> LogisticModel:
    config = config or LogisticConfig()
    dataset.require_trainable()
    X_raw, y = dataset.X, dataset.y
    n, p = X_raw.shape
    mean = X_raw.mean(axis=0)
    scale = X_raw.std(axis=0)
    scale[scale == 0] = 1.0
    X = (X_raw - mean) / scale
    onehot = np.eye(N_CLASSES)[y]

    W = np.zeros((N_CLASSES, p))
    b = np.zeros(N_CLASSES)

    # Lipschitz bound: softmax Hessian <= 0.5 * X^T X / n (plus ridge)
    gram = X.T @ X / n
    lam_max = float(np.linalg.eigvalsh(gram)[-1]) if p else 0.0
    lipschitz = 0.5 * (lam_max + 1.0) + config.l2_penalty  # +1 covers the bias column
    step = 1.0 / lipschitz

    n_iter = 0
    for n_iter in range(1, config.max_iter + 1):
        proba = _softmax(X @ W.T + b)
        err = proba - onehot  # (n, K)
        grad_w = err.T @ X / n + config.l2_penalty * W
        grad_b = err.mean(axis=0)
        gnorm = float(np.sqrt((grad_w**2).sum() + (grad_b**2).sum()))
        if gnorm < config.tol:
            n_iter -= 1
            break
        W -= step * grad_w
        b -= step * grad_b
    return LogisticModel(
        weights=W,
        bias=b,
        mean=mean,
        scale=scale,
        feature_names=list(dataset.feature_names),
        config=config,
        n_iter_=n_iter,
    )
