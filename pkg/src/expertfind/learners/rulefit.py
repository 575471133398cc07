"""Rule-ensemble classifier: conjunctive rules mined from a shallow
bootstrap tree ensemble plus winsorized linear terms, combined by
one-vs-rest L1 logistic models (proximal gradient).

With the L1 penalty pushed to infinity every weight shrinks to zero
and prediction falls back to the class priors through the unpenalized
intercepts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..classes import N_CLASSES
from .base import Dataset, argmax_lowest, check_width
from .tree import Node, TreeConfig, build_tree


@dataclass
class RulefitConfig:
    n_trees: int = 30
    max_depth: int = 3
    l1_penalty: float = 0.005
    seed: int = 0
    max_iter: int = 500
    winsor_quantile: float = 0.025


@dataclass(frozen=True)
class Rule:
    """Conjunction of (feature, op, threshold) conditions; op is '<=' or '>'."""

    conditions: tuple[tuple[int, str, float], ...]

    def apply(self, X: np.ndarray) -> np.ndarray:
        mask = np.ones(X.shape[0], dtype=bool)
        for feature, op, threshold in self.conditions:
            if op == "<=":
                mask &= X[:, feature] <= threshold
            else:
                mask &= X[:, feature] > threshold
        return mask.astype(float)

    def features(self) -> set[int]:
        return {f for f, _, _ in self.conditions}

    def describe(self, names: list[str]) -> str:
        return " and ".join(
            f"{names[f]} {op} {t:.6g}" for f, op, t in self.conditions
        )


def extract_rules(root: Node) -> list[Rule]:
    """Every root-to-node path (internal and leaf) below the root."""
    out: list[Rule] = []

    def walk(node: Node, path: tuple) -> None:
        if node.is_leaf:
            return
        left_path = path + ((node.feature, "<=", node.threshold),)
        right_path = path + ((node.feature, ">", node.threshold),)
        out.append(Rule(tuple(sorted(left_path))))
        out.append(Rule(tuple(sorted(right_path))))
        walk(node.left, left_path)
        walk(node.right, right_path)

    walk(root, ())
    return out


def _l1_logistic(
    Z: np.ndarray, t01: np.ndarray, lam: float, max_iter: int
) -> tuple[np.ndarray, float]:
    """ISTA on mean logistic loss + lam*|w|_1, intercept unpenalized."""
    n, m = Z.shape
    w = np.zeros(m)
    b = 0.0
    gram_diag_max = float(np.linalg.eigvalsh((Z.T @ Z) / n)[-1]) if m else 0.0
    lipschitz = 0.25 * (gram_diag_max + 1.0)
    step = 1.0 / lipschitz
    for _ in range(max_iter):
        z = Z @ w + b
        p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        err = p - t01
        grad_w = Z.T @ err / n
        grad_b = float(err.mean())
        w_new = w - step * grad_w
        w_new = np.sign(w_new) * np.maximum(np.abs(w_new) - step * lam, 0.0)
        b_new = b - step * grad_b
        if np.max(np.abs(w_new - w)) < 1e-9 and abs(b_new - b) < 1e-9:
            w, b = w_new, b_new
            break
        w, b = w_new, b_new
    return w, b


@dataclass
class RulefitModel:
    kind: str = "rulefit"
    rules: list[Rule] = field(default_factory=list)
    rule_weights: np.ndarray = None  # (K, n_rules)
    linear_weights: np.ndarray = None  # (K, p)
    biases: np.ndarray = None  # (K,)
    winsor_lo: np.ndarray = None
    winsor_hi: np.ndarray = None
    linear_scale: np.ndarray = None
    linear_center: np.ndarray = None
    n_features: int = 0
    feature_names: list[str] = field(default_factory=list)
    config: RulefitConfig = field(default_factory=RulefitConfig)

    def _design(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        cols = [rule.apply(X) for rule in self.rules]
        R = np.column_stack(cols) if cols else np.empty((X.shape[0], 0))
        clipped = np.clip(X, self.winsor_lo, self.winsor_hi)
        L = (clipped - self.linear_center) * self.linear_scale
        return R, L

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = check_width(self.n_features, X)
        R, L = self._design(X)
        scores = np.zeros((X.shape[0], N_CLASSES))
        for c in range(N_CLASSES):
            z = R @ self.rule_weights[c] + L @ self.linear_weights[c] + self.biases[c]
            scores[:, c] = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        return scores / scores.sum(axis=1, keepdims=True)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return argmax_lowest(self.predict_proba(X))

    def feature_importances(self) -> np.ndarray:
        mass = np.zeros(self.n_features)
        for c in range(N_CLASSES):
            for rule, weight in zip(self.rules, self.rule_weights[c]):
                if weight == 0.0:
                    continue
                feats = sorted(rule.features())
                share = abs(weight) / len(feats)
                for f in feats:
                    mass[f] += share
            mass += np.abs(self.linear_weights[c])
        total = mass.sum()
        if total <= 0:
            return np.full(self.n_features, 1.0 / self.n_features)
        return mass / total

    def selected_rules(self) -> list[tuple[Rule, np.ndarray]]:
        """Rules carrying a nonzero weight in at least one class model."""
        out = []
        for i, rule in enumerate(self.rules):
            weights = self.rule_weights[:, i]
            if np.any(weights != 0.0):
                out.append((rule, weights.copy()))
        return out

    def to_dict(self) -> dict:
        return {
            "rules": [list(r.conditions) for r in self.rules],
            "rule_weights": self.rule_weights.tolist(),
            "linear_weights": self.linear_weights.tolist(),
            "biases": self.biases.tolist(),
            "winsor_lo": self.winsor_lo.tolist(),
            "winsor_hi": self.winsor_hi.tolist(),
            "linear_scale": self.linear_scale.tolist(),
            "linear_center": self.linear_center.tolist(),
            "n_features": self.n_features,
            "feature_names": self.feature_names,
            "config": {
                "n_trees": self.config.n_trees,
                "max_depth": self.config.max_depth,
                "l1_penalty": self.config.l1_penalty,
                "seed": self.config.seed,
                "max_iter": self.config.max_iter,
                "winsor_quantile": self.config.winsor_quantile,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RulefitModel":
        rules = [
            Rule(tuple((int(f), op, float(t)) for f, op, t in conds))
            for conds in d["rules"]
        ]
        return cls(
            rules=rules,
            rule_weights=np.asarray(d["rule_weights"], dtype=float),
            linear_weights=np.asarray(d["linear_weights"], dtype=float),
            biases=np.asarray(d["biases"], dtype=float),
            winsor_lo=np.asarray(d["winsor_lo"], dtype=float),
            winsor_hi=np.asarray(d["winsor_hi"], dtype=float),
            linear_scale=np.asarray(d["linear_scale"], dtype=float),
            linear_center=np.asarray(d["linear_center"], dtype=float),
            n_features=d["n_features"],
            feature_names=list(d["feature_names"]),
            config=RulefitConfig(**d["config"]),
        )


def train_rulefit(dataset: Dataset, config: RulefitConfig | None = None) -> RulefitModel:
    config = config or RulefitConfig()
    dataset.require_trainable()
    X, y = dataset.X, dataset.y
    n, p = X.shape

    tree_config = TreeConfig(max_depth=config.max_depth, min_leaf=max(2, n // 100))
    children = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    seen: set[tuple] = set()
    rules: list[Rule] = []
    for i in range(config.n_trees):
        rng = np.random.default_rng(children[i])
        idx = np.sort(rng.integers(0, n, size=n))
        root = build_tree(X, y, idx, tree_config, rng=rng, mtry=max(1, p // 2))
        for rule in extract_rules(root):
            if rule.conditions not in seen:
                seen.add(rule.conditions)
                rules.append(rule)

    # winsorized, scaled linear terms (0.4/std convention)
    q = config.winsor_quantile
    winsor_lo = np.quantile(X, q, axis=0)
    winsor_hi = np.quantile(X, 1.0 - q, axis=0)
    clipped = np.clip(X, winsor_lo, winsor_hi)
    std = clipped.std(axis=0)
    linear_scale = np.where(std > 0, 0.4 / np.where(std > 0, std, 1.0), 0.0)
    linear_center = clipped.mean(axis=0)

    R = (
        np.column_stack([rule.apply(X) for rule in rules])
        if rules
        else np.empty((n, 0))
    )
    L = (clipped - linear_center) * linear_scale
    Z = np.hstack([R, L])

    n_rules = len(rules)
    rule_weights = np.zeros((N_CLASSES, n_rules))
    linear_weights = np.zeros((N_CLASSES, p))
    biases = np.zeros(N_CLASSES)
    for c in range(N_CLASSES):
        t01 = (y == c).astype(float)
        w, b = _l1_logistic(Z, t01, config.l1_penalty, config.max_iter)
        rule_weights[c] = w[:n_rules]
        linear_weights[c] = w[n_rules:]
        biases[c] = b

    return RulefitModel(
        rules=rules,
        rule_weights=rule_weights,
        linear_weights=linear_weights,
        biases=biases,
        winsor_lo=winsor_lo,
        winsor_hi=winsor_hi,
        linear_scale=linear_scale,
        linear_center=linear_center,
        n_features=p,
        feature_names=list(dataset.feature_names),
        config=config,
    )
