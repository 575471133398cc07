"""Cross-validation, evaluation metrics, grid search and feature
selection.

Metrics follow the reporting conventions of the comparison tables:
accuracy, macro one-vs-rest ranking AUC from class probabilities, and
MAE / R2 over the integer class codes (expert=0, non-expert=1,
out-of-scope=2), plus a 3x3 confusion matrix in proportions whose
trace equals the accuracy.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .classes import N_CLASSES
from .learners import Dataset, train
from .stats import anova_oneway

logger = logging.getLogger(__name__)

LearnerSpec = Union[str, tuple, Callable[[Dataset], object]]


@dataclass
class EvalReport:
    accuracy: float
    auc_macro_ovr: float
    mae: float
    r2: float
    confusion: np.ndarray
    n_items: int = 0
    per_fold: list["EvalReport"] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "auc_macro_ovr": self.auc_macro_ovr,
            "mae": self.mae,
            "r2": self.r2,
            "confusion": self.confusion.tolist(),
            "n_items": self.n_items,
            "notes": self.notes,
            "per_fold": [f.to_dict() for f in self.per_fold],
        }


def _rankdata(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based), ties shared."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _binary_auc(scores: np.ndarray, positives: np.ndarray) -> float:
    n_pos = int(positives.sum())
    n_neg = len(positives) - n_pos
    ranks = _rankdata(scores)
    rank_sum = float(ranks[positives].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def metrics(
    y_true: Sequence[int],
    y_pred: Sequence[int],
    probabilities: np.ndarray,
) -> EvalReport:
    """Evaluate predictions; classes absent from y_true are excluded
    from the AUC macro mean with a note."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    proba = np.atleast_2d(np.asarray(probabilities, dtype=float))
    if not (len(y_true) == len(y_pred) == len(proba)):
        raise ValueError("y_true, y_pred and probabilities must align")
    if len(y_true) == 0:
        raise ValueError("cannot evaluate zero items")
    if not np.allclose(proba.sum(axis=1), 1.0, atol=1e-6):
        raise ValueError("probability rows must sum to 1")

    n = len(y_true)
    accuracy = float(np.mean(y_true == y_pred))
    mae = float(np.mean(np.abs(y_true - y_pred)))

    ss_res = float(np.sum((y_true - y_pred) ** 2))
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res == 0 else 0.0

    notes: list[str] = []
    aucs = []
    for c in range(N_CLASSES):
        positives = y_true == c
        if positives.all() or not positives.any():
            notes.append(f"class {c} absent from one side; AUC excluded")
            continue
        aucs.append(_binary_auc(proba[:, c], positives))
    if notes:
        for note in notes:
            logger.warning(note)
    auc = float(np.mean(aucs)) if aucs else float("nan")

    confusion = np.zeros((N_CLASSES, N_CLASSES))
    np.add.at(confusion, (y_true, y_pred), 1.0)
    confusion /= n
    return EvalReport(
        accuracy=accuracy,
        auc_macro_ovr=auc,
        mae=mae,
        r2=r2,
        confusion=confusion,
        n_items=n,
        notes=notes,
    )


def _resolve_trainer(learner: LearnerSpec) -> Callable[[Dataset], object]:
    if callable(learner):
        return learner
    if isinstance(learner, str):
        return lambda ds: train(learner, ds)
    if isinstance(learner, tuple) and len(learner) == 2:
        kind, config = learner
        return lambda ds: train(kind, ds, config)
    raise ValueError(f"cannot interpret learner spec: {learner!r}")


def stratified_folds(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """k folds that partition the index set, class-stratified.

    A class with fewer than k members lands one item per fold starting
    from fold 0 (leave-one-out for that class), with a warning.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > len(y):
        raise ValueError("k cannot exceed the number of rows")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0  # continues across classes so fold sizes stay even
    for c in sorted(set(y.tolist())):
        idx = np.flatnonzero(y == c)
        if len(idx) < k:
            logger.warning(
                "class %d has %d members (< k=%d); leave-one-out stratification",
                c, len(idx), k,
            )
        idx = idx.copy()
        rng.shuffle(idx)
        for i in idx:
            folds[cursor % k].append(int(i))
            cursor += 1
    return [np.array(sorted(f), dtype=np.intp) for f in folds]


def kfold_cv(
    dataset: Dataset,
    learner: LearnerSpec,
    k: int = 10,
    seed: int = 0,
) -> EvalReport:
    """Stratified k-fold cross-validation with pooled predictions."""
    trainer = _resolve_trainer(learner)
    folds = stratified_folds(dataset.y, k, seed)
    n = len(dataset.y)
    pooled_pred = np.full(n, -1, dtype=int)
    pooled_proba = np.zeros((n, N_CLASSES))
    per_fold = []
    for fold in folds:
        if fold.size == 0:
            continue
        mask = np.ones(n, dtype=bool)
        mask[fold] = False
        model = trainer(dataset.subset(np.flatnonzero(mask)))
        proba = model.predict_proba(dataset.X[fold])
        pred = model.predict(dataset.X[fold])
        pooled_pred[fold] = pred
        pooled_proba[fold] = proba
        per_fold.append(metrics(dataset.y[fold], pred, proba))
    report = metrics(dataset.y, pooled_pred, pooled_proba)
    report.per_fold = per_fold
    return report


@dataclass
class GridSearchResult:
    best_config: dict
    best_report: EvalReport
    table: list[tuple[dict, EvalReport]]

    def to_rows(self) -> list[dict]:
        rows = []
        for config, report in self.table:
            rows.append(
                {
                    "config": config,
                    "accuracy": report.accuracy,
                    "auc": report.auc_macro_ovr,
                    "mae": report.mae,
                    "r2": report.r2,
                }
            )
        return rows


def expand_grid(grid: Union[dict, list]) -> list[dict]:
    """dict-of-lists -> cartesian product (given key order); a list of
    explicit config dicts passes through."""
    if isinstance(grid, list):
        return [dict(g) for g in grid]
    keys = list(grid)
    combos = itertools.product(*(grid[k] for k in keys))
    return [dict(zip(keys, combo)) for combo in combos]


def grid_search(
    dataset: Dataset,
    kind: str,
    grid: Union[dict, list],
    k: int = 10,
    seed: int = 0,
) -> GridSearchResult:
    """Evaluate every grid point with kfold_cv; best = highest accuracy,
    ties -> higher AUC, then first in grid order."""
    points = expand_grid(grid)
    if not points:
        raise ValueError("empty grid")
    table = []
    best_idx = 0
    for i, config in enumerate(points):
        report = kfold_cv(dataset, (kind, config), k=k, seed=seed)
        table.append((config, report))
        best = table[best_idx][1]
        if report.accuracy > best.accuracy + 1e-15 or (
            abs(report.accuracy - best.accuracy) <= 1e-15
            and report.auc_macro_ovr > best.auc_macro_ovr + 1e-15
        ):
            best_idx = i
    return GridSearchResult(
        best_config=table[best_idx][0],
        best_report=table[best_idx][1],
        table=table,
    )


# ---------------------------------------------------------------------------
# Feature selection
# ---------------------------------------------------------------------------


@dataclass
class SelectionResult:
    method: str
    kept: list[str]
    scores: dict[str, float]

    def kept_indices(self, feature_names: Sequence[str]) -> list[int]:
        index = {name: i for i, name in enumerate(feature_names)}
        return [index[name] for name in self.kept]


def _anova_f_scores(dataset: Dataset) -> np.ndarray:
    scores = np.zeros(dataset.n_features)
    classes = sorted(set(dataset.y.tolist()))
    for j in range(dataset.n_features):
        groups = [dataset.X[dataset.y == c, j] for c in classes]
        scores[j] = anova_oneway(groups).f_value
    return scores


def select_features(
    dataset: Dataset,
    method: str,
    params: Optional[dict] = None,
    learner: Optional[LearnerSpec] = None,
) -> SelectionResult:
    """Five methods: variance, kbest, percentile, rfe, sfs.

    variance drops features with variance <= threshold; kbest and
    percentile rank by per-feature one-way ANOVA F against the class;
    rfe repeatedly retrains the learner and drops its least important
    feature; sfs greedily adds the feature that maximizes CV accuracy.
    All ties break to the lowest feature index.
    """
    params = dict(params or {})
    names = dataset.feature_names
    p = dataset.n_features

    if method == "variance":
        threshold = float(params.get("threshold", 0.0))
        if threshold < 0:
            raise ValueError("variance threshold must be >= 0")
        variances = dataset.X.var(axis=0)
        kept = [names[j] for j in range(p) if variances[j] > threshold]
        if not kept:
            raise ValueError("variance threshold eliminated every feature")
        return SelectionResult("variance", kept, dict(zip(names, variances.tolist())))

    if method in ("kbest", "percentile"):
        scores = _anova_f_scores(dataset)
        if method == "kbest":
            k = int(params.get("k", p))
            if not 1 <= k <= p:
                raise ValueError(f"k must be in [1, {p}]")
        else:
            percentile = float(params.get("percentile", 100.0))
            if not 0 < percentile <= 100:
                raise ValueError("percentile must be in (0, 100]")
            k = max(1, math.ceil(p * percentile / 100.0))
        order = sorted(range(p), key=lambda j: (-scores[j], j))
        kept = [names[j] for j in order[:k]]
        return SelectionResult(method, kept, dict(zip(names, scores.tolist())))

    if method == "rfe":
        if learner is None:
            raise ValueError("rfe requires a learner")
        target = int(params.get("target_size", max(1, p // 2)))
        if not 1 <= target <= p:
            raise ValueError(f"target_size must be in [1, {p}]")
        trainer = _resolve_trainer(learner)
        current = list(range(p))
        last_importance: dict[int, float] = {}
        while len(current) > target:
            model = trainer(dataset.select_features(current))
            imp = model.feature_importances()
            drop_pos = int(np.argmin(imp))  # first minimum = lowest index
            for pos, j in enumerate(current):
                last_importance[j] = float(imp[pos])
            del current[drop_pos]
        kept = [names[j] for j in current]
        scores = {names[j]: last_importance.get(j, 0.0) for j in range(p)}
        return SelectionResult("rfe", kept, scores)

    if method == "sfs":
        if learner is None:
            raise ValueError("sfs requires a learner")
        target = int(params.get("target_size", max(1, p // 2)))
        if not 1 <= target <= p:
            raise ValueError(f"target_size must be in [1, {p}]")
        k = int(params.get("k", 5))
        seed = int(params.get("seed", 0))
        chosen: list[int] = []
        best_scores: dict[str, float] = {}
        while len(chosen) < target:
            best_j, best_acc = None, -1.0
            for j in range(p):
                if j in chosen:
                    continue
                candidate = chosen + [j]
                report = kfold_cv(
                    dataset.select_features(candidate), learner, k=k, seed=seed
                )
                if report.accuracy > best_acc + 1e-15:
                    best_acc = report.accuracy
                    best_j = j
            chosen.append(best_j)
            best_scores[names[best_j]] = best_acc
        kept = [names[j] for j in chosen]
        scores = {name: best_scores.get(name, 0.0) for name in names}
        return SelectionResult("sfs", kept, scores)

    raise ValueError(f"unknown selection method: {method!r}")
