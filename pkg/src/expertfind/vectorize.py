"""TF-IDF document vectors and the expert-probability meta-feature.

The meta-feature is the calibrated probability that a comment is an
expert comment, produced by a linear max-margin classifier (hinge loss
with an L2 penalty, full-batch subgradient descent) over TF-IDF
vectors, squashed through a Platt sigmoid fitted on held-out folds.
Only this scalar enters the downstream feature matrix; the raw
high-dimensional vectors stay internal to this module.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SparseVector",
    "TfidfModel",
    "MarginConfig",
    "MarginModel",
    "fit_tfidf",
    "transform",
    "train_margin_classifier",
    "expert_probability",
    "save_meta_model",
    "load_meta_model",
]


@dataclass(frozen=True)
class SparseVector:
    """Sorted-index sparse vector of a fixed dimensionality."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def dot(self, dense: np.ndarray) -> float:
        if self.indices.size == 0:
            return 0.0
        return float(np.dot(dense[self.indices], self.values))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


@dataclass
class TfidfModel:
    """Vocabulary, document frequencies and the idf variant in use.

    idf(classic)  = ln(N / df)          -- exactly 0 for ubiquitous terms
    idf(smoothed) = ln((1+N) / (1+df)) + 1
    """

    vocabulary: dict[str, int]
    document_frequency: dict[str, int]
    n_documents: int
    idf_mode: str = "smoothed"

    def idf(self, term: str) -> float:
        df = self.document_frequency[term]
        if self.idf_mode == "classic":
            return math.log(self.n_documents / df)
        return math.log((1 + self.n_documents) / (1 + df)) + 1.0

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def to_dict(self) -> dict:
        terms = sorted(self.vocabulary, key=self.vocabulary.get)
        return {
            "terms": terms,
            "document_frequency": [self.document_frequency[t] for t in terms],
            "n_documents": self.n_documents,
            "idf_mode": self.idf_mode,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TfidfModel":
        vocab = {t: i for i, t in enumerate(d["terms"])}
        df = dict(zip(d["terms"], d["document_frequency"]))
        return cls(
            vocabulary=vocab,
            document_frequency=df,
            n_documents=d["n_documents"],
            idf_mode=d["idf_mode"],
        )


def fit_tfidf(token_lists: Sequence[Iterable[str]], idf_mode: str = "smoothed") -> TfidfModel:
    """Build the vocabulary (alphabetical index order) and df table."""
    if idf_mode not in ("classic", "smoothed"):
        raise ValueError(f"unknown idf_mode: {idf_mode!r}")
    docs = [list(toks) for toks in token_lists]
    if not docs:
        raise ValueError("fit_tfidf needs at least one document")
    df: Counter[str] = Counter()
    for toks in docs:
        df.update(set(toks))
    vocabulary = {t: i for i, t in enumerate(sorted(df))}
    return TfidfModel(
        vocabulary=vocabulary,
        document_frequency=dict(df),
        n_documents=len(docs),
        idf_mode=idf_mode,
    )


def transform(model: TfidfModel, tokens: Iterable[str]) -> SparseVector:
    """tf * idf, L2-normalized; unseen terms dropped; all-unseen input
    yields the zero vector."""
    counts = Counter(t for t in tokens if t in model.vocabulary)
    if not counts:
        return SparseVector(np.empty(0, dtype=np.intp), np.empty(0), model.dim)
    idx = np.array(sorted(model.vocabulary[t] for t in counts), dtype=np.intp)
    inv = {model.vocabulary[t]: t for t in counts}
    vals = np.array([counts[inv[i]] * model.idf(inv[i]) for i in idx], dtype=float)
    norm = math.sqrt(float(np.dot(vals, vals)))
    if norm > 0:
        vals = vals / norm
    return SparseVector(idx, vals, model.dim)


# ---------------------------------------------------------------------------
# Max-margin classifier + Platt calibration
# ---------------------------------------------------------------------------


@dataclass
class MarginConfig:
    l2_penalty: float = 0.01
    epochs: int = 400
    seed: int = 0
    calibration_folds: int = 3


@dataclass
class MarginModel:
    weights: np.ndarray
    bias: float
    calibration: tuple[float, float] = (1.0, 0.0)  # (A, B), A > 0
    config: MarginConfig = field(default_factory=MarginConfig)

    def decision(self, vector: SparseVector) -> float:
        return vector.dot(self.weights) + self.bias


def _fit_hinge(
    vectors: Sequence[SparseVector], y_signed: np.ndarray, config: MarginConfig
) -> tuple[np.ndarray, float]:
    """Full-batch subgradient descent on (1/n) sum hinge + (lam/2)|w|^2.

    Pegasos-style 1/(lam*t) step size; deterministic (no sampling), so
    identical inputs give identical weights bit for bit.
    """
    n = len(vectors)
    dim = vectors[0].dim if n else 0
    lam = config.l2_penalty
    w = np.zeros(dim)
    b = 0.0
    for t in range(1, config.epochs + 1):
        eta = 1.0 / (lam * t)
        grad_w = np.zeros(dim)
        grad_b = 0.0
        for vec, y in zip(vectors, y_signed):
            if y * (vec.dot(w) + b) < 1.0:
                grad_w[vec.indices] += y * vec.values
                grad_b += y
        w = (1.0 - eta * lam) * w + (eta / n) * grad_w
        b = b + (eta / n) * grad_b
    return w, b


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _fit_platt(decisions: np.ndarray, y01: np.ndarray, max_iter: int = 100) -> tuple[float, float]:
    """Maximum-likelihood sigmoid p = sigmoid(A*f + B) with Platt's
    smoothed targets, Newton steps with backtracking.  A is clamped
    positive so the mapping stays increasing in the decision value."""
    n_pos = int(y01.sum())
    n_neg = len(y01) - n_pos
    t_pos = (n_pos + 1.0) / (n_pos + 2.0)
    t_neg = 1.0 / (n_neg + 2.0)
    targets = np.where(y01 == 1, t_pos, t_neg)
    a, b = 1.0, 0.0

    def nll(a_: float, b_: float) -> float:
        z = a_ * decisions + b_
        # log(1+exp(-z)) stable form
        pos = np.logaddexp(0.0, -z)
        neg = np.logaddexp(0.0, z)
        return float(np.sum(targets * pos + (1 - targets) * neg))

    current = nll(a, b)
    for _ in range(max_iter):
        z = a * decisions + b
        p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        g_a = float(np.sum((p - targets) * decisions))
        g_b = float(np.sum(p - targets))
        w = p * (1 - p)
        h_aa = float(np.sum(w * decisions * decisions)) + 1e-12
        h_ab = float(np.sum(w * decisions))
        h_bb = float(np.sum(w)) + 1e-12
        det = h_aa * h_bb - h_ab * h_ab
        if abs(det) < 1e-300:
            break
        da = -(h_bb * g_a - h_ab * g_b) / det
        db = -(h_aa * g_b - h_ab * g_a) / det
        step = 1.0
        improved = False
        for _ in range(20):
            cand = nll(a + step * da, b + step * db)
            if cand < current - 1e-12:
                a, b = a + step * da, b + step * db
                current = cand
                improved = True
                break
            step /= 2.0
        if not improved:
            break
        if abs(g_a) + abs(g_b) < 1e-8:
            break
    if a <= 0:
        a = 1e-6  # degenerate anti-correlated fit; keep the map increasing
    return a, b


def _stratified_folds(y01: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in (0, 1):
        idx = np.flatnonzero(y01 == cls)
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            folds[pos % k].append(int(i))
    return [np.array(sorted(f), dtype=np.intp) for f in folds]


def train_margin_classifier(
    vectors: Sequence[SparseVector],
    labels: Sequence[int],
    config: MarginConfig | None = None,
) -> MarginModel:
    """Fit the expert-vs-rest margin classifier and its calibration.

    labels: 1 for the positive (expert) class, 0 for the rest.  The
    calibration pair is fitted on out-of-fold decision values so the
    probabilities are not optimistically biased.
    """
    config = config or MarginConfig()
    y01 = np.asarray(labels, dtype=int)
    if set(np.unique(y01)) != {0, 1}:
        raise ValueError("need both classes present (labels in {0,1})")
    if len(vectors) != len(y01):
        raise ValueError("vectors and labels length mismatch")
    y_signed = np.where(y01 == 1, 1.0, -1.0)

    # out-of-fold decisions for calibration
    k = min(config.calibration_folds, int((y01 == 1).sum()), int((y01 == 0).sum()))
    k = max(k, 2)
    folds = _stratified_folds(y01, k, config.seed)
    decisions = np.zeros(len(vectors))
    for fold in folds:
        mask = np.ones(len(vectors), dtype=bool)
        mask[fold] = False
        train_idx = np.flatnonzero(mask)
        if len(set(y01[train_idx])) < 2:
            continue  # degenerate fold; its decisions stay 0
        w_f, b_f = _fit_hinge(
            [vectors[i] for i in train_idx], y_signed[train_idx], config
        )
        for i in fold:
            decisions[i] = vectors[i].dot(w_f) + b_f
    a, b_cal = _fit_platt(decisions, y01)

    w, b = _fit_hinge(list(vectors), y_signed, config)
    return MarginModel(weights=w, bias=b, calibration=(a, b_cal), config=config)


def expert_probability(model: MarginModel, vector: SparseVector) -> float:
    a, b = model.calibration
    return _sigmoid(a * model.decision(vector) + b)


# ---------------------------------------------------------------------------
# Persistence: tfidf + margin bundled as the meta-feature model
# ---------------------------------------------------------------------------

_FORMAT = "expertfind-meta-model"
_VERSION = 1


def save_meta_model(path: str | Path, tfidf: TfidfModel, margin: MarginModel) -> None:
    payload = {
        "format": _FORMAT,
        "version": _VERSION,
        "tfidf": tfidf.to_dict(),
        "margin": {
            "weights": margin.weights.tolist(),
            "bias": margin.bias,
            "calibration": list(margin.calibration),
            "config": {
                "l2_penalty": margin.config.l2_penalty,
                "epochs": margin.config.epochs,
                "seed": margin.config.seed,
                "calibration_folds": margin.config.calibration_folds,
            },
        },
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_meta_model(path: str | Path) -> tuple[TfidfModel, MarginModel]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != _FORMAT:
        raise ValueError(f"{path}: not a meta-feature model file")
    tfidf = TfidfModel.from_dict(payload["tfidf"])
    m = payload["margin"]
    margin = MarginModel(
        weights=np.asarray(m["weights"], dtype=float),
        bias=float(m["bias"]),
        calibration=(float(m["calibration"][0]), float(m["calibration"][1])),
        config=MarginConfig(**m["config"]),
    )
    return tfidf, margin
