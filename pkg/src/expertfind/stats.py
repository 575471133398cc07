"""Inter-rater agreement and group-difference tests.

Self-contained implementations: Cohen's kappa for two coders over the
three comment classes, one-way ANOVA, and MANOVA via Wilks' lambda with
Rao's F approximation.  F-distribution tail probabilities come from our
own regularized incomplete beta (continued fraction, ~1e-10 accuracy),
so there is no dependency on an external statistics package.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classes import N_CLASSES, parse_class

__all__ = [
    "AgreementReport",
    "AnovaResult",
    "ManovaResult",
    "cohens_kappa",
    "anova_oneway",
    "manova_wilks",
    "f_sf",
    "regularized_incomplete_beta",
]


# ---------------------------------------------------------------------------
# Regularized incomplete beta / F-distribution tail
# ---------------------------------------------------------------------------

_BETACF_MAX_ITER = 400
_BETACF_EPS = 1e-15
_BETACF_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_FPMIN:
        d = _BETACF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1].

    Uses the continued-fraction expansion on whichever side of the
    crossover point x = (a+1)/(a+b+2) converges fast, with the symmetry
    I_x(a,b) = 1 - I_{1-x}(b,a) on the other side.
    """
    if a <= 0 or b <= 0:
        raise ValueError("incomplete beta requires a > 0 and b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f: float, df1: float, df2: float) -> float:
    """Upper tail P(F > f) of the F distribution with (df1, df2) dof."""
    if df1 <= 0 or df2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(f):
        return 0.0
    if f <= 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x)


# ---------------------------------------------------------------------------
# Cohen's kappa
# ---------------------------------------------------------------------------


@dataclass
class AgreementReport:
    """Two-coder agreement over the three comment classes."""

    kappa: float
    observed_agreement: float
    expected_agreement: float
    n_items: int
    contingency: np.ndarray  # 3x3 counts, rows = coder A, cols = coder B

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "observed_agreement": self.observed_agreement,
            "expected_agreement": self.expected_agreement,
            "n_items": self.n_items,
            "contingency": self.contingency.tolist(),
        }


def cohens_kappa(labels_a: Sequence, labels_b: Sequence) -> AgreementReport:
    """Chance-corrected agreement between two coders.

    kappa = (po - pe) / (1 - pe) where po is the fraction of identical
    labels and pe the agreement expected from the coders' marginal label
    distributions.  When both coders are constant and equal (pe = 1),
    kappa is defined as 1.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    if len(labels_a) == 0:
        raise ValueError("need at least one labelled item")
    a = np.array([parse_class(v) for v in labels_a], dtype=np.intp)
    b = np.array([parse_class(v) for v in labels_b], dtype=np.intp)
    n = a.size
    contingency = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(contingency, (a, b), 1)
    po = float(np.trace(contingency)) / n
    marg_a = contingency.sum(axis=1) / n
    marg_b = contingency.sum(axis=0) / n
    pe = float(np.dot(marg_a, marg_b))
    if pe >= 1.0:
        kappa = 1.0
    else:
        kappa = (po - pe) / (1.0 - pe)
    return AgreementReport(
        kappa=kappa,
        observed_agreement=po,
        expected_agreement=pe,
        n_items=n,
        contingency=contingency,
    )


# ---------------------------------------------------------------------------
# One-way ANOVA
# ---------------------------------------------------------------------------


@dataclass
class AnovaResult:
    f_value: float
    df_between: int
    df_within: int
    p_value: float
    ss_between: float = 0.0
    ss_within: float = 0.0

    def to_dict(self) -> dict:
        return {
            "f_value": self.f_value,
            "df_between": self.df_between,
            "df_within": self.df_within,
            "p_value": self.p_value,
            "ss_between": self.ss_between,
            "ss_within": self.ss_within,
        }


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """One-way analysis of variance: F = MS_between / MS_within.

    Requires at least two groups, each non-empty, and more observations
    than groups.  Zero variance both between and within groups yields
    F = 0 by definition.
    """
    if len(groups) < 2:
        raise ValueError("anova needs at least two groups")
    arrays = [np.asarray(g, dtype=float).ravel() for g in groups]
    if any(a.size == 0 for a in arrays):
        raise ValueError("every group must contain at least one value")
    n = sum(a.size for a in arrays)
    g = len(arrays)
    if n <= g:
        raise ValueError("total observations must exceed the number of groups")
    grand = sum(float(a.sum()) for a in arrays) / n
    ss_between = sum(a.size * (float(a.mean()) - grand) ** 2 for a in arrays)
    ss_within = sum(float(((a - a.mean()) ** 2).sum()) for a in arrays)
    df_between = g - 1
    df_within = n - g
    ms_between = ss_between / df_between
    ms_within = ss_within / df_within
    if ms_within == 0.0:
        if ms_between == 0.0:
            f_value = 0.0
        else:
            f_value = math.inf
    else:
        f_value = ms_between / ms_within
    p_value = f_sf(f_value, df_between, df_within)
    return AnovaResult(
        f_value=f_value,
        df_between=df_between,
        df_within=df_within,
        p_value=p_value,
        ss_between=ss_between,
        ss_within=ss_within,
    )


# ---------------------------------------------------------------------------
# MANOVA (Wilks' lambda, Rao's F)
# ---------------------------------------------------------------------------


@dataclass
class ManovaResult:
    wilks_lambda: float
    f_approx: float
    p_value: float
    df1: float
    df2: float
    dropped_columns: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "wilks_lambda": self.wilks_lambda,
            "f_approx": self.f_approx,
            "p_value": self.p_value,
            "df1": self.df1,
            "df2": self.df2,
            "dropped_columns": self.dropped_columns,
        }


def _independent_columns(w: np.ndarray) -> list[int]:
    """Greedy left-to-right set of columns keeping the within-scatter
    submatrix full rank (pivot tolerance relative to the diagonal)."""
    p = w.shape[0]
    keep: list[int] = []
    tol = max(float(np.trace(w)), 1.0) * 1e-10
    for j in range(p):
        trial = keep + [j]
        sub = w[np.ix_(trial, trial)]
        # smallest eigenvalue of a PSD submatrix decides invertibility
        eig_min = float(np.linalg.eigvalsh(sub)[0])
        if eig_min > tol:
            keep.append(j)
    return keep


def manova_wilks(groups: Sequence[np.ndarray]) -> ManovaResult:
    """Multivariate group-difference test via Wilks' lambda.

    groups: one (n_g, p) matrix per group.  Lambda = det(W) / det(W + B)
    over within- and between-group scatter; the F approximation follows
    Rao.  A singular within-scatter matrix triggers a warning and the
    collinear columns are dropped before recomputing.
    """
    if len(groups) < 2:
        raise ValueError("manova needs at least two groups")
    mats = [np.atleast_2d(np.asarray(g, dtype=float)) for g in groups]
    p = mats[0].shape[1]
    if any(m.shape[1] != p for m in mats):
        raise ValueError("groups disagree on feature count")
    n = sum(m.shape[0] for m in mats)
    g = len(mats)
    if n <= p + g:
        raise ValueError("need more observations than features + groups")

    def scatter(columns: list[int]) -> tuple[np.ndarray, np.ndarray]:
        sub = [m[:, columns] for m in mats]
        grand = np.vstack(sub).mean(axis=0)
        k = len(columns)
        w = np.zeros((k, k))
        b = np.zeros((k, k))
        for m in sub:
            mu = m.mean(axis=0)
            centred = m - mu
            w += centred.T @ centred
            d = (mu - grand).reshape(-1, 1)
            b += m.shape[0] * (d @ d.T)
        return w, b

    columns = list(range(p))
    w, b = scatter(columns)
    kept = _independent_columns(w)
    dropped = [j for j in columns if j not in kept]
    if dropped:
        warnings.warn(
            f"within-group scatter singular; dropped collinear columns {dropped}",
            RuntimeWarning,
            stacklevel=2,
        )
        if not kept:
            raise ValueError("all feature columns are collinear or constant")
        w, b = scatter(kept)
    k = len(kept)

    lam = float(np.linalg.det(w) / np.linalg.det(w + b))
    lam = min(max(lam, 1e-300), 1.0)

    # Rao's approximation
    gm1 = g - 1
    df1 = k * gm1
    denom = k * k + gm1 * gm1 - 5
    if denom > 0:
        s = math.sqrt((k * k * gm1 * gm1 - 4) / denom)
    else:
        s = 1.0
    m_term = n - 1 - (k + g) / 2.0
    df2 = m_term * s - (k * gm1) / 2.0 + 1.0
    root = lam ** (1.0 / s)
    if root >= 1.0:
        f_approx = 0.0
    else:
        f_approx = ((1.0 - root) / root) * (df2 / df1)
    p_value = f_sf(f_approx, df1, df2) if df2 > 0 else float("nan")
    return ManovaResult(
        wilks_lambda=lam,
        f_approx=f_approx,
        p_value=p_value,
        df1=float(df1),
        df2=float(df2),
        dropped_columns=dropped,
    )
