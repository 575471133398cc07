"""User-level analytics over predicted comment classes.

A user is typed as expert / non-expert / out-of-scope when at least
half of their predicted comments fall in that class; users below the
activity floor (comments + posts in the store) are excluded, and users
with no qualifying share stay unclassified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .classes import CLASS_NAMES, N_CLASSES
from .corpus.store import CorpusStore
from .features import FeatureMatrix
from .stats import AnovaResult, ManovaResult, anova_oneway, manova_wilks

UNCLASSIFIED = "unclassified"
DELETED_AUTHOR = "[deleted]"


@dataclass
class UserProfile:
    username: str
    n_labelled_items: int
    share_expert: float
    share_nonexpert: float
    share_oos: float
    user_type: str
    comment_ids: list[str] = field(default_factory=list)

    def shares(self) -> tuple[float, float, float]:
        return (self.share_expert, self.share_nonexpert, self.share_oos)

    def to_dict(self) -> dict:
        return {
            "username": self.username,
            "n_labelled_items": self.n_labelled_items,
            "share_expert": self.share_expert,
            "share_nonexpert": self.share_nonexpert,
            "share_oos": self.share_oos,
            "user_type": self.user_type,
        }


def classify_users(
    predictions: Mapping[str, int],
    store: CorpusStore,
    min_activity: int = 5,
    activity_mode: str = "total",
) -> list[UserProfile]:
    """Type users from their predicted comments.

    activity_mode 'total' requires comments + posts >= min_activity;
    'each' requires both counts separately.  Deleted authors cannot be
    profiled and are skipped.  Output is sorted by username, so
    permuting the input only permutes the work, not the result.
    """
    if activity_mode not in ("total", "each"):
        raise ValueError(f"unknown activity_mode: {activity_mode!r}")
    by_user: dict[str, list[str]] = {}
    for cid in predictions:
        comment = store.comments.get(cid)
        if comment is None or comment.author == DELETED_AUTHOR:
            continue
        by_user.setdefault(comment.author, []).append(cid)

    users = store.users()
    profiles: list[UserProfile] = []
    for username in sorted(by_user):
        record = users.get(username)
        if record is None:
            continue
        if activity_mode == "total":
            active = record.n_posts + record.n_comments >= min_activity
        else:
            active = record.n_posts >= min_activity and record.n_comments >= min_activity
        if not active:
            continue
        cids = sorted(by_user[username])
        counts = np.zeros(N_CLASSES)
        for cid in cids:
            counts[predictions[cid]] += 1
        shares = counts / counts.sum()
        qualifying = [c for c in range(N_CLASSES) if shares[c] >= 0.5]
        if len(qualifying) == 1:
            user_type = CLASS_NAMES[qualifying[0]]
        else:
            # no majority, or an exact 0.5/0.5 two-way tie
            user_type = UNCLASSIFIED
        profiles.append(
            UserProfile(
                username=username,
                n_labelled_items=len(cids),
                share_expert=float(shares[0]),
                share_nonexpert=float(shares[1]),
                share_oos=float(shares[2]),
                user_type=user_type,
                comment_ids=cids,
            )
        )
    return profiles


@dataclass
class ClassStats:
    n: int
    mean: Optional[np.ndarray] = None
    median: Optional[np.ndarray] = None
    q1: Optional[np.ndarray] = None
    q3: Optional[np.ndarray] = None
    undefined: bool = False


@dataclass
class CharacteristicsReport:
    feature_names: list[str]
    per_class: dict[str, ClassStats]
    anova: dict[str, AnovaResult]
    manova: Optional[ManovaResult]
    notes: list[str] = field(default_factory=list)

    def class_mean(self, class_name: str, feature: str) -> float:
        stats = self.per_class[class_name]
        if stats.mean is None:
            raise ValueError(f"class {class_name} statistics undefined")
        return float(stats.mean[self.feature_names.index(feature)])


def class_characteristics(
    predictions: Mapping[str, int], fmatrix: FeatureMatrix
) -> CharacteristicsReport:
    """Per-class feature distributions plus per-feature ANOVA and a
    whole-matrix MANOVA across predicted classes."""
    missing = [cid for cid in predictions if cid not in fmatrix.rows]
    if missing:
        raise ValueError(f"predicted comments missing feature rows: {missing[:5]}")
    classes_present = sorted(set(predictions.values()))
    if len(classes_present) < 2:
        raise ValueError(
            "characteristics require at least two predicted classes (MANOVA refused)"
        )

    groups: dict[int, np.ndarray] = {}
    for c in range(N_CLASSES):
        cids = sorted(cid for cid, cls in predictions.items() if cls == c)
        if cids:
            groups[c] = fmatrix.to_array(cids)

    per_class: dict[str, ClassStats] = {}
    for c in range(N_CLASSES):
        name = CLASS_NAMES[c]
        if c not in groups:
            per_class[name] = ClassStats(n=0, undefined=True)
        elif len(groups[c]) < 2:
            per_class[name] = ClassStats(n=len(groups[c]), undefined=True)
        else:
            arr = groups[c]
            per_class[name] = ClassStats(
                n=len(arr),
                mean=arr.mean(axis=0),
                median=np.median(arr, axis=0),
                q1=np.quantile(arr, 0.25, axis=0),
                q3=np.quantile(arr, 0.75, axis=0),
            )

    anova_groups = [groups[c] for c in classes_present]
    anova: dict[str, AnovaResult] = {}
    for j, name in enumerate(fmatrix.feature_names):
        anova[name] = anova_oneway([g[:, j] for g in anova_groups])
    notes: list[str] = []
    try:
        manova = manova_wilks(anova_groups)
    except ValueError as exc:
        manova = None  # fully degenerate scatter (e.g. constant matrix)
        notes.append(f"manova undefined: {exc}")
    return CharacteristicsReport(
        feature_names=list(fmatrix.feature_names),
        per_class=per_class,
        anova=anova,
        manova=manova,
        notes=notes,
    )


@dataclass
class SummaryTable:
    feature_names: list[str]
    rows: dict[str, np.ndarray]  # user type -> normalized means in [0,1]
    raw_means: dict[str, np.ndarray]
    notes: list[str] = field(default_factory=list)


def profile_summary(
    profiles: Sequence[UserProfile], fmatrix: FeatureMatrix
) -> SummaryTable:
    """Radar-chart table: per-user-type feature means, min-max
    normalized across types (a degenerate all-equal feature maps to 0).
    Empty types are omitted with a note."""
    by_type: dict[str, list[np.ndarray]] = {}
    for profile in profiles:
        if profile.user_type == UNCLASSIFIED:
            continue
        vectors = [fmatrix.rows[cid] for cid in profile.comment_ids if cid in fmatrix.rows]
        if not vectors:
            continue
        by_type.setdefault(profile.user_type, []).append(
            np.mean(np.vstack(vectors), axis=0)
        )

    notes = []
    for name in CLASS_NAMES:
        if name not in by_type:
            notes.append(f"type {name} empty; omitted")
    if not by_type:
        raise ValueError("no typed users to summarize")

    raw_means = {
        t: np.mean(np.vstack(vectors), axis=0) for t, vectors in by_type.items()
    }
    stacked = np.vstack([raw_means[t] for t in sorted(raw_means)])
    lo = stacked.min(axis=0)
    hi = stacked.max(axis=0)
    span = hi - lo
    rows = {}
    for t, mean in raw_means.items():
        normalized = np.where(span > 0, (mean - lo) / np.where(span > 0, span, 1.0), 0.0)
        rows[t] = normalized
    return SummaryTable(
        feature_names=list(fmatrix.feature_names),
        rows=rows,
        raw_means=raw_means,
        notes=notes,
    )
