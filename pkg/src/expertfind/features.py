"""Per-comment feature assembly: NLP measurements, crowd votes and
author activity aggregates, in a fixed documented column order.

Column layout (34 features):
  nlp    word_count .. spache (the TextMetrics scalars, readability
         included) plus expert_probability from the margin classifier
  crowd  comment_score, comment_karma
  user   user_n_comments .. user_avg_response_time_s plus
         user_missing_flag (1 when the author is deleted and the
         user family was imputed with store-wide medians)
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .corpus.records import CommentRecord
from .corpus.store import CorpusStore
from .textpipe import measure, preprocess
from .vectorize import MarginModel, TfidfModel, expert_probability, transform

logger = logging.getLogger(__name__)

DELETED_AUTHOR = "[deleted]"

NLP_FEATURES = [
    "word_count",
    "syllable_count",
    "polysyllable_count",
    "char_count",
    "difficult_word_count",
    "avg_word_length",
    "avg_sentence_length",
    "sentence_count",
    "reading_time_s",
    "entropy_bits",
    "polarity",
    "subjectivity",
    "data_science_score",
    "category_programming",
    "category_technology",
    "flesch_reading_ease",
    "flesch_kincaid_grade",
    "gunning_fog",
    "smog",
    "automated_readability_index",
    "coleman_liau",
    "dale_chall",
    "spache",
    "expert_probability",
]
CROWD_FEATURES = ["comment_score", "comment_karma"]
USER_FEATURES = [
    "user_n_comments",
    "user_n_posts",
    "user_avg_words_in_comments",
    "user_avg_words_in_posts",
    "user_avg_score",
    "user_days_member",
    "user_avg_response_time_s",
    "user_missing_flag",
]

FEATURE_NAMES = NLP_FEATURES + CROWD_FEATURES + USER_FEATURES
FAMILY_OF = {
    **{name: "nlp" for name in NLP_FEATURES},
    **{name: "crowd" for name in CROWD_FEATURES},
    **{name: "user" for name in USER_FEATURES},
}


@dataclass
class UserFeatures:
    n_comments: int
    n_posts: int
    avg_words_in_comments: float
    avg_words_in_posts: float
    avg_score: float
    days_member: float
    avg_response_time_s: float
    missing_means: tuple[str, ...] = ()

    def as_vector(self, missing_flag: float = 0.0) -> np.ndarray:
        return np.array(
            [
                self.n_comments,
                self.n_posts,
                self.avg_words_in_comments,
                self.avg_words_in_posts,
                self.avg_score,
                self.days_member,
                self.avg_response_time_s,
                missing_flag,
            ],
            dtype=float,
        )


def user_features(
    store: CorpusStore, username: str, snapshot_utc: Optional[float] = None
) -> UserFeatures:
    """Activity aggregates for one author.

    Response time is measured against the parent item (the post for a
    top-level comment, the parent comment otherwise).  Tenure falls
    back to the author's first seen timestamp when no account creation
    time is available.  Means over an empty denominator are 0 and get
    listed in missing_means.
    """
    items = store.author_items(username)
    if not items:
        raise ValueError(f"unknown user: {username!r}")
    if snapshot_utc is None:
        snapshot_utc = store.snapshot_utc()
    comments = [i for i in items if isinstance(i, CommentRecord)]
    posts = [i for i in items if not isinstance(i, CommentRecord)]
    missing: list[str] = []

    if comments:
        avg_words_c = sum(len(c.body.split()) for c in comments) / len(comments)
    else:
        avg_words_c = 0.0
        missing.append("avg_words_in_comments")
    if posts:
        avg_words_p = sum(len((p.title + " " + p.body).split()) for p in posts) / len(posts)
    else:
        avg_words_p = 0.0
        missing.append("avg_words_in_posts")
    avg_score = sum(i.score for i in items) / len(items)

    acct = None
    for item in items:
        if item.account_created_utc is not None:
            acct = item.account_created_utc
            break
    if acct is None:
        acct = min(i.created_utc for i in items)
    days_member = max(0.0, (snapshot_utc - acct) / 86400.0)

    response_times = []
    for c in comments:
        parent = store.parent_of(c)
        if parent is not None:
            response_times.append(max(0.0, c.created_utc - parent.created_utc))
    if response_times:
        avg_response = sum(response_times) / len(response_times)
    else:
        avg_response = 0.0
        missing.append("avg_response_time_s")

    return UserFeatures(
        n_comments=len(comments),
        n_posts=len(posts),
        avg_words_in_comments=avg_words_c,
        avg_words_in_posts=avg_words_p,
        avg_score=avg_score,
        days_member=days_member,
        avg_response_time_s=avg_response,
        missing_means=tuple(missing),
    )


@dataclass
class FeatureMatrix:
    feature_names: list[str]
    family_of: dict[str, str]
    rows: dict[str, np.ndarray]
    ids: list[str] = field(default_factory=list)
    flagged: list[str] = field(default_factory=list)  # imputed-author rows

    def to_array(self, ids: Optional[Sequence[str]] = None) -> np.ndarray:
        ids = list(ids) if ids is not None else self.ids
        return np.vstack([self.rows[i] for i in ids])

    def header_hash(self) -> str:
        payload = json.dumps(
            [self.feature_names, sorted(self.family_of.items())]
        ).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def column(self, name: str) -> int:
        return self.feature_names.index(name)

    # -- persistence ---------------------------------------------------

    def save(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["comment_id"] + self.feature_names)
            for cid in self.ids:
                writer.writerow([cid] + [repr(v) for v in self.rows[cid].tolist()])
        manifest = {
            "feature_names": self.feature_names,
            "families": self.family_of,
            "flagged": self.flagged,
            "header_hash": self.header_hash(),
        }
        path.with_suffix(path.suffix + ".manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "FeatureMatrix":
        path = Path(path)
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            names = header[1:]
            rows = {}
            ids = []
            for row in reader:
                ids.append(row[0])
                rows[row[0]] = np.array([float(v) for v in row[1:]], dtype=float)
        manifest_path = path.with_suffix(path.suffix + ".manifest.json")
        flagged: list[str] = []
        families = {name: FAMILY_OF.get(name, "nlp") for name in names}
        if manifest_path.exists():
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            families = manifest.get("families", families)
            flagged = manifest.get("flagged", [])
        return cls(
            feature_names=names,
            family_of=families,
            rows=rows,
            ids=ids,
            flagged=flagged,
        )


def nlp_vector(text: str, prob_expert: float) -> np.ndarray:
    """TextMetrics scalars in column order plus the meta-feature."""
    m = measure(text)
    r = m.readability
    return np.array(
        [
            m.word_count,
            m.syllable_count,
            m.polysyllable_count,
            m.char_count,
            m.difficult_word_count,
            m.avg_word_length,
            m.avg_sentence_length,
            m.sentence_count,
            m.reading_time_s,
            m.entropy_bits,
            m.polarity,
            m.subjectivity,
            m.data_science_score,
            m.category_scores["programming"],
            m.category_scores["technology"],
            r.flesch_reading_ease,
            r.flesch_kincaid_grade,
            r.gunning_fog,
            r.smog,
            r.automated_readability_index,
            r.coleman_liau,
            r.dale_chall,
            r.spache,
            prob_expert,
        ],
        dtype=float,
    )


def assemble(
    store: CorpusStore,
    comment_ids: Sequence[str],
    tfidf: TfidfModel,
    margin: MarginModel,
    snapshot_utc: Optional[float] = None,
    karma_of: Optional[Callable[[CommentRecord], float]] = None,
) -> FeatureMatrix:
    """One row per comment over all three feature families.

    comment_karma aliases the comment score unless a karma_of override
    is supplied (dumps expose only the score).  Deleted authors get the
    user family imputed with store-wide medians and the flag feature
    set; everything else about their row is computed normally.
    """
    if snapshot_utc is None:
        snapshot_utc = store.snapshot_utc()
    if karma_of is None:
        karma_of = lambda c: float(c.score)  # noqa: E731

    missing = [cid for cid in comment_ids if cid not in store.comments]
    if missing:
        raise ValueError(f"comment ids not in store: {missing[:5]}")

    authors = {store.comments[cid].author for cid in comment_ids}
    user_cache: dict[str, UserFeatures] = {}
    for author in sorted(authors):
        if author != DELETED_AUTHOR:
            user_cache[author] = user_features(store, author, snapshot_utc)

    # store-wide medians for imputing deleted authors
    all_users = [
        user_features(store, name, snapshot_utc)
        for name in sorted(store.users())
        if name != DELETED_AUTHOR
    ]
    if all_users:
        stacked = np.vstack([u.as_vector() for u in all_users])
        median_user = np.median(stacked, axis=0)
    else:
        median_user = np.zeros(len(USER_FEATURES))
    median_user[-1] = 1.0  # the flag column itself

    rows: dict[str, np.ndarray] = {}
    flagged: list[str] = []
    for cid in comment_ids:
        comment = store.comments[cid]
        vec = transform(tfidf, preprocess(comment.body).tokens)
        prob = expert_probability(margin, vec)
        nlp = nlp_vector(comment.body, prob)
        crowd = np.array([float(comment.score), karma_of(comment)], dtype=float)
        if comment.author == DELETED_AUTHOR:
            user_vec = median_user.copy()
            flagged.append(cid)
        else:
            user_vec = user_cache[comment.author].as_vector(missing_flag=0.0)
        row = np.concatenate([nlp, crowd, user_vec])
        if not np.all(np.isfinite(row)):
            bad = [FEATURE_NAMES[i] for i in np.flatnonzero(~np.isfinite(row))]
            raise AssertionError(f"non-finite features for {cid}: {bad}")
        rows[cid] = row

    return FeatureMatrix(
        feature_names=list(FEATURE_NAMES),
        family_of=dict(FAMILY_OF),
        rows=rows,
        ids=list(comment_ids),
        flagged=flagged,
    )
