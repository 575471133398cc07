"""Synthetic desk-scale corpus with planted class structure.

The real labelled community dataset is not distributable, so pipeline
checks run against a generated stand-in.  The three comment
populations are built to reproduce the qualitative separations the
method relies on: expert comments are long, dense with technical and
polysyllabic vocabulary and arrive after a delay; non-expert comments
are mid-length everyday prose; out-of-scope comments are short,
subjective chatter (gratitude, humour, links).  Authors have a
dominant class so user-level aggregation is informative.  Output is
byte-identical for a fixed seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..classes import CLASS_NAMES, EXPERT, NON_EXPERT, OUT_OF_SCOPE
from ..textpipe import familiar_words, topic_lexicon
from .records import CommentRecord, PostRecord, comment_to_json, post_to_json
from .store import CorpusStore

LABELS_FILENAME = "planted_labels.jsonl"

_MONTHS = [(2020, m) for m in range(5, 13)] + [(2021, m) for m in range(1, 5)]

_TECH_DIFFICULT = [
    "regularization", "hyperparameter", "multicollinearity", "heteroscedasticity",
    "dimensionality", "orthogonalization", "interpretability", "generalization",
    "stochasticity", "covariance", "eigenvalue", "eigenvector", "likelihood",
    "posterior", "bayesian", "convergence", "gradient", "optimization",
    "quantization", "vectorization", "tokenization", "lemmatization",
    "normalization", "standardization", "autocorrelation", "stationarity",
    "heterogeneous", "multivariate", "univariate", "probabilistic",
    "deterministic", "asymptotic", "computational", "methodology",
    "architecture", "embedding", "transformer", "convolutional", "recurrent",
    "ensemble", "calibration", "extrapolation", "interpolation", "residuals",
    "collinearity", "overparameterized", "underdetermined", "regressor",
]

_OOS_WORDS = [
    "thanks", "thank", "lol", "haha", "wow", "nice", "cool", "great", "awesome",
    "funny", "love", "sorry", "yes", "no", "maybe", "sure", "ok", "okay",
    "congrats", "good", "luck", "happy", "glad", "best", "wishes", "amazing",
    "this", "that", "same", "here", "me", "too",
]

_QUESTION_TEMPLATES = [
    "How do I get started with {term}?",
    "Need advice on {term} for my project",
    "Is {term} worth learning in depth?",
    "Struggling with {term}, any tips?",
    "What is the best resource for {term}?",
    "Career question about {term}",
]

_CONNECTORS = [
    "the", "a", "an", "of", "for", "with", "and", "but", "so", "when", "then",
    "because", "which", "that", "your", "our", "their", "its",
]


@dataclass
class FixtureResult:
    store: CorpusStore
    labels: dict[str, int]            # every comment id -> planted class
    labelled_ids: list[str]           # the supervision subset (top-level only)

    def label_records(self) -> list[dict]:
        labelled = set(self.labelled_ids)
        records = []
        for cid in sorted(self.labels):
            records.append(
                {
                    "comment_id": cid,
                    "label": CLASS_NAMES[self.labels[cid]],
                    "split": "labelled" if cid in labelled else "pool",
                }
            )
        return records


def _month_bounds(year: int, month: int) -> tuple[float, float]:
    start = datetime(year, month, 1, tzinfo=timezone.utc).timestamp()
    if month == 12:
        end = datetime(year + 1, 1, 1, tzinfo=timezone.utc).timestamp()
    else:
        end = datetime(year, month + 1, 1, tzinfo=timezone.utc).timestamp()
    return start, end - 1


class _TextFactory:
    def __init__(self, rng: random.Random) -> None:
        self.rng = rng
        self.common = sorted(familiar_words())
        self.ds = sorted(topic_lexicon("data_science"))
        self.prog = sorted(topic_lexicon("programming"))

    def _sentence(self, n_words: int, pools: list[tuple[list[str], float]]) -> str:
        words = []
        for _ in range(n_words):
            r = self.rng.random()
            acc = 0.0
            chosen = pools[-1][0]
            for pool, weight in pools:
                acc += weight
                if r < acc:
                    chosen = pool
                    break
            words.append(self.rng.choice(chosen))
        out = " ".join(words)
        return out[0].upper() + out[1:] + "."

    def expert(self) -> str:
        pools = [
            (self.ds, 0.22),
            (_TECH_DIFFICULT, 0.20),
            (self.prog, 0.08),
            (_CONNECTORS, 0.15),
            (self.common, 0.35),
        ]
        n_sent = max(3, round(self.rng.gauss(6, 2)))
        sents = [
            self._sentence(max(8, round(self.rng.gauss(22, 5))), pools)
            for _ in range(n_sent)
        ]
        return " ".join(sents)

    def non_expert(self) -> str:
        pools = [
            (self.ds, 0.05),
            (_OOS_WORDS, 0.05),
            (_CONNECTORS, 0.20),
            (self.common, 0.70),
        ]
        n_sent = max(1, round(self.rng.gauss(2.5, 1)))
        sents = [
            self._sentence(max(6, round(self.rng.gauss(18, 5))), pools)
            for _ in range(n_sent)
        ]
        return " ".join(sents)

    def out_of_scope(self) -> str:
        pools = [
            (_OOS_WORDS, 0.45),
            (_CONNECTORS, 0.15),
            (self.common, 0.40),
        ]
        n_sent = 1 if self.rng.random() < 0.7 else 2
        sents = [
            self._sentence(max(2, round(self.rng.gauss(8, 3))), pools)
            for _ in range(n_sent)
        ]
        text = " ".join(sents)
        if self.rng.random() < 0.15:
            text += " https://example.com/" + str(self.rng.randrange(1000))
        if self.rng.random() < 0.10:
            text += " \U0001f642"
        return text

    def question_title(self) -> str:
        template = self.rng.choice(_QUESTION_TEMPLATES)
        return template.format(term=self.rng.choice(self.ds))


# class mixture for generated comments and author home classes
_CLASS_PROBS = ((EXPERT, 0.30), (NON_EXPERT, 0.40), (OUT_OF_SCOPE, 0.30))
# mean reply delay (seconds) per class: experts deliberate, chatter is quick
_REPLY_DELAY = {EXPERT: 10800.0, NON_EXPERT: 3600.0, OUT_OF_SCOPE: 900.0}
# account age mean (days) per home class
_ACCOUNT_AGE = {EXPERT: 1500.0, NON_EXPERT: 700.0, OUT_OF_SCOPE: 300.0}


def _draw_class(rng: random.Random) -> int:
    r = rng.random()
    acc = 0.0
    for cls, p in _CLASS_PROBS:
        acc += p
        if r < acc:
            return cls
    return OUT_OF_SCOPE


def generate_fixture(
    seed: int,
    n_posts: int,
    n_comments: int,
    n_labelled: int = 0,
    out_dir: str | Path | None = None,
) -> FixtureResult:
    """Build the synthetic store; optionally persist it plus the planted
    labels file to out_dir."""
    if n_posts <= 0:
        raise ValueError("n_posts must be positive")
    if n_comments < n_posts:
        raise ValueError("need at least as many comments as posts")
    if n_labelled > n_comments:
        raise ValueError("cannot label more comments than exist")

    rng = random.Random(seed)
    text = _TextFactory(rng)
    snapshot = _month_bounds(*_MONTHS[-1])[1]

    n_authors = max(24, n_comments // 25)
    authors = []
    for i in range(n_authors):
        home = _draw_class(rng)
        age_days = rng.expovariate(1.0 / _ACCOUNT_AGE[home])
        authors.append(
            {
                "name": f"user_{i:05d}",
                "home": home,
                "account_created": snapshot - age_days * 86400.0,
            }
        )
    by_home: dict[int, list[dict]] = {EXPERT: [], NON_EXPERT: [], OUT_OF_SCOPE: []}
    for a in authors:
        by_home[a["home"]].append(a)

    def author_for(cls: int) -> dict:
        pool = by_home[cls]
        if pool and rng.random() < 0.85:
            return rng.choice(pool)
        return rng.choice(authors)

    posts: list[PostRecord] = []
    for i in range(n_posts):
        year, month = _MONTHS[i % len(_MONTHS)]
        lo, hi = _month_bounds(year, month)
        created = rng.uniform(lo, hi - 86400)
        asker = rng.choice(authors)
        posts.append(
            PostRecord(
                id=f"p{i:06d}",
                author=asker["name"],
                title=text.question_title(),
                body=text.non_expert(),
                created_utc=round(created, 0),
                score=max(0, round(rng.gauss(6, 5))),
                upvote_ratio=round(min(1.0, max(0.0, rng.gauss(0.85, 0.1))), 3),
                total_awards=rng.randrange(3) if rng.random() < 0.1 else 0,
                subreddit="fixture_science",
                account_created_utc=asker["account_created"],
            )
        )

    n_top = n_comments - int(n_comments * 0.25)
    comments: list[CommentRecord] = []
    labels: dict[str, int] = {}
    makers = {
        EXPERT: text.expert,
        NON_EXPERT: text.non_expert,
        OUT_OF_SCOPE: text.out_of_scope,
    }
    score_params = {EXPERT: (8, 4), NON_EXPERT: (2, 2), OUT_OF_SCOPE: (0, 1.5)}

    for i in range(n_comments):
        cls = _draw_class(rng)
        author = author_for(cls)
        top_level = i < n_top
        if top_level:
            parent_post = posts[rng.randrange(n_posts)]
            parent_created = parent_post.created_utc
            post_id = parent_post.id
            parent_id = post_id
        else:
            parent_comment = comments[rng.randrange(len(comments))]
            parent_created = parent_comment.created_utc
            post_id = parent_comment.post_id
            parent_id = parent_comment.id
        delay = rng.expovariate(1.0 / _REPLY_DELAY[cls]) + 5.0
        mu, sigma = score_params[cls]
        cid = f"c{i:06d}"
        comments.append(
            CommentRecord(
                id=cid,
                post_id=post_id,
                parent_id=parent_id,
                author=author["name"],
                body=makers[cls](),
                created_utc=round(parent_created + delay, 0),
                score=round(rng.gauss(mu, sigma)),
                is_top_level=top_level,
                account_created_utc=author["account_created"],
            )
        )
        labels[cid] = cls

    top_ids = [c.id for c in comments if c.is_top_level]
    rng.shuffle(top_ids)
    labelled_ids = sorted(top_ids[: min(n_labelled, len(top_ids))])

    store = CorpusStore()
    for post in posts:
        store.posts[post.id] = post
        store._post_lines.append(post_to_json(post))
    for comment in comments:
        store.comments[comment.id] = comment
        store._comment_lines.append(comment_to_json(comment))
    store._build_indexes()
    store.report.n_posts = len(posts)
    store.report.n_comments = len(comments)

    result = FixtureResult(store=store, labels=labels, labelled_ids=labelled_ids)
    if out_dir is not None:
        out_dir = Path(out_dir)
        store.save(out_dir)
        write_labels(result, out_dir / LABELS_FILENAME)
    return result


def write_labels(result: FixtureResult, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in result.label_records():
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_labels(path: str | Path, split: str | None = None) -> dict[str, int]:
    """Load a planted/exported label file; optionally filter by split."""
    from ..classes import parse_class

    out: dict[str, int] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            if split is not None and obj.get("split", "labelled") != split:
                continue
            out[obj["comment_id"]] = parse_class(obj["label"])
    return out
