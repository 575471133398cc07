import json
from datetime import datetime, timezone

import numpy as np
import pytest

from expertfind.classes import EXPERT, NON_EXPERT, OUT_OF_SCOPE
from expertfind.corpus import CorpusStore
from expertfind.features import FeatureMatrix
from expertfind.profiles import (
    UNCLASSIFIED,
    class_characteristics,
    classify_users,
    profile_summary,
)


def ts(year, month, day=1, hour=0):
    return datetime(year, month, day, hour, tzinfo=timezone.utc).timestamp()


def build_store(tmp_path, users_comments, extra_posts=0):
    """users_comments: {username: n_comments}; every comment on one post."""
    posts = [
        {"id": "p1", "author": "asker", "title": "q", "selftext": "",
         "created_utc": ts(2020, 6, 1), "score": 0, "upvote_ratio": 1.0,
         "total_awards_received": 0, "subreddit": "s"}
    ]
    for i in range(extra_posts):
        posts.append(dict(posts[0], id=f"px{i}", author="poster"))
    comments = []
    k = 0
    for user, count in users_comments.items():
        for _ in range(count):
            comments.append(
                {"id": f"c{k:04d}", "link_id": "t3_p1", "parent_id": "t3_p1",
                 "author": user, "body": f"comment {k}",
                 "created_utc": ts(2020, 6, 2, k % 20), "score": 1}
            )
            k += 1
    p = tmp_path / "posts.jsonl"
    c = tmp_path / "comments.jsonl"
    p.write_text("".join(json.dumps(o) + "\n" for o in posts))
    c.write_text("".join(json.dumps(o) + "\n" for o in comments))
    return CorpusStore.ingest(p, c, tmp_path / "store")


def comment_ids_of(store, user):
    return sorted(c.id for c in store.comments.values() if c.author == user)


class TestClassifyUsers:
    def test_majority_expert(self, tmp_path):
        store = build_store(tmp_path, {"u1": 6})
        cids = comment_ids_of(store, "u1")
        predictions = {cid: EXPERT for cid in cids[:4]}
        predictions.update({cid: NON_EXPERT for cid in cids[4:]})
        profiles = classify_users(predictions, store)
        assert len(profiles) == 1
        assert profiles[0].share_expert == pytest.approx(4 / 6)
        assert profiles[0].user_type == "expert"

    def test_low_activity_excluded(self, tmp_path):
        store = build_store(tmp_path, {"u1": 3, "u2": 7})
        predictions = {c.id: EXPERT for c in store.comments.values()}
        profiles = classify_users(predictions, store, min_activity=5)
        assert [p.username for p in profiles] == ["u2"]

    def test_no_majority_unclassified(self, tmp_path):
        store = build_store(tmp_path, {"u1": 10})
        cids = comment_ids_of(store, "u1")
        predictions = {}
        for i, cid in enumerate(cids):
            predictions[cid] = EXPERT if i < 4 else (NON_EXPERT if i < 8 else OUT_OF_SCOPE)
        profiles = classify_users(predictions, store)
        assert profiles[0].shares() == (0.4, 0.4, 0.2)
        assert profiles[0].user_type == UNCLASSIFIED

    def test_exact_half_tie_unclassified(self, tmp_path):
        store = build_store(tmp_path, {"u1": 6})
        cids = comment_ids_of(store, "u1")
        predictions = {cid: EXPERT for cid in cids[:3]}
        predictions.update({cid: OUT_OF_SCOPE for cid in cids[3:]})
        profiles = classify_users(predictions, store)
        assert profiles[0].user_type == UNCLASSIFIED

    def test_exact_half_majority_counts(self, tmp_path):
        store = build_store(tmp_path, {"u1": 6})
        cids = comment_ids_of(store, "u1")
        predictions = {cid: EXPERT for cid in cids[:3]}
        predictions[cids[3]] = NON_EXPERT
        predictions[cids[4]] = NON_EXPERT
        predictions[cids[5]] = OUT_OF_SCOPE
        profiles = classify_users(predictions, store)
        assert profiles[0].user_type == "expert"  # exactly 50% qualifies

    def test_conservation(self, tmp_path):
        rng = np.random.default_rng(3)
        store = build_store(tmp_path, {f"u{i}": int(rng.integers(2, 12)) for i in range(20)})
        predictions = {
            c.id: int(rng.integers(0, 3)) for c in store.comments.values()
        }
        profiles = classify_users(predictions, store, min_activity=5)
        active = {
            u for u, r in store.users().items()
            if r.n_posts + r.n_comments >= 5 and u in {c.author for c in store.comments.values() if c.id in predictions}
        }
        typed = [p for p in profiles if p.user_type != UNCLASSIFIED]
        unclassified = [p for p in profiles if p.user_type == UNCLASSIFIED]
        assert len(typed) + len(unclassified) == len(profiles) == len(active)

    def test_activity_mode_each(self, tmp_path):
        store = build_store(tmp_path, {"u1": 8})
        predictions = {cid: EXPERT for cid in comment_ids_of(store, "u1")}
        assert classify_users(predictions, store, activity_mode="each") == []


def matrix_for(store, values):
    """Single-feature matrix: comment id -> [value]."""
    rows = {cid: np.array([float(v)]) for cid, v in values.items()}
    return FeatureMatrix(
        feature_names=["word_count"],
        family_of={"word_count": "nlp"},
        rows=rows,
        ids=sorted(rows),
    )


class TestCharacteristics:
    def _setup(self, tmp_path, per_class=(30.0, 20.0, 10.0), n_each=5):
        store = build_store(tmp_path, {"u1": 3 * n_each})
        cids = comment_ids_of(store, "u1")
        predictions, values = {}, {}
        for i, cid in enumerate(cids):
            cls = i % 3
            predictions[cid] = cls
            values[cid] = per_class[cls] + (i // 3) * 0.1
        return store, predictions, matrix_for(store, values)

    def test_planted_ordering(self, tmp_path):
        _, predictions, fm = self._setup(tmp_path)
        report = class_characteristics(predictions, fm)
        e = report.class_mean("expert", "word_count")
        n = report.class_mean("non_expert", "word_count")
        o = report.class_mean("out_of_scope", "word_count")
        assert e > n > o

    def test_identical_comments_f_zero(self, tmp_path):
        (tmp_path / "x").mkdir()
        store = build_store(tmp_path / "x", {"u1": 15})
        cids = comment_ids_of(store, "u1")
        predictions = {cid: i % 3 for i, cid in enumerate(cids)}
        fm = matrix_for(store, {cid: 7.0 for cid in cids})
        report = class_characteristics(predictions, fm)
        assert report.anova["word_count"].f_value == 0.0

    def test_single_class_refused(self, tmp_path):
        store = build_store(tmp_path, {"u1": 6})
        cids = comment_ids_of(store, "u1")
        predictions = {cid: EXPERT for cid in cids}
        fm = matrix_for(store, {cid: 1.0 for cid in cids})
        with pytest.raises(ValueError, match="MANOVA refused"):
            class_characteristics(predictions, fm)

    def test_small_class_flagged_undefined(self, tmp_path):
        store = build_store(tmp_path, {"u1": 7})
        cids = comment_ids_of(store, "u1")
        predictions = {cid: EXPERT for cid in cids[:3]}
        predictions.update({cid: NON_EXPERT for cid in cids[3:6]})
        predictions[cids[6]] = OUT_OF_SCOPE  # one member only
        fm = matrix_for(store, {cid: float(i) for i, cid in enumerate(cids)})
        report = class_characteristics(predictions, fm)
        assert report.per_class["out_of_scope"].undefined
        assert not report.per_class["expert"].undefined


class TestProfileSummary:
    def _profiles_one_per_type(self, tmp_path, feature_values):
        store = build_store(tmp_path, {"e": 5, "n": 5, "o": 5})
        predictions, values = {}, {}
        for user, cls in (("e", EXPERT), ("n", NON_EXPERT), ("o", OUT_OF_SCOPE)):
            for cid in comment_ids_of(store, user):
                predictions[cid] = cls
                values[cid] = feature_values[cls]
        profiles = classify_users(predictions, store)
        return profiles, matrix_for(store, values)

    def test_min_max_by_hand(self, tmp_path):
        profiles, fm = self._profiles_one_per_type(tmp_path, {0: 30.0, 1: 20.0, 2: 10.0})
        table = profile_summary(profiles, fm)
        assert table.rows["expert"][0] == pytest.approx(1.0)
        assert table.rows["non_expert"][0] == pytest.approx(0.5)
        assert table.rows["out_of_scope"][0] == pytest.approx(0.0)

    def test_degenerate_range_zero(self, tmp_path):
        profiles, fm = self._profiles_one_per_type(tmp_path, {0: 5.0, 1: 5.0, 2: 5.0})
        table = profile_summary(profiles, fm)
        for row in table.rows.values():
            assert row[0] == 0.0

    def test_row_count_matches_nonempty_types(self, tmp_path):
        store = build_store(tmp_path, {"e": 5, "n": 5})
        predictions, values = {}, {}
        for user, cls in (("e", EXPERT), ("n", NON_EXPERT)):
            for cid in comment_ids_of(store, user):
                predictions[cid] = cls
                values[cid] = float(cls)
        profiles = classify_users(predictions, store)
        table = profile_summary(profiles, matrix_for(store, values))
        assert set(table.rows) == {"expert", "non_expert"}
        assert any("out_of_scope" in note for note in table.notes)
