import json
from datetime import datetime, timezone

import numpy as np
import pytest

from expertfind.corpus import CorpusStore, generate_fixture
from expertfind.features import (
    FEATURE_NAMES,
    FeatureMatrix,
    assemble,
    nlp_vector,
    user_features,
)
from expertfind.textpipe import measure, preprocess
from expertfind.vectorize import fit_tfidf, train_margin_classifier, transform


def ts(year, month, day=1, hour=0):
    return datetime(year, month, day, hour, tzinfo=timezone.utc).timestamp()


def build_store(tmp_path, posts, comments):
    p = tmp_path / "posts.jsonl"
    c = tmp_path / "comments.jsonl"
    p.write_text("".join(json.dumps(o) + "\n" for o in posts))
    c.write_text("".join(json.dumps(o) + "\n" for o in comments))
    return CorpusStore.ingest(p, c, tmp_path / "store")


@pytest.fixture
def small_store(tmp_path):
    posts = [
        {
            "id": "p1", "author": "asker", "title": "How to learn regression?",
            "selftext": "help please", "created_utc": ts(2020, 6, 1),
            "score": 4, "upvote_ratio": 0.9, "total_awards_received": 0,
            "subreddit": "ds", "author_created_utc": ts(2019, 6, 1),
        }
    ]
    comments = [
        {
            "id": "c1", "link_id": "t3_p1", "parent_id": "t3_p1",
            "author": "alice", "body": "Use regularization and cross validation for the regression model.",
            "created_utc": ts(2020, 6, 1, 2), "score": 7,
            "author_created_utc": ts(2019, 6, 1),
        },
        {
            "id": "c2", "link_id": "t3_p1", "parent_id": "t3_p1",
            "author": "alice", "body": "thanks a lot, great!",
            "created_utc": ts(2020, 6, 1, 4), "score": 1,
            "author_created_utc": ts(2019, 6, 1),
        },
        {
            "id": "c3", "link_id": "t3_p1", "parent_id": "t1_c1",
            "author": "bob", "body": "I agree with this detailed answer about regression.",
            "created_utc": ts(2020, 6, 1, 3), "score": 2,
        },
        {
            "id": "c4", "link_id": "t3_p1", "parent_id": "t3_p1",
            "author": "[deleted]", "body": "some deleted user comment here",
            "created_utc": ts(2020, 6, 1, 5), "score": 0,
        },
    ]
    return build_store(tmp_path, posts, comments)


def fit_models(store, ids=None):
    ids = ids or sorted(store.comments)
    docs = [preprocess(store.comments[i].body).tokens for i in ids]
    tfidf = fit_tfidf(docs)
    vectors = [transform(tfidf, d) for d in docs]
    labels = [1 if i == "c1" else 0 for i in ids]
    margin = train_margin_classifier(vectors, labels)
    return tfidf, margin


class TestUserFeatures:
    def test_response_time_zero_when_instant(self, tmp_path):
        posts = [{"id": "p1", "author": "a", "title": "t", "selftext": "",
                  "created_utc": ts(2020, 6, 1), "score": 0, "upvote_ratio": 1.0,
                  "total_awards_received": 0, "subreddit": "s"}]
        comments = [{"id": "c1", "link_id": "t3_p1", "parent_id": "t3_p1",
                     "author": "u", "body": "hi", "created_utc": ts(2020, 6, 1),
                     "score": 0}]
        store = build_store(tmp_path, posts, comments)
        uf = user_features(store, "u")
        assert uf.avg_response_time_s == 0.0

    def test_avg_words_mean(self, tmp_path):
        posts = [{"id": "p1", "author": "a", "title": "t", "selftext": "",
                  "created_utc": ts(2020, 6, 1), "score": 0, "upvote_ratio": 1.0,
                  "total_awards_received": 0, "subreddit": "s"}]
        ten = " ".join(["word"] * 10)
        twenty = " ".join(["word"] * 20)
        comments = [
            {"id": "c1", "link_id": "t3_p1", "parent_id": "t3_p1", "author": "u",
             "body": ten, "created_utc": ts(2020, 6, 2), "score": 0},
            {"id": "c2", "link_id": "t3_p1", "parent_id": "t3_p1", "author": "u",
             "body": twenty, "created_utc": ts(2020, 6, 3), "score": 0},
        ]
        store = build_store(tmp_path, posts, comments)
        assert user_features(store, "u").avg_words_in_comments == 15.0

    def test_days_member_365(self, tmp_path):
        snapshot = ts(2021, 6, 1)
        posts = [{"id": "p1", "author": "u", "title": "t", "selftext": "",
                  "created_utc": ts(2020, 7, 1), "score": 0, "upvote_ratio": 1.0,
                  "total_awards_received": 0, "subreddit": "s",
                  "author_created_utc": snapshot - 365 * 86400.0}]
        store = build_store(tmp_path, posts, [])
        uf = user_features(store, "u", snapshot_utc=snapshot)
        assert uf.days_member == pytest.approx(365.0)

    def test_unknown_user_error(self, small_store):
        with pytest.raises(ValueError):
            user_features(small_store, "nobody")

    def test_missing_means_flagged(self, tmp_path):
        posts = [{"id": "p1", "author": "u", "title": "a post", "selftext": "",
                  "created_utc": ts(2020, 6, 1), "score": 3, "upvote_ratio": 1.0,
                  "total_awards_received": 0, "subreddit": "s"}]
        store = build_store(tmp_path, posts, [])
        uf = user_features(store, "u")
        assert uf.n_comments == 0
        assert "avg_words_in_comments" in uf.missing_means
        assert uf.avg_words_in_comments == 0.0


class TestAssemble:
    def test_same_author_identical_user_subvector(self, small_store):
        tfidf, margin = fit_models(small_store)
        fm = assemble(small_store, ["c1", "c2"], tfidf, margin)
        start = fm.column("user_n_comments")
        np.testing.assert_array_equal(
            fm.rows["c1"][start:], fm.rows["c2"][start:]
        )

    def test_nlp_values_match_measure(self, small_store):
        tfidf, margin = fit_models(small_store)
        fm = assemble(small_store, ["c1"], tfidf, margin)
        m = measure(small_store.comments["c1"].body)
        assert fm.rows["c1"][fm.column("word_count")] == m.word_count
        assert fm.rows["c1"][fm.column("entropy_bits")] == pytest.approx(m.entropy_bits)
        assert fm.rows["c1"][fm.column("flesch_reading_ease")] == pytest.approx(
            m.readability.flesch_reading_ease
        )

    def test_deleted_author_imputed_and_flagged(self, small_store):
        tfidf, margin = fit_models(small_store)
        fm = assemble(small_store, ["c1", "c4"], tfidf, margin)
        assert fm.flagged == ["c4"]
        flag_col = fm.column("user_missing_flag")
        assert fm.rows["c4"][flag_col] == 1.0
        assert fm.rows["c1"][flag_col] == 0.0

    def test_karma_aliases_score(self, small_store):
        tfidf, margin = fit_models(small_store)
        fm = assemble(small_store, ["c1"], tfidf, margin)
        assert fm.rows["c1"][fm.column("comment_karma")] == 7.0
        fm2 = assemble(small_store, ["c1"], tfidf, margin, karma_of=lambda c: 123.0)
        assert fm2.rows["c1"][fm2.column("comment_karma")] == 123.0

    def test_fixture_matrix_no_nan(self, tmp_path):
        result = generate_fixture(seed=1, n_posts=15, n_comments=120, n_labelled=40)
        store = result.store
        ids = sorted(store.comments)
        docs = [preprocess(store.comments[i].body).tokens for i in result.labelled_ids]
        tfidf = fit_tfidf(docs)
        vectors = [transform(tfidf, d) for d in docs]
        labels = [1 if result.labels[i] == 0 else 0 for i in result.labelled_ids]
        margin = train_margin_classifier(vectors, labels)
        fm = assemble(store, ids, tfidf, margin)
        arr = fm.to_array()
        assert np.all(np.isfinite(arr))
        assert arr.shape == (len(ids), len(FEATURE_NAMES))

    def test_unknown_comment_id(self, small_store):
        tfidf, margin = fit_models(small_store)
        with pytest.raises(ValueError):
            assemble(small_store, ["zz"], tfidf, margin)

    def test_isolation_between_authors(self, tmp_path):
        """Dropping bob's comments leaves alice's rows untouched."""
        posts = [{"id": "p1", "author": "ask", "title": "t", "selftext": "",
                  "created_utc": ts(2020, 6, 1), "score": 0, "upvote_ratio": 1.0,
                  "total_awards_received": 0, "subreddit": "s"}]
        mk = lambda cid, author, body, h: {
            "id": cid, "link_id": "t3_p1", "parent_id": "t3_p1",
            "author": author, "body": body, "created_utc": ts(2020, 6, 1, h),
            "score": 1,
        }
        full = [
            mk("a1", "alice", "statistical modeling with regression analysis", 1),
            mk("a2", "alice", "the gradient descent converges slowly", 2),
            mk("b1", "bob", "thanks so much", 3),
            mk("b2", "bob", "lol nice", 4),
        ]
        store_full = build_store(tmp_path, posts, full)
        tmp2 = tmp_path / "without_bob"
        tmp2.mkdir()
        store_cut = build_store(tmp2, posts, full[:2])

        ids_docs = ["a1", "a2"]
        docs = [preprocess(store_full.comments[i].body).tokens for i in ids_docs]
        tfidf = fit_tfidf(docs)
        vectors = [transform(tfidf, d) for d in docs]
        margin = train_margin_classifier(vectors, [1, 0])

        snapshot = ts(2020, 7, 1)
        fm_full = assemble(store_full, ids_docs, tfidf, margin, snapshot_utc=snapshot)
        fm_cut = assemble(store_cut, ids_docs, tfidf, margin, snapshot_utc=snapshot)
        for cid in ids_docs:
            np.testing.assert_array_equal(fm_full.rows[cid], fm_cut.rows[cid])


class TestMatrixPersistence:
    def test_header_hash_stable(self, small_store):
        tfidf, margin = fit_models(small_store)
        fm1 = assemble(small_store, ["c1"], tfidf, margin)
        fm2 = assemble(small_store, ["c2", "c3"], tfidf, margin)
        assert fm1.header_hash() == fm2.header_hash()

    def test_save_load_round_trip(self, small_store, tmp_path):
        tfidf, margin = fit_models(small_store)
        fm = assemble(small_store, ["c1", "c2", "c4"], tfidf, margin)
        path = tmp_path / "features.csv"
        fm.save(path)
        loaded = FeatureMatrix.load(path)
        assert loaded.feature_names == fm.feature_names
        assert loaded.ids == fm.ids
        assert loaded.flagged == fm.flagged
        assert loaded.family_of == fm.family_of
        for cid in fm.ids:
            np.testing.assert_array_equal(loaded.rows[cid], fm.rows[cid])
