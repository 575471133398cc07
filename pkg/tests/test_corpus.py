import json
from datetime import datetime, timezone

import pytest

from expertfind.classes import EXPERT, OUT_OF_SCOPE
from expertfind.corpus import (
    CorpusStore,
    generate_fixture,
    sample_for_labeling,
    subreddit_metrics,
)


def ts(year, month, day=1, hour=0):
    return datetime(year, month, day, hour, tzinfo=timezone.utc).timestamp()


def post_line(pid, created=None, score=0, ratio=0.9, author="alice", awards=0):
    return json.dumps(
        {
            "id": pid,
            "author": author,
            "title": f"title {pid}",
            "selftext": "body text",
            "created_utc": created if created is not None else ts(2020, 6),
            "score": score,
            "upvote_ratio": ratio,
            "total_awards_received": awards,
            "subreddit": "datasci",
        }
    )


def comment_line(cid, post, parent=None, created=None, author="bob", body="some words here", score=1):
    parent_full = f"t3_{post}" if parent is None else f"t1_{parent}"
    return json.dumps(
        {
            "id": cid,
            "link_id": f"t3_{post}",
            "parent_id": parent_full,
            "author": author,
            "body": body,
            "created_utc": created if created is not None else ts(2020, 6, 2),
            "score": score,
        }
    )


def write_corpus(tmp_path, post_lines, comment_lines):
    posts = tmp_path / "posts.jsonl"
    comments = tmp_path / "comments.jsonl"
    posts.write_text("".join(l + "\n" for l in post_lines))
    comments.write_text("".join(l + "\n" for l in comment_lines))
    return posts, comments


class TestIngest:
    def test_empty_files(self, tmp_path):
        posts, comments = write_corpus(tmp_path, [], [])
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert store.report.n_posts == 0
        assert store.report.n_comments == 0

    def test_minimal_corpus(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path,
            [post_line("p1")],
            [comment_line("c1", "p1"), comment_line("c2", "p1")],
        )
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert (store.report.n_posts, store.report.n_comments) == (1, 2)
        assert all(c.is_top_level for c in store.comments.values())

    def test_subcomment_flag(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path,
            [post_line("p1")],
            [comment_line("c1", "p1"), comment_line("c2", "p1", parent="c1")],
        )
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert store.comments["c1"].is_top_level
        assert not store.comments["c2"].is_top_level
        assert store.parent_of(store.comments["c2"]).id == "c1"

    def test_malformed_lines_counted(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path,
            [post_line("p1"), "{not json", json.dumps({"id": "p2"})],
            [comment_line("c1", "p1")],
        )
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert store.report.malformed_lines == 2
        assert store.report.n_posts == 1

    def test_invalid_upvote_ratio_is_malformed(self, tmp_path):
        bad = json.loads(post_line("p9"))
        bad["upvote_ratio"] = 1.7
        posts, comments = write_corpus(tmp_path, [json.dumps(bad)], [])
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert store.report.malformed_lines == 1

    def test_duplicates_keep_first(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path,
            [post_line("p1", score=3), post_line("p1", score=99)],
            [comment_line("c1", "p1"), comment_line("c1", "p1")],
        )
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert store.report.duplicate_ids == 2
        assert store.posts["p1"].score == 3

    def test_dangling_comment_quarantined(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path,
            [post_line("p1")],
            [comment_line("c1", "p1"), comment_line("c2", "ghost")],
        )
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert "c2" in store.quarantined_comments
        assert "c2" not in store.comments
        assert store.report.quarantined == ["c2"]

    def test_round_trip_bit_identical(self, tmp_path):
        lines_p = [post_line("p1"), post_line("p2", score=5)]
        lines_c = [comment_line("c1", "p1"), comment_line("c2", "p2")]
        posts, comments = write_corpus(tmp_path, lines_p, lines_c)
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        out_p = tmp_path / "out_posts.jsonl"
        out_c = tmp_path / "out_comments.jsonl"
        store.export(out_p, out_c)
        assert out_p.read_bytes() == posts.read_bytes()
        assert out_c.read_bytes() == comments.read_bytes()

    def test_load_round_trip(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path,
            [post_line("p1")],
            [comment_line("c1", "p1"), comment_line("c2", "ghost")],
        )
        CorpusStore.ingest(posts, comments, tmp_path / "store")
        loaded = CorpusStore.load(tmp_path / "store")
        assert set(loaded.posts) == {"p1"}
        assert set(loaded.comments) == {"c1"}
        assert set(loaded.quarantined_comments) == {"c2"}

    def test_missing_file_fatal(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            CorpusStore.ingest(tmp_path / "nope.jsonl", tmp_path / "nope2.jsonl", tmp_path / "s")

    def test_users_first_seen(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path,
            [post_line("p1", created=ts(2020, 6), author="alice")],
            [
                comment_line("c1", "p1", created=ts(2020, 7), author="alice"),
                comment_line("c2", "p1", created=ts(2020, 8), author="bob"),
            ],
        )
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        users = store.users()
        assert users["alice"].first_seen_utc == ts(2020, 6)
        assert users["alice"].n_posts == 1 and users["alice"].n_comments == 1
        assert users["bob"].first_seen_utc == ts(2020, 8)


class TestMetrics:
    def test_paper_scale_ratio(self, tmp_path):
        post_lines = [post_line(f"p{i}") for i in range(824)]
        comment_lines = [
            comment_line(f"c{i}", f"p{i % 824}") for i in range(5400)
        ]
        posts, comments = write_corpus(tmp_path, post_lines, comment_lines)
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        m = subreddit_metrics(store)
        assert round(m.avg_comments_per_submission, 2) == 6.55

    def test_single_post_no_comments(self, tmp_path):
        posts, comments = write_corpus(tmp_path, [post_line("p1")], [])
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        m = subreddit_metrics(store)
        assert m.avg_comments_per_submission == 0.0
        assert not m.empty

    def test_avg_score(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path, [post_line("p1", score=3), post_line("p2", score=5)], []
        )
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert subreddit_metrics(store).avg_score == 4.0

    def test_empty_store_flag(self, tmp_path):
        posts, comments = write_corpus(tmp_path, [], [])
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        m = subreddit_metrics(store)
        assert m.empty
        assert m.avg_score == 0.0

    def test_unique_users_excludes_deleted(self, tmp_path):
        posts, comments = write_corpus(
            tmp_path,
            [post_line("p1", author="alice")],
            [comment_line("c1", "p1", author="[deleted]")],
        )
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        assert subreddit_metrics(store).unique_users == 1


def _eligible_corpus(tmp_path, per_month=100, posts_per_month=10):
    """12 months x per_month top-level comments on eligible posts."""
    months = [(2020, m) for m in range(5, 13)] + [(2021, m) for m in range(1, 5)]
    post_lines = []
    comment_lines = []
    c = 0
    for mi, (y, mo) in enumerate(months):
        for pi in range(posts_per_month):
            pid = f"p{mi:02d}{pi:02d}"
            post_lines.append(post_line(pid, created=ts(y, mo, 1)))
            for k in range(per_month // posts_per_month):
                comment_lines.append(
                    comment_line(f"c{c:05d}", pid, created=ts(y, mo, 2 + (k % 25)))
                )
                c += 1
    posts, comments = write_corpus(tmp_path, post_lines, comment_lines)
    return CorpusStore.ingest(posts, comments, tmp_path / "store")


class TestSampling:
    WINDOW = ("2020-05", "2021-04")

    def test_no_eligible_posts(self, tmp_path):
        post_lines = [post_line("p1", created=ts(2020, 6))]
        comment_lines = [
            comment_line(f"c{i}", "p1", created=ts(2020, 6, 3)) for i in range(3)
        ]
        posts, comments = write_corpus(tmp_path, post_lines, comment_lines)
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        result = sample_for_labeling(store, 10, self.WINDOW, seed=1)
        assert result.ids == []
        assert "no eligible posts" in result.notes

    def test_balanced_allocation(self, tmp_path):
        store = _eligible_corpus(tmp_path)
        result = sample_for_labeling(store, 1113, self.WINDOW, seed=7)
        assert len(result.ids) == 1113
        assert set(result.per_month.values()) == {92, 93}
        assert sum(1 for v in result.per_month.values() if v == 93) == 9

    def test_deterministic(self, tmp_path):
        store = _eligible_corpus(tmp_path)
        a = sample_for_labeling(store, 200, self.WINDOW, seed=42)
        b = sample_for_labeling(store, 200, self.WINDOW, seed=42)
        assert a.ids == b.ids

    def test_subset_of_bruteforce_eligible(self, tmp_path):
        store = _eligible_corpus(tmp_path)
        result = sample_for_labeling(store, 300, self.WINDOW, seed=3)
        eligible = set()
        for pid in store.posts:
            top = [c for c in store.comments.values() if c.post_id == pid and c.is_top_level]
            if 5 <= len(top) <= 20:
                eligible.update(c.id for c in top)
        assert set(result.ids) <= eligible
        assert len(set(result.ids)) == len(result.ids)

    def test_shortfall_topped_up(self, tmp_path):
        # May holds only 2 eligible comments; June/July are rich.  The
        # sparse post is still eligible (5 top-level comments overall).
        post_lines = [post_line(f"p{i}", created=ts(2020, 5, 1)) for i in range(3)]
        comment_lines = []
        c = 0
        # p0: 2 comments in May, 3 in June
        for y, mo in [(2020, 5), (2020, 5), (2020, 6), (2020, 6), (2020, 6)]:
            comment_lines.append(comment_line(f"c{c:04d}", "p0", created=ts(y, mo, 2 + c)))
            c += 1
        # p1/p2: 15 comments each in June/July
        for pid, mo in (("p1", 6), ("p2", 7)):
            for k in range(15):
                comment_lines.append(
                    comment_line(f"c{c:04d}", pid, created=ts(2020, mo, 2 + k))
                )
                c += 1
        posts, comments = write_corpus(tmp_path, post_lines, comment_lines)
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        result = sample_for_labeling(store, 15, ("2020-05", "2020-07"), seed=1)
        assert len(result.ids) == 15
        assert result.per_month["2020-05"] == 2
        assert not result.balanced
        assert any("imbalance" in note for note in result.notes)

    def test_closed_interval_bounds(self, tmp_path):
        # posts with exactly 5 and exactly 20 top-level comments are eligible
        post_lines = [
            post_line("p5", created=ts(2020, 6)),
            post_line("p20", created=ts(2020, 6)),
            post_line("p4", created=ts(2020, 6)),
            post_line("p21", created=ts(2020, 6)),
        ]
        comment_lines = []
        c = 0
        for pid, count in (("p5", 5), ("p20", 20), ("p4", 4), ("p21", 21)):
            for _ in range(count):
                comment_lines.append(comment_line(f"c{c:04d}", pid, created=ts(2020, 6, 3)))
                c += 1
        posts, comments = write_corpus(tmp_path, post_lines, comment_lines)
        store = CorpusStore.ingest(posts, comments, tmp_path / "store")
        result = sample_for_labeling(store, 25, ("2020-06", "2020-06"), seed=2)
        got_posts = {store.comments[cid].post_id for cid in result.ids}
        assert got_posts == {"p5", "p20"}
        assert len(result.ids) == 25


class TestFixture:
    def test_deterministic_byte_identical(self, tmp_path):
        generate_fixture(seed=9, n_posts=30, n_comments=200, n_labelled=50,
                         out_dir=tmp_path / "a")
        generate_fixture(seed=9, n_posts=30, n_comments=200, n_labelled=50,
                         out_dir=tmp_path / "b")
        for name in ("posts.jsonl", "comments.jsonl", "planted_labels.jsonl"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_planted_word_count_ordering(self):
        result = generate_fixture(seed=5, n_posts=40, n_comments=400)
        def mean_words(cls):
            bodies = [
                result.store.comments[cid].body
                for cid, c in result.labels.items()
                if c == cls
            ]
            return sum(len(b.split()) for b in bodies) / len(bodies)
        assert mean_words(EXPERT) > mean_words(1) > mean_words(OUT_OF_SCOPE)

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            generate_fixture(seed=1, n_posts=0, n_comments=10)
        with pytest.raises(ValueError):
            generate_fixture(seed=1, n_posts=10, n_comments=5)

    def test_labelled_ids_are_top_level(self):
        result = generate_fixture(seed=2, n_posts=20, n_comments=150, n_labelled=40)
        assert len(result.labelled_ids) == 40
        for cid in result.labelled_ids:
            assert result.store.comments[cid].is_top_level

    def test_store_loadable(self, tmp_path):
        generate_fixture(seed=3, n_posts=15, n_comments=80, out_dir=tmp_path / "s")
        store = CorpusStore.load(tmp_path / "s")
        assert len(store.posts) == 15
        assert len(store.comments) == 80
        assert not store.quarantined_comments
