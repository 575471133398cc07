"""Subreddit activity metrics used for community selection."""

from __future__ import annotations

from dataclasses import dataclass

from .store import CorpusStore


@dataclass(frozen=True)
class SubredditMetrics:
    unique_users: int
    submission_count: int
    comment_count: int
    avg_comments_per_submission: float
    avg_comment_length: float
    avg_score: float
    avg_upvote_ratio: float
    avg_awards: float
    empty: bool = False

    def to_dict(self) -> dict:
        return {
            "unique_users": self.unique_users,
            "submission_count": self.submission_count,
            "comment_count": self.comment_count,
            "avg_comments_per_submission": self.avg_comments_per_submission,
            "avg_comment_length": self.avg_comment_length,
            "avg_score": self.avg_score,
            "avg_upvote_ratio": self.avg_upvote_ratio,
            "avg_awards": self.avg_awards,
            "empty": self.empty,
        }


def subreddit_metrics(store: CorpusStore) -> SubredditMetrics:
    """Activity profile of the whole store.

    Comment length is measured in characters; per-post means run over
    submissions, comments-per-submission over all (sub)comments.  An
    empty store reports zeros with the ``empty`` flag raised.
    """
    posts = list(store.posts.values())
    comments = list(store.comments.values())
    n_posts = len(posts)
    n_comments = len(comments)
    if n_posts == 0 and n_comments == 0:
        return SubredditMetrics(0, 0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, empty=True)
    authors = {p.author for p in posts} | {c.author for c in comments}
    authors.discard("[deleted]")
    return SubredditMetrics(
        unique_users=len(authors),
        submission_count=n_posts,
        comment_count=n_comments,
        avg_comments_per_submission=(n_comments / n_posts if n_posts else 0.0),
        avg_comment_length=(
            sum(len(c.body) for c in comments) / n_comments if n_comments else 0.0
        ),
        avg_score=(sum(p.score for p in posts) / n_posts if n_posts else 0.0),
        avg_upvote_ratio=(
            sum(p.upvote_ratio for p in posts) / n_posts if n_posts else 0.0
        ),
        avg_awards=(sum(p.total_awards for p in posts) / n_posts if n_posts else 0.0),
    )
