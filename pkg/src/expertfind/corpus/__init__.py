"""Corpus ingestion, storage, metrics, sampling and fetching."""

from .fetch import (
    FetchConfig,
    RollingRateLimiter,
    fetch_remote,
    read_checkpoint,
    write_checkpoint,
)
from .fixture import FixtureResult, generate_fixture, read_labels, write_labels
from .metrics import SubredditMetrics, subreddit_metrics
from .records import CommentRecord, PostRecord, parse_comment, parse_post
from .sampling import SampleResult, month_key, month_range, sample_for_labeling
from .store import CorpusStore, IngestReport, UserRecord

__all__ = [
    "CommentRecord",
    "CorpusStore",
    "FetchConfig",
    "FixtureResult",
    "IngestReport",
    "PostRecord",
    "RollingRateLimiter",
    "SampleResult",
    "SubredditMetrics",
    "UserRecord",
    "fetch_remote",
    "generate_fixture",
    "month_key",
    "month_range",
    "parse_comment",
    "parse_post",
    "read_checkpoint",
    "read_labels",
    "sample_for_labeling",
    "subreddit_metrics",
    "write_checkpoint",
    "write_labels",
]
