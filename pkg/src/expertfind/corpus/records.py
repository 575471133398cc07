"""Record types for posts, comments and users, plus parsing from the
line-delimited dump format.

Input files follow the Reddit API wrapper field conventions so real
dumps load unmodified: posts carry ``selftext`` / ``total_awards_received``,
comments carry ``link_id`` / ``parent_id`` with optional ``t1_`` / ``t3_``
fullname prefixes (stripped on ingestion).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional


class MalformedRecord(ValueError):
    pass


def strip_fullname(value: str) -> str:
    """'t3_abc' -> 'abc'; bare ids pass through."""
    if len(value) > 3 and value[:3] in ("t1_", "t2_", "t3_", "t4_", "t5_"):
        return value[3:]
    return value


@dataclass(frozen=True)
class PostRecord:
    id: str
    author: str
    title: str
    body: str
    created_utc: float
    score: int
    upvote_ratio: float
    total_awards: int
    subreddit: str
    account_created_utc: Optional[float] = None


@dataclass(frozen=True)
class CommentRecord:
    id: str
    post_id: str
    parent_id: str
    author: str
    body: str
    created_utc: float
    score: int
    is_top_level: bool
    account_created_utc: Optional[float] = None


def _require(obj: dict, key: str):
    if key not in obj:
        raise MalformedRecord(f"missing field {key!r}")
    return obj[key]


def parse_post(line: str) -> PostRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid json: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord("record is not an object")
    pid = strip_fullname(str(_require(obj, "id")))
    if not pid:
        raise MalformedRecord("empty id")
    created = float(_require(obj, "created_utc"))
    if created <= 0:
        raise MalformedRecord("created_utc must be positive")
    ratio = float(obj.get("upvote_ratio", 1.0))
    if not 0.0 <= ratio <= 1.0:
        raise MalformedRecord(f"upvote_ratio out of [0,1]: {ratio}")
    awards = int(obj.get("total_awards_received", 0))
    if awards < 0:
        raise MalformedRecord("negative award count")
    acct = obj.get("author_created_utc")
    return PostRecord(
        id=pid,
        author=str(obj.get("author", "[deleted]")),
        title=str(obj.get("title", "")),
        body=str(obj.get("selftext", "")),
        created_utc=created,
        score=int(obj.get("score", 0)),
        upvote_ratio=ratio,
        total_awards=awards,
        subreddit=str(obj.get("subreddit", "")),
        account_created_utc=float(acct) if acct is not None else None,
    )


def parse_comment(line: str) -> CommentRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid json: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord("record is not an object")
    cid = strip_fullname(str(_require(obj, "id")))
    if not cid:
        raise MalformedRecord("empty id")
    post_id = strip_fullname(str(_require(obj, "link_id")))
    parent_id = strip_fullname(str(_require(obj, "parent_id")))
    created = float(_require(obj, "created_utc"))
    if created <= 0:
        raise MalformedRecord("created_utc must be positive")
    acct = obj.get("author_created_utc")
    return CommentRecord(
        id=cid,
        post_id=post_id,
        parent_id=parent_id,
        author=str(obj.get("author", "[deleted]")),
        body=str(obj.get("body", "")),
        created_utc=created,
        score=int(obj.get("score", 0)),
        is_top_level=(parent_id == post_id),
        account_created_utc=float(acct) if acct is not None else None,
    )


def post_to_json(post: PostRecord) -> str:
    obj = {
        "id": post.id,
        "author": post.author,
        "title": post.title,
        "selftext": post.body,
        "created_utc": post.created_utc,
        "score": post.score,
        "upvote_ratio": post.upvote_ratio,
        "total_awards_received": post.total_awards,
        "subreddit": post.subreddit,
    }
    if post.account_created_utc is not None:
        obj["author_created_utc"] = post.account_created_utc
    return json.dumps(obj, sort_keys=True)


def comment_to_json(comment: CommentRecord) -> str:
    obj = {
        "id": comment.id,
        "link_id": f"t3_{comment.post_id}",
        "parent_id": (
            f"t3_{comment.parent_id}" if comment.is_top_level else f"t1_{comment.parent_id}"
        ),
        "author": comment.author,
        "body": comment.body,
        "created_utc": comment.created_utc,
        "score": comment.score,
    }
    if comment.account_created_utc is not None:
        obj["author_created_utc"] = comment.account_created_utc
    return json.dumps(obj, sort_keys=True)
