"""Embedded on-disk corpus store with in-memory indexes.

A store directory holds the accepted input lines verbatim
(``posts.jsonl`` / ``comments.jsonl``) plus a manifest with ingestion
counts, so ingest-then-export round-trips well-formed inputs bit for
bit.  Indexes (by post id, comment id and author) are rebuilt on load;
after ingestion completes the store is read-only and safe for
concurrent readers.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .records import (
    CommentRecord,
    MalformedRecord,
    PostRecord,
    parse_comment,
    parse_post,
)

logger = logging.getLogger(__name__)

_MANIFEST = "manifest.json"
_POSTS = "posts.jsonl"
_COMMENTS = "comments.jsonl"
_FORMAT = "expertfind-store"


@dataclass
class IngestReport:
    n_posts: int = 0
    n_comments: int = 0
    malformed_lines: int = 0
    duplicate_ids: int = 0
    quarantined: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_posts": self.n_posts,
            "n_comments": self.n_comments,
            "malformed_lines": self.malformed_lines,
            "duplicate_ids": self.duplicate_ids,
            "quarantined": sorted(self.quarantined),
        }


@dataclass
class UserRecord:
    username: str
    first_seen_utc: float
    account_created_utc: Optional[float] = None
    n_posts: int = 0
    n_comments: int = 0


class CorpusStore:
    """Posts, comments and derived user records for one subreddit."""

    def __init__(self) -> None:
        self.posts: dict[str, PostRecord] = {}
        self.comments: dict[str, CommentRecord] = {}
        self.quarantined_comments: dict[str, CommentRecord] = {}
        self.report = IngestReport()
        self._post_lines: list[str] = []
        self._comment_lines: list[str] = []
        self._comments_by_post: dict[str, list[str]] = {}
        self._items_by_author: dict[str, list[Union[PostRecord, CommentRecord]]] = {}

    # -- construction --------------------------------------------------

    @classmethod
    def ingest(
        cls,
        posts_path: Union[str, Path],
        comments_path: Union[str, Path],
        store_dir: Union[str, Path],
    ) -> "CorpusStore":
        """Parse both dump files, build indexes, persist the store.

        Malformed lines are skipped and counted; duplicate ids keep the
        first occurrence; comments whose parent never resolves are
        quarantined (kept on disk and reported, excluded from the
        relational indexes).
        """
        store = cls()
        posts_path = Path(posts_path)
        comments_path = Path(comments_path)
        for path in (posts_path, comments_path):
            if not path.exists():
                raise FileNotFoundError(f"input file not found: {path}")

        for line in _iter_lines(posts_path):
            try:
                post = parse_post(line)
            except MalformedRecord as exc:
                store.report.malformed_lines += 1
                logger.warning("skipping malformed post line: %s", exc)
                continue
            if post.id in store.posts:
                store.report.duplicate_ids += 1
                continue
            store.posts[post.id] = post
            store._post_lines.append(line)

        pending: list[tuple[CommentRecord, str]] = []
        seen_comment_ids: set[str] = set()
        for line in _iter_lines(comments_path):
            try:
                comment = parse_comment(line)
            except MalformedRecord as exc:
                store.report.malformed_lines += 1
                logger.warning("skipping malformed comment line: %s", exc)
                continue
            if comment.id in seen_comment_ids:
                store.report.duplicate_ids += 1
                continue
            seen_comment_ids.add(comment.id)
            pending.append((comment, line))

        # resolve referential integrity once every record is known
        for comment, line in pending:
            post_ok = comment.post_id in store.posts
            parent_ok = comment.is_top_level or comment.parent_id in seen_comment_ids
            if post_ok and parent_ok:
                store.comments[comment.id] = comment
            else:
                store.quarantined_comments[comment.id] = comment
                store.report.quarantined.append(comment.id)
            store._comment_lines.append(line)

        store._build_indexes()
        store.report.n_posts = len(store.posts)
        store.report.n_comments = len(store.comments)
        store.save(store_dir)
        return store

    @classmethod
    def load(cls, store_dir: Union[str, Path]) -> "CorpusStore":
        store_dir = Path(store_dir)
        manifest_path = store_dir / _MANIFEST
        if not manifest_path.exists():
            raise FileNotFoundError(f"not a corpus store (no manifest): {store_dir}")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        if manifest.get("format") != _FORMAT:
            raise ValueError(f"unrecognized store format in {store_dir}")
        store = cls()
        quarantined = set(manifest.get("quarantined", []))
        for line in _iter_lines(store_dir / _POSTS):
            post = parse_post(line)
            store.posts[post.id] = post
            store._post_lines.append(line)
        for line in _iter_lines(store_dir / _COMMENTS):
            comment = parse_comment(line)
            if comment.id in quarantined:
                store.quarantined_comments[comment.id] = comment
            else:
                store.comments[comment.id] = comment
            store._comment_lines.append(line)
        store._build_indexes()
        report = manifest.get("report", {})
        store.report = IngestReport(
            n_posts=report.get("n_posts", len(store.posts)),
            n_comments=report.get("n_comments", len(store.comments)),
            malformed_lines=report.get("malformed_lines", 0),
            duplicate_ids=report.get("duplicate_ids", 0),
            quarantined=sorted(quarantined),
        )
        return store

    def save(self, store_dir: Union[str, Path]) -> None:
        store_dir = Path(store_dir)
        store_dir.mkdir(parents=True, exist_ok=True)
        (store_dir / _POSTS).write_text(
            "".join(line + "\n" for line in self._post_lines), encoding="utf-8"
        )
        (store_dir / _COMMENTS).write_text(
            "".join(line + "\n" for line in self._comment_lines), encoding="utf-8"
        )
        manifest = {
            "format": _FORMAT,
            "version": 1,
            "report": self.report.to_dict(),
            "quarantined": sorted(self.quarantined_comments),
        }
        (store_dir / _MANIFEST).write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )

    def export(self, posts_out: Union[str, Path], comments_out: Union[str, Path]) -> None:
        """Write back the accepted input lines verbatim."""
        Path(posts_out).write_text(
            "".join(line + "\n" for line in self._post_lines), encoding="utf-8"
        )
        Path(comments_out).write_text(
            "".join(line + "\n" for line in self._comment_lines), encoding="utf-8"
        )

    # -- indexes ---------------------------------------------------------

    def _build_indexes(self) -> None:
        self._comments_by_post = {}
        self._items_by_author = {}
        for post in self.posts.values():
            self._items_by_author.setdefault(post.author, []).append(post)
        for comment in self.comments.values():
            self._comments_by_post.setdefault(comment.post_id, []).append(comment.id)
            self._items_by_author.setdefault(comment.author, []).append(comment)
        for ids in self._comments_by_post.values():
            ids.sort(key=lambda cid: (self.comments[cid].created_utc, cid))

    # -- queries ---------------------------------------------------------

    def comments_of_post(self, post_id: str) -> list[CommentRecord]:
        return [self.comments[cid] for cid in self._comments_by_post.get(post_id, [])]

    def top_level_comments(self, post_id: str) -> list[CommentRecord]:
        return [c for c in self.comments_of_post(post_id) if c.is_top_level]

    def author_items(self, author: str) -> list[Union[PostRecord, CommentRecord]]:
        return list(self._items_by_author.get(author, []))

    def parent_of(self, comment: CommentRecord) -> Union[PostRecord, CommentRecord, None]:
        if comment.is_top_level:
            return self.posts.get(comment.post_id)
        return self.comments.get(comment.parent_id)

    def users(self) -> dict[str, UserRecord]:
        """Derived user records; first_seen is the min item timestamp."""
        out: dict[str, UserRecord] = {}
        for author, items in self._items_by_author.items():
            first_seen = min(item.created_utc for item in items)
            acct = None
            for item in items:
                if item.account_created_utc is not None:
                    acct = item.account_created_utc
                    break
            out[author] = UserRecord(
                username=author,
                first_seen_utc=first_seen,
                account_created_utc=acct,
                n_posts=sum(1 for i in items if isinstance(i, PostRecord)),
                n_comments=sum(1 for i in items if isinstance(i, CommentRecord)),
            )
        return out

    def snapshot_utc(self) -> float:
        """Latest item timestamp; reference point for tenure features."""
        stamps = [p.created_utc for p in self.posts.values()]
        stamps += [c.created_utc for c in self.comments.values()]
        return max(stamps) if stamps else 0.0


def _iter_lines(path: Path) -> Iterable[str]:
    if not path.exists():
        return
    with path.open(encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.strip():
                yield line
