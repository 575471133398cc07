"""Labeling-sample selection: top-level comments of moderately active
posts, spread evenly across calendar months."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .store import CorpusStore

# posts are eligible when their top-level comment count falls in this
# closed interval: enough discussion, not overloaded
MIN_TOP_LEVEL = 5
MAX_TOP_LEVEL = 20


@dataclass
class SampleResult:
    ids: list[str]
    per_month: dict[str, int] = field(default_factory=dict)
    requested: int = 0
    shortfall: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def balanced(self) -> bool:
        if not self.per_month:
            return True
        counts = list(self.per_month.values())
        return max(counts) - min(counts) <= 1


def month_key(created_utc: float) -> str:
    """UTC calendar month of a timestamp, as 'YYYY-MM'."""
    dt = datetime.fromtimestamp(created_utc, tz=timezone.utc)
    return f"{dt.year:04d}-{dt.month:02d}"


def month_range(start: str, end: str) -> list[str]:
    """Inclusive list of 'YYYY-MM' keys from start to end."""
    y0, m0 = (int(x) for x in start.split("-"))
    y1, m1 = (int(x) for x in end.split("-"))
    if (y0, m0) > (y1, m1):
        raise ValueError(f"empty month window: {start}..{end}")
    out = []
    y, m = y0, m0
    while (y, m) <= (y1, m1):
        out.append(f"{y:04d}-{m:02d}")
        m += 1
        if m > 12:
            m, y = 1, y + 1
    return out


def sample_for_labeling(
    store: CorpusStore, n: int, window: tuple[str, str], seed: int
) -> SampleResult:
    """Pick n top-level comment ids for manual labeling.

    Only comments on posts with MIN..MAX top-level comments qualify.
    The target allocation differs by at most one across the window's
    months (extra items go to the earliest months); a month that cannot
    fill its quota is topped up from months with spare candidates, and
    the imbalance is reported.  Fully deterministic for a fixed seed.
    """
    if n <= 0:
        raise ValueError("sample size must be positive")
    months = month_range(*window)
    result = SampleResult(ids=[], requested=n)

    eligible_posts = {
        pid
        for pid in store.posts
        if MIN_TOP_LEVEL <= len(store.top_level_comments(pid)) <= MAX_TOP_LEVEL
    }
    if not eligible_posts:
        result.notes.append("no eligible posts")
        result.shortfall = n
        return result

    by_month: dict[str, list[str]] = {m: [] for m in months}
    for comment in store.comments.values():
        if not comment.is_top_level or comment.post_id not in eligible_posts:
            continue
        mk = month_key(comment.created_utc)
        if mk in by_month:
            by_month[mk].append(comment.id)

    rng = random.Random(seed)
    shuffled: dict[str, list[str]] = {}
    for m in months:
        candidates = sorted(
            by_month[m], key=lambda cid: (store.comments[cid].created_utc, cid)
        )
        rng.shuffle(candidates)
        shuffled[m] = candidates

    base, extra = divmod(n, len(months))
    target = {m: base + (1 if i < extra else 0) for i, m in enumerate(months)}

    taken = {m: min(target[m], len(shuffled[m])) for m in months}
    deficit = n - sum(taken.values())
    while deficit > 0:
        # top up the month currently holding the fewest items, earliest first
        spare = [m for m in months if taken[m] < len(shuffled[m])]
        if not spare:
            break
        pick = min(spare, key=lambda m: (taken[m], months.index(m)))
        taken[pick] += 1
        deficit -= 1

    for m in months:
        result.ids.extend(shuffled[m][: taken[m]])
        result.per_month[m] = taken[m]
    result.shortfall = n - len(result.ids)
    if result.shortfall > 0:
        result.notes.append(f"only {len(result.ids)} eligible comments available")
    if not result.balanced:
        result.notes.append("per-month allocation imbalance (sparse months topped up)")
    return result
