"""Rate-limited, resumable remote fetching.

The upstream API allows pulling at most 60 items per minute; the
limiter enforces that over a rolling 60-second window regardless of
how the transport pages.  Progress is checkpointed after every emitted
item (plain-text file holding the last-seen fullname id) so an
interrupted fetch resumes without duplicates.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Optional

logger = logging.getLogger(__name__)

RATE_LIMIT_ITEMS = 60
RATE_WINDOW_S = 60.0
MAX_RETRIES = 5

# transport: (after_fullname | None, limit) -> list of item dicts, each
# carrying a "name" fullname field; raises on network failure
Transport = Callable[[Optional[str], int], list]


@dataclass
class FetchConfig:
    base_url: str
    subreddit: str
    checkpoint_path: str
    page_size: int = 25
    max_items: Optional[int] = None


class RollingRateLimiter:
    """At most max_items emissions inside any rolling window."""

    def __init__(
        self,
        max_items: int = RATE_LIMIT_ITEMS,
        window_s: float = RATE_WINDOW_S,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.max_items = max_items
        self.window_s = window_s
        self.clock = clock
        self.sleep = sleep
        self._emissions: deque[float] = deque()

    def acquire(self) -> None:
        now = self.clock()
        while self._emissions and now - self._emissions[0] >= self.window_s:
            self._emissions.popleft()
        if len(self._emissions) >= self.max_items:
            wait = self._emissions[0] + self.window_s - now
            if wait > 0:
                self.sleep(wait)
            now = self.clock()
            while self._emissions and now - self._emissions[0] >= self.window_s:
                self._emissions.popleft()
        self._emissions.append(self.clock())


def read_checkpoint(path: str | Path) -> Optional[str]:
    p = Path(path)
    if not p.exists():
        return None
    content = p.read_text(encoding="utf-8").strip()
    return content or None


def write_checkpoint(path: str | Path, fullname: str) -> None:
    Path(path).write_text(fullname + "\n", encoding="utf-8")


def default_transport(config: FetchConfig) -> Transport:
    """Listing-endpoint transport over HTTP (requests)."""
    import requests

    def fetch_page(after: Optional[str], limit: int) -> list:
        url = f"{config.base_url.rstrip('/')}/r/{config.subreddit}/new.json"
        params = {"limit": limit}
        if after:
            params["after"] = after
        resp = requests.get(url, params=params, timeout=30)
        resp.raise_for_status()
        children = resp.json()["data"]["children"]
        return [child["data"] for child in children]

    return fetch_page


def fetch_remote(
    config: FetchConfig,
    transport: Optional[Transport] = None,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
) -> Iterator[dict]:
    """Stream items from the remote listing, newest-first paging.

    Yields raw item dicts.  Network failures retry with exponential
    backoff (1, 2, 4, 8, 16 s); after MAX_RETRIES consecutive failures
    the generator checkpoints and stops.  An item is only checkpointed
    after it has been yielded, so restarts re-fetch nothing.
    """
    transport = transport or default_transport(config)
    limiter = RollingRateLimiter(clock=clock, sleep=sleep)
    after = read_checkpoint(config.checkpoint_path)
    emitted = 0
    while True:
        page = None
        for attempt in range(MAX_RETRIES):
            try:
                page = transport(after, config.page_size)
                break
            except Exception as exc:  # noqa: BLE001 - transport errors vary
                backoff = 2.0**attempt
                logger.warning(
                    "fetch attempt %d/%d failed (%s); backing off %.0fs",
                    attempt + 1,
                    MAX_RETRIES,
                    exc,
                    backoff,
                )
                sleep(backoff)
        if page is None:
            logger.error("giving up after %d attempts; checkpoint kept", MAX_RETRIES)
            return
        if not page:
            return  # upstream exhausted; checkpoint unchanged
        for item in page:
            limiter.acquire()
            yield item
            fullname = item.get("name") or item["id"]
            write_checkpoint(config.checkpoint_path, fullname)
            after = fullname
            emitted += 1
            if config.max_items is not None and emitted >= config.max_items:
                return
