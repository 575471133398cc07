"""Loaders for the versioned lexicon assets shipped with the package.

Every asset is a UTF-8 text file with a header line of the form
``# lexicon: <name> v<version>`` followed by one term per line.  The
sentiment lexicon additionally carries tab-separated polarity and
subjectivity columns.  Assets are pinned in the repo so that every
measurement is reproducible; there is no canonical universal list for
any of these, so the version travels with the results.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_HEADER_RE = re.compile(r"#\s*lexicon:\s*(?P<name>[\w-]+)\s+v(?P<version>[\w.]+)")


class LexiconError(ValueError):
    pass


def _read_asset(filename: str) -> tuple[str, str, list[str]]:
    """Return (name, version, payload lines) for an asset file."""
    text = (
        resources.files("expertfind.textpipe")
        .joinpath("assets", filename)
        .read_text(encoding="utf-8")
    )
    lines = text.splitlines()
    if not lines:
        raise LexiconError(f"{filename}: empty asset")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise LexiconError(f"{filename}: missing '# lexicon: <name> v<version>' header")
    payload = [ln.strip() for ln in lines[1:] if ln.strip() and not ln.startswith("#")]
    return m.group("name"), m.group("version"), payload


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    _, _, terms = _read_asset("stopwords.txt")
    return frozenset(terms)


@lru_cache(maxsize=None)
def familiar_words() -> frozenset[str]:
    _, _, terms = _read_asset("familiar_words.txt")
    return frozenset(terms)


@lru_cache(maxsize=None)
def sentiment_lexicon() -> dict[str, tuple[float, float]]:
    """term -> (polarity in [-1,1], subjectivity in [0,1])."""
    _, _, rows = _read_asset("sentiment.tsv")
    table: dict[str, tuple[float, float]] = {}
    for row in rows:
        parts = row.split("\t")
        if len(parts) != 3:
            raise LexiconError(f"sentiment.tsv: bad row {row!r}")
        table[parts[0]] = (float(parts[1]), float(parts[2]))
    return table


@lru_cache(maxsize=None)
def topic_lexicon(category: str) -> frozenset[str]:
    """Fixed per-category term list; categories: data_science, programming,
    technology."""
    _, _, terms = _read_asset(f"lexicon_{category}.txt")
    return frozenset(terms)


CATEGORY_NAMES = ("programming", "technology")


@lru_cache(maxsize=None)
def asset_versions() -> dict[str, str]:
    """Name -> version for every shipped asset (recorded in run manifests)."""
    versions: dict[str, str] = {}
    for filename in (
        "stopwords.txt",
        "familiar_words.txt",
        "sentiment.tsv",
        "lexicon_data_science.txt",
        "lexicon_programming.txt",
        "lexicon_technology.txt",
    ):
        name, version, _ = _read_asset(filename)
        versions[name] = version
    return versions
