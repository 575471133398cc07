"""Sentence splitting on terminal punctuation with an abbreviation guard."""

from __future__ import annotations

_TERMINAL = ".!?"

# Lowercased abbreviations that end with a period but do not terminate a
# sentence.  Multi-dot forms ("e.g") are matched against the whole
# dotted token preceding the period.
ABBREVIATIONS = frozenset(
    {
        "e.g", "i.e", "etc", "vs", "cf", "al", "approx", "ca", "dept",
        "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "fig", "eq",
        "sec", "min", "max", "no", "vol", "inc", "ltd", "co", "est",
        "u.s", "u.k", "a.m", "p.m", "ph.d", "m.sc", "b.sc",
    }
)


def _token_before(text: str, idx: int) -> str:
    """Dotted word immediately before position idx ("e.g" for 'e.g.')."""
    k = idx - 1
    while k >= 0 and (text[k].isalpha() or text[k] == "."):
        k -= 1
    return text[k + 1 : idx].lower().strip(".")


def split_sentences(text: str) -> list[str]:
    """Split on runs of .!? followed by whitespace or end of text.

    A single period preceded by a guarded abbreviation or a lone letter
    (initials) does not split.  Text without terminal punctuation is one
    sentence; whitespace-only text yields no sentences.
    """
    stripped = text.strip()
    if not stripped:
        return []
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(stripped)
    while i < n:
        if stripped[i] in _TERMINAL:
            j = i
            while j + 1 < n and stripped[j + 1] in _TERMINAL:
                j += 1
            at_end = j + 1 >= n
            followed_by_space = not at_end and stripped[j + 1].isspace()
            boundary = at_end or followed_by_space
            if boundary and stripped[i] == "." and j == i:
                word = _token_before(stripped, i)
                if word in ABBREVIATIONS or len(word) == 1:
                    boundary = False
            if boundary:
                chunk = stripped[start : j + 1].strip()
                if chunk:
                    sentences.append(chunk)
                start = j + 1
            i = j + 1
        else:
            i += 1
    tail = stripped[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
