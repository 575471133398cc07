"""Heuristic English syllable counting.

Counts vowel groups (y counts as a vowel) and then applies the usual
correction cascade: silent trailing e, consonant+le endings, and the
-ed / -es suffixes that rarely add a syllable.  Always returns at
least 1 for a non-empty alphabetic word.
"""

from __future__ import annotations

import re
from functools import lru_cache

_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_VOWELS = set("aeiouy")


@lru_cache(maxsize=65536)
def count_syllables(word: str) -> int:
    if not word or not word.isalpha():
        raise ValueError(f"expected a non-empty alphabetic word, got {word!r}")
    w = word.lower()
    count = len(_VOWEL_GROUP.findall(w))
    if count == 0:
        return 1
    if w.endswith("e") and not w.endswith("ee"):
        if w.endswith("le") and len(w) >= 3 and w[-3] not in _VOWELS:
            pass  # consonant+le keeps its syllable ("table", "little")
        else:
            count -= 1
    elif w.endswith("ed") and len(w) > 3 and w[-3] not in "aeiouydt":
        count -= 1  # "trained" but not "needed"/"agreed"
    elif w.endswith("es") and len(w) > 3 and w[-3] not in "aeiouyscxzhg":
        count -= 1  # "makes" but not "boxes"/"classes"
    return max(count, 1)
