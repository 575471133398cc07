"""Text normalization: cleaning, tokenization, stopword removal and
rule-based lemmatization.

The pipeline applied by :func:`preprocess` is, in order: strip code
spans / hyperlinks / emoji, lowercase, tokenize into alphabetic words,
drop stopwords, lemmatize, and drop any lemma that lands back on the
stopword list (this last filter keeps the output stable under
re-application).  Non-alphabetic material never survives tokenization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .lexicons import stopwords

_FENCED_CODE = re.compile(r"```.*?```", re.DOTALL)
_INLINE_CODE = re.compile(r"`[^`\n]*`")
_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_WORD = re.compile(r"[a-z]+")

# emoji / pictograph / symbol blocks removed during cleaning
_EMOJI = re.compile(
    "["
    "\U0001f000-\U0001fbff"  # pictographs, emoticons, symbols
    "☀-➿"          # misc symbols and dingbats
    "←-⇿"          # arrows
    "︀-️"          # variation selectors
    "‍"                 # zero-width joiner
    "]+"
)


@dataclass(frozen=True)
class TokenList:
    """Normalized word forms plus the pre-filter word count."""

    tokens: tuple[str, ...]
    raw_word_count: int

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)


def strip_markup(text: str) -> str:
    """Remove fenced/backticked code spans, hyperlinks and emoji."""
    text = _FENCED_CODE.sub(" ", text)
    text = _INLINE_CODE.sub(" ", text)
    text = _URL.sub(" ", text)
    text = _EMOJI.sub(" ", text)
    return text


# Irregular forms the suffix rules cannot reach.  Values must be fixed
# points of lemmatize(); tests enforce that.
_EXCEPTIONS = {
    "ran": "run", "men": "man", "women": "woman", "children": "child",
    "feet": "foot", "teeth": "tooth", "mice": "mouse", "geese": "goose",
    "did": "do", "done": "do", "doing": "do", "went": "go", "gone": "go",
    "going": "go", "made": "make", "wrote": "write", "written": "write",
    "said": "say", "got": "get", "gotten": "get", "gave": "give",
    "given": "give", "took": "take", "taken": "take", "found": "find",
    "built": "build", "thought": "think", "knew": "know", "known": "know",
    "used": "use", "using": "use", "saw": "see", "seen": "see",
    "came": "come", "ate": "eat", "eaten": "eat", "left": "leave",
    "kept": "keep", "meant": "mean", "felt": "feel", "held": "hold",
    "told": "tell", "spoke": "speak", "spoken": "speak", "chose": "choose",
    "chosen": "choose", "began": "begin", "begun": "begin",
}

_VOWELS = set("aeiouy")


def _has_vowel(s: str) -> bool:
    return any(c in _VOWELS for c in s)


def _repair_stem(stem: str) -> str:
    """Undo consonant doubling and restore a dropped final e after
    stripping -ing/-ed."""
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
        return stem[:-1]  # running -> runn -> run
    if (
        len(stem) >= 3
        and stem[-1] not in _VOWELS
        and stem[-1] not in "wx"
        and stem[-2] in _VOWELS
        and stem[-3] not in _VOWELS
    ):
        return stem + "e"  # making -> mak -> make
    return stem


@lru_cache(maxsize=65536)
def lemmatize(word: str) -> str:
    """Rule-based suffix normalization with an irregular-form table.

    Deterministic and dependency-free; imperfect by design (no
    part-of-speech context), but idempotent: lemmatize(lemmatize(w))
    == lemmatize(w).
    """
    w = word.lower()
    if w in _EXCEPTIONS:
        return _EXCEPTIONS[w]
    if len(w) >= 5 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) >= 5 and w.endswith("ied"):
        return w[:-3] + "y"
    if len(w) >= 5 and w.endswith("sses"):
        return w[:-2]
    if len(w) >= 4 and w.endswith("es") and w[-3] in "sxzo":
        return w[:-2]
    if len(w) >= 5 and (w.endswith("ches") or w.endswith("shes")):
        return w[:-2]
    if (
        len(w) >= 4
        and w.endswith("s")
        and not w.endswith(("ss", "us", "is"))
    ):
        return w[:-1]
    if len(w) >= 6 and w.endswith("ing") and _has_vowel(w[:-3]) and len(w[:-3]) >= 3:
        return _repair_stem(w[:-3])
    if len(w) >= 5 and w.endswith("ed") and _has_vowel(w[:-2]) and len(w[:-2]) >= 3:
        return _repair_stem(w[:-2])
    return w


def word_tokens(text: str) -> list[str]:
    """Lowercase alphabetic tokens of already-cleaned text."""
    return _WORD.findall(text.lower())


def preprocess(text: str) -> TokenList:
    """Full normalization pipeline; empty input yields an empty TokenList."""
    cleaned = strip_markup(text)
    raw = word_tokens(cleaned)
    stop = stopwords()
    kept = [t for t in raw if t not in stop]
    lemmas = [lemmatize(t) for t in kept]
    final = tuple(lm for lm in lemmas if lm not in stop)
    return TokenList(tokens=final, raw_word_count=len(raw))
