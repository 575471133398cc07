"""Per-text NLP measurements feeding the NLP feature family."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .lexicons import (
    CATEGORY_NAMES,
    familiar_words,
    sentiment_lexicon,
    topic_lexicon,
)
from .readability import ReadabilityScores, compute_readability
from .sentences import split_sentences
from .syllables import count_syllables
from .tokens import lemmatize

# word tokens for counting purposes: letter runs, apostrophes allowed
# inside ("don't" is one word)
_COUNT_WORD = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)*")
_NON_ALPHA = re.compile(r"[^a-z]")

# 14.69 ms per character, the per-character latency convention of
# common readability tooling
MS_PER_CHAR = 14.69


@dataclass(frozen=True)
class TextMetrics:
    word_count: int
    syllable_count: int
    polysyllable_count: int
    char_count: int
    difficult_word_count: int
    avg_word_length: float
    avg_sentence_length: float
    sentence_count: int
    reading_time_s: float
    entropy_bits: float
    polarity: float
    subjectivity: float
    data_science_score: float
    category_scores: dict[str, float] = field(default_factory=dict)
    readability: ReadabilityScores = None  # type: ignore[assignment]

    def to_dict(self) -> dict:
        d = {
            "word_count": self.word_count,
            "syllable_count": self.syllable_count,
            "polysyllable_count": self.polysyllable_count,
            "char_count": self.char_count,
            "difficult_word_count": self.difficult_word_count,
            "avg_word_length": self.avg_word_length,
            "avg_sentence_length": self.avg_sentence_length,
            "sentence_count": self.sentence_count,
            "reading_time_s": self.reading_time_s,
            "entropy_bits": self.entropy_bits,
            "polarity": self.polarity,
            "subjectivity": self.subjectivity,
            "data_science_score": self.data_science_score,
        }
        for name, score in self.category_scores.items():
            d[f"category_{name}"] = score
        d.update(self.readability.to_dict())
        return d


def char_entropy_bits(text: str) -> float:
    """Shannon entropy of the character distribution, in bits/char."""
    if not text:
        return 0.0
    counts = Counter(text)
    n = len(text)
    h = 0.0
    for c in counts.values():
        p = c / n
        h -= p * math.log2(p)
    return h


def _lexicon_hits(words_lower: list[str], lexicon: frozenset[str]) -> int:
    hits = 0
    for w in words_lower:
        if w in lexicon or lemmatize(w) in lexicon:
            hits += 1
    return hits


def measure(text: str) -> TextMetrics:
    """Populate every per-text measurement.

    Counts run over the raw text (stopwords included): readability
    formulas are defined on natural prose, not on the preprocessed
    token stream.  Sentiment is the mean over lexicon matches; no
    matches means neutral (0, 0).  Topic scores are matched-token
    count over word count.
    """
    words = _COUNT_WORD.findall(text)
    word_count = len(words)
    letters_only = [_NON_ALPHA.sub("", w.lower()) for w in words]
    letters_only = [w for w in letters_only if w]

    syllables = [count_syllables(w) for w in letters_only]
    syllable_count = sum(syllables)
    polysyllable_count = sum(1 for s in syllables if s >= 3)

    char_count = sum(1 for c in text if not c.isspace())
    letter_chars = sum(1 for c in text if c.isalnum())

    familiar = familiar_words()
    difficult = 0
    unfamiliar = 0
    for w, s in zip(letters_only, syllables):
        known = w in familiar or lemmatize(w) in familiar
        if not known:
            unfamiliar += 1
            if s >= 2:
                difficult += 1

    sentences = split_sentences(text)
    sentence_count = len(sentences)

    avg_word_length = (
        sum(len(w) for w in letters_only) / len(letters_only) if letters_only else 0.0
    )
    avg_sentence_length = char_count / sentence_count if sentence_count else 0.0

    sentiment = sentiment_lexicon()
    pol_hits = [sentiment[w] for w in letters_only if w in sentiment]
    if pol_hits:
        polarity = sum(p for p, _ in pol_hits) / len(pol_hits)
        subjectivity = sum(s for _, s in pol_hits) / len(pol_hits)
    else:
        polarity = 0.0
        subjectivity = 0.0

    ds_hits = _lexicon_hits(letters_only, topic_lexicon("data_science"))
    data_science_score = ds_hits / word_count if word_count else 0.0
    category_scores = {}
    for cat in CATEGORY_NAMES:
        hits = _lexicon_hits(letters_only, topic_lexicon(cat))
        category_scores[cat] = hits / word_count if word_count else 0.0

    readability = compute_readability(
        words=word_count,
        sentences=sentence_count,
        syllables=syllable_count,
        polysyllables=polysyllable_count,
        letter_chars=letter_chars,
        difficult_words=difficult,
        unfamiliar_words=unfamiliar,
    )

    return TextMetrics(
        word_count=word_count,
        syllable_count=syllable_count,
        polysyllable_count=polysyllable_count,
        char_count=char_count,
        difficult_word_count=difficult,
        avg_word_length=avg_word_length,
        avg_sentence_length=avg_sentence_length,
        sentence_count=sentence_count,
        reading_time_s=char_count * MS_PER_CHAR / 1000.0,
        entropy_bits=char_entropy_bits(text),
        polarity=polarity,
        subjectivity=subjectivity,
        data_science_score=data_science_score,
        category_scores=category_scores,
        readability=readability,
    )
