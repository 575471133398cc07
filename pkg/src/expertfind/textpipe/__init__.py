"""Text preprocessing and per-text NLP measurements."""

from .lexicons import asset_versions, familiar_words, sentiment_lexicon, stopwords, topic_lexicon
from .measure import TextMetrics, char_entropy_bits, measure
from .readability import ReadabilityScores, compute_readability
from .sentences import split_sentences
from .syllables import count_syllables
from .tokens import TokenList, lemmatize, preprocess, strip_markup, word_tokens

__all__ = [
    "TextMetrics",
    "TokenList",
    "ReadabilityScores",
    "asset_versions",
    "char_entropy_bits",
    "compute_readability",
    "count_syllables",
    "familiar_words",
    "lemmatize",
    "measure",
    "preprocess",
    "sentiment_lexicon",
    "split_sentences",
    "stopwords",
    "strip_markup",
    "topic_lexicon",
    "word_tokens",
]
