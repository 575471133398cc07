import math
import random
import string

import pytest

from expertfind.textpipe import (
    asset_versions,
    char_entropy_bits,
    compute_readability,
    count_syllables,
    lemmatize,
    measure,
    preprocess,
    split_sentences,
    stopwords,
)
from expertfind.textpipe.tokens import _EXCEPTIONS


class TestPreprocess:
    def test_empty(self):
        out = preprocess("")
        assert out.tokens == ()
        assert out.raw_word_count == 0

    def test_spec_sentence(self):
        assert preprocess("The models ARE running!").tokens == ("model", "run")

    def test_link_code_emoji_stripping(self):
        assert preprocess("see https://a.io `x=1` \U0001f642").tokens == ("see",)

    def test_fenced_code_stripping(self):
        text = "use this\n```python\nfor i in range(10): print(i)\n```\nfinished"
        toks = preprocess(text).tokens
        assert "print" not in toks and "range" not in toks
        assert toks == ("use", "finish")

    def test_raw_count_at_least_kept(self):
        out = preprocess("The cat sat on the mat")
        assert out.raw_word_count == 6
        assert out.raw_word_count >= len(out.tokens)

    def test_idempotent(self):
        texts = [
            "The models ARE running!",
            "Distributed training of deep networks requires careful tuning.",
            "thanks, this helped a lot!! :)",
            "I was using pandas DataFrames for the preprocessing steps.",
        ]
        for text in texts:
            once = preprocess(text).tokens
            twice = preprocess(" ".join(once)).tokens
            assert twice == once

    def test_no_uppercase_random_strings(self):
        rng = random.Random(42)
        alphabet = string.ascii_letters + string.digits + " .,!?"
        for _ in range(50):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 200)))
            for tok in preprocess(text).tokens:
                assert tok == tok.lower()
                assert tok.isalpha()

    def test_tokens_never_stopwords(self):
        stop = stopwords()
        out = preprocess("He was using the boxes and doing the studies")
        assert all(t not in stop for t in out.tokens)


class TestLemmatize:
    @pytest.mark.parametrize(
        "word,lemma",
        [
            ("models", "model"),
            ("running", "run"),
            ("studies", "study"),
            ("tried", "try"),
            ("classes", "class"),
            ("boxes", "box"),
            ("making", "make"),
            ("trained", "train"),
            ("dropped", "drop"),
            ("children", "child"),
            ("analysis", "analysis"),
            ("corpus", "corpus"),
            ("data", "data"),
        ],
    )
    def test_known_forms(self, word, lemma):
        assert lemmatize(word) == lemma

    def test_exception_values_are_fixed_points(self):
        for value in set(_EXCEPTIONS.values()):
            assert lemmatize(value) == value

    def test_idempotent_on_random_words(self):
        rng = random.Random(1)
        for _ in range(300):
            w = "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randrange(1, 12)))
            assert lemmatize(lemmatize(w)) == lemmatize(w)


class TestSentences:
    def test_two_sentences(self):
        assert split_sentences("Hi. Bye.") == ["Hi.", "Bye."]

    def test_abbreviation_guard(self):
        assert len(split_sentences("e.g. this works.")) == 1

    def test_no_punctuation(self):
        assert split_sentences("no punctuation") == ["no punctuation"]

    def test_empty(self):
        assert split_sentences("   ") == []

    def test_question_exclamation(self):
        assert len(split_sentences("Really? Yes! Fine.")) == 3

    def test_ellipsis_is_one_boundary(self):
        assert len(split_sentences("Wait... what happened?")) == 2

    def test_decimal_number_not_split(self):
        assert len(split_sentences("pi is about 3.14 in value.")) == 1

    def test_initials_guard(self):
        assert len(split_sentences("J. Smith wrote the book.")) == 1


class TestSyllables:
    @pytest.mark.parametrize(
        "word,n",
        [
            ("cat", 1),
            ("data", 2),
            ("gobbledygook", 4),
            ("the", 1),
            ("table", 2),
            ("make", 1),
            ("regression", 3),
            ("statistics", 3),
            ("trained", 1),
            ("needed", 2),
            ("boxes", 2),
            ("makes", 1),
        ],
    )
    def test_counts(self, word, n):
        assert count_syllables(word) == n

    def test_minimum_one(self):
        assert count_syllables("hmm") == 1

    def test_rejects_non_alphabetic(self):
        with pytest.raises(ValueError):
            count_syllables("x=1")
        with pytest.raises(ValueError):
            count_syllables("")


class TestMeasure:
    def test_entropy_single_symbol(self):
        assert measure("aaaa").entropy_bits == 0.0

    def test_entropy_uniform_four(self):
        assert measure("abcd").entropy_bits == 2.0

    def test_entropy_self_concatenation_invariant(self):
        text = "The quick brown fox jumps over the lazy dog."
        assert measure(text + text).entropy_bits == pytest.approx(
            measure(text).entropy_bits
        )

    def test_entropy_bounded_by_alphabet(self):
        rng = random.Random(5)
        for _ in range(30):
            text = "".join(rng.choice("abcdefg ") for _ in range(rng.randrange(1, 80)))
            h = char_entropy_bits(text)
            assert 0.0 <= h <= math.log2(len(set(text))) + 1e-12

    def test_cat_sentence_formulas(self):
        m = measure("The cat sat on the mat.")
        assert m.word_count == 6
        assert m.syllable_count == 6
        assert m.sentence_count == 1
        # hand application of the pinned formulas
        assert m.readability.flesch_reading_ease == pytest.approx(
            206.835 - 1.015 * (6 / 1) - 84.6 * (6 / 6), abs=1e-9
        )
        assert m.readability.gunning_fog == pytest.approx(0.4 * (6 + 0), abs=1e-9)

    def test_reading_time(self):
        m = measure("The cat sat on the mat.")
        # 18 non-whitespace characters at 14.69 ms each
        assert m.char_count == 18
        assert m.reading_time_s == pytest.approx(18 * 14.69 / 1000.0)

    def test_counts_ordering_random_texts(self):
        rng = random.Random(9)
        vocab = ["cat", "information", "apple", "gobbledygook", "it", "x", "probability"]
        for _ in range(40):
            text = " ".join(rng.choice(vocab) for _ in range(rng.randrange(0, 60)))
            m = measure(text)
            assert 0 <= m.polysyllable_count <= m.word_count
            assert m.syllable_count >= m.word_count - text.count("'")
            assert m.difficult_word_count >= 0

    def test_fre_decreases_with_more_syllables(self):
        easy = compute_readability(10, 2, 12, 0, 40, 0, 0)
        dense = compute_readability(10, 2, 25, 5, 40, 0, 0)
        assert dense.flesch_reading_ease < easy.flesch_reading_ease

    def test_fre_monotone_on_real_pair(self):
        a = measure("The cat sat on the mat.")
        b = measure("The notorious feline reposed on the carpet.")
        assert b.readability.flesch_reading_ease < a.readability.flesch_reading_ease

    def test_sentiment_neutral_without_matches(self):
        m = measure("matrix eigenvalue decomposition")
        assert m.polarity == 0.0
        assert m.subjectivity == 0.0

    def test_sentiment_positive(self):
        m = measure("this is great and helpful, thanks")
        assert m.polarity > 0.3
        assert 0.0 < m.subjectivity <= 1.0

    def test_topic_scores(self):
        m = measure("the regression model uses gradient descent")
        assert m.data_science_score > 0.0
        assert 0.0 <= m.data_science_score <= 1.0
        assert set(m.category_scores) == {"programming", "technology"}
        code = measure("wrote a python function with a loop and an array")
        assert code.category_scores["programming"] > 0.0

    def test_empty_text(self):
        m = measure("")
        assert m.word_count == 0
        assert m.sentence_count == 0
        assert m.readability.flesch_reading_ease == 0.0
        assert m.entropy_bits == 0.0

    def test_smog_low_confidence_flag(self):
        short = measure("One sentence only.")
        long = measure("One. Two. Three. Four.")
        assert short.readability.smog_low_confidence
        assert not long.readability.smog_low_confidence

    def test_finite_for_single_word(self):
        m = measure("word")
        for v in m.readability.to_dict().values():
            if isinstance(v, float):
                assert math.isfinite(v)


class TestAssets:
    def test_versions_present(self):
        versions = asset_versions()
        assert set(versions) == {
            "stopwords",
            "familiar_words",
            "sentiment",
            "data_science",
            "programming",
            "technology",
        }
        assert all(v for v in versions.values())
