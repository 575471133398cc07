"""The eight readability indices, computed from explicit counts.

Pinned formulas (W words, S sentences, Sy syllables, poly words with
>= 3 syllables, chars letters+digits, L letters per 100 words, Sm
sentences per 100 words):

  Flesch Reading Ease        206.835 - 1.015*(W/S) - 84.6*(Sy/W)
  Flesch-Kincaid grade       0.39*(W/S) + 11.8*(Sy/W) - 15.59
  Gunning Fog                0.4*((W/S) + 100*poly/W)
  SMOG                       1.0430*sqrt(poly*30/S) + 3.1291
  Automated Readability      4.71*(chars/W) + 0.5*(W/S) - 21.43
  Coleman-Liau               0.0588*L - 0.296*Sm - 15.8
  Dale-Chall                 0.1579*pct_difficult + 0.0496*(W/S)
                             (+3.6365 when pct_difficult > 5)
  Spache (revised)           0.121*(W/S) + 0.082*pct_unfamiliar + 0.659

pct_difficult counts words with >= 2 syllables that are missing from
the familiar-word list; pct_unfamiliar counts any word missing from
that list.  SMOG is computed even below 3 sentences but flagged as
low-confidence there (comments are short; refusing output would null
the feature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ReadabilityScores:
    flesch_reading_ease: float
    flesch_kincaid_grade: float
    gunning_fog: float
    smog: float
    automated_readability_index: float
    coleman_liau: float
    dale_chall: float
    spache: float
    smog_low_confidence: bool = False

    def to_dict(self) -> dict:
        return {
            "flesch_reading_ease": self.flesch_reading_ease,
            "flesch_kincaid_grade": self.flesch_kincaid_grade,
            "gunning_fog": self.gunning_fog,
            "smog": self.smog,
            "automated_readability_index": self.automated_readability_index,
            "coleman_liau": self.coleman_liau,
            "dale_chall": self.dale_chall,
            "spache": self.spache,
            "smog_low_confidence": self.smog_low_confidence,
        }


ZERO_SCORES = ReadabilityScores(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, True)


def compute_readability(
    words: int,
    sentences: int,
    syllables: int,
    polysyllables: int,
    letter_chars: int,
    difficult_words: int,
    unfamiliar_words: int,
) -> ReadabilityScores:
    """Evaluate all indices; degenerate texts (no words) score 0 across
    the board.  With >= 1 word, sentences is clamped to >= 1 so every
    index stays finite."""
    if words <= 0:
        return ZERO_SCORES
    s = max(sentences, 1)
    wps = words / s
    syl_per_word = syllables / words
    fre = 206.835 - 1.015 * wps - 84.6 * syl_per_word
    fk = 0.39 * wps + 11.8 * syl_per_word - 15.59
    fog = 0.4 * (wps + 100.0 * polysyllables / words)
    smog = 1.0430 * math.sqrt(polysyllables * 30.0 / s) + 3.1291
    ari = 4.71 * (letter_chars / words) + 0.5 * wps - 21.43
    l_per_100 = 100.0 * letter_chars / words
    s_per_100 = 100.0 * s / words
    coleman = 0.0588 * l_per_100 - 0.296 * s_per_100 - 15.8
    pct_difficult = 100.0 * difficult_words / words
    dale = 0.1579 * pct_difficult + 0.0496 * wps
    if pct_difficult > 5.0:
        dale += 3.6365
    pct_unfamiliar = 100.0 * unfamiliar_words / words
    spache = 0.121 * wps + 0.082 * pct_unfamiliar + 0.659
    return ReadabilityScores(
        flesch_reading_ease=fre,
        flesch_kincaid_grade=fk,
        gunning_fog=fog,
        smog=smog,
        automated_readability_index=ari,
        coleman_liau=coleman,
        dale_chall=dale,
        spache=spache,
        smog_low_confidence=s < 3,
    )
