"""Numeric features from free-text essay responses.

Counts, Flesch readability scores, lexicon sentiment and a
monosyllable/polysyllable ratio. Everything here is a pure function of its
inputs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np

from .tabular import TabularDataset, UnknownColumnError

MISSING = math.nan

_VOWELS = set("aeiouy")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_NON_ALPHA = re.compile(r"[^A-Za-z]+")
_SENTENCE_END = re.compile(r"[.!?]+")

FEATURE_NAMES = (
    "char_count",
    "word_count",
    "sentence_count",
    "flesch_reading_ease",
    "flesch_kincaid_grade",
    "polarity",
    "subjectivity",
    "syllable_ratio",
)


class DegenerateTextError(ValueError):
    pass


@dataclass(frozen=True)
class TextStats:
    char_count: int = 0
    word_count: int = 0
    sentence_count: int = 0
    syllable_count: int = 0
    monosyllable_count: int = 0
    polysyllable_count: int = 0


@dataclass(frozen=True)
class PiqFeatureVector:
    char_count: int
    word_count: int
    sentence_count: int
    flesch_reading_ease: float
    flesch_kincaid_grade: float
    polarity: float
    subjectivity: float
    syllable_ratio: float

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))


class SentimentLexicon:
    """Mapping of lowercase word -> (polarity, subjectivity)."""

    def __init__(self, entries: Mapping[str, tuple[float, float]]):
        checked = {}
        for word, (pol, subj) in entries.items():
            pol, subj = float(pol), float(subj)
            if not -1.0 <= pol <= 1.0:
                raise ValueError(f"polarity of {word!r} outside [-1, 1]: {pol}")
            if not 0.0 <= subj <= 1.0:
                raise ValueError(f"subjectivity of {word!r} outside [0, 1]: {subj}")
            checked[word.lower()] = (pol, subj)
        self.entries = checked

    def __len__(self):
        return len(self.entries)

    def __contains__(self, word):
        return word in self.entries

    def get(self, word):
        return self.entries.get(word)

    @classmethod
    def from_text(cls, text: str) -> "SentimentLexicon":
        """Parse ``word<TAB>polarity<TAB>subjectivity`` lines; ``#`` starts a comment line."""
        entries = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"lexicon line {lineno}: expected 3 tab-separated fields, got {len(parts)}")
            word, pol, subj = parts
            entries[word.strip().lower()] = (float(pol), float(subj))
        return cls(entries)

    @classmethod
    def from_file(cls, path) -> "SentimentLexicon":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def default_lexicon() -> SentimentLexicon:
    """The small curated lexicon shipped with the package."""
    text = resources.files("admitnet").joinpath("data/lexicon.tsv").read_text(encoding="utf-8")
    return SentimentLexicon.from_text(text)


def _words(text: str) -> list[str]:
    words = []
    for token in text.split():
        word = _NON_ALPHA.sub("", token)
        if word:
            words.append(word)
    return words


def count_syllables(word: str) -> int:
    """Vowel-group syllable estimate.

    >>> count_syllables("beautiful")
    3
    """
    w = _NON_ALPHA.sub("", word).lower()
    if not w:
        return 0
    n = len(_VOWEL_GROUP.findall(w))
    if w.endswith("e") and not (w.endswith("le") and len(w) > 2 and w[-3] not in _VOWELS):
        n -= 1
    return max(n, 1)


def text_stats(text: str) -> TextStats:
    words = _words(text)
    if not words:
        return TextStats(char_count=sum(not c.isspace() for c in text))
    sentences = sum(1 for seg in _SENTENCE_END.split(text) if _words(seg))
    syllables = [count_syllables(w) for w in words]
    return TextStats(
        char_count=sum(not c.isspace() for c in text),
        word_count=len(words),
        sentence_count=sentences,
        syllable_count=sum(syllables),
        monosyllable_count=sum(s == 1 for s in syllables),
        polysyllable_count=sum(s >= 3 for s in syllables),
    )


def _check(stats: TextStats):
    if stats.word_count <= 0 or stats.sentence_count <= 0:
        raise DegenerateTextError(
            f"readability needs words and sentences (words={stats.word_count}, "
            f"sentences={stats.sentence_count})"
        )


def flesch_reading_ease(stats: TextStats) -> float:
    # raw score, deliberately not clamped to [0, 100]
    _check(stats)
    return (
        206.835
        - 1.015 * (stats.word_count / stats.sentence_count)
        - 84.6 * (stats.syllable_count / stats.word_count)
    )


def flesch_kincaid_grade(stats: TextStats) -> float:
    _check(stats)
    return (
        0.39 * (stats.word_count / stats.sentence_count)
        + 11.8 * (stats.syllable_count / stats.word_count)
        - 15.59
    )


def sentiment(text: str, lexicon: SentimentLexicon) -> tuple[float, float]:
    """Mean (polarity, subjectivity) over token occurrences found in the lexicon."""
    pol_sum = subj_sum = 0.0
    hits = 0
    for word in sorted(w.lower() for w in _words(text)):
        entry = lexicon.get(word)
        if entry is not None:
            pol_sum += entry[0]
            subj_sum += entry[1]
            hits += 1
    if hits == 0:
        return 0.0, 0.0
    return pol_sum / hits, subj_sum / hits


def syllable_ratio(stats: TextStats) -> float:
    return stats.monosyllable_count / max(stats.polysyllable_count, 1)


def extract_piq_features(text: str, lexicon: SentimentLexicon) -> PiqFeatureVector:
    """All eight essay features; readability is ``MISSING`` when there are no words."""
    stats = text_stats(text)
    if stats.word_count > 0:
        fre, fkg = flesch_reading_ease(stats), flesch_kincaid_grade(stats)
    else:
        fre = fkg = MISSING
    pol, subj = sentiment(text, lexicon)
    return PiqFeatureVector(
        char_count=stats.char_count,
        word_count=stats.word_count,
        sentence_count=stats.sentence_count,
        flesch_reading_ease=fre,
        flesch_kincaid_grade=fkg,
        polarity=pol,
        subjectivity=subj,
        syllable_ratio=syllable_ratio(stats),
    )


def extract_columns(data, text_columns, lexicon: SentimentLexicon):
    """Replace each text column of a ``TabularDataset`` by its eight numeric features.

    New columns are appended as ``<column>_<feature>``, in ``text_columns`` order.
    """
    for col in text_columns:
        if col not in data:
            raise UnknownColumnError(f"text column {col!r} not found")
    columns = {k: v for k, v in data.columns.items() if k not in set(text_columns)}
    for col in text_columns:
        feats = [extract_piq_features("" if t is None else str(t), lexicon).as_tuple() for t in data[col]]
        matrix = np.array(feats, dtype=np.float64).reshape(len(feats), len(FEATURE_NAMES))
        for j, name in enumerate(FEATURE_NAMES):
            columns[f"{col}_{name}"] = matrix[:, j]
    return TabularDataset(columns, data.target, data.n_rows)
