"""Tokenization and term statistics shared by the summarizers."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

from .errors import EmptyTrack, UnknownTerm
from .srt import SubtitleTrack

_TAG_RE = re.compile(r"<[^>]*>|\{\\[^}]*\}")
_WORD_RE = re.compile(r"[^\W\d_]+")


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    text = resources.files("subsum").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


@dataclass(frozen=True)
class Token:
    surface: str
    is_stopword: bool


def tokenize(text: str) -> list[Token]:
    """Lowercased alphabetic runs; styling tags, digits and punctuation separate words."""
    stop = stopwords()
    words = _WORD_RE.findall(_TAG_RE.sub(" ", text).lower())
    return [Token(w, w in stop) for w in words]


def content_terms(text: str, extra_stopwords: Iterable[str] = ()) -> list[str]:
    extra = frozenset(extra_stopwords)
    return [t.surface for t in tokenize(text) if not t.is_stopword and t.surface not in extra]


@dataclass(frozen=True)
class TermStats:
    """Document-level term counts for one track.

    ``sentences`` holds each cue's non-stopword terms in order, so callers do
    not re-tokenize.
    """

    tf: Mapping[str, int]
    df: Mapping[str, int]
    n_sentences: int
    sentences: tuple[tuple[str, ...], ...]

    @property
    def degenerate(self) -> bool:
        return not self.tf


def build_stats(track: SubtitleTrack) -> TermStats:
    if len(track) == 0:
        raise EmptyTrack("cannot build statistics for an empty track")
    sentences = tuple(tuple(content_terms(c.text)) for c in track.cues)
    tf: Counter[str] = Counter()
    df: Counter[str] = Counter()
    for terms in sentences:
        tf.update(terms)
        df.update(set(terms))
    return TermStats(dict(tf), dict(df), len(sentences), sentences)


def idf(stats: TermStats, term: str) -> float:
    try:
        df = stats.df[term]
    except KeyError:
        raise UnknownTerm(term) from None
    if df == stats.n_sentences:
        return 0.0
    return math.log(stats.n_sentences / df)


def tf_vector(terms: Iterable[str]) -> dict[str, float]:
    return {t: float(c) for t, c in Counter(terms).items()}


def tfidf_vector(terms: Iterable[str], stats: TermStats) -> dict[str, float]:
    vec = {}
    for t, c in Counter(terms).items():
        w = c * idf(stats, t)
        if w > 0:
            vec[t] = w
    return vec


def cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    if not a or not b:
        return 0.0
    if len(a) > len(b):
        a, b = b, a
    dot = sum(w * b[t] for t, w in a.items() if t in b)
    if dot == 0.0:
        return 0.0
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    return dot / (na * nb)
