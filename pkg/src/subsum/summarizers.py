"""Extractive sentence rankers over subtitle cues: Luhn, LSA, TextRank, LexRank, Edmundson.

Every ranker scores all cues, keeps the top ``p`` by score (ties go to the lower
cue id) and reports the kept ids in track order. When a track has no usable
terms the result is flagged ``degenerate`` and the first ``p`` cues are kept.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import linalg
from .errors import InputError, MissingLexicons
from .srt import SubtitleTrack
from .textprep import TermStats, build_stats, cosine, idf, tf_vector, tokenize

# Scores are compared after rounding so float noise cannot flip a tie.
_TIE_DECIMALS = 9


class Algorithm(str, enum.Enum):
    # Declaration order is the tie-break order used when ranking algorithms.
    LUHN = "luhn"
    LSA = "lsa"
    TEXTRANK = "textrank"
    LEXRANK = "lexrank"
    EDMUNDSON = "edmundson"

    @property
    def order(self) -> int:
        return _ORDER[self]

    @classmethod
    def parse(cls, name: str) -> "Algorithm":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise InputError(f"unknown algorithm {name!r}") from None


_ORDER = {a: k for k, a in enumerate(Algorithm)}


@dataclass(frozen=True)
class SummaryConfig:
    p_select: int | float = 0.2
    textrank_damping: float = 0.85
    textrank_epsilon: float = 1e-6
    textrank_max_iter: int = 200
    lexrank_centroid_threshold: float = 0.0
    luhn_significance_cutoff: int = 2
    luhn_count_once: bool = False
    lsa_topics: int = 3

    def __post_init__(self) -> None:
        p = self.p_select
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise InputError(f"p_select must be a count or a ratio, got {p!r}")
        if isinstance(p, int) and p < 1:
            raise InputError("p_select count must be >= 1")
        if isinstance(p, float) and not 0.0 < p <= 1.0:
            raise InputError("p_select ratio must lie in (0, 1]")
        if not 0.0 < self.textrank_damping < 1.0:
            raise InputError("textrank_damping must lie in (0, 1)")
        if self.textrank_epsilon <= 0 or self.textrank_max_iter < 1:
            raise InputError("textrank_epsilon and textrank_max_iter must be positive")
        if self.lexrank_centroid_threshold < 0:
            raise InputError("lexrank_centroid_threshold must be non-negative")
        if self.luhn_significance_cutoff < 1 or self.lsa_topics < 1:
            raise InputError("luhn_significance_cutoff and lsa_topics must be >= 1")

    def resolve_p(self, n: int) -> int:
        """An int is a cue count, a float a ratio of ``n``; clamped to [1, n]."""
        p = self.p_select
        count = p if isinstance(p, int) else math.floor(p * n + 0.5)
        return max(1, min(n, count))


@dataclass(frozen=True)
class SentenceScore:
    cue_id: int
    score: float


@dataclass(frozen=True)
class SummaryResult:
    algorithm: Algorithm
    scores: tuple[SentenceScore, ...]
    selected: tuple[int, ...]
    p_select: int
    track_digest: str
    degenerate: bool = False

    @property
    def cue_ids(self) -> tuple[int, ...]:
        return tuple(s.cue_id for s in self.scores)

    def score_map(self) -> dict[int, float]:
        return {s.cue_id: s.score for s in self.scores}

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm.value,
            "p_select": self.p_select,
            "degenerate": self.degenerate,
            "track_digest": self.track_digest,
            "selected": list(self.selected),
            "scores": [{"cue_id": s.cue_id, "score": s.score} for s in self.scores],
        }


@dataclass(frozen=True)
class EdmundsonLexicons:
    bonus_words: frozenset[str] = field(default_factory=frozenset)
    stigma_words: frozenset[str] = field(default_factory=frozenset)
    null_words: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for name in ("bonus_words", "stigma_words", "null_words"):
            words = frozenset(w.strip().lower() for w in getattr(self, name) if w.strip())
            object.__setattr__(self, name, words)
        b, s, n = self.bonus_words, self.stigma_words, self.null_words
        overlap = (b & s) | (b & n) | (s & n)
        if overlap:
            raise InputError(f"lexicons overlap on {sorted(overlap)}")

    @classmethod
    def from_files(
        cls, bonus: str | Path | None, stigma: str | Path | None, null: str | Path | None
    ) -> "EdmundsonLexicons":
        def load(path):
            if path is None:
                return frozenset()
            lines = Path(path).read_text(encoding="utf-8").splitlines()
            return frozenset(w for w in (ln.strip() for ln in lines) if w and not w.startswith("#"))

        return cls(load(bonus), load(stigma), load(null))


def top_p(ids: Sequence[int], scores: Sequence[float], p: int) -> tuple[int, ...]:
    """Ids of the ``p`` best scores (lower id wins ties), returned in track order."""
    ranked = sorted(zip(ids, scores), key=lambda pair: (-round(pair[1], _TIE_DECIMALS), pair[0]))
    keep = {cue_id for cue_id, _ in ranked[:p]}
    return tuple(cue_id for cue_id in ids if cue_id in keep)


def _result(
    algorithm: Algorithm,
    track: SubtitleTrack,
    scores: Sequence[float],
    p: int,
    degenerate: bool = False,
    selected: Sequence[int] | None = None,
) -> SummaryResult:
    ids = track.ids
    if selected is None:
        selected = ids[:p] if degenerate else top_p(ids, scores, p)
    return SummaryResult(
        algorithm=algorithm,
        scores=tuple(SentenceScore(i, float(s)) for i, s in zip(ids, scores)),
        selected=tuple(selected),
        p_select=p,
        track_digest=track.digest(),
        degenerate=degenerate,
    )


def luhn_scores(
    sentences: Sequence[Sequence[str]], tf: dict[str, int] | Counter, cutoff: int, count_once: bool = False
) -> list[float]:
    significant = {w for w, c in tf.items() if c >= cutoff}
    scores = []
    for terms in sentences:
        words = set(terms) if count_once else terms
        scores.append(float(sum(tf[w] for w in words if w in significant)))
    return scores


def luhn(track: SubtitleTrack, cfg: SummaryConfig = SummaryConfig()) -> SummaryResult:
    stats = build_stats(track)
    p = cfg.resolve_p(len(track))
    scores = luhn_scores(stats.sentences, stats.tf, cfg.luhn_significance_cutoff, cfg.luhn_count_once)
    degenerate = not any(scores)
    return _result(Algorithm.LUHN, track, scores, p, degenerate)


def term_sentence_matrix(stats: TermStats) -> tuple[list[str], np.ndarray]:
    """Rows are terms in sorted order, columns are cues; entries are raw counts."""
    terms = sorted(stats.tf)
    row = {t: k for k, t in enumerate(terms)}
    a = np.zeros((len(terms), stats.n_sentences))
    for j, sentence in enumerate(stats.sentences):
        for t in sentence:
            a[row[t], j] += 1.0
    return terms, a


def lsa_select(vt: np.ndarray, s: np.ndarray, shape: tuple[int, int], topics: int, p: int) -> tuple[list[int], np.ndarray]:
    """Topic cycling over the leading right singular vectors.

    Returns the chosen column positions (in pick order) and each column's max
    absolute loading over the cycled topics.
    """
    n = shape[1]
    k = min(topics, linalg.numerical_rank(s, shape))
    if k == 0:
        return [], np.zeros(n)
    loadings = np.abs(vt[:k])
    chosen: list[int] = []
    taken = np.zeros(n, dtype=bool)
    topic = 0
    while len(chosen) < p:
        row = np.round(loadings[topic % k], _TIE_DECIMALS)
        row[taken] = -1.0
        j = int(np.argmax(row))  # first maximum, i.e. lowest cue position
        chosen.append(j)
        taken[j] = True
        topic += 1
    return chosen, loadings.max(axis=0)


def lsa(track: SubtitleTrack, cfg: SummaryConfig = SummaryConfig()) -> SummaryResult:
    stats = build_stats(track)
    n = len(track)
    p = cfg.resolve_p(n)
    if stats.degenerate:
        return _result(Algorithm.LSA, track, [0.0] * n, p, degenerate=True)
    _, a = term_sentence_matrix(stats)
    _, s, vt = linalg.svd(a)
    chosen, scores = lsa_select(vt, s, a.shape, cfg.lsa_topics, p)
    keep = set(chosen)
    selected = [cid for pos, cid in enumerate(track.ids) if pos in keep]
    return _result(Algorithm.LSA, track, scores.tolist(), p, selected=selected)


def similarity_matrix(stats: TermStats) -> np.ndarray:
    vectors = [tf_vector(terms) for terms in stats.sentences]
    n = len(vectors)
    sim = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            sim[i, j] = sim[j, i] = cosine(vectors[i], vectors[j])
    return sim


def textrank(track: SubtitleTrack, cfg: SummaryConfig = SummaryConfig()) -> SummaryResult:
    stats = build_stats(track)
    p = cfg.resolve_p(len(track))
    sim = similarity_matrix(stats)
    scores, _ = linalg.power_iteration(
        sim, cfg.textrank_damping, cfg.textrank_epsilon, cfg.textrank_max_iter
    )
    degenerate = stats.degenerate
    return _result(Algorithm.TEXTRANK, track, scores.tolist(), p, degenerate)


def centroid(stats: TermStats, threshold: float) -> dict[str, float]:
    """Terms whose document tf times idf exceeds ``threshold``, with that weight."""
    weights = {t: c * idf(stats, t) for t, c in stats.tf.items()}
    return {t: w for t, w in weights.items() if w > threshold}


def lexrank(track: SubtitleTrack, cfg: SummaryConfig = SummaryConfig()) -> SummaryResult:
    stats = build_stats(track)
    p = cfg.resolve_p(len(track))
    core = centroid(stats, cfg.lexrank_centroid_threshold)
    scores = [sum(core.get(t, 0.0) for t in set(terms)) for terms in stats.sentences]
    return _result(Algorithm.LEXRANK, track, scores, p, degenerate=not core)


def in_edge_decile(position: int, n: int) -> bool:
    """True for cue positions in the first or last tenth of the track.

    Each tenth holds ``n // 10`` positions, so tracks under ten cues get none.
    """
    k = n // 10
    return position < k or position >= n - k


def edmundson(
    track: SubtitleTrack,
    cfg: SummaryConfig = SummaryConfig(),
    lex: EdmundsonLexicons | None = None,
) -> SummaryResult:
    """Cue words (bonus minus stigma hits) + Luhn key-word score + edge-decile bonus,
    all with unit weight. Null words are dropped from the key-word count."""
    if lex is None:
        raise MissingLexicons("edmundson needs bonus/stigma/null lexicons")
    n = len(track)
    p = cfg.resolve_p(n)
    stats = build_stats(track)
    sentences = [[t for t in terms if t not in lex.null_words] for terms in stats.sentences]
    tf = Counter(t for terms in sentences for t in terms)
    key = luhn_scores(sentences, tf, cfg.luhn_significance_cutoff, cfg.luhn_count_once)
    scores = []
    for pos, cue in enumerate(track.cues):
        words = [t.surface for t in tokenize(cue.text)]
        cue_score = sum(w in lex.bonus_words for w in words) - sum(w in lex.stigma_words for w in words)
        location = 1.0 if in_edge_decile(pos, n) else 0.0
        scores.append(cue_score + key[pos] + location)
    return _result(Algorithm.EDMUNDSON, track, scores, p)


RANKERS: dict[Algorithm, Callable[..., SummaryResult]] = {
    Algorithm.LUHN: luhn,
    Algorithm.LSA: lsa,
    Algorithm.TEXTRANK: textrank,
    Algorithm.LEXRANK: lexrank,
    Algorithm.EDMUNDSON: edmundson,
}


def summarize(
    track: SubtitleTrack,
    algorithms: Iterable[Algorithm],
    cfg: SummaryConfig = SummaryConfig(),
    lex: EdmundsonLexicons | None = None,
) -> list[SummaryResult]:
    out = []
    for alg in algorithms:
        if alg is Algorithm.EDMUNDSON:
            out.append(edmundson(track, cfg, lex))
        else:
            out.append(RANKERS[alg](track, cfg))
    return out
