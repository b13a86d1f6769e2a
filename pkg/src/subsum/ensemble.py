"""Combining several rankers' selections: strict intersection, weighted voting,
and the per-run weight update that rewards the best ranker and penalizes the worst.

Weights are ``Decimal`` so repeated +/- delta steps stay exact.
"""

from __future__ import annotations

import enum
import fcntl
from contextlib import contextmanager
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .errors import (
    EmptyReference,
    InputError,
    MismatchedTracks,
    MissingWeight,
    TooFewAlgorithms,
)
from .fsutil import atomic_write
from .metrics import efficiency
from .summarizers import Algorithm, SummaryResult

DEFAULT_DELTA = Decimal("0.025")
DEFAULT_MEMBERS = (Algorithm.LUHN, Algorithm.LSA, Algorithm.TEXTRANK, Algorithm.LEXRANK)


class Method(str, enum.Enum):
    INTERSECTION = "intersection"
    WEIGHTED = "weighted"


def _dec(value) -> Decimal:
    try:
        return value if isinstance(value, Decimal) else Decimal(str(value))
    except InvalidOperation:
        raise InputError(f"not a decimal number: {value!r}") from None


def format_decimal(d: Decimal) -> str:
    return format(d.normalize(), "f")


@dataclass(frozen=True)
class EnsembleWeights:
    w: Mapping[Algorithm, Decimal] = field(
        default_factory=lambda: {a: Decimal(1) for a in Algorithm}
    )
    delta: Decimal = DEFAULT_DELTA

    def __post_init__(self) -> None:
        w = {Algorithm(a): _dec(v) for a, v in self.w.items()}
        object.__setattr__(self, "w", dict(sorted(w.items(), key=lambda kv: kv[0].order)))
        object.__setattr__(self, "delta", _dec(self.delta))
        if any(v < 0 for v in w.values()):
            raise InputError("weights must be non-negative")
        if self.delta <= 0:
            raise InputError("delta must be positive")

    def __getitem__(self, alg: Algorithm) -> Decimal:
        try:
            return self.w[alg]
        except KeyError:
            raise MissingWeight(f"no weight for {alg.value}") from None

    def as_strings(self) -> dict[str, str]:
        d = {a.value: format_decimal(v) for a, v in self.w.items()}
        d["delta"] = format_decimal(self.delta)
        return d

    def dumps(self) -> str:
        lines = [f"{a.value}={format_decimal(v)}" for a, v in self.w.items()]
        lines.append(f"delta={format_decimal(self.delta)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "EnsembleWeights":
        values: dict[str, str] = {}
        for n, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise InputError(f"weights line {n}: expected key=value")
            values[key.strip()] = value.strip()
        delta = values.pop("delta", DEFAULT_DELTA)
        try:
            w = {Algorithm(k): _dec(v) for k, v in values.items()}
        except ValueError as exc:
            raise InputError(f"weights file: {exc}") from None
        return cls(w, delta)


@dataclass(frozen=True)
class EnsembleResult:
    method: Method
    selected: tuple[int, ...]
    contributing: tuple[Algorithm, ...]
    track_digest: str
    sentence_scores: Mapping[int, Decimal] | None = None

    def to_dict(self) -> dict:
        d = {
            "method": self.method.value,
            "contributing": [a.value for a in self.contributing],
            "track_digest": self.track_digest,
            "selected": list(self.selected),
        }
        if self.sentence_scores is not None:
            d["sentence_scores"] = {str(k): format_decimal(v) for k, v in self.sentence_scores.items()}
        return d


def _members(results: Sequence[SummaryResult], include_edmundson: bool) -> list[SummaryResult]:
    members = [r for r in results if include_edmundson or r.algorithm is not Algorithm.EDMUNDSON]
    if len(members) < 2:
        raise TooFewAlgorithms("an ensemble needs at least two algorithms")
    if len({r.algorithm for r in members}) != len(members):
        raise InputError("each algorithm may contribute only once")
    first = members[0]
    for r in members[1:]:
        if r.track_digest != first.track_digest or r.cue_ids != first.cue_ids:
            raise MismatchedTracks(
                f"{r.algorithm.value} and {first.algorithm.value} were run on different tracks"
            )
    return members


def intersect(results: Sequence[SummaryResult], include_edmundson: bool = False) -> EnsembleResult:
    members = _members(results, include_edmundson)
    common = set(members[0].selected)
    for r in members[1:]:
        common &= set(r.selected)
    order = members[0].cue_ids
    return EnsembleResult(
        method=Method.INTERSECTION,
        selected=tuple(cid for cid in order if cid in common),
        contributing=tuple(r.algorithm for r in members),
        track_digest=members[0].track_digest,
    )


def weighted_select(
    results: Sequence[SummaryResult],
    weights: EnsembleWeights,
    p_select: int,
    include_edmundson: bool = False,
) -> EnsembleResult:
    """Score each cue by the summed weights of the algorithms that selected it and
    keep the ``p_select`` best among cues with at least one vote."""
    members = _members(results, include_edmundson)
    scores: dict[int, Decimal] = {}
    for r in members:
        w = weights[r.algorithm]
        for cid in r.selected:
            scores[cid] = scores.get(cid, Decimal(0)) + w
    ranked = sorted(scores, key=lambda cid: (-scores[cid], cid))
    keep = set(ranked[:p_select])
    order = members[0].cue_ids
    return EnsembleResult(
        method=Method.WEIGHTED,
        selected=tuple(cid for cid in order if cid in keep),
        contributing=tuple(r.algorithm for r in members),
        track_digest=members[0].track_digest,
        sentence_scores={cid: scores[cid] for cid in order if cid in scores},
    )


def rank_algorithms(results: Sequence[SummaryResult], reference: EnsembleResult) -> list[Algorithm]:
    """Best first, by efficiency against ``reference``; enum order breaks ties."""
    members = [r for r in results if r.algorithm in reference.contributing]
    if any(r.track_digest != reference.track_digest for r in members):
        raise MismatchedTracks("reference was built from a different track")
    if not reference.selected:
        raise EmptyReference("empty intersection: every efficiency is zero")
    n_combined = len(reference.selected)
    eff = {
        r.algorithm: efficiency(n_combined, len(r.selected)) if r.selected else 0.0
        for r in members
    }
    return sorted(eff, key=lambda a: (-eff[a], a.order))


def update_weights(weights: EnsembleWeights, ranking: Sequence[Algorithm]) -> EnsembleWeights:
    if len(set(ranking)) < 2:
        raise InputError("ranking needs at least two distinct algorithms")
    best, worst = ranking[0], ranking[-1]
    w = dict(weights.w)
    w[best] = weights[best] + weights.delta
    w[worst] = max(Decimal(0), weights[worst] - weights.delta)
    return EnsembleWeights(w, weights.delta)


def load_weights(path: str | Path) -> EnsembleWeights:
    path = Path(path)
    if not path.exists():
        return EnsembleWeights()
    return EnsembleWeights.loads(path.read_text(encoding="utf-8"))


def save_weights(path: str | Path, weights: EnsembleWeights) -> None:
    atomic_write(path, weights.dumps())


@contextmanager
def locked(path: str | Path) -> Iterator[None]:
    """Exclusive advisory lock on a sidecar ``.lock`` file next to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path.with_name(path.name + ".lock"), "a") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def apply_persisted_update(path: str | Path, ranking: Sequence[Algorithm]) -> tuple[EnsembleWeights, EnsembleWeights]:
    """Read-modify-write of the weight state file under its lock. Returns (before, after)."""
    with locked(path):
        before = load_weights(path)
        after = update_weights(before, ranking)
        save_weights(path, after)
    return before, after
