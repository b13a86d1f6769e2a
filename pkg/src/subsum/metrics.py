"""Efficiency of each algorithm against an ensemble output, corpus means, and
per-cue selection profiles for plotting."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .errors import EmptyCorpus, MismatchedTracks, UndefinedEfficiency
from .srt import SubtitleTrack
from .summarizers import Algorithm, SummaryResult

if TYPE_CHECKING:
    from .ensemble import EnsembleResult


def efficiency(n_combined: int, n_algorithm: int) -> float:
    """Share of an algorithm's selection that survives into the combined output."""
    if n_algorithm <= 0:
        raise UndefinedEfficiency("algorithm selected no cues")
    return n_combined / n_algorithm


@dataclass(frozen=True)
class AlgorithmEfficiency:
    n_algorithm: int
    efficiency: float


@dataclass(frozen=True)
class EfficiencyReport:
    video_id: str
    method: str
    n_combined: int
    per_algorithm: Mapping[Algorithm, AlgorithmEfficiency]

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "method": self.method,
            "n_combined": self.n_combined,
            "per_algorithm": {
                a.value: {"n_algorithm": e.n_algorithm, "efficiency": e.efficiency}
                for a, e in self.per_algorithm.items()
            },
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "EfficiencyReport":
        return cls(
            video_id=d["video_id"],
            method=d["method"],
            n_combined=int(d["n_combined"]),
            per_algorithm={
                Algorithm(k): AlgorithmEfficiency(int(v["n_algorithm"]), float(v["efficiency"]))
                for k, v in d["per_algorithm"].items()
            },
        )


def efficiency_report(
    results: Sequence[SummaryResult], combined: "EnsembleResult", video_id: str = ""
) -> EfficiencyReport:
    n_combined = len(combined.selected)
    per = {}
    for r in results:
        if r.algorithm not in combined.contributing:
            continue
        n_alg = len(r.selected)
        eff = efficiency(n_combined, n_alg) if n_alg else 0.0
        if combined.method.value == "intersection":
            assert eff <= 1.0, "intersection cannot be larger than a contributing selection"
        per[r.algorithm] = AlgorithmEfficiency(n_alg, eff)
    per = dict(sorted(per.items(), key=lambda kv: kv[0].order))
    return EfficiencyReport(video_id, combined.method.value, n_combined, per)


@dataclass(frozen=True)
class CorpusReport:
    rows: tuple[EfficiencyReport, ...]
    mean_efficiency: Mapping[Algorithm, float]  # percent

    def render_table(self) -> str:
        algs = list(self.mean_efficiency)
        header = ["video_id"] + [a.value for a in algs]
        body = []
        for row in self.rows:
            cells = [row.video_id or "-"]
            for a in algs:
                e = row.per_algorithm.get(a)
                cells.append("" if e is None else f"{100 * e.efficiency:.1f}")
            body.append(cells)
        body.append(["mean %"] + [f"{self.mean_efficiency[a]:.1f}" for a in algs])
        widths = [max(len(r[k]) for r in [header] + body) for k in range(len(header))]
        lines = ["  ".join(c.rjust(w) if k else c.ljust(w) for k, (c, w) in enumerate(zip(r, widths))) for r in [header] + body]
        return "\n".join(line.rstrip() for line in lines) + "\n"

    def render_kv(self) -> str:
        lines = [f"videos={len(self.rows)}"]
        for a, pct in self.mean_efficiency.items():
            lines.append(f"{a.value}.mean_ratio={pct / 100:.6f}")
            lines.append(f"{a.value}.mean_percent={pct:.1f}")
        return "\n".join(lines) + "\n"

    def render_rows_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["video_id", "method", "algorithm", "n_combined", "n_algorithm", "efficiency"])
        for row in self.rows:
            for a, e in row.per_algorithm.items():
                writer.writerow([row.video_id, row.method, a.value, row.n_combined, e.n_algorithm, repr(e.efficiency)])
        return buf.getvalue()


def corpus_report(reports: Iterable[EfficiencyReport]) -> CorpusReport:
    rows = tuple(sorted(reports, key=lambda r: r.video_id))
    if not rows:
        raise EmptyCorpus("no efficiency reports")
    algs = sorted({a for r in rows for a in r.per_algorithm}, key=lambda a: a.order)
    means = {}
    for a in algs:
        values = [r.per_algorithm[a].efficiency for r in rows if a in r.per_algorithm]
        # fsum is exactly rounded, so the mean does not depend on row order.
        means[a] = 100.0 * math.fsum(values) / len(values)
    return CorpusReport(rows, means)


def selection_profile(track: SubtitleTrack, result: SummaryResult) -> list[tuple[int, int, float]]:
    if result.cue_ids != track.ids or result.track_digest != track.digest():
        raise MismatchedTracks(f"{result.algorithm.value} result is for a different track")
    chosen = set(result.selected)
    return [(s.cue_id, int(s.cue_id in chosen), s.score) for s in result.scores]


def profile_csv(rows: Iterable[tuple[int, int, float]]) -> str:
    out = ["cue_id,selected,score"]
    out.extend(f"{cid},{flag},{score!r}" for cid, flag, score in rows)
    return "\n".join(out) + "\n"


def report_json(report: EfficiencyReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n"
