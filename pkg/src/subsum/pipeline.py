"""End-to-end flow: get subtitles (parse or generate), rank cues, combine, score, plan cuts.

Outputs are staged in memory and only written once every stage has succeeded,
each file via write-and-rename.
"""

from __future__ import annotations

import json
import logging
import shutil
import subprocess
import tempfile
from contextlib import ExitStack, contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from . import asr, audioseg, cutplan, ensemble, metrics
from .errors import DegenerateTrack, EmptyCorpus, EmptyReference, InputError, SubsumError
from .fsutil import atomic_write
from .srt import SubtitleTrack, parse_srt, serialize_srt
from .summarizers import Algorithm, EdmundsonLexicons, SummaryConfig, SummaryResult, summarize
from .textprep import build_stats

log = logging.getLogger(__name__)

ENSEMBLE_MODES = ("none", "intersect", "weighted")


@dataclass(frozen=True)
class RunConfig:
    out_dir: Path
    media: Path | None = None
    srt: Path | None = None
    algorithms: tuple[Algorithm, ...] = ensemble.DEFAULT_MEMBERS
    ensemble: str = "none"
    summary: SummaryConfig = field(default_factory=SummaryConfig)
    p_overrides: Mapping[Algorithm, int | float] = field(default_factory=dict)
    segmentation: audioseg.SegmentationConfig = field(default_factory=audioseg.SegmentationConfig)
    weights_path: Path = Path("weights.txt")
    update_weights: bool = True
    include_edmundson: bool = False
    lexicons: EdmundsonLexicons | None = None
    backend: asr.RecognizerBackend | None = None
    asr_parallelism: int = 4
    language: str | None = None
    merge_gap_ms: int = 500
    tool: str = cutplan.DEFAULT_TOOL
    video_id: str | None = None

    def __post_init__(self) -> None:
        if not self.algorithms:
            raise InputError("choose at least one algorithm")
        if self.ensemble not in ENSEMBLE_MODES:
            raise InputError(f"ensemble must be one of {ENSEMBLE_MODES}")
        if self.srt is None and self.media is None:
            raise InputError("need a subtitle file or a media file")
        if self.srt is None and self.backend is None:
            raise InputError("no subtitle file given and no speech recognizer configured")

    @property
    def name(self) -> str:
        if self.video_id:
            return self.video_id
        return (self.media or self.srt).stem

    def summary_for(self, alg: Algorithm) -> SummaryConfig:
        if alg in self.p_overrides:
            return replace(self.summary, p_select=self.p_overrides[alg])
        return self.summary


@contextmanager
def stage(name: str) -> Iterator[None]:
    try:
        yield
    except SubsumError as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise


def load_audio(media: Path, tool: str = cutplan.DEFAULT_TOOL) -> audioseg.AudioBuffer:
    """WAV is read directly; anything else is demuxed to mono 16 kHz WAV by ``tool``."""
    if media.suffix.lower() == ".wav":
        return audioseg.read_wav(media)
    if shutil.which(tool) is None:
        raise InputError(f"{media.name} is not WAV and {tool!r} is not available to extract audio")
    with tempfile.TemporaryDirectory() as tmp:
        wav = Path(tmp) / "audio.wav"
        cmd = [tool, "-v", "error", "-y", "-i", str(media), "-vn", "-ac", "1", "-ar", "16000", "-c:a", "pcm_s16le", str(wav)]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        if proc.returncode != 0:
            raise InputError(f"audio extraction failed: {proc.stderr.strip()[:200]}")
        return audioseg.read_wav(wav)


def generate_subtitles(
    media: Path,
    backend: asr.RecognizerBackend,
    seg: audioseg.SegmentationConfig = audioseg.SegmentationConfig(),
    parallelism: int = 4,
    language: str | None = None,
    tool: str = cutplan.DEFAULT_TOOL,
) -> SubtitleTrack:
    audio = load_audio(media, tool)
    chunks = audioseg.chunk(audio, seg)
    log.info("%s: %d speech chunks", media.name, len(chunks))
    results = asr.transcribe_all(chunks, backend, parallelism, language_hint=language)
    failed = sum(r.failed for _, r in results)
    if failed:
        log.warning("%s: %d of %d chunks failed recognition", media.name, failed, len(results))
    return asr.assemble_track(results)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _script_paths(cfg: RunConfig) -> str:
    return str(cfg.media.resolve()) if cfg.media is not None else ""


def run(cfg: RunConfig) -> dict:
    """Run the whole flow for one video and return the run summary record."""
    outputs: dict[str, bytes | str] = {}
    record: dict = {"video_id": cfg.name}

    with ExitStack() as stack:
        with stage("subtitles"):
            if cfg.srt is not None:
                if not cfg.srt.is_file():
                    raise InputError(f"subtitle file not found: {cfg.srt}")
                track = parse_srt(cfg.srt.read_bytes())
                record["subtitles"] = "parsed"
            else:
                if not cfg.media.is_file():
                    raise InputError(f"media file not found: {cfg.media}")
                track = generate_subtitles(
                    cfg.media, cfg.backend, cfg.segmentation, cfg.asr_parallelism, cfg.language, cfg.tool
                )
                record["subtitles"] = "generated"
            outputs["subtitles.srt"] = serialize_srt(track)
            record["cues"] = len(track)

        with stage("summarize"):
            if build_stats(track).degenerate:
                raise DegenerateTrack("no cue contains a content word")
            results: list[SummaryResult] = []
            for alg in cfg.algorithms:
                results.extend(summarize(track, [alg], cfg.summary_for(alg), cfg.lexicons))
            record["algorithms"] = {}
            for r in results:
                if r.degenerate:
                    log.warning("%s: %s found no usable terms; kept the first %d cues", cfg.name, r.algorithm.value, r.p_select)
                outputs[f"{r.algorithm.value}.json"] = _json(r.to_dict())
                outputs[f"{r.algorithm.value}.profile.csv"] = metrics.profile_csv(metrics.selection_profile(track, r))
                record["algorithms"][r.algorithm.value] = {"selected": len(r.selected), "degenerate": r.degenerate}

        selections: dict[str, Sequence[int]] = {}
        report = None
        weights_after = None
        if cfg.ensemble == "none":
            selections = {r.algorithm.value: r.selected for r in results}
        else:
            with stage("ensemble"):
                reference = ensemble.intersect(results, cfg.include_edmundson)
                if cfg.ensemble == "intersect":
                    combined = reference
                else:
                    stack.enter_context(ensemble.locked(cfg.weights_path))
                    weights = ensemble.load_weights(cfg.weights_path)
                    p = cfg.summary.resolve_p(len(track))
                    combined = ensemble.weighted_select(results, weights, p, cfg.include_edmundson)
                    record["weights_before"] = weights.as_strings()
                    if cfg.update_weights:
                        try:
                            ranking = ensemble.rank_algorithms(results, reference)
                        except EmptyReference:
                            log.warning("%s: empty intersection, weights left unchanged", cfg.name)
                        else:
                            weights_after = ensemble.update_weights(weights, ranking)
                            record["ranking"] = [a.value for a in ranking]
                outputs["ensemble.json"] = _json(combined.to_dict())
                selections = {cfg.ensemble: combined.selected}
                record["ensemble"] = {"method": combined.method.value, "selected": len(combined.selected)}
            with stage("metrics"):
                report = metrics.efficiency_report(results, combined, cfg.name)
                outputs["efficiency.json"] = metrics.report_json(report)
                record["efficiency"] = {a.value: e.efficiency for a, e in report.per_algorithm.items()}

        with stage("cutplan"):
            for name, selected in selections.items():
                if not selected:
                    log.warning("%s: %s selected nothing; no cut plan", cfg.name, name)
                    continue
                cl = cutplan.build_cutlist(track, selected, cfg.merge_gap_ms, _script_paths(cfg))
                script, retimed = cutplan.emit_script(cl, track, f"{name}.summary.mp4", cfg.tool)
                outputs[f"{name}.cutlist.json"] = cl.to_json()
                outputs[f"{name}.cut.sh"] = script
                outputs[f"{name}.summary.srt"] = serialize_srt(retimed)

        record["outputs"] = sorted(outputs) + ["run.json"]
        if weights_after is not None:
            record["weights_after"] = weights_after.as_strings()
        outputs["run.json"] = _json(record)

        with stage("write"):
            for name, data in outputs.items():
                atomic_write(cfg.out_dir / name, data, 0o777 if name.endswith(".sh") else 0o666)
            if weights_after is not None:
                ensemble.save_weights(cfg.weights_path, weights_after)
    return record


@dataclass
class BatchOutcome:
    report: metrics.CorpusReport | None
    records: list[dict]
    failures: dict[str, dict]


def batch(configs: Sequence[RunConfig], out_dir: Path | None = None, seed_first: bool = True) -> BatchOutcome:
    """Run each item in input order. In weighted mode the weights evolve across
    the corpus; with ``seed_first`` the first item does not update them."""
    if not configs:
        raise InputError("empty corpus")
    records, failures, reports = [], {}, []
    for k, cfg in enumerate(configs):
        if cfg.ensemble == "none":
            raise InputError("batch needs an ensemble mode (intersect or weighted)")
        if cfg.ensemble == "weighted" and seed_first and k == 0:
            cfg = replace(cfg, update_weights=False)
        try:
            rec = run(cfg)
        except SubsumError as exc:
            where = getattr(exc, "stage", "run")
            failures[cfg.name] = {"stage": where, "error": str(exc), "exit_code": exc.exit_code}
            log.error("%s failed in %s: %s", cfg.name, where, exc)
            continue
        records.append(rec)
        reports.append(metrics.EfficiencyReport.from_dict(json.loads((cfg.out_dir / "efficiency.json").read_text())))
    try:
        corpus = metrics.corpus_report(reports)
    except EmptyCorpus:
        corpus = None
    if out_dir is not None and corpus is not None:
        atomic_write(out_dir / "report.txt", corpus.render_table())
        atomic_write(out_dir / "report.kv", corpus.render_kv())
        atomic_write(out_dir / "efficiency.csv", corpus.render_rows_csv())
    if out_dir is not None and failures:
        atomic_write(out_dir / "failures.json", _json(failures))
    return BatchOutcome(corpus, records, failures)


def load_reports(paths: Sequence[Path]) -> list[metrics.EfficiencyReport]:
    found = []
    for p in paths:
        files = sorted(p.rglob("efficiency.json")) if p.is_dir() else [p]
        for f in files:
            found.append(metrics.EfficiencyReport.from_dict(json.loads(f.read_text(encoding="utf-8"))))
    return found
