"""Command line entry point.

    subsum generate-subtitles MEDIA -o OUT.srt --asr stub --stub-map MAP
    subsum summarize --srt talk.srt --ensemble intersect -o out/
    subsum batch corpus.txt --ensemble weighted --weights w.txt -o runs/
    subsum report runs/
    subsum weights show|reset --weights w.txt

Exit status: 0 ok, 2 input error, 3 speech recognition error, 4 degenerate
track, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__, asr, audioseg, cutplan, ensemble, metrics, pipeline
from .errors import InputError, SubsumError
from .fsutil import atomic_write
from .srt import serialize_srt
from .summarizers import Algorithm, EdmundsonLexicons, SummaryConfig

log = logging.getLogger("subsum")


def p_value(text: str) -> int | float:
    """'12' is a cue count, '0.2' a ratio of the track."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a count or ratio: {text!r}") from None


def algorithm_list(text: str) -> tuple[Algorithm, ...]:
    try:
        return tuple(Algorithm.parse(t) for t in text.split(",") if t.strip())
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def p_override(text: str) -> tuple[Algorithm, int | float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected ALGORITHM=P")
    try:
        return Algorithm.parse(name), p_value(value)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_asr(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("speech recognition")
    g.add_argument("--asr", choices=("stub", "remote"), help="recognizer backend when no subtitle file is given")
    g.add_argument("--stub-map", type=Path, help="hash=text fixture file for the stub backend")
    g.add_argument("--asr-url", default=asr.DEFAULT_URL)
    g.add_argument("--asr-timeout", type=float, default=30.0)
    g.add_argument("--asr-parallelism", type=int, default=4)
    g.add_argument("--language")
    s = p.add_argument_group("silence chunking")
    s.add_argument("--max-interval-ms", type=int, default=6000)
    s.add_argument("--silence-threshold", type=float, default=0.01)
    s.add_argument("--min-silence-ms", type=int, default=300)
    s.add_argument("--frame-ms", type=int, default=20)
    p.add_argument("--tool", default=cutplan.DEFAULT_TOOL, help="media tool used for audio extraction and cut scripts")


def _add_summarize_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--media", type=Path, help="source video or WAV audio")
    p.add_argument("--srt", type=Path, help="existing subtitles; generated from --media when absent")
    p.add_argument("--algorithms", type=algorithm_list, default=ensemble.DEFAULT_MEMBERS,
                   help="comma-separated subset of luhn,lsa,textrank,lexrank,edmundson")
    p.add_argument("--ensemble", choices=pipeline.ENSEMBLE_MODES, default="none")
    p.add_argument("--p-select", type=p_value, default=0.2, help="cues to keep: count (12) or ratio (0.2)")
    p.add_argument("--p-override", type=p_override, action="append", default=[], metavar="ALG=P")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--centroid-threshold", type=float, default=0.0)
    p.add_argument("--luhn-cutoff", type=int, default=2)
    p.add_argument("--luhn-count-once", action="store_true")
    p.add_argument("--lsa-topics", type=int, default=3)
    p.add_argument("--bonus", type=Path, help="Edmundson bonus words, one per line")
    p.add_argument("--stigma", type=Path)
    p.add_argument("--null", type=Path)
    p.add_argument("--include-edmundson", action="store_true", help="let Edmundson vote in ensembles")
    p.add_argument("--weights", type=Path, default=Path("weights.txt"), help="weight state file")
    p.add_argument("--no-weight-update", action="store_true")
    p.add_argument("--merge-gap-ms", type=int, default=500)
    _add_asr(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subsum", description="Summarize videos through their subtitles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--config", type=Path, help="key=value file of option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate-subtitles", help="recognize speech and write an SRT")
    g.add_argument("media", type=Path)
    g.add_argument("-o", "--output", type=Path, required=True)
    _add_asr(g)

    s = sub.add_parser("summarize", help="summarize one video")
    _add_summarize_opts(s)
    s.add_argument("--video-id")
    s.add_argument("-o", "--out", type=Path, required=True)

    b = sub.add_parser("batch", help="summarize a corpus and report mean efficiencies")
    b.add_argument("manifest", type=Path, help="one item per line: MEDIA_OR_SRT [SRT]")
    _add_summarize_opts(b)
    b.add_argument("--no-seed", action="store_true", help="let the first item update weights too")
    b.add_argument("-o", "--out", type=Path, required=True)

    r = sub.add_parser("report", help="corpus table from efficiency.json files")
    r.add_argument("paths", type=Path, nargs="+")
    r.add_argument("--kv", action="store_true", help="key=value output instead of a table")

    w = sub.add_parser("weights", help="inspect or reset ensemble weights")
    w.add_argument("action", choices=("show", "reset"))
    w.add_argument("--weights", type=Path, default=Path("weights.txt"))
    w.add_argument("--delta", default=str(ensemble.DEFAULT_DELTA))
    return parser


def read_config(path: Path) -> dict[str, str]:
    values = {}
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{n}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre, _ = parser.parse_known_args(argv)
    if pre.config is None:
        return
    values = read_config(pre.config)
    subparsers = parser._subparsers._group_actions[0].choices
    for sp in subparsers.values():
        defaults = {}
        for action in sp._actions:
            if action.dest not in values:
                continue
            raw = values[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                try:
                    if isinstance(action, argparse._AppendAction):
                        defaults[action.dest] = [action.type(v) for v in raw.split(",") if v.strip()]
                    else:
                        defaults[action.dest] = action.type(raw)
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise InputError(f"config {action.dest}: {exc}") from None
            else:
                defaults[action.dest] = raw
        sp.set_defaults(**defaults)


def _backend(args) -> asr.RecognizerBackend | None:
    if args.asr == "stub":
        if args.stub_map is None:
            raise InputError("--asr stub needs --stub-map")
        return asr.OfflineStub.from_file(args.stub_map)
    if args.asr == "remote":
        return asr.RemoteHttp(url=args.asr_url, timeout=args.asr_timeout)
    return None


def _segmentation(args) -> audioseg.SegmentationConfig:
    return audioseg.SegmentationConfig(args.max_interval_ms, args.silence_threshold, args.min_silence_ms, args.frame_ms)


def _run_config(args, out_dir: Path, media: Path | None, srt: Path | None, video_id: str | None = None) -> pipeline.RunConfig:
    lex = None
    if Algorithm.EDMUNDSON in args.algorithms:
        if not (args.bonus or args.stigma or args.null):
            raise InputError("edmundson needs --bonus, --stigma and/or --null word lists")
        lex = EdmundsonLexicons.from_files(args.bonus, args.stigma, args.null)
    summary = SummaryConfig(
        p_select=args.p_select,
        textrank_damping=args.damping,
        textrank_epsilon=args.epsilon,
        textrank_max_iter=args.max_iter,
        lexrank_centroid_threshold=args.centroid_threshold,
        luhn_significance_cutoff=args.luhn_cutoff,
        luhn_count_once=args.luhn_count_once,
        lsa_topics=args.lsa_topics,
    )
    for _, p in args.p_override:
        SummaryConfig(p_select=p)
    return pipeline.RunConfig(
        out_dir=out_dir,
        media=media,
        srt=srt,
        algorithms=args.algorithms,
        ensemble=args.ensemble,
        summary=summary,
        p_overrides=dict(args.p_override),
        segmentation=_segmentation(args),
        weights_path=args.weights,
        update_weights=not args.no_weight_update,
        include_edmundson=args.include_edmundson,
        lexicons=lex,
        backend=_backend(args) if srt is None else None,
        asr_parallelism=args.asr_parallelism,
        language=args.language,
        merge_gap_ms=args.merge_gap_ms,
        tool=args.tool,
        video_id=video_id,
    )


def read_manifest(path: Path) -> list[tuple[Path | None, Path | None]]:
    """Lines of ``MEDIA [SRT]`` or just ``SRT``; relative paths are relative to the manifest."""
    items = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [path.parent / p for p in line.split()]
        if len(parts) == 1:
            p = parts[0]
            items.append((None, p) if p.suffix.lower() == ".srt" else (p, None))
        elif len(parts) == 2:
            items.append((parts[0], parts[1]))
        else:
            raise InputError(f"manifest line has too many fields: {line!r}")
    return items


def cmd_generate(args) -> int:
    backend = _backend(args)
    if backend is None:
        raise InputError("choose a recognizer with --asr")
    track = pipeline.generate_subtitles(
        args.media, backend, _segmentation(args), args.asr_parallelism, args.language, args.tool
    )
    atomic_write(args.output, serialize_srt(track))
    print(json.dumps({"media": str(args.media), "cues": len(track), "output": str(args.output)}))
    return 0


def cmd_summarize(args) -> int:
    cfg = _run_config(args, args.out, args.media, args.srt, args.video_id)
    record = pipeline.run(cfg)
    print(json.dumps(record, indent=2))
    return 0


def cmd_batch(args) -> int:
    configs = []
    seen = set()
    for media, srt in read_manifest(args.manifest):
        vid = (media or srt).stem
        if vid in seen:
            raise InputError(f"duplicate video id {vid!r} in manifest")
        seen.add(vid)
        configs.append(_run_config(args, args.out / vid, media, srt, vid))
    outcome = pipeline.batch(configs, args.out, seed_first=not args.no_seed)
    if outcome.report is not None:
        sys.stderr.write(outcome.report.render_table())
    summary = {
        "items": len(configs),
        "succeeded": len(outcome.records),
        "failed": outcome.failures,
        "mean_efficiency_percent": {}
        if outcome.report is None
        else {a.value: round(v, 1) for a, v in outcome.report.mean_efficiency.items()},
    }
    if args.ensemble == "weighted":
        summary["weights"] = ensemble.load_weights(args.weights).as_strings()
    print(json.dumps(summary, indent=2))
    if outcome.failures:
        return max(f["exit_code"] for f in outcome.failures.values())
    return 0


def cmd_report(args) -> int:
    reports = pipeline.load_reports(args.paths)
    report = metrics.corpus_report(reports)
    sys.stdout.write(report.render_kv() if args.kv else report.render_table())
    return 0


def cmd_weights(args) -> int:
    if args.action == "reset":
        with ensemble.locked(args.weights):
            ensemble.save_weights(args.weights, ensemble.EnsembleWeights(delta=args.delta))
    sys.stdout.write(ensemble.load_weights(args.weights).dumps())
    return 0


COMMANDS = {
    "generate-subtitles": cmd_generate,
    "summarize": cmd_summarize,
    "batch": cmd_batch,
    "report": cmd_report,
    "weights": cmd_weights,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (OSError, SubsumError) as exc:
        print(f"subsum: config: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except SubsumError as exc:
        where = getattr(exc, "stage", args.command)
        print(f"subsum: {where}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort exit status
        log.exception("internal error")
        print(f"subsum: internal error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
