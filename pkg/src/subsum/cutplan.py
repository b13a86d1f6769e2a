"""Turn selected cues into source-timeline segments, an ffmpeg script that cuts and
joins them, and subtitles re-timed to the shortened video."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptySelection, InputError
from .srt import SubtitleCue, SubtitleTrack, format_timecode, renumber

DEFAULT_TOOL = "ffmpeg"


@dataclass(frozen=True)
class CutList:
    segments: tuple[tuple[int, int], ...]
    source: str = ""
    merge_gap_ms: int = 500

    def __post_init__(self) -> None:
        segs = tuple((int(a), int(b)) for a, b in self.segments)
        object.__setattr__(self, "segments", segs)
        for a, b in segs:
            if not 0 <= a < b:
                raise InputError(f"bad segment [{a}, {b}]")
        for (_, prev_end), (start, _) in zip(segs, segs[1:]):
            if start < prev_end:
                raise InputError("segments overlap or are out of order")

    @property
    def duration_ms(self) -> int:
        return sum(b - a for a, b in self.segments)

    def to_json(self) -> str:
        return json.dumps([{"start_ms": a, "end_ms": b} for a, b in self.segments], indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str, source: str = "", merge_gap_ms: int = 500) -> "CutList":
        return cls(tuple((d["start_ms"], d["end_ms"]) for d in json.loads(text)), source, merge_gap_ms)


def merge_segments(spans: Iterable[tuple[int, int]], merge_gap_ms: int) -> list[tuple[int, int]]:
    """Sort spans and fuse neighbours whose gap is under ``merge_gap_ms`` (overlaps always fuse)."""
    merged: list[list[int]] = []
    for a, b in sorted(spans):
        if merged and a - merged[-1][1] < merge_gap_ms:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def build_cutlist(
    track: SubtitleTrack, selected: Sequence[int], merge_gap_ms: int = 500, source: str = ""
) -> CutList:
    if merge_gap_ms < 0:
        raise InputError("merge_gap_ms must be non-negative")
    if not selected:
        raise EmptySelection("nothing selected to cut")
    cues = track.by_id()
    missing = [cid for cid in selected if cid not in cues]
    if missing:
        raise InputError(f"selected ids not in track: {missing[:5]}")
    spans = [(cues[cid].start, cues[cid].end) for cid in selected]
    return CutList(tuple(merge_segments(spans, merge_gap_ms)), source, merge_gap_ms)


def kept_before(segments: Sequence[tuple[int, int]], t: int) -> int:
    """Milliseconds of kept material on the source timeline before ``t``."""
    total = 0
    for a, b in segments:
        if t <= a:
            break
        total += min(t, b) - a
    return total


def retime(track: SubtitleTrack, cutlist: CutList) -> SubtitleTrack:
    """Cues that overlap kept material, mapped onto the summarized timeline and
    renumbered; a cue straddling a cut keeps only its surviving part."""
    out = []
    for cue in track.cues:
        start = kept_before(cutlist.segments, cue.start)
        end = kept_before(cutlist.segments, cue.end)
        if end > start:
            out.append(SubtitleCue(cue.id, start, end, cue.text))
    retimed = SubtitleTrack(tuple(out), origin_ids=None)
    if track.origin_ids is not None:
        origin = dict(zip(track.ids, track.origin_ids))
        retimed = SubtitleTrack(retimed.cues, origin_ids=tuple(origin[c.id] for c in retimed.cues))
    return renumber(retimed) if retimed.cues else retimed


def _seconds(ms: int) -> str:
    return f"{ms // 1000}.{ms % 1000:03d}"


def _assign(var: str, default: str, missing: str) -> str:
    if default:
        return f'{var}="${{{var}:-{_dq(default)}}}"'
    return f'{var}="${{{var}:?{missing}}}"'


def _dq(value: str) -> str:
    """Escape for use inside double quotes."""
    return "".join("\\" + ch if ch in '"\\$`' else ch for ch in value)


def _out_assignment(out_path: str) -> str:
    if out_path.startswith("/"):
        return _assign("OUT", out_path, "")
    # Relative names resolve next to the script, wherever it is run from.
    return f'OUT="${{OUT:-$(cd "$(dirname "$0")" && pwd)/{_dq(out_path)}}}"'


def render_script(cutlist: CutList, out_path: str, tool: str = DEFAULT_TOOL) -> str:
    n = len(cutlist.segments)
    lines = [
        "#!/bin/sh",
        f"# Summarized video: {n} segment(s), {format_timecode(cutlist.duration_ms)} kept from the source.",
        "# Segments are re-encoded rather than stream-copied, so each cut lands on the",
        "# exact frame instead of the nearest keyframe.",
        "set -eu",
        f'FFMPEG="${{FFMPEG:-{tool}}}"',
        _assign("SRC", cutlist.source, "set SRC to the source video"),
        _out_assignment(out_path),
        'WORK="$(mktemp -d)"',
        "trap 'rm -rf \"$WORK\"' EXIT",
        "",
    ]
    for k, (a, b) in enumerate(cutlist.segments, start=1):
        lines.append(
            f'"$FFMPEG" -hide_banner -loglevel error -y -ss {_seconds(a)} -i "$SRC" -t {_seconds(b - a)} '
            f'-c:v libx264 -preset veryfast -crf 18 -c:a aac -b:a 160k "$WORK/seg{k:04d}.mp4"'
        )
    lines.append("")
    lines.append(": > \"$WORK/list.txt\"")
    for k in range(1, n + 1):
        lines.append(f"echo \"file 'seg{k:04d}.mp4'\" >> \"$WORK/list.txt\"")
    lines.append('"$FFMPEG" -hide_banner -loglevel error -y -f concat -safe 0 -i "$WORK/list.txt" -c copy "$OUT"')
    return "\n".join(lines) + "\n"


def emit_script(
    cutlist: CutList, track: SubtitleTrack, out_path: str, tool: str = DEFAULT_TOOL
) -> tuple[str, SubtitleTrack]:
    return render_script(cutlist, out_path, tool), retime(track, cutlist)
