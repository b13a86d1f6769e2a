"""SubRip (.srt) parsing and serialization, plus the cue model shared by the package.

Times are integer milliseconds throughout. Serialization is canonical: id line,
``HH:MM:SS,mmm --> HH:MM:SS,mmm`` line, a single text line, then one blank line.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import (
    EmptyTrack,
    MalformedSrt,
    MalformedTimecode,
    NonMonotonicIds,
    OverlapError,
)

MAX_MILLIS = 360_000_000

_TIMECODE_RE = re.compile(r"^(\d{2}):(\d{2}):(\d{2}),(\d{3})$")
_TIMING_LINE_RE = re.compile(r"^(\S+)\s*-->\s*(\S+)(?:\s.*)?$")


def parse_timecode(value: str) -> int:
    m = _TIMECODE_RE.match(value)
    if m is None:
        raise MalformedTimecode(f"bad timecode {value!r}")
    hours, minutes, seconds, millis = (int(g) for g in m.groups())
    if minutes > 59 or seconds > 59:
        raise MalformedTimecode(f"bad timecode {value!r}")
    return ((hours * 60 + minutes) * 60 + seconds) * 1000 + millis


def format_timecode(millis: int) -> str:
    if not 0 <= millis < MAX_MILLIS:
        raise ValueError(f"timecode out of range: {millis}")
    seconds, ms = divmod(millis, 1000)
    minutes, s = divmod(seconds, 60)
    h, m = divmod(minutes, 60)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


@dataclass(frozen=True)
class SubtitleCue:
    id: int
    start: int
    end: int
    text: str

    def __post_init__(self) -> None:
        if self.id < 1:
            raise ValueError(f"cue id must be positive, got {self.id}")
        if not 0 <= self.start < MAX_MILLIS or not 0 <= self.end < MAX_MILLIS:
            raise ValueError(f"cue {self.id}: timestamp out of range")
        if self.start >= self.end:
            raise OverlapError(f"cue {self.id}: start {self.start} >= end {self.end}")
        if not self.text or self.text != self.text.strip() or "\n" in self.text or "\r" in self.text:
            raise ValueError(f"cue {self.id}: text must be one non-empty trimmed line")

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class SubtitleTrack:
    """Ordered cues. ``origin_ids`` maps positions back to the ids of the source
    file after :func:`renumber`; it is ``None`` for freshly parsed tracks."""

    cues: tuple[SubtitleCue, ...]
    origin_ids: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cues", tuple(self.cues))
        for prev, cur in zip(self.cues, self.cues[1:]):
            if cur.id <= prev.id:
                raise NonMonotonicIds(f"cue id {cur.id} follows {prev.id}")
            if cur.start < prev.start:
                raise MalformedSrt(f"cue {cur.id} starts before cue {prev.id}")
        if self.origin_ids is not None:
            object.__setattr__(self, "origin_ids", tuple(self.origin_ids))
            if len(self.origin_ids) != len(self.cues):
                raise ValueError("origin_ids length differs from cue count")

    def __len__(self) -> int:
        return len(self.cues)

    def __iter__(self) -> Iterator[SubtitleCue]:
        return iter(self.cues)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(c.id for c in self.cues)

    def by_id(self) -> dict[int, SubtitleCue]:
        return {c.id: c for c in self.cues}

    def subset(self, ids: Iterable[int]) -> "SubtitleTrack":
        keep = set(ids)
        return SubtitleTrack(tuple(c for c in self.cues if c.id in keep))

    def digest(self) -> str:
        """Content hash used to check that results come from the same track."""
        return hashlib.sha256(serialize_srt(self)).hexdigest()[:16]


def _blocks(text: str) -> Iterator[list[str]]:
    block: list[str] = []
    for line in text.split("\n"):
        if line.strip() == "":
            if block:
                yield block
                block = []
        else:
            block.append(line)
    if block:
        yield block


def parse_srt(raw: bytes | str) -> SubtitleTrack:
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedSrt(f"not UTF-8: {exc}") from None
    else:
        text = raw
    text = text.removeprefix("\ufeff").replace("\r", "")

    cues: list[SubtitleCue] = []
    for block in _blocks(text):
        id_line = block[0].strip()
        if not (id_line.isascii() and id_line.isdigit()) or int(id_line) < 1:
            raise MalformedSrt(f"expected positive cue id, got {id_line!r}")
        if len(block) < 2:
            raise MalformedSrt(f"cue {id_line}: missing timing line")
        timing = _TIMING_LINE_RE.match(block[1].strip())
        if timing is None:
            raise MalformedTimecode(f"cue {id_line}: bad timing line {block[1]!r}")
        start = parse_timecode(timing.group(1))
        end = parse_timecode(timing.group(2))
        body = " ".join(line.strip() for line in block[2:] if line.strip())
        if not body:
            raise MalformedSrt(f"cue {id_line}: no text")
        cue_id = int(id_line)
        if cues and cue_id <= cues[-1].id:
            raise NonMonotonicIds(f"cue id {cue_id} follows {cues[-1].id}")
        if start >= end:
            raise OverlapError(f"cue {cue_id}: start >= end")
        cues.append(SubtitleCue(cue_id, start, end, body))

    if not cues:
        raise EmptyTrack("no subtitle records")
    return SubtitleTrack(tuple(cues))


def serialize_srt(track: SubtitleTrack) -> bytes:
    parts = [
        f"{c.id}\n{format_timecode(c.start)} --> {format_timecode(c.end)}\n{c.text}\n\n"
        for c in track.cues
    ]
    return "".join(parts).encode("utf-8")


def renumber(track: SubtitleTrack) -> SubtitleTrack:
    origin = track.origin_ids if track.origin_ids is not None else track.ids
    cues = tuple(
        SubtitleCue(i, c.start, c.end, c.text) for i, c in enumerate(track.cues, start=1)
    )
    return SubtitleTrack(cues, origin_ids=origin)
