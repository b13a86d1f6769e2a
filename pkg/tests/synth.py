"""Deterministic builders shared by the test modules."""

import math
import random
from pathlib import Path

import numpy as np

from subsum.audioseg import AudioBuffer
from subsum.srt import SubtitleCue, SubtitleTrack
from subsum.summarizers import Algorithm, SentenceScore, SummaryResult

FIXTURES = Path(__file__).with_name("fixtures")
TALK = FIXTURES / "talk_370.srt"

VOCAB = "apple river stone cloud music garden window candle forest bridge harbor lantern".split()


def timecode(ms):
    s, ms = divmod(ms, 1000)
    m, s = divmod(s, 60)
    h, m = divmod(m, 60)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def track_of(texts, step=1000, length=900):
    cues = [SubtitleCue(i + 1, i * step, i * step + length, t) for i, t in enumerate(texts)]
    return SubtitleTrack(tuple(cues))


def random_texts(rng, n, lo=2, hi=7, vocab=VOCAB):
    return [" ".join(rng.choice(vocab) for _ in range(rng.randint(lo, hi))) for _ in range(n)]


def random_timed_track(rng, n):
    """Cues with random durations and gaps (including zero gaps)."""
    t = rng.randint(0, 3000)
    cues = []
    for i in range(1, n + 1):
        dur = rng.randint(300, 5000)
        cues.append(SubtitleCue(i, t, t + dur, f"line {i}"))
        t += dur + rng.choice([0, 0, 50, 200, 499, 500, 501, 900, 2500])
    return SubtitleTrack(tuple(cues))


def canonical_srt(rng, n):
    """Canonical SRT text written without going through the library serializer."""
    words = VOCAB + ["Ça", "va", "naïve", "日本語", "42", "it's", "<i>so</i>", "--"]
    t = rng.randint(0, 10_000)
    out = []
    for i in range(1, n + 1):
        dur = rng.randint(1, 7000)
        text = " ".join(rng.choice(words) for _ in range(rng.randint(1, 9)))
        out.append(f"{i}\n{timecode(t)} --> {timecode(t + dur)}\n{text}\n\n")
        t += dur + rng.choice([0, 1, 40, 800])
    return "".join(out)


def messy_srt(rng, n):
    """Valid but non-canonical SRT: CRLF, BOM, multi-line text, padding, stray blank lines."""
    t = rng.randint(0, 5000)
    blocks = []
    for i in range(1, n + 1):
        dur = rng.randint(100, 4000)
        lines = [" ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 5))) for _ in range(rng.randint(1, 3))]
        if rng.random() < 0.3:
            lines[0] = "  " + lines[0] + "\t"
        arrow = rng.choice([" --> ", " -->  ", "  --> "])
        blocks.append(f"{i}\n{timecode(t)}{arrow}{timecode(t + dur)}\n" + "\n".join(lines))
        t += dur + rng.choice([0, 10, 600])
    sep = "\n\n" + "\n" * rng.randint(0, 2)
    text = sep.join(blocks) + rng.choice(["", "\n", "\n\n\n"])
    if rng.random() < 0.6:
        text = text.replace("\n", "\r\n")
    if rng.random() < 0.5:
        text = "\ufeff" + text
    return text.encode("utf-8")


def fake_result(alg, track, selected, scores=None):
    if scores is None:
        scores = [float(cid in selected) for cid in track.ids]
    return SummaryResult(
        algorithm=alg,
        scores=tuple(SentenceScore(c, float(s)) for c, s in zip(track.ids, scores)),
        selected=tuple(c for c in track.ids if c in set(selected)),
        p_select=len(selected),
        track_digest=track.digest(),
    )


def random_results(rng, track, algorithms=(Algorithm.LUHN, Algorithm.LSA, Algorithm.TEXTRANK, Algorithm.LEXRANK)):
    ids = list(track.ids)
    out = []
    for alg in algorithms:
        k = rng.randint(1, len(ids))
        out.append(fake_result(alg, track, rng.sample(ids, k)))
    return out


def tone(ms, rate=16000, freq=440.0, amp=0.5, offset_ms=0):
    n = ms * rate // 1000
    t = (np.arange(n) + offset_ms * rate // 1000) / rate
    return np.round(amp * 32767 * np.sin(2 * math.pi * freq * t)).astype(np.int16)


def silence(ms, rate=16000):
    return np.zeros(ms * rate // 1000, dtype=np.int16)


def audio(*parts, rate=16000):
    return AudioBuffer(np.concatenate(parts), rate)


def rng_for(name, k=0):
    return random.Random(f"{name}:{k}")
