"""Split PCM audio into speech chunks at silences for recognition.

A chunk runs from the current position to the start of the next silence, or is
cut hard at ``max_interval_ms`` when no silence comes first. Silences are
skipped, and each chunk gets one second of zero samples on both sides.
"""

from __future__ import annotations

import io
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, MalformedWav

SAMPLE_RATES = (8000, 16000, 22050, 44100, 48000)
FULL_SCALE = 32768.0
PAD_SECONDS = 1


@dataclass(frozen=True)
class AudioBuffer:
    samples: np.ndarray  # int16, mono
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples)
        if samples.ndim != 1 or samples.size < 1:
            raise InputError("audio must be a non-empty mono sample sequence")
        if self.sample_rate not in SAMPLE_RATES:
            raise InputError(f"unsupported sample rate {self.sample_rate}")
        samples = samples.astype(np.int16, copy=True)
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_ms(self) -> int:
        return samples_to_ms(len(self), self.sample_rate)


@dataclass(frozen=True)
class SegmentationConfig:
    max_interval_ms: int = 6000
    silence_threshold: float = 0.01
    min_silence_ms: int = 300
    frame_ms: int = 20

    def __post_init__(self) -> None:
        if min(self.max_interval_ms, self.min_silence_ms, self.frame_ms) <= 0 or self.silence_threshold <= 0:
            raise InputError("segmentation parameters must be positive")
        if self.min_silence_ms > self.max_interval_ms:
            raise InputError("min_silence_ms must not exceed max_interval_ms")


@dataclass(frozen=True)
class AudioChunk:
    start_ms: int
    end_ms: int
    start_sample: int
    end_sample: int
    padded: AudioBuffer

    @property
    def core_samples(self) -> np.ndarray:
        pad = PAD_SECONDS * self.padded.sample_rate
        return self.padded.samples[pad:-pad]


def samples_to_ms(n: int, rate: int) -> int:
    return (n * 1000 + rate // 2) // rate


def ms_to_samples(ms: int, rate: int) -> int:
    return (ms * rate + 500) // 1000


def read_wav(source: str | Path | bytes) -> AudioBuffer:
    """PCM 16-bit little-endian WAV, mono or multi-channel (averaged to mono)."""
    fh = io.BytesIO(source) if isinstance(source, bytes) else open(source, "rb")
    try:
        with wave.open(fh, "rb") as wav:
            if wav.getsampwidth() != 2:
                raise MalformedWav("only 16-bit PCM WAV is supported")
            channels = wav.getnchannels()
            rate = wav.getframerate()
            raw = wav.readframes(wav.getnframes())
    except (wave.Error, EOFError) as exc:
        raise MalformedWav(f"cannot read WAV: {exc}") from None
    finally:
        fh.close()
    data = np.frombuffer(raw, dtype="<i2")
    if channels > 1:
        data = data[: data.size - data.size % channels].reshape(-1, channels)
        data = np.floor_divide(data.astype(np.int32).sum(axis=1), channels)
    if data.size == 0:
        raise MalformedWav("WAV has no samples")
    return AudioBuffer(data, rate)


def wav_bytes(audio: AudioBuffer) -> bytes:
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(audio.sample_rate)
        wav.writeframes(audio.samples.astype("<i2").tobytes())
    return buf.getvalue()


def frame_rms(audio: AudioBuffer, frame_len: int) -> np.ndarray:
    """RMS of consecutive frames as a fraction of full scale; the last frame may be short."""
    x = audio.samples.astype(np.float64)
    n_full = x.size // frame_len
    rms = np.sqrt(np.mean(x[: n_full * frame_len].reshape(n_full, frame_len) ** 2, axis=1)) if n_full else np.empty(0)
    tail = x[n_full * frame_len :]
    if tail.size:
        rms = np.append(rms, np.sqrt(np.mean(tail**2)))
    return rms / FULL_SCALE


def silent_runs(audio: AudioBuffer, cfg: SegmentationConfig) -> list[tuple[int, int]]:
    """Maximal quiet stretches as ``(start_sample, end_sample)``, end exclusive."""
    rate = audio.sample_rate
    frame_len = max(1, ms_to_samples(cfg.frame_ms, rate))
    min_len = ms_to_samples(cfg.min_silence_ms, rate)
    quiet = frame_rms(audio, frame_len) < cfg.silence_threshold
    # Boundaries of runs of quiet frames.
    edges = np.diff(np.concatenate(([0], quiet.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    runs = []
    for f0, f1 in zip(starts, ends):
        s0 = int(f0) * frame_len
        s1 = min(int(f1) * frame_len, len(audio))
        if s1 - s0 >= min_len:
            runs.append((s0, s1))
    return runs


def detect_silences(audio: AudioBuffer, cfg: SegmentationConfig = SegmentationConfig()) -> list[tuple[int, int]]:
    rate = audio.sample_rate
    return [(samples_to_ms(a, rate), samples_to_ms(b, rate)) for a, b in silent_runs(audio, cfg)]


def _padded(audio: AudioBuffer, start: int, end: int) -> AudioBuffer:
    pad = np.zeros(PAD_SECONDS * audio.sample_rate, dtype=np.int16)
    return AudioBuffer(np.concatenate((pad, audio.samples[start:end], pad)), audio.sample_rate)


def chunk(audio: AudioBuffer, cfg: SegmentationConfig = SegmentationConfig()) -> list[AudioChunk]:
    rate = audio.sample_rate
    total = len(audio)
    max_len = ms_to_samples(cfg.max_interval_ms, rate)
    silences = silent_runs(audio, cfg)
    chunks = []
    pos = 0
    k = 0
    while pos < total:
        while k < len(silences) and silences[k][1] <= pos:
            k += 1
        if k < len(silences) and silences[k][0] <= pos:
            pos = silences[k][1]
            continue
        next_silence = silences[k][0] if k < len(silences) else total
        end = min(next_silence, pos + max_len)
        chunks.append(
            AudioChunk(
                start_ms=samples_to_ms(pos, rate),
                end_ms=samples_to_ms(end, rate),
                start_sample=pos,
                end_sample=end,
                padded=_padded(audio, pos, end),
            )
        )
        pos = end
    return chunks
