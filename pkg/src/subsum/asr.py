"""Speech recognition over audio chunks and assembly of the recognized text into subtitles."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .audioseg import AudioChunk, wav_bytes
from .errors import AsrError, AuthError, BackendUnreachable, InputError, NoSpeechRecognized
from .srt import SubtitleCue, SubtitleTrack

log = logging.getLogger(__name__)

TOKEN_ENV = "SUBSUM_ASR_TOKEN"
DEFAULT_URL = "https://api.wit.ai/speech"


@dataclass(frozen=True)
class TranscriptionRequest:
    chunk: AudioChunk
    language_hint: str | None = None


@dataclass(frozen=True)
class TranscriptionResult:
    text: str
    confidence: float | None = None
    failed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", self.text.strip())
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")


class RecognizerBackend(Protocol):
    def transcribe(self, request: TranscriptionRequest) -> TranscriptionResult: ...


def chunk_hash(chunk: AudioChunk) -> str:
    """SHA-256 of the padded chunk's little-endian PCM; the stub's lookup key."""
    return hashlib.sha256(chunk.padded.samples.astype("<i2").tobytes()).hexdigest()


class OfflineStub:
    """Canned transcriptions keyed by chunk content hash.

    Unknown chunks transcribe to empty text. Keys listed in ``failing`` (or mapped
    to ``@fail`` in a fixture file) raise a transient error on every attempt.
    """

    FAIL_MARKER = "@fail"

    def __init__(self, texts: Mapping[str, str], failing: Iterable[str] = ()):
        self.texts = dict(texts)
        self.failing = frozenset(failing)

    @classmethod
    def from_file(cls, path: str | Path) -> "OfflineStub":
        texts, failing = {}, set()
        for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            key, sep, text = line.partition("=")
            if not sep:
                raise InputError(f"{path}:{n}: expected hash=text")
            key, text = key.strip(), text.strip()
            if text == cls.FAIL_MARKER:
                failing.add(key)
            else:
                texts[key] = text
        return cls(texts, failing)

    @staticmethod
    def dumps(texts: Mapping[str, str]) -> str:
        return "".join(f"{k}={v}\n" for k, v in texts.items())

    def transcribe(self, request: TranscriptionRequest) -> TranscriptionResult:
        key = chunk_hash(request.chunk)
        if key in self.failing:
            raise BackendUnreachable(f"stub marks chunk {key[:12]} as failing")
        return TranscriptionResult(self.texts.get(key, ""))


def _extract_text(body: str) -> tuple[str, float | None]:
    """Pull the final transcript out of a response that may hold several
    concatenated JSON objects (streamed partial results)."""
    decoder = json.JSONDecoder()
    objects, pos = [], 0
    body = body.strip()
    while pos < len(body):
        try:
            obj, end = decoder.raw_decode(body, pos)
        except json.JSONDecodeError:
            raise AsrError("unparseable recognizer response") from None
        objects.append(obj)
        pos = end
        while pos < len(body) and body[pos].isspace():
            pos += 1
    for obj in reversed(objects):
        if isinstance(obj, dict) and "text" in obj:
            conf = obj.get("confidence")
            return str(obj["text"]), float(conf) if isinstance(conf, (int, float)) else None
    return "", None


class RemoteHttp:
    """Posts each chunk as a WAV body with a bearer token and reads the ``text`` field."""

    def __init__(self, token: str | None = None, url: str = DEFAULT_URL, timeout: float = 30.0, session=None):
        token = token or os.environ.get(TOKEN_ENV)
        if not token:
            raise AuthError(f"no recognizer token (set {TOKEN_ENV})")
        if session is None:
            import requests

            session = requests.Session()
        self.token = token
        self.url = url
        self.timeout = timeout
        self.session = session

    def transcribe(self, request: TranscriptionRequest) -> TranscriptionResult:
        import requests

        headers = {"Authorization": f"Bearer {self.token}", "Content-Type": "audio/wav"}
        params = {"language": request.language_hint} if request.language_hint else None
        try:
            resp = self.session.post(
                self.url, data=wav_bytes(request.chunk.padded), headers=headers,
                params=params, timeout=self.timeout,
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise BackendUnreachable(str(exc)) from None
        if resp.status_code in (401, 403):
            raise AuthError(f"recognizer rejected credentials ({resp.status_code})")
        if resp.status_code == 429 or resp.status_code >= 500:
            raise BackendUnreachable(f"recognizer returned {resp.status_code}")
        if resp.status_code != 200:
            raise AsrError(f"recognizer returned {resp.status_code}")
        text, confidence = _extract_text(resp.text)
        if confidence is not None:
            confidence = min(1.0, max(0.0, confidence))
        return TranscriptionResult(text, confidence)


def _with_retries(
    backend: RecognizerBackend,
    request: TranscriptionRequest,
    attempts: int,
    backoff: float,
    max_backoff: float,
    sleep: Callable[[float], None],
) -> TranscriptionResult:
    delay = backoff
    for attempt in range(1, attempts + 1):
        try:
            return backend.transcribe(request)
        except AuthError:
            raise
        except BackendUnreachable as exc:
            if attempt == attempts:
                log.warning("chunk at %d ms failed after %d attempts: %s", request.chunk.start_ms, attempts, exc)
                break
            sleep(delay)
            delay = min(delay * 2, max_backoff)
        except AsrError as exc:
            log.warning("chunk at %d ms failed: %s", request.chunk.start_ms, exc)
            break
    return TranscriptionResult("", failed=True)


def transcribe_all(
    chunks: Sequence[AudioChunk],
    backend: RecognizerBackend,
    parallelism: int = 4,
    *,
    attempts: int = 3,
    backoff: float = 0.5,
    max_backoff: float = 4.0,
    language_hint: str | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> list[tuple[AudioChunk, TranscriptionResult]]:
    """Results come back in chunk order. Transient failures are retried with capped
    exponential backoff; a chunk that still fails yields an empty ``failed`` result.
    Credential errors abort the whole batch."""
    if parallelism < 1:
        raise InputError("parallelism must be >= 1")
    if not chunks:
        return []

    def run(c: AudioChunk) -> TranscriptionResult:
        req = TranscriptionRequest(c, language_hint)
        return _with_retries(backend, req, attempts, backoff, max_backoff, sleep)

    pool = ThreadPoolExecutor(max_workers=min(parallelism, len(chunks)))
    try:
        futures = [pool.submit(run, c) for c in chunks]
        results = [f.result() for f in futures]
    except BaseException:
        pool.shutdown(wait=True, cancel_futures=True)
        raise
    pool.shutdown(wait=True)
    return list(zip(chunks, results))


def assemble_track(results: Sequence[tuple[AudioChunk, TranscriptionResult]]) -> SubtitleTrack:
    cues = []
    for chunk, res in results:
        text = " ".join(res.text.split())
        if res.failed or not text or chunk.end_ms <= chunk.start_ms:
            continue
        cues.append(SubtitleCue(len(cues) + 1, chunk.start_ms, chunk.end_ms, text))
    if not cues:
        raise NoSpeechRecognized("no chunk produced any text")
    return SubtitleTrack(tuple(cues))
