import numpy as np
import pytest

from subsum import audioseg
from subsum.audioseg import AudioBuffer, SegmentationConfig
from subsum.errors import InputError, MalformedWav

import synth


def test_wav_roundtrip():
    buf = synth.audio(synth.tone(300), rate=8000)
    back = audioseg.read_wav(audioseg.wav_bytes(buf))
    assert back.sample_rate == 8000
    assert np.array_equal(back.samples, buf.samples)


def test_stereo_is_averaged():
    import io
    import wave

    frames = np.array([[100, 300], [-5, -6]], dtype="<i2")
    out = io.BytesIO()
    with wave.open(out, "wb") as w:
        w.setnchannels(2)
        w.setsampwidth(2)
        w.setframerate(16000)
        w.writeframes(frames.tobytes())
    assert audioseg.read_wav(out.getvalue()).samples.tolist() == [200, -6]


def test_rejects_bad_input():
    with pytest.raises(MalformedWav):
        audioseg.read_wav(b"not a wav")
    with pytest.raises(InputError):
        AudioBuffer(np.zeros(10, dtype=np.int16), 11025)
    with pytest.raises(InputError):
        SegmentationConfig(min_silence_ms=0)


def test_short_pause_is_not_silence():
    buf = synth.audio(synth.tone(1000), synth.silence(200), synth.tone(1000, offset_ms=1200))
    assert audioseg.detect_silences(buf) == []
    assert [(c.start_ms, c.end_ms) for c in audioseg.chunk(buf)] == [(0, 2200)]


def test_leading_and_trailing_silence_skipped():
    buf = synth.audio(synth.silence(1000), synth.tone(1000, offset_ms=1000), synth.silence(1000))
    assert [(c.start_ms, c.end_ms) for c in audioseg.chunk(buf)] == [(1000, 2000)]


def test_all_silence_gives_no_chunks():
    assert audioseg.chunk(synth.audio(synth.silence(3000))) == []


@pytest.mark.parametrize("rate", [8000, 22050, 44100])
def test_other_rates(rate):
    buf = synth.audio(synth.tone(1000, rate), synth.silence(600, rate), synth.tone(1000, rate), rate=rate)
    chunks = audioseg.chunk(buf)
    assert len(chunks) == 2
    assert abs(chunks[1].start_ms - 1600) <= 20
    assert len(chunks[0].padded) == chunks[0].end_sample + 2 * rate
