import json
import subprocess
import sys

from subsum import audioseg, asr
from subsum.cli import main

import synth


def test_summarize_and_report(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["summarize", "--srt", str(synth.TALK), "--ensemble", "intersect", "-o", str(out)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["ensemble"]["method"] == "intersection"
    assert main(["report", str(out), "--kv"]) == 0
    assert "videos=1" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    assert main(["summarize", "--srt", str(tmp_path / "missing.srt"), "-o", str(tmp_path)]) == 2
    empty = tmp_path / "e.srt"
    empty.write_text("1\n00:00:01,000 --> 00:00:02,000\nuh um\n")
    assert main(["summarize", "--srt", str(empty), "-o", str(tmp_path / "o")]) == 4
    assert main(["summarize", "--srt", str(synth.TALK), "--algorithms", "edmundson,luhn", "-o", str(tmp_path)]) == 2
    assert "edmundson" in capsys.readouterr().err


def test_weights_and_config(tmp_path, capsys):
    w = tmp_path / "w.txt"
    assert main(["weights", "reset", "--weights", str(w)]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "delta=0.025"
    cfg = tmp_path / "subsum.conf"
    cfg.write_text(f"weights={w}\nensemble=weighted\np-select=10\n")
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "summarize", "--srt", str(synth.TALK), "-o", str(out)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["ensemble"] == {"method": "weighted", "selected": 10}
    assert "weights_after" in rec


def test_generate_and_batch(tmp_path, capsys):
    buf = synth.audio(synth.tone(2000), synth.silence(600), synth.tone(3000, freq=330.0, offset_ms=2600))
    wav = tmp_path / "clip.wav"
    wav.write_bytes(audioseg.wav_bytes(buf))
    texts = ["river stone and cloud", "river music in the garden"]
    stub = {asr.chunk_hash(c): t for c, t in zip(audioseg.chunk(buf), texts)}
    stub_path = tmp_path / "stub.txt"
    stub_path.write_text(asr.OfflineStub.dumps(stub))
    srt = tmp_path / "clip.srt"
    assert main(["generate-subtitles", str(wav), "-o", str(srt), "--asr", "stub", "--stub-map", str(stub_path)]) == 0
    assert srt.read_text() == "1\n00:00:00,000 --> 00:00:02,000\nriver stone and cloud\n\n2\n00:00:02,600 --> 00:00:05,600\nriver music in the garden\n\n"
    capsys.readouterr()

    manifest = tmp_path / "corpus.txt"
    manifest.write_text(f"clip.wav\n{synth.TALK}\n")
    code = main(["batch", str(manifest), "--ensemble", "intersect", "--asr", "stub", "--stub-map", str(stub_path),
                 "-o", str(tmp_path / "runs")])
    summary = json.loads(capsys.readouterr().out)
    assert code == 0, summary
    assert summary["succeeded"] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "subsum", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("subsum ")
