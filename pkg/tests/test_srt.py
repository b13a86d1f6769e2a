import pytest

from subsum.errors import EmptyTrack, MalformedSrt, MalformedTimecode, NonMonotonicIds, OverlapError
from subsum.srt import SubtitleCue, SubtitleTrack, format_timecode, parse_srt, parse_timecode, renumber, serialize_srt

import synth


def test_timecode_roundtrip():
    for ms in (0, 1, 999, 1000, 59_999, 3_599_999, 359_999_999):
        assert parse_timecode(format_timecode(ms)) == ms
    assert parse_timecode("01:02:03,004") == 3_723_004


@pytest.mark.parametrize("bad", ["1:02:03,004", "01:02:03.004", "01:60:00,000", "01:00:60,000", "aa:00:00,000"])
def test_bad_timecodes(bad):
    with pytest.raises(MalformedTimecode):
        parse_timecode(bad)


def test_multiline_text_is_joined():
    track = parse_srt("1\n00:00:01,000 --> 00:00:02,000\nfirst line\n  second line \n\n")
    assert track.cues[0].text == "first line second line"


def test_bom_and_crlf():
    raw = "\ufeff1\r\n00:00:01,000 --> 00:00:02,000\r\nhi\r\n\r\n".encode("utf-8")
    assert serialize_srt(parse_srt(raw)) == b"1\n00:00:01,000 --> 00:00:02,000\nhi\n\n"


def test_ids_may_skip_but_not_repeat():
    ok = parse_srt("3\n00:00:01,000 --> 00:00:02,000\na\n\n7\n00:00:03,000 --> 00:00:04,000\nb\n")
    assert ok.ids == (3, 7)
    with pytest.raises(NonMonotonicIds):
        parse_srt("2\n00:00:01,000 --> 00:00:02,000\na\n\n2\n00:00:03,000 --> 00:00:04,000\nb\n")


@pytest.mark.parametrize(
    "raw,err",
    [
        ("", EmptyTrack),
        ("x\n00:00:01,000 --> 00:00:02,000\na\n", MalformedSrt),
        ("0\n00:00:01,000 --> 00:00:02,000\na\n", MalformedSrt),
        ("1\n00:00:01,000 -> 00:00:02,000\na\n", MalformedTimecode),
        ("1\n00:00:02,000 --> 00:00:02,000\na\n", OverlapError),
        ("1\n00:00:01,000 --> 00:00:02,000\n", MalformedSrt),
        (b"1\n00:00:01,000 --> 00:00:02,000\n\xff\n", MalformedSrt),
    ],
)
def test_malformed(raw, err):
    with pytest.raises(err):
        parse_srt(raw)


def test_starts_must_not_go_backwards():
    with pytest.raises(MalformedSrt):
        parse_srt("1\n00:00:05,000 --> 00:00:06,000\na\n\n2\n00:00:01,000 --> 00:00:02,000\nb\n")


def test_cue_validation():
    with pytest.raises(ValueError):
        SubtitleCue(1, 0, 10, " padded ")
    with pytest.raises(ValueError):
        SubtitleCue(0, 0, 10, "x")


def test_renumber_keeps_origin():
    track = SubtitleTrack((SubtitleCue(4, 0, 10, "a"), SubtitleCue(9, 20, 30, "b")))
    r = renumber(track)
    assert r.ids == (1, 2)
    assert r.origin_ids == (4, 9)


def test_digest_tracks_content():
    a = synth.track_of(["one", "two"])
    b = synth.track_of(["one", "three"])
    assert a.digest() == synth.track_of(["one", "two"]).digest()
    assert a.digest() != b.digest()


def test_talk_fixture_is_canonical():
    raw = synth.TALK.read_bytes()
    track = parse_srt(raw)
    assert len(track) == 370
    assert serialize_srt(track) == raw
