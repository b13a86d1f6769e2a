import json

import pytest

from subsum import metrics
from subsum.ensemble import intersect
from subsum.errors import EmptyCorpus, MismatchedTracks, UndefinedEfficiency
from subsum.summarizers import Algorithm, SummaryConfig, luhn

import synth

L, S, T, X, _ = list(Algorithm)


def test_efficiency_undefined():
    with pytest.raises(UndefinedEfficiency):
        metrics.efficiency(0, 0)


def _report(video_id, selections):
    track = synth.track_of([f"c{i}" for i in range(10)])
    res = [synth.fake_result(a, track, s) for a, s in selections.items()]
    return metrics.efficiency_report(res, intersect(res), video_id)


def test_report_roundtrip():
    r = _report("v1", {L: [1, 2], S: [1, 2, 3, 4]})
    assert r.n_combined == 2
    assert r.per_algorithm[S].efficiency == 0.5
    assert metrics.EfficiencyReport.from_dict(json.loads(metrics.report_json(r))) == r


def test_corpus_mean_and_rendering():
    rows = [_report("b", {L: [1, 2], S: [1, 2, 3, 4]}), _report("a", {L: [1], S: [1]})]
    corpus = metrics.corpus_report(rows)
    assert [r.video_id for r in corpus.rows] == ["a", "b"]
    assert corpus.mean_efficiency[S] == pytest.approx(75.0)
    table = corpus.render_table().splitlines()
    assert table[0].split() == ["video_id", "luhn", "lsa"]
    assert table[-1].split() == ["mean", "%", "100.0", "75.0"]
    kv = corpus.render_kv()
    assert "lsa.mean_ratio=0.750000" in kv and "videos=2" in kv
    assert corpus.render_rows_csv().splitlines()[0] == "video_id,method,algorithm,n_combined,n_algorithm,efficiency"
    with pytest.raises(EmptyCorpus):
        metrics.corpus_report([])


def test_mean_is_order_independent():
    rng = synth.rng_for("fsum")
    reports = []
    for k in range(30):
        n = rng.randint(1, 9)
        reports.append(_report(f"v{k}", {L: list(range(1, n + 1)), S: [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]}))
    a = metrics.corpus_report(reports).mean_efficiency
    rng.shuffle(reports)
    assert metrics.corpus_report(reports).mean_efficiency == a


def test_profile():
    track = synth.track_of(["river stone", "river", "cloud"])
    res = luhn(track, SummaryConfig(p_select=1))
    rows = metrics.selection_profile(track, res)
    assert rows == [(1, 1, 2.0), (2, 0, 2.0), (3, 0, 0.0)]
    assert metrics.profile_csv(rows) == "cue_id,selected,score\n1,1,2.0\n2,0,2.0\n3,0,0.0\n"
    with pytest.raises(MismatchedTracks):
        metrics.selection_profile(synth.track_of(["x"]), res)
