import threading
from decimal import Decimal

import pytest

from subsum import ensemble
from subsum.ensemble import EnsembleWeights, Method, intersect, rank_algorithms, update_weights, weighted_select
from subsum.errors import EmptyReference, InputError, MismatchedTracks, MissingWeight, TooFewAlgorithms
from subsum.summarizers import Algorithm

import synth

L, S, T, X, E = list(Algorithm)


def _results(selections, track=None):
    track = track or synth.track_of([f"c{i}" for i in range(10)])
    return [synth.fake_result(a, track, sel) for a, sel in selections.items()]


def test_intersection_basic():
    res = _results({L: [1, 2, 3], S: [2, 3, 4], T: [3, 2], X: [2, 3, 9]})
    assert intersect(res).selected == (2, 3)


def test_edmundson_is_opt_in():
    res = _results({L: [1, 2], S: [1, 2], E: [5]})
    assert intersect(res).selected == (1, 2)
    assert intersect(res, include_edmundson=True).selected == ()


def test_needs_two_members_on_one_track():
    with pytest.raises(TooFewAlgorithms):
        intersect(_results({L: [1]}))
    other = synth.track_of(["x", "y"])
    mixed = _results({L: [1]}) + [synth.fake_result(S, other, [1])]
    with pytest.raises(MismatchedTracks):
        intersect(mixed)


def test_weighted_vote():
    res = _results({L: [1, 2], S: [2, 3], T: [3, 4], X: [4, 5]})
    w = EnsembleWeights({L: 3, S: 1, T: 1, X: 1})
    out = weighted_select(res, w, 2)
    # cue 2: 3+1, cue 1: 3, then 3 and 4 with 2 each
    assert out.selected == (1, 2)
    assert out.sentence_scores[2] == Decimal(4)
    assert out.method is Method.WEIGHTED
    with pytest.raises(MissingWeight):
        weighted_select(res, EnsembleWeights({L: 1, S: 1}), 2)


def test_weighted_never_picks_unvoted():
    res = _results({L: [1], S: [1]})
    assert weighted_select(res, EnsembleWeights(), 5).selected == (1,)


def test_ranking_and_ties():
    res = _results({L: [1, 2], S: [1, 2, 3, 4], T: [1, 2, 5, 6], X: [1, 2, 3, 7, 8]})
    ref = intersect(res)
    assert rank_algorithms(res, ref) == [L, S, T, X]
    with pytest.raises(EmptyReference):
        rank_algorithms(res, intersect(_results({L: [1], S: [2]})))


def test_floor_at_zero():
    w = EnsembleWeights({L: 1, S: Decimal("0.01")})
    assert update_weights(w, [L, S])[S] == 0


def test_weights_text_roundtrip():
    w = EnsembleWeights({L: "1.025", S: 1, T: 1, X: "0.975"}, Decimal("0.025"))
    assert EnsembleWeights.loads(w.dumps()) == w
    assert w.dumps().splitlines()[0] == "luhn=1.025"
    with pytest.raises(InputError):
        EnsembleWeights.loads("luhn 1\n")
    with pytest.raises(InputError):
        EnsembleWeights.loads("luhn=-1\n")
    with pytest.raises(InputError):
        EnsembleWeights.loads("bogus=1\n")


def test_persisted_updates_serialize(tmp_path):
    path = tmp_path / "w.txt"
    ensemble.save_weights(path, EnsembleWeights({L: 1, S: 1, T: 1, X: 1}))

    def worker():
        for _ in range(10):
            ensemble.apply_persisted_update(path, [S, L, T, X])

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    w = ensemble.load_weights(path)
    assert w[S] == Decimal(2) and w[X] == 0


def test_missing_file_gives_defaults(tmp_path):
    w = ensemble.load_weights(tmp_path / "none.txt")
    assert all(v == 1 for v in w.w.values()) and w.delta == Decimal("0.025")
