import pytest

from crowdtrack.core.tracker import NtyxRecord
from crowdtrack.synth.scene import GroundTruth, TruthEntry, ground_truth
from crowdtrack.synth.scoring import AccuracyReport, score


def records_from_truth(truth: GroundTruth, offset: float = 0.0) -> list[NtyxRecord]:
    return [
        NtyxRecord(entry.actor_id, entry.frame_index, entry.y, entry.x + offset) for entry in truth.visible_entries()
    ]


def test_tracks_identical_to_truth(crossing_script):
    truth = ground_truth(crossing_script)

    report = score(records_from_truth(truth), truth, 5)

    assert report.accuracy == 1.0
    assert report.id_switches == 0
    assert report.matches == report.visible == 21


def test_empty_tracks(crossing_script):
    report = score([], ground_truth(crossing_script), 5)

    assert report.accuracy == 0.0
    assert report.matches == 0


def test_tracks_offset_beyond_radius(single_actor_script):
    truth = ground_truth(single_actor_script)

    report = score(records_from_truth(truth, offset=6.0), truth, 5)

    assert report.accuracy == 0.0


def test_accuracy_never_rises_when_moving_away(single_actor_script):
    truth = ground_truth(single_actor_script)

    accuracies = [score(records_from_truth(truth, offset), truth, 5).accuracy for offset in (0, 2, 4, 5, 5.5, 8)]

    assert accuracies == sorted(accuracies, reverse=True)


def test_id_switch_is_counted():
    truth = GroundTruth([TruthEntry(1, t, 10.0, 10.0, True) for t in range(4)])
    records = [
        NtyxRecord(1, 0, 10.0, 10.0),
        NtyxRecord(1, 1, 10.0, 10.0),
        NtyxRecord(2, 2, 10.0, 10.0),
        NtyxRecord(2, 3, 10.0, 10.0),
    ]

    report = score(records, truth, 1)

    assert report.id_switches == 1
    assert report.switches_per_actor == {1: 1}


def test_nearest_record_wins():
    truth = GroundTruth([TruthEntry(1, 0, 10.0, 10.0, True), TruthEntry(2, 0, 14.0, 10.0, True)])
    records = [NtyxRecord(7, 0, 10.0, 13.0), NtyxRecord(8, 0, 10.0, 15.0)]

    report = score(records, truth, 3)

    # record 7 goes to actor 2, so actor 1 stays unmatched
    assert report.matches == 1
    assert report.accuracy == 0.5


def test_invisible_entries_are_not_scored():
    truth = GroundTruth([TruthEntry(1, 0, 10.0, 10.0, True), TruthEntry(2, 0, 30.0, 30.0, False)])

    report = score([NtyxRecord(1, 0, 10.0, 10.0)], truth, 1)

    assert report.accuracy == 1.0
    assert report.visible == 1


def test_summary():
    report = AccuracyReport(0.925, 37, 40, 2, {3: 2})

    assert report.summary() == "accuracy 0.9250 (37/40 visible positions), 2 id switches"


def test_empty_truth():
    assert score([NtyxRecord(1, 0, 1.0, 1.0)], GroundTruth(), 5).accuracy == pytest.approx(0.0)
