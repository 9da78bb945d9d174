from __future__ import annotations

import math
from collections import defaultdict
from typing import TYPE_CHECKING, NamedTuple

if TYPE_CHECKING:
    from collections.abc import Iterable

    from crowdtrack.core.tracker import NtyxRecord
    from crowdtrack.synth.scene import GroundTruth


class AccuracyReport(NamedTuple):
    """
    Position matches over visible truth entries, and how often an
    actor's associated pedestrian id changed between matched frames.
    """

    accuracy: float
    matches: int
    visible: int
    id_switches: int
    switches_per_actor: dict[int, int]

    def summary(self) -> str:
        return (
            f"accuracy {self.accuracy:.4f} ({self.matches}/{self.visible} visible positions), "
            f"{self.id_switches} id switches"
        )


def _match_frame(
    records: list[NtyxRecord], truth: list[tuple[int, float, float]], match_radius: float
) -> list[tuple[int, int]]:
    """Greedy nearest-first (actor, pedestrian) pairs of one frame."""
    candidates = []
    for actor_id, x, y in truth:
        for record in records:
            distance = math.hypot(record.x - x, record.y - y)
            if distance <= match_radius:
                candidates.append((distance, actor_id, record.n))

    matched_actors: set[int] = set()
    matched_ids: set[int] = set()
    pairs = []
    for _, actor_id, pedestrian_id in sorted(candidates):
        if actor_id in matched_actors or pedestrian_id in matched_ids:
            continue
        matched_actors.add(actor_id)
        matched_ids.add(pedestrian_id)
        pairs.append((actor_id, pedestrian_id))

    return pairs


def score(tracks: Iterable[NtyxRecord], truth: GroundTruth, match_radius: float) -> AccuracyReport:
    records_by_frame: dict[int, list[NtyxRecord]] = defaultdict(list)
    for record in tracks:
        records_by_frame[record.t].append(record)

    visible_by_frame: dict[int, list[tuple[int, float, float]]] = defaultdict(list)
    for entry in truth.visible_entries():
        visible_by_frame[entry.frame_index].append((entry.actor_id, entry.x, entry.y))

    visible = sum(len(entries) for entries in visible_by_frame.values())
    matches = 0
    last_id: dict[int, int] = {}
    switches: dict[int, int] = defaultdict(int)

    for t in sorted(visible_by_frame):
        for actor_id, pedestrian_id in _match_frame(records_by_frame.get(t, []), visible_by_frame[t], match_radius):
            matches += 1
            if actor_id in last_id and last_id[actor_id] != pedestrian_id:
                switches[actor_id] += 1
            last_id[actor_id] = pedestrian_id

    accuracy = matches / visible if visible else 0.0
    return AccuracyReport(accuracy, matches, visible, sum(switches.values()), dict(switches))
