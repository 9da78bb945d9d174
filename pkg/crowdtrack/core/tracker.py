from __future__ import annotations

import math
from logging import getLogger
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from crowdtrack.core.exceptions import InvalidTrackException
from crowdtrack.core.feature_matrix import FeatureMatrix, build_possibility_matrix
from crowdtrack.core.features import observe_blobs
from crowdtrack.core.probability_tree import (
    assign,
    assign_pairs,
    build_probability_tree,
    pair_conditionals,
    pair_posteriors,
    posteriors,
    update_priors,
)
from crowdtrack.core.track import Track, TrackSample, TrackStatus
from crowdtrack.tools.resources import package_name

if TYPE_CHECKING:
    from crowdtrack.core.blob import Blob
    from crowdtrack.core.features import BlobObservation, FeatureConfig
    from crowdtrack.core.frame import Frame
    from crowdtrack.core.motion_segment import Point

LOGGER = getLogger(package_name())

DEFAULT_OCCLUSION_LIMIT = 10
MERGE_MARGIN = 2.0


class NtyxRecord(NamedTuple):
    """One row of the trajectory table."""

    n: int
    t: int
    y: float
    x: float


def _uniform(n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.float64)
    return np.full(n, 1.0 / n)


def _distance(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _reach(observation: BlobObservation) -> float:
    """Radius of a disc with the blob's area, plus a small margin."""
    return math.sqrt(observation.area / math.pi) + MERGE_MARGIN


class TrackerState:
    """
    Everything the tracker carries from one frame to the next: the
    tracks, the observations of the two latest frames, which track owns
    each blob of the latest frame, which tracks ride along in a blob
    they share with its owner and the priors of the blobs that will be
    the roots of the next probability tree.
    """

    def __init__(self, occlusion_limit: int = DEFAULT_OCCLUSION_LIMIT) -> None:
        if occlusion_limit < 0:
            msg = f"Occlusion limit must be non-negative, got {occlusion_limit}."
            raise InvalidTrackException(msg)

        self.__occlusion_limit: int = occlusion_limit
        self.__tracks: list[Track] = []
        self.__next_id: int = 1
        self.__frames_seen: int = 0
        self.__last_frame_index: int | None = None

        self.__earlier: list[BlobObservation] = []
        self.__previous: list[BlobObservation] = []
        self.__owners: dict[int, int] = {}
        self.__riders: dict[int, list[int]] = {}
        self.__root_priors: np.ndarray = np.zeros(0, dtype=np.float64)

    def occlusion_limit(self) -> int:
        return self.__occlusion_limit

    def tracks(self) -> tuple[Track, ...]:
        return tuple(self.__tracks)

    def active_tracks(self) -> tuple[Track, ...]:
        return tuple(track for track in self.__tracks if track.is_active())

    def next_id(self) -> int:
        return self.__next_id

    def frames_seen(self) -> int:
        return self.__frames_seen

    def owners(self) -> dict[int, int]:
        """Blob index of the latest frame -> pedestrian id."""
        return dict(self.__owners)

    def riders(self) -> dict[int, list[int]]:
        """Blob index of the latest frame -> pedestrian ids merged into it."""
        return {k: list(riders) for k, riders in self.__riders.items()}

    def root_priors(self) -> np.ndarray:
        return self.__root_priors

    def step(self, blobs_t: list[Blob], frame_t: Frame, config: FeatureConfig, frame_index: int | None = None) -> None:
        if frame_index is None:
            frame_index = self._default_frame_index(blobs_t)

        if self.__last_frame_index is not None and frame_index <= self.__last_frame_index:
            msg = f"Frame {frame_index} does not follow frame {self.__last_frame_index}."
            raise InvalidTrackException(msg)

        current = observe_blobs(frame_t, blobs_t)
        tracks_by_id = {track.pedestrian_id(): track for track in self.__tracks}
        new_owners: dict[int, int] = {}
        new_riders: dict[int, list[int]] = {}

        if self.__frames_seen == 0:
            new_priors = _uniform(len(current))
        else:
            present = [tracks_by_id[pedestrian_id] for pedestrian_id in sorted(self._present_ids())]
            predictions = {track.pedestrian_id(): track.predict(frame_index) for track in present}

            pair_matches, new_priors = self._associate(current, config)
            matched = {self.__owners[j]: k for j, k in pair_matches}
            matched = self._resolve_groups(matched, current, predictions)
            new_owners = {k: pedestrian_id for pedestrian_id, k in matched.items()}
            new_riders = self._attach_riders(current, new_owners, predictions)

            for k, pedestrian_id in new_owners.items():
                track = tracks_by_id[pedestrian_id]
                if k in new_riders:
                    track.extend(TrackSample(frame_index, *predictions[pedestrian_id], shared=True))
                else:
                    track.extend(TrackSample(frame_index, *current[k].centroid))
            for riders in new_riders.values():
                for pedestrian_id in riders:
                    tracks_by_id[pedestrian_id].ride(TrackSample(frame_index, *predictions[pedestrian_id]))

        self._reclaim_lost(current, new_owners, frame_index, config.distance_cap)
        self._age_unmatched(new_owners, new_riders)
        self._spawn(current, new_owners, frame_index)

        # priors belong to the roots of the next tree
        prior_owners = new_owners if self.__frames_seen == 0 else self.__owners
        tracks_by_id = {track.pedestrian_id(): track for track in self.__tracks}
        for j, pedestrian_id in prior_owners.items():
            tracks_by_id[pedestrian_id].set_prior(float(new_priors[j]))

        self.__earlier, self.__previous = self.__previous, current
        self.__root_priors = new_priors
        self.__owners = new_owners
        self.__riders = new_riders
        self.__frames_seen += 1
        self.__last_frame_index = frame_index

        LOGGER.debug("Frame %s: %s blobs, %s active tracks", frame_index, len(current), len(self.active_tracks()))

    def _default_frame_index(self, blobs_t: list[Blob]) -> int:
        if blobs_t:
            return blobs_t[0].frame_index()
        if self.__last_frame_index is not None:
            return self.__last_frame_index + 1
        return 0

    def _present_ids(self) -> set[int]:
        """Tracks that own or ride a blob of the previous frame."""
        present = set(self.__owners.values())
        for riders in self.__riders.values():
            present.update(riders)
        return present

    def _resolve_groups(
        self, matched: dict[int, int], current: list[BlobObservation], predictions: dict[int, Point]
    ) -> dict[int, int]:
        """
        Reassign the tracks that shared a blob in the previous frame. The
        blobs the tree gave the group and every blob nobody else took go
        to the group members nearest first, by predicted position.
        """
        matched = dict(matched)

        for j in sorted(self.__riders):
            members = [self.__owners[j], *self.__riders[j]]
            given = {member: matched.pop(member) for member in members if member in matched}
            taken = set(matched.values())

            candidates = sorted(
                (_distance(predictions[member], observation.centroid), member, observation.index)
                for member in members
                for observation in current
                if observation.index not in taken
                and _distance(predictions[member], observation.centroid) <= _reach(observation)
            )
            for _, member, k in candidates:
                if member in matched or k in taken:
                    continue
                matched[member] = k
                taken.add(k)

            # whatever the tree gave and nobody claimed stays with its pick
            for member, k in given.items():
                if member not in matched and k not in taken:
                    matched[member] = k
                    taken.add(k)

            if sum(member in matched for member in members) > 1:
                LOGGER.debug("Tracks %s split from a shared blob", members)

        return matched

    def _attach_riders(
        self, current: list[BlobObservation], new_owners: dict[int, int], predictions: dict[int, Point]
    ) -> dict[int, list[int]]:
        """
        Tracks present in the previous frame but unmatched now whose
        predicted position lies inside a matched blob ride along with
        that blob's owner.
        """
        matched = set(new_owners.values())
        riders: dict[int, list[int]] = {}

        for pedestrian_id, predicted in sorted(predictions.items()):
            if pedestrian_id in matched:
                continue

            inside = sorted(
                (_distance(predicted, current[k].centroid), k)
                for k in new_owners
                if _distance(predicted, current[k].centroid) <= _reach(current[k])
            )
            if inside:
                _, k = inside[0]
                riders.setdefault(k, []).append(pedestrian_id)
                LOGGER.debug("Track %s merged into the blob of track %s", pedestrian_id, new_owners[k])

        return riders

    def _associate(
        self, current: list[BlobObservation], config: FeatureConfig
    ) -> tuple[list[tuple[int, int]], np.ndarray]:
        """
        Matches (j, k) between the previous and the current frame, and
        the priors of the previous frame's blobs for the next step.
        """
        previous = self.__previous
        fm_jk = FeatureMatrix.from_observations(previous, current, config)
        pm_jk = build_possibility_matrix(fm_jk, config)
        pair_scores = fm_jk.scores(config.weights()).T
        pair_permitted = pm_jk.cells().T

        if self.__frames_seen == 1:
            # two frames only: pair level assignment with uniform priors
            conditionals = pair_conditionals(pair_scores, pair_permitted)
            matches = assign_pairs(pair_posteriors(conditionals, _uniform(len(previous))))
            return matches, self.__root_priors

        earlier = self.__earlier
        fm_ij = FeatureMatrix.from_observations(earlier, previous, config)
        pm_ij = build_possibility_matrix(fm_ij, config)

        tree = build_probability_tree(earlier, previous, current, fm_ij, fm_jk, pm_ij, pm_jk, config)
        tree = posteriors(tree, self.__root_priors)
        matches = [(j, k) for _, j, k in assign(tree)]
        new_priors = update_priors(tree)

        # blobs the tree could not place, e.g. born in the previous frame
        matched_j = {j for j, _ in matches}
        matched_k = {k for _, k in matches}
        open_cells = pair_permitted.copy()
        open_cells[sorted(matched_j), :] = False
        open_cells[:, sorted(matched_k)] = False

        if open_cells.any():
            conditionals = pair_conditionals(pair_scores, open_cells)
            matches.extend(assign_pairs(pair_posteriors(conditionals, new_priors)))

        return matches, new_priors

    def _reclaim_lost(
        self, current: list[BlobObservation], new_owners: dict[int, int], frame_index: int, distance_cap: float
    ) -> None:
        candidates: list[tuple[float, int, int]] = []
        lost = [track for track in self.__tracks if track.is_lost() and track.lost_age() <= self.__occlusion_limit]

        for track in lost:
            predicted = track.predict(frame_index)
            for observation in current:
                if observation.index in new_owners:
                    continue
                distance = _distance(predicted, observation.centroid)
                if distance <= distance_cap:
                    candidates.append((distance, track.pedestrian_id(), observation.index))

        tracks_by_id = {track.pedestrian_id(): track for track in lost}
        reclaimed: set[int] = set()
        for _, pedestrian_id, k in sorted(candidates):
            if pedestrian_id in reclaimed or k in new_owners:
                continue

            tracks_by_id[pedestrian_id].extend(TrackSample(frame_index, *current[k].centroid))
            new_owners[k] = pedestrian_id
            reclaimed.add(pedestrian_id)
            LOGGER.debug("Track %s reclaimed at frame %s", pedestrian_id, frame_index)

    def _age_unmatched(self, new_owners: dict[int, int], new_riders: dict[int, list[int]]) -> None:
        matched = set(new_owners.values())
        for riders in new_riders.values():
            matched.update(riders)

        for track in self.__tracks:
            if track.pedestrian_id() in matched or track.status() == TrackStatus.TERMINATED:
                continue

            track.miss(self.__occlusion_limit)
            if track.status() == TrackStatus.TERMINATED:
                LOGGER.debug("Track %s terminated", track.pedestrian_id())

    def _spawn(self, current: list[BlobObservation], new_owners: dict[int, int], frame_index: int) -> None:
        for observation in current:
            if observation.index in new_owners:
                continue

            track = Track(self.__next_id, TrackSample(frame_index, *observation.centroid))
            self.__tracks.append(track)
            new_owners[observation.index] = track.pedestrian_id()
            self.__next_id += 1
            LOGGER.debug("Track %s spawned at frame %s", track.pedestrian_id(), frame_index)


def step(
    state: TrackerState, blobs_t: list[Blob], frame_t: Frame, config: FeatureConfig, frame_index: int | None = None
) -> TrackerState:
    state.step(blobs_t, frame_t, config, frame_index)
    return state


def export_ntyx(state: TrackerState) -> list[NtyxRecord]:
    records = [
        NtyxRecord(track.pedestrian_id(), sample.frame_index, sample.y, sample.x)
        for track in state.tracks()
        for sample in track.samples()
    ]
    return sorted(records, key=lambda record: (record.n, record.t))
