from __future__ import annotations

from enum import Enum
from itertools import pairwise
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from crowdtrack.core.exceptions import InvalidTrackException
from crowdtrack.core.motion_segment import MotionSegment

if TYPE_CHECKING:
    from crowdtrack.core.motion_segment import Point

MOTION_WINDOW = 8


class TrackSample(NamedTuple):
    """
    One position of a pedestrian: frame index and image-plane
    centroid in pixels. Shared samples were predicted while the
    pedestrian's blob was merged with another one.
    """

    frame_index: int
    x: float
    y: float
    shared: bool = False

    def point(self) -> tuple[float, float]:
        return self.x, self.y


class TrackStatus(Enum):
    ACTIVE = "active"
    MERGED = "merged"
    LOST = "lost"
    TERMINATED = "terminated"


class Track:
    """
    Identity of one pedestrian across frames. A track is active while
    it keeps getting matched and merged while it rides along inside
    another track's blob. It is lost while its blob is missing and
    terminated once it has been lost for longer than the tracker
    tolerates.
    """

    def __init__(self, pedestrian_id: int, first_sample: TrackSample, prior: float = 0.0) -> None:
        if pedestrian_id < 1:
            msg = f"Pedestrian id must be at least 1, got {pedestrian_id}."
            raise InvalidTrackException(msg)

        self.__pedestrian_id: int = pedestrian_id
        self.__samples: list[TrackSample] = [first_sample]
        self.__status: TrackStatus = TrackStatus.ACTIVE
        self.__lost_age: int = 0
        self.__prior: float = prior

    def pedestrian_id(self) -> int:
        return self.__pedestrian_id

    def samples(self) -> tuple[TrackSample, ...]:
        return tuple(self.__samples)

    def last_sample(self) -> TrackSample:
        return self.__samples[-1]

    def status(self) -> TrackStatus:
        return self.__status

    def is_active(self) -> bool:
        return self.__status == TrackStatus.ACTIVE

    def is_merged(self) -> bool:
        return self.__status == TrackStatus.MERGED

    def is_lost(self) -> bool:
        return self.__status == TrackStatus.LOST

    def lost_age(self) -> int:
        return self.__lost_age

    def prior(self) -> float:
        return self.__prior

    def set_prior(self, prior: float) -> None:
        self.__prior = prior

    def extend(self, sample: TrackSample) -> None:
        """Append a sample and make the track active again."""
        self._append(sample, TrackStatus.ACTIVE)

    def ride(self, sample: TrackSample) -> None:
        """Append a predicted sample while the track shares another track's blob."""
        self._append(sample._replace(shared=True), TrackStatus.MERGED)

    def _append(self, sample: TrackSample, status: TrackStatus) -> None:
        if self.__status == TrackStatus.TERMINATED:
            msg = f"Track {self.__pedestrian_id} is terminated and cannot be extended."
            raise InvalidTrackException(msg)

        if sample.frame_index <= self.last_sample().frame_index:
            msg = (
                f"Track {self.__pedestrian_id} sample at frame {sample.frame_index} "
                f"does not follow frame {self.last_sample().frame_index}."
            )
            raise InvalidTrackException(msg)

        self.__samples.append(sample)
        self.__status = status
        self.__lost_age = 0

    def miss(self, occlusion_limit: int) -> None:
        """
        Record a frame without a matching blob. The track becomes
        terminated once it has been lost for more than ``occlusion_limit``
        frames.
        """
        if self.__status == TrackStatus.TERMINATED:
            return

        self.__status = TrackStatus.LOST
        self.__lost_age += 1

        if self.__lost_age > occlusion_limit:
            self.__status = TrackStatus.TERMINATED

    def predict(self, frame_index: int) -> Point:
        """
        Expected position at ``frame_index``: a least squares line through
        the last observed samples, extrapolated in time. Shared samples
        are themselves predictions and take no part in the fit.
        """
        observed = [sample for sample in self.__samples if not sample.shared][-MOTION_WINDOW:]
        if not observed:
            observed = [self.last_sample()]
        if len(observed) == 1:
            return observed[0].point()

        times = np.array([sample.frame_index for sample in observed], dtype=np.float64)
        xs = np.array([sample.x for sample in observed], dtype=np.float64)
        ys = np.array([sample.y for sample in observed], dtype=np.float64)

        x = np.polyval(np.polyfit(times, xs, 1), frame_index)
        y = np.polyval(np.polyfit(times, ys, 1), frame_index)
        return float(x), float(y)

    def as_segments(self) -> tuple[MotionSegment, ...]:
        return tuple(
            MotionSegment(previous.point(), current.point(), previous.frame_index, current.frame_index)
            for previous, current in pairwise(self.__samples)
        )

    def _movement_core(self) -> tuple[float, int, float]:
        total_distance = 0.0
        max_speed = 0.0

        for segment in self.as_segments():
            total_distance += segment.length()
            max_speed = max(max_speed, segment.speed())

        return total_distance, self.duration(), max_speed

    def length(self) -> float:
        """Travelled distance in pixels."""
        length, _, _ = self._movement_core()
        return round(length, 2)

    def duration(self) -> int:
        """Frames between the first and the last sample."""
        return self.__samples[-1].frame_index - self.__samples[0].frame_index

    def average_speed(self) -> float:
        total_distance, frames, _ = self._movement_core()

        if frames > 0:
            return round(total_distance / frames, 2)

        return 0.0

    def maximum_speed(self) -> float:
        _, _, max_speed = self._movement_core()
        return round(max_speed, 2)

    def __repr__(self) -> str:
        return f"Track({self.__pedestrian_id}, {self.__status.value}, {len(self.__samples)} samples)"
