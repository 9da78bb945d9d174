from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

from crowdtrack.core.exceptions import InvalidFeatureConfigException
from crowdtrack.core.histogram import color_histogram

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy as np

    from crowdtrack.core.blob import Blob
    from crowdtrack.core.frame import Frame
    from crowdtrack.core.motion_segment import Point

DEFAULT_ENTROPY_CAP = 2.0
DEFAULT_DISTANCE_CAP = 50.0
ANGLE_CAP_FACTOR = 1.0
SPEED_CAP_FACTOR = 0.5
DEFAULT_POSSIBILITY_THRESHOLD = 1.25
DEFAULT_MOTION_CAP = 10.0


class FeatureVector(NamedTuple):
    """
    Derived features of a blob pair (or triple). Angle, speed and the
    motion residual only exist for triples and are None for pairs.
    """

    entropy_diff: float
    distance: float
    angle: float | None = None
    speed: float | None = None
    motion: float | None = None

    def normalized(self, caps: FeatureCaps) -> FeatureVector:
        return FeatureVector(
            normalize_feature(self.entropy_diff, caps.entropy_diff),
            normalize_feature(self.distance, caps.distance),
            None if self.angle is None else normalize_feature(self.angle, caps.angle),
            None if self.speed is None else normalize_feature(self.speed, caps.speed),
            None if self.motion is None else normalize_feature(self.motion, caps.motion),
        )


class FeatureCaps(NamedTuple):
    entropy_diff: float
    distance: float
    angle: float
    speed: float
    motion: float = DEFAULT_MOTION_CAP


class FeatureWeights(NamedTuple):
    entropy_diff: float = 1.0
    distance: float = 1.0
    angle: float = 1.0
    speed: float = 1.0
    motion: float = 1.0

    def pair_total(self) -> float:
        return self.entropy_diff + self.distance


class BlobObservation(NamedTuple):
    """What the tracker keeps of a blob once its features are extracted."""

    index: int
    frame_index: int
    centroid: Point
    entropy: float
    area: int


@dataclass(frozen=True)
class FeatureConfig:
    w1: float = 1.0
    w2: float = 1.0
    entropy_cap: float = DEFAULT_ENTROPY_CAP
    distance_cap: float = DEFAULT_DISTANCE_CAP
    angle_cap: float | None = None
    speed_cap: float | None = None
    motion_cap: float = DEFAULT_MOTION_CAP
    entropy_weight: float = 1.0
    distance_weight: float = 1.0
    angle_weight: float = 1.0
    speed_weight: float = 1.0
    motion_weight: float = 1.0
    possibility_threshold: float = DEFAULT_POSSIBILITY_THRESHOLD

    def __post_init__(self) -> None:
        if self.w1 < 0 or self.w2 < 0:
            msg = f"Angle and speed weights must be non-negative, got w1={self.w1}, w2={self.w2}."
            raise InvalidFeatureConfigException(msg)

        for name, cap in self.caps()._asdict().items():
            if not cap > 0:
                msg = f"Normalization cap for {name} must be positive, got {cap}."
                raise InvalidFeatureConfigException(msg)

        weights = self.weights()
        if any(weight < 0 for weight in weights):
            msg = f"Feature weights must be non-negative, got {tuple(weights)}."
            raise InvalidFeatureConfigException(msg)

        if sum(weights) <= 0:
            msg = "At least one feature weight must be positive."
            raise InvalidFeatureConfigException(msg)

    def caps(self) -> FeatureCaps:
        return FeatureCaps(
            self.entropy_cap,
            self.distance_cap,
            self.w1 * ANGLE_CAP_FACTOR if self.angle_cap is None else self.angle_cap,
            self.w2 * SPEED_CAP_FACTOR if self.speed_cap is None else self.speed_cap,
            self.motion_cap,
        )

    def weights(self) -> FeatureWeights:
        return FeatureWeights(
            self.entropy_weight, self.distance_weight, self.angle_weight, self.speed_weight, self.motion_weight
        )


def normalize_feature(f: float, cap: float) -> float:
    """
    Map a dissimilarity onto a similarity in [0, 1]: flat near zero,
    falling steeply towards ``cap`` and zero from there on.
    """
    if f >= cap:
        return 0.0

    ratio = f / cap
    return math.sqrt(1.0 - ratio * ratio)


def combined_score(
    normalized: Sequence[float | np.ndarray | None], weights: Sequence[float]
) -> float | np.ndarray:
    """
    Weighted sum of the features present; absent ones add nothing.
    Feature arrays combine cell by cell.
    """
    return sum(weight * value for value, weight in zip(normalized, weights, strict=True) if value is not None)


def observe_blobs(frame: Frame, blobs: list[Blob]) -> list[BlobObservation]:
    return [
        BlobObservation(index, blob.frame_index(), blob.centroid(), color_histogram(frame, blob).entropy(), blob.area())
        for index, blob in enumerate(blobs)
    ]
