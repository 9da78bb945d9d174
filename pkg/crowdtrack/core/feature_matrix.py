from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from crowdtrack.core.features import FeatureVector, combined_score, observe_blobs

if TYPE_CHECKING:
    from crowdtrack.core.blob import Blob
    from crowdtrack.core.features import BlobObservation, FeatureConfig, FeatureWeights
    from crowdtrack.core.frame import Frame


def _normalize(values: np.ndarray, cap: float) -> np.ndarray:
    ratio = values / cap
    return np.where(values >= cap, 0.0, np.sqrt(np.clip(1.0 - ratio * ratio, 0.0, None)))


def _centroids(observations: list[BlobObservation]) -> np.ndarray:
    if not observations:
        return np.empty((0, 2), dtype=np.float64)
    return np.array([observation.centroid for observation in observations], dtype=np.float64)


class FeatureMatrix:
    """
    Normalized pair features of two consecutive frames. Rows are the
    blobs of the higher frame, columns the blobs of the lower frame.
    """

    def __init__(self, entropy_diff: np.ndarray, distance: np.ndarray) -> None:
        self.__entropy_diff: np.ndarray = entropy_diff
        self.__distance: np.ndarray = distance

    @classmethod
    def from_observations(
        cls,
        low: list[BlobObservation],
        high: list[BlobObservation],
        config: FeatureConfig,
    ) -> FeatureMatrix:
        caps = config.caps()

        entropy_low = np.array([observation.entropy for observation in low], dtype=np.float64)
        entropy_high = np.array([observation.entropy for observation in high], dtype=np.float64)
        entropy_diff = np.abs(entropy_high[:, None] - entropy_low[None, :])

        offsets = _centroids(high)[:, None, :] - _centroids(low)[None, :, :]
        distance = np.hypot(offsets[..., 0], offsets[..., 1])

        return cls(_normalize(entropy_diff, caps.entropy_diff), _normalize(distance, caps.distance))

    def shape(self) -> tuple[int, int]:
        rows, cols = self.__distance.shape
        return int(rows), int(cols)

    def entropy_diff(self) -> np.ndarray:
        return self.__entropy_diff

    def distance(self) -> np.ndarray:
        return self.__distance

    def cell(self, row: int, col: int) -> FeatureVector:
        return FeatureVector(float(self.__entropy_diff[row, col]), float(self.__distance[row, col]))

    def scores(self, weights: FeatureWeights) -> np.ndarray:
        """Combined pair similarity of every cell."""
        pair = (self.__entropy_diff, self.__distance, None, None, None)
        return np.asarray(combined_score(pair, weights), dtype=np.float64)


class PossibilityMatrix:
    """
    Cells whose combined similarity reaches the possibility threshold.
    Same axes as the FeatureMatrix it was built from.
    """

    def __init__(self, cells: np.ndarray) -> None:
        self.__cells: np.ndarray = np.asarray(cells, dtype=bool)

    def shape(self) -> tuple[int, int]:
        rows, cols = self.__cells.shape
        return int(rows), int(cols)

    def cells(self) -> np.ndarray:
        return self.__cells

    def count(self) -> int:
        return int(np.count_nonzero(self.__cells))


def build_feature_matrix(
    blobs_low: list[Blob],
    blobs_high: list[Blob],
    frame_low: Frame,
    frame_high: Frame,
    config: FeatureConfig,
) -> FeatureMatrix:
    low = observe_blobs(frame_low, blobs_low)
    high = observe_blobs(frame_high, blobs_high)
    return FeatureMatrix.from_observations(low, high, config)


def build_possibility_matrix(fm: FeatureMatrix, config: FeatureConfig) -> PossibilityMatrix:
    return PossibilityMatrix(fm.scores(config.weights()) >= config.possibility_threshold)
