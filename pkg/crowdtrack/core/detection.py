from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from crowdtrack.core.blob import Blob, connected_components
from crowdtrack.core.exceptions import InvalidBackgroundModelException, InvalidDetectionConfigException
from crowdtrack.core.frame import BinaryMask
from crowdtrack.core.morphology import clean

if TYPE_CHECKING:
    from crowdtrack.core.background_model import BackgroundModel
    from crowdtrack.core.frame import Frame

RED = 0
GREEN = 1
MAX_THRESHOLD = 255.0


class DetectionMode(Enum):
    BACKGROUND = "background"
    REDHAT = "redhat"


DEFAULT_THRESHOLDS = {
    DetectionMode.BACKGROUND: 25.0,
    DetectionMode.REDHAT: 50.0,
}
DEFAULT_MORPHOLOGY_RADIUS = 1
DEFAULT_MIN_BLOB_AREA = 20


@dataclass(frozen=True)
class DetectionConfig:
    mode: DetectionMode = DetectionMode.REDHAT
    threshold: float = DEFAULT_THRESHOLDS[DetectionMode.REDHAT]
    morphology_radius: int = DEFAULT_MORPHOLOGY_RADIUS
    min_blob_area: int = DEFAULT_MIN_BLOB_AREA

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= MAX_THRESHOLD:
            msg = f"Detection threshold must be in [0, 255], got {self.threshold}."
            raise InvalidDetectionConfigException(msg)

        if self.morphology_radius < 0:
            msg = f"Morphology radius must be non-negative, got {self.morphology_radius}."
            raise InvalidDetectionConfigException(msg)

        if self.min_blob_area < 0:
            msg = f"Minimum blob area must be non-negative, got {self.min_blob_area}."
            raise InvalidDetectionConfigException(msg)

    @classmethod
    def for_mode(cls, mode: DetectionMode, threshold: float | None = None, **kwargs: int) -> DetectionConfig:
        """Config with the mode's default threshold unless one is given."""
        if threshold is None:
            threshold = DEFAULT_THRESHOLDS[mode]
        return cls(mode=mode, threshold=threshold, **kwargs)


def detect_redhat(frame: Frame, threshold: float) -> BinaryMask:
    """Foreground where red exceeds green by more than ``threshold``."""
    difference = frame.channel(RED).astype(np.int16) - frame.channel(GREEN).astype(np.int16)
    return BinaryMask(difference > threshold)


def foreground_mask(
    frame: Frame, config: DetectionConfig, model: BackgroundModel | None = None
) -> tuple[BinaryMask, BackgroundModel | None]:
    """
    Cleaned foreground mask of one frame and the background model
    after folding the frame in. In background mode the frame is
    compared against the model learned from the earlier frames; a
    model that has not seen any frame is updated first.
    """
    if config.mode == DetectionMode.REDHAT:
        mask = detect_redhat(frame, config.threshold)
    else:
        if model is None:
            msg = "Background detection needs a background model."
            raise InvalidBackgroundModelException(msg)

        if model.frame_count() == 0:
            model = model.update(frame)
            mask = model.subtract(frame, config.threshold)
        else:
            mask = model.subtract(frame, config.threshold)
            model = model.update(frame)

    return clean(mask, config.morphology_radius), model


def detect(
    frame: Frame,
    config: DetectionConfig,
    model: BackgroundModel | None = None,
    *,
    frame_index: int = 0,
) -> tuple[list[Blob], BackgroundModel | None]:
    mask, model = foreground_mask(frame, config, model)
    return connected_components(mask, frame_index, config.min_blob_area), model
