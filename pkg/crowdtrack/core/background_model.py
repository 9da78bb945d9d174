from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from crowdtrack.core.exceptions import DimensionMismatchException, InvalidBackgroundModelException
from crowdtrack.core.frame import N_CHANNELS, BinaryMask

if TYPE_CHECKING:
    from crowdtrack.core.frame import Frame

DEFAULT_ALPHA = 0.95
DEFAULT_ETA = 2.0


class BackgroundModel:
    """
    Per-pixel, per-channel Gaussian background. The mean is a true
    running average over all frames seen so far while the variance
    is exponentially smoothed with ``alpha``.

    Instances are immutable; ``update`` returns a new model.
    """

    def __init__(
        self,
        width: int,
        height: int,
        alpha: float = DEFAULT_ALPHA,
        eta: float = DEFAULT_ETA,
        initial_variance: float = 0.0,
    ) -> None:
        if not 0.0 < alpha < 1.0:
            msg = f"alpha must be in (0, 1), got {alpha}."
            raise InvalidBackgroundModelException(msg)

        if eta < 0.0:
            msg = f"eta must be non-negative, got {eta}."
            raise InvalidBackgroundModelException(msg)

        if initial_variance < 0.0:
            msg = f"Initial variance must be non-negative, got {initial_variance}."
            raise InvalidBackgroundModelException(msg)

        if width < 1 or height < 1:
            msg = f"Background model needs a positive size, got {width}x{height}."
            raise InvalidBackgroundModelException(msg)

        self.__alpha: float = alpha
        self.__eta: float = eta
        self.__frame_count: int = 0
        self.__mean: np.ndarray = np.zeros((height, width, N_CHANNELS), dtype=np.float64)
        self.__variance: np.ndarray = np.full((height, width, N_CHANNELS), initial_variance, dtype=np.float64)

    @classmethod
    def _from_state(
        cls, alpha: float, eta: float, frame_count: int, mean: np.ndarray, variance: np.ndarray
    ) -> BackgroundModel:
        model = cls(mean.shape[1], mean.shape[0], alpha, eta)
        model.__frame_count = frame_count
        model.__mean = mean
        model.__variance = variance
        return model

    def alpha(self) -> float:
        return self.__alpha

    def eta(self) -> float:
        return self.__eta

    def frame_count(self) -> int:
        return self.__frame_count

    def width(self) -> int:
        return int(self.__mean.shape[1])

    def height(self) -> int:
        return int(self.__mean.shape[0])

    def mean(self) -> np.ndarray:
        return self.__mean

    def variance(self) -> np.ndarray:
        return self.__variance

    def check_dimensions(self, frame: Frame) -> None:
        if frame.shape() != (self.height(), self.width()):
            msg = (
                f"Frame is {frame.width()}x{frame.height()} but the background model "
                f"is {self.width()}x{self.height()}."
            )
            raise DimensionMismatchException(msg)

    def update(self, frame: Frame) -> BackgroundModel:
        self.check_dimensions(frame)

        t = self.__frame_count + 1
        image = frame.pixels().astype(np.float64)

        mean = ((t - 1) / t) * self.__mean + image / t
        # variance uses the new mean
        variance = self.__alpha * self.__variance + (1.0 - self.__alpha) * np.square(image - mean)

        return BackgroundModel._from_state(self.__alpha, self.__eta, t, mean, variance)

    def background_image(self) -> np.ndarray:
        if self.__frame_count < 1:
            msg = "Background image requested before the model saw any frame."
            raise InvalidBackgroundModelException(msg)

        return self.__mean + self.__eta * np.sqrt(self.__variance)

    def subtract(self, frame: Frame, threshold: float) -> BinaryMask:
        """
        Foreground where the frame exceeds the background image by
        more than ``threshold`` on any channel. Darker pixels never
        count as foreground.
        """
        self.check_dimensions(frame)

        difference = frame.pixels().astype(np.float64) - self.background_image()
        return BinaryMask(np.any(difference > threshold, axis=2))


def update_background(model: BackgroundModel, frame: Frame) -> BackgroundModel:
    return model.update(frame)


def background_image(model: BackgroundModel) -> np.ndarray:
    return model.background_image()


def subtract_background(model: BackgroundModel, frame: Frame, threshold: float) -> BinaryMask:
    return model.subtract(frame, threshold)
