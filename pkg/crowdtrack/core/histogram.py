from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from crowdtrack.core.exceptions import InvalidBlobException
from crowdtrack.core.frame import N_CHANNELS

if TYPE_CHECKING:
    from crowdtrack.core.blob import Blob
    from crowdtrack.core.frame import Frame

N_BINS = 256


class ColorHistogram:
    """
    Per-channel 256-bin histogram of a blob's colors. Zero-valued
    samples are left out of their channel, so ``area_nonzero`` can
    differ between channels.
    """

    def __init__(self, bins: np.ndarray) -> None:
        bins = np.asarray(bins, dtype=np.int64)
        if bins.shape != (N_CHANNELS, N_BINS):
            msg = f"Histogram bins must have shape (3, 256), got {bins.shape}."
            raise InvalidBlobException(msg)

        self.__bins: np.ndarray = bins

    @classmethod
    def empty(cls) -> ColorHistogram:
        return cls(np.zeros((N_CHANNELS, N_BINS), dtype=np.int64))

    def bins(self) -> np.ndarray:
        return self.__bins

    def area_nonzero(self) -> tuple[int, int, int]:
        r, g, b = self.__bins.sum(axis=1)
        return int(r), int(g), int(b)

    def channel_entropy(self, channel: int) -> float:
        counts = self.__bins[channel]
        area = counts.sum()
        if area == 0:
            return 0.0

        p = counts[counts > 0] / area
        return float(max(0.0, -np.sum(p * np.log(p))))

    def entropy(self) -> float:
        return sum(self.channel_entropy(channel) for channel in range(N_CHANNELS))


def color_histogram(frame: Frame, blob: Blob) -> ColorHistogram:
    xs, ys = blob.xs(), blob.ys()
    if xs.size == 0:
        return ColorHistogram.empty()

    if xs.min() < 0 or ys.min() < 0 or xs.max() >= frame.width() or ys.max() >= frame.height():
        msg = f"{blob} lies outside the {frame.width()}x{frame.height()} frame."
        raise InvalidBlobException(msg)

    colors = frame.pixels()[ys, xs]
    bins = np.zeros((N_CHANNELS, N_BINS), dtype=np.int64)
    for channel in range(N_CHANNELS):
        bins[channel] = np.bincount(colors[:, channel], minlength=N_BINS)

    # value 0 is the fill of masked-out pixels
    bins[:, 0] = 0
    return ColorHistogram(bins)


def entropy(hist: ColorHistogram) -> float:
    """Sum of the channels' Shannon entropies, natural log."""
    return hist.entropy()


def entropy_difference(e_low: float, e_high: float) -> float:
    return abs(e_high - e_low)
