from __future__ import annotations

from logging import getLogger
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from crowdtrack.core.exceptions import InvalidBlobException
from crowdtrack.core.frame import BinaryMask
from crowdtrack.tools.resources import package_name

LOGGER = getLogger(package_name())

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


class BoundingBox(NamedTuple):
    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


class Blob:
    """
    A connected foreground region detected in one frame. The
    centroid is the arithmetic mean of the member pixel coordinates.
    """

    def __init__(self, frame_index: int, xs: np.ndarray, ys: np.ndarray) -> None:
        xs = np.asarray(xs, dtype=np.int64).ravel()
        ys = np.asarray(ys, dtype=np.int64).ravel()
        if xs.shape != ys.shape:
            msg = "Blob needs as many x coordinates as y coordinates."
            raise InvalidBlobException(msg)

        self.__frame_index: int = frame_index
        self.__xs: np.ndarray = xs
        self.__ys: np.ndarray = ys

    @classmethod
    def from_pixels(cls, frame_index: int, pixels: list[tuple[int, int]]) -> Blob:
        """Build a blob from (x, y) tuples."""
        if not pixels:
            return cls(frame_index, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))

        xs, ys = zip(*pixels, strict=True)
        return cls(frame_index, np.array(xs), np.array(ys))

    def frame_index(self) -> int:
        return self.__frame_index

    def xs(self) -> np.ndarray:
        return self.__xs

    def ys(self) -> np.ndarray:
        return self.__ys

    def area(self) -> int:
        return int(self.__xs.size)

    def pixel_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(zip(self.__xs.tolist(), self.__ys.tolist(), strict=True))

    def centroid(self) -> tuple[float, float]:
        if self.area() == 0:
            msg = "Empty blob has no centroid."
            raise InvalidBlobException(msg)

        return float(self.__xs.mean()), float(self.__ys.mean())

    def bounding_box(self) -> BoundingBox:
        if self.area() == 0:
            msg = "Empty blob has no bounding box."
            raise InvalidBlobException(msg)

        return BoundingBox(
            int(self.__xs.min()),
            int(self.__ys.min()),
            int(self.__xs.max()),
            int(self.__ys.max()),
        )

    def __repr__(self) -> str:
        return f"Blob(t={self.__frame_index}, area={self.area()})"


def connected_components(mask: BinaryMask, frame_index: int, min_area: int = 0) -> list[Blob]:
    """
    8-connected components of the mask, dropping those smaller than
    ``min_area``. Blobs are ordered by the top-left corner of their
    bounding box, row first.
    """
    labels, n_labels = ndimage.label(mask.bits(), structure=EIGHT_CONNECTED)

    candidates: list[tuple[int, int, int, Blob]] = []
    discarded = 0

    for label, bounds in enumerate(ndimage.find_objects(labels), 1):
        if bounds is None:
            continue

        rows, cols = np.nonzero(labels[bounds] == label)
        if rows.size < min_area:
            discarded += 1
            continue

        ys = rows + bounds[0].start
        xs = cols + bounds[1].start
        blob = Blob(frame_index, xs, ys)
        candidates.append((bounds[0].start, bounds[1].start, label, blob))

    if discarded:
        LOGGER.debug("Frame %d: discarded %d of %d components below %d px", frame_index, discarded, n_labels, min_area)

    candidates.sort(key=lambda item: item[:3])
    return [blob for *_, blob in candidates]
