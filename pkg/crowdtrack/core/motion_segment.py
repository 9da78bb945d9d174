from __future__ import annotations

import math
from typing import TYPE_CHECKING

from crowdtrack.core.exceptions import InvalidSegmentException

if TYPE_CHECKING:
    from crowdtrack.core.blob import Blob

Point = tuple[float, float]


class MotionSegment:
    """
    Displacement of a centroid between two frames.
    """

    def __init__(self, point_a: Point, point_b: Point, frame_a: int = 0, frame_b: int = 1) -> None:
        self.point_a = point_a
        self.point_b = point_b
        self.frame_a = frame_a
        self.frame_b = frame_b

    def dx(self) -> float:
        return self.point_b[0] - self.point_a[0]

    def dy(self) -> float:
        return self.point_b[1] - self.point_a[1]

    def length(self) -> float:
        return math.hypot(self.dx(), self.dy())

    def speed(self) -> float:
        """Pixels per frame."""
        frames = self.frame_b - self.frame_a

        if frames > 0:
            return self.length() / frames

        if frames < 0:
            msg = "Point A must be earlier than point B, timewise!"
            raise InvalidSegmentException(msg)

        return 0.0

    def cosine_to(self, other: MotionSegment) -> float | None:
        """Cosine of the turn from this segment into ``other``, None if either has zero length."""
        norm = self.length() * other.length()
        if norm == 0.0:
            return None

        dot = self.dx() * other.dx() + self.dy() * other.dy()
        return max(-1.0, min(1.0, dot / norm))


def centroid_distance(a: Blob, b: Blob) -> float:
    return MotionSegment(a.centroid(), b.centroid()).length()


def movement_angle(x_i: Point, x_j: Point, x_k: Point, w1: float = 1.0) -> float:
    """
    Turning penalty of the path x_i -> x_j -> x_k, in [0, 2 * w1].
    A stationary leg counts as no turn.
    """
    cosine = MotionSegment(x_i, x_j).cosine_to(MotionSegment(x_j, x_k))
    if cosine is None:
        return 0.0

    return w1 * (1.0 - cosine)


def speed_feature(x_i: Point, x_j: Point, x_k: Point, w2: float = 1.0) -> float:
    """
    Speed-change penalty in [0, w2]: one minus the ratio of the
    geometric and arithmetic means of the two leg lengths.
    """
    d1 = MotionSegment(x_i, x_j).length()
    d2 = MotionSegment(x_j, x_k).length()
    if d1 + d2 == 0.0:
        return 0.0

    return w2 * max(0.0, 1.0 - 2.0 * math.sqrt(d1 * d2) / (d1 + d2))


def motion_residual(x_i: Point, x_j: Point, x_k: Point) -> float:
    """Distance of x_k from the constant velocity continuation of x_i -> x_j."""
    expected = (2.0 * x_j[0] - x_i[0], 2.0 * x_j[1] - x_i[1])
    return MotionSegment(expected, x_k).length()
