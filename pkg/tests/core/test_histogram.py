import math

import numpy as np
import pytest

from crowdtrack.core.blob import Blob
from crowdtrack.core.exceptions import InvalidBlobException
from crowdtrack.core.frame import Frame
from crowdtrack.core.histogram import ColorHistogram, color_histogram, entropy, entropy_difference


def whole_frame_blob(frame: Frame) -> Blob:
    ys, xs = np.mgrid[: frame.height(), : frame.width()]
    return Blob(0, xs, ys)


def test_uniform_color_has_zero_entropy():
    frame = Frame.filled(4, 4, (200, 30, 30))

    hist = color_histogram(frame, whole_frame_blob(frame))

    assert hist.area_nonzero() == (16, 16, 16)
    assert entropy(hist) == 0.0


def test_two_equal_colors():
    pixels = np.zeros((2, 2, 3), dtype=np.uint8)
    pixels[0] = (10, 10, 10)
    pixels[1] = (20, 20, 20)
    frame = Frame(pixels)

    hist = color_histogram(frame, whole_frame_blob(frame))

    assert hist.channel_entropy(0) == pytest.approx(math.log(2))
    assert entropy(hist) == pytest.approx(3 * math.log(2))


def test_zero_values_are_skipped():
    pixels = np.zeros((1, 4, 3), dtype=np.uint8)
    pixels[0, :2] = (50, 0, 0)
    pixels[0, 2:] = (60, 0, 0)
    frame = Frame(pixels)

    hist = color_histogram(frame, whole_frame_blob(frame))

    assert hist.area_nonzero() == (4, 0, 0)
    assert hist.channel_entropy(1) == 0.0
    assert entropy(hist) == pytest.approx(math.log(2))


def test_entropy_bounds(rng):
    for _ in range(20):
        frame = Frame(rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8))

        value = entropy(color_histogram(frame, whole_frame_blob(frame)))

        assert 0.0 <= value <= 3 * math.log(256) + 1e-9


def test_only_blob_pixels_are_counted(two_disc_frame):
    blob = Blob.from_pixels(0, [(20, 20), (0, 0)])

    hist = color_histogram(two_disc_frame, blob)

    assert hist.bins()[0, 200] == 1
    assert hist.bins()[0, 40] == 1
    assert hist.bins().sum() == 6


def test_empty_blob_histogram(black_frame):
    hist = color_histogram(black_frame, Blob.from_pixels(0, []))

    assert hist.area_nonzero() == (0, 0, 0)
    assert entropy(ColorHistogram.empty()) == 0.0


def test_blob_outside_frame(black_frame):
    with pytest.raises(InvalidBlobException, match="outside"):
        color_histogram(black_frame, Blob.from_pixels(0, [(40, 0)]))


def test_entropy_difference_is_symmetric():
    assert entropy_difference(1.5, 2.25) == 0.75
    assert entropy_difference(2.25, 1.5) == 0.75
    assert entropy_difference(1.0, 1.0) == 0.0
