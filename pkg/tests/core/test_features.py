import math
from itertools import pairwise

import numpy as np
import pytest

from crowdtrack.core.blob import Blob
from crowdtrack.core.exceptions import InvalidFeatureConfigException
from crowdtrack.core.features import (
    FeatureCaps,
    FeatureConfig,
    FeatureVector,
    FeatureWeights,
    combined_score,
    normalize_feature,
    observe_blobs,
)
from crowdtrack.core.frame import Frame
from crowdtrack.core.histogram import ColorHistogram, entropy
from tests.conftest import disc_frame


def histogram_with(channel_counts: dict[int, list[int]]) -> ColorHistogram:
    bins = np.zeros((3, 256), dtype=np.int64)
    for channel, counts in channel_counts.items():
        bins[channel, 1 : len(counts) + 1] = counts
    return ColorHistogram(bins)


def test_uniform_four_bin_entropy():
    hist = histogram_with({0: [5, 5, 5, 5], 1: [20], 2: [20]})

    assert abs(entropy(hist) - math.log(4)) <= 1e-12


def test_three_to_one_entropy():
    hist = histogram_with({0: [3, 1]})

    assert entropy(hist) == pytest.approx(-(0.75 * math.log(0.75) + 0.25 * math.log(0.25)))
    assert entropy(hist) == pytest.approx(0.5623, abs=1e-4)


def test_entropy_of_uniform_color_blob():
    frame = Frame.filled(10, 1, (200, 0, 0))
    blob = Blob.from_pixels(0, [(x, 0) for x in range(10)])

    (observed,) = observe_blobs(frame, [blob])

    assert observed.entropy == 0.0
    assert observed.area == 10
    assert observed.centroid == (4.5, 0.0)


def test_normalize_feature_endpoints():
    assert normalize_feature(0.0, 50.0) == 1.0
    assert normalize_feature(50.0, 50.0) == 0.0
    assert normalize_feature(80.0, 50.0) == 0.0
    assert normalize_feature(50.0 / math.sqrt(2), 50.0) == pytest.approx(math.sqrt(0.5))


def test_normalize_feature_is_non_increasing():
    values = [normalize_feature(f, 2.0) for f in np.linspace(0.0, 3.0, 301)]

    assert all(b <= a for a, b in pairwise(values))
    assert all(0.0 <= value <= 1.0 for value in values)


def test_combined_score():
    assert combined_score((1.0, 1.0, 1.0, 1.0), (1.0, 1.0, 1.0, 1.0)) == 4.0
    assert combined_score((0.0, 0.0, 0.0, 0.0), (1.0, 1.0, 1.0, 1.0)) == 0.0
    assert combined_score((1.0, 0.5), (2.0, 4.0)) == 4.0


def test_combined_score_skips_absent_features():
    pair = FeatureVector(1.0, 0.5)

    assert combined_score(pair, FeatureWeights()) == 1.5


def test_feature_vector_normalized():
    caps = FeatureCaps(2.0, 50.0, 1.0, 0.5)

    pair = FeatureVector(0.0, 60.0).normalized(caps)
    triple = FeatureVector(0.0, 0.0, 0.0, 0.0).normalized(caps)

    assert pair == FeatureVector(1.0, 0.0, None, None)
    assert triple == FeatureVector(1.0, 1.0, 1.0, 1.0)


def test_identical_blobs_have_perfect_entropy_similarity():
    first = disc_frame(60, 40, [(15, 20, 5)])
    second = disc_frame(60, 40, [(25, 20, 5)])
    disc = [(x, y) for x in range(10, 21) for y in range(15, 26) if (x - 15) ** 2 + (y - 20) ** 2 <= 25]
    blob_a = Blob.from_pixels(0, disc)
    blob_b = Blob.from_pixels(1, [(x + 10, y) for x, y in blob_a.pixel_set()])

    (a,) = observe_blobs(first, [blob_a])
    (b,) = observe_blobs(second, [blob_b])

    assert normalize_feature(abs(a.entropy - b.entropy), 2.0) == 1.0


def test_default_caps():
    caps = FeatureConfig(w1=2.0, w2=4.0).caps()

    assert caps == FeatureCaps(2.0, 50.0, 2.0, 2.0, 10.0)
    assert FeatureConfig(angle_cap=0.3, speed_cap=0.7, motion_cap=4.0).caps()[2:] == (0.3, 0.7, 4.0)


def test_invalid_feature_config():
    with pytest.raises(InvalidFeatureConfigException, match="non-negative"):
        FeatureConfig(w1=-1.0)

    with pytest.raises(InvalidFeatureConfigException, match="distance"):
        FeatureConfig(distance_cap=0.0)

    with pytest.raises(InvalidFeatureConfigException, match="positive"):
        FeatureConfig(entropy_weight=0.0, distance_weight=0.0, angle_weight=0.0, speed_weight=0.0, motion_weight=0.0)
