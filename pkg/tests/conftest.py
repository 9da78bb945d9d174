"""
Fixtures and small helpers shared by the test modules.

Frames are built directly from numpy arrays; synthetic scenes come
from crowdtrack.synth so the expected positions are known exactly.
"""

from __future__ import annotations

import numpy as np
import pytest

from crowdtrack.core.features import BlobObservation, FeatureConfig
from crowdtrack.core.frame import Frame
from crowdtrack.synth.presets import single_actor_scene
from crowdtrack.synth.scene import Actor, SceneScript, Waypoint

RED = (200, 30, 30)
DARK = (40, 40, 40)


def disc_frame(
    width: int, height: int, discs: list[tuple[float, float, float]], color=RED, background=DARK
) -> Frame:
    """Frame with filled discs given as (x, y, radius)."""
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[:] = background
    ys, xs = np.ogrid[:height, :width]
    for x, y, radius in discs:
        pixels[(xs - x) ** 2 + (ys - y) ** 2 <= radius * radius] = color
    return Frame(pixels)


def observation(index: int, x: float, y: float, entropy: float = 1.0, frame_index: int = 0) -> BlobObservation:
    return BlobObservation(index, frame_index, (x, y), entropy, 80)


def write_config(directory, text: str, name: str = "run.cfg"):
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def feature_config():
    return FeatureConfig()


@pytest.fixture
def two_disc_frame():
    return disc_frame(80, 60, [(20, 20, 5), (60, 40, 5)])


@pytest.fixture
def black_frame():
    return Frame.filled(40, 30, (0, 0, 0))


@pytest.fixture
def single_actor_script():
    return single_actor_scene()


@pytest.fixture
def crossing_script():
    # actor 2 passes exactly over actor 1 at frame 5
    return SceneScript(
        100,
        60,
        11,
        [
            Actor(1, (Waypoint(0, 50.0, 30.0), Waypoint(10, 50.0, 30.0)), 5, RED),
            Actor(2, (Waypoint(0, 10.0, 30.0), Waypoint(10, 90.0, 30.0)), 5, RED),
        ],
        DARK,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
