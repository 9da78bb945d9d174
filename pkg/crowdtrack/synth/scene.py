from __future__ import annotations

import configparser
from itertools import pairwise
from logging import getLogger
from pathlib import Path
from typing import NamedTuple

import numpy as np

from crowdtrack.core.exceptions import InvalidSceneException
from crowdtrack.core.frame import N_CHANNELS, PPM_MAXVAL, Frame
from crowdtrack.tools.resources import package_name

LOGGER = getLogger(package_name())

Color = tuple[int, int, int]

DEFAULT_VISIBILITY_THRESHOLD = 0.6
ACTOR_SECTION_PREFIX = "actor."


class Waypoint(NamedTuple):
    frame_index: int
    x: float
    y: float


class Actor:
    """
    A pedestrian drawn as a filled disc of its hat color. It exists from
    its first to its last waypoint frame and moves linearly in between.
    """

    def __init__(self, actor_id: int, waypoints: tuple[Waypoint, ...], radius: float, color: Color) -> None:
        if not waypoints:
            msg = f"Actor {actor_id} needs at least one waypoint."
            raise InvalidSceneException(msg)

        if any(later.frame_index <= earlier.frame_index for earlier, later in pairwise(waypoints)):
            msg = f"Waypoint frames of actor {actor_id} must be strictly increasing."
            raise InvalidSceneException(msg)

        if radius <= 0:
            msg = f"Radius of actor {actor_id} must be positive, got {radius}."
            raise InvalidSceneException(msg)

        if any(not 0 <= value <= PPM_MAXVAL for value in color) or len(color) != N_CHANNELS:
            msg = f"Color of actor {actor_id} must be three values in [0, 255], got {color}."
            raise InvalidSceneException(msg)

        self.actor_id = actor_id
        self.waypoints = waypoints
        self.radius = radius
        self.color = color

    def first_frame(self) -> int:
        return self.waypoints[0].frame_index

    def last_frame(self) -> int:
        return self.waypoints[-1].frame_index

    def position(self, t: int) -> tuple[float, float] | None:
        """Interpolated centre at frame ``t``, None outside the scripted span."""
        if not self.first_frame() <= t <= self.last_frame():
            return None

        frames = [waypoint.frame_index for waypoint in self.waypoints]
        x = float(np.interp(t, frames, [waypoint.x for waypoint in self.waypoints]))
        y = float(np.interp(t, frames, [waypoint.y for waypoint in self.waypoints]))
        return x, y

    def __repr__(self) -> str:
        return f"Actor({self.actor_id}, {len(self.waypoints)} waypoints)"


class SceneScript:
    def __init__(
        self,
        width: int,
        height: int,
        num_frames: int,
        actors: list[Actor],
        background: Color = (0, 0, 0),
        noise_amplitude: int = 0,
    ) -> None:
        if width <= 0 or height <= 0 or num_frames <= 0:
            msg = f"Scene size and length must be positive, got {width}x{height} and {num_frames} frames."
            raise InvalidSceneException(msg)

        if not 0 <= noise_amplitude <= PPM_MAXVAL:
            msg = f"Noise amplitude must be in [0, 255], got {noise_amplitude}."
            raise InvalidSceneException(msg)

        ids = [actor.actor_id for actor in actors]
        if len(set(ids)) != len(ids):
            msg = f"Actor ids must be unique, got {ids}."
            raise InvalidSceneException(msg)

        for actor in actors:
            for waypoint in actor.waypoints:
                if not (0 <= waypoint.x < width and 0 <= waypoint.y < height):
                    msg = f"Waypoint {waypoint} of actor {actor.actor_id} lies outside the {width}x{height} scene."
                    raise InvalidSceneException(msg)

        self.width = width
        self.height = height
        self.num_frames = num_frames
        self.actors = sorted(actors, key=lambda actor: actor.actor_id)
        self.background = background
        self.noise_amplitude = noise_amplitude

    def max_radius(self) -> float:
        return max((actor.radius for actor in self.actors), default=0.0)


class TruthEntry(NamedTuple):
    actor_id: int
    frame_index: int
    x: float
    y: float
    visible: bool


class GroundTruth:
    """True actor positions, one entry per scripted actor per frame."""

    def __init__(self, entries: list[TruthEntry] | None = None) -> None:
        self.__entries: list[TruthEntry] = sorted(entries or [], key=lambda entry: (entry.frame_index, entry.actor_id))

    def entries(self) -> tuple[TruthEntry, ...]:
        return tuple(self.__entries)

    def visible_entries(self) -> tuple[TruthEntry, ...]:
        return tuple(entry for entry in self.__entries if entry.visible)

    def for_frame(self, t: int) -> tuple[TruthEntry, ...]:
        return tuple(entry for entry in self.__entries if entry.frame_index == t)

    def frames(self) -> list[int]:
        return sorted({entry.frame_index for entry in self.__entries})

    def extend(self, entries: tuple[TruthEntry, ...] | list[TruthEntry]) -> None:
        self.__entries = sorted([*self.__entries, *entries], key=lambda entry: (entry.frame_index, entry.actor_id))

    def __len__(self) -> int:
        return len(self.__entries)


def _disc(width: int, height: int, cx: float, cy: float, radius: float) -> np.ndarray:
    ys, xs = np.ogrid[:height, :width]
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= radius * radius


def _noisy(pixels: np.ndarray, amplitude: int, rng: np.random.Generator) -> np.ndarray:
    if amplitude == 0:
        return pixels.astype(np.uint8)

    noise = rng.integers(-amplitude, amplitude + 1, size=pixels.shape)
    return np.clip(pixels.astype(np.int16) + noise, 0, PPM_MAXVAL).astype(np.uint8)


def _check_frame_index(script: SceneScript, t: int) -> None:
    if not 0 <= t < script.num_frames:
        msg = f"Frame {t} is outside the scene's {script.num_frames} frames."
        raise InvalidSceneException(msg)


def _discs(script: SceneScript, t: int) -> list[tuple[Actor, tuple[float, float], np.ndarray]]:
    discs = []
    for actor in script.actors:
        position = actor.position(t)
        if position is None:
            continue
        discs.append((actor, position, _disc(script.width, script.height, *position, actor.radius)))
    return discs


def truth_slice(
    script: SceneScript, t: int, visibility_threshold: float = DEFAULT_VISIBILITY_THRESHOLD
) -> tuple[TruthEntry, ...]:
    """
    Truth of frame ``t``. An actor is invisible when at least
    ``visibility_threshold`` of its disc is covered by actors with a
    higher id.
    """
    _check_frame_index(script, t)
    discs = _discs(script, t)

    entries = []
    covered = np.zeros((script.height, script.width), dtype=bool)
    for actor, (x, y), disc in reversed(discs):
        area = np.count_nonzero(disc)
        hidden = np.count_nonzero(disc & covered)
        visible = area > 0 and hidden < visibility_threshold * area
        entries.append(TruthEntry(actor.actor_id, t, x, y, bool(visible)))
        covered |= disc

    return tuple(reversed(entries))


def render(
    script: SceneScript, t: int, seed: int = 0, visibility_threshold: float = DEFAULT_VISIBILITY_THRESHOLD
) -> tuple[Frame, tuple[TruthEntry, ...]]:
    _check_frame_index(script, t)

    pixels = np.empty((script.height, script.width, N_CHANNELS), dtype=np.int16)
    pixels[:] = script.background
    for actor, _, disc in _discs(script, t):
        pixels[disc] = actor.color

    rng = np.random.default_rng([seed, t])
    frame = Frame(_noisy(pixels, script.noise_amplitude, rng))
    return frame, truth_slice(script, t, visibility_threshold)


def render_background(script: SceneScript, index: int, seed: int = 0) -> Frame:
    """Actor-free frame for background learning."""
    pixels = np.empty((script.height, script.width, N_CHANNELS), dtype=np.int16)
    pixels[:] = script.background

    rng = np.random.default_rng([seed, 1, index])
    return Frame(_noisy(pixels, script.noise_amplitude, rng))


def ground_truth(script: SceneScript, visibility_threshold: float = DEFAULT_VISIBILITY_THRESHOLD) -> GroundTruth:
    truth = GroundTruth()
    for t in range(script.num_frames):
        truth.extend(truth_slice(script, t, visibility_threshold))
    return truth


def _parse_triplet(value: str, where: str) -> Color:
    try:
        parts = tuple(int(part) for part in value.split(","))
    except ValueError as e:
        msg = f"Could not parse color {value!r} in {where}."
        raise InvalidSceneException(msg) from e

    if len(parts) != N_CHANNELS:
        msg = f"Color {value!r} in {where} must have three components."
        raise InvalidSceneException(msg)

    r, g, b = parts
    return r, g, b


def _parse_waypoints(value: str, where: str) -> tuple[Waypoint, ...]:
    waypoints = []
    for item in value.split(";"):
        if not item.strip():
            continue
        try:
            frame_part, coordinates = item.split(":")
            x, y = coordinates.split(",")
            waypoints.append(Waypoint(int(frame_part), float(x), float(y)))
        except ValueError as e:
            msg = f"Could not parse waypoint {item.strip()!r} in {where}, expected frame:x,y."
            raise InvalidSceneException(msg) from e

    return tuple(waypoints)


def load_scene_script(path: str | Path) -> SceneScript:
    path = Path(path)
    parser = configparser.ConfigParser()

    try:
        with path.open(encoding="utf-8") as f:
            parser.read_file(f)
    except (OSError, configparser.Error) as e:
        msg = f"Could not read scene script {path}: {e}"
        raise InvalidSceneException(msg) from e

    if not parser.has_section("scene"):
        msg = f"Scene script {path} has no [scene] section."
        raise InvalidSceneException(msg)

    scene = parser["scene"]
    actors = []
    try:
        for section in parser.sections():
            if section == "scene":
                continue
            if not section.startswith(ACTOR_SECTION_PREFIX):
                msg = f"Unknown section [{section}] in scene script {path}."
                raise InvalidSceneException(msg)

            where = f"[{section}] of {path}"
            actor = parser[section]
            actors.append(
                Actor(
                    int(section.removeprefix(ACTOR_SECTION_PREFIX)),
                    _parse_waypoints(actor["waypoints"], where),
                    float(actor.get("radius", "5")),
                    _parse_triplet(actor.get("color", "255,0,0"), where),
                )
            )

        script = SceneScript(
            int(scene["width"]),
            int(scene["height"]),
            int(scene["num_frames"]),
            actors,
            _parse_triplet(scene.get("background", "0,0,0"), f"[scene] of {path}"),
            int(scene.get("noise_amplitude", "0")),
        )
    except (KeyError, ValueError) as e:
        msg = f"Invalid scene script {path}: {e}"
        raise InvalidSceneException(msg) from e

    LOGGER.info("Loaded scene %s with %s actors", path, len(script.actors))
    return script


def save_scene_script(script: SceneScript, path: str | Path) -> None:
    parser = configparser.ConfigParser()
    parser["scene"] = {
        "width": str(script.width),
        "height": str(script.height),
        "num_frames": str(script.num_frames),
        "background": ",".join(str(value) for value in script.background),
        "noise_amplitude": str(script.noise_amplitude),
    }

    for actor in script.actors:
        parser[f"{ACTOR_SECTION_PREFIX}{actor.actor_id}"] = {
            "radius": repr(actor.radius),
            "color": ",".join(str(value) for value in actor.color),
            "waypoints": "; ".join(
                f"{waypoint.frame_index}:{waypoint.x!r},{waypoint.y!r}" for waypoint in actor.waypoints
            ),
        }

    with Path(path).open("w", encoding="utf-8", newline="\n") as f:
        parser.write(f)
