from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, TypeVar

from crowdtrack.core.background_model import DEFAULT_ALPHA, DEFAULT_ETA
from crowdtrack.core.detection import (
    DEFAULT_MIN_BLOB_AREA,
    DEFAULT_MORPHOLOGY_RADIUS,
    DetectionConfig,
    DetectionMode,
)
from crowdtrack.core.exceptions import CrowdTrackException, InvalidConfigException
from crowdtrack.core.features import FeatureConfig
from crowdtrack.core.tracker import DEFAULT_OCCLUSION_LIMIT
from crowdtrack.synth.scene import DEFAULT_VISIBILITY_THRESHOLD

if TYPE_CHECKING:
    from collections.abc import Callable

RUN_SECTION = "run"
DEFAULT_PATTERN = "*.ppm"
DEFAULT_OUT = "ntyx.csv"
DEFAULT_TRUTH_OUT = "truth.csv"

T = TypeVar("T")

KNOWN_KEYS: dict[str, frozenset[str]] = {
    RUN_SECTION: frozenset({"mode", "seed"}),
    "io": frozenset({"input_dir", "pattern", "scene", "out", "dump_masks", "truth_out", "summary_out"}),
    "detection": frozenset(
        {
            "threshold",
            "alpha",
            "eta",
            "initial_variance",
            "morphology_radius",
            "min_blob_area",
            "learning_frames",
        }
    ),
    "features": frozenset(
        {
            "w1",
            "w2",
            "entropy_cap",
            "distance_cap",
            "angle_cap",
            "speed_cap",
            "motion_cap",
            "entropy_weight",
            "distance_weight",
            "angle_weight",
            "speed_weight",
            "motion_weight",
            "possibility_threshold",
        }
    ),
    "tracker": frozenset({"occlusion_limit"}),
    "synth": frozenset({"detector", "match_radius", "visibility_threshold"}),
}


class RunMode(Enum):
    BACKGROUND = "background"
    REDHAT = "redhat"
    SYNTH = "synth"


@dataclass(frozen=True)
class RunConfig:
    """
    Everything one run of the pipeline needs. Exactly one of
    ``input_dir`` and ``scene`` is set, matching ``mode``.
    """

    mode: RunMode
    input_dir: Path | None = None
    scene: Path | None = None
    pattern: str = DEFAULT_PATTERN
    out: Path = Path(DEFAULT_OUT)
    dump_masks: Path | None = None
    truth_out: Path = Path(DEFAULT_TRUTH_OUT)
    summary_out: Path | None = None
    seed: int = 0
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    alpha: float = DEFAULT_ALPHA
    eta: float = DEFAULT_ETA
    initial_variance: float = 0.0
    learning_frames: int = 0
    features: FeatureConfig = field(default_factory=FeatureConfig)
    occlusion_limit: int = DEFAULT_OCCLUSION_LIMIT
    match_radius: float | None = None
    visibility_threshold: float = DEFAULT_VISIBILITY_THRESHOLD

    def detection_mode(self) -> DetectionMode:
        return self.detection.mode

    def with_overrides(
        self, out: Path | None = None, dump_masks: Path | None = None, seed: int | None = None
    ) -> RunConfig:
        """Copy with command line values taking precedence over the file."""
        return replace(
            self,
            out=self.out if out is None else out,
            dump_masks=self.dump_masks if dump_masks is None else dump_masks,
            seed=self.seed if seed is None else seed,
        )


class _Section:
    """Typed access to one config section; every read is checked."""

    def __init__(self, parser: configparser.ConfigParser, name: str, path: Path) -> None:
        self.name = name
        self.__values = parser[name] if parser.has_section(name) else {}
        self.__path = path

    def _parse(self, key: str, convert: Callable[[str], T]) -> T:
        raw = self.__values[key]
        try:
            return convert(raw.strip())
        except ValueError as e:
            msg = f"Could not parse {self.name}.{key} = {raw!r} in {self.__path}."
            raise InvalidConfigException(msg) from e

    def has(self, key: str) -> bool:
        return key in self.__values

    def string(self, key: str, default: str | None = None) -> str | None:
        if not self.has(key):
            return default
        value = self.__values[key].strip()
        return value or default

    def path(self, key: str) -> Path | None:
        value = self.string(key)
        if value is None:
            return None
        path = Path(value)
        return path if path.is_absolute() else self.__path.parent / path

    def number(
        self,
        key: str,
        *,
        minimum: float | None = None,
        maximum: float | None = None,
        exclusive: bool = False,
    ) -> float | None:
        """The value of ``key``, None when the key is not set."""
        if not self.has(key):
            return None

        value = self._parse(key, float)
        too_low = minimum is not None and (value <= minimum if exclusive else value < minimum)
        too_high = maximum is not None and (value >= maximum if exclusive else value > maximum)
        if too_low or too_high:
            low, high = ("(", ")") if exclusive else ("[", "]")
            lower = "-inf" if minimum is None else minimum
            upper = "inf" if maximum is None else maximum
            msg = f"{self.name}.{key} = {value} is out of range {low}{lower}, {upper}{high}."
            raise InvalidConfigException(msg)

        return value

    def real(
        self,
        key: str,
        default: float,
        *,
        minimum: float | None = None,
        maximum: float | None = None,
        exclusive: bool = False,
    ) -> float:
        value = self.number(key, minimum=minimum, maximum=maximum, exclusive=exclusive)
        return default if value is None else value

    def integer(self, key: str, default: int, *, minimum: int | None = None) -> int:
        if not self.has(key):
            return default

        value = self._parse(key, int)
        if minimum is not None and value < minimum:
            msg = f"{self.name}.{key} = {value} must be at least {minimum}."
            raise InvalidConfigException(msg)

        return value


def _read_parser(path: Path) -> configparser.ConfigParser:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        msg = f"Could not read config file {path}: {e.strerror}."
        raise InvalidConfigException(msg) from e

    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__", strict=False)
    try:
        # keys before the first header belong to the run section
        parser.read_string(f"[{RUN_SECTION}]\n{text}", source=str(path))
    except configparser.Error as e:
        msg = f"Could not parse config file {path}: {e.message}"
        raise InvalidConfigException(msg) from e

    for section in parser.sections():
        if section not in KNOWN_KEYS:
            msg = f"Unknown section [{section}] in {path}."
            raise InvalidConfigException(msg)

        unknown = sorted(set(parser[section]) - KNOWN_KEYS[section])
        if unknown:
            msg = f"Unknown key(s) {', '.join(unknown)} in section [{section}] of {path}."
            raise InvalidConfigException(msg)

    return parser


def _parse_mode(value: str | None, enum: type[RunMode] | type[DetectionMode], key: str) -> RunMode | DetectionMode:
    choices = ", ".join(member.value for member in enum)
    if value is None:
        msg = f"{key} is required, choose one of: {choices}."
        raise InvalidConfigException(msg)

    try:
        return enum(value.lower())
    except ValueError as e:
        msg = f"Unknown {key} {value!r}, choose one of: {choices}."
        raise InvalidConfigException(msg) from e


def parse_config(path: str | Path) -> RunConfig:
    path = Path(path)
    parser = _read_parser(path)

    run = _Section(parser, RUN_SECTION, path)
    io = _Section(parser, "io", path)
    detection = _Section(parser, "detection", path)
    features = _Section(parser, "features", path)
    tracker = _Section(parser, "tracker", path)
    synth = _Section(parser, "synth", path)

    input_dir = io.path("input_dir")
    scene = io.path("scene")
    if input_dir is None and scene is None:
        msg = f"No input source in {path}: set io.input_dir or io.scene."
        raise InvalidConfigException(msg)

    if input_dir is not None and scene is not None:
        msg = f"Both io.input_dir and io.scene are set in {path}, choose one."
        raise InvalidConfigException(msg)

    mode = RunMode(_parse_mode(run.string("mode"), RunMode, "mode").value)
    if mode == RunMode.SYNTH and scene is None:
        msg = "Synth mode reads a scene script, set io.scene."
        raise InvalidConfigException(msg)

    if mode != RunMode.SYNTH and input_dir is None:
        msg = f"{mode.value} mode reads a frame directory, set io.input_dir."
        raise InvalidConfigException(msg)

    if mode == RunMode.SYNTH:
        detector = _parse_mode(synth.string("detector", DetectionMode.REDHAT.value), DetectionMode, "detector")
        detection_mode = DetectionMode(detector.value)
    else:
        detection_mode = DetectionMode(mode.value)

    try:
        detection_config = DetectionConfig.for_mode(
            detection_mode,
            detection.number("threshold", minimum=0.0, maximum=255.0),
            morphology_radius=detection.integer("morphology_radius", DEFAULT_MORPHOLOGY_RADIUS, minimum=0),
            min_blob_area=detection.integer("min_blob_area", DEFAULT_MIN_BLOB_AREA, minimum=0),
        )
        feature_values = {
            key: features.real(key, 0.0, minimum=0.0) for key in sorted(KNOWN_KEYS["features"]) if features.has(key)
        }
        feature_config = FeatureConfig(**feature_values)
    except InvalidConfigException:
        raise
    except CrowdTrackException as e:
        msg = str(e)
        raise InvalidConfigException(msg) from e

    return RunConfig(
        mode=mode,
        input_dir=input_dir,
        scene=scene,
        pattern=io.string("pattern", DEFAULT_PATTERN) or DEFAULT_PATTERN,
        out=io.path("out") or path.parent / DEFAULT_OUT,
        dump_masks=io.path("dump_masks"),
        truth_out=io.path("truth_out") or path.parent / DEFAULT_TRUTH_OUT,
        summary_out=io.path("summary_out"),
        seed=run.integer("seed", 0),
        detection=detection_config,
        alpha=detection.real("alpha", DEFAULT_ALPHA, minimum=0.0, maximum=1.0, exclusive=True),
        eta=detection.real("eta", DEFAULT_ETA, minimum=0.0),
        initial_variance=detection.real("initial_variance", 0.0, minimum=0.0),
        learning_frames=detection.integer("learning_frames", 0, minimum=0),
        features=feature_config,
        occlusion_limit=tracker.integer("occlusion_limit", DEFAULT_OCCLUSION_LIMIT, minimum=0),
        match_radius=synth.number("match_radius", minimum=0.0, exclusive=True),
        visibility_threshold=synth.real(
            "visibility_threshold", DEFAULT_VISIBILITY_THRESHOLD, minimum=0.0, maximum=1.0
        ),
    )
