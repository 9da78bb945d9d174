from __future__ import annotations

from logging import getLogger
from typing import TYPE_CHECKING, NamedTuple

from crowdtrack.core.background_model import BackgroundModel
from crowdtrack.core.blob import connected_components
from crowdtrack.core.detection import DetectionMode, foreground_mask
from crowdtrack.core.exceptions import CrowdTrackException, DimensionMismatchException, InvalidConfigException
from crowdtrack.core.frame import list_frame_sequence, load_frame, save_mask
from crowdtrack.core.tracker import TrackerState, export_ntyx
from crowdtrack.processing.config import RunMode
from crowdtrack.processing.utils import ProcessingUtils
from crowdtrack.synth.scene import GroundTruth, load_scene_script, render, render_background
from crowdtrack.synth.scoring import score
from crowdtrack.tools.resources import package_name

if TYPE_CHECKING:
    from collections.abc import Iterator
    from pathlib import Path

    from crowdtrack.core.frame import Frame
    from crowdtrack.core.tracker import NtyxRecord
    from crowdtrack.processing.config import RunConfig
    from crowdtrack.synth.scene import SceneScript, TruthEntry
    from crowdtrack.synth.scoring import AccuracyReport

LOGGER = getLogger(package_name())


class SourceFrame(NamedTuple):
    frame_index: int
    frame: Frame
    source: str
    truth: tuple[TruthEntry, ...] | None = None


class RunResult(NamedTuple):
    records: list[NtyxRecord]
    state: TrackerState
    truth: GroundTruth | None = None
    report: AccuracyReport | None = None


class TrackingPipeline:
    """
    Detection followed by tracking, one frame at a time. Only the
    current frame is held in memory; the tracker keeps what it needs of
    the two frames before it.
    """

    def __init__(self, config: RunConfig) -> None:
        self.__config = config
        self.__script: SceneScript | None = None
        self.__model: BackgroundModel | None = None
        self.__size: tuple[int, int] | None = None

    def config(self) -> RunConfig:
        return self.__config

    def _check_size(self, source_frame: SourceFrame) -> None:
        frame = source_frame.frame
        if self.__size is None:
            self.__size = frame.shape()
            return

        if frame.shape() != self.__size:
            height, width = self.__size
            msg = (
                f"{source_frame.source} is {frame.width()}x{frame.height()} "
                f"but the sequence started at {width}x{height}."
            )
            raise DimensionMismatchException(msg)

    def _new_model(self, frame: Frame) -> BackgroundModel:
        config = self.__config
        return BackgroundModel(frame.width(), frame.height(), config.alpha, config.eta, config.initial_variance)

    def _learn(self, source_frame: SourceFrame) -> None:
        self._check_size(source_frame)
        if self.__model is None:
            self.__model = self._new_model(source_frame.frame)
        self.__model = self.__model.update(source_frame.frame)

    def _directory_frames(self, input_dir: Path) -> Iterator[SourceFrame]:
        config = self.__config
        paths = list_frame_sequence(input_dir, config.pattern)

        learning = config.learning_frames if config.detection_mode() == DetectionMode.BACKGROUND else 0
        for index, path in enumerate(paths):
            source_frame = SourceFrame(index, load_frame(path), str(path))
            if index < learning:
                self._learn(source_frame)
                continue
            yield source_frame

    def _scene_frames(self, scene: Path) -> Iterator[SourceFrame]:
        config = self.__config
        script = load_scene_script(scene)
        self.__script = script

        if config.detection_mode() == DetectionMode.BACKGROUND:
            for index in range(config.learning_frames):
                self._learn(SourceFrame(index, render_background(script, index, config.seed), f"background {index}"))

        for t in range(script.num_frames):
            frame, truth = render(script, t, config.seed, config.visibility_threshold)
            yield SourceFrame(t, frame, f"scene frame {t}", truth)

    def frames(self) -> Iterator[SourceFrame]:
        config = self.__config
        if config.mode == RunMode.SYNTH and config.scene is not None:
            return self._scene_frames(config.scene)
        if config.mode != RunMode.SYNTH and config.input_dir is not None:
            return self._directory_frames(config.input_dir)

        msg = f"No input source for {config.mode.value} mode."
        raise InvalidConfigException(msg)

    def process(self) -> RunResult:
        config = self.__config
        state = TrackerState(config.occlusion_limit)
        truth = GroundTruth() if config.mode == RunMode.SYNTH else None

        if config.dump_masks is not None:
            config.dump_masks.mkdir(parents=True, exist_ok=True)

        processed = 0
        for source_frame in self.frames():
            self._check_size(source_frame)
            if config.detection_mode() == DetectionMode.BACKGROUND and self.__model is None:
                self.__model = self._new_model(source_frame.frame)

            mask, self.__model = foreground_mask(source_frame.frame, config.detection, self.__model)
            if config.dump_masks is not None:
                save_mask(mask, ProcessingUtils.mask_path(config.dump_masks, source_frame.frame_index))

            blobs = connected_components(mask, source_frame.frame_index, config.detection.min_blob_area)
            state.step(blobs, source_frame.frame, config.features, source_frame.frame_index)

            if truth is not None and source_frame.truth is not None:
                truth.extend(source_frame.truth)
            processed += 1

        records = export_ntyx(state)
        LOGGER.info("Processed %s frames, %s pedestrians, %s records", processed, len(state.tracks()), len(records))

        # the trajectory table goes last, its presence marks a complete run
        if config.summary_out is not None:
            ProcessingUtils.write_track_summary(state.tracks(), config.summary_out)

        report = None
        if truth is not None and self.__script is not None:
            ProcessingUtils.write_truth(truth, config.truth_out)
            match_radius = config.match_radius if config.match_radius is not None else self.__script.max_radius()
            report = score(records, truth, match_radius)
            LOGGER.info("Synthetic scene: %s", report.summary())

        ProcessingUtils.write_ntyx(records, config.out)
        LOGGER.info("Wrote %s", config.out)

        return RunResult(records, state, truth, report)


def run_pipeline(config: RunConfig) -> RunResult:
    return TrackingPipeline(config).process()


def run(config: RunConfig) -> int:
    """Run the pipeline and turn failures into a nonzero exit status."""
    try:
        run_pipeline(config)
    except CrowdTrackException as e:
        LOGGER.error("[%s] %s", e.module, e)  # noqa: TRY400
        return 1
    except OSError as e:
        LOGGER.error("[io] %s", e)  # noqa: TRY400
        return 1

    return 0
