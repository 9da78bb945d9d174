from __future__ import annotations

import csv
from pathlib import Path
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Iterable

    from crowdtrack.core.track import Track
    from crowdtrack.core.tracker import NtyxRecord
    from crowdtrack.synth.scene import GroundTruth

NTYX_HEADER = ("N", "T", "Y", "X")
TRUTH_HEADER = ("actor", "T", "Y", "X", "visible")
SUMMARY_HEADER = ("N", "first_T", "last_T", "samples", "length", "average_speed", "maximum_speed", "status")
MASK_FILE_TEMPLATE = "mask_{:06d}.ppm"


class ProcessingUtils:
    @staticmethod
    def coordinate(value: float) -> str:
        return f"{value:.2f}"

    @staticmethod
    def write_rows(path: Path, header: tuple[str, ...], rows: Iterable[tuple[object, ...]]) -> None:
        """
        Write a CSV table with LF line endings. The table is written to a
        temporary file first and moved into place once complete.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        partial = path.with_name(f".{path.name}.partial")

        try:
            with partial.open("w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                writer.writerows(rows)
            partial.replace(path)
        except BaseException:
            partial.unlink(missing_ok=True)
            raise

    @staticmethod
    def write_ntyx(records: Iterable[NtyxRecord], path: Path) -> None:
        ProcessingUtils.write_rows(
            path,
            NTYX_HEADER,
            (
                (record.n, record.t, ProcessingUtils.coordinate(record.y), ProcessingUtils.coordinate(record.x))
                for record in records
            ),
        )

    @staticmethod
    def write_truth(truth: GroundTruth, path: Path) -> None:
        ProcessingUtils.write_rows(
            path,
            TRUTH_HEADER,
            (
                (
                    entry.actor_id,
                    entry.frame_index,
                    ProcessingUtils.coordinate(entry.y),
                    ProcessingUtils.coordinate(entry.x),
                    int(entry.visible),
                )
                for entry in truth.entries()
            ),
        )

    @staticmethod
    def write_track_summary(tracks: Iterable[Track], path: Path) -> None:
        rows = []
        for track in sorted(tracks, key=lambda track: track.pedestrian_id()):
            samples = track.samples()
            rows.append(
                (
                    track.pedestrian_id(),
                    samples[0].frame_index,
                    samples[-1].frame_index,
                    len(samples),
                    ProcessingUtils.coordinate(track.length()),
                    ProcessingUtils.coordinate(track.average_speed()),
                    ProcessingUtils.coordinate(track.maximum_speed()),
                    track.status().value,
                )
            )

        ProcessingUtils.write_rows(path, SUMMARY_HEADER, rows)

    @staticmethod
    def mask_path(directory: Path, frame_index: int) -> Path:
        return Path(directory) / MASK_FILE_TEMPLATE.format(frame_index)
