from __future__ import annotations

import argparse
import logging
from logging import getLogger
from pathlib import Path
from typing import TYPE_CHECKING

from crowdtrack import __version__
from crowdtrack.core.exceptions import CrowdTrackException
from crowdtrack.processing.config import parse_config
from crowdtrack.processing.pipeline import run
from crowdtrack.tools.custom_logging import setup_logger, teardown_logger
from crowdtrack.tools.resources import package_name

if TYPE_CHECKING:
    from collections.abc import Sequence

LOGGER = getLogger(package_name())


def _parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    p = argparse.ArgumentParser(
        prog=package_name(),
        description="Detect pedestrians in a frame sequence and write their trajectories as an NTYX table.",
    )
    p.add_argument("--config", type=Path, required=True, help="Run configuration file.")
    p.add_argument("--out", type=Path, help="NTYX output file, overrides io.out.")
    p.add_argument("--dump-masks", type=Path, help="Directory for per-frame foreground masks.")
    p.add_argument("--seed", type=int, help="Random seed for synthetic scenes, overrides run.seed.")
    p.add_argument("-v", "--verbose", action="store_true", help="Log per-frame details.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parse_args(argv)
    name = package_name()
    setup_logger(name, logging.DEBUG if args.verbose else logging.INFO)

    try:
        config = parse_config(args.config).with_overrides(args.out, args.dump_masks, args.seed)
    except CrowdTrackException as e:
        LOGGER.error("[%s] %s", e.module, e)  # noqa: TRY400
        teardown_logger(name)
        return 1

    status = run(config)
    teardown_logger(name)
    return status
