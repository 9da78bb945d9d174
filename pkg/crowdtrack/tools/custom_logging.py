from __future__ import annotations

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _handler_name(name: str) -> str:
    return f"{name}-stream"


def setup_logger(name: str, level: int = logging.INFO) -> logging.Logger:
    """
    Attach a stream handler to the named logger. Calling this
    again only updates the level.
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    handler_name = _handler_name(name)
    if not any(handler.get_name() == handler_name for handler in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.set_name(handler_name)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)

    for handler in logger.handlers:
        handler.setLevel(level)

    return logger


def teardown_logger(name: str) -> None:
    logger = logging.getLogger(name)
    for handler in list(logger.handlers):
        if handler.get_name() == _handler_name(name):
            logger.removeHandler(handler)
            handler.close()
