import copy
import os
import pathlib
import sys
from typing import Final, Optional, Tuple

import loguru

LOG_FORMAT: Final[str] = "{time} {level} {message}"
LOG_FORMAT_NO_TIME: Final[str] = "{level} {message}"


def create_logger(
    log_filename_and_level: Optional[Tuple[str, str]] = None,
    console_level: Optional[str] = None,
):  # -> loguru.Logger:  # poetry complains about not recognizing this type :(
    """
    Create a logger instance, typically for a single run
    (one simulation, one analysis, or one member of a sweep).

    NOTE: The created object should be passed around to all relevant functions.
    Do not use `from loguru import logger` (or similar) to obtain the logger.

    :param log_filename_and_level:
        (filename, level) tuple or None to disable file logging.
    :param console_level:
        The log level for the console, or None to disable console logging.
    """
    loguru.logger.remove()
    log = copy.deepcopy(loguru.logger)
    if log_filename_and_level is not None:
        log_filename, log_level = log_filename_and_level
        pathlib.Path(log_filename).parent.mkdir(parents=True, exist_ok=True)
        file_fmt = LOG_FORMAT
        if os.getenv("EXCLUDE_LOG_TIME", "no") == "yes":
            # test convenience to facilitate local diffing of log files
            file_fmt = LOG_FORMAT_NO_TIME
        log.add(
            sink=log_filename,
            mode="w",
            encoding="UTF-8",
            level=log_level,
            format=file_fmt,
            enqueue=True,
        )

    if console_level is not None:
        log.add(
            sink=sys.stderr,
            level=console_level,
            format=LOG_FORMAT,
            colorize=True,
            enqueue=True,
        )

    return log


def create_run_logger(
    out_dir: str,
    prefix: str,
    file_level: str = "INFO",
    console_level: Optional[str] = "WARNING",
):
    """
    Logger for a CLI run or sweep member: file sink `<out_dir>/<prefix>.log`
    plus the given console level.
    """
    return create_logger(
        log_filename_and_level=(f"{out_dir}/{prefix}.log", file_level),
        console_level=console_level,
    )


def close_logger(log) -> None:
    """
    Flushes the enqueued records and removes the sinks.
    Needed before a worker process hands its result back.
    """
    log.complete()
    log.remove()
