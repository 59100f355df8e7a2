#!/usr/bin/env python3
"""
Logging setup for the ring-chord command line.

Library modules only call get_logger(__name__); handlers are attached once by
the entry point. The console handler writes to stderr so that stdout carries
nothing but JSON.
"""

import logging
import os
import sys
from logging.handlers import RotatingFileHandler

FILE_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"
CONSOLE_FORMAT = "[%(levelname)s] %(message)s"


def _file_handler(log_folder: str, log_basename: str, max_bytes: int, backup_count: int) -> logging.Handler:
    os.makedirs(log_folder, exist_ok=True)
    handler = RotatingFileHandler(
        os.path.join(log_folder, f"{log_basename}_0.log"),
        maxBytes=max_bytes,
        backupCount=backup_count,
        encoding="utf-8",
    )
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    return handler


def _console_handler(verbose: bool) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    return handler


def setup_logging(
    log_folder: str = "logs",
    log_basename: str = "ring_chord",
    max_bytes: int = 5 * 1024 * 1024,
    backup_count: int = 10,
    verbose: bool = False,
) -> logging.Logger:
    """
    Attach a rotating file handler and a stderr console handler to the root logger.

    Existing root handlers are replaced, so calling this twice does not duplicate
    output. Python warnings (numpy overflow and the like) are routed into the log.

    Args:
        log_folder: Folder for ring_chord_0.log and its backups; falsy disables the file
        log_basename: Log file base name
        max_bytes: Size at which the file rotates
        backup_count: Rotated files to keep
        verbose: Show DEBUG records on the console

    Returns:
        The root logger
    """
    root = logging.getLogger()
    root.setLevel(logging.DEBUG)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    if log_folder:
        root.addHandler(_file_handler(log_folder, log_basename, max_bytes, backup_count))
    root.addHandler(_console_handler(verbose))
    logging.captureWarnings(True)
    return root


def get_logger(name: str) -> logging.Logger:
    """Named module logger."""
    return logging.getLogger(name)
