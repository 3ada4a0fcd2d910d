# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

import logging
import os
from logging.handlers import RotatingFileHandler

LOG_DIR_ENV = "EQUILIBRIUM_BANDITS_LOG_DIR"
LOGGER_NAME = "equilibrium_bandits"


def get_log_dir() -> str:
    """Directory for the log files: $EQUILIBRIUM_BANDITS_LOG_DIR, else ./logs."""
    return os.environ.get(LOG_DIR_ENV) or os.path.join(os.getcwd(), "logs")


class LazyRotatingFileHandler(RotatingFileHandler):
    """Creates the log directory on the first record, not when the package is imported."""

    def __init__(self, filename: str, **kwargs):
        super().__init__(filename, delay=True, **kwargs)

    def _open(self):
        os.makedirs(os.path.dirname(self.baseFilename), exist_ok=True)
        return super()._open()


def get_experiment_logger(name: str = LOGGER_NAME):
    """
    Configures and returns the dedicated, rotating logger shared by the simulator,
    the experiment runner and the command line.
    """
    logger = logging.getLogger(name)

    # Configure logger only once to prevent adding duplicate handlers on reloads.
    if not logger.handlers:
        logger.setLevel(logging.INFO)

        log_file = os.path.join(get_log_dir(), "equilibrium_bandits.log")

        # Up to 5 backup files of 1MB each.
        handler = LazyRotatingFileHandler(log_file, maxBytes=1024 * 1024, backupCount=5)

        formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')
        handler.setFormatter(formatter)

        logger.addHandler(handler)

    return logger


# Create a single instance that can be imported by other modules.
logger = get_experiment_logger()
