"""Logging configuration for fblab."""
import sys
from pathlib import Path

from loguru import logger

from fblab.config import LoggingConfig


def setup_logging(config: LoggingConfig) -> None:
    """
    Configure logging for the application.

    Data goes to stdout, so every handler here writes to stderr or a file.

    Args:
        config: Logging configuration.
    """
    logger.remove()

    logger.add(
        sys.stderr,
        format=config.format,
        level=config.level,
        colorize=config.colorize,
    )

    if config.file:
        log_file = Path(config.file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            config.file,
            format=config.format,
            level=config.level,
            rotation=f"{config.max_size_mb} MB",
            retention=config.backup_count,
            compression="zip",
        )

    logger.debug("Logging initialized")
