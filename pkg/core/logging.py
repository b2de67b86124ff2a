from __future__ import annotations

import os
import sys

from loguru import logger


def configure_logging(level: str | int = "WARNING") -> None:
    # stdout carries answers, so every log line goes to stderr
    logger.remove()
    logger.add(
        sys.stderr,
        level=level,
        format="{message}",
        backtrace=os.getenv("LOG_BACKTRACE", "0") == "1",
        diagnose=os.getenv("LOG_DIAGNOSE", "0") == "1",
    )


__all__ = ["logger", "configure_logging"]
