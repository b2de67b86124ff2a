from __future__ import annotations

import os
from pathlib import Path
from typing import List, Literal, Optional

from dotenv import find_dotenv, load_dotenv
from loguru import logger
from pydantic import BaseModel, Field, PositiveInt, model_validator

from .engine import DEFAULT_DEPTH_LIMIT

_ENV_LOADED = False


def _load_env_file() -> None:
    global _ENV_LOADED
    if _ENV_LOADED:
        return
    _ENV_LOADED = True
    path = find_dotenv(usecwd=True)
    if path:
        # the shell wins over .env for interpreter settings
        load_dotenv(path, override=False)
        logger.debug({"event": "env_loaded", "path": path})
    else:
        logger.debug({"event": "env_missing"})


class Settings(BaseModel):
    depth_limit: PositiveInt = Field(default=DEFAULT_DEPTH_LIMIT)
    output_format: Literal["plain", "json"] = Field(default="plain")
    max_answers: Optional[PositiveInt] = None
    log_level: str = Field(default="WARNING")

    @classmethod
    def from_env(cls) -> "Settings":
        def getenv(name: str, default: Optional[str] = None) -> Optional[str]:
            return os.getenv(name, default)

        def positive(name: str, default: Optional[int]) -> Optional[int]:
            raw = (getenv(name, "") or "").strip()
            if not raw:
                return default
            if raw.isdigit() and int(raw) > 0:
                return int(raw)
            logger.warning(f"{name}={raw!r} is not a positive integer; using {default}")
            return default

        fmt = (getenv("RFZ_FORMAT", "plain") or "plain").strip().lower()
        if fmt not in ("plain", "json"):
            logger.warning(f"RFZ_FORMAT={fmt!r} is not plain|json; using plain")
            fmt = "plain"

        return cls(
            depth_limit=positive("RFZ_DEPTH_LIMIT", DEFAULT_DEPTH_LIMIT),
            output_format=fmt,
            max_answers=positive("RFZ_MAX_ANSWERS", None),
            log_level=(getenv("LOG_LEVEL", "WARNING") or "WARNING").strip().upper(),
        )


def load_settings() -> Settings:
    _load_env_file()
    return Settings.from_env()


class CliConfig(BaseModel):
    program_paths: List[Path] = Field(default_factory=list)
    mode: Literal["repl", "batch"] = "batch"
    queries: List[str] = Field(default_factory=list)
    scenario_paths: List[Path] = Field(default_factory=list)
    format: Literal["plain", "json"] = "plain"
    max_answers: Optional[PositiveInt] = None
    depth_limit: PositiveInt = DEFAULT_DEPTH_LIMIT
    explain: bool = False

    @model_validator(mode="after")
    def _batch_needs_queries(self) -> "CliConfig":
        if self.mode == "batch" and not (self.queries or self.scenario_paths):
            raise ValueError("batch mode needs at least one --query or --scenario")
        return self


__all__ = ["Settings", "CliConfig", "load_settings"]
