"""Runtime settings loaded from the environment."""

import logging
import os
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from cptalloc.core.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

ENV_PREFIX = "CPTALLOC_"


class Settings(BaseModel):
    """Defaults shared by the CLI commands.

    Usage:
        # From environment variables (and .env if present)
        settings = Settings.from_env()

        # With explicit values
        settings = Settings(seed=7, workers=4)
    """

    model_config = ConfigDict(frozen=True)

    seed: int = 0
    workers: int = Field(1, ge=1)
    kkt_tol: float = Field(1e-8, gt=0)
    output_dir: Path = Path("./results")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"

    @classmethod
    def from_env(cls, env_file: str | None = None) -> "Settings":
        """Create settings from CPTALLOC_* environment variables.

        Args:
            env_file: Path to .env file (optional)

        Returns:
            Validated Settings instance

        Raises:
            InvalidInputError: If a variable holds an invalid value
        """
        if env_file:
            load_dotenv(env_file)
        else:
            load_dotenv()

        values: dict[str, str] = {}
        for name in cls.model_fields:
            raw = os.getenv(f"{ENV_PREFIX}{name.upper()}")
            if raw is not None and raw.strip():
                values[name] = raw.strip()

        try:
            settings = cls.model_validate(values)
        except ValidationError as e:
            raise InvalidInputError(f"Invalid {ENV_PREFIX}* setting: {e}") from e

        logger.debug("Loaded settings: %s", settings)
        return settings
