# portrait_engine/config.py
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

ENV_PREFIX = "PORTRAIT_"


class Settings(BaseModel):
    """Engine-wide defaults; every field can be overridden by a PORTRAIT_* variable."""

    degree_cap: int = Field(default=2 ** 14, ge=2)
    portrait_bound: int = Field(default=64, ge=1)
    construct_cap: int = Field(default=3 ** 6, ge=1)
    output_dir: str = "analysis_results"
    server_host: str = "0.0.0.0"
    server_port: int = 5000
    callback_retries: int = Field(default=3, ge=1)
    grid_workers: int = Field(default=1, ge=1)

    @classmethod
    def from_env(cls) -> "Settings":
        values = {}
        for name in cls.model_fields:
            raw = os.getenv(ENV_PREFIX + name.upper())
            if raw is not None:
                values[name] = raw
        return cls(**values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    load_dotenv()
    return Settings.from_env()
