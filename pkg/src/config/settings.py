import os
from fractions import Fraction
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.models.equation_spec import parse_rational

load_dotenv()


def _env_flag(name: str) -> bool:
    return os.getenv(name, "false").strip().lower() in ("true", "1", "yes")


def _env_optional(name: str) -> str | None:
    value = os.getenv(name, "").strip()
    return value or None


class Settings(BaseModel):
    """Run settings; environment first, CLI flags override."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    seed: int = 42
    debug: bool = False
    gamma: Fraction | None = None
    cap: Fraction | None = None
    max_trees: int = 5000
    report_dir: Path = Path("reports")

    @field_validator("gamma", "cap", mode="before")
    @classmethod
    def _rational(cls, v):
        return None if v is None else parse_rational(v)

    @classmethod
    def from_env(cls) -> "Settings":
        values = {
            "seed": os.getenv("RSB_SEED", "42"),
            "debug": _env_flag("RSB_DEBUG"),
            "gamma": _env_optional("RSB_GAMMA"),
            "cap": _env_optional("RSB_CAP"),
            "max_trees": os.getenv("RSB_MAX_TREES", "5000"),
            "report_dir": os.getenv("RSB_REPORT_DIR", "reports"),
        }
        return cls(**values)

    def with_overrides(self, **overrides) -> "Settings":
        updates = {k: v for k, v in overrides.items() if v is not None}
        return self.model_validate({**self.model_dump(), **updates})


class ModelConfig(BaseModel):
    """Grid, kernel and noise parameters of the numerical model."""
    points: int = Field(64, ge=8)
    spacing: float = Field(1 / 32, gt=0)
    horizon: float = Field(0.25, gt=0)
    epsilon: float = Field(0.01, gt=0)
    correlation: float = Field(0.1, gt=0)
    max_order: int = Field(4, ge=0)
    strict_taylor: bool = False

    @classmethod
    def for_dimension(cls, dim: int, full: bool = False, **overrides) -> "ModelConfig":
        """Coarser grids above two space-time dimensions keep the kernel tables small.

        full=True refines the grid of low-dimensional models to 256 points a side.
        """
        if full and dim <= 2:
            overrides.setdefault("points", 256)
            overrides.setdefault("spacing", 1 / 128)
        if dim > 2:
            overrides.setdefault("points", 12)
            overrides.setdefault("spacing", 1 / 8)
        return cls(**overrides)


def get_settings() -> Settings:
    return Settings.from_env()
