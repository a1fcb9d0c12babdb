import os

from dotenv import load_dotenv
from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings

load_dotenv()

BUDGET_KEYS = {
    "states": "EXHAUSTIVE_MAX_CELLS",
    "steps": "MAX_STEPS",
    "period": "PERIOD_CAP",
    "lcm": "BP_LCM_CAP",
}


class Settings(BaseSettings):
    # Application Settings
    PROJECT_NAME: str = "ecasync"
    VERSION: str = "0.1.0"
    DEBUG: bool = os.getenv("DEBUG", "0") == "1"
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "results")
    JOBS: int = int(os.getenv("JOBS", os.cpu_count() or 1))
    PROGRESS: bool = os.getenv("PROGRESS", "1") == "1"

    # Representation Settings
    PACKED_WIDTH: int = int(os.getenv("PACKED_WIDTH", 24))

    # Budget Settings
    EXHAUSTIVE_MAX_CELLS: int = int(os.getenv("EXHAUSTIVE_MAX_CELLS", 24))
    MAX_STEPS: int = int(os.getenv("MAX_STEPS", 10_000_000))
    PERIOD_CAP: int = int(os.getenv("PERIOD_CAP", 10080))
    BP_LCM_CAP: int = int(os.getenv("BP_LCM_CAP", 2520))
    ECA_BUDGET: str = os.getenv("ECA_BUDGET", "")

    # Analysis Settings
    WALL_MAX_K: int = int(os.getenv("WALL_MAX_K", 4))
    REGIME_CONSTANT_FLOOR: int = int(os.getenv("REGIME_CONSTANT_FLOOR", 8))
    REGIME_LINEAR_BAND: str = os.getenv("REGIME_LINEAR_BAND", "0.2,4")
    REGIME_LINEAR_SLOPE: str = os.getenv("REGIME_LINEAR_SLOPE", "0.5,1.5")
    REGIME_SUPERPOLY_FACTOR: float = float(os.getenv("REGIME_SUPERPOLY_FACTOR", 0.8))
    REGIME_SUPERPOLY_SLOPE: float = float(os.getenv("REGIME_SUPERPOLY_SLOPE", 2.0))

    @field_validator("PACKED_WIDTH")
    @classmethod
    def validate_packed_width(cls, v: int) -> int:
        if not 1 <= v <= 64:
            raise ValueError("PACKED_WIDTH must lie in [1, 64]")
        return v

    @field_validator("JOBS")
    @classmethod
    def validate_jobs(cls, v: int) -> int:
        return max(1, v)

    @field_validator("REGIME_LINEAR_BAND", "REGIME_LINEAR_SLOPE")
    @classmethod
    def validate_band(cls, v: str) -> str:
        low, high = (float(part) for part in v.split(","))
        if not 0 < low < high:
            raise ValueError(f"Invalid band '{v}', expected 'low,high' with 0 < low < high")
        return v

    @model_validator(mode="after")
    def apply_budget_override(self) -> "Settings":
        """Apply ECA_BUDGET, e.g. 'steps=1000000,period=5040'."""
        if not self.ECA_BUDGET.strip():
            return self
        for item in self.ECA_BUDGET.split(","):
            key, _, value = item.partition("=")
            field = BUDGET_KEYS.get(key.strip().lower())
            if field is None or not value.strip().isdigit():
                raise ValueError(
                    f"Invalid ECA_BUDGET entry '{item}', expected one of "
                    f"{', '.join(BUDGET_KEYS)} with an integer value"
                )
            setattr(self, field, int(value))
        return self

    class Config:
        case_sensitive = True
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"

    @property
    def linear_band(self) -> tuple[float, float]:
        low, high = (float(part) for part in self.REGIME_LINEAR_BAND.split(","))
        return low, high

    @property
    def linear_slope(self) -> tuple[float, float]:
        low, high = (float(part) for part in self.REGIME_LINEAR_SLOPE.split(","))
        return low, high


settings = Settings()


def override(values: dict[str, int]) -> None:
    """Apply per-run budget overrides (keys as in ECA_BUDGET) to the live settings."""
    for key, value in values.items():
        setattr(settings, BUDGET_KEYS[key], int(value))


def current_budgets() -> dict[str, int]:
    return {key: int(getattr(settings, field)) for key, field in BUDGET_KEYS.items()}
