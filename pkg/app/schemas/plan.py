from typing import Optional

from pydantic import Field, field_validator, model_validator

from app.core.config import settings
from app.schemas import BaseSchema
from app.schemas.mode import Family, ModeConstraints


class ConfigSource(BaseSchema):
    """Where initial configurations come from: a seeded sample of s, or all 2^n."""

    exhaustive: bool = False
    s: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def sample_size_required(self) -> "ConfigSource":
        if not self.exhaustive and self.s is None:
            raise ValueError("A random configuration source needs a sample size s")
        return self

    @classmethod
    def random(cls, s: int) -> "ConfigSource":
        return cls(exhaustive=False, s=s)

    @classmethod
    def all(cls) -> "ConfigSource":
        return cls(exhaustive=True)

    def size(self, n: int) -> int:
        return 1 << n if self.exhaustive else int(self.s or 0)


class ProtocolRun(BaseSchema):
    family: Family
    constraints: ModeConstraints = ModeConstraints()
    n: int
    source: ConfigSource
    m: int = 32
    steps: int = 1000


class ExperimentPlan(BaseSchema):
    command: str
    rule_selector: str = ""
    rules: tuple[int, ...] = ()
    families: tuple[Family, ...] = ()
    constraints: ModeConstraints = ModeConstraints()
    n_values: tuple[int, ...] = ()
    s: Optional[int] = Field(None, ge=1)
    m: int = Field(32, ge=1)
    steps: int = Field(1000, ge=1)
    exhaustive: bool = False
    seed: int = Field(0, ge=0)
    output_dir: str = settings.OUTPUT_DIR
    budgets: dict[str, int] = {}
    version: str = settings.VERSION

    @field_validator("rules")
    @classmethod
    def validate_rules(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(not 0 <= code <= 255 for code in v):
            raise ValueError("Rule codes must lie in [0, 255]")
        return v

    @field_validator("n_values")
    @classmethod
    def validate_sizes(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(n < 1 for n in v):
            raise ValueError("Ring sizes must be positive")
        return tuple(sorted(set(v)))

    @model_validator(mode="after")
    def validate_source(self) -> "ExperimentPlan":
        if self.exhaustive and self.s is not None:
            raise ValueError("Use either a sample size s or exhaustive configurations, not both")
        return self
