from enum import Enum
from typing import Optional

from pydantic import Field, computed_field

from app.schemas import BaseReport, BaseSchema
from app.schemas.mode import Family, UpdateMode
from app.schemas.ring import Configuration


class Regime(str, Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    SUPERPOLYNOMIAL = "superpolynomial"
    UNKNOWN = "unknown"


class Trajectory(BaseReport):
    steps: list[Configuration]
    # substeps[t] holds the p configurations after each block of step t -> t+1
    substeps: Optional[list[list[Configuration]]] = None


class AttractorOutcome(BaseSchema):
    transient: int = Field(..., ge=0)
    cycle_length: int = Field(..., ge=1)
    cycle_min_rep: Configuration

    @property
    def is_fixed_point(self) -> bool:
        return self.cycle_length == 1


class CycleSummary(BaseReport):
    cycle_rep: str
    cycle_length: int
    basin_size: Optional[int] = None
    samples: Optional[int] = None
    max_transient: int = 0


class SweepReport(BaseReport):
    rule: int
    mode: UpdateMode
    n: int
    exhaustive: bool
    configurations: int
    unresolved: int = 0
    cycles: list[CycleSummary]
    max_cycle: int
    max_transient: int

    @computed_field  # type: ignore[prop-decorator]
    @property
    def fixed_points(self) -> int:
        return sum(1 for cycle in self.cycles if cycle.cycle_length == 1)

    def census(self) -> dict[int, tuple[int, Optional[int]]]:
        """cycle length -> (number of distinct cycles, total basin size)"""
        census: dict[int, tuple[int, Optional[int]]] = {}
        for cycle in sorted(self.cycles, key=lambda c: c.cycle_length):
            count, basin = census.get(cycle.cycle_length, (0, 0))
            if basin is not None and cycle.basin_size is not None:
                basin += cycle.basin_size
            else:
                basin = None
            census[cycle.cycle_length] = (count + 1, basin)
        return census


class ScalingPoint(BaseReport):
    n: int
    max_cycle: int
    max_transient: int = 0
    modes_sampled: int = 1


class ScalingRecord(BaseReport):
    rule: int
    family: Family
    constraint: str = "-"
    points: list[ScalingPoint]
    regime: Optional[Regime] = None
    expected: Optional[Regime] = None


class MeasureSeries(BaseReport):
    rule: int
    family: Family
    constraint: str = "-"
    n: int
    s: int
    m: int
    steps: int
    exhaustive: bool = False
    mean_density: list[float]
    mean_norm_energy: list[float]
    var_density: list[float]
    var_norm_energy: list[float]
    per_mode_density: Optional[list[list[float]]] = None
    per_mode_energy: Optional[list[list[float]]] = None


class CraftedConfiguration(BaseReport):
    rule: int
    configuration: Configuration
    mode: UpdateMode
    # (start, length) spans on the ring
    segments: list[tuple[int, int]]
    walls: list[tuple[int, int]]


class LcmReport(BaseReport):
    rule: int
    n: int
    transient: int
    cycle_length: int
    segment_cycles: list[int]
    lcm: int
    walls_preserved: bool
