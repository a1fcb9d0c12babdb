from enum import Enum
from typing import Annotated, Literal, Optional, Union

from pydantic import Field, model_validator

from app.schemas import BaseSchema

Block = tuple[int, ...]


class Family(str, Enum):
    PAR = "par"
    SEQ = "seq"
    BIP = "bip"
    BS = "bs"
    BP = "bp"
    LC = "lc"
    EXPLICIT = "explicit"


class ParallelParams(BaseSchema):
    kind: Literal["par"] = "par"


class BipartiteParams(BaseSchema):
    kind: Literal["bip"] = "bip"
    even_first: bool = True


class SequentialParams(BaseSchema):
    kind: Literal["seq"] = "seq"
    order: Block


class BlockSequentialParams(BaseSchema):
    kind: Literal["bs"] = "bs"
    ordered_blocks: tuple[Block, ...]


class BlockParallelParams(BaseSchema):
    kind: Literal["bp"] = "bp"
    subsequences: tuple[Block, ...]


class LocalClocksParams(BaseSchema):
    kind: Literal["lc"] = "lc"
    periods: Block
    shifts: Block


class ExplicitParams(BaseSchema):
    kind: Literal["explicit"] = "explicit"
    blocks: tuple[Block, ...]


ModeParams = Annotated[
    Union[
        ParallelParams,
        BipartiteParams,
        SequentialParams,
        BlockSequentialParams,
        BlockParallelParams,
        LocalClocksParams,
        ExplicitParams,
    ],
    Field(discriminator="kind"),
]


class UpdateMode(BaseSchema):
    """A periodic schedule: family, raw parameters and the block sequence B_0..B_{p-1}."""

    family: Family
    n: int = Field(..., ge=1)
    raw: ModeParams
    blocks: tuple[Block, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def every_cell_updated(self) -> "UpdateMode":
        seen = set()
        for block in self.blocks:
            if any(not 0 <= cell < self.n for cell in block):
                raise ValueError(f"Block {block} has cells outside 0..{self.n - 1}")
            seen.update(block)
        missing = set(range(self.n)) - seen
        if missing:
            raise ValueError(f"Cells {sorted(missing)} are never updated within a period")
        return self

    @property
    def period(self) -> int:
        return len(self.blocks)


class ModeConstraints(BaseSchema):
    """Knobs for random mode generation."""

    blocks: Optional[int] = Field(None, ge=1)
    max_period: Optional[int] = Field(None, ge=1)
    part_sizes: tuple[int, ...] = (1, 2, 3, 4)
    even_first: Optional[bool] = None

    def describe(self) -> str:
        parts = []
        if self.blocks is not None:
            parts.append(f"blocks={self.blocks}")
        if self.max_period is not None:
            parts.append(f"max_period={self.max_period}")
        return ";".join(parts) or "-"
