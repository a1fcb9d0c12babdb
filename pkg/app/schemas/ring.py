from functools import lru_cache

import numpy as np
from pydantic import Field, field_validator

from app.core.utils import validate_word
from app.schemas import BaseSchema


@lru_cache(maxsize=256)
def rule_lookup(code: int) -> np.ndarray:
    """Outputs indexed by 4a+2b+c, as a read-only uint8 array."""
    table = np.unpackbits(np.array([code], dtype=np.uint8), bitorder="little")
    table.setflags(write=False)
    return table


class Rule(BaseSchema):
    code: int = Field(..., ge=0, le=255)

    @property
    def table(self) -> tuple[int, ...]:
        return tuple((self.code >> index) & 1 for index in range(8))

    @property
    def lookup(self) -> np.ndarray:
        return rule_lookup(self.code)

    def __str__(self) -> str:
        return str(self.code)


class Configuration(BaseSchema):
    bits: tuple[int, ...] = Field(..., min_length=1)

    @field_validator("bits")
    @classmethod
    def must_be_boolean(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(bit not in (0, 1) for bit in v):
            raise ValueError("Configuration cells must be 0 or 1")
        return v

    @classmethod
    def from_literal(cls, word: str) -> "Configuration":
        """Cell 0 is the leftmost character."""
        return cls(bits=tuple(int(char) for char in validate_word(word)))

    @classmethod
    def from_array(cls, cells: np.ndarray) -> "Configuration":
        return cls(bits=tuple(int(bit) for bit in np.asarray(cells).ravel()))

    @classmethod
    def zeros(cls, n: int) -> "Configuration":
        return cls(bits=(0,) * n)

    @property
    def n(self) -> int:
        return len(self.bits)

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    def to_literal(self) -> str:
        return "".join(str(bit) for bit in self.bits)

    def rotate(self, k: int) -> "Configuration":
        """Cell i of the result holds cell (i + k) mod n."""
        k %= self.n
        return Configuration(bits=self.bits[k:] + self.bits[:k])

    def reflect(self) -> "Configuration":
        return Configuration(bits=self.bits[::-1])

    def complement(self) -> "Configuration":
        return Configuration(bits=tuple(1 - bit for bit in self.bits))

    def __str__(self) -> str:
        return self.to_literal()
