"""ON/OFF state vector for the eight solenoids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

N_SOLENOIDS = 8


@dataclass(frozen=True)
class ActuationPattern:
    """Eight booleans, bit i driving solenoid i; losslessly encoded as 0..255."""

    bits: tuple[bool, ...]

    def __post_init__(self) -> None:
        if len(self.bits) != N_SOLENOIDS:
            raise ValueError("pattern needs exactly 8 bits")

    @classmethod
    def all_off(cls) -> "ActuationPattern":
        return cls(bits=(False,) * N_SOLENOIDS)

    @classmethod
    def from_int(cls, code: int) -> "ActuationPattern":
        if not 0 <= code <= 255:
            raise ValueError("pattern code must be in 0..255")
        return cls(bits=tuple(bool(code >> i & 1) for i in range(N_SOLENOIDS)))

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "ActuationPattern":
        on = set(indices)
        return cls(bits=tuple(i in on for i in range(N_SOLENOIDS)))

    @property
    def code(self) -> int:
        return sum(1 << i for i, b in enumerate(self.bits) if b)

    @property
    def on_count(self) -> int:
        return sum(self.bits)

    def __iter__(self) -> Iterator[bool]:
        return iter(self.bits)
