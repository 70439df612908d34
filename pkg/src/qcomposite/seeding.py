"""Counter-addressable random streams.

Every random object in the package is drawn from a stream identified by
``(base, context, point, sample)``.  The four labels are hashed by numpy's
``SeedSequence`` and fed to a ``Philox`` counter-based bit generator, so any
sample of any sweep point can be regenerated on its own, in any order and
on any worker, without replaying the streams before it.

Generator: ``numpy.random.Generator(numpy.random.Philox(SeedSequence(
[base_lo, base_hi, crc32(context), point, sample])))``.  Changing this line
changes every seeded result in the package.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

_MASK32 = 0xFFFFFFFF
_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class RngSeed:
    """Address of one random stream."""

    base: int
    context: str = "sample"
    point: int = 0
    sample: int = 0

    def __post_init__(self):
        if not 0 <= self.base <= _MASK64:
            raise ValueError(f"seed base must be a 64-bit unsigned integer, got {self.base}")
        if self.point < 0 or self.sample < 0:
            raise ValueError("stream labels must be non-negative")

    def entropy(self) -> list[int]:
        return [
            self.base & _MASK32,
            self.base >> 32,
            zlib.crc32(self.context.encode("utf-8")),
            self.point,
            self.sample,
        ]

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(self.entropy())))

    def child(self, context: str | None = None, point: int | None = None,
              sample: int | None = None) -> "RngSeed":
        return RngSeed(
            self.base,
            self.context if context is None else context,
            self.point if point is None else point,
            self.sample if sample is None else sample,
        )

    def to_dict(self) -> dict:
        return {"base": self.base, "context": self.context,
                "point": self.point, "sample": self.sample}

    @classmethod
    def from_dict(cls, d: dict) -> "RngSeed":
        return cls(int(d["base"]), str(d.get("context", "sample")),
                   int(d.get("point", 0)), int(d.get("sample", 0)))


def as_seed(seed: RngSeed | int, context: str = "sample") -> RngSeed:
    """Accept a bare integer wherever a seed is expected."""
    if isinstance(seed, RngSeed):
        return seed
    return RngSeed(int(seed), context)
