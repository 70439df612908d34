from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Kind(enum.Enum):
    MIN_DEGREE = "minked"
    K_CONNECTIVITY = "kconn"
    K_ROBUSTNESS = "krobust"
    HAMILTON_CYCLE = "ham"
    PERFECT_MATCHING = "pm"

    @property
    def takes_k(self) -> bool:
        return self in (Kind.MIN_DEGREE, Kind.K_CONNECTIVITY, Kind.K_ROBUSTNESS)


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class PropertySpec:
    """A property to decide, spelled ``minked:k``, ``kconn:k``, ``krobust:k``,
    ``ham`` or ``pm`` on the command line and in CSV output."""

    kind: Kind
    k: int | None = None

    def __post_init__(self):
        if self.kind.takes_k:
            if self.k is None or int(self.k) != self.k or self.k < 1:
                raise ValueError(f"{self.kind.value} needs an integer k >= 1, got {self.k!r}")
        elif self.k is not None:
            raise ValueError(f"{self.kind.value} does not take k")

    @classmethod
    def parse(cls, text: str) -> "PropertySpec":
        name, _, k = text.strip().partition(":")
        try:
            kind = Kind(name.lower())
        except ValueError:
            raise ValueError(f"unknown property {name!r}; expected one of "
                             + ", ".join(k.value for k in Kind)) from None
        if kind.takes_k:
            if not k:
                raise ValueError(f"property {name!r} needs a k, e.g. {name}:2")
            try:
                return cls(kind, int(k))
            except ValueError:
                raise ValueError(f"bad k in property {text!r}") from None
        if k:
            raise ValueError(f"property {name!r} does not take k")
        return cls(kind)

    def __str__(self):
        return f"{self.kind.value}:{self.k}" if self.kind.takes_k else self.kind.value

    @classmethod
    def min_degree(cls, k: int) -> "PropertySpec":
        return cls(Kind.MIN_DEGREE, k)

    @classmethod
    def kconn(cls, k: int) -> "PropertySpec":
        return cls(Kind.K_CONNECTIVITY, k)

    @classmethod
    def krobust(cls, k: int) -> "PropertySpec":
        return cls(Kind.K_ROBUSTNESS, k)

    @classmethod
    def hamilton(cls) -> "PropertySpec":
        return cls(Kind.HAMILTON_CYCLE)

    @classmethod
    def matching(cls) -> "PropertySpec":
        return cls(Kind.PERFECT_MATCHING)


@dataclass(frozen=True)
class Budget:
    """Deterministic work allowance for the exponential checkers.

    One unit is one node expansion (Hamilton search) or one subset
    evaluation (robustness search).
    """

    max_work: int = 2_000_000

    def __post_init__(self):
        if self.max_work <= 0:
            raise ValueError("budget must be positive")


class WorkCounter:
    """Per-call scratch counter drawn against a Budget."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, units: int = 1) -> bool:
        """Record work; False once the allowance is exhausted."""
        self.used += units
        return self.used <= self.limit

    @property
    def remaining(self) -> int:
        return max(0, self.limit - self.used)

    @property
    def exhausted(self) -> bool:
        return self.used > self.limit


@dataclass(frozen=True)
class CheckOutcome:
    verdict: Verdict
    certificate: dict[str, Any] | None = None
    work: int = 0

    @property
    def decisive(self) -> bool:
        return self.verdict is not Verdict.UNKNOWN

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "certificate": self.certificate, "work": self.work}

    @classmethod
    def yes(cls, certificate=None, work=0) -> "CheckOutcome":
        return cls(Verdict.YES, certificate, work)

    @classmethod
    def no(cls, certificate=None, work=0) -> "CheckOutcome":
        return cls(Verdict.NO, certificate, work)

    @classmethod
    def unknown(cls, work=0, certificate=None) -> "CheckOutcome":
        return cls(Verdict.UNKNOWN, certificate, work)
