"""Three-valued verdicts and the certificates that back them."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Hashable, Union

Index = Hashable


class Value(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class PeriodicWitness:
    """``index`` returns to itself after exactly ``period`` steps (minimal)."""

    index: Index
    period: int


@dataclass(frozen=True)
class AperiodicPointWitness:
    """``index`` is not periodic: after ``tail`` steps it sits on a cycle of
    length ``period`` that does not contain it."""

    index: Index
    tail: int
    period: int


@dataclass(frozen=True)
class InjectivityCollision:
    first: Index
    second: Index


@dataclass(frozen=True)
class EscapeCertificate:
    """No cycle exists: orbits outside ``[-bound, bound]`` grow strictly in
    magnitude (``bound = 0`` with a drift statement means every step moves
    strictly one way), and the core was scanned exhaustively."""

    bound: int
    statement: str


@dataclass(frozen=True)
class FiniteExhaustive:
    size: int


@dataclass(frozen=True)
class BudgetExhausted:
    budget: int
    reason: str = ""


@dataclass(frozen=True)
class AnalyticCertificate:
    statement: str


@dataclass(frozen=True)
class OrbitMeeting:
    """``phi^first_steps(a) == phi^second_steps(b) == point``."""

    first_steps: int
    second_steps: int
    point: Index


@dataclass(frozen=True)
class ContinuityViolation:
    point: Index
    statement: str


@dataclass(frozen=True)
class Conjunction:
    parts: tuple = field(default_factory=tuple)


Certificate = Union[
    PeriodicWitness,
    AperiodicPointWitness,
    InjectivityCollision,
    EscapeCertificate,
    FiniteExhaustive,
    BudgetExhausted,
    AnalyticCertificate,
    OrbitMeeting,
    ContinuityViolation,
    Conjunction,
]


@dataclass(frozen=True)
class Verdict:
    value: Value
    certificate: Certificate

    def __post_init__(self):
        if self.value is Value.UNKNOWN and not isinstance(self.certificate, BudgetExhausted):
            raise ValueError("Unknown verdicts must carry BudgetExhausted")
        if self.value is not Value.UNKNOWN and isinstance(self.certificate, BudgetExhausted):
            raise ValueError("decided verdicts cannot carry BudgetExhausted")

    @classmethod
    def yes(cls, certificate: Certificate) -> "Verdict":
        return cls(Value.YES, certificate)

    @classmethod
    def no(cls, certificate: Certificate) -> "Verdict":
        return cls(Value.NO, certificate)

    @classmethod
    def unknown(cls, budget: int, reason: str = "") -> "Verdict":
        return cls(Value.UNKNOWN, BudgetExhausted(budget, reason))

    @property
    def is_yes(self) -> bool:
        return self.value is Value.YES

    @property
    def is_no(self) -> bool:
        return self.value is Value.NO

    @property
    def is_unknown(self) -> bool:
        return self.value is Value.UNKNOWN

    def negate(self) -> "Verdict":
        """Swap Yes/No keeping the certificate (for properties stated as
        complements of one another)."""
        if self.is_unknown:
            return self
        return Verdict(Value.NO if self.is_yes else Value.YES, self.certificate)


def conjunction(*verdicts: Verdict) -> Verdict:
    """Logical AND. A No short-circuits with its own certificate."""
    for v in verdicts:
        if v.is_no:
            return v
    for v in verdicts:
        if v.is_unknown:
            return v
    return Verdict.yes(Conjunction(tuple(v.certificate for v in verdicts)))
