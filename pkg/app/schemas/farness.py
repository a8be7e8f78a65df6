from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import Field, model_validator

from app.schemas.graphs import FrozenModel, Ordering


class FarnessKind(str, Enum):
    EXACT = "exact"
    HEURISTIC = "heuristic-upper-bound"


def fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class FarnessReport(FrozenModel):
    """delta = numerator / n^2.

    Colourings carry red/blue counts (numerator = the smaller one);
    tournaments carry the certificate ordering whose backward-edge count is the numerator.
    """

    numerator: int = Field(..., ge=0)
    n: int = Field(..., ge=1)
    kind: FarnessKind
    ordering: Optional[Tuple[int, ...]] = None
    red_count: Optional[int] = None
    blue_count: Optional[int] = None

    @property
    def delta(self) -> Fraction:
        return Fraction(self.numerator, self.n * self.n)

    @property
    def delta_text(self) -> str:
        return fraction_text(self.delta)

    def certificate_ordering(self) -> Ordering:
        if self.ordering is None:
            raise ValueError("report carries no ordering")
        return Ordering(perm=self.ordering)


class Interval(FrozenModel):
    """Positions start..end (1-based, inclusive) of an ordering."""

    start: int = Field(..., ge=1)
    end: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_bounds(self) -> "Interval":
        if self.end < self.start:
            raise ValueError(f"interval [{self.start}, {self.end}] is empty")
        return self

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def vertices(self, ordering: Ordering) -> Tuple[int, ...]:
        if self.end > ordering.n:
            raise ValueError(f"interval [{self.start}, {self.end}] exceeds {ordering.n} positions")
        return ordering.perm[self.start - 1 : self.end]

    def precedes(self, other: "Interval") -> bool:
        return self.end < other.start


class LocalMinViolation(FrozenModel):
    """Condition 1: v_i has fewer than (j-i)/2 out-neighbours in [i+1, j].
    Condition 2: v_j has fewer than (j-i)/2 in-neighbours in [i, j-1].
    Condition 3: the ordering restricted to [i, j] is not optimal for T[[i, j]]."""

    i: int
    j: int
    condition: int = Field(..., ge=1, le=3)


class LocalMinReport(FrozenModel):
    n: int
    violations: Tuple[LocalMinViolation, ...] = ()
    checked_intervals: Tuple[Tuple[int, int], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def pairs(self, condition: Optional[int] = None) -> List[Tuple[int, int]]:
        return [(v.i, v.j) for v in self.violations if condition is None or v.condition == condition]
