from enum import Enum
from typing import List, Optional

from pydantic import BaseModel


class RamseyKind(str, Enum):
    COLOURING = "C"
    TOURNAMENT = "D"


class RamseyRow(BaseModel):
    """Largest farness numerator m*(n) of an n-vertex instance avoiding the order-t pattern.

    `witness` is the instance in core text format; `classes` counts the
    isomorphism classes enumerated and `free_classes` those avoiding the pattern.
    """

    kind: RamseyKind
    t: int
    n: int
    threshold: int
    delta: str
    exhaustive: bool
    classes: int = 0
    free_classes: int = 0
    witness: str
    witness_path: Optional[str] = None
    verified: bool = False


class RamseyTable(BaseModel):
    kind: RamseyKind
    t: int
    rows: List[RamseyRow] = []
    # slope of log(m*(n) / n^2) against log n; None with fewer than two positive rows
    fitted_exponent: Optional[float] = None


class MinerResult(BaseModel):
    kind: RamseyKind
    t: int
    n: int
    target: Optional[int] = None
    found: bool
    best_value: int
    steps: int
    accepted: int
    near_misses: int
    witness: Optional[str] = None
    witness_path: Optional[str] = None
