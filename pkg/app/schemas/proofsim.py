from enum import Enum
from typing import List, Optional

from pydantic import BaseModel

from app.schemas.farness import Interval


class LongStepBranch(str, Enum):
    LONG_EDGES = "long-edges"
    DENSER_SUB = "denser-sub"
    NO_CERTIFICATE = "no-certificate"
    TOO_SMALL = "too-small"


class LongLemmaCertificate(BaseModel):
    """Outcome of one dichotomy step on (T, sigma, alpha).

    long-edges: `edges` are backward edges (u, v), u -> v with v earlier, each of
    length >= long_length, at least long_needed of them.
    denser-sub: `interval` has segment_length positions and `sub_backward` >=
    sub_target backward edges inside it.
    """

    branch: LongStepBranch
    n: int
    alpha: str
    long_length: int
    long_needed: int
    long_found: int
    edges: List[List[int]] = []
    segment_length: int = 0
    sub_target: int = 0
    interval: Optional[Interval] = None
    sub_backward: Optional[int] = None
    segment: Optional[str] = None
    best_window: Optional[int] = None


class TraceStep(BaseModel):
    index: int
    n: int
    alpha: str
    ordering_kind: Optional[str] = None
    backward_count: Optional[int] = None
    branch: LongStepBranch
    interval: Optional[Interval] = None


class IterationTrace(BaseModel):
    alpha0: str
    r: int
    steps: List[TraceStep] = []
    outcome: LongStepBranch
    final_vertices: List[int] = []
    final_ordering: List[int] = []


class DensityBranch(str, Enum):
    SPLIT = "split"
    SHRINK = "shrink"
    NO_CERTIFICATE = "no-certificate"


class DensityCertificate(BaseModel):
    branch: DensityBranch
    backward_total: int
    epsilon: str
    split_needed: int
    shrink_needed: int
    i1: Optional[Interval] = None
    i2: Optional[Interval] = None
    j1: Optional[Interval] = None
    j2: Optional[Interval] = None
    count_11: int = 0
    count_22: int = 0
    count_12: int = 0
    count_21: int = 0
    shrink_i: Optional[Interval] = None
    shrink_j: Optional[Interval] = None
    shrink_count: Optional[int] = None
    reason: Optional[str] = None


class DependentChoiceResult(BaseModel):
    found: bool
    k: int
    t: int
    vertices: List[int] = []
    attempts: int = 0
    sample_size: int
