from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field

from app.core.config import settings
from app.schemas.construct import (
    ColtightReport,
    D2Report,
    PolarityReport,
    StarReport,
    TourtightReport,
    ZarankiewiczReport,
)
from app.schemas.farness import LocalMinReport
from app.schemas.proofsim import DensityCertificate, DependentChoiceResult, IterationTrace, LongLemmaCertificate
from app.schemas.ramsey import MinerResult, RamseyTable
from app.schemas.witness import PatternWitness


class Document(BaseModel):
    schema_version: int = Field(default_factory=lambda: settings.SCHEMA_VERSION)
    command: str


class DetectDocument(Document):
    command: str = "detect"
    kind: str
    t: int
    n: int
    found: bool
    witness: Optional[PatternWitness] = None
    nodes_explored: int
    verified: bool = True
    failed_checks: List[str] = []


class FarnessDocument(Document):
    command: str = "farness"
    numerator: int
    n: int
    delta: str
    kind: str
    ordering: Optional[List[int]] = None
    red_count: Optional[int] = None
    blue_count: Optional[int] = None
    local_min: Optional[LocalMinReport] = None
    verified: bool = True


ConstructReport = Union[ColtightReport, TourtightReport, StarReport, D2Report, PolarityReport, ZarankiewiczReport]


class ConstructDocument(Document):
    command: str = "construct"
    construction: str
    report: ConstructReport
    parameters: Dict[str, Any] = {}

    @property
    def verified(self) -> bool:
        return self.report.verified


LemmaResult = Union[LongLemmaCertificate, IterationTrace, DensityCertificate, DependentChoiceResult]


class LemmaDocument(Document):
    command: str = "lemma"
    lemma: str
    result: LemmaResult
    verified: bool = True
    failed_checks: List[str] = []


class RamseyDocument(Document):
    command: str = "ramsey"
    mode: str
    result: Union[RamseyTable, MinerResult]
    verified: bool = True


class SchemaDocument(Document):
    command: str = "schema"
    directory: str
    files: List[str] = []


class ErrorDocument(Document):
    command: str
    error: str
    message: str
    details: Dict[str, Any] = {}


DOCUMENTS = {
    "detect": DetectDocument,
    "farness": FarnessDocument,
    "construct": ConstructDocument,
    "lemma": LemmaDocument,
    "ramsey": RamseyDocument,
    "schema": SchemaDocument,
    "error": ErrorDocument,
}
