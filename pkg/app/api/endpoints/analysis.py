from typing import Optional

from fastapi import APIRouter
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel, Field

from app.core.dependencies import http_error
from app.core.exceptions import PatternsError, PreconditionError
from app.schemas.documents import DetectDocument, FarnessDocument
from app.schemas.graphs import Tournament, TwoColouring
from app.services.codec_service import codec_service
from app.services.detect_service import detect_service
from app.services.farness_service import farness_service

router = APIRouter()


class DetectRequest(BaseModel):
    instance: str = Field(..., description="colouring or tournament in the core text format")
    t: int = Field(..., ge=1)
    budget: Optional[int] = Field(None, ge=1)


class FarnessRequest(BaseModel):
    instance: str
    exact: Optional[bool] = Field(None, description="true: exact DP, false: heuristic, unset: by cap")
    seed: int = 0
    restarts: Optional[int] = Field(None, ge=1)


def _detect(request: DetectRequest) -> DetectDocument:
    obj = codec_service.decode(request.instance)
    if not isinstance(obj, (TwoColouring, Tournament)):
        raise PreconditionError("detect needs a colouring or a tournament")
    result = detect_service.find_unavoidable(obj, request.t, request.budget)
    failures = detect_service.verify_witness(obj, result.witness) if result.witness else []
    return DetectDocument(
        kind="tournament" if isinstance(obj, Tournament) else "colouring",
        t=request.t,
        n=obj.n,
        found=result.found,
        witness=result.witness,
        nodes_explored=result.nodes_explored,
        verified=not failures,
        failed_checks=failures,
    )


def _farness(request: FarnessRequest) -> FarnessDocument:
    obj = codec_service.decode(request.instance)
    if isinstance(obj, TwoColouring):
        report = farness_service.colour_farness(obj)
        return FarnessDocument(
            numerator=report.numerator,
            n=report.n,
            delta=report.delta_text,
            kind=report.kind.value,
            red_count=report.red_count,
            blue_count=report.blue_count,
        )
    if not isinstance(obj, Tournament):
        raise PreconditionError("farness needs a colouring or a tournament")
    if request.exact is True:
        report = farness_service.min_backward_edges_exact(obj)
    elif request.exact is False:
        report = farness_service.min_backward_edges_heuristic(obj, request.seed, request.restarts)
    else:
        report = farness_service.minimal_ordering(obj, request.seed, request.restarts)
    ordering = report.certificate_ordering()
    local_min = farness_service.verify_local_min(obj, ordering)
    return FarnessDocument(
        numerator=report.numerator,
        n=report.n,
        delta=report.delta_text,
        kind=report.kind.value,
        ordering=list(ordering.perm),
        local_min=local_min,
        verified=local_min.ok,
    )


@router.post("/detect", response_model=DetectDocument)
async def detect(request: DetectRequest):
    """
    Find an unavoidable pattern of order t
    """
    try:
        return await run_in_threadpool(_detect, request)
    except PatternsError as exc:
        raise http_error(exc)


@router.post("/farness", response_model=FarnessDocument)
async def farness(request: FarnessRequest):
    """
    Farness numerator, delta and certificate ordering
    """
    try:
        return await run_in_threadpool(_farness, request)
    except PatternsError as exc:
        raise http_error(exc)
