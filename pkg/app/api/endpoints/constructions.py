from typing import Optional

from fastapi import APIRouter, Depends, Query
from fastapi.concurrency import run_in_threadpool
from sqlalchemy.orm import Session

from app.core.dependencies import get_cache, http_error
from app.core.exceptions import PatternsError, PreconditionError
from app.schemas.documents import ConstructDocument
from app.services.construct_service import construct_service
from app.services.extremal_service import extremal_service

router = APIRouter()

CONSTRUCTIONS = ("coltight", "tourtight", "star", "d2rec", "polarity", "zarankiewicz")


def _build(
    name: str,
    t: int,
    n: Optional[int],
    q: int,
    depth: int,
    a: int,
    b: int,
    seed: int,
    db: Optional[Session],
) -> ConstructDocument:
    if name == "coltight":
        if n is None:
            raise PreconditionError("coltight needs n")
        h, _ = construct_service.coltight_instance(n, t, seed, session=db)
        report = construct_service.verify_coltight(h, t)
        parameters = {"t": t, "n": n, "seed": seed}
    elif name == "tourtight":
        report = construct_service.verify_tourtight(extremal_service.incidence_bipartite(q), t)
        parameters = {"t": t, "q": q}
    elif name == "star":
        if n is None:
            raise PreconditionError("star needs n")
        report = construct_service.verify_star(n, t)
        parameters = {"n": n, "t": t}
    elif name == "d2rec":
        report = construct_service.verify_d2(depth)
        parameters = {"depth": depth}
    elif name == "polarity":
        report = construct_service.verify_polarity(q)
        parameters = {"q": q}
    elif name == "zarankiewicz":
        if n is None:
            raise PreconditionError("zarankiewicz needs n")
        record = extremal_service.zarankiewicz_extremal(n, a, b, seed=seed, session=db)
        report = construct_service.verify_zarankiewicz(record)
        parameters = {"n": n, "a": a, "b": b}
    else:
        raise PreconditionError(f"unknown construction {name!r}; expected one of {list(CONSTRUCTIONS)}")
    return ConstructDocument(construction=name, report=report, parameters=parameters)


@router.get("/{name}", response_model=ConstructDocument)
async def get_construction(
    name: str,
    t: int = Query(2, ge=1),
    n: Optional[int] = Query(None, ge=1),
    q: int = Query(2, ge=2),
    depth: int = Query(0, ge=0),
    a: int = Query(2, ge=1),
    b: int = Query(2, ge=1),
    seed: int = 0,
    db: Optional[Session] = Depends(get_cache),
):
    """
    Build a construction and return its verification report
    """
    try:
        return await run_in_threadpool(_build, name, t, n, q, depth, a, b, seed, db)
    except PatternsError as exc:
        raise http_error(exc)
