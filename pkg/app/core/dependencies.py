from typing import Iterator, Optional

from fastapi import HTTPException, Query
from sqlalchemy.orm import Session

from app.core.exceptions import PatternsError
from app.db.base import get_db


def http_error(exc: PatternsError) -> HTTPException:
    return HTTPException(status_code=exc.status_code, detail={"error": exc.error, "message": exc.message, **exc.details()})


def get_cache(cache: bool = Query(False, description="serve/store exhaustive results")) -> Iterator[Optional[Session]]:
    yield from get_db(cache)
