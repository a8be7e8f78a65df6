from contextlib import contextmanager
from typing import Iterator, Optional

from sqlalchemy import create_engine
from sqlalchemy.ext.declarative import declarative_base
from sqlalchemy.orm import Session, sessionmaker

from app.core.config import settings

# SQLite connections are shared with the worker threads of the exact searches
connect_args = {"check_same_thread": False} if settings.DATABASE_URI.startswith("sqlite") else {}

engine = create_engine(settings.DATABASE_URI, connect_args=connect_args)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()


def init_db() -> None:
    """Create the Ramsey row and extremal record tables."""
    from app.db import models  # noqa: F401

    Base.metadata.create_all(bind=engine)


def get_db(enabled: bool = True) -> Iterator[Optional[Session]]:
    """Yield a result-cache session, or None when caching is off."""
    if not enabled:
        yield None
        return
    init_db()
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


cache_session = contextmanager(get_db)
