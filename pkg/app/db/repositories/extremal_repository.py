from typing import Optional

from sqlalchemy.orm import Session

from app.db.models import ExtremalRecordRow
from app.db.repositories.base import BaseRepository
from app.schemas.extremal import ExtremalRecord


class ExtremalRepository(BaseRepository[ExtremalRecordRow, ExtremalRecord]):
    def get_record(self, db: Session, *, n: int, a: int, b: int) -> Optional[ExtremalRecordRow]:
        rows = self.find(db, n=n, a=a, b=b)
        return rows[0] if rows else None


extremal_repository = ExtremalRepository(ExtremalRecordRow)
