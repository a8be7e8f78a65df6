from typing import List, Optional

from sqlalchemy.orm import Session

from app.db.models import RamseyRowRecord
from app.db.repositories.base import BaseRepository
from app.schemas.ramsey import RamseyRow


class RamseyRepository(BaseRepository[RamseyRowRecord, RamseyRow]):
    def get_row(self, db: Session, *, kind: str, t: int, n: int) -> Optional[RamseyRowRecord]:
        rows = self.find(db, kind=kind, t=t, n=n)
        return rows[0] if rows else None

    def get_table(self, db: Session, *, kind: str, t: int) -> List[RamseyRowRecord]:
        return sorted(self.find(db, kind=kind, t=t), key=lambda row: row.n)


ramsey_repository = RamseyRepository(RamseyRowRecord)
