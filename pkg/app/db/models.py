from datetime import datetime
from sqlalchemy import Boolean, Column, DateTime, Integer, String, Text, UniqueConstraint

from app.db.base import Base


class RamseyRowRecord(Base):
    __tablename__ = "ramsey_rows"
    __table_args__ = (UniqueConstraint("kind", "t", "n", name="uq_ramsey_kind_t_n"),)

    id = Column(Integer, primary_key=True, autoincrement=True)
    kind = Column(String(1), nullable=False, index=True)  # C or D
    t = Column(Integer, nullable=False)
    n = Column(Integer, nullable=False)
    threshold = Column(Integer, nullable=False)
    exhaustive = Column(Boolean, default=True)
    classes = Column(Integer, default=0)
    free_classes = Column(Integer, default=0)
    witness = Column(Text, nullable=False)
    witness_path = Column(String, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)


class ExtremalRecordRow(Base):
    __tablename__ = "extremal_records"
    __table_args__ = (UniqueConstraint("n", "a", "b", name="uq_extremal_n_a_b"),)

    id = Column(Integer, primary_key=True, autoincrement=True)
    n = Column(Integer, nullable=False)
    a = Column(Integer, nullable=False)
    b = Column(Integer, nullable=False)
    edge_count = Column(Integer, nullable=False)
    exhaustive = Column(Boolean, default=True)
    canonical_forms = Column(Integer, default=0)
    witness = Column(Text, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)
