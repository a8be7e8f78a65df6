from typing import Any, Dict, Generic, List, Optional, Type, TypeVar, Union

from fastapi.encoders import jsonable_encoder
from pydantic import BaseModel
from sqlalchemy import select
from sqlalchemy.orm import Session

from app.db.base import Base

ModelType = TypeVar("ModelType", bound=Base)
ResultType = TypeVar("ResultType", bound=BaseModel)


class BaseRepository(Generic[ModelType, ResultType]):
    """Cache table of exhaustive results, one row per lookup key.

    Results are pydantic documents; only the fields that have a column are stored.
    """

    def __init__(self, model: Type[ModelType]):
        self.model = model

    @property
    def columns(self) -> set:
        return set(self.model.__table__.columns.keys())

    def get(self, db: Session, id: Any) -> Optional[ModelType]:
        return db.get(self.model, id)

    def get_multi(self, db: Session, *, skip: int = 0, limit: int = 100) -> List[ModelType]:
        return list(db.scalars(select(self.model).order_by(self.model.id).offset(skip).limit(limit)))

    def find(self, db: Session, **keys: Any) -> List[ModelType]:
        """Rows matching every key, in insertion order."""
        query = select(self.model).filter_by(**keys).order_by(self.model.id)
        return list(db.scalars(query))

    def create(self, db: Session, *, obj_in: Union[ResultType, Dict[str, Any]]) -> ModelType:
        data = obj_in if isinstance(obj_in, dict) else jsonable_encoder(obj_in)
        db_obj = self.model(**{k: v for k, v in data.items() if k in self.columns and k != "id"})
        db.add(db_obj)
        db.commit()
        db.refresh(db_obj)
        return db_obj

    def remove(self, db: Session, *, id: Any) -> Optional[ModelType]:
        """Drop a row that failed re-verification; None when already gone."""
        obj = db.get(self.model, id)
        if obj is not None:
            db.delete(obj)
            db.commit()
        return obj
