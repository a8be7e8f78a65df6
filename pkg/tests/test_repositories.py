from app.db.base import cache_session, get_db
from app.db.repositories.extremal_repository import extremal_repository
from app.db.repositories.ramsey_repository import ramsey_repository
from app.schemas.ramsey import RamseyKind, RamseyRow


def test_create_drops_fields_without_columns(db_session):
    row = RamseyRow(
        kind=RamseyKind.TOURNAMENT, t=2, n=3, threshold=1, delta="1/9", exhaustive=True, witness="tournament 3\n", verified=True
    )
    record = ramsey_repository.create(db_session, obj_in=row)
    assert record.id is not None
    assert record.kind == "D"
    assert not hasattr(record, "delta")
    assert ramsey_repository.get(db_session, record.id).threshold == 1


def test_table_is_ordered_by_n(db_session):
    for n in (5, 3, 4):
        ramsey_repository.create(
            db_session, obj_in={"kind": "C", "t": 2, "n": n, "threshold": n, "witness": ""}
        )
    ramsey_repository.create(db_session, obj_in={"kind": "D", "t": 2, "n": 3, "threshold": 1, "witness": ""})
    assert [r.n for r in ramsey_repository.get_table(db_session, kind="C", t=2)] == [3, 4, 5]
    assert ramsey_repository.get_row(db_session, kind="D", t=2, n=4) is None
    assert len(ramsey_repository.get_multi(db_session, limit=2)) == 2


def test_remove(db_session):
    record = extremal_repository.create(
        db_session, obj_in={"n": 4, "a": 2, "b": 2, "edge_count": 4, "witness": "graph 4\n"}
    )
    assert extremal_repository.get_record(db_session, n=4, a=2, b=2) is not None
    assert extremal_repository.remove(db_session, id=record.id) is not None
    assert extremal_repository.get_record(db_session, n=4, a=2, b=2) is None
    assert extremal_repository.remove(db_session, id=record.id) is None


def test_find_matches_every_key(db_session):
    for t in (2, 3):
        ramsey_repository.create(db_session, obj_in={"kind": "C", "t": t, "n": 6, "threshold": 5, "witness": ""})
    assert [r.t for r in ramsey_repository.find(db_session, kind="C", n=6)] == [2, 3]
    assert ramsey_repository.find(db_session, kind="C", t=3, n=7) == []


def test_disabled_cache_yields_no_session():
    assert list(get_db(False)) == [None]
    with cache_session(False) as db:
        assert db is None
