from itertools import combinations

import pytest

from app.core.exceptions import PreconditionError, SizeError
from app.db.repositories.extremal_repository import extremal_repository
from app.schemas.graphs import Graph
from app.services.codec_service import codec_service
from app.services.extremal_service import extremal_service, projective_points
from tests.oracles import brute_ex, has_biclique


@pytest.mark.parametrize("n, expected", [(4, 4), (5, 6), (6, 7)])
def test_c4_free_extremal_numbers(n, expected):
    record = extremal_service.zarankiewicz_extremal(n, 2, 2)
    assert record.exhaustive
    assert record.edge_count == expected
    assert not has_biclique(record.graph, 2, 2)
    assert extremal_service.verify_record(record) == []


@pytest.mark.slow
def test_c4_free_extremal_seven():
    assert extremal_service.zarankiewicz_extremal(7, 2, 2).edge_count == 9


@pytest.mark.slow
def test_k33_free_records_are_exhaustive_and_saturated():
    counts = []
    for n in range(6, 11):
        record = extremal_service.zarankiewicz_extremal(n, 3, 3, budget=50_000_000)
        assert record.exhaustive
        graph = record.graph
        assert not has_biclique(graph, 3, 3)
        for pair in combinations(range(n), 2):
            if pair not in graph.edges:
                assert has_biclique(Graph.from_pairs(n, graph.edges | {pair}), 3, 3)
        counts.append(record.edge_count)
    assert counts == sorted(counts)


@pytest.mark.parametrize("n, a, b", [(5, 1, 2), (5, 2, 3), (6, 1, 3)])
def test_matches_brute_force(n, a, b):
    assert extremal_service.zarankiewicz_extremal(n, a, b).edge_count == brute_ex(n, a, b)


def test_small_n_is_complete():
    record = extremal_service.zarankiewicz_extremal(3, 2, 2)
    assert record.edge_count == 3
    assert record.exhaustive


def test_parameter_errors():
    with pytest.raises(SizeError):
        extremal_service.zarankiewicz_extremal(5, 3, 2)
    with pytest.raises(SizeError):
        extremal_service.zarankiewicz_extremal(0, 2, 2)


def test_budget_exhaustion_falls_back_to_greedy():
    record = extremal_service.zarankiewicz_extremal(9, 2, 2, budget=10, seed=3)
    assert not record.exhaustive
    assert extremal_service.is_biclique_free(record.graph, 2, 2)


def test_cache_roundtrip(db_session):
    first = extremal_service.zarankiewicz_extremal(5, 2, 2, session=db_session)
    row = extremal_repository.get_record(db_session, n=5, a=2, b=2)
    assert row is not None and row.edge_count == 6
    second = extremal_service.zarankiewicz_extremal(5, 2, 2, session=db_session)
    assert second.graph == first.graph
    assert len(extremal_repository.get_multi(db_session)) == 1


def test_corrupted_cache_row_is_dropped(db_session):
    complete = Graph.from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    extremal_repository.create(
        db_session,
        obj_in={"n": 4, "a": 2, "b": 2, "edge_count": 6, "exhaustive": True, "canonical_forms": 0,
                "witness": codec_service.encode(complete)},
    )
    record = extremal_service.zarankiewicz_extremal(4, 2, 2, session=db_session)
    assert record.edge_count == 4
    assert extremal_repository.get_record(db_session, n=4, a=2, b=2).edge_count == 4


def test_polarity_graph():
    graph = extremal_service.polarity_graph(2)
    assert (graph.n, graph.edge_count) == (7, 9)
    assert extremal_service.is_biclique_free(graph, 2, 2)
    assert len(projective_points(3)) == 13
    assert extremal_service.polarity_graph(3).edge_count == 3 * 16 // 2
    with pytest.raises(PreconditionError):
        extremal_service.polarity_graph(4)


def test_incidence_graph():
    graph = extremal_service.incidence_bipartite(2)
    assert (graph.a_size, graph.b_size, graph.edge_count) == (7, 7, 21)
    assert graph.a_labels == tuple(range(7))
    assert graph.b_labels == tuple(range(7, 14))


def test_greedy_and_bipartite_half():
    graph = extremal_service.greedy_free_graph(10, 2, 2, seed=1, restarts=3)
    assert extremal_service.is_biclique_free(graph, 2, 2)
    half = extremal_service.bipartite_half(graph, seed=1)
    assert 2 * half.edge_count >= graph.edge_count
    assert half.n == graph.n


def test_remove_one_edge():
    graph = Graph.from_pairs(4, [(0, 1), (2, 3), (1, 2)])
    assert extremal_service.remove_one_edge(graph).sorted_edges() == [(0, 1), (1, 2)]
    empty = Graph(n=3)
    assert extremal_service.remove_one_edge(empty) == empty
