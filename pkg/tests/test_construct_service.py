from fractions import Fraction

import pytest

from app.core.exceptions import SizeError
from app.schemas.farness import fraction_text
from app.schemas.graphs import BipartiteGraph, Colour
from app.services.construct_service import construct_service, log_bound
from app.services.detect_service import detect_service
from app.services.extremal_service import extremal_service
from app.services.farness_service import farness_service
from tests.oracles import colouring_has_pattern, colouring_has_pattern_by_neighbourhoods, tournament_has_pattern

MATCHING = BipartiteGraph(a_size=3, b_size=3, edges=frozenset({(0, 0), (1, 1), (2, 2)}))


@pytest.mark.parametrize("n", range(6, 13))
def test_star_colouring(n):
    colouring = construct_service.star_colouring(n)
    assert colouring.red_count == n - 1
    report = construct_service.verify_star(n)
    assert report.verified, report.failed_checks
    assert report.delta == fraction_text(Fraction(n - 1, n * n))


def test_star_colouring_matches_enumeration():
    assert not colouring_has_pattern(construct_service.star_colouring(7), 2)
    with pytest.raises(SizeError):
        construct_service.star_colouring(1)


def test_coltight_colouring_from_extremal_witness():
    h, record = construct_service.coltight_instance(7, 3, seed=0)
    assert record.exhaustive
    assert h.edge_count * 2 >= record.edge_count - 1
    colouring = construct_service.coltight_colouring(h)
    assert colouring.colour_graph(Colour.RED).edge_count == h.edge_count
    report = construct_service.verify_coltight(h, 3)
    assert report.verified, report.failed_checks
    assert report.red_equals_h and report.red_bipartite
    assert not colouring_has_pattern(colouring, 3)


@pytest.mark.slow
@pytest.mark.parametrize("n", [8, 9, 10])
def test_coltight_from_the_exhaustive_k33_free_witness(n):
    h, record = construct_service.coltight_instance(n, 3, budget=50_000_000)
    assert record.exhaustive
    colouring = construct_service.coltight_colouring(h)
    report = construct_service.verify_coltight(h, 3)
    assert report.verified, report.failed_checks
    assert not colouring_has_pattern_by_neighbourhoods(colouring, 3)
    assert Fraction(report.min_colour_count) >= Fraction(record.edge_count - 1, 2)


def test_coltight_instance_uses_the_cache(db_session):
    first, _ = construct_service.coltight_instance(6, 3, session=db_session)
    second, _ = construct_service.coltight_instance(6, 3, session=db_session)
    assert first == second


def test_tourtight_on_a_matching():
    tournament, ordering = construct_service.tourtight_tournament(MATCHING, 2)
    assert ordering.perm == tuple(range(6))
    assert farness_service.backward_edges(tournament, ordering) == [(3, 0), (4, 1), (5, 2)]
    assert not tournament_has_pattern(tournament, 2)
    report = construct_service.verify_tourtight(MATCHING, 2)
    assert report.verified, report.failed_checks
    assert report.backward_count == 3
    assert report.fas_exact is not None and report.fas_exact >= 1


def test_tourtight_reports_a_dense_h():
    complete = BipartiteGraph(a_size=3, b_size=3, edges=frozenset((i, j) for i in range(3) for j in range(3)))
    report = construct_service.verify_tourtight(complete, 2)
    assert not report.h_biclique_free
    assert "h_biclique_free" in report.failed_checks


@pytest.mark.slow
def test_tourtight_on_the_incidence_graph():
    report = construct_service.verify_tourtight(extremal_service.incidence_bipartite(2), 3)
    assert report.verified, report.failed_checks
    assert report.backward_count == 21


def test_d2_sizes_and_levels():
    assert [construct_service.d2_recursive(k).n for k in range(4)] == [3, 7, 15, 31]
    assert construct_service.is_strongly_connected(construct_service.d2_recursive(3))
    with pytest.raises(SizeError):
        construct_service.d2_recursive(-1)


def test_d2_depth_one():
    tournament = construct_service.d2_recursive(1)
    assert not detect_service.find_unavoidable_tournament(tournament, 2).found
    report = construct_service.verify_d2(1)
    assert report.verified, report.failed_checks
    assert report.fas_exact == 5
    assert report.levels[1].log_bound == 4
    assert report.levels[1].recursion_bound == 4


def test_d2_depth_two():
    report = construct_service.verify_d2(2)
    assert report.verified, report.failed_checks
    assert report.levels[2].fas_exact >= 14


def test_d2_above_the_cap_skips_exact_values():
    report = construct_service.verify_d2(1, cap=5)
    assert report.fas_exact is None
    assert report.levels[0].fas_exact == 1


def test_log_bound():
    assert log_bound(1) == 0
    assert log_bound(7) == 4
    assert log_bound(15) == 12


def test_polarity_and_zarankiewicz_reports():
    polarity = construct_service.verify_polarity(2)
    assert polarity.verified
    assert (polarity.n, polarity.edge_count, polarity.expected_edges) == (7, 9, 9)
    record = extremal_service.zarankiewicz_extremal(5, 2, 2)
    report = construct_service.verify_zarankiewicz(record)
    assert report.verified
    assert report.edge_count == 6 and len(report.edges) == 6
