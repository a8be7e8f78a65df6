import pytest
from hypothesis import given
import hypothesis.strategies as st

from app.services.detect_service import detect_service
from app.services.generator_service import generator_service


@given(st.integers(min_value=1, max_value=30))
def test_transitive_tournament_is_transitive(n):
    tournament = generator_service.transitive_tournament(n)
    assert tournament.is_transitive()
    assert tournament.scores == tuple(range(n - 1, -1, -1))


@pytest.mark.parametrize("t", [1, 2, 3])
def test_cyclic_blowup_hosts_itself(t):
    tournament = generator_service.cyclic_blowup(t)
    assert tournament.n == 3 * t
    result = detect_service.find_unavoidable_tournament(tournament, t)
    assert result.found
    assert detect_service.verify_witness(tournament, result.witness) == []


def test_cyclic_triangle():
    triangle = generator_service.cyclic_triangle()
    assert triangle.edges() == [(0, 1), (1, 2), (2, 0)]
    assert not triangle.is_transitive()


@given(st.integers(min_value=2, max_value=15), st.integers(min_value=0, max_value=2**32))
def test_random_generators_are_seeded(n, seed):
    assert generator_service.random_tournament(n, seed) == generator_service.random_tournament(n, seed)
    assert generator_service.random_colouring(n, seed) == generator_service.random_colouring(n, seed)
    assert generator_service.random_ordering(n, seed) == generator_service.random_ordering(n, seed)


def test_random_colouring_extremes():
    assert generator_service.random_colouring(8, 1, p=0.0).red_count == 0
    assert generator_service.random_colouring(8, 1, p=1.0).blue_count == 0
