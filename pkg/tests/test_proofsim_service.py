import random
from fractions import Fraction
from itertools import combinations

import pytest

from app.core.exceptions import PreconditionError
from app.schemas.farness import Interval
from app.schemas.graphs import BipartiteGraph, Colour, Graph, Ordering, Tournament
from app.schemas.proofsim import DensityBranch, LongStepBranch
from app.services.construct_service import construct_service
from app.services.farness_service import farness_service
from app.services.generator_service import generator_service
from app.services.proofsim_service import proofsim_service


def triangle_blocks(blocks: int) -> Tournament:
    """Blocks 3k -> 3k+1 -> 3k+2 -> 3k; lower blocks beat higher ones."""
    n = 3 * blocks
    edges = []
    for u, v in combinations(range(n), 2):
        if u // 3 == v // 3 and u % 3 == 0 and v == u + 2:
            edges.append((v, u))
        else:
            edges.append((u, v))
    return Tournament.from_edges(n, edges)


def interlaced(n: int, pairs) -> Tournament:
    return generator_service.transitive_tournament(n).with_reversed(pairs)


class TestLongStep:
    def test_long_edges_on_an_optimal_ordering(self):
        tournament = generator_service.random_tournament(12, 0)
        ordering = farness_service.min_backward_edges_exact(tournament).certificate_ordering()
        certificate = proofsim_service.long_lemma_step(tournament, ordering, Fraction(1, 10))
        assert certificate.branch is LongStepBranch.LONG_EDGES
        assert certificate.long_needed == 1
        assert proofsim_service.verify_long_step(tournament, ordering, Fraction(1, 10), certificate) == []

    def test_dense_initial_segment(self):
        tournament = triangle_blocks(40)
        ordering = Ordering.identity(120)
        certificate = proofsim_service.long_lemma_step(tournament, ordering, Fraction(1, 108))
        assert certificate.branch is LongStepBranch.DENSER_SUB
        assert (certificate.long_length, certificate.long_needed, certificate.long_found) == (3, 1, 0)
        assert (certificate.segment_length, certificate.sub_target) == (6, 2)
        assert certificate.segment == "initial"
        assert certificate.interval == Interval(start=1, end=6)
        assert certificate.sub_backward == 2
        assert proofsim_service.verify_long_step(tournament, ordering, Fraction(1, 108), certificate) == []

    def test_transitive_tournament_has_no_certificate(self):
        certificate = proofsim_service.long_lemma_step(
            generator_service.transitive_tournament(120), Ordering.identity(120), "1/108"
        )
        assert certificate.branch is LongStepBranch.NO_CERTIFICATE
        assert certificate.best_window == 0

    def test_rejects_orderings_that_are_not_locally_minimal(self):
        with pytest.raises(PreconditionError):
            proofsim_service.long_lemma_step(
                generator_service.transitive_tournament(6), Ordering.identity(6).reversed(), Fraction(1, 10)
            )

    def test_rejects_non_positive_alpha(self):
        with pytest.raises(PreconditionError):
            proofsim_service.long_lemma_step(generator_service.transitive_tournament(6), Ordering.identity(6), 0)

    def test_tourtight_ordering_gives_long_edges(self):
        matching = BipartiteGraph(a_size=3, b_size=3, edges=frozenset({(0, 0), (1, 1), (2, 2)}))
        tournament, ordering = construct_service.tourtight_tournament(matching, 2)
        alpha = Fraction(matching.edge_count, 2 * tournament.n**2)
        certificate = proofsim_service.long_lemma_step(tournament, ordering, alpha)
        assert certificate.branch is LongStepBranch.LONG_EDGES
        assert sorted(tuple(e) for e in certificate.edges) == [(3, 0), (4, 1), (5, 2)]
        assert proofsim_service.verify_long_step(tournament, ordering, alpha, certificate) == []

    @pytest.mark.slow
    def test_random_two_hundred_vertex_tournament(self):
        tournament = generator_service.random_tournament(200, 9)
        report = farness_service.min_backward_edges_heuristic(tournament, seed=0, restarts=2)
        ordering = report.certificate_ordering()
        alpha = Fraction(report.numerator, 2 * 200**2)
        certificate = proofsim_service.long_lemma_step(tournament, ordering, alpha)
        assert proofsim_service.verify_long_step(tournament, ordering, alpha, certificate) == []

    def test_verification_catches_a_tampered_certificate(self):
        tournament = triangle_blocks(40)
        ordering = Ordering.identity(120)
        certificate = proofsim_service.long_lemma_step(tournament, ordering, Fraction(1, 108))
        forged = certificate.model_copy(update={"sub_backward": 5})
        assert proofsim_service.verify_long_step(tournament, ordering, Fraction(1, 108), forged)


class TestIteration:
    def test_single_long_edge_step(self):
        tournament = generator_service.random_tournament(14, 5)
        trace = proofsim_service.long_lemma_iterate(tournament, 1, 2)
        assert trace.outcome is LongStepBranch.LONG_EDGES
        assert len(trace.steps) == 1
        assert trace.steps[0].backward_count == farness_service.exact_value(tournament)
        assert trace.final_vertices == list(range(14))
        assert sorted(trace.final_ordering) == list(range(14))

    def test_transitive_input_stops_without_certificate(self):
        trace = proofsim_service.long_lemma_iterate(generator_service.transitive_tournament(10), 1, 2)
        assert trace.outcome is LongStepBranch.NO_CERTIFICATE
        assert trace.steps[0].backward_count == 0

    def test_small_input(self):
        trace = proofsim_service.long_lemma_iterate(generator_service.transitive_tournament(5), 1, 2)
        assert trace.outcome is LongStepBranch.TOO_SMALL
        assert trace.final_ordering == list(range(5))

    def test_cyclic_blowup_alphas_grow_sixfold(self):
        trace = proofsim_service.long_lemma_iterate(generator_service.cyclic_blowup(20), 1, 2, restarts=2)
        assert 1 <= len(trace.steps) <= 2
        assert trace.outcome is LongStepBranch.LONG_EDGES
        alpha0 = Fraction(trace.alpha0)
        for step in trace.steps:
            assert Fraction(step.alpha) == alpha0 * 6**step.index

    def test_parameter_errors(self):
        tournament = generator_service.transitive_tournament(8)
        with pytest.raises(PreconditionError):
            proofsim_service.long_lemma_iterate(tournament, 1, 1)
        with pytest.raises(PreconditionError):
            proofsim_service.long_lemma_iterate(tournament, -1, 2)


class TestDensityIncrement:
    I = Interval(start=1, end=100)

    def test_split(self):
        tournament = interlaced(200, [(k - 1, 99 + k) for k in range(1, 101)])
        ordering = Ordering.identity(200)
        second = Interval(start=101, end=200)
        certificate = proofsim_service.density_increment(tournament, ordering, self.I, second, Fraction(1, 10))
        assert certificate.branch is DensityBranch.SPLIT
        assert certificate.backward_total == 100
        assert (certificate.i1, certificate.i2) == (Interval(start=1, end=50), Interval(start=51, end=100))
        assert (certificate.j1, certificate.j2) == (Interval(start=101, end=150), Interval(start=151, end=200))
        assert (certificate.count_11, certificate.count_22) == (50, 50)
        assert proofsim_service.verify_density_increment(
            tournament, ordering, self.I, second, Fraction(1, 10), certificate
        ) == []

    def test_shrink(self):
        tournament = interlaced(800, [(100 - k, 699 + k) for k in range(1, 101)])
        ordering = Ordering.identity(800)
        second = Interval(start=701, end=800)
        certificate = proofsim_service.density_increment(tournament, ordering, self.I, second, "1/10")
        assert certificate.branch is DensityBranch.SHRINK
        assert (certificate.count_11, certificate.count_21, certificate.count_12) == (0, 50, 50)
        assert certificate.shrink_i == Interval(start=1, end=50)
        assert certificate.shrink_j == Interval(start=751, end=800)
        assert certificate.shrink_count == 50
        assert proofsim_service.verify_density_increment(
            tournament, ordering, self.I, second, "1/10", certificate
        ) == []

    def test_too_few_backward_edges(self):
        tournament = interlaced(200, [(k - 1, 99 + k) for k in range(1, 51)])
        certificate = proofsim_service.density_increment(
            tournament, Ordering.identity(200), self.I, Interval(start=101, end=200), Fraction(1, 10)
        )
        assert certificate.branch is DensityBranch.NO_CERTIFICATE
        assert certificate.backward_total == 50

    @pytest.mark.parametrize(
        "second, epsilon",
        [
            (Interval(start=101, end=200), Fraction(1, 6)),
            (Interval(start=50, end=120), Fraction(1, 10)),
            (Interval(start=101, end=250), Fraction(1, 10)),
        ],
    )
    def test_preconditions(self, second, epsilon):
        with pytest.raises(PreconditionError):
            proofsim_service.density_increment(
                generator_service.transitive_tournament(200), Ordering.identity(200), self.I, second, epsilon
            )


class TestDependentChoice:
    def test_complete_graph(self):
        complete = Graph.from_pairs(10, combinations(range(10), 2))
        result = proofsim_service.dependent_random_choice(complete, 4, 2, seed=1)
        assert result.found
        assert result.attempts == 1
        assert len(result.vertices) == 4
        assert proofsim_service.verify_dependent_choice(complete, result.vertices, 4, 2) == []

    def test_empty_graph(self):
        result = proofsim_service.dependent_random_choice(Graph(n=10), 2, 2, tries=5)
        assert not result.found
        assert result.attempts == 5

    def test_no_vertices_means_no_attempts(self):
        result = proofsim_service.dependent_random_choice(Graph(n=0), 2, 2, tries=5)
        assert not result.found
        assert result.attempts == 0

    def test_dense_random_colour_class(self):
        graph = generator_service.random_colouring(60, 13, 0.8).colour_graph(Colour.RED)
        result = proofsim_service.dependent_random_choice(graph, 6, 2, seed=13)
        assert result.found
        assert len(result.vertices) == 6
        assert proofsim_service.verify_dependent_choice(graph, result.vertices, 6, 2) == []

    def test_parameter_error(self):
        with pytest.raises(PreconditionError):
            proofsim_service.dependent_random_choice(Graph(n=4), 1, 2)

    def test_verification_reports_poor_subsets(self):
        path = Graph.from_pairs(4, [(0, 1), (1, 2), (2, 3)])
        assert proofsim_service.verify_dependent_choice(path, [0, 3], 2, 2)


@pytest.mark.slow
class TestSelfVerification:
    @pytest.mark.parametrize("seed", range(100))
    def test_long_step(self, seed):
        tournament = generator_service.random_tournament(10 + seed % 5, seed)
        report = farness_service.min_backward_edges_exact(tournament)
        ordering = report.certificate_ordering()
        alpha = Fraction(max(report.numerator, 1), 2 * tournament.n**2)
        certificate = proofsim_service.long_lemma_step(tournament, ordering, alpha)
        assert proofsim_service.verify_long_step(tournament, ordering, alpha, certificate) == []

    @pytest.mark.parametrize("seed", range(100))
    def test_density_increment(self, seed):
        rng = random.Random(seed)
        pairs = rng.sample([(u, v) for u in range(100) for v in range(100, 200)], 100 + seed * 2)
        tournament = interlaced(200, pairs)
        ordering = Ordering.identity(200)
        first, second = Interval(start=1, end=100), Interval(start=101, end=200)
        certificate = proofsim_service.density_increment(tournament, ordering, first, second, Fraction(1, 10))
        assert certificate.backward_total == len(pairs)
        assert proofsim_service.verify_density_increment(
            tournament, ordering, first, second, Fraction(1, 10), certificate
        ) == []

    @pytest.mark.parametrize("seed", range(100))
    def test_dependent_choice(self, seed):
        graph = generator_service.random_colouring(60, seed, 0.8).colour_graph(Colour.RED)
        result = proofsim_service.dependent_random_choice(graph, 6, 2, seed=seed)
        assert result.found
        assert proofsim_service.verify_dependent_choice(graph, result.vertices, 6, 2) == []
