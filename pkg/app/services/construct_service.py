import logging
import math
from typing import List, Optional, Set, Tuple

import networkx as nx
from sqlalchemy.orm import Session

from app.core.bits import full_mask
from app.core.config import settings
from app.core.exceptions import SizeError
from app.schemas.construct import (
    ColtightReport,
    D2Level,
    D2Report,
    PolarityReport,
    StarReport,
    TourtightReport,
    ZarankiewiczReport,
)
from app.schemas.extremal import ExtremalRecord
from app.schemas.graphs import BipartiteGraph, Colour, Graph, Ordering, Pair, Tournament, TwoColouring
from app.services.detect_service import detect_service
from app.services.extremal_service import extremal_service
from app.services.farness_service import farness_service
from app.services.generator_service import generator_service

logger = logging.getLogger(__name__)


def _nx_graph(graph: Graph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(graph.edges)
    return g


def _nx_digraph(tournament: Tournament) -> nx.DiGraph:
    d = nx.DiGraph()
    d.add_nodes_from(range(tournament.n))
    d.add_edges_from(tournament.edges())
    return d


def log_bound(n: int) -> int:
    """ceil(n log2 n / 5)"""
    return math.ceil(n * math.log2(n) / 5) if n > 1 else 0


class ConstructService:
    @staticmethod
    def coltight_colouring(h: BipartiteGraph) -> TwoColouring:
        """Red = edges of H (in host labels); every other pair blue."""
        return TwoColouring.from_pairs(h.n, h.labelled_edges())

    @staticmethod
    def tourtight_tournament(h: BipartiteGraph, t: int) -> Tuple[Tournament, Ordering]:
        """sigma = A then B (index order); H-edges point B -> A, all other pairs forward."""
        if t < 1:
            raise SizeError("t must be at least 1")
        ordering = Ordering(perm=h.a_labels + h.b_labels)
        pos = ordering.position
        backward: Set[Pair] = {(h.b_labels[j], h.a_labels[i]) for i, j in h.edges}
        rows = [0] * h.n
        for u in range(h.n):
            for v in range(h.n):
                if pos[u] < pos[v] and (v, u) not in backward:
                    rows[u] |= 1 << v
                elif pos[u] > pos[v] and (u, v) in backward:
                    rows[u] |= 1 << v
        return Tournament(n=h.n, out=tuple(rows)), ordering

    @staticmethod
    def star_colouring(n: int) -> TwoColouring:
        if n < 2:
            raise SizeError("star colouring needs at least 2 vertices")
        return TwoColouring.from_pairs(n, ((0, v) for v in range(1, n)))

    @staticmethod
    def d2_recursive(depth: int) -> Tournament:
        """T_0 = C3; T_{k+1} = A -> B, B -> z, z -> A with A, B copies of T_k."""
        if depth < 0:
            raise SizeError("depth must be non-negative")
        tournament = generator_service.cyclic_triangle()
        for _ in range(depth):
            n = tournament.n
            a_mask, b_mask = full_mask(n), full_mask(n) << n
            z = 2 * n
            rows = [row | b_mask for row in tournament.out]
            rows += [(row << n) | (1 << z) for row in tournament.out]
            rows.append(a_mask)
            tournament = Tournament(n=2 * n + 1, out=tuple(rows))
        return tournament

    @staticmethod
    def is_strongly_connected(tournament: Tournament) -> bool:
        return nx.is_strongly_connected(_nx_digraph(tournament))

    @staticmethod
    def coltight_instance(
        n: int, t: int, seed: int = 0, budget: Optional[int] = None, session: Optional[Session] = None
    ) -> Tuple[BipartiteGraph, ExtremalRecord]:
        """H = bipartite half of the K_{t,t}-extremal witness minus one edge."""
        record = extremal_service.zarankiewicz_extremal(n, t, t, budget=budget, seed=seed, session=session)
        base = extremal_service.remove_one_edge(record.graph) if record.exhaustive else record.graph
        return extremal_service.bipartite_half(base, seed), record

    @staticmethod
    def verify_coltight(h: BipartiteGraph, t: int, budget: Optional[int] = None) -> ColtightReport:
        c = ConstructService.coltight_colouring(h)
        red_equals_h = set(c.red) == {tuple(sorted(e)) for e in h.labelled_edges()}
        red_bipartite = nx.is_bipartite(_nx_graph(c.colour_graph(Colour.RED)))
        pattern_free = c.n < 2 * t or not detect_service.find_unavoidable_colouring(c, t, budget).found
        farness = farness_service.colour_farness(c) if c.n >= 2 else None
        failed = [
            name
            for name, ok in (
                ("red_equals_h", red_equals_h),
                ("red_bipartite", red_bipartite),
                ("pattern_free", pattern_free),
            )
            if not ok
        ]
        return ColtightReport(
            n=c.n,
            t=t,
            h_edges=h.edge_count,
            red_count=c.red_count,
            blue_count=c.blue_count,
            red_equals_h=red_equals_h,
            red_bipartite=red_bipartite,
            pattern_free=pattern_free,
            min_colour_count=min(c.red_count, c.blue_count),
            delta=farness.delta_text if farness else "0/1",
            verified=not failed,
            failed_checks=failed,
        )

    @staticmethod
    def verify_tourtight(h: BipartiteGraph, t: int, budget: Optional[int] = None) -> TourtightReport:
        r = math.ceil(t / 2)
        tournament, ordering = ConstructService.tourtight_tournament(h, t)
        relation = detect_service.relation_from_bipartite(h)
        h_free = (
            detect_service.find_biclique(relation, r, t) is None
            and detect_service.find_biclique(relation, t, r) is None
        )
        backward = farness_service.backward_edges(tournament, ordering)
        expected = {(h.b_labels[j], h.a_labels[i]) for i, j in h.edges}
        classes_transitive = all(
            tournament.induced(side).is_transitive() for side in (h.a_labels, h.b_labels) if side
        )
        reversal_transitive = tournament.with_reversed(backward).is_transitive()
        pattern_free = tournament.n < 3 * t or not detect_service.find_unavoidable_tournament(tournament, t, budget).found
        fas = farness_service.exact_value(tournament) if tournament.n <= settings.EXACT_FAS_CAP else None
        checks = (
            ("h_biclique_free", h_free),
            ("backward_equals_h", set(backward) == expected),
            ("classes_transitive", classes_transitive),
            ("reversal_transitive", reversal_transitive),
            ("pattern_free", pattern_free),
        )
        failed = [name for name, ok in checks if not ok]
        return TourtightReport(
            n=tournament.n,
            t=t,
            r=r,
            a_size=h.a_size,
            b_size=h.b_size,
            h_edges=h.edge_count,
            h_biclique_free=h_free,
            backward_count=len(backward),
            backward_equals_h=set(backward) == expected,
            classes_transitive=classes_transitive,
            reversal_transitive=reversal_transitive,
            pattern_free=pattern_free,
            fas_exact=fas,
            ordering=list(ordering.perm),
            verified=not failed,
            failed_checks=failed,
        )

    @staticmethod
    def verify_star(n: int, t: int = 2) -> StarReport:
        c = ConstructService.star_colouring(n)
        pattern_free = n < 2 * t or not detect_service.find_unavoidable_colouring(c, t).found
        farness = farness_service.colour_farness(c)
        failed = []
        if not pattern_free:
            failed.append("pattern_free")
        # red is the (n-1)-edge star; blue is K_{n-1}
        if farness.numerator != min(n - 1, (n - 1) * (n - 2) // 2):
            failed.append("farness")
        return StarReport(
            n=n,
            t=t,
            red_count=c.red_count,
            pattern_free=pattern_free,
            delta=farness.delta_text,
            verified=not failed,
            failed_checks=failed,
        )

    @staticmethod
    def verify_d2(depth: int, cap: Optional[int] = None) -> D2Report:
        """Checks every level up to `depth`: no U_2, strong connectivity, and where
        exact DP fits the cap, f(2n+1) >= ceil(n/2) + 2 f(n) and f(n) >= ceil(n log2 n / 5)."""
        cap = settings.EXACT_FAS_CAP if cap is None else cap
        levels: List[D2Level] = []
        failed: List[str] = []
        previous: Optional[D2Level] = None
        for k in range(depth + 1):
            tournament = ConstructService.d2_recursive(k)
            n = tournament.n
            u2_free = n < 6 or not detect_service.find_unavoidable_tournament(tournament, 2).found
            strongly = ConstructService.is_strongly_connected(tournament)
            fas = farness_service.exact_value(tournament, cap) if n <= cap else None
            recursion = None
            if previous is not None and previous.fas_exact is not None:
                recursion = math.ceil(previous.n / 2) + 2 * previous.fas_exact
            level = D2Level(
                depth=k,
                n=n,
                u2_free=u2_free,
                strongly_connected=strongly,
                fas_exact=fas,
                log_bound=log_bound(n),
                recursion_bound=recursion,
            )
            if not u2_free:
                failed.append(f"depth {k}: contains U_2")
            if not strongly:
                failed.append(f"depth {k}: not strongly connected")
            if fas is not None and fas < level.log_bound:
                failed.append(f"depth {k}: FAS {fas} below log bound {level.log_bound}")
            if fas is not None and recursion is not None and fas < recursion:
                failed.append(f"depth {k}: FAS {fas} below recursion bound {recursion}")
            levels.append(level)
            previous = level
        top = levels[-1]
        return D2Report(
            depth=depth,
            n=top.n,
            u2_free=top.u2_free,
            strongly_connected=top.strongly_connected,
            fas_exact=top.fas_exact,
            levels=levels,
            verified=not failed,
            failed_checks=failed,
        )

    @staticmethod
    def verify_polarity(q: int) -> PolarityReport:
        graph = extremal_service.polarity_graph(q)
        relation = extremal_service.biclique_relation(graph)
        c4_free = extremal_service.is_biclique_free(graph, 2, 2) and detect_service.find_biclique(relation, 2, 2) is None
        expected = q * (q + 1) ** 2 // 2
        failed = [name for name, ok in (("c4_free", c4_free), ("edge_count", graph.edge_count == expected)) if not ok]
        return PolarityReport(
            q=q,
            n=graph.n,
            edge_count=graph.edge_count,
            expected_edges=expected,
            c4_free=c4_free,
            verified=not failed,
            failed_checks=failed,
        )

    @staticmethod
    def verify_zarankiewicz(record: ExtremalRecord) -> ZarankiewiczReport:
        failed = extremal_service.verify_record(record)
        return ZarankiewiczReport(
            n=record.n,
            a=record.a,
            b=record.b,
            edge_count=record.edge_count,
            exhaustive=record.exhaustive,
            canonical_forms=record.canonical_forms,
            edges=[list(e) for e in record.graph.sorted_edges()],
            verified=not failed,
            failed_checks=failed,
        )


construct_service = ConstructService()
