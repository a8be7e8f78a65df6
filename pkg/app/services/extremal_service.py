import logging
import random
import time
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from sqlalchemy.orm import Session

from app.core.bits import full_mask, iter_bits, mask_of, popcount
from app.core.config import settings
from app.core.exceptions import PreconditionError, SizeError
from app.db.repositories.extremal_repository import extremal_repository
from app.schemas.extremal import ExtremalRecord
from app.schemas.graphs import BipartiteGraph, Graph
from app.services.canonical_service import canonical_service
from app.services.codec_service import codec_service
from app.services.detect_service import BipartiteRelation, detect_service

logger = logging.getLogger(__name__)

Rows = Tuple[int, ...]


class _BudgetHit(Exception):
    pass


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q**0.5) + 1))


def projective_points(q: int) -> List[Tuple[int, int, int]]:
    """Normalized triples over GF(q): first nonzero coordinate is 1, sorted."""
    points = [p for p in product(range(q), repeat=3) if any(p)]
    return sorted(p for p in points if p[next(i for i, x in enumerate(p) if x)] == 1)


def _common(rows: Sequence[int], vertices: Tuple[int, ...], everything: int) -> int:
    mask = everything
    for v in vertices:
        mask &= rows[v]
    return mask


class _LevelSearch:
    """Exhaustive K_{a,b}-free search by minimum-degree vertex peeling.

    level(k, m) holds the K_{a,b}-free graphs on k vertices with at least m edges,
    one canonical representative per isomorphism class. Deleting a minimum-degree
    vertex from such a graph leaves at least m - floor(2m/k) edges, so every
    member extends a member of level(k - 1, m - floor(2m/k)) by a new vertex of
    minimum degree.
    """

    def __init__(self, a: int, b: int, budget: int):
        self.a, self.b = a, b
        self.budget = budget
        self.forms = 0
        self.memo: Dict[Tuple[int, int], List[Tuple[Rows, int]]] = {}

    def level(self, k: int, m: int) -> List[Tuple[Rows, int]]:
        if k == 1:
            return [((0,), 0)] if m <= 0 else []
        key = (k, max(m, 0))
        if key in self.memo:
            return self.memo[key]
        need_below = m - (2 * m) // k if m > 0 else 0
        seen: Dict[Rows, int] = {}
        for rows, edges in self.level(k - 1, need_below):
            for ext_rows, ext_edges in self._extensions(rows, edges, k - 1, m):
                self.forms += 1
                if self.forms > self.budget:
                    raise _BudgetHit()
                certificate = canonical_service.certificate(k, ext_rows)
                seen.setdefault(certificate, ext_edges)
        found = sorted(seen.items())
        self.memo[key] = found
        return found

    def _extensions(self, rows: Rows, edges: int, size: int, m: int):
        degrees = [popcount(r) for r in rows]
        min_degree = min(degrees) if degrees else 0
        low = max(m - edges, 0)
        high = min(size, min_degree + 1)
        for d in range(low, high + 1):
            for nbrs in combinations(range(size), d):
                if any(degrees[u] + 1 < d for u in nbrs):
                    continue
                inside = mask_of(nbrs)
                if any(degrees[u] < d for u in range(size) if not inside >> u & 1):
                    continue
                if not self._extension_free(rows, size, inside):
                    continue
                new_rows = tuple(r | (1 << size) if inside >> u & 1 else r for u, r in enumerate(rows))
                yield new_rows + (inside,), edges + d

    def _extension_free(self, rows: Rows, size: int, nbrs: int) -> bool:
        """True iff adding a vertex adjacent to `nbrs` creates no K_{a,b} through it."""
        everything = full_mask(size)
        # new vertex on the a-side: a-1 old partners, b common neighbours inside nbrs
        for partners in combinations(range(size), self.a - 1):
            if popcount(nbrs & _common(rows, partners, everything)) >= self.b:
                return False
        # new vertex on the b-side: a-set inside nbrs with b-1 further common neighbours
        for side in combinations(list(iter_bits(nbrs)), self.a):
            if popcount(_common(rows, side, everything)) >= self.b - 1:
                return False
        return True


class ExtremalService:
    @staticmethod
    def is_biclique_free(graph: Graph, a: int, b: int) -> bool:
        """Independent re-check: every a-subset has fewer than b common neighbours."""
        everything = full_mask(graph.n)
        rows = graph.rows
        for side in combinations(range(graph.n), a):
            if popcount(_common(rows, side, everything)) >= b:
                return False
        return True

    @staticmethod
    def biclique_relation(graph: Graph) -> BipartiteRelation:
        """Bipartite double cover: a K_{a,b} here is exactly a K_{a,b} in the graph."""
        labels = tuple(range(graph.n))
        return BipartiteRelation(left_labels=labels, right_labels=labels, rows=graph.rows)

    @staticmethod
    def remove_one_edge(graph: Graph) -> Graph:
        """Drops the largest edge in sorted order."""
        if not graph.edges:
            return graph
        return graph.without_edge(graph.sorted_edges()[-1])

    @staticmethod
    def greedy_free_graph(n: int, a: int, b: int, seed: int = 0, restarts: Optional[int] = None) -> Graph:
        """Best of several seeded random-order greedy K_{a,b}-free edge additions."""
        restarts = settings.HEURISTIC_RESTARTS if restarts is None else restarts
        rng = random.Random(seed)
        best: Optional[Graph] = None
        for _ in range(max(1, restarts)):
            pairs = list(combinations(range(n), 2))
            rng.shuffle(pairs)
            rows = [0] * n
            for u, v in pairs:
                rows[u] |= 1 << v
                rows[v] |= 1 << u
                if not ExtremalService._free_through(rows, n, a, b, u, v):
                    rows[u] ^= 1 << v
                    rows[v] ^= 1 << u
            graph = Graph.from_rows(n, rows)
            if best is None or graph.edge_count > best.edge_count:
                best = graph
        assert best is not None
        return best

    @staticmethod
    def _free_through(rows: List[int], n: int, a: int, b: int, u: int, v: int) -> bool:
        """No K_{a,b} uses edge uv (u on the a-side or v on the a-side)."""
        everything = full_mask(n)
        for x, y in ((u, v), (v, u)):
            others = [w for w in range(n) if w != x and w != y]
            for partners in combinations(others, a - 1):
                common = _common(rows, (x,) + partners, everything)
                if common >> y & 1 and popcount(common) >= b:
                    return False
        return True

    @staticmethod
    def zarankiewicz_extremal(
        n: int,
        a: int,
        b: int,
        budget: Optional[int] = None,
        seed: int = 0,
        session: Optional[Session] = None,
    ) -> ExtremalRecord:
        """ex(n, K_{a,b}) with a witness. With a session, exhaustive records are
        served from and stored to the result cache."""
        if not 1 <= a <= b:
            raise SizeError("expected 1 <= a <= b")
        if n < 1:
            raise SizeError("n must be at least 1")
        if session is not None:
            cached = ExtremalService._cached_record(session, n, a, b)
            if cached is not None:
                return cached
        record = ExtremalService._search(n, a, b, budget, seed)
        if session is not None and record.exhaustive:
            extremal_repository.create(
                session,
                obj_in={
                    "n": n,
                    "a": a,
                    "b": b,
                    "edge_count": record.edge_count,
                    "exhaustive": True,
                    "canonical_forms": record.canonical_forms,
                    "witness": codec_service.encode(record.graph),
                },
            )
        return record

    @staticmethod
    def _cached_record(session: Session, n: int, a: int, b: int) -> Optional[ExtremalRecord]:
        row = extremal_repository.get_record(session, n=n, a=a, b=b)
        if row is None:
            return None
        graph = codec_service.decode_as(row.witness, Graph)
        record = ExtremalRecord(
            n=n, a=a, b=b, edge_count=graph.edge_count, graph=graph, exhaustive=True,
            canonical_forms=row.canonical_forms or 0,
        )
        failures = ExtremalService.verify_record(record)
        if graph.edge_count != row.edge_count:
            failures.append("witness edge count differs from stored value")
        if failures:
            logger.warning("cached ex(%d, K_%d,%d) failed re-verification: %s", n, a, b, failures)
            extremal_repository.remove(session, id=row.id)
            return None
        logger.debug("ex(%d, K_%d,%d) served from cache", n, a, b)
        return record

    @staticmethod
    def _search(n: int, a: int, b: int, budget: Optional[int], seed: int) -> ExtremalRecord:
        budget = settings.EXTREMAL_BUDGET if budget is None else budget
        if n < a + b:
            complete = Graph.from_pairs(n, combinations(range(n), 2))
            return ExtremalRecord(
                n=n, a=a, b=b, edge_count=complete.edge_count, graph=complete, exhaustive=True
            )
        started = time.perf_counter()
        search = _LevelSearch(a, b, budget)
        try:
            best = (a + b - 1) * (a + b - 2) // 2
            witness: Rows = ()
            for k in range(a + b, n + 1):
                pairs = k * (k - 1) // 2
                upper = max(e for e in range(pairs + 1) if e - (2 * e) // k <= best)
                for e in range(upper, best - 1, -1):
                    found = search.level(k, e)
                    if found:
                        best, witness = e, found[0][0]
                        break
            graph = Graph.from_rows(n, witness)
            logger.info(
                "ex(%d, K_%d,%d) = %d exhaustively (%d canonical forms, %.2fs)",
                n, a, b, best, search.forms, time.perf_counter() - started,
            )
            return ExtremalRecord(
                n=n, a=a, b=b, edge_count=best, graph=graph, exhaustive=True, canonical_forms=search.forms
            )
        except _BudgetHit:
            graph = ExtremalService.greedy_free_graph(n, a, b, seed)
            logger.warning(
                "extremal budget %d exhausted at n=%d; greedy witness has %d edges",
                budget, n, graph.edge_count,
            )
            return ExtremalRecord(
                n=n, a=a, b=b, edge_count=graph.edge_count, graph=graph, exhaustive=False,
                canonical_forms=search.forms,
            )

    @staticmethod
    def polarity_graph(q: int) -> Graph:
        """Orthogonality graph on the points of PG(2, q); C4-free with q(q+1)^2/2 edges."""
        if not _is_prime(q):
            raise PreconditionError(f"q={q} is not prime")
        points = projective_points(q)
        edges = [
            (i, j)
            for (i, x), (j, y) in combinations(enumerate(points), 2)
            if sum(s * t for s, t in zip(x, y)) % q == 0
        ]
        return Graph(n=len(points), edges=frozenset(edges))

    @staticmethod
    def incidence_bipartite(q: int) -> BipartiteGraph:
        """Point/line incidence graph of PG(2, q): two classes of q^2+q+1, C4-free."""
        if not _is_prime(q):
            raise PreconditionError(f"q={q} is not prime")
        points = projective_points(q)
        edges = [
            (i, j)
            for i, x in enumerate(points)
            for j, line in enumerate(points)
            if sum(s * t for s, t in zip(x, line)) % q == 0
        ]
        return BipartiteGraph(a_size=len(points), b_size=len(points), edges=frozenset(edges))

    @staticmethod
    def bipartite_half(graph: Graph, seed: int = 0) -> BipartiteGraph:
        """Seeded random sides, then move any vertex with more neighbours on its
        own side than across until stable; keeps the cross edges."""
        rng = random.Random(seed)
        n = graph.n
        side = [rng.getrandbits(1) for _ in range(n)]
        rows = graph.rows
        moved = True
        while moved:
            moved = False
            for v in range(n):
                same = mask_of(u for u in range(n) if side[u] == side[v])
                if 2 * popcount(rows[v] & same) > popcount(rows[v]):
                    side[v] ^= 1
                    moved = True
        a_labels = tuple(v for v in range(n) if side[v] == 0)
        b_labels = tuple(v for v in range(n) if side[v] == 1)
        b_index = {v: j for j, v in enumerate(b_labels)}
        edges = [(i, b_index[w]) for i, v in enumerate(a_labels) for w in iter_bits(rows[v]) if w in b_index]
        return BipartiteGraph(
            a_size=len(a_labels),
            b_size=len(b_labels),
            edges=frozenset(edges),
            a_labels=a_labels,
            b_labels=b_labels,
        )

    @staticmethod
    def verify_record(record: ExtremalRecord) -> List[str]:
        failures: List[str] = []
        if not ExtremalService.is_biclique_free(record.graph, record.a, record.b):
            failures.append("witness contains K_{a,b} (subset check)")
        relation = ExtremalService.biclique_relation(record.graph)
        if detect_service.find_biclique(relation, record.a, record.b) is not None:
            failures.append("witness contains K_{a,b} (biclique search)")
        return failures


extremal_service = ExtremalService()
