import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.bits import full_mask, iter_bits, mask_of, popcount
from app.core.config import settings
from app.core.exceptions import CapExceededError, PreconditionError, SizeError
from app.schemas.farness import FarnessKind, FarnessReport, Interval, LocalMinReport, LocalMinViolation
from app.schemas.graphs import Ordering, Pair, Tournament, TwoColouring

logger = logging.getLogger(__name__)


def _popcount_table(n: int) -> np.ndarray:
    counts = np.zeros(1 << n, dtype=np.uint8)
    for b in range(n):
        counts[1 << b : 1 << (b + 1)] = counts[: 1 << b] + 1
    return counts


def _subset_dp(out: Sequence[int], n: int) -> np.ndarray:
    """best[S] = min over v in S of best[S - v] + |N+(v) & S|, filled layer by layer."""
    counts = _popcount_table(n)
    order = np.argsort(counts, kind="stable")
    starts = np.searchsorted(counts[order], np.arange(n + 2))
    best = np.zeros(1 << n, dtype=np.int32)
    ceiling = np.int32(n * n)
    for k in range(1, n + 1):
        layer = order[starts[k] : starts[k + 1]]
        layer_best = np.full(layer.shape, ceiling, dtype=np.int32)
        for v in range(n):
            bit = 1 << v
            has = (layer & bit) != 0
            members = layer[has]
            cost = best[members ^ bit] + counts[members & out[v]]
            layer_best[has] = np.minimum(layer_best[has], cost)
        best[layer] = layer_best
    return best


def _reconstruct(out: Sequence[int], n: int, best: np.ndarray) -> List[int]:
    """Peel the last vertex off repeatedly; among equal-cost choices the smallest id wins."""
    remaining = full_mask(n)
    tail: List[int] = []
    while remaining:
        for v in iter_bits(remaining):
            if best[remaining ^ (1 << v)] + popcount(out[v] & remaining) == best[remaining]:
                tail.append(v)
                remaining ^= 1 << v
                break
    return tail[::-1]


def _first_improving(out: Sequence[int], perm: List[int], i: int, v: int) -> Optional[int]:
    delta = 0
    for j in range(i + 1, len(perm)):
        delta += 1 if out[v] >> perm[j] & 1 else -1
        if delta < 0:
            return j
    delta = 0
    for j in range(i - 1, -1, -1):
        delta += 1 if out[perm[j]] >> v & 1 else -1
        if delta < 0:
            return j
    return None


def _insertion_search(out: Sequence[int], perm: List[int]) -> List[int]:
    """Single-vertex insertion local search.

    First improvement. Positions are scanned left to right; for the vertex at
    position i, targets are tried rightwards (i+1, i+2, ...) and then leftwards
    (i-1, i-2, ...), and the first target that removes backward edges is taken.
    Passes repeat until one completes without a move.
    """
    n = len(perm)
    improved = True
    while improved:
        improved = False
        for i in range(n):
            v = perm[i]
            target = _first_improving(out, perm, i, v)
            if target is not None:
                perm.insert(target, perm.pop(i))
                improved = True
    return perm


class FarnessService:
    @staticmethod
    def colour_farness(c: TwoColouring) -> FarnessReport:
        if c.n < 2:
            raise SizeError("colour farness needs at least 2 vertices")
        return FarnessReport(
            numerator=min(c.red_count, c.blue_count),
            n=c.n,
            kind=FarnessKind.EXACT,
            red_count=c.red_count,
            blue_count=c.blue_count,
        )

    @staticmethod
    def backward_edges(tournament: Tournament, ordering: Ordering) -> List[Pair]:
        """Edges u -> v with v earlier than u, sorted by (position of v, position of u)."""
        pos = ordering.position
        edges = [(u, v) for u, v in tournament.edges() if pos[u] > pos[v]]
        return sorted(edges, key=lambda e: (pos[e[1]], pos[e[0]]))

    @staticmethod
    def backward_count(tournament: Tournament, ordering: Ordering) -> int:
        earlier = 0
        total = 0
        for v in ordering.perm:
            total += popcount(tournament.out[v] & earlier)
            earlier |= 1 << v
        return total

    @staticmethod
    def edge_length(ordering: Ordering, u: int, v: int) -> int:
        pos = ordering.position
        return abs(pos[u] - pos[v])

    @staticmethod
    def interval(ordering: Ordering, i: int, j: int) -> Tuple[int, ...]:
        """Vertices at positions i..j (1-based, inclusive)."""
        return Interval(start=i, end=j).vertices(ordering)

    @staticmethod
    def set_distance(ordering: Ordering, first: Iterable[int], second: Iterable[int]) -> int:
        """d(A, B): distance from the last vertex of A to the first of B, for A < B."""
        pos = ordering.position
        last_a = max(pos[v] for v in first)
        first_b = min(pos[v] for v in second)
        if last_a >= first_b:
            raise PreconditionError("d(A, B) needs A to precede B")
        return first_b - last_a

    @staticmethod
    def set_span(ordering: Ordering, vertices: Iterable[int]) -> int:
        """d(A): distance between the first and last vertex of A."""
        positions = [ordering.position[v] for v in vertices]
        return max(positions) - min(positions)

    @staticmethod
    def backward_edges_between(
        tournament: Tournament, ordering: Ordering, first: Interval, second: Interval
    ) -> List[Pair]:
        """Edges y -> x with y in the later interval and x in the earlier one."""
        if not first.precedes(second):
            raise PreconditionError(f"interval {first} must precede {second}")
        targets = mask_of(first.vertices(ordering))
        pos = ordering.position
        edges = [
            (y, x) for y in second.vertices(ordering) for x in iter_bits(tournament.out[y] & targets)
        ]
        return sorted(edges, key=lambda e: (pos[e[1]], pos[e[0]]))

    @staticmethod
    def min_backward_edges_exact(tournament: Tournament, cap: Optional[int] = None) -> FarnessReport:
        cap = settings.EXACT_FAS_CAP if cap is None else cap
        n = tournament.n
        if n > cap:
            raise CapExceededError(n, cap, hint="use the heuristic for larger tournaments")
        started = time.perf_counter()
        best = _subset_dp(tournament.out, n)
        perm = _reconstruct(tournament.out, n, best)
        numerator = int(best[full_mask(n)])
        logger.info("exact FAS n=%d value=%d in %.3fs", n, numerator, time.perf_counter() - started)
        return FarnessReport(numerator=numerator, n=n, kind=FarnessKind.EXACT, ordering=tuple(perm))

    @staticmethod
    def exact_value(tournament: Tournament, cap: Optional[int] = None) -> int:
        return FarnessService.min_backward_edges_exact(tournament, cap).numerator

    @staticmethod
    def heuristic_starts(tournament: Tournament, seed: int, restarts: int) -> List[List[int]]:
        """Decreasing out-degree (ties by id), then restarts-1 shuffles drawn from one seeded stream."""
        n = tournament.n
        starts = [sorted(range(n), key=lambda v: (-tournament.scores[v], v))]
        rng = random.Random(seed)
        for _ in range(restarts - 1):
            perm = list(range(n))
            rng.shuffle(perm)
            starts.append(perm)
        return starts

    @staticmethod
    def min_backward_edges_heuristic(
        tournament: Tournament,
        seed: int = 0,
        restarts: Optional[int] = None,
        threads: Optional[int] = None,
    ) -> FarnessReport:
        restarts = settings.HEURISTIC_RESTARTS if restarts is None else restarts
        if restarts < 1:
            raise SizeError("restarts must be at least 1")
        threads = settings.THREADS if threads is None else threads
        started = time.perf_counter()
        starts = FarnessService.heuristic_starts(tournament, seed, restarts)

        def run(perm: List[int]) -> Tuple[int, Tuple[int, ...]]:
            final = _insertion_search(tournament.out, perm)
            ordering = Ordering(perm=tuple(final))
            return FarnessService.backward_count(tournament, ordering), ordering.perm

        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            results = list(pool.map(run, starts))
        value, perm = min(results)
        logger.info(
            "heuristic FAS n=%d value=%d restarts=%d in %.3fs",
            tournament.n,
            value,
            restarts,
            time.perf_counter() - started,
        )
        return FarnessReport(numerator=value, n=tournament.n, kind=FarnessKind.HEURISTIC, ordering=perm)

    @staticmethod
    def minimal_ordering(
        tournament: Tournament, seed: int = 0, restarts: Optional[int] = None, cap: Optional[int] = None
    ) -> FarnessReport:
        """Exact when the tournament fits under the cap, heuristic otherwise."""
        cap = settings.EXACT_FAS_CAP if cap is None else cap
        if tournament.n <= cap:
            return FarnessService.min_backward_edges_exact(tournament, cap)
        return FarnessService.min_backward_edges_heuristic(tournament, seed, restarts)

    @staticmethod
    def verify_local_min(
        tournament: Tournament,
        ordering: Ordering,
        intervals: Sequence[Tuple[int, int]] = (),
        cap: Optional[int] = None,
    ) -> LocalMinReport:
        """Check the out/in-neighbour half conditions for every 1 <= i < j <= n,
        and restricted optimality on each requested interval (exact DP)."""
        n = tournament.n
        if ordering.n != n:
            raise PreconditionError(f"ordering has {ordering.n} positions for {n} vertices")
        out, perm = tournament.out, ordering.perm
        violations: List[LocalMinViolation] = []
        for i in range(n):
            v, forward = perm[i], 0
            for j in range(i + 1, n):
                forward += out[v] >> perm[j] & 1
                if 2 * forward < j - i:
                    violations.append(LocalMinViolation(i=i + 1, j=j + 1, condition=1))
        for j in range(n):
            v, backward = perm[j], 0
            for i in range(j - 1, -1, -1):
                backward += out[perm[i]] >> v & 1
                if 2 * backward < j - i:
                    violations.append(LocalMinViolation(i=i + 1, j=j + 1, condition=2))
        cap = settings.EXACT_FAS_CAP if cap is None else cap
        for i, j in intervals:
            if not 1 <= i < j <= n:
                raise PreconditionError(f"interval ({i}, {j}) outside 1..{n}")
            if j - i + 1 > cap:
                raise CapExceededError(j - i + 1, cap, hint="restricted optimality needs exact DP")
            sub = tournament.induced(perm[i - 1 : j])
            restricted = FarnessService.backward_count(sub, Ordering.identity(sub.n))
            if restricted > FarnessService.exact_value(sub, cap):
                violations.append(LocalMinViolation(i=i, j=j, condition=3))
        violations.sort(key=lambda x: (x.i, x.j, x.condition))
        return LocalMinReport(n=n, violations=tuple(violations), checked_intervals=tuple(intervals))


farness_service = FarnessService()
