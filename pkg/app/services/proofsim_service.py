import logging
import math
import random
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.bits import full_mask, iter_bits, mask_of, popcount
from app.core.exceptions import PreconditionError
from app.schemas.farness import Interval, fraction_text
from app.schemas.graphs import Graph, Ordering, Tournament
from app.schemas.proofsim import (
    DensityBranch,
    DensityCertificate,
    DependentChoiceResult,
    IterationTrace,
    LongLemmaCertificate,
    LongStepBranch,
    TraceStep,
)
from app.services.farness_service import farness_service

logger = logging.getLogger(__name__)

Rational = Union[Fraction, int, str, float]

LONG_DIVISOR = 1000  # long-edge count: alpha n^2 / 1000
LONG_LENGTH_DIVISOR = 50  # long edge: length >= n / 50
SEGMENT_DIVISOR = 20  # dense interval: n / 20 vertices
DENSITY_GROWTH = 6  # dense interval is 6 alpha-far
MIN_DENSITY_EDGES = 100


def _ceil(value: Fraction) -> int:
    return math.ceil(value)


def _window_counts(positions: Sequence[Tuple[int, int]], n: int, length: int) -> np.ndarray:
    """counts[s] = number of (lo, hi) position pairs inside [s, s + length - 1]."""
    windows = n - length + 1
    diff = np.zeros(windows + 1, dtype=np.int64)
    inside = [(lo, hi) for lo, hi in positions if hi - lo <= length - 1]
    if inside:
        lows = np.array([lo for lo, _ in inside], dtype=np.int64)
        highs = np.array([hi for _, hi in inside], dtype=np.int64)
        first = np.maximum(highs - length + 1, 0)
        last = np.minimum(lows, windows - 1)
        np.add.at(diff, first, 1)
        np.add.at(diff, last + 1, -1)
    return np.cumsum(diff)[:windows]


def _sub_interval(start: int, end: int) -> Optional[Interval]:
    return Interval(start=start, end=end) if end >= start else None


class ProofsimService:
    @staticmethod
    def long_lemma_step(
        tournament: Tournament, ordering: Ordering, alpha: Rational, check_ordering: bool = True
    ) -> LongLemmaCertificate:
        alpha = Fraction(alpha)
        if alpha <= 0:
            raise PreconditionError("alpha must be positive")
        n = tournament.n
        if check_ordering:
            report = farness_service.verify_local_min(tournament, ordering)
            if not report.ok:
                raise PreconditionError(
                    f"ordering is not locally minimal ({len(report.violations)} violated pairs)"
                )
        pos = ordering.position
        long_length = -(-n // LONG_LENGTH_DIVISOR)
        long_needed = _ceil(alpha * n * n / LONG_DIVISOR)
        backward = farness_service.backward_edges(tournament, ordering)
        long_edges = [(u, v) for u, v in backward if pos[u] - pos[v] >= long_length]
        base = dict(
            n=n, alpha=fraction_text(alpha), long_length=long_length, long_needed=long_needed,
            long_found=len(long_edges),
        )
        if len(long_edges) >= long_needed:
            logger.debug("long-edge branch: %d >= %d", len(long_edges), long_needed)
            return LongLemmaCertificate(
                branch=LongStepBranch.LONG_EDGES, edges=[list(e) for e in long_edges], **base
            )
        segment = -(-n // SEGMENT_DIVISOR)
        target = _ceil(DENSITY_GROWTH * alpha * segment * segment)
        counts = _window_counts([(pos[v], pos[u]) for u, v in backward], n, segment)
        base.update(segment_length=segment, sub_target=target, best_window=int(counts.max()))
        last = n - segment
        for name, start in (("initial", 0), ("terminal", last), ("sweep", int(np.argmax(counts)))):
            if counts[start] >= target:
                logger.debug("dense %s segment at %d: %d >= %d", name, start + 1, counts[start], target)
                return LongLemmaCertificate(
                    branch=LongStepBranch.DENSER_SUB,
                    interval=Interval(start=start + 1, end=start + segment),
                    sub_backward=int(counts[start]),
                    segment=name,
                    **base,
                )
        return LongLemmaCertificate(branch=LongStepBranch.NO_CERTIFICATE, **base)

    @staticmethod
    def verify_long_step(
        tournament: Tournament, ordering: Ordering, alpha: Rational, certificate: LongLemmaCertificate
    ) -> List[str]:
        """Recount a step certificate from the raw tournament."""
        alpha = Fraction(alpha)
        n = tournament.n
        pos = ordering.position
        failures: List[str] = []
        if certificate.branch is LongStepBranch.LONG_EDGES:
            edges = [tuple(e) for e in certificate.edges]
            if len(set(edges)) != len(edges):
                failures.append("duplicate long edges")
            if len(edges) < _ceil(alpha * n * n / LONG_DIVISOR):
                failures.append("too few long edges")
            for u, v in edges:
                if not tournament.has_edge(u, v) or pos[u] <= pos[v]:
                    failures.append(f"({u}, {v}) is not a backward edge")
                elif pos[u] - pos[v] < -(-n // LONG_LENGTH_DIVISOR):
                    failures.append(f"({u}, {v}) is too short")
        elif certificate.branch is LongStepBranch.DENSER_SUB:
            interval = certificate.interval
            if interval is None:
                return ["denser-sub certificate without interval"]
            if interval.length < -(-n // SEGMENT_DIVISOR):
                failures.append("interval shorter than n/20")
            sub = tournament.induced(interval.vertices(ordering))
            recount = farness_service.backward_count(sub, Ordering.identity(sub.n))
            if recount != certificate.sub_backward:
                failures.append(f"interval holds {recount} backward edges, certificate says {certificate.sub_backward}")
            if recount < _ceil(DENSITY_GROWTH * alpha * interval.length**2):
                failures.append("interval below 6 alpha |I|^2")
        return failures

    @staticmethod
    def long_lemma_iterate(
        tournament: Tournament,
        c: Rational,
        r: int,
        seed: int = 0,
        restarts: Optional[int] = None,
        cap: Optional[int] = None,
    ) -> IterationTrace:
        """Apply the dichotomy repeatedly, descending into the dense interval,
        with alpha_k = 6^k C n0^(-1/r)."""
        if r < 2:
            raise PreconditionError("r must be at least 2")
        c = Fraction(c)
        if c <= 0:
            raise PreconditionError("C must be positive")
        n0 = tournament.n
        alpha0 = (c * Fraction(n0 ** (-1.0 / r))).limit_denominator(10**12)
        vertices = list(range(n0))
        steps: List[TraceStep] = []
        final_ordering: List[int] = []
        k = 0
        while True:
            alpha = alpha0 * DENSITY_GROWTH**k
            sub = tournament.induced(vertices)
            if sub.n < 3 * r:
                steps.append(TraceStep(index=k, n=sub.n, alpha=fraction_text(alpha), branch=LongStepBranch.TOO_SMALL))
                outcome = LongStepBranch.TOO_SMALL
                final_ordering = list(vertices)
                break
            report = farness_service.minimal_ordering(sub, seed=seed, restarts=restarts, cap=cap)
            ordering = report.certificate_ordering()
            step = ProofsimService.long_lemma_step(sub, ordering, alpha, check_ordering=False)
            steps.append(
                TraceStep(
                    index=k,
                    n=sub.n,
                    alpha=fraction_text(alpha),
                    ordering_kind=report.kind.value,
                    backward_count=report.numerator,
                    branch=step.branch,
                    interval=step.interval,
                )
            )
            final_ordering = [vertices[v] for v in ordering.perm]
            if step.branch is not LongStepBranch.DENSER_SUB or step.interval is None:
                outcome = step.branch
                break
            vertices = list(final_ordering[step.interval.start - 1 : step.interval.end])
            k += 1
        logger.info("iteration finished after %d steps: %s", len(steps), outcome.value)
        return IterationTrace(
            alpha0=fraction_text(alpha0),
            r=r,
            steps=steps,
            outcome=outcome,
            final_vertices=sorted(vertices),
            final_ordering=final_ordering,
        )

    @staticmethod
    def density_increment(
        tournament: Tournament, ordering: Ordering, first: Interval, second: Interval, epsilon: Rational
    ) -> DensityCertificate:
        """Split the backward edges from `second` to `first` into two interlaced
        halves, or shrink to a pair of subintervals carrying most of them."""
        epsilon = Fraction(epsilon)
        if not 0 < epsilon < Fraction(1, 6):
            raise PreconditionError("epsilon must lie in (0, 1/6)")
        if not first.precedes(second):
            raise PreconditionError(f"interval {first} must precede {second}")
        if second.end > ordering.n:
            raise PreconditionError(f"interval {second} exceeds {ordering.n} positions")
        out, into = tournament.out, tournament.into
        i_vertices, j_vertices = first.vertices(ordering), second.vertices(ordering)
        j_mask = mask_of(j_vertices)
        degrees = [popcount(into[x] & j_mask) for x in i_vertices]
        total = sum(degrees)
        base = dict(
            backward_total=total,
            epsilon=fraction_text(epsilon),
            split_needed=_ceil(epsilon * total),
            shrink_needed=_ceil((Fraction(1, 2) - 3 * epsilon) * total),
        )
        if total < MIN_DENSITY_EDGES:
            return DensityCertificate(
                branch=DensityBranch.NO_CERTIFICATE, reason=f"L={total} below {MIN_DENSITY_EDGES}", **base
            )
        running, cut = 0, len(i_vertices)
        for k, d in enumerate(degrees, start=1):
            running += d
            if 2 * running >= total:
                cut = k
                break
        i1_mask, i2_mask = mask_of(i_vertices[:cut]), mask_of(i_vertices[cut:])
        to_i1 = [popcount(out[y] & i1_mask) for y in j_vertices]
        to_i2 = [popcount(out[y] & i2_mask) for y in j_vertices]
        # b(j) = e(I1, J[..j-1]) - e(I2, J[j..]) is non-decreasing; p is its first non-negative index
        balance = -sum(to_i2)
        p = len(j_vertices) + 1
        for j in range(1, len(j_vertices) + 2):
            if balance >= 0:
                p = j
                break
            balance += to_i1[j - 1] + to_i2[j - 1]
        split = p - 1
        c11, c21 = sum(to_i1[:split]), sum(to_i2[:split])
        c12, c22 = sum(to_i1[split:]), sum(to_i2[split:])
        i1 = _sub_interval(first.start, first.start + cut - 1)
        i2 = _sub_interval(first.start + cut, first.end)
        j1 = _sub_interval(second.start, second.start + split - 1)
        j2 = _sub_interval(second.start + split, second.end)
        parts = dict(i1=i1, i2=i2, j1=j1, j2=j2, count_11=c11, count_22=c22, count_12=c12, count_21=c21)
        if c11 >= base["split_needed"] and c22 >= base["split_needed"]:
            return DensityCertificate(branch=DensityBranch.SPLIT, **parts, **base)
        half = first.length + second.length
        pairs = sorted(
            [
                (cut + second.length - split, 0, i1, j2, c12),
                (first.length - cut + split, 1, i2, j1, c21),
            ],
            key=lambda x: (x[0], x[1]),
        )
        for size, _, sub_i, sub_j, count in pairs:
            if sub_i is None or sub_j is None or 2 * size > half:
                continue
            if count >= base["shrink_needed"]:
                return DensityCertificate(
                    branch=DensityBranch.SHRINK, shrink_i=sub_i, shrink_j=sub_j, shrink_count=count, **parts, **base
                )
        return DensityCertificate(
            branch=DensityBranch.NO_CERTIFICATE,
            reason="neither split nor shrink threshold met",
            **parts,
            **base,
        )

    @staticmethod
    def verify_density_increment(
        tournament: Tournament,
        ordering: Ordering,
        first: Interval,
        second: Interval,
        epsilon: Rational,
        certificate: DensityCertificate,
    ) -> List[str]:
        epsilon = Fraction(epsilon)

        def count(a: Optional[Interval], b: Optional[Interval]) -> int:
            if a is None or b is None:
                return 0
            return len(farness_service.backward_edges_between(tournament, ordering, a, b))

        failures: List[str] = []
        total = count(first, second)
        if total != certificate.backward_total:
            failures.append(f"L recounted as {total}")
        if certificate.branch is DensityBranch.SPLIT:
            need = _ceil(epsilon * total)
            i1, i2, j1, j2 = certificate.i1, certificate.i2, certificate.j1, certificate.j2
            if None in (i1, i2, j1, j2):
                return failures + ["split with an empty part"]
            if (i1.start, i1.end + 1, i2.end) != (first.start, i2.start, first.end):
                failures.append("I1, I2 do not partition I")
            if (j1.start, j1.end + 1, j2.end) != (second.start, j2.start, second.end):
                failures.append("J1, J2 do not partition J")
            if count(i1, j1) < need or count(i2, j2) < need:
                failures.append("split part below epsilon L")
        elif certificate.branch is DensityBranch.SHRINK:
            sub_i, sub_j = certificate.shrink_i, certificate.shrink_j
            if sub_i is None or sub_j is None:
                return failures + ["shrink without intervals"]
            if not (first.start <= sub_i.start and sub_i.end <= first.end):
                failures.append("I' not inside I")
            if not (second.start <= sub_j.start and sub_j.end <= second.end):
                failures.append("J' not inside J")
            if 2 * (sub_i.length + sub_j.length) > first.length + second.length:
                failures.append("|I'| + |J'| exceeds half")
            if count(sub_i, sub_j) < _ceil((Fraction(1, 2) - 3 * epsilon) * total):
                failures.append("shrink count below (1/2 - 3 epsilon) L")
        return failures

    @staticmethod
    def dependent_random_choice(
        graph: Graph,
        k: int,
        t: int,
        seed: int = 0,
        tries: int = 100,
        sample_size: Optional[int] = None,
    ) -> DependentChoiceResult:
        """Common neighbourhood of a random vertex sample, cleaned of every
        t-subset with fewer than k common neighbours; first k survivors."""
        if not k >= t >= 1:
            raise PreconditionError("expected k >= t >= 1")
        h = t if sample_size is None else sample_size
        rng = random.Random(seed)
        n = graph.n
        rows = graph.rows
        everything = full_mask(n)
        made = 0
        for attempt in range(1, tries + 1):
            if n == 0:
                break
            made = attempt
            common = everything
            for _ in range(h):
                common &= rows[rng.randrange(n)]
            candidates = list(iter_bits(common))
            doomed = 0
            for subset in combinations(candidates, t):
                shared = everything
                for v in subset:
                    shared &= rows[v]
                if popcount(shared) < k:
                    doomed |= 1 << max(subset)
            survivors = [v for v in candidates if not doomed >> v & 1]
            if len(survivors) < k:
                continue
            chosen = survivors[:k]
            if not ProofsimService.verify_dependent_choice(graph, chosen, k, t):
                logger.info("dependent choice found %s after %d attempts", chosen, attempt)
                return DependentChoiceResult(found=True, k=k, t=t, vertices=chosen, attempts=attempt, sample_size=h)
        return DependentChoiceResult(found=False, k=k, t=t, attempts=made, sample_size=h)

    @staticmethod
    def verify_dependent_choice(graph: Graph, vertices: Sequence[int], k: int, t: int) -> List[str]:
        failures: List[str] = []
        if len(set(vertices)) != len(vertices) or len(vertices) != k:
            failures.append(f"expected {k} distinct vertices")
        everything = full_mask(graph.n)
        for subset in combinations(sorted(set(vertices)), t):
            shared = everything
            for v in subset:
                shared &= graph.rows[v]
            if popcount(shared) < k:
                failures.append(f"{list(subset)} has {popcount(shared)} common neighbours")
        return failures


proofsim_service = ProofsimService()
