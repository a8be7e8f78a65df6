import logging
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sqlalchemy.orm import Session

from app.core.bits import full_mask, iter_bits, mask_of, popcount
from app.core.config import settings
from app.core.exceptions import CapExceededError, PreconditionError, SizeError
from app.db.repositories.ramsey_repository import ramsey_repository
from app.schemas.farness import fraction_text
from app.schemas.graphs import Tournament, TwoColouring
from app.schemas.ramsey import MinerResult, RamseyKind, RamseyRow, RamseyTable
from app.services.canonical_service import canonical_service
from app.services.codec_service import codec_service
from app.services.detect_service import detect_service
from app.services.farness_service import farness_service

logger = logging.getLogger(__name__)

Rows = Tuple[int, ...]
Instance = Union[TwoColouring, Tournament]

INITIAL_TEMPERATURE = 1.0
COOLING = 0.995
MIN_TEMPERATURE = 1e-3


def _pattern_order(kind: RamseyKind, t: int) -> int:
    return 2 * t if kind is RamseyKind.COLOURING else 3 * t


def _classes(n: int, directed: bool) -> List[Rows]:
    """One canonical row tuple per isomorphism class of graphs (directed=False)
    or tournaments (directed=True) on n vertices, sorted.

    Each class on k vertices extends a class on k - 1 vertices by a vertex whose
    (out-)neighbourhood is any subset of the old vertices.
    """
    level: List[Rows] = [(0,)] if n >= 1 else [()]
    for k in range(2, n + 1):
        old = k - 1
        bit = 1 << old
        seen: Dict[Rows, None] = {}
        for rows in level:
            for nbrs in range(1 << old):
                if directed:
                    grown = tuple(r if nbrs >> u & 1 else r | bit for u, r in enumerate(rows))
                else:
                    grown = tuple(r | bit if nbrs >> u & 1 else r for u, r in enumerate(rows))
                seen.setdefault(canonical_service.certificate(k, grown + (nbrs,)), None)
        level = sorted(seen)
        logger.debug("%d %s classes on %d vertices", len(level), "tournament" if directed else "graph", k)
    return level


def _colour_is_pattern(red: Sequence[int], subset: int, t: int) -> bool:
    """True iff the colouring restricted to `subset` (2t vertices) is an
    unavoidable t-colouring."""
    members = list(iter_bits(subset))
    for colour in (0, 1):
        rows = {
            v: (red[v] & subset) if colour == 0 else (subset & ~red[v] & ~(1 << v))
            for v in members
        }
        degrees = {v: popcount(r) for v, r in rows.items()}
        busy = [v for v in members if degrees[v]]
        if len(busy) == t and all(degrees[v] == t - 1 for v in busy):
            return True
        if all(d == t - 1 for d in degrees.values()) and all(
            rows[u] | 1 << u == rows[v] | 1 << v for v in members for u in iter_bits(rows[v])
        ):
            return True
    return False


def _tournament_is_pattern(out: Sequence[int], subset: int, t: int) -> bool:
    members = list(iter_bits(subset))
    index = {v: i for i, v in enumerate(members)}
    rows = tuple(mask_of(index[w] for w in iter_bits(out[v] & subset)) for v in members)
    sub = Tournament(n=len(members), out=rows)
    return detect_service.find_unavoidable_tournament(sub, t).found


class _Annealer:
    """Single-flip simulated annealing over pattern-free instances.

    The state stays pattern-free: a flip is tested only on the pattern-sized
    vertex sets containing both of its endpoints. Energy is the farness score
    with ties broken toward fewer near-misses (pattern-sized sets that one
    further flip would turn into the pattern).
    """

    def __init__(self, kind: RamseyKind, t: int, n: int, rows: List[int], near_miss: bool):
        self.kind, self.t, self.n = kind, t, n
        self.rows = rows
        self.order = _pattern_order(kind, t)
        self.use_near_miss = near_miss and n >= self.order
        self.pairs = list(combinations(range(n), 2))
        self.total_sets = math.comb(n, self.order) if n >= self.order else 0
        self.near_misses = self._count_near_misses(range(n)) if self.use_near_miss else 0

    @staticmethod
    def flip(rows: List[int], u: int, v: int) -> None:
        """Recolour the pair, or reverse the edge between u and v."""
        rows[u] ^= 1 << v
        rows[v] ^= 1 << u

    def is_pattern(self, rows: Sequence[int], subset: int) -> bool:
        if self.kind is RamseyKind.COLOURING:
            return _colour_is_pattern(rows, subset, self.t)
        return _tournament_is_pattern(rows, subset, self.t)

    def sets_through(self, u: int, v: int) -> Iterable[int]:
        if self.n < self.order:
            return
        others = [w for w in range(self.n) if w != u and w != v]
        for rest in combinations(others, self.order - 2):
            yield mask_of(rest) | 1 << u | 1 << v

    def is_near_miss(self, rows: List[int], subset: int) -> bool:
        members = list(iter_bits(subset))
        for x, y in combinations(members, 2):
            self.flip(rows, x, y)
            hit = self.is_pattern(rows, subset)
            self.flip(rows, x, y)
            if hit:
                return True
        return False

    def _count_near_misses(self, vertices: Iterable[int]) -> int:
        rows = list(self.rows)
        return sum(
            self.is_near_miss(rows, mask_of(s)) for s in combinations(list(vertices), self.order)
        )

    def score(self, rows: Sequence[int]) -> int:
        if self.kind is RamseyKind.COLOURING:
            red = sum(popcount(r) for r in rows) // 2
            return min(red, len(self.pairs) - red)
        return farness_service.exact_value(Tournament(n=self.n, out=tuple(rows)))

    def energy(self, score: int, near_misses: int) -> float:
        return score - near_misses / (self.total_sets + 1)

    def try_flip(self, u: int, v: int) -> Optional[Tuple[List[int], int]]:
        """New rows and near-miss count after flipping (u, v), or None if the
        flip creates the pattern."""
        rows = list(self.rows)
        self.flip(rows, u, v)
        through = list(self.sets_through(u, v))
        if any(self.is_pattern(rows, s) for s in through):
            return None
        near = self.near_misses
        if self.use_near_miss:
            before = list(self.rows)
            for s in through:
                near += self.is_near_miss(rows, s) - self.is_near_miss(before, s)
        return rows, near


class RamseyService:
    @staticmethod
    def instance_from_rows(kind: RamseyKind, n: int, rows: Sequence[int]) -> Instance:
        if kind is RamseyKind.COLOURING:
            return TwoColouring.from_rows(n, rows)
        return Tournament(n=n, out=tuple(rows))

    @staticmethod
    def farness_numerator(obj: Instance) -> int:
        if isinstance(obj, Tournament):
            return farness_service.exact_value(obj)
        return min(obj.red_count, obj.blue_count)

    @staticmethod
    def is_pattern_free(obj: Instance, t: int) -> bool:
        order = 3 * t if isinstance(obj, Tournament) else 2 * t
        return obj.n < order or not detect_service.find_unavoidable(obj, t).found

    @staticmethod
    def witness_name(kind: RamseyKind, t: int, n: int) -> str:
        return f"ramsey_{kind.value}_t{t}_n{n}.txt"

    @staticmethod
    def _write_witness(obj: Instance, name: str, witness_dir: Optional[Union[str, Path]]) -> Optional[str]:
        if witness_dir is None:
            return None
        path = Path(witness_dir) / name
        codec_service.write(obj, path)
        return str(path)

    @staticmethod
    def exact_row(
        kind: RamseyKind,
        t: int,
        n: int,
        cap: Optional[int] = None,
        threads: Optional[int] = None,
        session: Optional[Session] = None,
        witness_dir: Optional[Union[str, Path]] = None,
    ) -> RamseyRow:
        """m*(n) by enumerating every isomorphism class on n vertices."""
        if t < 1 or n < 1:
            raise SizeError("t and n must be at least 1")
        if cap is None:
            cap = settings.RAMSEY_COLOURING_CAP if kind is RamseyKind.COLOURING else settings.RAMSEY_TOURNAMENT_CAP
        if n > cap:
            raise CapExceededError(n, cap, hint="exhaustive enumeration; use `ramsey mine` for larger n")
        if session is not None:
            cached = RamseyService._cached_row(session, kind, t, n, witness_dir)
            if cached is not None:
                return cached
        started = time.perf_counter()
        directed = kind is RamseyKind.TOURNAMENT
        classes = _classes(n, directed)

        def evaluate(rows: Rows) -> Optional[int]:
            obj = RamseyService.instance_from_rows(kind, n, rows)
            if not RamseyService.is_pattern_free(obj, t):
                return None
            return RamseyService.farness_numerator(obj)

        workers = max(1, threads or settings.THREADS)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, classes))
        free = [(value, i) for i, value in enumerate(values) if value is not None]
        # the transitive tournament and the monochromatic colouring are always free
        best_value, best_index = max(free, key=lambda x: (x[0], -x[1]))
        witness = RamseyService.instance_from_rows(kind, n, classes[best_index])
        row = RamseyRow(
            kind=kind,
            t=t,
            n=n,
            threshold=best_value,
            delta=fraction_text(Fraction(best_value, n * n)),
            exhaustive=True,
            classes=len(classes),
            free_classes=len(free),
            witness=codec_service.encode(witness),
            witness_path=RamseyService._write_witness(witness, RamseyService.witness_name(kind, t, n), witness_dir),
        )
        row.verified = not RamseyService.verify_row(row)
        logger.info(
            "m*(%d) = %d for %s, t=%d over %d classes (%.2fs)",
            n, best_value, kind.value, t, len(classes), time.perf_counter() - started,
        )
        if session is not None:
            ramsey_repository.create(session, obj_in=row)
        return row

    @staticmethod
    def _cached_row(
        session: Session, kind: RamseyKind, t: int, n: int, witness_dir: Optional[Union[str, Path]]
    ) -> Optional[RamseyRow]:
        record = ramsey_repository.get_row(session, kind=kind.value, t=t, n=n)
        if record is None:
            return None
        row = RamseyRow(
            kind=kind,
            t=t,
            n=n,
            threshold=record.threshold,
            delta=fraction_text(Fraction(record.threshold, n * n)),
            exhaustive=True,
            classes=record.classes or 0,
            free_classes=record.free_classes or 0,
            witness=record.witness,
        )
        failures = RamseyService.verify_row(row)
        if failures:
            logger.warning("cached %s row t=%d n=%d failed re-verification: %s", kind.value, t, n, failures)
            ramsey_repository.remove(session, id=record.id)
            return None
        row.verified = True
        witness = codec_service.decode(row.witness)
        row.witness_path = RamseyService._write_witness(witness, RamseyService.witness_name(kind, t, n), witness_dir)
        logger.debug("%s row t=%d n=%d served from cache", kind.value, t, n)
        return row

    @staticmethod
    def verify_row(row: RamseyRow) -> List[str]:
        """Re-check a row's witness from its text: size, pattern absence and value."""
        expected = TwoColouring if row.kind is RamseyKind.COLOURING else Tournament
        obj = codec_service.decode_as(row.witness, expected)
        failures: List[str] = []
        if obj.n != row.n:
            failures.append(f"witness has {obj.n} vertices, row says {row.n}")
        if not RamseyService.is_pattern_free(obj, row.t):
            failures.append("witness contains the pattern")
        value = RamseyService.farness_numerator(obj)
        if value != row.threshold:
            failures.append(f"witness farness numerator {value} differs from {row.threshold}")
        return failures

    @staticmethod
    def colouring_exact(t: int, n: int, **kwargs) -> RamseyRow:
        return RamseyService.exact_row(RamseyKind.COLOURING, t, n, **kwargs)

    @staticmethod
    def tournament_exact(t: int, n: int, **kwargs) -> RamseyRow:
        return RamseyService.exact_row(RamseyKind.TOURNAMENT, t, n, **kwargs)

    @staticmethod
    def mine(
        kind: RamseyKind,
        t: int,
        n: int,
        target: Optional[int] = None,
        seed: int = 0,
        budget: int = 1000,
        start: Optional[Instance] = None,
        near_miss: bool = True,
        witness_dir: Optional[Union[str, Path]] = None,
    ) -> MinerResult:
        """Seeded annealing for a pattern-free instance with farness numerator
        >= target. The temperature schedule does not depend on `budget`, so a
        larger budget extends the same trajectory."""
        if t < 1 or n < 2:
            raise SizeError("expected t >= 1 and n >= 2")
        if kind is RamseyKind.TOURNAMENT and n > settings.EXACT_FAS_CAP:
            raise CapExceededError(n, settings.EXACT_FAS_CAP, hint="tournament mining scores with exact FAS")
        if start is None:
            rows = [0] * n if kind is RamseyKind.COLOURING else [full_mask(n) & ~full_mask(v + 1) for v in range(n)]
        else:
            if start.n != n:
                raise PreconditionError(f"start instance has {start.n} vertices, expected {n}")
            if not RamseyService.is_pattern_free(start, t):
                raise PreconditionError("start instance contains the pattern")
            rows = list(start.red_rows if isinstance(start, TwoColouring) else start.out)
        rng = random.Random(seed)
        annealer = _Annealer(kind, t, n, rows, near_miss)
        score = annealer.score(rows)
        best_rows, best_score, best_near = list(rows), score, annealer.near_misses
        temperature = INITIAL_TEMPERATURE
        steps = accepted = 0
        while steps < budget and not (target is not None and best_score >= target):
            steps += 1
            u, v = annealer.pairs[rng.randrange(len(annealer.pairs))]
            proposal = annealer.try_flip(u, v)
            draw = rng.random()
            temperature = max(temperature * COOLING, MIN_TEMPERATURE)
            if proposal is None:
                continue
            new_rows, new_near = proposal
            new_score = annealer.score(new_rows)
            gain = annealer.energy(new_score, new_near) - annealer.energy(score, annealer.near_misses)
            if gain >= 0 or draw < math.exp(gain / temperature):
                annealer.rows, annealer.near_misses, score = new_rows, new_near, new_score
                accepted += 1
                if (score, -new_near) > (best_score, -best_near):
                    best_rows, best_score, best_near = list(new_rows), score, new_near
        best = RamseyService.instance_from_rows(kind, n, best_rows)
        found = target is None or best_score >= target
        if found and (not RamseyService.is_pattern_free(best, t) or RamseyService.farness_numerator(best) != best_score):
            raise AssertionError("miner state lost its invariant")
        logger.info(
            "miner %s t=%d n=%d: best %d after %d steps (%d accepted)",
            kind.value, t, n, best_score, steps, accepted,
        )
        witness_text = codec_service.encode(best) if found else None
        path = None
        if found:
            name = f"ramsey_{kind.value}_t{t}_n{n}_mined_s{seed}.txt"
            path = RamseyService._write_witness(best, name, witness_dir)
        return MinerResult(
            kind=kind,
            t=t,
            n=n,
            target=target,
            found=found,
            best_value=best_score,
            steps=steps,
            accepted=accepted,
            near_misses=best_near,
            witness=witness_text,
            witness_path=path,
        )

    @staticmethod
    def build_table(
        kind: RamseyKind,
        t: int,
        ns: Sequence[int],
        threads: Optional[int] = None,
        session: Optional[Session] = None,
        witness_dir: Optional[Union[str, Path]] = None,
    ) -> RamseyTable:
        rows = [
            RamseyService.exact_row(kind, t, n, threads=threads, session=session, witness_dir=witness_dir)
            for n in sorted(set(ns))
        ]
        return RamseyTable(kind=kind, t=t, rows=rows, fitted_exponent=RamseyService.fitted_exponent(rows))

    @staticmethod
    def fitted_exponent(rows: Sequence[RamseyRow]) -> Optional[float]:
        """Least-squares slope of log(m*(n)/n^2) against log n."""
        points = [(row.n, row.threshold) for row in rows if row.threshold > 0]
        if len({n for n, _ in points}) < 2:
            return None
        x = np.log(np.array([n for n, _ in points], dtype=float))
        y = np.log(np.array([m / (n * n) for n, m in points], dtype=float))
        slope, _ = np.polyfit(x, y, 1)
        return round(float(slope), 6)


ramsey_service = RamseyService()
