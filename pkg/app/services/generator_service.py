import logging
import random
from itertools import combinations

from app.core.bits import above, mask_of
from app.schemas.graphs import Ordering, Tournament, TwoColouring

logger = logging.getLogger(__name__)


class GeneratorService:
    """Basic objects. Random generators follow RNG contract version 1:
    random.Random(seed) (MT19937), pairs (u, v) with u < v visited in
    lexicographic order."""

    @staticmethod
    def transitive_tournament(n: int) -> Tournament:
        """All edges i -> j for i < j."""
        return Tournament(n=n, out=tuple(above(i, n) for i in range(n)))

    @staticmethod
    def cyclic_blowup(t: int) -> Tournament:
        """The unavoidable t-tournament on 3t vertices: classes {0..t-1},
        {t..2t-1}, {2t..3t-1}, each transitive by increasing id, with cross
        edges class k -> class k+1 (mod 3)."""
        if t < 1:
            raise ValueError("t must be at least 1")
        n = 3 * t
        rows = []
        for v in range(n):
            k, i = divmod(v, t)
            inside = mask_of(range(k * t + i + 1, (k + 1) * t))
            nxt = (k + 1) % 3
            rows.append(inside | mask_of(range(nxt * t, (nxt + 1) * t)))
        return Tournament(n=n, out=tuple(rows))

    @staticmethod
    def random_tournament(n: int, seed: int) -> Tournament:
        """Each pair oriented by getrandbits(1): 1 means u -> v."""
        rng = random.Random(seed)
        rows = [0] * n
        for u, v in combinations(range(n), 2):
            if rng.getrandbits(1):
                rows[u] |= 1 << v
            else:
                rows[v] |= 1 << u
        return Tournament(n=n, out=tuple(rows))

    @staticmethod
    def random_colouring(n: int, seed: int, p: float = 0.5) -> TwoColouring:
        """Each pair red iff random() < p."""
        rng = random.Random(seed)
        red = [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p]
        return TwoColouring(n=n, red=frozenset(red))

    @staticmethod
    def random_ordering(n: int, seed: int) -> Ordering:
        perm = list(range(n))
        random.Random(seed).shuffle(perm)
        return Ordering(perm=tuple(perm))

    @staticmethod
    def random_permutation(n: int, seed: int) -> list:
        perm = list(range(n))
        random.Random(seed).shuffle(perm)
        return perm

    @staticmethod
    def cyclic_triangle() -> Tournament:
        """0 -> 1 -> 2 -> 0."""
        return Tournament.from_edges(3, [(0, 1), (1, 2), (2, 0)])


generator_service = GeneratorService()
