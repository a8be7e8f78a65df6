import logging
from itertools import combinations
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

from app.core.bits import above, full_mask, iter_bits, lowest, mask_of, popcount
from app.core.config import settings
from app.core.exceptions import BudgetExhaustedError, SizeError
from app.schemas.graphs import BipartiteGraph, Colour, FrozenModel, Ordering, Tournament, TwoColouring
from app.schemas.witness import DetectionResult, PatternKind, PatternWitness

logger = logging.getLogger(__name__)

Clique = Tuple[int, ...]

# Documented search order; the first witness found is returned.
COLOUR_SEARCH_ORDER = (
    (PatternKind.COLOUR_CLIQUE, Colour.RED),
    (PatternKind.COLOUR_CLIQUE, Colour.BLUE),
    (PatternKind.COLOUR_TWO_CLIQUES, Colour.RED),
    (PatternKind.COLOUR_TWO_CLIQUES, Colour.BLUE),
)


class NodeCounter:
    def __init__(self, budget: Optional[int]):
        self.nodes = 0
        self.budget = budget

    def tick(self) -> None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExhaustedError(self.nodes, self.budget)


class BipartiteRelation(FrozenModel):
    """rows[i] is the mask of right indices related to left index i."""

    left_labels: Tuple[int, ...]
    right_labels: Tuple[int, ...]
    rows: Tuple[int, ...]

    @property
    def left_size(self) -> int:
        return len(self.left_labels)

    @property
    def right_size(self) -> int:
        return len(self.right_labels)

    def transposed(self) -> "BipartiteRelation":
        rows = [0] * self.right_size
        for i, row in enumerate(self.rows):
            for j in iter_bits(row):
                rows[j] |= 1 << i
        return BipartiteRelation(left_labels=self.right_labels, right_labels=self.left_labels, rows=tuple(rows))


def _cliques(
    rows: Sequence[int],
    cand: int,
    k: int,
    counter: NodeCounter,
    guard_rows: Optional[Sequence[int]] = None,
    guard: int = 0,
    need: int = 0,
) -> Iterator[Tuple[Clique, int]]:
    """k-cliques of `rows` inside `cand` in lexicographic order.

    Each chosen vertex v narrows `guard` to guard & guard_rows[v]; branches
    whose guard drops below `need` vertices are cut. Yields (clique, guard).
    """
    if k == 0:
        yield (), guard
        return
    while popcount(cand) >= k:
        v = lowest(cand)
        cand ^= 1 << v
        counter.tick()
        narrowed = guard
        if guard_rows is not None:
            narrowed = guard & guard_rows[v]
            if popcount(narrowed) < need:
                continue
        for rest, final in _cliques(rows, cand & rows[v], k - 1, counter, guard_rows, narrowed, need):
            yield (v,) + rest, final


def _extends_transitively(out: Sequence[int], into: Sequence[int], chosen: int, v: int) -> bool:
    """chosen + {v} stays transitive iff no x in N+(v) beats some y in N-(v) (no cyclic triangle)."""
    ins = into[v] & chosen
    if not ins:
        return True
    for x in iter_bits(out[v] & chosen):
        if out[x] & ins:
            return False
    return True


def _transitive_sets(
    tournament: Tournament,
    cand: int,
    k: int,
    counter: NodeCounter,
    guards: Tuple[Tuple[Sequence[int], int], ...] = (),
    need: int = 0,
    chosen: int = 0,
) -> Iterator[Tuple[Clique, Tuple[int, ...]]]:
    """Transitive k-sets inside `cand` in lexicographic order, each guard mask
    narrowed by its rows per chosen vertex and cut below `need`."""
    if k == 0:
        yield (), tuple(mask for _, mask in guards)
        return
    out, into = tournament.out, tournament.into
    while popcount(cand) >= k:
        v = lowest(cand)
        cand ^= 1 << v
        counter.tick()
        if not _extends_transitively(out, into, chosen, v):
            continue
        narrowed = tuple((rows, mask & rows[v]) for rows, mask in guards)
        if any(popcount(mask) < need for _, mask in narrowed):
            continue
        for rest, masks in _transitive_sets(tournament, cand, k - 1, counter, narrowed, need, chosen | 1 << v):
            yield (v,) + rest, masks


class DetectService:
    """Exact pattern detectors. Witnesses are the first found in the
    documented lexicographic enumeration order."""

    @staticmethod
    def find_unavoidable_colouring(
        c: TwoColouring, t: int, budget: Optional[int] = None
    ) -> DetectionResult:
        if t < 1:
            raise SizeError("t must be at least 1")
        if c.n < 2 * t:
            raise SizeError(f"colouring on {c.n} vertices cannot host a pattern on {2 * t}")
        counter = NodeCounter(budget if budget is not None else settings.DETECT_NODE_BUDGET)
        full = full_mask(c.n)
        for kind, colour in COLOUR_SEARCH_ORDER:
            named, other = c.rows(colour), c.rows(colour.other)
            partner_rows = other if kind is PatternKind.COLOUR_CLIQUE else named
            # Q: clique in the named colour whose common other-colour neighbourhood
            # still holds t vertices; R: t-clique of partner_rows inside it.
            for q, common in _cliques(named, full, t, counter, guard_rows=other, guard=full, need=t):
                for r, _ in _cliques(partner_rows, common, t, counter):
                    witness = PatternWitness(kind=kind, colour=colour, classes=(q, r))
                    logger.debug("colouring witness %s after %d nodes", witness, counter.nodes)
                    return DetectionResult(found=True, witness=witness, nodes_explored=counter.nodes)
        return DetectionResult(found=False, nodes_explored=counter.nodes)

    @staticmethod
    def find_unavoidable_tournament(
        tournament: Tournament, t: int, budget: Optional[int] = None
    ) -> DetectionResult:
        if t < 1:
            raise SizeError("t must be at least 1")
        n = tournament.n
        if n < 3 * t:
            raise SizeError(f"tournament on {n} vertices cannot host a pattern on {3 * t}")
        counter = NodeCounter(budget if budget is not None else settings.DETECT_NODE_BUDGET)
        out, into = tournament.out, tournament.into
        full = full_mask(n)
        # V1 holds the smallest vertex of the copy (rotation); V2 and V3 lie above it.
        for v1, (out1, in1) in _transitive_sets(tournament, full, t, counter, ((out, full), (into, full)), t):
            allowed = above(v1[0], n)
            guards = ((out, in1 & allowed),)
            for v2, (cand3,) in _transitive_sets(tournament, out1 & allowed, t, counter, guards, t):
                for v3, _ in _transitive_sets(tournament, cand3, t, counter):
                    witness = PatternWitness(kind=PatternKind.CYCLIC_BLOWUP, classes=(v1, v2, v3))
                    logger.debug("tournament witness %s after %d nodes", witness, counter.nodes)
                    return DetectionResult(found=True, witness=witness, nodes_explored=counter.nodes)
        return DetectionResult(found=False, nodes_explored=counter.nodes)

    @staticmethod
    def find_unavoidable(
        obj: Union[TwoColouring, Tournament], t: int, budget: Optional[int] = None
    ) -> DetectionResult:
        if isinstance(obj, Tournament):
            return DetectService.find_unavoidable_tournament(obj, t, budget)
        return DetectService.find_unavoidable_colouring(obj, t, budget)

    @staticmethod
    def find_biclique(
        relation: BipartiteRelation, a: int, b: int, budget: Optional[int] = None
    ) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """K_{a,b} with a labels on the left and b on the right, or None.

        Enumerates subsets on the side with fewer candidate subsets (left on ties),
        intersecting neighbour rows; the other side is the lowest indices of the
        common neighbourhood.
        """
        if a < 1 or b < 1:
            raise SizeError("biclique sides must be at least 1")
        if relation.left_size < a or relation.right_size < b:
            return None
        counter = NodeCounter(budget if budget is not None else settings.DETECT_NODE_BUDGET)
        flipped = comb(relation.right_size, b) < comb(relation.left_size, a)
        work = relation.transposed() if flipped else relation
        k, need = (b, a) if flipped else (a, b)
        anything = full_mask(work.left_size)
        for subset, common in _cliques(
            [anything] * work.left_size,
            anything,
            k,
            counter,
            guard_rows=work.rows,
            guard=full_mask(work.right_size),
            need=need,
        ):
            partner = tuple(list(iter_bits(common))[:need])
            side = tuple(work.left_labels[i] for i in subset)
            other = tuple(work.right_labels[j] for j in partner)
            return (other, side) if flipped else (side, other)
        return None

    @staticmethod
    def find_transitive_subtournament(
        tournament: Tournament, t: int, budget: Optional[int] = None
    ) -> Optional[Tuple[int, ...]]:
        """A transitive t-set (sorted), or None.

        Every transitive set has a source v with the rest inside N+(v), so the
        search splits on out-neighbourhoods and memoises failed (mask, k) states.
        """
        if t < 1:
            raise SizeError("t must be at least 1")
        counter = NodeCounter(budget if budget is not None else settings.DETECT_NODE_BUDGET)
        failed: Set[Tuple[int, int]] = set()
        out = tournament.out

        def search(mask: int, k: int) -> Optional[Clique]:
            if k == 0:
                return ()
            if popcount(mask) < k or (mask, k) in failed:
                return None
            for v in iter_bits(mask):
                counter.tick()
                rest = search(out[v] & mask, k - 1)
                if rest is not None:
                    return (v,) + rest
            failed.add((mask, k))
            return None

        found = search(full_mask(tournament.n), t)
        return tuple(sorted(found)) if found is not None else None

    @staticmethod
    def relation_from_bipartite(graph: BipartiteGraph) -> BipartiteRelation:
        return BipartiteRelation(left_labels=graph.a_labels, right_labels=graph.b_labels, rows=graph.rows)

    @staticmethod
    def relation_from_colour(
        c: TwoColouring, colour: Colour, left: Sequence[int], right: Sequence[int]
    ) -> BipartiteRelation:
        rows = c.rows(colour)
        index: Dict[int, int] = {v: j for j, v in enumerate(right)}
        rel = [mask_of(index[w] for w in iter_bits(rows[u]) if w in index) for u in left]
        return BipartiteRelation(left_labels=tuple(left), right_labels=tuple(right), rows=tuple(rel))

    @staticmethod
    def relation_from_backward(
        tournament: Tournament, ordering: Ordering, first: Sequence[int], second: Sequence[int]
    ) -> BipartiteRelation:
        """Left = vertices of the earlier interval, right = the later one; x ~ y iff y -> x."""
        pos = ordering.position
        if first and second and max(pos[v] for v in first) >= min(pos[v] for v in second):
            raise SizeError("first interval must precede the second")
        index: Dict[int, int] = {v: j for j, v in enumerate(second)}
        rel = [mask_of(index[w] for w in iter_bits(tournament.into[x]) if w in index) for x in first]
        return BipartiteRelation(left_labels=tuple(first), right_labels=tuple(second), rows=tuple(rel))

    @staticmethod
    def verify_witness(obj: Union[TwoColouring, Tournament], witness: PatternWitness) -> List[str]:
        """Edge-by-edge recheck; returns the failed conditions (empty when valid)."""
        failures: List[str] = []
        if any(v < 0 or v >= obj.n for v in witness.vertices):
            return ["witness vertex out of range"]
        if witness.kind is PatternKind.CYCLIC_BLOWUP:
            if not isinstance(obj, Tournament):
                return ["cyclic-blowup witness needs a tournament"]
            for k, cls in enumerate(witness.classes):
                if not obj.induced(cls).is_transitive():
                    failures.append(f"class {k + 1} is not transitive")
                nxt = witness.classes[(k + 1) % 3]
                for u in cls:
                    for v in nxt:
                        if not obj.has_edge(u, v):
                            failures.append(f"edge {u}->{v} missing between classes {k + 1} and {(k + 1) % 3 + 1}")
            return failures
        if not isinstance(obj, TwoColouring) or witness.colour is None:
            return ["colour witness needs a colouring"]
        q, r = witness.classes
        named, other = witness.colour, witness.colour.other
        r_colour = named if witness.kind is PatternKind.COLOUR_TWO_CLIQUES else other
        for u, v in combinations(q, 2):
            if obj.colour_of(u, v) is not named:
                failures.append(f"pair ({u}, {v}) in Q is not {named.value}")
        for u, v in combinations(r, 2):
            if obj.colour_of(u, v) is not r_colour:
                failures.append(f"pair ({u}, {v}) in R is not {r_colour.value}")
        for u in q:
            for v in r:
                if obj.colour_of(u, v) is not other:
                    failures.append(f"cross pair ({u}, {v}) is not {other.value}")
        return failures


detect_service = DetectService()
