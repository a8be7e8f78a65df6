"""Brute-force ground truth, independent of the bitset search code."""
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterator, List, Sequence, Tuple

import networkx as nx
import numpy as np

from app.schemas.graphs import Graph, Tournament, TwoColouring


def _same(c: TwoColouring, pairs, red: bool) -> bool:
    return all(((min(u, v), max(u, v)) in c.red) == red for u, v in pairs)


def colouring_has_pattern(c: TwoColouring, t: int) -> bool:
    for subset in combinations(range(c.n), 2 * t):
        for q in combinations(subset, t):
            r = [v for v in subset if v not in q]
            cross = [(u, v) for u in q for v in r]
            for red in (True, False):
                inside_q = _same(c, combinations(q, 2), red)
                if not inside_q or not _same(c, cross, not red):
                    continue
                if _same(c, combinations(r, 2), not red) or _same(c, combinations(r, 2), red):
                    return True
    return False


def _transitive(tournament: Tournament, vertices: Sequence[int]) -> bool:
    return all(
        not (tournament.has_edge(a, b) and tournament.has_edge(b, c) and tournament.has_edge(c, a))
        for a, b, c in permutations(vertices, 3)
    )


def tournament_has_pattern(tournament: Tournament, t: int) -> bool:
    for subset in combinations(range(tournament.n), 3 * t):
        first, rest = subset[0], subset[1:]
        for others in combinations(rest, t - 1):
            v1 = (first,) + others
            remaining = [v for v in rest if v not in others]
            for v2 in combinations(remaining, t):
                v3 = [v for v in remaining if v not in v2]
                classes = (v1, v2, v3)
                if not all(_transitive(tournament, cls) for cls in classes):
                    continue
                if all(
                    tournament.has_edge(u, w)
                    for k in range(3)
                    for u in classes[k]
                    for w in classes[(k + 1) % 3]
                ):
                    return True
    return False


@lru_cache(maxsize=None)
def _positions(n: int) -> np.ndarray:
    """Row k holds the position of every vertex under the k-th permutation."""
    return np.argsort(np.array(list(permutations(range(n))), dtype=np.int8).reshape(-1, n), axis=1)


def brute_fas(tournament: Tournament) -> int:
    edges = tournament.edges()
    if not edges:
        return 0
    pos = _positions(tournament.n)
    heads = np.array([u for u, _ in edges])
    tails = np.array([v for _, v in edges])
    return int((pos[:, heads] > pos[:, tails]).sum(axis=1).min())


def all_tournaments(n: int) -> Iterator[Tournament]:
    pairs = list(combinations(range(n), 2))
    for bits in product((0, 1), repeat=len(pairs)):
        yield Tournament.from_edges(n, [(u, v) if b else (v, u) for (u, v), b in zip(pairs, bits)])


def all_colourings(n: int) -> Iterator[TwoColouring]:
    pairs = list(combinations(range(n), 2))
    for bits in product((0, 1), repeat=len(pairs)):
        yield TwoColouring(n=n, red=frozenset(p for p, b in zip(pairs, bits) if b))


def has_biclique(graph: Graph, a: int, b: int) -> bool:
    for side in combinations(range(graph.n), a):
        common = [w for w in range(graph.n) if w not in side and all(graph.has_edge(w, v) for v in side)]
        if len(common) >= b:
            return True
    return False


def brute_ex(n: int, a: int, b: int) -> int:
    pairs = list(combinations(range(n), 2))
    best = 0
    for bits in product((0, 1), repeat=len(pairs)):
        edges = [p for p, bit in zip(pairs, bits) if bit]
        if len(edges) > best and not has_biclique(Graph.from_pairs(n, edges), a, b):
            best = len(edges)
    return best


def transitive_set_exists(tournament: Tournament, t: int) -> bool:
    return any(_transitive(tournament, s) for s in combinations(range(tournament.n), t))


def isomorphic(n: int, rows_a: Sequence[int], rows_b: Sequence[int], directed: bool) -> bool:
    def build(rows: Sequence[int]):
        g = nx.DiGraph() if directed else nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from((u, v) for u in range(n) for v in range(n) if rows[u] >> v & 1)
        return g

    return nx.is_isomorphic(build(rows_a), build(rows_b))


def backward_pairs(tournament: Tournament, perm: Sequence[int]) -> List[Tuple[int, int]]:
    pos = {v: i for i, v in enumerate(perm)}
    return sorted((u, v) for u, v in tournament.edges() if pos[u] > pos[v])


def _monochromatic(c: TwoColouring, vertices: Sequence[int]) -> bool:
    pairs = list(combinations(vertices, 2))
    return _same(c, pairs, True) or _same(c, pairs, False)


def colouring_has_pattern_by_neighbourhoods(c: TwoColouring, t: int) -> bool:
    """Same answer as colouring_has_pattern, searched from the clique side:
    for every monochromatic t-set Q, look for a monochromatic t-set among the
    vertices joined to all of Q in the other colour."""
    for q in combinations(range(c.n), t):
        for red in (True, False):
            if not _same(c, combinations(q, 2), red):
                continue
            joined = [w for w in range(c.n) if w not in q and _same(c, [(w, v) for v in q], not red)]
            if any(_monochromatic(c, r) for r in combinations(joined, t)):
                return True
    return False


def tournament_has_pattern_by_neighbourhoods(tournament: Tournament, t: int) -> bool:
    """Same answer as tournament_has_pattern: V2 is drawn from the common
    out-neighbourhood of V1, V3 from vertices beaten by V2 that beat V1."""
    n = tournament.n
    for v1 in combinations(range(n), t):
        if not _transitive(tournament, v1):
            continue
        beaten = [w for w in range(n) if all(tournament.has_edge(u, w) for u in v1)]
        beating = {w for w in range(n) if all(tournament.has_edge(w, u) for u in v1)}
        for v2 in combinations(beaten, t):
            if not _transitive(tournament, v2):
                continue
            below = [w for w in beating if all(tournament.has_edge(u, w) for u in v2)]
            if any(_transitive(tournament, v3) for v3 in combinations(sorted(below), t)):
                return True
    return False
