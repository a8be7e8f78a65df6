import logging
from typing import Dict, List, Optional, Sequence, Tuple

from app.core.bits import iter_bits, mask_of, popcount

logger = logging.getLogger(__name__)

Cells = List[List[int]]
Certificate = Tuple[int, ...]


class _Orbits:
    """Union-find over vertex ids."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, u: int, v: int) -> None:
        ru, rv = self.find(u), self.find(v)
        if ru != rv:
            self.parent[max(ru, rv)] = min(ru, rv)


def _transpose(n: int, out: Sequence[int]) -> Tuple[int, ...]:
    into = [0] * n
    for u in range(n):
        for v in iter_bits(out[u]):
            into[v] |= 1 << u
    return tuple(into)


def _refine(out: Sequence[int], into: Sequence[int], cells: Cells) -> Cells:
    """Equitable refinement: split every cell by its vertices' out/in counts
    into each cell, until stable. Split order depends only on signatures."""
    while True:
        masks = [mask_of(cell) for cell in cells]
        refined: Cells = []
        for cell in cells:
            if len(cell) == 1:
                refined.append(cell)
                continue
            groups: Dict[tuple, List[int]] = {}
            for v in cell:
                signature = tuple((popcount(out[v] & m), popcount(into[v] & m)) for m in masks)
                groups.setdefault(signature, []).append(v)
            refined.extend(groups[key] for key in sorted(groups))
        if len(refined) == len(cells):
            return refined
        cells = refined


def _relabel(n: int, out: Sequence[int], labels: Sequence[int]) -> Certificate:
    rows = [0] * n
    for u in range(n):
        rows[labels[u]] = mask_of(labels[w] for w in iter_bits(out[u]))
    return tuple(rows)


class CanonicalService:
    """Canonical labelling of (di)graphs given as bitset rows.

    Individualization-refinement: refine the partition, individualize each
    vertex of the first non-singleton cell in turn, and keep the lexicographically
    least relabelled row tuple over all leaves. Subtrees equivalent under
    automorphisms fixing the individualized prefix are skipped.
    Undirected graphs pass symmetric rows.
    """

    @staticmethod
    def canonical_labelling(n: int, out: Sequence[int]) -> Tuple[Certificate, Tuple[int, ...]]:
        """(certificate, labels) where labels[v] is the canonical label of v."""
        if n == 0:
            return (), ()
        into = _transpose(n, out)
        best: List[Optional[Certificate]] = [None]
        best_labels: List[Tuple[int, ...]] = [()]
        automorphisms: List[Tuple[int, ...]] = []

        def leaf(cells: Cells) -> None:
            labels = [0] * n
            for i, cell in enumerate(cells):
                labels[cell[0]] = i
            certificate = _relabel(n, out, labels)
            if best[0] is None or certificate < best[0]:
                best[0], best_labels[0] = certificate, tuple(labels)
            elif certificate == best[0]:
                # v -> u where u has the same canonical label in the best leaf
                inverse = [0] * n
                for u, label in enumerate(best_labels[0]):
                    inverse[label] = u
                automorphisms.append(tuple(inverse[labels[v]] for v in range(n)))

        def search(cells: Cells, prefix: Tuple[int, ...]) -> None:
            cells = _refine(out, into, cells)
            index = next((i for i, cell in enumerate(cells) if len(cell) > 1), None)
            if index is None:
                leaf(cells)
                return
            target = cells[index]
            explored: List[int] = []
            for v in target:
                orbits = _Orbits(n)
                for gamma in automorphisms:
                    if all(gamma[p] == p for p in prefix):
                        for u in target:
                            orbits.union(u, gamma[u])
                if any(orbits.find(v) == orbits.find(w) for w in explored):
                    continue
                explored.append(v)
                rest = [u for u in target if u != v]
                search(cells[:index] + [[v], rest] + cells[index + 1 :], prefix + (v,))

        search([list(range(n))], ())
        assert best[0] is not None
        return best[0], best_labels[0]

    @staticmethod
    def certificate(n: int, out: Sequence[int]) -> Certificate:
        """Rows of the canonically relabelled object; equal iff isomorphic."""
        return CanonicalService.canonical_labelling(n, out)[0]


canonical_service = CanonicalService()
