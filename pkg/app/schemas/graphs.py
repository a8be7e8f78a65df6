from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Any, Dict, FrozenSet, Iterable, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.bits import full_mask, iter_bits, mask_of, popcount

Pair = Tuple[int, int]


class FrozenModel(BaseModel):
    """Immutable model; equality and hashing look at declared fields only,
    so cached derived structures never leak into comparisons."""

    model_config = ConfigDict(frozen=True)

    def _key(self) -> tuple:
        return tuple(getattr(self, name) for name in type(self).model_fields)

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        return self._key() == other._key()  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return hash((type(self).__name__,) + self._key())


class Colour(str, Enum):
    RED = "red"
    BLUE = "blue"

    @property
    def other(self) -> "Colour":
        return Colour.BLUE if self is Colour.RED else Colour.RED


def _normalise_pairs(pairs: Iterable[Sequence[int]]) -> FrozenSet[Pair]:
    return frozenset((min(u, v), max(u, v)) for u, v in pairs)


def _rows_from_pairs(n: int, pairs: Iterable[Pair]) -> Tuple[int, ...]:
    rows = [0] * n
    for u, v in pairs:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return tuple(rows)


def _check_pairs(n: int, pairs: Iterable[Pair], what: str) -> None:
    for u, v in pairs:
        if not 0 <= u < v < n:
            raise ValueError(f"{what} pair ({u}, {v}) violates 0 <= u < v < {n}")


class Graph(FrozenModel):
    """Simple undirected graph on vertices 0..n-1."""

    n: int = Field(..., ge=0)
    edges: FrozenSet[Pair] = frozenset()

    @model_validator(mode="after")
    def _check_edges(self) -> "Graph":
        _check_pairs(self.n, self.edges, "edge")
        return self

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Graph":
        return cls(n=n, edges=_normalise_pairs(pairs))

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[int]) -> "Graph":
        return cls(n=n, edges=frozenset((u, v) for u in range(n) for v in iter_bits(rows[u]) if u < v))

    @cached_property
    def rows(self) -> Tuple[int, ...]:
        return _rows_from_pairs(self.n, self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, v: int) -> int:
        return popcount(self.rows[v])

    def sorted_edges(self) -> List[Pair]:
        return sorted(self.edges)

    def without_edge(self, edge: Pair) -> "Graph":
        return Graph(n=self.n, edges=self.edges - {(min(edge), max(edge))})


class TwoColouring(FrozenModel):
    """Red/blue colouring of K_n. Only red pairs are stored; blue is the complement."""

    n: int = Field(..., ge=1)
    red: FrozenSet[Pair] = frozenset()

    @model_validator(mode="after")
    def _check_red(self) -> "TwoColouring":
        _check_pairs(self.n, self.red, "red")
        return self

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "TwoColouring":
        return cls(n=n, red=_normalise_pairs(pairs))

    @classmethod
    def from_rows(cls, n: int, red_rows: Sequence[int]) -> "TwoColouring":
        return cls(n=n, red=Graph.from_rows(n, red_rows).edges)

    @cached_property
    def red_rows(self) -> Tuple[int, ...]:
        return _rows_from_pairs(self.n, self.red)

    @cached_property
    def blue_rows(self) -> Tuple[int, ...]:
        full = full_mask(self.n)
        return tuple(full ^ (1 << v) ^ row for v, row in enumerate(self.red_rows))

    def rows(self, colour: Colour) -> Tuple[int, ...]:
        return self.red_rows if colour is Colour.RED else self.blue_rows

    @property
    def pair_count(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def red_count(self) -> int:
        return len(self.red)

    @property
    def blue_count(self) -> int:
        return self.pair_count - len(self.red)

    def count(self, colour: Colour) -> int:
        return self.red_count if colour is Colour.RED else self.blue_count

    def colour_of(self, u: int, v: int) -> Colour:
        return Colour.RED if self.red_rows[u] >> v & 1 else Colour.BLUE

    def swapped(self) -> "TwoColouring":
        return TwoColouring(
            n=self.n,
            red=frozenset(p for p in combinations(range(self.n), 2) if p not in self.red),
        )

    def relabelled(self, perm: Sequence[int]) -> "TwoColouring":
        """perm[v] is the new label of vertex v."""
        return TwoColouring.from_pairs(self.n, ((perm[u], perm[v]) for u, v in self.red))

    def induced(self, vertices: Sequence[int]) -> "TwoColouring":
        """Colouring of the pairs inside `vertices`; vertices[i] becomes vertex i."""
        index = {v: i for i, v in enumerate(vertices)}
        return TwoColouring.from_pairs(
            len(vertices), ((index[u], index[v]) for u, v in self.red if u in index and v in index)
        )

    def colour_graph(self, colour: Colour) -> Graph:
        if colour is Colour.RED:
            return Graph(n=self.n, edges=self.red)
        return Graph.from_rows(self.n, self.blue_rows)


class BipartiteGraph(FrozenModel):
    """Bipartite graph between classes A (indices 0..a_size-1) and B (0..b_size-1).

    a_labels / b_labels embed the classes into the vertex set 0..a_size+b_size-1;
    by default A comes first, then B.
    """

    a_size: int = Field(..., ge=0)
    b_size: int = Field(..., ge=0)
    edges: FrozenSet[Pair] = frozenset()
    a_labels: Tuple[int, ...] = ()
    b_labels: Tuple[int, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _default_labels(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            a, b = data.get("a_size", 0), data.get("b_size", 0)
            if not data.get("a_labels"):
                data["a_labels"] = tuple(range(a))
            if not data.get("b_labels"):
                data["b_labels"] = tuple(range(a, a + b))
        return data

    @model_validator(mode="after")
    def _check(self) -> "BipartiteGraph":
        for i, j in self.edges:
            if not (0 <= i < self.a_size and 0 <= j < self.b_size):
                raise ValueError(f"edge ({i}, {j}) out of bounds for {self.a_size}x{self.b_size}")
        if len(self.a_labels) != self.a_size or len(self.b_labels) != self.b_size:
            raise ValueError("label tuples must match class sizes")
        if sorted(self.a_labels + self.b_labels) != list(range(self.n)):
            raise ValueError("class labels must partition 0..a_size+b_size-1")
        return self

    @property
    def n(self) -> int:
        return self.a_size + self.b_size

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def rows(self) -> Tuple[int, ...]:
        """rows[i] is the mask of B-indices adjacent to A-index i."""
        rows = [0] * self.a_size
        for i, j in self.edges:
            rows[i] |= 1 << j
        return tuple(rows)

    def labelled_edges(self) -> List[Pair]:
        """Edges as (a_label, b_label) pairs in the host vertex set."""
        return sorted((self.a_labels[i], self.b_labels[j]) for i, j in self.edges)


class Ordering(FrozenModel):
    """perm[i] is the vertex at position i (0-based)."""

    perm: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_perm(self) -> "Ordering":
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("ordering must be a permutation of 0..n-1")
        return self

    @classmethod
    def identity(cls, n: int) -> "Ordering":
        return cls(perm=tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.perm)

    @cached_property
    def position(self) -> Tuple[int, ...]:
        pos = [0] * len(self.perm)
        for i, v in enumerate(self.perm):
            pos[v] = i
        return tuple(pos)

    def reversed(self) -> "Ordering":
        return Ordering(perm=self.perm[::-1])


class Tournament(FrozenModel):
    """Orientation of K_n; out[u] has bit v set iff u -> v."""

    n: int = Field(..., ge=1)
    out: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_orientation(self) -> "Tournament":
        if len(self.out) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.out)}")
        full = full_mask(self.n)
        into = [0] * self.n
        for u, row in enumerate(self.out):
            if row < 0 or row & ~full:
                raise ValueError(f"row {u} points outside 0..{self.n - 1}")
            if row >> u & 1:
                raise ValueError(f"self-loop at {u}")
            for v in iter_bits(row):
                into[v] |= 1 << u
        for v in range(self.n):
            if self.out[v] & into[v] or (self.out[v] | into[v]) != full ^ (1 << v):
                raise ValueError(f"antisymmetry fails at vertex {v}")
        return self

    @classmethod
    def from_rows(cls, rows: Sequence[int]) -> "Tournament":
        return cls(n=len(rows), out=tuple(rows))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Pair]) -> "Tournament":
        rows = [0] * n
        for u, v in edges:
            rows[u] |= 1 << v
        return cls(n=n, out=tuple(rows))

    @cached_property
    def into(self) -> Tuple[int, ...]:
        full = full_mask(self.n)
        return tuple(full ^ (1 << v) ^ row for v, row in enumerate(self.out))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.out[u] >> v & 1)

    def edges(self) -> List[Pair]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.out[u])]

    @property
    def edge_count(self) -> int:
        return self.n * (self.n - 1) // 2

    def out_degree(self, v: int) -> int:
        return popcount(self.out[v])

    @cached_property
    def scores(self) -> Tuple[int, ...]:
        return tuple(popcount(row) for row in self.out)

    def is_transitive(self) -> bool:
        return sorted(self.scores) == list(range(self.n))

    def reversed(self) -> "Tournament":
        return Tournament(n=self.n, out=self.into)

    def relabelled(self, perm: Sequence[int]) -> "Tournament":
        """perm[v] is the new label of vertex v."""
        rows = [0] * self.n
        for u in range(self.n):
            rows[perm[u]] = mask_of(perm[v] for v in iter_bits(self.out[u]))
        return Tournament(n=self.n, out=tuple(rows))

    def induced(self, vertices: Sequence[int]) -> "Tournament":
        """Subtournament on `vertices`; vertices[i] becomes vertex i."""
        index: Dict[int, int] = {v: i for i, v in enumerate(vertices)}
        keep = mask_of(vertices)
        rows = [mask_of(index[w] for w in iter_bits(self.out[v] & keep)) for v in vertices]
        return Tournament(n=len(vertices), out=tuple(rows))

    def with_reversed(self, edges: Iterable[Pair]) -> "Tournament":
        """Reverse each listed edge; every (u, v) must currently be u -> v."""
        rows = list(self.out)
        for u, v in edges:
            if not rows[u] >> v & 1:
                raise ValueError(f"({u}, {v}) is not an edge u -> v")
            rows[u] ^= 1 << v
            rows[v] |= 1 << u
        return Tournament(n=self.n, out=tuple(rows))
