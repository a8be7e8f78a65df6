import logging
from pathlib import Path
from typing import Iterator, List, Set, Tuple, Union

from app.core.exceptions import ParseError
from app.schemas.graphs import BipartiteGraph, Graph, Tournament, TwoColouring

logger = logging.getLogger(__name__)

Instance = Union[Tournament, TwoColouring, BipartiteGraph, Graph]

# header keyword -> number of integer parameters
HEADERS = {"tournament": 1, "colouring": 1, "graph": 1, "bipartite": 2}

Token = Tuple[str, int]  # text, 1-based column


def _tokens(line: str) -> List[Token]:
    tokens: List[Token] = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        start = i
        while i < len(line) and not line[i].isspace():
            i += 1
        tokens.append((line[start:i], start + 1))
    return tokens


def _content_lines(text: str) -> Iterator[Tuple[int, List[Token]]]:
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, _tokens(line)


def _integer(token: Token, line: int) -> int:
    text, column = token
    if not text.isdigit():
        raise ParseError(f"expected a non-negative decimal integer, got {text!r}", line, column)
    return int(text)


def _pair(tokens: List[Token], line: int) -> Tuple[int, int, int, int]:
    if len(tokens) != 2:
        column = tokens[2][1] if len(tokens) > 2 else 1
        raise ParseError(f"expected 2 integers per line, got {len(tokens)}", line, column)
    return _integer(tokens[0], line), _integer(tokens[1], line), tokens[0][1], tokens[1][1]


class CodecService:
    """Text formats: a header line `<kind> <sizes>` followed by one `u v` line per edge."""

    @staticmethod
    def encode(obj: Instance) -> str:
        if isinstance(obj, Tournament):
            lines = [f"tournament {obj.n}"] + [f"{u} {v}" for u, v in obj.edges()]
        elif isinstance(obj, TwoColouring):
            lines = [f"colouring {obj.n}"] + [f"{u} {v}" for u, v in sorted(obj.red)]
        elif isinstance(obj, BipartiteGraph):
            lines = [f"bipartite {obj.a_size} {obj.b_size}"] + [f"{i} {j}" for i, j in sorted(obj.edges)]
        elif isinstance(obj, Graph):
            lines = [f"graph {obj.n}"] + [f"{u} {v}" for u, v in obj.sorted_edges()]
        else:
            raise TypeError(f"cannot encode {type(obj).__name__}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def decode(text: str) -> Instance:
        lines = _content_lines(text)
        try:
            number, header = next(lines)
        except StopIteration:
            raise ParseError("empty input, expected a header line", 1, 1)
        kind = header[0][0]
        if kind not in HEADERS:
            raise ParseError(f"unknown header {kind!r}; expected one of {sorted(HEADERS)}", number, 1)
        if len(header) != 1 + HEADERS[kind]:
            raise ParseError(f"header {kind!r} takes {HEADERS[kind]} size(s)", number, 1)
        sizes = [_integer(token, number) for token in header[1:]]
        if kind == "tournament":
            return CodecService._decode_tournament(sizes[0], lines, number)
        if kind == "bipartite":
            return CodecService._decode_bipartite(sizes[0], sizes[1], lines)
        if kind == "colouring" and sizes[0] < 1:
            raise ParseError("colouring needs at least one vertex", number, 1)
        pairs = CodecService._decode_simple(sizes[0], lines)
        if kind == "colouring":
            return TwoColouring(n=sizes[0], red=frozenset(pairs))
        return Graph(n=sizes[0], edges=frozenset(pairs))

    @staticmethod
    def _decode_tournament(n: int, lines: Iterator[Tuple[int, List[Token]]], header_line: int) -> Tournament:
        if n < 1:
            raise ParseError("tournament needs at least one vertex", header_line, 1)
        rows = [0] * n
        seen: Set[Tuple[int, int]] = set()
        last = header_line
        for number, tokens in lines:
            last = number
            u, v, cu, cv = _pair(tokens, number)
            for value, column in ((u, cu), (v, cv)):
                if value >= n:
                    raise ParseError(f"vertex {value} out of range 0..{n - 1}", number, column)
            if u == v:
                raise ParseError(f"self-loop at {u}", number, cu)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParseError(f"duplicate edge for pair {key}", number, cu)
            seen.add(key)
            rows[u] |= 1 << v
        expected = n * (n - 1) // 2
        if len(seen) != expected:
            raise ParseError(f"expected {expected} edge lines, got {len(seen)}", last + 1, 1)
        return Tournament(n=n, out=tuple(rows))

    @staticmethod
    def _decode_simple(n: int, lines: Iterator[Tuple[int, List[Token]]]) -> Set[Tuple[int, int]]:
        pairs: Set[Tuple[int, int]] = set()
        for number, tokens in lines:
            u, v, cu, cv = _pair(tokens, number)
            if v >= n:
                raise ParseError(f"vertex {v} out of range 0..{n - 1}", number, cv)
            if not u < v:
                raise ParseError(f"pair must satisfy u < v, got {u} {v}", number, cu)
            if (u, v) in pairs:
                raise ParseError(f"duplicate pair ({u}, {v})", number, cu)
            pairs.add((u, v))
        return pairs

    @staticmethod
    def _decode_bipartite(a: int, b: int, lines: Iterator[Tuple[int, List[Token]]]) -> BipartiteGraph:
        edges: Set[Tuple[int, int]] = set()
        for number, tokens in lines:
            i, j, ci, cj = _pair(tokens, number)
            if i >= a:
                raise ParseError(f"left index {i} out of range 0..{a - 1}", number, ci)
            if j >= b:
                raise ParseError(f"right index {j} out of range 0..{b - 1}", number, cj)
            if (i, j) in edges:
                raise ParseError(f"duplicate edge ({i}, {j})", number, ci)
            edges.add((i, j))
        return BipartiteGraph(a_size=a, b_size=b, edges=frozenset(edges))

    @staticmethod
    def decode_as(text: str, expected: type) -> Instance:
        obj = CodecService.decode(text)
        if not isinstance(obj, expected):
            raise ParseError(f"expected a {expected.__name__} file, got {type(obj).__name__}", 1, 1)
        return obj

    @staticmethod
    def read(path: Union[str, Path]) -> Instance:
        logger.debug("reading %s", path)
        return CodecService.decode(Path(path).read_text())

    @staticmethod
    def write(obj: Instance, path: Union[str, Path]) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(CodecService.encode(obj))
        return target


codec_service = CodecService()
