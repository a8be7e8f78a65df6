import pytest

from app.core.exceptions import ParseError
from app.schemas.graphs import BipartiteGraph, Graph, Tournament, TwoColouring
from app.services.codec_service import codec_service
from app.services.generator_service import generator_service


def test_tournament_text_format():
    text = codec_service.encode(generator_service.cyclic_triangle())
    assert text == "tournament 3\n0 1\n1 2\n2 0\n"
    assert codec_service.decode(text) == generator_service.cyclic_triangle()


def test_comments_and_blank_lines_are_skipped():
    text = "# star\ncolouring 4\n\n0 1\n0 2  \n0 3\n"
    colouring = codec_service.decode_as(text, TwoColouring)
    assert colouring.red == frozenset({(0, 1), (0, 2), (0, 3)})


def test_bipartite_and_graph_files(tmp_path):
    bipartite = BipartiteGraph(a_size=2, b_size=3, edges=frozenset({(0, 0), (1, 2)}))
    path = codec_service.write(bipartite, tmp_path / "h.txt")
    assert codec_service.read(path) == bipartite
    graph = Graph.from_pairs(4, [(0, 1), (2, 3)])
    assert codec_service.decode(codec_service.encode(graph)) == graph


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("digraph 3\n", 1),
        ("tournament 3\n0 1\n1 2\n", 4),
        ("tournament 3\n0 1\n1 x\n2 0\n", 3),
        ("tournament 3\n0 1\n1 0\n2 0\n", 3),
        ("colouring 3\n0 3\n", 2),
        ("colouring 3\n1 0\n", 2),
        ("graph 3\n0 1 2\n", 2),
    ],
)
def test_malformed_input_names_the_line(text, line):
    with pytest.raises(ParseError) as info:
        codec_service.decode(text)
    assert info.value.line == line
    assert f"line {line}" in info.value.message
    assert info.value.exit_code == 2


def test_decode_as_rejects_wrong_kind():
    with pytest.raises(ParseError):
        codec_service.decode_as("colouring 2\n", Tournament)
