import random
from itertools import combinations

from hypothesis import given
import hypothesis.strategies as st

from app.core.bits import mask_of
from app.services.canonical_service import canonical_service
from app.services.generator_service import generator_service
from tests.oracles import isomorphic


def random_graph_rows(n, seed, p=0.5):
    rng = random.Random(seed)
    rows = [0] * n
    for u, v in combinations(range(n), 2):
        if rng.random() < p:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return tuple(rows)


def relabel(rows, perm):
    out = [0] * len(rows)
    for u, row in enumerate(rows):
        out[perm[u]] = mask_of(perm[v] for v in range(len(rows)) if row >> v & 1)
    return tuple(out)


@given(st.integers(min_value=1, max_value=9), st.integers(min_value=0, max_value=10**6))
def test_certificate_is_invariant_under_relabelling(n, seed):
    rows = random_graph_rows(n, seed)
    perm = generator_service.random_permutation(n, seed + 1)
    assert canonical_service.certificate(n, rows) == canonical_service.certificate(n, relabel(rows, perm))


@given(st.integers(min_value=1, max_value=9), st.integers(min_value=0, max_value=10**6))
def test_tournament_certificate_is_invariant_under_relabelling(n, seed):
    tournament = generator_service.random_tournament(n, seed)
    perm = generator_service.random_permutation(n, seed + 7)
    assert canonical_service.certificate(n, tournament.out) == canonical_service.certificate(
        n, tournament.relabelled(perm).out
    )


@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=10**6))
def test_certificates_agree_with_isomorphism(n, seed):
    a = random_graph_rows(n, seed)
    b = random_graph_rows(n, seed + 1)
    same = canonical_service.certificate(n, a) == canonical_service.certificate(n, b)
    assert same == isomorphic(n, a, b, directed=False)


def test_canonical_labelling_is_a_permutation_reproducing_the_certificate():
    tournament = generator_service.random_tournament(8, 3)
    certificate, labels = canonical_service.canonical_labelling(8, tournament.out)
    assert sorted(labels) == list(range(8))
    assert relabel(tournament.out, labels) == certificate


def test_vertex_transitive_graph():
    # C_6 has 12 automorphisms; every relabelling must land on one certificate
    cycle = tuple(mask_of({(v - 1) % 6, (v + 1) % 6}) for v in range(6))
    certificates = {
        canonical_service.certificate(6, relabel(cycle, generator_service.random_permutation(6, s)))
        for s in range(20)
    }
    assert len(certificates) == 1
