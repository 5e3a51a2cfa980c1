import random
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from affmodel.homalg import (
    FiniteSimplicialComplex,
    GradedVectorSpace,
    NotSimplicial,
    SimplicialMap,
    cellular_check,
    cochain_complex,
    simplicial_cohomology,
    skeletal_filtration_ss,
)
from affmodel.homalg.simplicial import (
    boundary_of_simplex,
    constant_map,
    hollow_triangle,
    identity_map,
    interval,
    prism,
    simplex,
    two_disjoint_circles,
    two_stage_counterexample,
)

G = GradedVectorSpace.of


def test_missing_face_rejected():
    with pytest.raises(NotSimplicial):
        FiniteSimplicialComplex(frozenset({(0, 1)}))


def test_non_simplicial_map_rejected():
    with pytest.raises(NotSimplicial):
        SimplicialMap(hollow_triangle(), interval(), {0: 0, 1: 1, 2: 2})


@pytest.mark.parametrize("X, H", [
    (simplex(0), G(1)),
    (interval(), G(1)),
    (hollow_triangle(), G(1, 1)),
    (boundary_of_simplex(3), G(1, 0, 1)),
    (simplex(3), G(1)),
    (two_disjoint_circles(), G(2, 2)),
])
def test_cohomology_examples(X, H):
    assert simplicial_cohomology(X) == H
    assert H.euler_characteristic == X.euler_characteristic


def test_relative_cohomology():
    X = interval()
    ends = FiniteSimplicialComplex.from_maximal([(0,), (1,)])
    assert simplicial_cohomology(X, ends) == G(0, 1)


def test_identity_vertex_then_everything():
    X = interval()
    ss = skeletal_filtration_ss(identity_map(X), [FiniteSimplicialComplex.from_maximal([(0,)]), X])
    assert ss.converges and ss.limit == G(1)


def test_prism_projection():
    P, proj = prism()
    ss = skeletal_filtration_ss(proj, up_to_page=3)
    assert ss.converges
    assert ss.limit == simplicial_cohomology(P) == G(1, 1)


def test_constant_map_from_circle():
    ss = skeletal_filtration_ss(constant_map(hollow_triangle()), up_to_page=2)
    assert ss.converges and ss.limit == G(1, 1)


def test_cellular_examples():
    S2 = boundary_of_simplex(3)
    assert cellular_check(S2.skeleta()).ok
    rep = cellular_check(two_stage_counterexample())
    assert not rep.ok and rep.failing() == [1]
    assert cellular_check([]).ok


@st.composite
def complexes(draw, nverts=5):
    tris = draw(st.lists(st.sampled_from(list(combinations(range(nverts), 3))), max_size=4))
    edges = draw(st.lists(st.sampled_from(list(combinations(range(nverts), 2))), max_size=5))
    return FiniteSimplicialComplex.from_maximal(tris + edges, vertices=range(nverts))


@given(complexes())
def test_euler_characteristic_and_connectivity(X):
    H = simplicial_cohomology(X)
    assert H.euler_characteristic == X.euler_characteristic
    # H^0 counts connected components
    parent = {v: v for v in X.vertices}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for a, b in X.by_dimension(1):
        parent[find(a)] = find(b)
    assert H[0] == len({find(v) for v in X.vertices})


@given(complexes(), st.integers(0, 10**6))
def test_skeletal_sequence_converges(X, seed):
    rng = random.Random(seed)
    # a random map to a simplex is simplicial
    vm = {v: rng.randrange(3) for v in X.vertices}
    f = SimplicialMap(X, simplex(2), vm)
    ss = skeletal_filtration_ss(f)
    assert ss.converges
    assert ss.limit == simplicial_cohomology(X)
    C = cochain_complex(X)
    assert set(ss.sequence.euler_characteristics()) == {C.euler_characteristic}
