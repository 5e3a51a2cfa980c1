import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from affmodel.homalg import (
    CochainComplex,
    ComplexError,
    CoverCohomologyData,
    CoverData,
    GradedVectorSpace,
    TwoCoverComplexes,
    cech_cohomology,
    cech_complex,
    cohomology,
    cohomology_data,
    mayer_vietoris,
    mayer_vietoris_split,
    ordered_cech_complex,
    random_cover_data,
    random_two_cover,
    total_complex,
    two_cover_pipeline,
)
from affmodel.homalg.cech import constant_cover_data, one_element_cover, sphere_data, two_element_cover
from affmodel.polyalg import GF, QQ

seeds = st.integers(0, 10**6)
G = GradedVectorSpace.of


def test_sphere():
    assert mayer_vietoris(sphere_data()).as_tuple(0, 2) == (1, 0, 1)


def test_circle_from_two_points():
    data = CoverCohomologyData(G(1), G(1), G(2), {0: [[1], [1]]}, {0: [[1], [1]]})
    assert mayer_vietoris(data).as_tuple(0, 1) == (1, 1)


def test_disjoint_cover_is_direct_sum():
    data = CoverCohomologyData(G(1, 1), G(1, 0, 2), G(), {}, {})
    assert mayer_vietoris(data) == G(1, 1) + G(1, 0, 2)


def test_shape_checked():
    with pytest.raises(ValueError):
        CoverCohomologyData(G(1), G(1), G(2), {0: [[1]]}, {0: [[1], [1]]})


def _zero_diff(H, F):
    return CochainComplex(H.dims, {}, F)


def _mv_via_total_complex(data):
    F = data.field
    cu, cv, cuv = (_zero_diff(H, F) for H in (data.h_u, data.h_v, data.h_uv))
    return cohomology(total_complex(TwoCoverComplexes(cu, cv, cuv, dict(data.r_u), dict(data.r_v))))


@given(seeds, st.sampled_from([QQ, GF(3)]))
def test_mayer_vietoris_matches_double_complex(seed, F):
    data = cohomology_data(random_two_cover(random.Random(seed), field=F))
    assert mayer_vietoris(data) == _mv_via_total_complex(data)


@given(seeds)
def test_mayer_vietoris_matches_total_cohomology(seed):
    tc = random_two_cover(random.Random(seed))
    assert mayer_vietoris(cohomology_data(tc)) == cohomology(total_complex(tc))


def test_one_element_cover():
    C = ordered_cech_complex(one_element_cover(3))
    assert C.dims == {0: 3}
    assert cech_cohomology(one_element_cover(3)) == G(3)


def test_two_element_identity_cover():
    data = two_element_cover(1, 1, 1, [[1]], [[1]])
    assert cech_cohomology(data) == G(1)
    assert cech_cohomology(data, ordered=False) == G(1)


def test_incompatible_restrictions_reported():
    # three opens with pairwise restrictions that do not commute into the triple overlap
    dims = {(0,): 1, (1,): 1, (2,): 1, (0, 1): 1, (0, 2): 1, (1, 2): 1, (0, 1, 2): 1}
    res = {((0,), 1): [[1]], ((0,), 2): [[1]], ((1,), 0): [[1]], ((1,), 2): [[1]],
           ((2,), 0): [[1]], ((2,), 1): [[1]], ((0, 1), 2): [[1]], ((0, 2), 1): [[2]], ((1, 2), 0): [[1]]}
    data = CoverData(3, dims, res)
    assert data.compatibility_failures()
    with pytest.raises(ComplexError):
        ordered_cech_complex(data)


def test_hollow_nerve_is_circle():
    data = constant_cover_data(3, [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)])
    assert cech_cohomology(data).as_tuple(0, 1) == (1, 1)
    assert cech_cohomology(data, ordered=False).as_tuple(0, 1) == (1, 1)


@given(seeds, st.sampled_from([QQ, GF(2)]))
def test_full_and_ordered_agree(seed, F):
    data = random_cover_data(random.Random(seed), size=3, field=F)
    assert not data.compatibility_failures()
    assert cech_cohomology(data, ordered=False) == cech_cohomology(data, ordered=True)
    # both complexes are complexes
    cech_complex(data)
    ordered_cech_complex(data)


@given(seeds)
def test_two_cover_degeneration(seed):
    pipe = two_cover_pipeline(random_two_cover(random.Random(seed)))
    assert pipe.e2_vanishing_failures() == []
    assert pipe.exact_sequence_failures() == []
    assert pipe.sequence.converges


def test_two_cover_pipeline_split_matches():
    tc = random_two_cover(random.Random(4))
    pipe = two_cover_pipeline(tc)
    assert pipe.mv == mayer_vietoris_split(cohomology_data(tc))
