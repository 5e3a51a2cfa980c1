import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from affmodel.homalg import (
    CochainComplex,
    ComplexError,
    FilteredCochainComplex,
    FiltrationError,
    GradedVectorSpace,
    cohomology,
    graded_cohomology,
    random_filtered_complex,
    spectral_sequence,
)
from affmodel.homalg.complexes import interval_complex, random_complex, zero_complex
from affmodel.polyalg import GF, QQ

seeds = st.integers(0, 10**6)


def test_graded_vector_space():
    V = GradedVectorSpace({0: 1, 2: 0, 3: 2})
    assert V.dims == {0: 1, 3: 2}
    assert V.as_tuple(0, 3) == (1, 0, 0, 2)
    assert V.euler_characteristic == -1
    with pytest.raises(ValueError):
        GradedVectorSpace({0: -1})


def test_cohomology_examples():
    assert cohomology(zero_complex()) == GradedVectorSpace()
    assert cohomology(interval_complex()) == GradedVectorSpace()
    C = CochainComplex({0: 2, 1: 1}, {0: [[1, 1]]})
    assert cohomology(C).as_tuple(0, 1) == (1, 0)


def test_d_squared_rejected():
    with pytest.raises(ComplexError):
        CochainComplex({0: 1, 1: 1, 2: 1}, {0: [[1]], 1: [[1]]})


def test_shape_rejected():
    with pytest.raises(ComplexError):
        CochainComplex({0: 2, 1: 1}, {0: [[1]]})


@given(seeds, st.sampled_from([QQ, GF(3)]))
def test_rank_nullity(seed, F):
    rng = random.Random(seed)
    C = random_complex(rng, [rng.randint(0, 3) for _ in range(4)], F)
    H = cohomology(C)
    assert H.euler_characteristic == C.euler_characteristic
    for n in C.degrees:
        assert H[n] == C.dim(n) - C.rank(n) - C.rank(n - 1)


def test_trivial_filtration():
    C = CochainComplex({0: 2, 1: 1}, {0: [[1, 1]]})
    ss = spectral_sequence(FilteredCochainComplex.trivial(C), up_to_page=3)
    assert ss.page(1).nonzero() == {(0, 0): 1}
    for r in (1, 2, 3):
        assert ss.page(r).differential_is_zero()
    assert ss.converges


def test_two_step_interval():
    C = interval_complex()
    FC = FilteredCochainComplex.from_weights(C, {0: [0], 1: [1]})
    ss = spectral_sequence(FC, up_to_page=3)
    assert ss.page(1).nonzero() == {(0, 0): 1, (1, 0): 1}
    assert ss.page(2).nonzero() == {}
    assert ss.converges and all(v == 0 for v in ss.e_infinity.values())


def test_filtration_must_be_preserved():
    C = interval_complex()
    with pytest.raises(FiltrationError):
        FilteredCochainComplex.from_weights(C, {0: [1], 1: [0]})
    with pytest.raises(FiltrationError):
        FilteredCochainComplex(C, {0: {0: [[1]], 1: [[1]]}, 1: {0: [[1]], 1: []}})


@given(seeds, st.sampled_from([QQ, GF(5)]))
def test_spectral_sequence_converges(seed, F):
    FC = random_filtered_complex(random.Random(seed), total_dim=6, steps=4, field=F)
    ss = spectral_sequence(FC)
    assert ss.converges
    gr = graded_cohomology(FC)
    for k in set(ss.e_infinity) | set(gr):
        assert ss.e_infinity.get(k, 0) == gr.get(k, 0)
    # Euler characteristic of every page is that of the cohomology
    chi = cohomology(FC.complex).euler_characteristic
    assert set(ss.euler_characteristics()) == {chi}
    H = cohomology(FC.complex)
    tot = GradedVectorSpace({})
    for (p, q), k in ss.e_infinity.items():
        tot = tot + GradedVectorSpace({p + q: k})
    assert tot == H


@given(seeds)
def test_page_totals_per_degree(seed):
    FC = random_filtered_complex(random.Random(seed), total_dim=6, steps=4)
    ss = spectral_sequence(FC, up_to_page=4)
    H = cohomology(FC.complex)
    last = ss.pages[-1].total()
    assert last == H
    for P in ss.pages:
        # pages only shrink
        for n in range(-1, 6):
            assert P.total()[n] >= H[n]
