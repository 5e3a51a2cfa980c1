import pytest

from affmodel.homalg import mayer_vietoris
from affmodel.polyalg import GF, QQ, AlgebraMap, FinitelyPresentedAlgebra, Ideal, is_isomorphism, polynomial_ring
from affmodel.model import (
    AFFINE,
    OTHER,
    TWO_GLUED,
    ChartAssignmentMismatch,
    ChartLimitExceeded,
    InvalidPoint,
    build_model,
    check_model,
    cover_cohomology_data,
    cover_ideal,
    cover_morphism,
    fiber,
    overlap_in_product,
    piece_overlap,
    pull_back_model,
    pullback_function,
)
from affmodel.schemes import (
    ChartedScheme,
    RationalPoint,
    SchemeMorphism,
    affine_line_two_opens,
    disjoint_union,
    identity_morphism,
    points,
    projective_space,
    single_chart,
)

from reference import (
    IDENTIFICATION,
    closed_form_ideal,
    identified_ideal,
    induced_identification,
    mutual_membership,
)

FIELDS = [QQ, GF(5), GF(7)]


@pytest.fixture(scope="module")
def p1():
    return build_model(projective_space(1))


def test_single_chart_is_identity():
    A = FinitelyPresentedAlgebra.free(polynomial_ring("x y"))
    M = build_model(single_chart(A))
    assert M.algebra is A and M.stage_dimensions() == []
    (p,) = M.pieces
    assert [str(g) for g in p.lifts] == ["x", "y"]
    assert check_model(M) == []


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_p1_matches_closed_form(F):
    M = build_model(projective_space(1, F))
    assert M.algebra.names == ("x", "a1_1", "a1_2", "b1_2", "g1_1")
    assert M.stage_dimensions() == [2]
    I, phi = identified_ideal(M)
    assert is_isomorphism(phi)
    assert mutual_membership(I, closed_form_ideal(F))


def test_identification_is_induced_by_chart_maps(p1):
    fwd, back, ref = induced_identification(p1)
    assert fwd.is_well_defined() and back.is_well_defined()
    assert back.compose(fwd).agrees_with(AlgebraMap.identity(p1.algebra))
    assert fwd.compose(back).agrees_with(AlgebraMap.identity(ref.algebra))
    # the closed-form fiber product is literally the intersection ideal
    R = ref.algebra.ring
    x, y, z, w, t = R.gens
    from affmodel.polyalg import ideal_intersection
    assert ref.algebra.ideal.equals(ideal_intersection(Ideal(R, [w, t]), Ideal(R, [w - z, t - (x * y - 1)])))
    # and the induced map reproduces the frozen identification
    got = {n: str(img) for n, img in zip(p1.algebra.names, fwd.images)}
    want = {n: str(R(s)) for n, s in IDENTIFICATION.items()}
    assert got == want


def test_p1_pieces(p1):
    assert len(p1.pieces) == 2
    for p in p1.pieces:
        assert p.thickened.ngens == 3 and p.thickened.ideal.is_zero()
        assert p.dimension == 2
    assert check_model(p1) == []
    assert cover_ideal(p1).equals(p1.algebra.ideal)


def test_p1_overlap_is_quadric(p1):
    ov = piece_overlap(p1)
    assert ov.failures() == []
    m, K = overlap_in_product(p1)
    R = K.ring
    assert R.names == ("x", "y")
    assert K.equals(Ideal(R, [R("x*y-1")]))
    Q = FinitelyPresentedAlgebra(R, K)
    assert is_isomorphism(AlgebraMap(Q, m.target, m.images))


def test_p1_cover_cohomology_is_sphere(p1):
    data = cover_cohomology_data(p1)
    assert mayer_vietoris(data).as_tuple(0, 2) == (1, 0, 1)


def test_affine_line_two_opens():
    M = build_model(affine_line_two_opens())
    assert check_model(M) == []
    assert all(p.thickened.ngens == 2 + p.dimension for p in M.pieces)
    assert piece_overlap(M).failures() == []


def test_two_points_product():
    M = build_model(points(2))
    assert M.empty_overlap
    assert check_model(M) == []
    # a product of two points has exactly two rational points: idempotent splitting
    assert not M.algebra.is_zero_ring()


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_fibers(F):
    X = projective_space(1, F)
    M = build_model(X)
    for chart in ("U0", "U1"):
        rep = fiber(M, RationalPoint.of(X, chart, [0]))
        assert rep.classification == AFFINE and rep.dimension == 2
        assert rep.iso.is_well_defined() and is_isomorphism(rep.iso)
    for v in ("1", "2", "-1", "2/3"):
        if F != QQ and v == "2/3":
            v = "3"
        rep = fiber(M, RationalPoint.of(X, "U0", [v]))
        assert rep.classification == TWO_GLUED and rep.dimension == 2
        assert rep.iso.is_well_defined() and is_isomorphism(rep.iso)


def test_fiber_single_chart_is_point():
    X = single_chart(FinitelyPresentedAlgebra.free(polynomial_ring("x")))
    rep = fiber(build_model(X), RationalPoint.of(X, "U0", [3]))
    assert rep.classification == AFFINE and rep.dimension == 0


def test_fiber_invalid_point():
    X = single_chart(FinitelyPresentedAlgebra.presented(polynomial_ring("x y"), ["x*y-1"]))
    with pytest.raises(InvalidPoint):
        fiber(build_model(X), RationalPoint.of(X, "U0", [1, 2]))


def test_chart_order_reversed_still_valid():
    X = projective_space(1)
    Y = ChartedScheme((X.charts[1], X.charts[0]), {(0, 1): X.gluing(1, 0)})
    M = build_model(Y)
    assert check_model(M) == []
    rep = fiber(M, RationalPoint.of(Y, "U1", [5]))
    assert rep.classification == TWO_GLUED


def test_chart_limit():
    with pytest.raises(ChartLimitExceeded):
        build_model(projective_space(2), max_charts=2)


def test_pullback_function_restricts_to_chart_values(p1):
    assert p1.algebra.is_zero(pullback_function(p1, ["1", "1"]) - p1.algebra.ring.one)
    # x is a global function on A^1; it restricts to x on both pieces
    M = build_model(affine_line_two_opens())
    f = pullback_function(M, ["x", "x"])
    for p in M.pieces:
        T = p.thickened
        assert T.is_zero(p.surj(f) - T.ring("x"))


def test_cover_morphism_identity():
    cm = cover_morphism(identity_morphism(projective_space(1)))
    assert cm.square_failures() == []
    assert is_isomorphism(cm.f_M)


def test_cover_morphism_open_inclusion():
    X = projective_space(1)
    U0 = single_chart(X.charts[0].algebra, "U0")
    f = SchemeMorphism(U0, X, (0,), (AlgebraMap.identity(X.charts[0].algebra),))
    cm = cover_morphism(f)
    assert cm.square_failures() == []
    part = cm.pullback.parts[0]
    assert check_model(part.model) == []
    # the preimage of U1 is U0 ∩ U1, a punctured line
    assert part.scheme.charts[1].algebra.ngens == 2


def test_pullback_of_disjoint_union():
    X = projective_space(1)
    XX = disjoint_union(X, X)
    f = SchemeMorphism(XX, X, (0, 1, 0, 1), tuple(AlgebraMap.identity(c.algebra) for c in XX.charts))
    M = build_model(X)
    pb = pull_back_model(f, M)
    assert len(pb.parts) == 2
    for part in pb.parts:
        assert part.model.algebra.ngens == M.algebra.ngens
        assert is_isomorphism(part.rho)
    assert pb.algebra.ngens == 2 * M.algebra.ngens + 1


def test_constant_map_to_point():
    X = projective_space(1)
    pt = points(1)
    R0 = pt.charts[0].algebra
    f = SchemeMorphism(X, pt, (0, 0), tuple(AlgebraMap(R0, c.algebra, ()) for c in X.charts))
    assert cover_morphism(f).square_failures() == []


def test_assignment_mismatch():
    X = projective_space(1)
    f = SchemeMorphism(X, X, (0, 0), (AlgebraMap.identity(X.charts[0].algebra),
                                      AlgebraMap(X.charts[0].algebra, X.charts[1].algebra, ["y"])))
    with pytest.raises(ChartAssignmentMismatch):
        pull_back_model(f, build_model(X))
