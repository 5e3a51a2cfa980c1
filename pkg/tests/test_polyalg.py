import random
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from affmodel.polyalg import (
    GF,
    GREVLEX,
    LEX,
    QQ,
    AlgebraMap,
    FinitelyPresentedAlgebra,
    Ideal,
    PolynomialSyntaxError,
    block_order,
    buchberger,
    divide,
    elimination_ideal,
    field_from_spec,
    format_polynomial,
    ideal_intersection,
    ideal_membership,
    is_groebner_basis,
    is_surjective,
    kernel_of_map,
    localize,
    macaulay_membership,
    macaulay_subring_elements,
    normal_form,
    parse_polynomial,
    polynomial_ring,
    s_polynomial,
    substitute_point,
)
from affmodel.polyalg.ring import mono_mul

from conftest import monomials, polys, ring3

R3 = ring3()


# -- fields ----------------------------------------------------------------------

def test_rationals_lowest_terms():
    a = QQ(6) / QQ(-4)
    assert QQ.format(a) == "-3/2"
    assert a.denominator > 0


def test_prime_field_residues():
    F = GF(7)
    assert int(F(-1)) == 6
    assert F(F.inv(F(3)) * F(3)) == F(1)
    assert F.format(F("1/2")) == "4"


def test_prime_checked():
    with pytest.raises(ValueError):
        GF(9)
    with pytest.raises(ValueError):
        field_from_spec("fp:1")


def test_field_specs():
    assert field_from_spec("q") == QQ
    assert field_from_spec("fp:5") == GF(5)


def test_no_overflow():
    x, = polynomial_ring("x").gens
    f = (x * QQ(10**30) + QQ("1/3")) ** 5
    assert f.LC == QQ(10**150)


# -- monomial orders ---------------------------------------------------------------

ORDERS = [LEX, GREVLEX, block_order(1), block_order(2)]


@pytest.mark.parametrize("order", ORDERS, ids=str)
@given(a=monomials(3), b=monomials(3), c=monomials(3))
def test_order_axioms(order, a, b, c):
    k = order.key
    # total: distinct monomials compare strictly
    assert (k(a) == k(b)) == (a == b)
    # multiplicative
    if k(a) < k(b):
        assert k(mono_mul(a, c)) < k(mono_mul(b, c))
    # 1 is minimal
    assert k((0, 0, 0)) <= k(a)
    # transitive
    if k(a) < k(b) and k(b) < k(c):
        assert k(a) < k(c)


# -- parsing -----------------------------------------------------------------------

def test_parse_and_format_roundtrip():
    f = parse_polynomial("3*x^2*y - 1/2*z + 4 - x^2*y", R3)
    assert format_polynomial(f) == "2*x^2*y-1/2*z+4"
    assert parse_polynomial(format_polynomial(f), R3) == f


@given(polys(R3))
def test_format_roundtrip_property(f):
    assert parse_polynomial(format_polynomial(f), R3) == f


@pytest.mark.parametrize("bad", ["", "x+", "x^y", "2**x", "w", "x y"])
def test_parse_errors(bad):
    with pytest.raises(PolynomialSyntaxError):
        parse_polynomial(bad, R3)


def test_terms_descending_and_no_zero_coefficients():
    f = R3("x + z^2 + y^3 - x")
    assert all(c != 0 for c in f.terms.values())
    keys = [R3.keyfunc(m) for m, _ in f.sorted_terms()]
    assert keys == sorted(keys, reverse=True)


# -- normal forms and Gröbner bases -------------------------------------------------

def test_normal_form_examples():
    R = polynomial_ring("x")
    x, = R.gens
    assert normal_form(x * x, [x]) == 0
    assert normal_form(x + 1, [x]) == 1


def test_normal_form_cusp():
    R = polynomial_ring("t a b", QQ, LEX)
    t, a, b = R.gens
    G = buchberger([a - t**2, b - t**3])
    assert normal_form(a**3 - b**2, G) == 0
    assert macaulay_membership(a**3 - b**2, [a - t**2, b - t**3])


def test_normal_form_ring_mismatch():
    x = polynomial_ring("x").gen(0)
    y = polynomial_ring("y").gen(0)
    with pytest.raises(ValueError):
        normal_form(x, [y])


def test_buchberger_examples():
    R = polynomial_ring("x y")
    x, y = R.gens
    assert buchberger([x]) == [x]
    assert buchberger([x * y - 1, x**2]) == [R.one]
    G = buchberger([x * y - 1, x**2 + y**2 - 4])
    assert len(G) >= 2
    for g in G:
        assert macaulay_membership(g, [x * y - 1, x**2 + y**2 - 4])
    for g in (x * y - 1, x**2 + y**2 - 4):
        assert macaulay_membership(g, G)


def test_unit_ideal_oracle_degree():
    # 1 = (x*y + 1)(1 - x*y) + y^2 * x^2 needs products of degree 4
    R = polynomial_ring("x y")
    x, y = R.gens
    gens = [x * y - 1, x**2]
    assert not macaulay_membership(R.one, gens, degree=3)
    assert macaulay_membership(R.one, gens, degree=4)


def test_buchberger_frozen_basis():
    # frozen from an independent computer algebra system, grevlex x > y
    R = polynomial_ring("x y")
    G = buchberger([R("x*y-1"), R("x^2+y^2-4")])
    assert [format_polynomial(g) for g in G] == ["y^3+x-4*y", "x^2+y^2-4", "x*y-1"]


def test_zero_generators_discarded():
    R = polynomial_ring("x y")
    assert buchberger([R.zero, R.zero]) == []
    assert buchberger([R.zero, R("x")]) == [R("x")]


ideal_gens = st.lists(polys(R3, max_deg=3, max_terms=3, nonzero=True), min_size=1, max_size=3)


@given(ideal_gens)
def test_buchberger_criterion(gens):
    G = buchberger(gens)
    assert is_groebner_basis(G)
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            assert normal_form(s_polynomial(G[i], G[j]), G) == 0
    assert all(g.LC == 1 for g in G)


@given(ideal_gens, st.randoms(use_true_random=False))
def test_reduced_basis_unique_under_permutation(gens, rnd):
    G = buchberger(gens)
    perm = list(gens)
    rnd.shuffle(perm)
    assert buchberger(perm) == G
    assert buchberger(G) == G
    assert [format_polynomial(g) for g in buchberger(gens)] == [format_polynomial(g) for g in G]


@given(ideal_gens, polys(R3))
def test_normal_form_idempotent(gens, f):
    G = buchberger(gens)
    r = normal_form(f, G)
    assert normal_form(r, G) == r
    qs, r2 = divide(f, G)
    assert r2 == r
    assert sum((q * g for q, g in zip(qs, G)), R3.zero) + r == f


@given(ideal_gens, st.lists(polys(R3, max_deg=2, max_terms=2), min_size=3, max_size=3), polys(R3, max_deg=2))
def test_membership_matches_oracle(gens, cofactors, noise):
    I = Ideal(R3, gens)
    member = sum((h * g for h, g in zip(cofactors, gens)), R3.zero)
    # an explicit combination of degree <= 8 is found by the oracle
    assert ideal_membership(member, I)
    assert macaulay_membership(member, gens, 8)
    f = member + noise
    if macaulay_membership(f, gens, 8):
        assert ideal_membership(f, I)
    if not ideal_membership(f, I):
        assert not macaulay_membership(f, gens, 8)


def test_ideal_membership_examples():
    R = polynomial_ring("x y")
    x, y = R.gens
    assert ideal_membership(x**2 * y, Ideal(R, [x]))
    assert not ideal_membership(y, Ideal(R, [x]))
    assert ideal_membership(x, Ideal(R, [x * y - 1, x**2]))


def test_cached_basis_regenerates_identically():
    I = Ideal(R3, [R3("x^2-y"), R3("x*y-z")])
    first = I.groebner_basis
    again = Ideal(R3, I.gens).groebner_basis
    assert first == again
    assert [format_polynomial(g) for g in first] == [format_polynomial(g) for g in again]


def test_prime_field_agrees_with_rationals_mod_p():
    rng = random.Random(11)
    p = 32003
    F = GF(p)
    Rq = polynomial_ring("x y z")
    Rp = polynomial_ring("x y z", F)
    for _ in range(20):
        gens = []
        for _ in range(rng.randint(1, 3)):
            terms = {tuple(rng.randint(0, 2) for _ in range(3)): rng.randint(-4, 4) for _ in range(3)}
            gens.append(terms)
        Gq = buchberger([Rq.from_terms(t) for t in gens])
        if any(c.denominator % p == 0 for g in Gq for c in g.terms.values()):
            continue
        Gp = buchberger([Rp.from_terms(t) for t in gens])
        reduced = [Rp.from_terms({m: F(c) for m, c in g.terms.items()}) for g in Gq]
        assert Gp == reduced


# -- intersections and elimination ----------------------------------------------------

def test_intersection_examples():
    R = polynomial_ring("x y")
    x, y = R.gens
    X = Ideal(R, [x])
    assert ideal_intersection(X, X).equals(X)
    I = ideal_intersection(X, Ideal(R, [y]))
    assert I.equals(Ideal(R, [x * y]))
    for g in I.gens:
        assert macaulay_membership(g, [x * y]) and macaulay_membership(x * y, I.gens)


def test_intersection_p1_model_ideal():
    R = polynomial_ring("x y z w t")
    x, y, z, w, t = R.gens
    I = ideal_intersection(Ideal(R, [w, t]), Ideal(R, [w - z, t - (x * y - 1)]))
    # frozen from an independent computer algebra system
    assert [format_polynomial(g) for g in I.groebner_basis] == [
        "x*y*w-w*t-w", "x*y*t-t^2-t", "z*w-w^2", "z*t-w*t"]
    for g in I.gens:
        assert Ideal(R, [w, t]).contains(g) and Ideal(R, [w - z, t - (x * y - 1)]).contains(g)
    assert I.contains(w * (t - x * y + 1)) and I.contains(t * (w - z))


@given(st.lists(polys(R3, max_deg=2, max_terms=2, nonzero=True), min_size=1, max_size=2),
       st.lists(polys(R3, max_deg=2, max_terms=2, nonzero=True), min_size=1, max_size=2),
       polys(R3, max_deg=1), polys(R3, max_deg=1))
def test_intersection_properties(a, b, h1, h2):
    I, J = Ideal(R3, a), Ideal(R3, b)
    K = ideal_intersection(I, J)
    for g in K.gens:
        assert I.contains(g) and J.contains(g)
    f, g = h1 * a[0], h2 * b[0]
    assert K.contains(f * g)


def test_elimination_examples():
    R = polynomial_ring("x y")
    x, y = R.gens
    assert elimination_ideal(Ideal(R, [x - y]), ["x"]).is_zero()
    assert elimination_ideal(Ideal(R, [x * y - 1]), ["x"]).is_zero()
    assert macaulay_subring_elements([x * y - 1], ["x"], 6) == []
    S = polynomial_ring("t a b")
    t, a, b = S.gens
    E = elimination_ideal(Ideal(S, [a - t**2, b - t**3]), ["a", "b"])
    A, B = E.ring.gens
    assert E.equals(Ideal(E.ring, [A**3 - B**2]))
    sub = macaulay_subring_elements([a - t**2, b - t**3], ["a", "b"], 6)
    assert any(Ideal(S, [a**3 - b**2]).contains(g) and g for g in sub)


# -- maps --------------------------------------------------------------------------------

def _free(names, F=QQ):
    return FinitelyPresentedAlgebra.free(polynomial_ring(names, F))


def test_kernel_examples():
    T, X = _free("t"), _free("x")
    assert kernel_of_map(AlgebraMap(T, X, ["x^2"])).is_zero()
    AB, Tt = _free("a b"), _free("t")
    K = kernel_of_map(AlgebraMap(AB, Tt, ["t^2", "t^3"]))
    assert K.equals(Ideal(AB.ring, [AB.ring("a^3-b^2")]))
    assert macaulay_membership(AB.ring("a^3-b^2"), K.gens)


def test_kernel_of_projection_with_zero_images():
    # A = R[x1, x2] -> R/I2 with x_j -> 0
    R = polynomial_ring("u v")
    I2 = FinitelyPresentedAlgebra.presented(R, ["u*v"])
    A = _free("u v x1 x2")
    K = kernel_of_map(AlgebraMap(A, I2, ["u", "v", "0", "0"]))
    assert K.equals(Ideal(A.ring, [A.ring(s) for s in ("u*v", "x1", "x2")]))


@given(polys(polynomial_ring("a b"), max_deg=3))
def test_kernel_property(f):
    AB, T = _free("a b"), _free("t")
    phi = AlgebraMap(AB, T, ["t^2", "t^3"])
    K = kernel_of_map(phi)
    for g in K.gens:
        assert T.is_zero(phi.raw(g))
    if T.is_zero(phi.raw(f)):
        assert K.contains(f)


def test_surjectivity_examples():
    R = polynomial_ring("x y")
    Q = FinitelyPresentedAlgebra.presented(R, ["x*y-1"])
    assert is_surjective(AlgebraMap(FinitelyPresentedAlgebra.free(R), Q, R.gens))
    U, X = _free("u"), _free("x")
    assert not is_surjective(AlgebraMap(U, X, ["x^2"]))


def test_ill_defined_map_detected():
    Q = FinitelyPresentedAlgebra.presented(polynomial_ring("x"), ["x^2"])
    m = AlgebraMap(Q, _free("y"), ["y"])
    assert not m.is_well_defined()


def test_localization_examples():
    X = _free("x")
    L = localize(X, "x")
    assert L.algebra.ideal.equals(Ideal(L.algebra.ring, [L.algebra.ring("x*s-1")]))
    N = FinitelyPresentedAlgebra.presented(polynomial_ring("x"), ["x^2"])
    assert localize(N, "x").algebra.is_zero_ring()
    with pytest.raises(ValueError):
        localize(N, "x^2")


def test_localization_of_plane_at_xy():
    L = localize(_free("x y"), "x*y")
    assert L.algebra.ideal.equals(Ideal(L.algebra.ring, [L.algebra.ring("x*y*s-1")]))
    # iso with k[z, u, v]/(z*u - 1, ...) style: k[x, y, s]/(xys - 1) ≅ k[x, y, x^-1, y^-1]
    from affmodel.polyalg import is_isomorphism
    T = FinitelyPresentedAlgebra.presented(polynomial_ring("x y a b"), ["x*a-1", "y*b-1"])
    phi = AlgebraMap(L.algebra, T, ["x", "y", "a*b"])
    assert phi.is_well_defined() and is_isomorphism(phi)


def test_substitute_point_examples():
    H = FinitelyPresentedAlgebra.presented(polynomial_ring("x y"), ["x*y-1"])
    B, _ = substitute_point(H, {"x": 1})
    assert B.names == ("y",) and B.ideal.equals(Ideal(B.ring, [B.ring("y-1")]))
    Z, _ = substitute_point(H, {"x": 0})
    assert Z.is_zero_ring()


def test_permutation_exhaustive_small():
    R = polynomial_ring("x y")
    gens = [R("x^2-y"), R("x*y-1"), R("y^2-x")]
    bases = {tuple(buchberger(list(p))) for p in permutations(gens)}
    assert len(bases) == 1


def test_oracle_degree_bound_is_a_real_limit():
    # 1 is in the ideal with a certificate of degree 6, so a cubic member
    # needs degree 9; the Gröbner route sees it regardless of degree
    R = polynomial_ring("x y")
    gens = [R("2*x^2"), R("-2*x*y^2+x-1")]
    f = R("-2*x^2*y-3*y^3")
    assert ideal_membership(f, Ideal(R, gens))
    assert macaulay_membership(R.one, gens, 6) and not macaulay_membership(R.one, gens, 5)
    assert not macaulay_membership(f, gens, 8)
    assert macaulay_membership(f, gens, 9)


def test_kernel_fast_path_matches_elimination():
    Z = FinitelyPresentedAlgebra.presented(polynomial_ring("x s"), ["x*s-1"])
    for src, imgs in (("x a b", ["x", "x", "s"]), ("y b c", ["s", "x", "s"]), ("u v", ["x", "s"])):
        phi = AlgebraMap(_free(src), Z, imgs)
        assert kernel_of_map(phi).equals(kernel_of_map(phi, fast=False))
