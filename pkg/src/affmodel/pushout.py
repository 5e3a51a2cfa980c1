"""Pushouts of affine schemes along closed embeddings.

For surjections ``O(X) -> O(Z) <- O(Y)`` the pushout ring is the fiber
product ``O(X) x_{O(Z)} O(Y)``. It is presented as follows: ``R`` carries
the variables of both presentations, ``I1, I2, J`` are the kernels of ``R``
onto ``O(X), O(Y), O(Z)``, ``k_1..k_n`` is a reduced Gröbner basis of ``J``,
``A = R[g_1..g_n]`` and

    P = A / ((I1 + (g_j - k_j)) ∩ (I2 + (g_1, ..., g_n)))

with projections ``g_j -> k_j`` onto ``R/I1`` and ``g_j -> 0`` onto ``R/I2``.
A pair ``(a, b)`` agreeing in ``O(Z)`` lifts to ``b~ + sum q_j g_j`` where
``a~ - b~ = sum q_j k_j``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from operator import sub

from .polyalg import (
    AlgebraMap,
    FinitelyPresentedAlgebra,
    Ideal,
    PolynomialRing,
    divide,
    fresh_name,
    ideal_intersection,
    is_groebner_basis,
    is_surjective,
    kernel_of_map,
    transfer,
)
from .polyalg.ring import GREVLEX, mono_lcm
from .schemes import NotClosedEmbedding


class IncompatiblePair(ValueError):
    """The two components do not agree on the glued locus."""


@dataclass(frozen=True, eq=False)
class ClosedSpan:
    apex: FinitelyPresentedAlgebra
    left: AlgebraMap  # O(X) -> O(Z)
    right: AlgebraMap  # O(Y) -> O(Z)

    def validate(self) -> ClosedSpan:
        for m, side in ((self.left, "left"), (self.right, "right")):
            if m.target.ring != self.apex.ring:
                raise ValueError(f"{side} leg does not land in the apex")
            m.check()
            if not is_surjective(m):
                raise NotClosedEmbedding(
                    f"{side} leg is not a closed embedding; pushouts are only formed along closed embeddings "
                    "(surjective ring maps), without which the pushout need not exist")
        return self


@dataclass(frozen=True, eq=False)
class Ambient:
    ring: PolynomialRing
    I1: Ideal
    I2: Ideal
    J: Ideal
    to_x: AlgebraMap  # R -> O(X)
    to_y: AlgebraMap  # R -> O(Y)
    to_z: AlgebraMap  # R -> O(Z)


def common_ambient(span: ClosedSpan) -> Ambient:
    span.validate()
    X, Y = span.left.source, span.right.source
    C, _, _ = _free_tensor(X.ring, Y.ring)
    R = C.ring
    nx = X.ngens
    try:
        y_in_x = [span.left.lift(b) for b in span.right.images]
        x_in_y = [span.right.lift(a) for a in span.left.images]
    except ValueError as exc:  # pragma: no cover - legs were checked surjective
        raise AssertionError(f"lift through a surjective leg failed: {exc}") from exc
    F = FinitelyPresentedAlgebra.free(R)
    to_x = AlgebraMap(F, X, X.ring.gens + tuple(y_in_x))
    to_y = AlgebraMap(F, Y, tuple(x_in_y) + Y.ring.gens)
    to_z = AlgebraMap(F, span.apex, span.left.images + span.right.images)
    I1, I2, J = kernel_of_map(to_x), kernel_of_map(to_y), kernel_of_map(to_z)
    assert J.contains_ideal(I1) and J.contains_ideal(I2), "J must contain I1 + I2"
    assert nx == X.ngens
    return Ambient(R, I1, I2, J, to_x, to_y, to_z)


def _free_tensor(A: PolynomialRing, B: PolynomialRing):
    from .polyalg import tensor_product
    return tensor_product(FinitelyPresentedAlgebra.free(A), FinitelyPresentedAlgebra.free(B))


@dataclass(frozen=True, eq=False)
class PushoutResult:
    """``P`` with its projections ``proj_x: P -> O(X)``, ``proj_y: P -> O(Y)``."""

    algebra: FinitelyPresentedAlgebra
    proj_x: AlgebraMap
    proj_y: AlgebraMap
    ambient: PolynomialRing
    I1: Ideal
    I2: Ideal
    J: Ideal
    ks: tuple
    to_x: AlgebraMap
    to_y: AlgebraMap
    span: ClosedSpan | None = None

    @property
    def aux_names(self) -> tuple:
        return self.algebra.names[self.ambient.ngens:]

    def lift_pair(self, a, b, reduce: bool = True):
        """The element of ``P`` projecting to ``a`` and ``b`` (reduced
        modulo the defining ideal unless ``reduce`` is false)."""
        R = self.ambient
        at = self.to_x.lift(self.to_x.target.ring(a))
        bt = self.to_y.lift(self.to_y.target.ring(b))
        qs, r = divide(at - bt, self.ks)
        if r:
            raise IncompatiblePair(f"components disagree on the glued locus (remainder {r})")
        A = self.algebra.ring
        pos = list(range(R.ngens))
        out = transfer(bt, A, pos)
        for j, q in enumerate(qs):
            if q:
                out = out + transfer(q, A, pos) * A.gen(R.ngens + j)
        return self.algebra.reduce(out) if reduce else out

    def with_ideal(self, gens) -> PushoutResult:
        """Same data with a replaced defining ideal (used for mutation tests)."""
        P = FinitelyPresentedAlgebra.presented(self.algebra.ring, gens)
        px = AlgebraMap(P, self.proj_x.target, self.proj_x.images)
        py = AlgebraMap(P, self.proj_y.target, self.proj_y.images)
        return PushoutResult(P, px, py, self.ambient, self.I1, self.I2, self.J, self.ks, self.to_x, self.to_y,
                             self.span)


def fiber_product_from_ambient(R: PolynomialRing, I1: Ideal, I2: Ideal, ks, to_x: AlgebraMap | None = None,
                               to_y: AlgebraMap | None = None, aux_names=None, span=None) -> PushoutResult:
    """Fiber product of ``R/I1`` and ``R/I2`` over ``R/(I1 + I2 + (ks))``.

    ``ks`` must be a Gröbner basis containing ``I1`` and ``I2`` in the ideal
    it generates. ``aux_names`` is a sequence of names or a function of the
    number of names needed. ``to_x``/``to_y`` optionally identify ``R/I1``, ``R/I2``
    with other presentations (surjections from ``k[R]`` with those kernels).
    """
    ks = tuple(R(k) for k in ks if k)
    assert is_groebner_basis(ks), "ks must be a Gröbner basis"
    J = Ideal(R, ks)
    if not (J.contains_ideal(I1) and J.contains_ideal(I2)):
        raise ValueError("ks must generate an ideal containing I1 + I2")
    taken = list(R.names)
    if callable(aux_names):
        aux_names = aux_names(len(ks))
    if aux_names is None:
        aux_names = []
        for j in range(len(ks)):
            nm = fresh_name(taken, f"g{j + 1}")
            aux_names.append(nm)
            taken.append(nm)
    aux_names = tuple(aux_names)
    if len(aux_names) != len(ks) or set(aux_names) & set(R.names):
        raise ValueError("bad auxiliary variable names")
    A = PolynomialRing(R.field, R.names + aux_names, GREVLEX)
    K = Ideal(A, kernel_intersection_generators(A, R, I1, I2, ks))
    P = FinitelyPresentedAlgebra(A, K)
    F = FinitelyPresentedAlgebra.free(R)
    if to_x is None:
        to_x = AlgebraMap(F, FinitelyPresentedAlgebra(R, I1), R.gens)
    if to_y is None:
        to_y = AlgebraMap(F, FinitelyPresentedAlgebra(R, I2), R.gens)
    px = AlgebraMap(P, to_x.target, tuple(to_x.images) + tuple(to_x(k) for k in ks))
    py = AlgebraMap(P, to_y.target, tuple(to_y.images) + tuple(to_y.target.ring.zero for _ in ks))
    res = PushoutResult(P, px, py, R, I1, I2, J, ks, to_x, to_y, span)
    px.check()
    py.check()
    assert is_surjective(px) and is_surjective(py), "projections of a pushout must be closed embeddings"
    return res


def kernel_intersection_generators(A: PolynomialRing, R: PolynomialRing, I1: Ideal, I2: Ideal, ks) -> list:
    """Generators of ``(I1 + (g_j - k_j)) ∩ (I2 + (g_j))`` without elimination.

    Modulo the products ``g_i (g_j - k_j)`` and ``g_i I1`` every element is
    ``f0 + sum c_j g_j`` with ``c_j, f0`` in ``R``; it lies in both ideals iff
    ``f0`` is in ``I2`` and ``f0 + sum c_j k_j`` is in ``I1``. Such pairs are
    generated by the generators of ``I2`` written in terms of the ``k_j``,
    the generators of ``I1`` written likewise, and the syzygies of the
    Gröbner basis ``k`` (one per S-pair).
    """
    n = R.ngens
    pos = list(range(n))
    gs = A.gens[n:]

    def up(f):
        return transfer(f, A, pos)

    def combo(qs):
        out = A.zero
        for q, g in zip(qs, gs):
            if q:
                out = out + up(q) * g
        return out

    def cofactors(f):
        qs, r = divide(f, ks)
        assert not r, "element of J with nonzero remainder modulo its Gröbner basis"
        return qs

    ks_A = [up(k) for k in ks]
    out = []
    for j, k in enumerate(ks):
        # shortcuts that expose linear relations early
        if I1.contains(k):
            out.append(gs[j])
        if I2.contains(k):
            out.append(gs[j] - ks_A[j])
    I1_gens = I1.groebner_basis
    for gi in gs:
        out.extend(gi * (gj - kj) for gj, kj in zip(gs, ks_A))
        out.extend(gi * up(q) for q in I1_gens)
    for p in I2.groebner_basis:
        out.append(up(p) - combo(cofactors(p)))
    for q in I1_gens:
        out.append(combo(cofactors(q)))
    for i in range(len(ks)):
        for j in range(i + 1, len(ks)):
            L = mono_lcm(ks[i].LM, ks[j].LM)
            mi = tuple(map(sub, L, ks[i].LM))
            mj = tuple(map(sub, L, ks[j].LM))
            spoly = ks[i].mul_term(mi, R.field.inv(ks[i].LC)) - ks[j].mul_term(mj, R.field.inv(ks[j].LC))
            syz = (gs[i].mul_term(tuple(mi) + (0,) * len(gs), R.field.inv(ks[i].LC))
                   - gs[j].mul_term(tuple(mj) + (0,) * len(gs), R.field.inv(ks[j].LC))
                   - combo(cofactors(spoly)))
            out.append(syz)
    return [f for f in out if f]


def fiber_product(span: ClosedSpan, aux_names=None) -> PushoutResult:
    amb = common_ambient(span)
    ks = amb.J.groebner_basis
    return fiber_product_from_ambient(amb.ring, amb.I1, amb.I2, ks, amb.to_x, amb.to_y, aux_names, span)


def induced_map(src: PushoutResult, dst: PushoutResult, on_x: AlgebraMap, on_y: AlgebraMap) -> AlgebraMap:
    """Ring map ``P_src -> P_dst`` induced by ``on_x: O(X_src) -> O(X_dst)``
    and ``on_y: O(Y_src) -> O(Y_dst)`` (which must agree on the glued loci)."""
    imgs = []
    for gx, gy in zip(src.proj_x.images, src.proj_y.images):
        imgs.append(dst.lift_pair(on_x(gx), on_y(gy)))
    return AlgebraMap(src.algebra, dst.algebra, tuple(imgs))


def joint_kernel(res: PushoutResult) -> Ideal:
    """Kernel of ``k[P vars] -> O(X) x O(Y)``, computed from the projection
    maps alone."""
    A = res.algebra.ring
    F = FinitelyPresentedAlgebra.free(A)
    kx = kernel_of_map(AlgebraMap(F, res.proj_x.target, res.proj_x.images))
    ky = kernel_of_map(AlgebraMap(F, res.proj_y.target, res.proj_y.images))
    return ideal_intersection(kx, ky)


def check_pushout_invariants(res: PushoutResult) -> list:
    """Structural checks: projections well defined and surjective, the two
    composites to the apex agree, the ideal lies between the product and the
    intersection of the kernels, and both pull-backs of the apex coincide."""
    out = []
    for m, nm in ((res.proj_x, "x"), (res.proj_y, "y")):
        if not m.is_well_defined():
            out.append(f"projection {nm} is not well defined")
        elif not is_surjective(m):
            out.append(f"projection {nm} is not surjective")
    if out:
        return out
    A = res.algebra.ring
    n = res.ambient.ngens
    pos = list(range(n))
    gs = A.gens[n:]
    K1 = Ideal(A, [transfer(g, A, pos) for g in res.I1.gens] + [g - transfer(k, A, pos) for g, k in zip(gs, res.ks)])
    K2 = Ideal(A, [transfer(g, A, pos) for g in res.I2.gens] + list(gs))
    K = res.algebra.ideal
    if not (K1.contains_ideal(K) and K2.contains_ideal(K)):
        out.append("defining ideal is not inside both kernels")
    if not all(K.contains(a * b) for a in K1.gens for b in K2.gens):
        out.append("defining ideal does not contain the product of the kernels")
    if res.span is not None:
        sp = res.span
        zx = sp.left.compose(res.proj_x)
        zy = sp.right.compose(res.proj_y)
        if not zx.agrees_with(zy):
            out.append("composites to the apex disagree")
        else:
            F = FinitelyPresentedAlgebra.free(A)
            Lx = kernel_of_map(AlgebraMap(F, sp.apex, zx.images))
            Ly = kernel_of_map(AlgebraMap(F, sp.apex, zy.images))
            if not Lx.equals(Ly):
                out.append("pull-backs of the apex along the projections differ")
            elif not (Lx.contains_ideal(K) and is_surjective(zx)):
                out.append("glued locus is not a closed copy of the apex")
    return out


# -- universal property --------------------------------------------------------

@dataclass
class TrialOutcome:
    nvars: int
    relation: str | None
    exists: bool
    commutes: bool
    unique: bool
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.exists and self.commutes and self.unique


@dataclass
class UniversalPropertyReport:
    trials: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(t.ok for t in self.trials)

    @property
    def failures(self) -> list:
        return [t for t in self.trials if not t.ok]


def _random_poly(ring: PolynomialRing, rng: random.Random, degree: int = 2, terms: int = 3, scale: int = 3):
    from .polyalg.oracle import monomials_up_to
    monos = monomials_up_to(ring.ngens, degree)
    pick = [monos[rng.randrange(len(monos))] for _ in range(terms)]
    return ring.from_terms({m: rng.randint(-scale, scale) for m in pick})


def _random_ideal_element(I: Ideal, rng: random.Random):
    out = I.ring.zero
    for g in I.gens:
        if rng.random() < 0.6:
            out = out + _random_poly(I.ring, rng, degree=1, terms=2) * g
    return out


def verify_universal_property(res: PushoutResult, trials: int = 10, seed: int = 0, max_vars: int = 2,
                              reference: PushoutResult | None = None) -> UniversalPropertyReport:
    """Randomized cone trials.

    Each trial builds ``T = k[u_1..u_m]/(r)`` (``m <= max_vars``, at most one
    relation ``r`` drawn from the kernel of ``T -> O(X) x O(Y)``) and maps
    ``T -> O(X)``, ``T -> O(Y)`` that agree in ``O(Z)`` by construction. It
    checks that the lifted map ``T -> P`` is well defined, that both
    triangles commute, and that every other mediating map (another choice of
    lifts, or a perturbation by the joint kernel of the projections) agrees
    with it in ``P``.

    ``reference`` supplies the lifting data when ``res`` is a deliberately
    altered copy.
    """
    sp = res.span
    if sp is None:
        raise ValueError("universal property trials need the span")
    rng = random.Random(seed)
    lifter = reference or res
    ker_left = kernel_of_map(sp.left)
    ker_right = kernel_of_map(sp.right)
    Zr = sp.apex.ring
    joint = joint_kernel(res).gens
    P = res.algebra
    report = UniversalPropertyReport()
    for t in range(trials):
        m = 0 if t == 0 else rng.randint(1, max_vars)
        Tring = PolynomialRing(P.field, tuple(f"u{i + 1}" for i in range(m)), GREVLEX)
        a_imgs, b_imgs = [], []
        for _ in range(m):
            z = _random_poly(Zr, rng)
            a_imgs.append(sp.left.source.reduce(sp.left.lift(z) + _random_ideal_element(ker_left, rng)))
            b_imgs.append(sp.right.source.reduce(sp.right.lift(z) + _random_ideal_element(ker_right, rng)))
        Tfree = FinitelyPresentedAlgebra.free(Tring)
        fx = AlgebraMap(Tfree, sp.left.source, a_imgs)
        fy = AlgebraMap(Tfree, sp.right.source, b_imgs)
        rel = None
        if m:
            kk = ideal_intersection(kernel_of_map(fx), kernel_of_map(fy)).groebner_basis
            if kk:
                rel = kk[0]
        T = FinitelyPresentedAlgebra.presented(Tring, [rel] if rel is not None else [])
        fx = AlgebraMap(T, fx.target, fx.images)
        fy = AlgebraMap(T, fy.target, fy.images)
        outcome = TrialOutcome(m, str(rel) if rel is not None else None, True, True, True)
        try:
            psi = AlgebraMap(T, P, [lifter.lift_pair(a, b) for a, b in zip(a_imgs, b_imgs)])
        except IncompatiblePair as exc:
            outcome.exists = outcome.commutes = outcome.unique = False
            outcome.note = str(exc)
            report.trials.append(outcome)
            continue
        if not psi.is_well_defined():
            outcome.exists = False
            outcome.note = "lifted map is not well defined"
        if not (res.proj_x.compose(psi).agrees_with(fx) and res.proj_y.compose(psi).agrees_with(fy)):
            outcome.commutes = False
            outcome.note = "triangle does not commute"
        # alternative mediating maps
        alts = []
        for a, b in zip(a_imgs, b_imgs):
            alts.append(_alternative_lift(lifter, a, b, rng))
        perturbed = []
        for img in psi.images:
            delta = P.ring.zero
            for g in joint:
                delta = delta + g * P.field(rng.randint(1, 3))
            perturbed.append(img + delta)
        for cand in (alts, perturbed):
            if any(not P.is_zero(x - y) for x, y in zip(psi.images, cand)):
                outcome.unique = False
                outcome.note = "two mediating maps differ"
        report.trials.append(outcome)
    return report


def _alternative_lift(res: PushoutResult, a, b, rng):
    """Lift ``(a, b)`` using perturbed preimages in the ambient ring."""
    R = res.ambient
    at = res.to_x.lift(res.to_x.target.ring(a)) + _random_ideal_element(res.I1, rng)
    bt = res.to_y.lift(res.to_y.target.ring(b)) + _random_ideal_element(res.I2, rng)
    qs, r = divide(at - bt, res.ks)
    if r:
        raise IncompatiblePair("alternative lift failed")
    A = res.algebra.ring
    pos = list(range(R.ngens))
    out = transfer(bt, A, pos)
    for j, q in enumerate(qs):
        out = out + transfer(q, A, pos) * A.gen(R.ngens + j)
    return out


def mutations(res: PushoutResult, count: int, seed: int = 0) -> list:
    """Copies of ``res`` with one defining-ideal basis element dropped."""
    basis = list(res.algebra.basis)
    rng = random.Random(seed)
    idx = list(range(len(basis)))
    rng.shuffle(idx)
    out = []
    for k in range(count):
        drop = idx[k % len(idx)]
        out.append(res.with_ideal(basis[:drop] + basis[drop + 1:]))
    return out


# -- standard spans -------------------------------------------------------------

def coordinate_cross_span(field=None) -> ClosedSpan:
    """Two lines glued at their origins."""
    from .polyalg import QQ, polynomial_ring
    field = field or QQ
    X = FinitelyPresentedAlgebra.free(polynomial_ring("x", field))
    Y = FinitelyPresentedAlgebra.free(polynomial_ring("y", field))
    Z = FinitelyPresentedAlgebra.free(polynomial_ring([], field))
    return ClosedSpan(Z, AlgebraMap(X, Z, [Z.ring.zero]), AlgebraMap(Y, Z, [Z.ring.zero]))
