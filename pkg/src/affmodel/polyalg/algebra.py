"""Finitely presented algebras ``k[x]/I`` and the maps between them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .groebner import buchberger, normal_form
from .ideal import Ideal, fresh_name, transfer
from .ring import GREVLEX, Polynomial, PolynomialRing, block_order


class IllDefinedMap(ValueError):
    """A relation of the source does not map into the target's ideal."""


class NotInImage(ValueError):
    pass


class NotAUnit(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FinitelyPresentedAlgebra:
    """Quotient of a polynomial ring by an ideal.

    Two presentations are never compared structurally; relate them with an
    explicit :class:`AlgebraMap` (see :func:`is_isomorphism`).
    """

    ring: PolynomialRing
    ideal: Ideal

    def __post_init__(self):
        if self.ideal.ring != self.ring:
            raise ValueError("ideal lives in a different ring")

    @classmethod
    def free(cls, ring: PolynomialRing) -> FinitelyPresentedAlgebra:
        return cls(ring, Ideal(ring, []))

    @classmethod
    def presented(cls, ring: PolynomialRing, relations=()) -> FinitelyPresentedAlgebra:
        return cls(ring, Ideal(ring, relations))

    @property
    def names(self) -> tuple:
        return self.ring.names

    @property
    def ngens(self) -> int:
        return self.ring.ngens

    @property
    def field(self):
        return self.ring.field

    @property
    def basis(self) -> tuple:
        """Reduced Gröbner basis of the defining ideal."""
        return self.ideal.groebner_basis

    def __call__(self, value) -> Polynomial:
        return self.ring(value)

    def reduce(self, f) -> Polynomial:
        return self.ideal.reduce(f)

    def is_zero(self, f) -> bool:
        return self.ideal.contains(f)

    def is_zero_ring(self) -> bool:
        return self.ideal.is_unit()

    def gens(self) -> tuple:
        return self.ring.gens

    def quotient(self, extra) -> FinitelyPresentedAlgebra:
        return FinitelyPresentedAlgebra(self.ring, Ideal(self.ring, self.ideal.gens + tuple(self.ring(g) for g in extra)))

    def __repr__(self):
        rels = ", ".join(str(g) for g in self.ideal.gens) or "0"
        return f"k[{', '.join(self.names)}]/({rels})"


@dataclass(frozen=True, eq=False)
class AlgebraMap:
    """Ring map ``source -> target``; ``images[i]`` is the image of the
    i-th source variable, a polynomial in the target's ambient ring."""

    source: FinitelyPresentedAlgebra
    target: FinitelyPresentedAlgebra
    images: tuple

    def __post_init__(self):
        imgs = tuple(self.target.ring(g) for g in self.images)
        if len(imgs) != self.source.ngens:
            raise ValueError(f"need {self.source.ngens} images, got {len(imgs)}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def by_name(cls, source, target, mapping: Mapping) -> AlgebraMap:
        """Images given as ``{source variable name: polynomial or text}``;
        unspecified variables go to the same-named target variable."""
        imgs = []
        for name in source.names:
            if name in mapping:
                imgs.append(target.ring(mapping[name]))
            else:
                imgs.append(target.ring.gen(name))
        return cls(source, target, tuple(imgs))

    @classmethod
    def identity(cls, A: FinitelyPresentedAlgebra) -> AlgebraMap:
        return cls(A, A, A.ring.gens)

    def raw(self, f: Polynomial) -> Polynomial:
        """Substitute without reducing."""
        if f.ring != self.source.ring:
            raise ValueError("argument is not in the source ring")
        return f.compose(self.images, self.target.ring)

    def __call__(self, f) -> Polynomial:
        return self.target.reduce(self.raw(self.source.ring(f)))

    def compose(self, other: AlgebraMap) -> AlgebraMap:
        """``self ∘ other``."""
        if other.target.ring != self.source.ring:
            raise ValueError("maps are not composable")
        return AlgebraMap(other.source, self.target, tuple(self(g) for g in other.images))

    def violations(self) -> list:
        """Source relations whose image is nonzero in the target."""
        return [g for g in self.source.ideal.gens if not self.target.is_zero(self.raw(g))]

    def is_well_defined(self) -> bool:
        return not self.violations()

    def check(self) -> AlgebraMap:
        bad = self.violations()
        if bad:
            raise IllDefinedMap(f"relation {bad[0]} does not map to zero")
        return self

    def agrees_with(self, other: AlgebraMap) -> bool:
        """Equal on generators modulo the target ideal."""
        return all(self.target.is_zero(a - b) for a, b in zip(self.images, other.images))

    # -- variable sections ---------------------------------------------------
    @cached_property
    def _section(self):
        """``pos[t] = s`` when source variable ``s`` maps to target variable
        ``t`` verbatim, for every target variable; otherwise ``None``.

        Such maps are split by renaming ``t -> s``, which gives lifts and
        kernels without elimination."""
        T = self.target.ring
        one = T.field.one
        pos = [None] * T.ngens
        for s, img in enumerate(self.images):
            if len(img.terms) == 1:
                (m, c), = img.terms.items()
                if c == one and sum(m) == 1:
                    t = m.index(1)
                    if pos[t] is None:
                        pos[t] = s
        if any(p is None for p in pos):
            return None
        return pos

    # -- graph ideal machinery ---------------------------------------------
    @cached_property
    def _graph(self):
        """Reduced basis of ``I_target + (s_i - image_i)`` in
        ``k[target vars, source vars]`` with target variables eliminated first."""
        T, S = self.target.ring, self.source.ring
        nt, ns = T.ngens, S.ngens
        G = PolynomialRing(T.field, tuple(f"_y{i}" for i in range(nt)) + tuple(f"_x{i}" for i in range(ns)),
                           block_order(nt))
        tpos = list(range(nt))
        gens = [transfer(g, G, tpos) for g in self.target.ideal.gens]
        for i, img in enumerate(self.images):
            gens.append(G.gen(nt + i) - transfer(img, G, tpos))
        return G, tuple(buchberger(gens))

    def _graph_nf(self, b: Polynomial) -> Polynomial:
        G, basis = self._graph
        return normal_form(transfer(b, G, list(range(self.target.ngens))), basis)

    def _to_source(self, f: Polynomial):
        nt = self.target.ngens
        if any(any(m[:nt]) for m in f.terms):
            return None
        return transfer(f, self.source.ring, [None] * nt + list(range(self.source.ngens)))

    def lift(self, b) -> Polynomial:
        """A source element mapping to ``b``; raises :class:`NotInImage`."""
        if self._section is not None:
            return transfer(self.target.ring(b), self.source.ring, self._section)
        a = self._to_source(self._graph_nf(self.target.ring(b)))
        if a is None:
            raise NotInImage(f"{b} is not in the image")
        return a

    def in_image(self, b) -> bool:
        if self._section is not None:
            return True
        return self._to_source(self._graph_nf(self.target.ring(b))) is not None


def kernel_of_map(phi: AlgebraMap, fast: bool = True) -> Ideal:
    """Kernel of ``k[source vars] -> target``, presented in the source's ring.

    The general route eliminates the target variables from the graph ideal.
    When ``phi`` sends some source variables verbatim onto all target
    variables the kernel is written down directly (``fast=False`` forces
    elimination)."""
    phi.check()
    if phi._section is not None and fast:
        return _split_kernel(phi)
    G, basis = phi._graph
    nt = phi.target.ngens
    S = phi.source.ring
    back = [None] * nt + list(range(S.ngens))
    gens = [transfer(g, S, back) for g in basis if all(not any(m[:nt]) for m in g.terms)]
    if S.order == GREVLEX:
        return Ideal.from_basis(S, gens)
    return Ideal(S, gens)


def _split_kernel(phi: AlgebraMap) -> Ideal:
    S = phi.source.ring
    sec = phi._section
    used = set(sec)
    gens = [transfer(g, S, sec) for g in phi.target.ideal.gens]
    for s, img in enumerate(phi.images):
        if s not in used:
            gens.append(S.gen(s) - transfer(img, S, sec))
    return Ideal(S, gens)


def is_surjective(phi: AlgebraMap) -> bool:
    """Every target variable lies in the image subalgebra."""
    phi.check()
    return all(phi.in_image(y) for y in phi.target.ring.gens)


def is_isomorphism(phi: AlgebraMap) -> bool:
    """Well-defined, surjective, and with kernel equal to the source ideal."""
    if not phi.is_well_defined() or not is_surjective(phi):
        return False
    K = kernel_of_map(phi)
    return all(phi.source.is_zero(g) for g in K.gens)


def inverse_map(phi: AlgebraMap) -> AlgebraMap:
    """Inverse of an isomorphism, built by lifting target generators."""
    if not is_isomorphism(phi):
        raise ValueError("map is not an isomorphism")
    imgs = tuple(phi.source.reduce(phi.lift(y)) for y in phi.target.ring.gens)
    return AlgebraMap(phi.target, phi.source, imgs)


@dataclass(frozen=True, eq=False)
class Localization:
    """``A_f = A[s]/(s·f - 1)`` with its canonical map from ``A``."""

    algebra: FinitelyPresentedAlgebra
    map: AlgebraMap
    element: Polynomial
    inverse_var: str

    @property
    def inverse(self) -> Polynomial:
        return self.algebra.ring.gen(self.inverse_var)


def localize(A: FinitelyPresentedAlgebra, f, name: str = "s") -> Localization:
    """Distinguished-open coordinate ring. Localizing at an element that is
    zero in ``A`` is rejected; a nilpotent gives the zero ring."""
    f = A.ring(f)
    if A.is_zero(f):
        raise ValueError(f"cannot localize at {f}, which is zero in the algebra")
    s = fresh_name(A.names, name)
    R = PolynomialRing(A.field, A.names + (s,), A.ring.order if A.ring.order.kind != "block" else GREVLEX)
    pos = list(range(A.ngens))
    rels = [transfer(g, R, pos) for g in A.ideal.gens]
    rels.append(R.gen(s) * transfer(f, R, pos) - 1)
    B = FinitelyPresentedAlgebra.presented(R, rels)
    m = AlgebraMap(A, B, R.gens[: A.ngens])
    return Localization(B, m, f, s)


def invert(B: FinitelyPresentedAlgebra, u) -> Polynomial:
    """Inverse of a unit of ``B``, as a reduced element."""
    u = B.ring(u)
    T = PolynomialRing(B.field, ("_r",) + tuple(f"_b{i}" for i in range(B.ngens)), block_order(1))
    shift = list(range(1, B.ngens + 1))
    gens = [transfer(g, T, shift) for g in B.ideal.gens]
    gens.append(T.gen(0) * transfer(u, T, shift) - 1)
    nf = normal_form(T.gen(0), buchberger(gens))
    if any(m[0] for m in nf.terms):
        raise NotAUnit(f"{u} is not a unit")
    return B.reduce(transfer(nf, B.ring, [None] + list(range(B.ngens))))


def extend_to_localization(phi: AlgebraMap, loc: Localization, target_inverse=None) -> AlgebraMap:
    """Extend ``phi: A -> B`` to ``A_f -> B``; ``phi(f)`` must be a unit.

    ``target_inverse`` may supply the inverse of ``phi(f)`` when known."""
    if loc.map.source.ring != phi.source.ring:
        raise ValueError("localization is not of the map's source")
    u = phi(loc.element)
    inv = phi.target.ring(target_inverse) if target_inverse is not None else invert(phi.target, u)
    imgs = tuple(phi.images) + (inv,)
    return AlgebraMap(loc.algebra, phi.target, imgs)


def substitute_point(A: FinitelyPresentedAlgebra, assignment: Mapping) -> tuple:
    """Quotient by ``var - value`` for each assigned variable, presented in
    the remaining variables. Returns ``(algebra, map from A)``."""
    F = A.field
    idx = {}
    for name, value in assignment.items():
        i = A.ring.index(name) if isinstance(name, str) else int(name)
        idx[i] = F(value)
    rest = [i for i in range(A.ngens) if i not in idx]
    R = PolynomialRing(F, tuple(A.names[i] for i in rest), A.ring.order if A.ring.order.kind != "block" else GREVLEX)
    images = []
    for i in range(A.ngens):
        images.append(R.constant(idx[i]) if i in idx else R.gen(rest.index(i)))
    rels = [g.compose(images, R) for g in A.ideal.gens]
    B = FinitelyPresentedAlgebra.presented(R, rels)
    return B, AlgebraMap(A, B, tuple(images))


def tensor_affine(A: FinitelyPresentedAlgebra, names: Sequence[str]) -> FinitelyPresentedAlgebra:
    """``A ⊗ k[names]``: same relations, extra free variables appended."""
    R = PolynomialRing(A.field, A.names + tuple(names), A.ring.order if A.ring.order.kind != "block" else GREVLEX)
    pos = list(range(A.ngens))
    return FinitelyPresentedAlgebra.presented(R, [transfer(g, R, pos) for g in A.ideal.gens])


def substitute_variable(f: Polynomial, i: int, h: Polynomial, powers: dict | None = None) -> Polynomial:
    """Replace variable ``i`` of ``f`` by ``h`` (``powers`` caches ``h**e``)."""
    if not any(m[i] for m in f.terms):
        return f
    if powers is None:
        powers = {}
    R = f.ring
    out = R.zero
    rest = {}
    for m, c in f.terms.items():
        e = m[i]
        if not e:
            rest[m] = c
            continue
        if e not in powers:
            powers[e] = h ** e
        mm = m[:i] + (0,) + m[i + 1:]
        out = out + powers[e].mul_term(mm, c)
    return out + Polynomial(R, rest)


def linear_variable(g: Polynomial, alive: set):
    """A variable occurring in ``g`` only in one degree-one term."""
    n = g.ring.ngens
    for i in sorted(g.support() & alive, reverse=True):
        unit = tuple(1 if j == i else 0 for j in range(n))
        if unit in g.terms and all(m == unit or not m[i] for m in g.terms):
            return i, unit
    return None


def simplify(A: FinitelyPresentedAlgebra, degree_cap: int | None = None) -> tuple:
    """Drop variables that some relation expresses in terms of the others.

    A substitution is skipped when it could push a relation above total
    degree ``degree_cap`` (no limit when ``None``), which keeps large
    presentations from swelling. Returns ``(B, to_B, from_B)`` with
    ``to_B: A -> B`` and ``from_B: B -> A`` mutually inverse isomorphisms;
    ``B`` keeps the surviving variable names.
    """
    F = A.field
    n = A.ngens
    R = A.ring
    exprs = list(R.gens)  # each original variable in terms of the survivors
    rels = [g for g in A.ideal.known_generators if g]
    alive = set(range(n))

    def fits(i, dh):
        if degree_cap is None:
            return True
        return all(sum(m) + m[i] * (dh - 1) <= degree_cap for r in rels for m in r.terms if m[i])

    progress = True
    while progress:
        progress = False
        for g in sorted(rels, key=lambda r: (r.total_degree(), len(r.terms))):
            hit = linear_variable(g, alive)
            if hit is None:
                continue
            i, unit = hit
            c = g.terms[unit]
            h = (g - R.from_terms({unit: c})) * (-F.inv(c))
            if not fits(i, max(h.total_degree(), 0)):
                continue
            powers: dict = {}
            exprs = [substitute_variable(e, i, h, powers) for e in exprs]
            rels = [r for r in (substitute_variable(r, i, h, powers) for r in rels if r is not g) if r]
            alive.discard(i)
            progress = True
            break
    keep = sorted(alive)
    S = PolynomialRing(F, tuple(A.names[i] for i in keep), R.order if R.order.kind != "block" else GREVLEX)
    pos = [keep.index(j) if j in alive else None for j in range(n)]
    uniq = {}
    for r in rels:
        r = transfer(r, S, pos)
        r = r * F.inv(r.LC)
        uniq.setdefault(tuple(sorted(r.terms.items())), r)
    B = FinitelyPresentedAlgebra.presented(S, list(uniq.values()))
    to_B = AlgebraMap(A, B, tuple(B.reduce(transfer(e, S, pos)) for e in exprs))
    from_B = AlgebraMap(B, A, tuple(R.gen(j) for j in keep))
    return B, to_B, from_B


def tensor_product(A: FinitelyPresentedAlgebra, B: FinitelyPresentedAlgebra, rename=None) -> tuple:
    """``A ⊗ B`` on the disjoint union of the variables (``A``'s first).

    Colliding names of ``B`` get a ``_2``-style suffix unless ``rename``
    supplies ``B``'s names. Returns ``(C, incl_A, incl_B)``.
    """
    if A.field != B.field:
        raise ValueError("algebras over different fields")
    taken = list(A.names)
    if rename is not None:
        bnames = tuple(rename)
        if len(bnames) != B.ngens or set(bnames) & set(taken):
            raise ValueError("bad renaming for the second factor")
    else:
        bnames = []
        for n in B.names:
            m = n if n not in taken else fresh_name(taken + list(B.names), f"{n}_2")
            bnames.append(m)
            taken.append(m)
        bnames = tuple(bnames)
    R = PolynomialRing(A.field, A.names + bnames, GREVLEX)
    pa = list(range(A.ngens))
    pb = list(range(A.ngens, A.ngens + B.ngens))
    rels = [transfer(g, R, pa) for g in A.ideal.gens] + [transfer(g, R, pb) for g in B.ideal.gens]
    C = FinitelyPresentedAlgebra.presented(R, rels)
    return C, AlgebraMap(A, C, R.gens[: A.ngens]), AlgebraMap(B, C, R.gens[A.ngens:])


def product_algebra(A: FinitelyPresentedAlgebra, B: FinitelyPresentedAlgebra, idempotent: str = "eps") -> tuple:
    """``A × B`` presented on ``A``'s and ``B``'s variables plus an
    idempotent ``e`` cutting out ``A``. Returns ``(P, proj_A, proj_B)``."""
    C, ia, ib = tensor_product(A, B)
    e = fresh_name(list(C.names), idempotent)
    R = PolynomialRing(A.field, C.names + (e,), GREVLEX)
    pos = list(range(C.ngens))
    E = R.gen(C.ngens)
    xa = [transfer(g, R, pos) for g in ia.images]
    xb = [transfer(g, R, pos) for g in ib.images]
    rels = [E * E - E] + [(1 - E) * x for x in xa] + [E * y for y in xb]
    rels += [E * g.compose(xa, R) for g in A.ideal.gens]
    rels += [(1 - E) * g.compose(xb, R) for g in B.ideal.gens]
    P = FinitelyPresentedAlgebra.presented(R, rels)
    pa = AlgebraMap(P, A, tuple(A.ring.gens) + tuple([A.ring.zero] * B.ngens) + (A.ring.one,))
    pb = AlgebraMap(P, B, tuple([B.ring.zero] * A.ngens) + tuple(B.ring.gens) + (B.ring.zero,))
    return P, pa, pb
