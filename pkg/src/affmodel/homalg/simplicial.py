"""Finite simplicial complexes, their cochains, and skeletal-type filtrations.

Simplices are sorted vertex tuples. A filtration of ``Y`` is a list of
subcomplexes ``Y_0 ⊆ Y_1 ⊆ ... ⊆ Y_k = Y``; pulled back along a simplicial
map it filters the cochains of the source by relative cochains:
``F^a C(X) = C(X, X_{a-1})`` with ``X_a = f^{-1}(Y_a)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Mapping, Sequence

from ..polyalg.field import QQ
from .complexes import CochainComplex, FilteredCochainComplex, GradedVectorSpace, cohomology, spectral_sequence


class NotSimplicial(ValueError):
    pass


def _faces(s: tuple) -> list:
    return [s[:j] + s[j + 1:] for j in range(len(s))]


@dataclass(frozen=True, eq=False)
class FiniteSimplicialComplex:
    simplices: frozenset

    @classmethod
    def from_maximal(cls, maximal, vertices=()) -> FiniteSimplicialComplex:
        """Downward closure of ``maximal`` (plus isolated ``vertices``)."""
        out = set()
        for s in maximal:
            s = tuple(sorted(set(s)))
            for k in range(1, len(s) + 1):
                out.update(combinations(s, k))
        out.update((v,) for v in vertices)
        return cls(frozenset(out))

    def __post_init__(self):
        S = frozenset(tuple(sorted(set(s))) for s in self.simplices if len(s))
        object.__setattr__(self, "simplices", S)
        for s in S:
            for f in _faces(s):
                if f and f not in S:
                    raise NotSimplicial(f"face {f} of {s} is missing")

    @cached_property
    def vertices(self) -> list:
        return sorted(v for (v,) in (s for s in self.simplices if len(s) == 1))

    @cached_property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def by_dimension(self, n) -> list:
        return sorted(s for s in self.simplices if len(s) == n + 1)

    def __contains__(self, s) -> bool:
        return tuple(sorted(set(s))) in self.simplices

    def __le__(self, other: FiniteSimplicialComplex) -> bool:
        return self.simplices <= other.simplices

    def skeleton(self, k) -> FiniteSimplicialComplex:
        return FiniteSimplicialComplex(frozenset(s for s in self.simplices if len(s) <= k + 1))

    def skeleta(self) -> list:
        return [self.skeleton(k) for k in range(self.dimension + 1)]

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** (len(s) - 1) for s in self.simplices)


def cochain_complex(X: FiniteSimplicialComplex, sub: FiniteSimplicialComplex | None = None,
                    field=QQ) -> CochainComplex:
    """Cochains of ``X`` vanishing on ``sub``, basis ordered by simplex:
    ``(dφ)(σ) = Σ_j (-1)^j φ(∂_j σ)``."""
    skip = sub.simplices if sub is not None else frozenset()
    cells = {n: [s for s in X.by_dimension(n) if s not in skip] for n in range(X.dimension + 1)}
    idx = {n: {s: i for i, s in enumerate(c)} for n, c in cells.items()}
    d = {}
    for n in range(X.dimension):
        M = [[field.zero] * len(cells[n]) for _ in cells[n + 1]]
        for r, s in enumerate(cells[n + 1]):
            for j, f in enumerate(_faces(s)):
                c = idx[n].get(f)
                if c is not None:
                    M[r][c] = field(1 if j % 2 == 0 else -1)
        d[n] = M
    return CochainComplex({n: len(c) for n, c in cells.items()}, d, field)


def simplicial_cohomology(X: FiniteSimplicialComplex, sub: FiniteSimplicialComplex | None = None,
                          field=QQ) -> GradedVectorSpace:
    return cohomology(cochain_complex(X, sub, field))


@dataclass(frozen=True, eq=False)
class SimplicialMap:
    source: FiniteSimplicialComplex
    target: FiniteSimplicialComplex
    vertex_map: Mapping

    def __post_init__(self):
        vm = dict(self.vertex_map)
        object.__setattr__(self, "vertex_map", vm)
        missing = [v for v in self.source.vertices if v not in vm]
        if missing:
            raise NotSimplicial(f"vertices {missing} have no image")
        for s in self.source.simplices:
            if self.image(s) not in self.target.simplices:
                raise NotSimplicial(f"image of {s} is not a simplex")

    def image(self, s) -> tuple:
        return tuple(sorted({self.vertex_map[v] for v in s}))

    def preimage(self, sub: FiniteSimplicialComplex) -> FiniteSimplicialComplex:
        """Largest subcomplex of the source mapping into ``sub``."""
        return FiniteSimplicialComplex(frozenset(s for s in self.source.simplices if self.image(s) in sub.simplices))


def _check_filtration(Y: FiniteSimplicialComplex, stages: Sequence) -> None:
    if not stages:
        raise NotSimplicial("empty filtration")
    for a, b in zip(stages, stages[1:]):
        if not a <= b:
            raise NotSimplicial("filtration is not nested")
    if stages[-1].simplices != Y.simplices:
        raise NotSimplicial("filtration does not exhaust the complex")


def filtered_cochains(X: FiniteSimplicialComplex, stages: Sequence, field=QQ) -> FilteredCochainComplex:
    """``F^a C(X) = C(X, X_{a-1})``: a simplex first appearing in stage ``a``
    has weight ``a``."""
    _check_filtration(X, stages)
    C = cochain_complex(X, None, field)
    weight = {}
    for a, st in enumerate(stages):
        for s in st.simplices:
            weight.setdefault(s, a)
    weights = {n: [weight[s] for s in X.by_dimension(n)] for n in range(X.dimension + 1)}
    return FilteredCochainComplex.from_weights(C, weights)


@dataclass(frozen=True, eq=False)
class SkeletalSpectralSequence:
    map: SimplicialMap
    stages: tuple  # filtration of the target
    preimages: tuple  # X_a = f^{-1}(Y_a)
    sequence: object

    @property
    def limit(self) -> GradedVectorSpace:
        """Total dimensions of ``E_∞``."""
        out = {}
        for (p, q), k in self.sequence.e_infinity.items():
            out[p + q] = out.get(p + q, 0) + k
        return GradedVectorSpace(out)

    @property
    def target_cohomology(self) -> GradedVectorSpace:
        return simplicial_cohomology(self.map.source, field=self.sequence.filtered.field)

    @property
    def converges(self) -> bool:
        return self.sequence.converges and self.limit == self.target_cohomology


def skeletal_filtration_ss(f: SimplicialMap, stages: Sequence | None = None, field=QQ,
                           up_to_page: int = 0) -> SkeletalSpectralSequence:
    """Spectral sequence of the cochains of ``X`` filtered by the preimages of
    a filtration of ``Y`` (default: the skeleta of ``Y``)."""
    Y = f.target
    stages = list(stages) if stages is not None else Y.skeleta()
    _check_filtration(Y, stages)
    pre = [f.preimage(st) for st in stages]
    FC = filtered_cochains(f.source, pre, field)
    return SkeletalSpectralSequence(f, tuple(stages), tuple(pre), spectral_sequence(FC, up_to_page))


@dataclass(frozen=True)
class CellularReport:
    stages: tuple  # (a, relative cohomology, ok)

    @property
    def ok(self) -> bool:
        return all(s[2] for s in self.stages)

    def failing(self) -> list:
        return [s[0] for s in self.stages if not s[2]]


def cellular_check(stages_or_dims, field=QQ) -> CellularReport:
    """Stage ``a`` passes when its relative cohomology lives in degree ``a``
    only. Takes either a list of nested complexes ``Y_0 ⊆ ... ⊆ Y_k`` or a
    list of precomputed relative cohomologies (``GradedVectorSpace`` or
    degree -> dim mappings)."""
    items = list(stages_or_dims)
    out = []
    if items and isinstance(items[0], FiniteSimplicialComplex):
        prev = None
        for a, st in enumerate(items):
            H = simplicial_cohomology(st, prev, field)
            out.append((a, H, all(n == a for n, k in H.dims.items() if k)))
            prev = st
    else:
        for a, H in enumerate(items):
            H = H if isinstance(H, GradedVectorSpace) else GradedVectorSpace(H)
            out.append((a, H, all(n == a for n, k in H.dims.items() if k)))
    return CellularReport(tuple(out))


# -- examples ------------------------------------------------------------------

def simplex(n: int, vertices=None) -> FiniteSimplicialComplex:
    vs = list(vertices) if vertices is not None else list(range(n + 1))
    return FiniteSimplicialComplex.from_maximal([tuple(vs)])


def boundary_of_simplex(n: int, vertices=None) -> FiniteSimplicialComplex:
    vs = list(vertices) if vertices is not None else list(range(n + 1))
    return FiniteSimplicialComplex.from_maximal(list(combinations(vs, n)))


def hollow_triangle(vertices=(0, 1, 2)) -> FiniteSimplicialComplex:
    return boundary_of_simplex(2, vertices)


def point() -> FiniteSimplicialComplex:
    return FiniteSimplicialComplex.from_maximal([(0,)])


def interval() -> FiniteSimplicialComplex:
    return FiniteSimplicialComplex.from_maximal([(0, 1)])


def two_disjoint_circles() -> FiniteSimplicialComplex:
    return FiniteSimplicialComplex.from_maximal(list(hollow_triangle((0, 1, 2)).by_dimension(1))
                                                + list(hollow_triangle((3, 4, 5)).by_dimension(1)))


def prism(base: FiniteSimplicialComplex | None = None) -> tuple:
    """``base × [0, 1]`` triangulated by the staircase rule, with the
    projection onto ``base``. Vertices are ``(v, t)``."""
    base = hollow_triangle() if base is None else base
    top = []
    for s in base.simplices:
        for i in range(len(s)):
            top.append(tuple((v, 0) for v in s[: i + 1]) + tuple((v, 1) for v in s[i:]))
    P = FiniteSimplicialComplex.from_maximal(top)
    proj = SimplicialMap(P, base, {(v, t): v for v in base.vertices for t in (0, 1)})
    return P, proj


def constant_map(X: FiniteSimplicialComplex) -> SimplicialMap:
    return SimplicialMap(X, point(), {v: 0 for v in X.vertices})


def identity_map(X: FiniteSimplicialComplex) -> SimplicialMap:
    return SimplicialMap(X, X, {v: v for v in X.vertices})


def two_stage_counterexample() -> list:
    """A filtration whose second stage adds a circle and a new component at
    once, so its relative cohomology sits in degrees 0 and 1."""
    Y = FiniteSimplicialComplex.from_maximal(list(hollow_triangle().by_dimension(1)), vertices=(3,))
    return [FiniteSimplicialComplex.from_maximal([(0,)]), Y]
