"""Schemes given by affine charts glued along distinguished opens.

Convention: for charts ``i`` and ``j`` the overlap is ``D(f_ij)`` inside
chart ``i`` and ``D(f_ji)`` inside chart ``j``. The transition is the ring
map ``O(U_j)_{f_ji} -> O(U_i)_{f_ij}`` (i.e. the chart-``j`` coordinates
written in chart-``i`` coordinates).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .polyalg import (
    QQ,
    AlgebraMap,
    FinitelyPresentedAlgebra,
    Localization,
    NotAUnit,
    Polynomial,
    extend_to_localization,
    invert,
    is_surjective,
    localize,
    polynomial_ring,
    tensor_product,
)


class GluingError(ValueError):
    pass


class NotClosedEmbedding(ValueError):
    """A ring map that should be surjective is not."""


@dataclass(frozen=True, eq=False)
class AffineChart:
    label: str
    algebra: FinitelyPresentedAlgebra

    @property
    def names(self):
        return self.algebra.names


@dataclass(frozen=True, eq=False)
class GluingDatum:
    i: int
    j: int
    loc_i: Localization | None
    loc_j: Localization | None
    transition: AlgebraMap | None  # O(U_j)_{f_ji} -> O(U_i)_{f_ij}
    inverse: AlgebraMap | None  # O(U_i)_{f_ij} -> O(U_j)_{f_ji}

    @property
    def empty(self) -> bool:
        return self.transition is None

    @property
    def f_ij(self) -> Polynomial:
        return self.loc_i.element

    @property
    def f_ji(self) -> Polynomial:
        return self.loc_j.element

    def flipped(self) -> GluingDatum:
        return GluingDatum(self.j, self.i, self.loc_j, self.loc_i, self.inverse, self.transition)


def glue(charts: Sequence[AffineChart], i: int, j: int, f_ij, f_ji, images: Mapping, inverse_images: Mapping,
         inverse_names=("s", "s")) -> GluingDatum:
    """Build a gluing datum. ``images`` gives the transition on the variables
    of ``O(U_j)_{f_ji}`` (including its inverse variable) as polynomials over
    ``O(U_i)_{f_ij}``; ``inverse_images`` the other way."""
    Ui, Uj = charts[i].algebra, charts[j].algebra
    li = localize(Ui, f_ij, inverse_names[0])
    lj = localize(Uj, f_ji, inverse_names[1])
    tau = AlgebraMap.by_name(lj.algebra, li.algebra, images)
    sigma = AlgebraMap.by_name(li.algebra, lj.algebra, inverse_images)
    return GluingDatum(i, j, li, lj, tau, sigma)


def empty_gluing(i: int, j: int) -> GluingDatum:
    return GluingDatum(i, j, None, None, None, None)


@dataclass(frozen=True, eq=False)
class ChartedScheme:
    charts: tuple
    gluings: Mapping = field(default_factory=dict)  # (i, j) with i < j

    def __post_init__(self):
        charts = tuple(self.charts)
        object.__setattr__(self, "charts", charts)
        labels = [c.label for c in charts]
        if len(set(labels)) != len(labels):
            raise GluingError(f"duplicate chart labels {labels}")
        if len({c.algebra.field for c in charts}) > 1:
            raise GluingError("charts over different fields")
        g = {}
        for key, d in dict(self.gluings).items():
            a, b = key
            if a > b:
                a, b, d = b, a, d.flipped()
            g[(a, b)] = d
        for a, b in combinations(range(len(charts)), 2):
            if (a, b) not in g:
                raise GluingError(f"no gluing datum for charts {labels[a]}, {labels[b]}")
        object.__setattr__(self, "gluings", g)

    @property
    def field(self):
        return self.charts[0].algebra.field

    @property
    def labels(self) -> list:
        return [c.label for c in self.charts]

    def __len__(self):
        return len(self.charts)

    def index(self, chart) -> int:
        if isinstance(chart, int):
            return chart
        return self.labels.index(chart)

    def chart(self, c) -> AffineChart:
        return self.charts[self.index(c)]

    def gluing(self, i, j) -> GluingDatum:
        """Datum oriented so that its ``i`` is the first argument."""
        i, j = self.index(i), self.index(j)
        if i == j:
            raise ValueError("a chart is not glued to itself")
        return self.gluings[(i, j)] if i < j else self.gluings[(j, i)].flipped()

    def sub(self, indices) -> ChartedScheme:
        """The open subscheme formed by some of the charts (order kept)."""
        indices = list(indices)
        g = {}
        for a, b in combinations(range(len(indices)), 2):
            d = self.gluing(indices[a], indices[b])
            g[(a, b)] = GluingDatum(a, b, d.loc_i, d.loc_j, d.transition, d.inverse)
        return ChartedScheme(tuple(self.charts[i] for i in indices), g)


def single_chart(algebra: FinitelyPresentedAlgebra, label: str = "U0") -> ChartedScheme:
    return ChartedScheme((AffineChart(label, algebra),), {})


# -- overlaps ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Overlap:
    """``O(U_i ∩ U_j)`` presented in chart ``i``, with the restriction maps
    from both charts. ``algebra`` is ``None`` for an empty overlap."""

    algebra: FinitelyPresentedAlgebra | None
    from_i: AlgebraMap | None
    from_j: AlgebraMap | None

    @property
    def empty(self) -> bool:
        return self.algebra is None


def chart_intersection(X: ChartedScheme, i, j) -> Overlap:
    d = X.gluing(i, j)
    if d.empty:
        return Overlap(None, None, None)
    return Overlap(d.loc_i.algebra, d.loc_i.map, d.transition.compose(d.loc_j.map))


# -- validation ----------------------------------------------------------------

@dataclass
class GluingReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def _identity_failures(m: AlgebraMap, what: str) -> list:
    out = []
    for v, img in zip(m.source.names, m.images):
        if not m.target.is_zero(img - m.target.ring.gen(v)):
            out.append(f"{what}: {v} goes to {img}")
    return out


def validate_gluing(X: ChartedScheme, check_separated: bool = True) -> GluingReport:
    """Check every transition: well-defined, mutually inverse with the
    declared inverse, the overlap separated, and the cocycle identity on
    every triple overlap."""
    rep = GluingReport()
    L = X.labels
    for (a, b), d in sorted(X.gluings.items()):
        if d.empty:
            continue
        tag = f"{L[a]}-{L[b]}"
        bad = False
        for m, name in ((d.transition, "transition"), (d.inverse, "inverse")):
            for g in m.violations():
                rep.failures.append(f"{tag}: {name} is not well defined on relation {g}")
                bad = True
        if bad:
            continue
        inv1 = _identity_failures(d.transition.compose(d.inverse), f"{tag}: inverse check on chart {L[a]}")
        inv2 = _identity_failures(d.inverse.compose(d.transition), f"{tag}: inverse check on chart {L[b]}")
        rep.failures += inv1 + inv2
        if check_separated and not inv1 and not inv2:
            ov = chart_intersection(X, a, b)
            C, ia, ib = tensor_product(X.charts[a].algebra, X.charts[b].algebra)
            diag = AlgebraMap(C, ov.algebra, ov.from_i.images + ov.from_j.images)
            if not is_surjective(diag):
                rep.failures.append(f"{tag}: overlap is not closed in the product (not separated)")
    if rep.failures:
        return rep
    for a, b, c in combinations(range(len(X)), 3):
        rep.failures += _cocycle_failures(X, a, b, c)
    return rep


def _triple_ring(X: ChartedScheme, a: int, b: int, c: int):
    """``O(U_a ∩ U_b ∩ U_c)`` in chart ``a``: the localization of
    ``O(U_a)_{f_ab}`` at ``f_ac``."""
    dab, dac = X.gluing(a, b), X.gluing(a, c)
    inner = dab.loc_i
    outer = localize(inner.algebra, inner.map(dac.f_ij), "s")
    return outer


def _via(X: ChartedScheme, a: int, b: int, into_target: AlgebraMap) -> AlgebraMap:
    """Map ``O(U_b) -> target`` obtained from ``O(U_b)_{f_ba} -> O(U_a)_{f_ab}``
    and ``into_target: O(U_a)_{f_ab} -> target``."""
    d = X.gluing(a, b)
    return into_target.compose(d.transition).compose(d.loc_j.map)


def _cocycle_failures(X: ChartedScheme, a: int, b: int, c: int) -> list:
    L = X.labels
    dab, dac, dbc = X.gluing(a, b), X.gluing(a, c), X.gluing(b, c)
    if dab.empty or dac.empty:
        return []
    if dbc.empty:
        # then U_a ∩ U_b ∩ U_c must be empty as seen from chart a
        if not _triple_ring(X, a, b, c).algebra.is_zero_ring():
            return [f"{L[a]}-{L[b]}-{L[c]}: triple overlap is nonempty but {L[b]}-{L[c]} is empty"]
        return []
    tag = f"{L[a]}-{L[b]}-{L[c]}"
    T = _triple_ring(X, a, b, c)
    A_T = T.algebra
    # O(U_a)_{f_ab} -> triple ring
    into = T.map
    # O(U_a)_{f_ac} -> triple ring: inverse of f_ac is the new variable
    into_c = extend_to_localization(into.compose(dab.loc_i.map), dac.loc_i, T.inverse)
    direct = into_c.compose(dac.transition).compose(dac.loc_j.map)  # O(U_c) -> T
    # through chart b: O(U_b) -> T, then O(U_b)_{f_bc} -> T needs f_bc a unit
    phi_b = _via(X, a, b, into)
    try:
        u_inv = invert(A_T, phi_b(dbc.f_ij))
    except NotAUnit:
        return [f"{tag}: {L[b]}-{L[c]} overlap does not contain the triple overlap"]
    phi_b_loc = extend_to_localization(phi_b, dbc.loc_i, u_inv)
    through = phi_b_loc.compose(dbc.transition).compose(dbc.loc_j.map)
    out = []
    for v, x, y in zip(X.charts[c].names, direct.images, through.images):
        if not A_T.is_zero(x - y):
            out.append(f"{tag}: cocycle fails on {v} ({x} vs {y})")
    return out


# -- closed embeddings ---------------------------------------------------------

def ambient_embedding(A: FinitelyPresentedAlgebra) -> AlgebraMap:
    """The presentation surjection ``k[vars] -> A``."""
    return AlgebraMap(FinitelyPresentedAlgebra.free(A.ring), A, A.ring.gens)


def graph_embedding(f: AlgebraMap, g: AlgebraMap, z_names=None) -> AlgebraMap:
    """From ``f: O(Y) -> O(X)`` and a surjection ``g: O(Z) -> O(X)``, the
    surjection ``O(Y) ⊗ O(Z) -> O(X)`` of the embedding ``X -> Z x Y``.

    The product ring lists ``Y``'s variables first; ``z_names`` optionally
    renames ``Z``'s.
    """
    if f.target.ring != g.target.ring:
        raise ValueError("maps have different targets")
    if not is_surjective(g):
        raise NotClosedEmbedding("second map must be a closed embedding (surjective on rings)")
    C, _, _ = tensor_product(f.source, g.source, rename=z_names)
    h = AlgebraMap(C, g.target, f.images + g.images)
    h.check()
    assert is_surjective(h), "graph of a map into a closed embedding must be a closed embedding"
    return h


# -- points --------------------------------------------------------------------

@dataclass(frozen=True)
class RationalPoint:
    chart: str
    values: tuple

    @classmethod
    def of(cls, X: ChartedScheme, chart, values) -> RationalPoint:
        ch = X.chart(chart)
        F = ch.algebra.field
        if isinstance(values, Mapping):
            values = [values[n] for n in ch.names]
        values = tuple(F(v) for v in values)
        if len(values) != ch.algebra.ngens:
            raise ValueError("wrong number of coordinates")
        return cls(ch.label, values)


@dataclass
class PointReport:
    valid: bool
    overlaps: dict  # label -> bool
    violated: list = field(default_factory=list)


def evaluate_point(p: RationalPoint, X: ChartedScheme) -> PointReport:
    i = X.index(p.chart)
    A = X.charts[i].algebra
    bad = [g for g in A.ideal.gens if g.evaluate(p.values) != 0]
    if bad:
        return PointReport(False, {}, bad)
    flags = {}
    for j in range(len(X)):
        if j == i:
            continue
        d = X.gluing(i, j)
        flags[X.labels[j]] = (not d.empty) and d.f_ij.evaluate(p.values) != 0
    return PointReport(True, flags)


def point_in_overlap_coords(p: RationalPoint, X: ChartedScheme, j) -> tuple:
    """Coordinates of ``p`` in ``O(U_i)_{f_ij}`` (chart values plus the
    inverse of ``f_ij``)."""
    i = X.index(p.chart)
    d = X.gluing(i, X.index(j))
    v = d.f_ij.evaluate(p.values)
    if d.empty or v == 0:
        raise ValueError("point is not in the overlap")
    return p.values + (X.field.inv(v),)


def transport_point(p: RationalPoint, X: ChartedScheme, j) -> RationalPoint:
    """The same point written in chart ``j``."""
    j = X.index(j)
    i = X.index(p.chart)
    d = X.gluing(i, j)
    pt = point_in_overlap_coords(p, X, j)
    vals = tuple(img.evaluate(pt) for img in d.transition.images[: X.charts[j].algebra.ngens])
    return RationalPoint(X.labels[j], vals)


# -- morphisms -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SchemeMorphism:
    """``assignment[a]`` is the target chart receiving source chart ``a``;
    ``maps[a]: O(target chart) -> O(source chart a)``."""

    source: ChartedScheme
    target: ChartedScheme
    assignment: tuple
    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(self.target.index(c) for c in self.assignment))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.assignment) != len(self.source) or len(self.maps) != len(self.source):
            raise ValueError("need one chart assignment and map per source chart")
        for a, (c, m) in enumerate(zip(self.assignment, self.maps)):
            if m.source.ring != self.target.charts[c].algebra.ring or m.target.ring != self.source.charts[a].algebra.ring:
                raise ValueError(f"map for source chart {a} has the wrong rings")


def identity_morphism(X: ChartedScheme) -> SchemeMorphism:
    return SchemeMorphism(X, X, tuple(range(len(X))),
                          tuple(AlgebraMap.identity(c.algebra) for c in X.charts))


def check_morphism(f: SchemeMorphism) -> list:
    """Failures of well-definedness and of agreement on source overlaps."""
    X, Y = f.source, f.target
    out = []
    for a, m in enumerate(f.maps):
        for g in m.violations():
            out.append(f"chart {X.labels[a]}: relation {g} not preserved")
    if out:
        return out
    for a, b in combinations(range(len(X)), 2):
        ov = chart_intersection(X, a, b)
        if ov.empty:
            continue
        ca, cb = f.assignment[a], f.assignment[b]
        pa = ov.from_i.compose(f.maps[a])  # O(U_ca) -> O(V_ab)
        pb = ov.from_j.compose(f.maps[b])  # O(U_cb) -> O(V_ab)
        if ca != cb:
            d = Y.gluing(ca, cb)
            if d.empty:
                out.append(f"{X.labels[a]}-{X.labels[b]}: images land in disjoint charts")
                continue
            try:
                inv = invert(ov.algebra, pa(d.f_ij))
            except NotAUnit:
                out.append(f"{X.labels[a]}-{X.labels[b]}: overlap does not map into the target overlap")
                continue
            pa = extend_to_localization(pa, d.loc_i, inv).compose(d.transition).compose(d.loc_j.map)
        for v, x, y in zip(Y.charts[cb].names, pa.images, pb.images):
            if not ov.algebra.is_zero(x - y):
                out.append(f"{X.labels[a]}-{X.labels[b]}: maps disagree on {v}")
    return out


# -- standard examples ---------------------------------------------------------

def _pn_names(n: int, i: int) -> tuple:
    if n == 1:
        return ("x",) if i == 0 else ("y",)
    return tuple(f"u{i}_{j}" for j in range(n + 1) if j != i)


def projective_space(n: int, field=QQ) -> ChartedScheme:
    """``P^n`` with its standard charts. For ``n = 1`` the charts are
    ``k[x]`` and ``k[y]`` glued by ``y = 1/x``; in general chart ``i`` has
    coordinates ``u{i}_{j} = X_j/X_i``."""
    if n < 1:
        raise ValueError("need n >= 1")
    charts = []
    for i in range(n + 1):
        R = polynomial_ring(_pn_names(n, i), field)
        charts.append(AffineChart(f"U{i}", FinitelyPresentedAlgebra.free(R)))

    def coord(i, j):
        return _pn_names(n, i)[j if j < i else j - 1]

    g = {}
    for i, j in combinations(range(n + 1), 2):
        si, sj = "s", "s"
        # transition O(U_j)_{X_i/X_j} -> O(U_i)_{X_j/X_i}
        images = {sj: coord(i, j)}
        inverse = {si: coord(j, i)}
        for k in range(n + 1):
            if k == j:
                continue
            images[coord(j, k)] = si if k == i else f"{coord(i, k)}*{si}"
        for k in range(n + 1):
            if k == i:
                continue
            inverse[coord(i, k)] = sj if k == j else f"{coord(j, k)}*{sj}"
        g[(i, j)] = glue(charts, i, j, coord(i, j), coord(j, i), images, inverse)
    return ChartedScheme(tuple(charts), g)


def disjoint_union(*schemes: ChartedScheme) -> ChartedScheme:
    """Charts of all inputs in order; labels get a ``.k`` suffix when they
    would collide."""
    charts, offsets, g = [], [], {}
    seen = set()
    for k, X in enumerate(schemes):
        offsets.append(len(charts))
        for c in X.charts:
            label = c.label if c.label not in seen else f"{c.label}.{k}"
            seen.add(label)
            charts.append(AffineChart(label, c.algebra))
    for k, X in enumerate(schemes):
        o = offsets[k]
        for (a, b), d in X.gluings.items():
            g[(a + o, b + o)] = GluingDatum(a + o, b + o, d.loc_i, d.loc_j, d.transition, d.inverse)
    for a, b in combinations(range(len(charts)), 2):
        g.setdefault((a, b), empty_gluing(a, b))
    return ChartedScheme(tuple(charts), g)


def affine_line_two_opens(field=QQ) -> ChartedScheme:
    """``A^1`` covered by ``D(x)`` and ``D(x - 1)``."""
    R0 = polynomial_ring("x a", field)
    R1 = polynomial_ring("x b", field)
    charts = (AffineChart("D(x)", FinitelyPresentedAlgebra.presented(R0, ["a*x-1"])),
              AffineChart("D(x-1)", FinitelyPresentedAlgebra.presented(R1, ["b*x-b-1"])))
    d = glue(charts, 0, 1, "x-1", "x", {"x": "x", "b": "s", "s": "a"}, {"x": "x", "a": "s", "s": "b"})
    return ChartedScheme(charts, {(0, 1): d})


def points(k: int, field=QQ) -> ChartedScheme:
    """``k`` disjoint reduced points."""
    pts = [single_chart(FinitelyPresentedAlgebra.free(polynomial_ring([], field)), f"P{i}") for i in range(k)]
    return disjoint_union(*pts)


def broken_projective_line(field=QQ) -> ChartedScheme:
    """``P^1`` charts glued by ``y -> x`` but with the standard inverse
    declared: the declared maps are not mutually inverse."""
    X = projective_space(1, field)
    d = glue(X.charts, 0, 1, "x", "y", {"y": "x", "s": "s"}, {"x": "s", "s": "y"})
    return ChartedScheme(X.charts, {(0, 1): d})
