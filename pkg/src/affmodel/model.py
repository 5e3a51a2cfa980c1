"""Affine models of charted schemes by iterated pushouts.

For charts ``C_0..C_{m-1}`` the model is built recursively. With ``M'`` the
model of the first ``m-1`` charts and ``Z = (C_0 ∪ ... ∪ C_{m-2}) ∩ C_{m-1}``,
the model ``M_Z`` of ``Z`` is obtained by pulling ``M'`` back to ``Z``
(re-running the recipe of ``M'`` on the charts ``C_i ∩ C_{m-1}``), which
comes with a restriction map ``O(M') -> O(M_Z)``. With ``e`` the variables of
``M_Z`` the two graph embeddings

    O(M') ⊗ k[a] -> O(M_Z)        O(C_{m-1}) ⊗ k[b] -> O(M_Z)
    (restriction, a -> e)         (transition, b -> e)

are surjective and ``M`` is their pushout. For two charts ``M'`` is the first
chart and ``M_Z`` the overlap, so ``e`` is the overlap's presentation.

Each model remembers its recipe, so it can be pulled back along maps of
charts (:func:`transport`) and functions on it can be assembled from
compatible functions on the charts (:func:`pullback_function`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .polyalg import (
    AlgebraMap,
    FinitelyPresentedAlgebra,
    Ideal,
    NotAUnit,
    PolynomialRing,
    extend_to_localization,
    fresh_name,
    ideal_intersection,
    invert,
    is_isomorphism,
    is_surjective,
    kernel_of_map,
    localize,
    product_algebra,
    simplify,
    tensor_affine,
    transfer,
)
from .polyalg.algebra import Localization
from .polyalg.ring import GREVLEX
from .pushout import ClosedSpan, PushoutResult, fiber_product
from .schemes import (
    AffineChart,
    ChartedScheme,
    GluingDatum,
    GluingError,
    RationalPoint,
    SchemeMorphism,
    empty_gluing,
    evaluate_point,
    single_chart,
    transport_point,
    validate_gluing,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_CHARTS = 4


def zero_algebra(field) -> FinitelyPresentedAlgebra:
    """The zero ring, presented without variables."""
    R = PolynomialRing(field, (), GREVLEX)
    return FinitelyPresentedAlgebra.presented(R, [R.one])


@dataclass(frozen=True, eq=False)
class Piece:
    """Closed piece of a model: ``surj: O(M) -> O(C_i) ⊗ k[names]``.

    ``lifts[k]`` is an element of ``O(M)`` mapping to the k-th chart
    coordinate; modulo the piece ideal these give the model map on the
    piece."""

    chart: int
    surj: AlgebraMap
    names: tuple
    lifts: tuple

    @property
    def thickened(self) -> FinitelyPresentedAlgebra:
        return self.surj.target

    @property
    def dimension(self) -> int:
        return len(self.names)

    @cached_property
    def quotient(self) -> FinitelyPresentedAlgebra:
        """The piece as a closed subscheme: ``O(M)`` modulo the kernel."""
        return FinitelyPresentedAlgebra(self.surj.source.ring, kernel_of_map(self.surj))

    def to_thickened(self) -> AlgebraMap:
        return AlgebraMap(self.quotient, self.thickened, self.surj.images)

    def from_thickened(self) -> AlgebraMap:
        return AlgebraMap(self.thickened, self.quotient, tuple(self.surj.lift(y) for y in self.thickened.ring.gens))

    def chart_map(self, chart_algebra) -> AlgebraMap:
        """The model map on this piece: ``O(C_i) -> O(piece)``."""
        return AlgebraMap(chart_algebra, self.quotient, self.lifts)


@dataclass(frozen=True, eq=False)
class AffineModel:
    scheme: ChartedScheme
    algebra: FinitelyPresentedAlgebra
    left: AffineModel | None = None
    apex: AffineModel | None = None
    restrict: AlgebraMap | None = None  # O(left) -> O(apex)
    to_last: AlgebraMap | None = None  # O(last chart) -> O(apex)
    e: tuple = ()
    result: PushoutResult | None = None
    a_names: tuple = ()
    b_names: tuple = ()
    to_trim: AlgebraMap | None = None  # O(result) -> O(M), an isomorphism
    from_trim: AlgebraMap | None = None  # its inverse

    def from_raw(self, f):
        """Image in ``O(M)`` of an element of the raw pushout presentation."""
        return self.to_trim(f)

    def lift_pair(self, a, b):
        return self.from_raw(self.result.lift_pair(a, b, reduce=False))

    @property
    def ncharts(self) -> int:
        return len(self.scheme)

    @property
    def stage_dimension(self) -> int:
        """``N`` of the last pushout step."""
        return len(self.e)

    def stage_dimensions(self) -> list:
        if self.left is None:
            return []
        return self.left.stage_dimensions() + [len(self.e)]

    @property
    def empty_overlap(self) -> bool:
        return self.apex is not None and self.apex.algebra.is_zero_ring()

    @cached_property
    def pieces(self) -> tuple:
        X = self.scheme
        if self.left is None:
            A = self.algebra
            return (Piece(0, AlgebraMap.identity(A), (), A.ring.gens),)
        res = self.result
        A = res.algebra.ring
        back = self.from_trim
        n = res.ambient.ngens
        to_A = list(range(n))
        xleg = res.to_x.target
        out = []
        for lp in self.left.pieces:
            T = tensor_affine(lp.thickened, self.a_names)
            k = lp.thickened.ngens
            imgs = [transfer(g, T.ring, list(range(k))) for g in lp.surj.images] + list(T.ring.gens[k:])
            ext = AlgebraMap(xleg, T, imgs)
            surj = ext.compose(res.proj_x).compose(back)
            lifts = []
            for f in lp.lifts:
                emb = transfer(f, xleg.ring, list(range(self.left.algebra.ngens)))
                lifts.append(self.from_raw(transfer(res.to_x.lift(emb), A, to_A)))
            out.append(Piece(lp.chart, surj, lp.names + self.a_names, tuple(lifts)))
        yleg = res.to_y.target
        last = X.charts[-1].algebra
        lifts = [self.from_raw(transfer(res.to_y.lift(yleg.ring.gen(i)), A, to_A)) for i in range(last.ngens)]
        out.append(Piece(len(X) - 1, res.proj_y.compose(back), self.b_names, tuple(lifts)))
        return tuple(out)

    def piece_for_chart(self, i) -> Piece:
        i = self.scheme.index(i)
        return next(p for p in self.pieces if p.chart == i)

    def thickening(self, i) -> int:
        return self.piece_for_chart(i).dimension


def identity_model(X: ChartedScheme) -> AffineModel:
    if len(X) != 1:
        raise ValueError("identity model needs a single chart")
    return AffineModel(X, X.charts[0].algebra)


# -- restricting a scheme to an open -------------------------------------------

def _zero_chart(label, field) -> tuple:
    Z = zero_algebra(field)
    return AffineChart(label, Z)


def restrict_to_chart(X: ChartedScheme, last: int) -> tuple:
    """The scheme ``(C_0 ∪ ... ∪ C_{last-1}) ∩ C_last`` charted by
    ``V_i = C_i ∩ C_last`` (presented as localizations of ``C_i``), and the
    restriction maps ``O(C_i) -> O(V_i)``."""
    F = X.field
    charts, maps, locs = [], [], []
    for i in range(last):
        d = X.gluing(i, last)
        label = f"{X.labels[i]}∩{X.labels[last]}"
        if d.empty:
            ch = _zero_chart(label, F)
            charts.append(ch)
            maps.append(AlgebraMap(X.charts[i].algebra, ch.algebra, [ch.algebra.ring.zero] * X.charts[i].algebra.ngens))
            locs.append(None)
        else:
            charts.append(AffineChart(label, d.loc_i.algebra))
            maps.append(d.loc_i.map)
            locs.append(d.loc_i)
    gl = {}
    for i, j in combinations(range(last), 2):
        gl[(i, j)] = _restricted_gluing(X, i, j, locs[i], locs[j], charts)
    return ChartedScheme(tuple(charts), gl), maps


def _restricted_gluing(X, i, j, Li: Localization | None, Lj: Localization | None, charts) -> GluingDatum:
    d = X.gluing(i, j)
    if Li is None or Lj is None or d.empty:
        return empty_gluing(i, j)
    Vi, Vj = Li.algebra, Lj.algebra
    fi = Li.map(d.f_ij)
    fj = Lj.map(d.f_ji)
    if Vi.is_zero(fi) or Vj.is_zero(fj):
        return empty_gluing(i, j)
    Lij = localize(Vi, fi, "r")
    Lji = localize(Vj, fj, "r")
    if Lij.algebra.is_zero_ring() or Lji.algebra.is_zero_ring():
        return empty_gluing(i, j)
    tau = _lift_transition(d, Li, Lj, Lij, Lji)
    sigma = _lift_transition(d.flipped(), Lj, Li, Lji, Lij)
    return GluingDatum(i, j, Lij, Lji, tau, sigma)


def _lift_transition(d: GluingDatum, Li, Lj, Lij, Lji) -> AlgebraMap:
    """``O(V_j)_{f_ji} -> O(V_i)_{f_ij}`` from the transition of ``d``."""
    # O(C_i)_{f_ij} -> O(V_i)_{f_ij}
    base = extend_to_localization(Lij.map.compose(Li.map), d.loc_i, Lij.inverse)
    psi0 = base.compose(d.transition).compose(d.loc_j.map)  # O(C_j) -> T
    psi1 = extend_to_localization(psi0, Lj)  # O(V_j) -> T
    return extend_to_localization(psi1, Lji)


def open_cover_of_chart(V: FinitelyPresentedAlgebra, hs, labels) -> tuple:
    """The affine scheme ``V`` charted by ``D(h)`` for ``h`` in ``hs``
    (``h = 1`` keeps ``V`` itself, ``h = 0`` gives an empty chart). Returns
    the scheme and the restriction maps ``O(V) -> O(D(h))``."""
    charts, locs, maps = [], [], []
    for h, lab in zip(hs, labels):
        h = V.ring(h)
        if h == 1:
            charts.append(AffineChart(lab, V))
            locs.append(None)
            maps.append(AlgebraMap.identity(V))
            continue
        L = None if V.is_zero(h) else localize(V, h, "r")
        if L is None or L.algebra.is_zero_ring():
            ch = _zero_chart(lab, V.field)
            charts.append(ch)
            locs.append(False)
            maps.append(AlgebraMap(V, ch.algebra, [ch.algebra.ring.zero] * V.ngens))
        else:
            charts.append(AffineChart(lab, L.algebra))
            locs.append(L)
            maps.append(L.map)
    gl = {}
    for i, j in combinations(range(len(hs)), 2):
        if locs[i] is False or locs[j] is False:
            gl[(i, j)] = empty_gluing(i, j)
        else:
            gl[(i, j)] = _cover_gluing(V, i, j, charts, maps, locs, hs)
    return ChartedScheme(tuple(charts), gl), maps


def _cover_gluing(V, i, j, charts, maps, locs, hs) -> GluingDatum:
    Wi, Wj = charts[i].algebra, charts[j].algebra
    Lij = localize(Wi, maps[i](V.ring(hs[j])), "r")
    Lji = localize(Wj, maps[j](V.ring(hs[i])), "r")
    if Lij.algebra.is_zero_ring():
        return empty_gluing(i, j)

    def across(src, L_src, dst, L_dst):
        # O(W_src)_h -> O(W_dst)_h' induced by the identity of V
        base = L_dst.map.compose(maps[dst])  # O(V) -> target
        first = base if locs[src] is None else extend_to_localization(base, locs[src])
        return extend_to_localization(first, L_src)

    tau = across(j, Lji, i, Lij)
    sigma = across(i, Lij, j, Lji)
    return GluingDatum(i, j, Lij, Lji, tau, sigma)


# -- the recipe ------------------------------------------------------------------

def _stage_names(left_alg, last_alg, stage: int, N: int, naux_hint=0):
    taken = list(left_alg.names) + list(last_alg.names)
    a, b = [], []
    for j in range(1, N + 1):
        nm = fresh_name(taken, f"a{stage}_{j}")
        a.append(nm)
        taken.append(nm)
    for j in range(1, N + 1):
        nm = fresh_name(taken, f"b{stage}_{j}")
        b.append(nm)
        taken.append(nm)
    return tuple(a), tuple(b), taken


def _assemble(X: ChartedScheme, left: AffineModel, e_from=None) -> AffineModel:
    m = len(X)
    last = m - 1
    Z, cmaps = restrict_to_chart(X, last)
    apex, restrict = transport(left, Z, cmaps)
    O_apex = apex.algebra
    C_last = X.charts[last].algebra
    # the last chart's coordinates as functions on the apex
    values = []
    for i in range(last):
        d = X.gluing(i, last)
        Vi = Z.charts[i].algebra
        if d.empty:
            values.append([Vi.ring.zero] * C_last.ngens)
        else:
            values.append(list(d.transition.compose(d.loc_j.map).images))
    to_last = AlgebraMap(C_last, O_apex, tuple(
        pullback_function(apex, [values[i][k] for i in range(last)]) for k in range(C_last.ngens)))
    e = _thin_embedding(O_apex, restrict, to_last) if e_from is None else tuple(e_from(apex))
    a_names, b_names, taken = _stage_names(left.algebra, C_last, last, len(e))
    xleg = tensor_affine(left.algebra, a_names)
    yleg = tensor_affine(C_last, b_names)
    leg_x = AlgebraMap(xleg, O_apex, tuple(restrict.images) + e)
    leg_y = AlgebraMap(yleg, O_apex, tuple(to_last.images) + e)
    span = ClosedSpan(O_apex, leg_x, leg_y)
    amb_names = list(xleg.names) + [n if n not in xleg.names else fresh_name(taken, f"{n}_2") for n in yleg.names]
    res = fiber_product(span, aux_names=_aux_names(amb_names, last))
    B, to_B, from_B = simplify(res.algebra)
    log.debug("stage %d: %d charts, N=%d, %d variables, %d after trimming", last, m, len(e),
              res.algebra.ngens, B.ngens)
    return AffineModel(X, B, left, apex, restrict, to_last, e, res, a_names, b_names, to_B, from_B)


def _generates(target, images, needed) -> bool:
    """Whether ``images`` generate every element of ``needed`` as an algebra."""
    S = PolynomialRing(target.field, tuple(f"_z{i}" for i in range(len(images))), GREVLEX)
    m = AlgebraMap(FinitelyPresentedAlgebra.free(S), target, images)
    return all(m.in_image(y) for y in needed)


def _thin_embedding(apex, restrict: AlgebraMap, to_last: AlgebraMap) -> tuple:
    """Apex generators ``e`` making both legs ``(restrict, e)`` and
    ``(to_last, e)`` surjective. Starts from all generators and drops them one
    at a time, last first, while both legs stay surjective."""
    gens = apex.ring.gens
    keep = list(range(len(gens)))
    for v in reversed(range(len(gens))):
        trial = [k for k in keep if k != v]
        dropped = [gens[k] for k in range(len(gens)) if k not in trial]
        if all(_generates(apex, list(leg.images) + [gens[k] for k in trial], dropped) for leg in (restrict, to_last)):
            keep = trial
    return tuple(gens[k] for k in keep)


def _aux_names(taken, stage):
    taken = list(taken)

    def names(n):
        out = []
        for j in range(1, n + 1):
            nm = fresh_name(taken, f"g{stage}_{j}")
            out.append(nm)
            taken.append(nm)
        return tuple(out)

    return names


def transport(M: AffineModel, Y: ChartedScheme, chart_maps) -> tuple:
    """Run the recipe of ``M`` on ``Y``, whose charts receive maps
    ``chart_maps[i]: O(C_i) -> O(D_i)`` from the charts of ``M``'s scheme.

    Returns ``(M_Y, rho)`` with ``rho: O(M) -> O(M_Y)`` the induced map."""
    m = M.ncharts
    if len(Y) != m or len(chart_maps) != m:
        raise ValueError("chart count mismatch")
    if m == 1:
        return identity_model(Y), chart_maps[0]
    left_Y, lam = transport(M.left, Y.sub(range(m - 1)), chart_maps[:-1])

    def e_from(apex_Y):
        cm = _apex_chart_maps(M, Y, chart_maps)
        rho = plan_map(M.apex, apex_Y, cm)
        return [rho(x) for x in M.e]

    N = _assemble(Y, left_Y, e_from)
    return N, _stage_map(M, N, lam, chart_maps[-1])


def _apex_chart_maps(M: AffineModel, Y: ChartedScheme, chart_maps) -> list:
    """Maps ``O(C_i ∩ C_last) -> O(D_i ∩ D_last)`` between the apex charts."""
    X = M.scheme
    last = len(X) - 1
    out = []
    for i in range(last):
        dX, dY = X.gluing(i, last), Y.gluing(i, last)
        if dY.empty:
            Zr = zero_algebra(Y.field)
            src = M.apex.scheme.charts[i].algebra
            out.append(AlgebraMap(src, Zr, [Zr.ring.zero] * src.ngens))
            continue
        if dX.empty:
            raise GluingError("charts meet in the target but not in the source")
        base = dY.loc_i.map.compose(chart_maps[i])
        out.append(extend_to_localization(base, dX.loc_i))
    return out


def _stage_map(Ma: AffineModel, Mb: AffineModel, lam: AlgebraMap, last_map: AlgebraMap) -> AlgebraMap:
    ra, rb = Ma.result, Mb.result
    xa, xb = ra.to_x.target, rb.to_x.target
    ya, yb = ra.to_y.target, rb.to_y.target
    kl = Mb.left.algebra.ngens
    on_x = AlgebraMap(xa, xb, [transfer(g, xb.ring, list(range(kl))) for g in lam.images] + list(xb.ring.gens[kl:]))
    kc = last_map.target.ngens
    on_y = AlgebraMap(ya, yb, [transfer(g, yb.ring, list(range(kc))) for g in last_map.images] + list(yb.ring.gens[kc:]))
    imgs = []
    for g in Ma.from_trim.images:
        imgs.append(Mb.lift_pair(on_x(ra.proj_x(g)), on_y(ra.proj_y(g))))
    return AlgebraMap(Ma.algebra, Mb.algebra, tuple(imgs))


def plan_map(Ma: AffineModel, Mb: AffineModel, chart_maps) -> AlgebraMap:
    """``O(Ma) -> O(Mb)`` for two models built by the same recipe, from
    compatible maps of their charts."""
    if Ma.ncharts == 1:
        return chart_maps[0]
    lam = plan_map(Ma.left, Mb.left, chart_maps[:-1])
    return _stage_map(Ma, Mb, lam, chart_maps[-1])


def pullback_function(M: AffineModel, values) -> object:
    """The element of ``O(M)`` restricting to ``values[i]`` (a function on
    chart ``i``) on the piece over chart ``i``; the values must agree on
    overlaps."""
    values = list(values)
    if M.ncharts == 1:
        return M.algebra.reduce(M.algebra.ring(values[0]))
    lv = pullback_function(M.left, values[:-1])
    res = M.result
    xleg, yleg = res.to_x.target, res.to_y.target
    a = transfer(lv, xleg.ring, list(range(M.left.algebra.ngens)))
    last = M.scheme.charts[-1].algebra
    b = transfer(last.ring(values[-1]), yleg.ring, list(range(last.ngens)))
    return M.lift_pair(a, b)


# -- public builders -----------------------------------------------------------

class ChartLimitExceeded(ValueError):
    pass


def build_model(X: ChartedScheme, max_charts: int = DEFAULT_MAX_CHARTS, validate: bool = True) -> AffineModel:
    """Affine model of ``X``; the chart order fixes the induction order."""
    if len(X) > max_charts:
        raise ChartLimitExceeded(f"{len(X)} charts exceed the limit of {max_charts}; the variable count "
                                 "grows quickly with the number of charts")
    if validate:
        rep = validate_gluing(X)
        if not rep.ok:
            raise GluingError("; ".join(rep.failures))
    return _build(X)


def _build(X: ChartedScheme) -> AffineModel:
    if len(X) == 1:
        return identity_model(X)
    left = _build(X.sub(range(len(X) - 1)))
    return _assemble(X, left)


def build_model_two_charts(X: ChartedScheme) -> AffineModel:
    if len(X) != 2:
        raise ValueError("expected exactly two charts")
    return build_model(X)


# -- verification --------------------------------------------------------------

def _identity_on_gens(m: AlgebraMap) -> bool:
    return all(m.target.is_zero(img - m.target.ring.gen(v)) for v, img in zip(m.source.names, m.images))


def check_piece(M: AffineModel, p: Piece) -> list:
    out = []
    tag = f"piece over {M.scheme.labels[p.chart]}"
    C = M.scheme.charts[p.chart].algebra
    if not p.surj.is_well_defined():
        return [f"{tag}: surjection not well defined"]
    if not is_surjective(p.surj):
        return [f"{tag}: not a closed piece"]
    fwd, back = p.to_thickened(), p.from_thickened()
    if not (fwd.is_well_defined() and back.is_well_defined()):
        out.append(f"{tag}: isomorphism with the thickened chart is not well defined")
    elif not (_identity_on_gens(fwd.compose(back)) and _identity_on_gens(back.compose(fwd))):
        out.append(f"{tag}: maps to and from the thickened chart are not inverse")
    # the thickened chart is the chart with free variables adjoined
    T = p.thickened
    rel = [transfer(g, T.ring, list(range(C.ngens))) for g in C.ideal.gens]
    if T.names[: C.ngens] != C.names or not Ideal(T.ring, rel).equals(T.ideal):
        out.append(f"{tag}: thickened algebra is not the chart times affine space")
    # model map on the piece = projection then chart inclusion
    incl = AlgebraMap(C, T, T.ring.gens[: C.ngens])
    cm = p.chart_map(C)
    if not cm.is_well_defined():
        out.append(f"{tag}: model map not well defined")
    elif not fwd.compose(cm).agrees_with(incl):
        out.append(f"{tag}: model map is not the thickening projection")
    return out


def cover_ideal(M: AffineModel) -> Ideal:
    """Intersection of the piece ideals in the model's ambient ring."""
    I = None
    for p in M.pieces:
        K = p.quotient.ideal
        I = K if I is None else ideal_intersection(I, K)
    return I


def check_model(M: AffineModel, cover: bool = True) -> list:
    """All structural invariants of a model; returns the failures."""
    out = []
    for p in M.pieces:
        out += check_piece(M, p)
    if cover and not out and not cover_ideal(M).equals(M.algebra.ideal):
        out.append("pieces do not cover the model (intersection of piece ideals differs)")
    return out


# -- fibers --------------------------------------------------------------------

AFFINE = "affine-space"
TWO_GLUED = "two-affine-spaces-glued-at-point"
OTHER = "other"


@dataclass
class FiberReport:
    point: RationalPoint
    algebra: FinitelyPresentedAlgebra
    classification: str
    dimension: int | None
    iso: AlgebraMap | None = None  # canonical presentation -> fiber algebra
    glue_point: dict | None = None

    def __str__(self):
        if self.classification == AFFINE:
            return f"{AFFINE}({self.dimension})"
        return self.classification


class InvalidPoint(ValueError):
    pass


def _piece_fiber_map(M: AffineModel, p: Piece, point: RationalPoint):
    """``k[M vars] -> k[thickening]``: the piece map with the chart
    coordinates set to the point."""
    C = M.scheme.charts[p.chart]
    q = point if point.chart == C.label else transport_point(point, M.scheme, p.chart)
    T = p.thickened
    R = PolynomialRing(T.field, p.names, GREVLEX)
    images = [R.constant(v) for v in q.values] + list(R.gens)
    sub = [g.compose(images, R) for g in p.surj.images]
    F = FinitelyPresentedAlgebra.free(M.algebra.ring)
    return AlgebraMap(F, FinitelyPresentedAlgebra.free(R), sub), q


def fiber(M: AffineModel, point: RationalPoint) -> FiberReport:
    """Fiber of the model map over a rational point, classified by an
    explicitly verified isomorphism with a canonical presentation."""
    X = M.scheme
    rep = evaluate_point(point, X)
    if not rep.valid:
        raise InvalidPoint(f"relations {[str(g) for g in rep.violated]} do not vanish at the point")
    i = X.index(point.chart)
    charts = [i] + [X.index(lab) for lab, inside in rep.overlaps.items() if inside]
    charts.sort()
    maps = [_piece_fiber_map(M, M.piece_for_chart(c), point)[0] for c in charts]
    kers = [kernel_of_map(m) for m in maps]
    I = kers[0]
    for K in kers[1:]:
        I = ideal_intersection(I, K)
    A = FinitelyPresentedAlgebra(M.algebra.ring, I)
    if len(maps) == 1:
        return _classify_affine(point, A, maps[0])
    if len(maps) == 2:
        return _classify_two(point, A, maps, kers)
    return FiberReport(point, A, OTHER, None)


def _classify_affine(point, A, m) -> FiberReport:
    target = m.target
    phi = AlgebraMap(target, A, tuple(m.lift(y) for y in target.ring.gens))
    back = AlgebraMap(A, target, m.images)
    if phi.is_well_defined() and back.is_well_defined() and is_isomorphism(phi) \
            and _identity_on_gens(back.compose(phi)) and _identity_on_gens(phi.compose(back)):
        return FiberReport(point, A, AFFINE, target.ngens, phi)
    return FiberReport(point, A, OTHER, None)


def _classify_two(point, A, maps, kers) -> FiberReport:
    m1, m2 = maps
    N1, N2 = m1.target.ngens, m2.target.ngens
    # glue point: where the two pieces meet, in each piece's coordinates
    G = kers[0] + kers[1]
    pts = []
    for m in maps:
        img = Ideal(m.target.ring, [m.raw(g) for g in G.gens])
        pt = _rational_point_of(img)
        if pt is None:
            return FiberReport(point, A, OTHER, None)
        pts.append(pt)
    # product ring k[t] x k[t'] presented with an idempotent
    F = A.field
    names = tuple(f"t{k}" for k in range(N1)) + tuple(f"t{k}_" for k in range(N2)) + ("eps",)
    P = PolynomialRing(F, names, GREVLEX)
    t1, t2, eps = P.gens[:N1], P.gens[N1:N1 + N2], P.gens[-1]
    rels = [eps * eps - eps] + [(1 - eps) * t for t in t1] + [eps * t for t in t2]
    prod = FinitelyPresentedAlgebra.presented(P, rels)
    ims = []
    for g1, g2 in zip(m1.images, m2.images):
        a = g1.compose(list(t1), P)
        b = g2.compose(list(t2), P)
        ims.append(eps * a + (1 - eps) * b)
    joint = AlgebraMap(FinitelyPresentedAlgebra.free(A.ring), prod, ims)
    if not kernel_of_map(joint).equals(A.ideal):
        return FiberReport(point, A, OTHER, None)
    # canonical k[a, b]/(a_i b_j) with a, b centred at the glue point
    C = PolynomialRing(F, tuple(f"a{k + 1}" for k in range(N1)) + tuple(f"b{k + 1}" for k in range(N2)), GREVLEX)
    ca, cb = C.gens[:N1], C.gens[N1:]
    canon = FinitelyPresentedAlgebra.presented(C, [x * y for x in ca for y in cb])
    try:
        imgs = [joint.lift(eps * (t - v)) for t, v in zip(t1, pts[0])]
        imgs += [joint.lift((1 - eps) * (t - v)) for t, v in zip(t2, pts[1])]
    except ValueError:
        return FiberReport(point, A, OTHER, None)
    phi = AlgebraMap(canon, A, imgs)
    if phi.is_well_defined() and is_isomorphism(phi):
        glue = {"first": [F.format(v) for v in pts[0]], "second": [F.format(v) for v in pts[1]]}
        return FiberReport(point, A, TWO_GLUED, N1, phi, glue)
    return FiberReport(point, A, OTHER, None)


def _rational_point_of(I: Ideal):
    """The unique rational point of ``V(I)`` when ``I`` is ``(t_k - c_k)``."""
    R = I.ring
    G = I.groebner_basis
    if len(G) != R.ngens:
        return None
    vals = [None] * R.ngens
    for g in G:
        lin = [m for m in g.terms if sum(m) == 1]
        if len(g.terms) > 2 or len(lin) != 1 or any(sum(m) > 1 for m in g.terms):
            return None
        k = lin[0].index(1)
        vals[k] = -g.constant_coefficient()
        vals[k] = R.field(vals[k])
    if any(v is None for v in vals):
        return None
    return vals


# -- pulling models back along morphisms ---------------------------------------

class ChartAssignmentMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PulledBackPart:
    """One connected block of the source: ``scheme`` charts the preimages of
    the target charts (in the target's order), ``model`` is the recipe of
    the target model run on it, ``rho: O(M_Y) -> O(model)``."""

    charts: tuple  # source chart indices in this block
    scheme: ChartedScheme
    chart_maps: tuple  # O(U_i) -> O(scheme chart i)
    model: AffineModel
    rho: AlgebraMap


@dataclass(frozen=True, eq=False)
class PulledBackModel:
    """``X ×_Y M_Y``: a product over the connected blocks of ``X``."""

    morphism: SchemeMorphism
    target_model: AffineModel
    parts: tuple
    algebra: FinitelyPresentedAlgebra
    projections: tuple  # O(algebra) -> O(part.model) per part

    to_target: AlgebraMap  # O(M_Y) -> O(algebra)


def _blocks(X: ChartedScheme) -> list:
    """Connected components of the chart overlap graph, in chart order."""
    parent = list(range(len(X)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (a, b), d in X.gluings.items():
        if not d.empty:
            parent[find(b)] = find(a)
    groups = {}
    for a in range(len(X)):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values())


def _same_open(A: FinitelyPresentedAlgebra, h1, h2) -> bool:
    """Whether ``D(h1) = D(h2)`` in ``Spec A``: each is a unit where the
    other is inverted."""
    for u, v in ((h1, h2), (h2, h1)):
        if A.is_zero(u):
            if not A.is_zero(v) and not localize(A, v, "r").algebra.is_zero_ring():
                return False
            continue
        L = localize(A, u, "r")
        if L.algebra.is_zero_ring():
            continue
        try:
            invert(L.algebra, L.map(v))
        except NotAUnit:
            return False
    return True


def _preimage_scheme(f: SchemeMorphism, block: list) -> tuple:
    """Charts ``f^{-1}(U_i)`` of one block, with maps ``O(U_i) -> O(chart)``."""
    X, Y = f.source, f.target
    m = len(Y)
    if len(block) == 1:
        a = block[0]
        s = f.assignment[a]
        V = X.charts[a].algebra
        hs, labels = [], []
        for i in range(m):
            labels.append(f"{X.labels[a]}→{Y.labels[i]}")
            if i == s:
                hs.append(V.ring.one)
            else:
                d = Y.gluing(s, i)
                hs.append(V.ring.zero if d.empty else f.maps[a](d.f_ij))
        Xp, rmaps = open_cover_of_chart(V, hs, labels)
        cmaps = []
        for i in range(m):
            tgt = Xp.charts[i].algebra
            if tgt.is_zero_ring():
                cmaps.append(AlgebraMap(Y.charts[i].algebra, tgt, [tgt.ring.zero] * Y.charts[i].algebra.ngens))
            elif i == s:
                cmaps.append(rmaps[i].compose(f.maps[a]))
            else:
                d = Y.gluing(s, i)
                ext = extend_to_localization(rmaps[i].compose(f.maps[a]), d.loc_i)
                cmaps.append(ext.compose(d.transition).compose(d.loc_j.map))
        return Xp, cmaps
    owner = {}
    for a in block:
        s = f.assignment[a]
        if s in owner:
            raise ChartAssignmentMismatch(
                f"charts {X.labels[owner[s]]} and {X.labels[a]} of one connected block map to the same chart")
        owner[s] = a
    # each chart must be the full preimage of its target chart inside the block
    for a in block:
        for b in block:
            if a == b:
                continue
            s = f.assignment[a]
            t = f.assignment[b]
            d = Y.gluing(t, s)
            pre = X.charts[b].algebra.ring.zero if d.empty else f.maps[b](d.f_ij)
            dx = X.gluing(b, a)
            own = X.charts[b].algebra.ring.zero if dx.empty else dx.f_ij
            if not _same_open(X.charts[b].algebra, pre, own):
                raise ChartAssignmentMismatch(
                    f"chart {X.labels[a]} is not the preimage of {Y.labels[s]} inside chart {X.labels[b]}")
    charts, cmaps, idx = [], [], []
    for i in range(m):
        if i in owner:
            a = owner[i]
            charts.append(X.charts[a])
            cmaps.append(f.maps[a])
            idx.append(a)
            continue
        for a in block:
            d = Y.gluing(f.assignment[a], i)
            if not d.empty and not X.charts[a].algebra.is_zero(f.maps[a](d.f_ij)):
                raise ChartAssignmentMismatch(
                    f"preimage of {Y.labels[i]} meets chart {X.labels[a]} but no chart is assigned to it")
        ch = _zero_chart(f"∅→{Y.labels[i]}", X.field)
        charts.append(ch)
        cmaps.append(AlgebraMap(Y.charts[i].algebra, ch.algebra, [ch.algebra.ring.zero] * Y.charts[i].algebra.ngens))
        idx.append(None)
    gl = {}
    for i, j in combinations(range(m), 2):
        if idx[i] is None or idx[j] is None:
            gl[(i, j)] = empty_gluing(i, j)
        else:
            d = X.gluing(idx[i], idx[j])
            gl[(i, j)] = GluingDatum(i, j, d.loc_i, d.loc_j, d.transition, d.inverse)
    return ChartedScheme(tuple(charts), gl), cmaps


def pull_back_model(f: SchemeMorphism, M: AffineModel) -> PulledBackModel:
    """``X ×_Y M_Y`` by running the recipe of ``M`` on the preimages of the
    charts of ``Y``.

    Each connected block of ``X`` (charts linked by nonempty overlaps) must
    either be a single chart, which is then covered by the preimages of the
    charts of ``Y``, or have its charts be the full preimages of distinct
    charts of ``Y``. Different blocks give the factors of a product."""
    if M.scheme is not f.target and M.scheme.labels != f.target.labels:
        raise ChartAssignmentMismatch("model was built for a different chart order")
    parts = []
    for block in _blocks(f.source):
        Xp, cmaps = _preimage_scheme(f, block)
        model, rho = transport(M, Xp, cmaps)
        parts.append(PulledBackPart(tuple(block), Xp, tuple(cmaps), model, rho))
    if len(parts) == 1:
        A = parts[0].model.algebra
        return PulledBackModel(f, M, tuple(parts), A, (AlgebraMap.identity(A),), parts[0].rho)
    return _product_of_parts(f, M, parts)


def _product_of_parts(f, M, parts) -> PulledBackModel:
    # fold from the right: A_0 × (A_1 × (... × A_k)); the idempotent of
    # each level is the unit of its left factor
    A = parts[-1].model.algebra
    projs = [AlgebraMap.identity(A)]
    imgs = list(parts[-1].rho.images)
    for part in reversed(parts[:-1]):
        L = part.model.algebra
        P, pa, pb = product_algebra(L, A)
        R = P.ring
        E = R.gen(R.ngens - 1)
        left = range(L.ngens)
        right = range(L.ngens, L.ngens + A.ngens)
        imgs = [P.reduce(E * transfer(v, R, left) + (1 - E) * transfer(w, R, right))
                for v, w in zip(part.rho.images, imgs)]
        projs = [pa] + [q.compose(pb) for q in projs]
        A = P
    return PulledBackModel(f, M, tuple(parts), A, tuple(projs), AlgebraMap(M.algebra, A, tuple(imgs)))


@dataclass(frozen=True, eq=False)
class CoverMorphism:
    """``f_M: M_X -> M_Y`` over ``f``.

    When the preimages of the charts of ``Y`` are affine, ``M_X`` is the
    one-chart model of the affine pullback ``X ×_Y M_Y`` and ``m_X`` its
    projection to ``X``. When ``Y`` has a single chart the pullback is ``X``
    itself and ``M_X`` is its model."""

    morphism: SchemeMorphism
    model_x: AffineModel
    model_y: AffineModel
    pullback: PulledBackModel | None
    f_M: AlgebraMap  # O(M_Y) -> O(M_X)

    def square_failures(self) -> list:
        if self.pullback is not None:
            return square_failures(self.pullback)
        return _chartwise_square_failures(self)


def square_failures(pb: PulledBackModel) -> list:
    """Generator-level check of ``m_Y ∘ f_M = f ∘ m_X`` on every piece.

    Over chart ``i`` of ``Y`` the function ``u`` pulled back along ``m_Y``
    then ``f_M`` must equal ``u`` pulled back along ``f`` then ``m_X``,
    modulo the ideal of the piece over the preimage of ``U_i``."""
    out = []
    MY = pb.target_model
    for k, part in enumerate(pb.parts):
        proj = pb.projections[k]
        for i, cmap in enumerate(part.chart_maps):
            if part.scheme.charts[i].algebra.is_zero_ring():
                continue
            py = MY.piece_for_chart(i)
            px = part.model.piece_for_chart(i)
            Q = px.quotient
            for name, u_y, u_x in zip(MY.scheme.charts[i].names, py.lifts, cmap.images):
                via_y = proj(pb.to_target(u_y))
                via_x = u_x.compose(list(px.lifts), Q.ring)
                if not Q.is_zero(via_y - via_x):
                    out.append(f"block {k}, chart {MY.scheme.labels[i]}: square fails on {name}")
    return out


def _chartwise_square_failures(cm: CoverMorphism) -> list:
    out = []
    f, MX = cm.morphism, cm.model_x
    for p in MX.pieces:
        Q = p.quotient
        for name, u in zip(f.target.charts[0].names, f.target.charts[0].algebra.ring.gens):
            via_y = Q.ring(cm.f_M(u))
            via_x = f.maps[p.chart](u).compose(list(p.lifts), Q.ring)
            if not Q.is_zero(via_y - via_x):
                out.append(f"chart {f.source.labels[p.chart]}: square fails on {name}")
    return out


def cover_morphism(f: SchemeMorphism, max_charts: int = DEFAULT_MAX_CHARTS) -> CoverMorphism:
    """Models of source and target with a map between them over ``f``.

    The model of ``Y`` does not depend on ``f``."""
    MY = build_model(f.target, max_charts=max_charts)
    if len(f.target) == 1:
        MX = build_model(f.source, max_charts=max_charts)
        U = f.target.charts[0].algebra
        imgs = tuple(pullback_function(MX, [m(u) for m in f.maps]) for u in U.ring.gens)
        return CoverMorphism(f, MX, MY, None, AlgebraMap(U, MX.algebra, imgs))
    pb = pull_back_model(f, MY)
    MX = identity_model(single_chart(pb.algebra, "X×M"))
    return CoverMorphism(f, MX, MY, pb, pb.to_target)


# -- the closed cover and its cohomology ---------------------------------------

@dataclass(frozen=True, eq=False)
class PieceOverlap:
    """Intersection of the last piece with the union of the earlier ones,
    ``O(M)/(K_left + K_last)``, with its isomorphism onto the apex."""

    model: AffineModel
    quotient: FinitelyPresentedAlgebra
    to_apex: AlgebraMap
    from_apex: AlgebraMap

    def failures(self) -> list:
        out = []
        for m, nm in ((self.to_apex, "map to the apex"), (self.from_apex, "map from the apex")):
            if not m.is_well_defined():
                out.append(f"{nm} is not well defined")
        if out:
            return out
        if not (_identity_on_gens(self.to_apex.compose(self.from_apex))
                and _identity_on_gens(self.from_apex.compose(self.to_apex))):
            out.append("maps between the piece overlap and the apex are not inverse")
        return out


def piece_overlap(M: AffineModel) -> PieceOverlap:
    if M.left is None:
        raise ValueError("a one-chart model has a single piece")
    res, back = M.result, M.from_trim
    kx = kernel_of_map(res.proj_x.compose(back))
    ky = kernel_of_map(res.proj_y.compose(back))
    Q = FinitelyPresentedAlgebra(M.algebra.ring, kx + ky)
    z = res.span.left.compose(res.proj_x).compose(back)  # O(M) -> O(apex)
    apex = M.apex.algebra
    to_apex = AlgebraMap(Q, apex, z.images)
    from_apex = AlgebraMap(apex, Q, tuple(Q.reduce(z.lift(g)) for g in apex.ring.gens))
    return PieceOverlap(M, Q, to_apex, from_apex)


def overlap_in_product(M: AffineModel) -> tuple:
    """For a two-chart model: ``k[C_0 vars, C_1 vars] -> O(apex)`` given by
    both charts' coordinates, and its kernel. When the map is surjective the
    apex is the closed subscheme of ``C_0 x C_1`` cut out by the kernel."""
    if M.ncharts != 2:
        raise ValueError("expected a two-chart model")
    C0, C1 = M.scheme.charts[0].algebra, M.scheme.charts[1].algebra
    taken, names = [], []
    for n in C0.names + C1.names:
        nm = n if n not in taken else fresh_name(taken, f"{n}_")
        names.append(nm)
        taken.append(nm)
    R = PolynomialRing(C0.field, tuple(names), GREVLEX)
    m = AlgebraMap(FinitelyPresentedAlgebra.free(R), M.apex.algebra,
                   tuple(M.restrict.images) + tuple(M.to_last.images))
    return m, kernel_of_map(m)


class UnknownHomotopyType(ValueError):
    pass


def _is_affine_space(A: FinitelyPresentedAlgebra) -> bool:
    B, _, _ = simplify(A)
    return not B.ideal.groebner_basis and not B.is_zero_ring()


def _is_torus(A: FinitelyPresentedAlgebra) -> bool:
    """``A ≅ k[u, v]/(uv - 1)``, tested on the trimmed presentation."""
    B, _, _ = simplify(A)
    if B.ngens != 2:
        return False
    u, v = B.ring.gens
    return B.ideal.equals(Ideal(B.ring, [u * v - 1]))


def cover_cohomology_data(M: AffineModel):
    """Cohomology data of the two-piece closed cover of a two-chart model.

    Each piece is isomorphic to its thickened chart (checked); a thickened
    affine space is contractible. The overlap is identified with the apex
    (checked) and gets the cohomology of a point when it is an affine space
    and of a circle when it is ``k[u, v]/(uv - 1)``. Restrictions are the
    identity on constants in degree 0."""
    from .homalg import CoverCohomologyData, GradedVectorSpace
    if M.ncharts != 2:
        raise ValueError("expected a two-chart model")
    hs = []
    for p in M.pieces:
        bad = check_piece(M, p)
        if bad:
            raise UnknownHomotopyType("; ".join(bad))
        if not _is_affine_space(p.thickened):
            raise UnknownHomotopyType(f"piece over {M.scheme.labels[p.chart]} is not an affine space")
        hs.append(GradedVectorSpace.of(1))
    po = piece_overlap(M)
    bad = po.failures()
    if bad:
        raise UnknownHomotopyType("; ".join(bad))
    apex = M.apex.algebra
    if _is_affine_space(apex):
        h_uv = GradedVectorSpace.of(1)
    elif _is_torus(apex):
        h_uv = GradedVectorSpace.of(1, 1)
    else:
        raise UnknownHomotopyType("overlap is neither an affine space nor a split torus")
    return CoverCohomologyData(hs[0], hs[1], h_uv, {0: [[1]]}, {0: [[1]]}, M.algebra.field)
