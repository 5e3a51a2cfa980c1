"""Batch front end: versioned JSON jobs in, canonical JSON results out.

A job document is ``{"version": 1, "command": ..., "field": "q" | "fp:<p>",
"payload": {...}}``. Results repeat the canonical job under ``"job"`` so that
``verify`` can re-run them. Exit statuses: 2 parse error, 3 validation
error, 4 mathematical rejection, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from . import model as mdl
from . import schemes as sch
from .homalg import cech as hc
from .homalg import complexes as hx
from .homalg import simplicial as hs
from .polyalg import (
    GREVLEX,
    LEX,
    AlgebraMap,
    FinitelyPresentedAlgebra,
    IllDefinedMap,
    Ideal,
    PolynomialSyntaxError,
    buchberger,
    field_from_spec,
    format_polynomial,
    ideal_intersection,
    is_groebner_basis,
    is_isomorphism,
    macaulay_membership,
    polynomial_ring,
)
from .pushout import ClosedSpan, IncompatiblePair, check_pushout_invariants, fiber_product, verify_universal_property

VERSION = 1
EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_MATH, EXIT_INTERNAL = 0, 2, 3, 4, 5

COMMANDS = ("gb", "pushout", "model build", "model fiber", "cohomology mv", "cech",
            "specseq filtered", "specseq skeletal", "verify")

ORDERS = {"grevlex": GREVLEX, "lex": LEX}

MATH_ERRORS = (sch.NotClosedEmbedding, sch.GluingError, IncompatiblePair, IllDefinedMap,
               hx.ComplexError, hx.FiltrationError, hc.IncompatibleRestrictions, hs.NotSimplicial,
               mdl.ChartAssignmentMismatch, mdl.UnknownHomotopyType)


class JobError(ValueError):
    """The document does not match the command's schema."""


class DocumentSyntaxError(ValueError):
    pass


@dataclass
class Options:
    order: str | None = None
    oracle_degree: int = 8
    max_charts: int = mdl.DEFAULT_MAX_CHARTS
    trials: int = 5


@dataclass
class Job:
    command: str
    field: object
    payload: dict
    objects: dict = field(default_factory=dict)

    def document(self) -> dict:
        return {"version": VERSION, "command": self.command, "field": self.field.spec(), "payload": self.payload}


def dumps(doc) -> str:
    """Canonical serialization: sorted keys, fixed indentation, newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- small schema helpers ------------------------------------------------------

def _need(d, key, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise JobError(f"missing field {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise JobError(f"field {key!r} has the wrong type")
    return v


def _names(v) -> list:
    if not isinstance(v, list) or not all(isinstance(n, str) for n in v):
        raise JobError("variables must be a list of names")
    return list(v)


def _poly_text(v) -> str:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise JobError(f"polynomial {v!r} must be a string")
    return str(v)


def _fmt(f) -> str:
    return format_polynomial(f)


def _scalar(F, v):
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise JobError(f"scalar {v!r} must be an integer or a string")
    try:
        return F(Fraction(str(v)))
    except (ValueError, ZeroDivisionError) as exc:
        raise PolynomialSyntaxError(f"bad scalar {v!r}") from exc


def _matrix(F, M) -> list:
    if not isinstance(M, list) or not all(isinstance(r, list) for r in M):
        raise JobError("matrix must be a list of rows")
    return [[_scalar(F, v) for v in r] for r in M]


def _fmt_matrix(F, M) -> list:
    return [[F.format(v) for v in r] for r in M]


def _int_keys(d, what) -> dict:
    if not isinstance(d, dict):
        raise JobError(f"{what} must be an object keyed by degree")
    try:
        return {int(k): v for k, v in d.items()}
    except ValueError:
        raise JobError(f"{what} keys must be integers") from None


def _graded(dims: hx.GradedVectorSpace) -> list:
    return list(dims.as_tuple())


def _bigraded(d) -> dict:
    return {f"{p},{q}": k for (p, q), k in sorted(d.items()) if k}


# -- algebras, schemes, points -------------------------------------------------

def parse_algebra(spec, F, order=GREVLEX) -> tuple:
    names = _names(_need(spec, "variables"))
    rels = _need(spec, "relations", list) if "relations" in spec else []
    R = polynomial_ring(names, F, order)
    gens = [R(_poly_text(g)) for g in rels]
    A = FinitelyPresentedAlgebra.presented(R, gens)
    return A, {"variables": names, "relations": [_fmt(g) for g in gens]}


def _algebra_doc(A) -> dict:
    return {"variables": list(A.names), "relations": [_fmt(g) for g in A.basis]}


STANDARD_SCHEMES = {
    "projective": lambda F, d: sch.projective_space(int(d.get("n", 1)), F),
    "affine-line-two-opens": lambda F, d: sch.affine_line_two_opens(F),
    "points": lambda F, d: sch.points(int(d.get("k", 1)), F),
}


def parse_scheme(spec, F) -> tuple:
    if "standard" in spec:
        kind = spec["standard"]
        if kind not in STANDARD_SCHEMES:
            raise JobError(f"unknown standard scheme {kind!r}")
        norm = {"standard": kind}
        for k in ("n", "k"):
            if k in spec:
                if not isinstance(spec[k], int) or spec[k] < 1:
                    raise JobError(f"{k!r} must be a positive integer")
                norm[k] = spec[k]
        return STANDARD_SCHEMES[kind](F, spec), norm
    charts, cnorm = [], []
    for c in _need(spec, "charts", list):
        A, an = parse_algebra(c, F)
        label = _need(c, "label", str)
        charts.append(sch.AffineChart(label, A))
        cnorm.append({"label": label, **an})
    if not charts:
        raise JobError("a scheme needs at least one chart")
    labels = [c.label for c in charts]
    g, gnorm = {}, []
    for d in spec.get("gluings", []):
        pair = _need(d, "charts", list)
        if len(pair) != 2 or not all(p in labels for p in pair):
            raise JobError(f"gluing names unknown charts {pair}")
        i, j = labels.index(pair[0]), labels.index(pair[1])
        f_ij, f_ji = (_poly_text(v) for v in _need(d, "f", list))
        inv = tuple(d.get("inverse_names", ["s", "s"]))
        images = {k: _poly_text(v) for k, v in _need(d, "images", dict).items()}
        back = {k: _poly_text(v) for k, v in _need(d, "inverse_images", dict).items()}
        gd = sch.glue(charts, i, j, f_ij, f_ji, images, back, inv)
        g[(i, j)] = gd
        gnorm.append({
            "charts": [labels[i], labels[j]],
            "f": [_fmt(gd.f_ij), _fmt(gd.f_ji)],
            "inverse_names": list(inv),
            "images": {n: _fmt(p) for n, p in zip(gd.loc_j.algebra.names, gd.transition.images)},
            "inverse_images": {n: _fmt(p) for n, p in zip(gd.loc_i.algebra.names, gd.inverse.images)},
        })
    for a in range(len(charts)):
        for b in range(a + 1, len(charts)):
            if (a, b) not in g and (b, a) not in g:
                g[(a, b)] = sch.empty_gluing(a, b)
    return sch.ChartedScheme(tuple(charts), g), {"charts": cnorm, "gluings": gnorm}


def parse_point(spec, X, F) -> tuple:
    chart = _need(spec, "chart", str)
    if chart not in X.labels:
        raise JobError(f"unknown chart {chart!r}")
    vals = [_scalar(F, v) for v in _need(spec, "values", list)]
    try:
        p = sch.RationalPoint.of(X, chart, vals)
    except ValueError as exc:
        raise JobError(str(exc)) from None
    return p, {"chart": chart, "values": [F.format(v) for v in p.values]}


# -- complexes -----------------------------------------------------------------

def parse_complex(spec, F) -> tuple:
    dims = {n: int(k) for n, k in _int_keys(_need(spec, "dims"), "dims").items()}
    if any(k < 0 for k in dims.values()):
        raise JobError("dimensions must be non-negative")
    d = {n: _matrix(F, M) for n, M in _int_keys(spec.get("differentials", {}), "differentials").items()}
    C = hx.CochainComplex(dims, d, F)
    norm = {"dims": {str(n): k for n, k in sorted(dims.items())},
            "differentials": {str(n): _fmt_matrix(F, M) for n, M in sorted(d.items())}}
    return C, norm


def parse_simplicial(spec) -> tuple:
    maximal = _need(spec, "maximal", list)
    verts = spec.get("vertices", [])
    for s in maximal:
        if not isinstance(s, list):
            raise JobError("simplices must be lists of vertices")
    X = hs.FiniteSimplicialComplex.from_maximal([tuple(s) for s in maximal], verts)
    return X, {"maximal": [list(s) for s in maximal], "vertices": list(verts)}


# -- commands ------------------------------------------------------------------

def _gb(job: Job, opts: Options) -> dict:
    order = job.payload["order"]
    R = polynomial_ring(job.payload["variables"], job.field, ORDERS[order])
    gens = [R(g) for g in job.payload["generators"]]
    job.objects["generators"] = gens
    G = buchberger(gens)
    job.objects["basis"] = G
    return {"variables": list(R.names), "order": order, "basis": [_fmt(g) for g in G]}


def _norm_gb(p, F, opts) -> dict:
    order = opts.order or p.get("order", "grevlex")
    if order not in ORDERS:
        raise JobError(f"unknown order {order!r}")
    R = polynomial_ring(_names(_need(p, "variables")), F, ORDERS[order])
    gens = [R(_poly_text(g)) for g in _need(p, "generators", list)]
    return {"variables": list(R.names), "order": order, "generators": [_fmt(g) for g in gens]}


def _check_gb(job, result, opts) -> list:
    G, gens = job.objects["basis"], job.objects["generators"]
    out = [("groebner basis criterion", is_groebner_basis(G) if G else True, "")]
    out.append(("generators reduce to zero", all(Ideal.from_basis(G[0].ring, G).contains(g) for g in gens) if G
                else not gens, ""))
    perm = buchberger(list(reversed(gens)))
    out.append(("independent of generator order", perm == G, ""))
    if gens:
        ok = all(macaulay_membership(g, gens, opts.oracle_degree) for g in G)
        out.append((f"basis in the ideal by the degree-{opts.oracle_degree} linear-algebra oracle", ok, ""))
    return out


def _norm_map(spec, target, F) -> tuple:
    A, an = parse_algebra(_need(spec, "source"), F)
    imgs = [target.ring(_poly_text(v)) for v in _need(spec, "images", list)]
    if len(imgs) != A.ngens:
        raise JobError("need one image per source variable")
    return AlgebraMap(A, target, imgs), {"source": an, "images": [_fmt(g) for g in imgs]}


def _norm_pushout(p, F, opts) -> dict:
    _, norm, _ = _span(p, F)
    return norm


def _span(p, F) -> tuple:
    Z, zn = parse_algebra(_need(p, "apex"), F)
    left, ln = _norm_map(_need(p, "left"), Z, F)
    right, rn = _norm_map(_need(p, "right"), Z, F)
    norm = {"apex": zn, "left": ln, "right": rn}
    aux = p.get("aux")
    if aux is not None:
        norm["aux"] = _names(aux)
    return ClosedSpan(Z, left, right), norm, aux


def _pushout(job: Job, opts: Options) -> dict:
    span, _, aux = _span(job.payload, job.field)
    res = fiber_product(span, aux_names=aux)
    job.objects["result"] = res
    return {
        "variables": list(res.algebra.names),
        "ideal": [_fmt(g) for g in res.algebra.basis],
        "glue_ideal": [_fmt(g) for g in res.ks],
        "proj_x": {"target": _algebra_doc(res.proj_x.target), "images": [_fmt(g) for g in res.proj_x.images]},
        "proj_y": {"target": _algebra_doc(res.proj_y.target), "images": [_fmt(g) for g in res.proj_y.images]},
    }


def _check_pushout(job, result, opts) -> list:
    res = job.objects["result"]
    bad = check_pushout_invariants(res)
    out = [("pushout invariants", not bad, "; ".join(bad))]
    rep = verify_universal_property(res, trials=opts.trials, seed=0)
    out.append((f"universal property ({opts.trials} cone trials)", rep.ok,
                "; ".join(t.note for t in rep.failures)))
    return out


def _norm_model(p, F, opts, point=False) -> dict:
    X, sn = parse_scheme(_need(p, "scheme", dict), F)
    norm = {"scheme": sn}
    if point:
        _, pn = parse_point(_need(p, "point", dict), X, F)
        norm["point"] = pn
    if "expect" in p:
        norm["expect"] = _norm_expect(p["expect"], F)
    return norm


def _norm_expect(e, F) -> dict:
    if not isinstance(e, dict):
        raise JobError("expect must be an object")
    out = dict(e)
    if "ideal" in e or "intersection" in e:
        names = _names(_need(e, "variables"))
        R = polynomial_ring(names, F)
        out["variables"] = names
        if "ideal" in e:
            out["ideal"] = [_fmt(R(_poly_text(g))) for g in _need(e, "ideal", list)]
        else:
            parts = _need(e, "intersection", list)
            if not parts or not all(isinstance(q, list) for q in parts):
                raise JobError("intersection must list generator lists")
            out["intersection"] = [[_fmt(R(_poly_text(g))) for g in q] for q in parts]
        ident = _need(e, "identification", dict)
        out["identification"] = {k: _fmt(R(_poly_text(v))) for k, v in ident.items()}
    return out


def _model(job: Job, opts: Options):
    X, _ = parse_scheme(job.payload["scheme"], job.field)
    M = mdl.build_model(X, max_charts=opts.max_charts)
    job.objects["scheme"], job.objects["model"] = X, M
    return M


def _model_build(job: Job, opts: Options) -> dict:
    M = _model(job, opts)
    pieces = []
    for p in M.pieces:
        pieces.append({
            "chart": M.scheme.labels[p.chart],
            "thickening": list(p.names),
            "ideal": [_fmt(g) for g in p.quotient.basis],
            "chart_map": [_fmt(g) for g in p.lifts],
        })
    return {
        "charts": M.scheme.labels,
        "variables": list(M.algebra.names),
        "ideal": [_fmt(g) for g in M.algebra.basis],
        "stage_dimensions": M.stage_dimensions(),
        "pieces": pieces,
    }


def _check_identification(M, expect) -> tuple:
    """Mutual Gröbner membership after substituting the identification."""
    F = M.algebra.field
    R = polynomial_ring(expect["variables"], F)
    if "ideal" in expect:
        I = Ideal(R, [R(g) for g in expect["ideal"]])
    else:
        I = None
        for q in expect["intersection"]:
            J = Ideal(R, [R(g) for g in q])
            I = J if I is None else ideal_intersection(I, J)
    ident = expect["identification"]
    if sorted(ident) != sorted(M.algebra.names):
        return False, "identification must name every model variable"
    images = [R(ident[n]) for n in M.algebra.names]
    fwd = AlgebraMap(M.algebra, FinitelyPresentedAlgebra(R, I), images)
    free = AlgebraMap(FinitelyPresentedAlgebra.free(M.algebra.ring), FinitelyPresentedAlgebra.free(R), images)
    if not is_isomorphism(free):
        return False, "identification is not a change of coordinates"
    substituted = Ideal(R, [fwd.raw(g) for g in M.algebra.ideal.gens])
    if not substituted.contains_ideal(I):
        return False, "expected ideal is not inside the substituted model ideal"
    if not I.contains_ideal(substituted):
        return False, "substituted model ideal is not inside the expected ideal"
    return True, ""


def _check_model_build(job, result, opts) -> list:
    M = job.objects["model"]
    bad = mdl.check_model(M, cover=False)
    out = [("pieces are thickened charts and the model map is the projection", not bad, "; ".join(bad))]
    if not bad:
        same = mdl.cover_ideal(M).equals(M.algebra.ideal)
        out.append(("intersection of piece ideals is the defining ideal", same, ""))
    if M.ncharts >= 2:
        fail = mdl.piece_overlap(M).failures()
        out.append(("last piece meets the others in the apex", not fail, "; ".join(fail)))
    exp = job.payload.get("expect", {})
    if "identification" in exp:
        ok, why = _check_identification(M, exp)
        out.append(("defining ideal matches the expected ideal after identification", ok, why))
    return out


def _model_fiber(job: Job, opts: Options) -> dict:
    M = _model(job, opts)
    pt, _ = parse_point(job.payload["point"], M.scheme, job.field)
    try:
        rep = mdl.fiber(M, pt)
    except mdl.InvalidPoint as exc:
        raise JobError(str(exc)) from None
    job.objects["fiber"] = rep
    out = {
        "point": {"chart": pt.chart, "values": [job.field.format(v) for v in pt.values]},
        "classification": rep.classification,
        "dimension": rep.dimension,
        "fiber_ideal": [_fmt(g) for g in rep.algebra.basis],
    }
    if rep.glue_point is not None:
        out["glue_point"] = rep.glue_point
    return out


def _check_fiber(job, result, opts) -> list:
    rep = job.objects["fiber"]
    ok = rep.iso is not None and rep.iso.is_well_defined() and is_isomorphism(rep.iso)
    out = [("classified by an explicit isomorphism", ok and rep.classification != mdl.OTHER, str(rep))]
    return out


def _norm_mv(p, F, opts) -> dict:
    if "scheme" in p:
        return _norm_model(p, F, opts)
    norm = {}
    for k in ("h_u", "h_v", "h_uv"):
        v = _need(p, k, list)
        if not all(isinstance(x, int) and x >= 0 for x in v):
            raise JobError(f"{k} must list non-negative dimensions")
        norm[k] = v
    for k in ("r_u", "r_v"):
        norm[k] = {str(n): _fmt_matrix(F, _matrix(F, M)) for n, M in sorted(_int_keys(p.get(k, {}), k).items())}
    if "expect" in p:
        norm["expect"] = p["expect"]
    return norm


def _mv_data(job: Job, opts: Options):
    p, F = job.payload, job.field
    if "scheme" in p:
        M = _model(job, opts)
        return mdl.cover_cohomology_data(M)
    g = [hx.GradedVectorSpace.of(*p[k]) for k in ("h_u", "h_v", "h_uv")]
    ru = {n: _matrix(F, M) for n, M in _int_keys(p["r_u"], "r_u").items()}
    rv = {n: _matrix(F, M) for n, M in _int_keys(p["r_v"], "r_v").items()}
    try:
        return hc.CoverCohomologyData(*g, ru, rv, F)
    except ValueError as exc:
        raise JobError(str(exc)) from None


def _mv(job: Job, opts: Options) -> dict:
    data = _mv_data(job, opts)
    split = hc.mayer_vietoris_split(data)
    job.objects["data"], job.objects["split"] = data, split
    return {"dims": _graded(split.total), "coker": _graded(split.coker), "ker": _graded(split.ker),
            "euler_characteristic": split.total.euler_characteristic}


def _check_mv(job, result, opts) -> list:
    """Dual route: realize the data by complexes with zero differential and
    take the cohomology of the two-column double complex."""
    data, split = job.objects["data"], job.objects["split"]
    F = data.field

    def flat(H):
        return hx.CochainComplex(dict(H.dims), {}, F)

    tc = hc.TwoCoverComplexes(flat(data.h_u), flat(data.h_v), flat(data.h_uv),
                              {n: M for n, M in data.r_u.items()}, {n: M for n, M in data.r_v.items()})
    direct = hx.cohomology(hc.total_complex(tc))
    return [("agrees with the two-column double complex", direct == split.total, f"{direct} vs {split.total}")]


def _cover_data(p, F) -> tuple:
    size = _need(p, "size", int)
    if size < 1:
        raise JobError("size must be positive")
    dims = {}
    for k, v in _need(p, "dims", dict).items():
        S = tuple(sorted(int(x) for x in k.split(","))) if k else ()
        if not S or any(i < 0 or i >= size for i in S):
            raise JobError(f"bad index set {k!r}")
        dims[S] = int(v)
    res, rnorm = {}, []
    for r in p.get("restrictions", []):
        S = tuple(sorted(int(x) for x in _need(r, "from", list)))
        i = _need(r, "add", int)
        M = _matrix(F, _need(r, "matrix", list))
        res[(S, i)] = M
        rnorm.append({"from": list(S), "add": i, "matrix": _fmt_matrix(F, M)})
    try:
        data = hc.CoverData(size, dims, res, F)
    except ValueError as exc:
        raise JobError(str(exc)) from None
    rnorm.sort(key=lambda r: (len(r["from"]), r["from"], r["add"]))
    norm = {"size": size, "dims": {",".join(map(str, S)): k for S, k in sorted(dims.items())},
            "restrictions": rnorm}
    return data, norm


def _norm_cech(p, F, opts) -> dict:
    return _cover_data(p, F)[1]


def _cech(job: Job, opts: Options) -> dict:
    data, _ = _cover_data(job.payload, job.field)
    bad = data.compatibility_failures()
    if bad:
        raise hc.IncompatibleRestrictions("; ".join(bad))
    full = hc.cech_cohomology(data, ordered=False)
    ordered = hc.cech_cohomology(data, ordered=True)
    job.objects["data"] = data
    return {"full": _graded(full), "ordered": _graded(ordered)}


def _check_cech(job, result, opts) -> list:
    return [("full and ordered Čech cohomology agree", result["full"] == result["ordered"], "")]


def _filtered(p, F) -> tuple:
    C, cn = parse_complex(_need(p, "complex", dict), F)
    norm = {"complex": cn}
    if "weights" in p:
        w = {n: [int(x) for x in v] for n, v in _int_keys(p["weights"], "weights").items()}
        for n in C.degrees:
            if len(w.get(n, [])) != C.dim(n):
                raise JobError(f"need one weight per basis vector in degree {n}")
        FC = hx.FilteredCochainComplex.from_weights(C, w)
        norm["weights"] = {str(n): v for n, v in sorted(w.items())}
    elif "filtration" in p:
        filt = {}
        for a, per in _int_keys(p["filtration"], "filtration").items():
            filt[a] = {n: _matrix(F, vs) for n, vs in _int_keys(per, "filtration stage").items()}
        FC = hx.FilteredCochainComplex(C, filt)
        norm["filtration"] = {str(a): {str(n): _fmt_matrix(F, vs) for n, vs in sorted(per.items())}
                              for a, per in sorted(filt.items())}
    else:
        FC = hx.FilteredCochainComplex.trivial(C)
    up = p.get("up_to_page", 0)
    if not isinstance(up, int) or up < 0:
        raise JobError("up_to_page must be a non-negative integer")
    norm["up_to_page"] = up
    return FC, norm


def _norm_filtered(p, F, opts) -> dict:
    return _filtered(p, F)[1]


def _pages(S) -> list:
    return [{"r": E.r, "dims": _bigraded(E.dims), "differential_zero": E.differential_is_zero()} for E in S.pages]


def _ss_filtered(job: Job, opts: Options) -> dict:
    FC, norm = _filtered(job.payload, job.field)
    S = hx.spectral_sequence(FC, norm["up_to_page"])
    job.objects["ss"] = S
    return {"pages": _pages(S), "e_infinity": _bigraded(S.e_infinity),
            "graded_cohomology": _bigraded(S.graded_cohomology),
            "cohomology": _graded(hx.cohomology(FC.complex)), "stable_from": S.stable_from,
            "converges": S.converges}


def _check_ss(S) -> list:
    chis = S.euler_characteristics()
    target = hx.cohomology(S.filtered.complex).euler_characteristic
    return [("E_infinity equals the associated graded of cohomology", S.converges, ""),
            ("Euler characteristic is the same on every page", all(c == target for c in chis), str(chis))]


def _check_ss_filtered(job, result, opts) -> list:
    return _check_ss(job.objects["ss"])


def _skeletal(p) -> tuple:
    X, xn = parse_simplicial(_need(p, "source", dict))
    Y, yn = parse_simplicial(_need(p, "target", dict))
    vm_raw = _need(p, "vertex_map", dict)
    by_text = {str(v): v for v in X.vertices}
    ty = {str(v): v for v in Y.vertices}
    vm = {}
    for k, v in vm_raw.items():
        if k not in by_text or str(v) not in ty:
            raise JobError(f"vertex map entry {k!r} -> {v!r} names unknown vertices")
        vm[by_text[k]] = ty[str(v)]
    f = hs.SimplicialMap(X, Y, vm)
    norm = {"source": xn, "target": yn, "vertex_map": {str(k): v for k, v in sorted(vm_raw.items())}}
    stages = None
    if "stages" in p:
        stages, sn = [], []
        for st in _need(p, "stages", list):
            S, n = parse_simplicial(st)
            stages.append(S)
            sn.append(n)
        norm["stages"] = sn
    up = p.get("up_to_page", 0)
    norm["up_to_page"] = up
    return f, stages, norm


def _norm_skeletal(p, F, opts) -> dict:
    return _skeletal(p)[2]


def _ss_skeletal(job: Job, opts: Options) -> dict:
    f, stages, norm = _skeletal(job.payload)
    K = hs.skeletal_filtration_ss(f, stages, job.field, norm["up_to_page"])
    job.objects["ss"] = K
    cell = hs.cellular_check(list(K.stages), job.field)
    return {"pages": _pages(K.sequence), "e_infinity": _bigraded(K.sequence.e_infinity),
            "limit": _graded(K.limit), "source_cohomology": _graded(K.target_cohomology),
            "converges": K.converges, "cellular_failures": cell.failing()}


def _check_ss_skeletal(job, result, opts) -> list:
    K = job.objects["ss"]
    return _check_ss(K.sequence) + [("limit equals the cohomology of the source", K.converges, "")]


@dataclass(frozen=True)
class Command:
    normalize: object
    run: object
    check: object


TABLE = {
    "gb": Command(_norm_gb, _gb, _check_gb),
    "pushout": Command(_norm_pushout, _pushout, _check_pushout),
    "model build": Command(lambda p, F, o: _norm_model(p, F, o), _model_build, _check_model_build),
    "model fiber": Command(lambda p, F, o: _norm_model(p, F, o, point=True), _model_fiber, _check_fiber),
    "cohomology mv": Command(_norm_mv, _mv, _check_mv),
    "cech": Command(_norm_cech, _cech, _check_cech),
    "specseq filtered": Command(_norm_filtered, _ss_filtered, _check_ss_filtered),
    "specseq skeletal": Command(_norm_skeletal, _ss_skeletal, _check_ss_skeletal),
}


# -- documents -----------------------------------------------------------------

def parse_job(doc, command: str | None = None, field_spec: str | None = None, opts: Options | None = None) -> Job:
    """Validate ``doc`` and return the job with a canonical payload."""
    opts = opts or Options()
    if not isinstance(doc, dict):
        raise JobError("a job document must be a JSON object")
    if doc.get("version") != VERSION:
        raise JobError(f"unsupported document version {doc.get('version')!r}")
    cmd = doc.get("command", command)
    if command is not None and cmd != command:
        raise JobError(f"document is a {cmd!r} job, not {command!r}")
    if cmd not in TABLE:
        raise JobError(f"unknown command {cmd!r}")
    spec = field_spec or doc.get("field", "q")
    try:
        F = field_from_spec(spec)
    except ValueError as exc:
        raise JobError(str(exc)) from None
    payload = _need(doc, "payload", dict)
    norm = TABLE[cmd].normalize(payload, F, opts)
    return Job(cmd, F, norm)


def run_job(job: Job, opts: Options | None = None) -> dict:
    opts = opts or Options()
    result = TABLE[job.command].run(job, opts)
    return {"version": VERSION, "command": job.command, "field": job.field.spec(), "job": job.document(),
            "result": result}


def _expect_checks(job: Job, result: dict) -> list:
    out = []
    for k, v in job.payload.get("expect", {}).items():
        if k in ("ideal", "intersection", "variables", "identification"):
            continue
        out.append((f"expected {k}", result.get(k) == v, f"{result.get(k)!r} vs {v!r}"))
    return out


def verify_document(doc, opts: Options | None = None, field_spec: str | None = None) -> dict:
    """Re-run a job or a stored result and every invariant of its command."""
    opts = opts or Options()
    if isinstance(doc, dict) and doc.get("command") == "verify":
        doc = _need(doc, "payload", dict).get("document", doc.get("payload"))
    stored = None
    if isinstance(doc, dict) and "result" in doc:
        stored = doc["result"]
        doc = _need(doc, "job", dict)
    job = parse_job(doc, None, field_spec, opts)
    out = run_job(job, opts)
    checks = []
    if stored is not None:
        checks.append(("stored result is reproduced", stored == out["result"], ""))
    checks += TABLE[job.command].check(job, out["result"], opts)
    checks += _expect_checks(job, out["result"])
    rows = [{"name": n, "ok": bool(ok), "detail": d} for n, ok, d in checks]
    return {"version": VERSION, "command": "verify", "field": job.field.spec(), "verified": job.command,
            "job": job.document(), "ok": all(r["ok"] for r in rows), "checks": rows}


def shipped_jobs() -> dict:
    """Example documents bundled with the package, by file name."""
    out = {}
    for entry in sorted(resources.files("affmodel.jobs").iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out[entry.name] = json.loads(entry.read_text(encoding="utf-8"))
    return out


# -- text rendering ------------------------------------------------------------

def render_text(doc) -> str:
    lines = [f"{doc['command']} over {doc['field']}"]
    if doc["command"] == "verify":
        lines[0] = f"verify {doc['verified']} over {doc['field']}: {'ok' if doc['ok'] else 'FAILED'}"
        for r in doc["checks"]:
            lines.append(f"  [{'ok' if r['ok'] else 'FAIL'}] {r['name']}" + (f" ({r['detail']})" if r["detail"] and not r["ok"] else ""))
        return "\n".join(lines) + "\n"
    for k, v in sorted(doc["result"].items()):
        if isinstance(v, list) and v and all(isinstance(x, str) for x in v):
            lines.append(f"{k}:")
            lines.extend(f"  {x}" for x in v)
        else:
            lines.append(f"{k}: {json.dumps(v, sort_keys=True, ensure_ascii=False)}")
    return "\n".join(lines) + "\n"


# -- entry point ---------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="affmodel", description="Affine models of charted schemes and exact homological algebra.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", default="-", help="job document (default: stdin)")
    common.add_argument("--field", help="q or fp:<p>; overrides the document")
    common.add_argument("--order", choices=sorted(ORDERS), help="monomial order for gb")
    common.add_argument("--oracle-degree", type=int, default=8, help="degree bound of the membership oracle")
    common.add_argument("--max-charts", type=int, default=mdl.DEFAULT_MAX_CHARTS)
    common.add_argument("--trials", type=int, default=5, help="cone trials for pushout verification")
    common.add_argument("--out", help="write the result here (atomically) instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    sub = ap.add_subparsers(dest="group", required=True)
    for name in ("gb", "pushout", "cech", "verify"):
        sub.add_parser(name, parents=[common])
    for group, subs in (("model", ("build", "fiber")), ("cohomology", ("mv",)), ("specseq", ("filtered", "skeletal"))):
        g = sub.add_parser(group)
        gs = g.add_subparsers(dest="action", required=True)
        for s in subs:
            gs.add_parser(s, parents=[common])
    return ap


def _read(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise DocumentSyntaxError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(f"invalid JSON: {exc}") from None


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".affmodel-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    command = args.group if getattr(args, "action", None) is None else f"{args.group} {args.action}"
    opts = Options(args.order, args.oracle_degree, args.max_charts, args.trials)
    try:
        doc = _read(args.input)
        if command == "verify":
            out = verify_document(doc, opts, args.field)
        else:
            out = run_job(parse_job(doc, command, args.field, opts), opts)
    except (DocumentSyntaxError, PolynomialSyntaxError) as exc:
        print(f"affmodel: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MATH_ERRORS as exc:
        print(f"affmodel: rejected: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (JobError, mdl.InvalidPoint, mdl.ChartLimitExceeded, ValueError, KeyError, TypeError) as exc:
        print(f"affmodel: invalid job: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - every other failure is an internal defect
        print(f"affmodel: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = dumps(out) if args.format == "json" else render_text(out)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if command == "verify" and not out["ok"]:
        print("affmodel: verification failed", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
