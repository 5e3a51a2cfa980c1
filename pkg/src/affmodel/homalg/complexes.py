"""Cochain complexes, graded vector spaces and filtration spectral sequences.

Cochains are coordinate vectors; ``d[n]`` is the matrix of ``C^n -> C^{n+1}``
with ``dims[n+1]`` rows and ``dims[n]`` columns. Filtrations are decreasing:
``F^p C ⊇ F^{p+1} C``, with ``F^{p_min} = C`` and ``F^{p_max + 1} = 0``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from ..polyalg.field import QQ
from . import linalg as la


class ComplexError(ValueError):
    """Raised when ``d ∘ d != 0`` or shapes do not match."""


class FiltrationError(ValueError):
    pass


@dataclass(frozen=True)
class GradedVectorSpace:
    dims: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(n): int(k) for n, k in dict(self.dims).items() if k}
        if any(k < 0 for k in clean.values()):
            raise ValueError("negative dimension")
        object.__setattr__(self, "dims", dict(sorted(clean.items())))

    @classmethod
    def of(cls, *dims, start: int = 0) -> GradedVectorSpace:
        return cls({start + i: k for i, k in enumerate(dims)})

    def __getitem__(self, n) -> int:
        return self.dims.get(n, 0)

    def __eq__(self, other):
        if isinstance(other, (tuple, list)):
            other = GradedVectorSpace.of(*other)
        return isinstance(other, GradedVectorSpace) and self.dims == other.dims

    def __hash__(self):
        return hash(tuple(self.dims.items()))

    def __add__(self, other: GradedVectorSpace) -> GradedVectorSpace:
        keys = set(self.dims) | set(other.dims)
        return GradedVectorSpace({n: self[n] + other[n] for n in keys})

    def shift(self, k: int) -> GradedVectorSpace:
        """``V[k]^n = V^{n+k}``."""
        return GradedVectorSpace({n - k: v for n, v in self.dims.items()})

    def as_tuple(self, lo: int = 0, hi: int | None = None) -> tuple:
        if hi is None:
            hi = max(self.dims, default=lo - 1)
        return tuple(self[n] for n in range(lo, hi + 1))

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** n * k for n, k in self.dims.items())

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def __repr__(self):
        return f"GradedVectorSpace({self.dims})"


@dataclass(frozen=True, eq=False)
class CochainComplex:
    dims: Mapping
    d: Mapping
    field: object = QQ

    def __post_init__(self):
        dims = {int(n): int(k) for n, k in dict(self.dims).items() if k}
        object.__setattr__(self, "dims", dict(sorted(dims.items())))
        d = {}
        for n, M in dict(self.d).items():
            rows, cols = self.dim(n + 1), self.dim(n)
            M = [list(r) for r in M]
            if rows and cols and (len(M) != rows or any(len(r) != cols for r in M)):
                raise ComplexError(f"d^{n} has shape {len(M)}x{len(M[0]) if M else 0}, expected {rows}x{cols}")
            if rows and cols:
                d[int(n)] = [[self.field(v) for v in r] for r in M]
        object.__setattr__(self, "d", d)
        for n in d:
            if n + 1 in d:
                if not la.is_zero_matrix(la.matmul(d[n + 1], d[n], self.field)):
                    raise ComplexError(f"d^{n + 1} ∘ d^{n} != 0")

    def dim(self, n) -> int:
        return self.dims.get(n, 0)

    def differential(self, n) -> list:
        """``d^n`` as a full matrix (zeros when absent)."""
        if n in self.d:
            return self.d[n]
        return la.zeros(self.dim(n + 1), self.dim(n), self.field)

    @property
    def degrees(self) -> range:
        if not self.dims:
            return range(0)
        return range(min(self.dims), max(self.dims) + 1)

    def apply(self, n, v) -> list:
        if self.dim(n + 1) == 0:
            return []
        return la.apply(self.differential(n), v, self.field)

    def rank(self, n) -> int:
        return la.rank(self.d[n], self.field) if n in self.d else 0

    def cocycles(self, n) -> list:
        if self.dim(n) == 0:
            return []
        if n not in self.d:
            return la.nullspace([], self.dim(n), self.field)
        return la.nullspace(self.d[n], self.dim(n), self.field)

    def coboundaries(self, n) -> list:
        if n - 1 not in self.d:
            return []
        return la.column_space(self.d[n - 1], self.dim(n), self.field)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** n * k for n, k in self.dims.items())


def cohomology(C: CochainComplex) -> GradedVectorSpace:
    """``dim H^n = dim ker d^n - rank d^{n-1}``."""
    return GradedVectorSpace({n: C.dim(n) - C.rank(n) - C.rank(n - 1) for n in C.degrees})


def cohomology_basis(C: CochainComplex, n) -> list:
    """Cocycles whose classes form a basis of ``H^n``."""
    B = C.coboundaries(n)
    out = list(B)
    reps = []
    for z in C.cocycles(n):
        if not la.in_span(z, out, C.field):
            out.append(z)
            reps.append(z)
    return reps


def zero_complex(field=QQ) -> CochainComplex:
    return CochainComplex({}, {}, field)


def interval_complex(field=QQ) -> CochainComplex:
    """``0 -> k -> k -> 0`` with the identity in degrees 0, 1."""
    return CochainComplex({0: 1, 1: 1}, {0: [[1]]}, field)


# -- filtered complexes --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FilteredCochainComplex:
    """``filtration[p][n]``: basis of ``F^p C^n`` for ``p_min <= p <= p_max``."""

    complex: CochainComplex
    filtration: Mapping
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        C = self.complex
        F = C.field
        filt = {}
        for p, byn in dict(self.filtration).items():
            filt[int(p)] = {int(n): la.span_basis([[F(x) for x in v] for v in vs], C.dim(n), F)
                            for n, vs in dict(byn).items()}
        if not filt:
            raise FiltrationError("empty filtration")
        object.__setattr__(self, "filtration", dict(sorted(filt.items())))
        lo, hi = self.p_min, self.p_max
        if set(filt) != set(range(lo, hi + 1)):
            raise FiltrationError("filtration indices must be consecutive")
        if not self.check:
            return
        for n in C.degrees:
            if len(self.sub(lo, n)) != C.dim(n):
                raise FiltrationError(f"F^{lo} C^{n} is not all of C^{n}")
            for p in range(lo, hi):
                big = self.sub(p, n)
                for v in self.sub(p + 1, n):
                    if not la.in_span(v, big, F):
                        raise FiltrationError(f"F^{p + 1} C^{n} is not inside F^{p} C^{n}")
            for p in range(lo, hi + 1):
                tgt = self.sub(p, n + 1)
                for v in self.sub(p, n):
                    w = C.apply(n, v)
                    if any(w) and not la.in_span(w, tgt, F):
                        raise FiltrationError(f"d does not preserve F^{p} in degree {n}")

    @property
    def p_min(self) -> int:
        return min(self.filtration)

    @property
    def p_max(self) -> int:
        return max(self.filtration)

    @property
    def field(self):
        return self.complex.field

    def sub(self, p, n) -> list:
        """Basis of ``F^p C^n`` (all of ``C^n`` below the range, 0 above)."""
        C = self.complex
        if p < self.p_min:
            return la.nullspace([], C.dim(n), C.field)
        if p > self.p_max:
            return []
        return self.filtration[p].get(n, [])

    @classmethod
    def from_weights(cls, C: CochainComplex, weights: Mapping) -> FilteredCochainComplex:
        """Filtration by an adapted basis: ``F^p`` is spanned by the basis
        vectors of weight ``>= p``; ``weights[n][i]`` is the weight of the
        i-th basis vector of ``C^n``."""
        ws = [w for n in weights for w in weights[n]]
        lo, hi = (min(ws), max(ws)) if ws else (0, 0)
        F = C.field
        filt = {}
        for p in range(lo, hi + 1):
            filt[p] = {}
            for n in C.degrees:
                vs = []
                for i, w in enumerate(weights.get(n, ())):
                    if w >= p:
                        v = [F.zero] * C.dim(n)
                        v[i] = F.one
                        vs.append(v)
                filt[p][n] = vs
        for n, D in C.d.items():
            wn, wm = weights.get(n, ()), weights.get(n + 1, ())
            for a, row in enumerate(D):
                for b, v in enumerate(row):
                    if v and wm[a] < wn[b]:
                        raise FiltrationError(f"d lowers the weight in degree {n}")
        return cls(C, filt, check=False)

    @classmethod
    def trivial(cls, C: CochainComplex) -> FilteredCochainComplex:
        return cls.from_weights(C, {n: [0] * C.dim(n) for n in C.degrees})


@dataclass(frozen=True, eq=False)
class SpectralSequencePage:
    """``E_r``: dimensions by ``(p, q)`` and ``d_r: E_r^{p,q} -> E_r^{p+r,q-r+1}``
    as matrices in the chosen bases."""

    r: int
    dims: Mapping
    differentials: Mapping

    def __getitem__(self, pq) -> int:
        return self.dims.get(tuple(pq), 0)

    def nonzero(self) -> dict:
        return {k: v for k, v in self.dims.items() if v}

    def total(self) -> GradedVectorSpace:
        """Dimensions summed along total degree ``p + q``."""
        out = {}
        for (p, q), k in self.dims.items():
            out[p + q] = out.get(p + q, 0) + k
        return GradedVectorSpace(out)

    @property
    def euler_characteristic(self) -> int:
        return self.total().euler_characteristic

    def differential_is_zero(self) -> bool:
        return all(la.is_zero_matrix(M) for M in self.differentials.values())


@dataclass(frozen=True, eq=False)
class SpectralSequence:
    filtered: FilteredCochainComplex
    pages: tuple
    e_infinity: Mapping  # (p, q) -> dim, read off the stable page
    graded_cohomology: Mapping  # (p, q) -> dim of F^p H^{p+q} / F^{p+1} H^{p+q}
    stable_from: int

    @property
    def converges(self) -> bool:
        keys = set(self.e_infinity) | set(self.graded_cohomology)
        return all(self.e_infinity.get(k, 0) == self.graded_cohomology.get(k, 0) for k in keys)

    def page(self, r) -> SpectralSequencePage:
        for P in self.pages:
            if P.r == r:
                return P
        if r >= self.pages[-1].r:
            last = self.pages[-1]
            return SpectralSequencePage(r, last.dims, {})
        raise KeyError(r)

    def euler_characteristics(self) -> list:
        return [P.euler_characteristic for P in self.pages]


def _sum_basis(U, V, dim, F) -> list:
    return la.span_basis(list(U) + list(V), dim, F)


class _Filtered:
    """Cached subspaces ``Z_r^p`` and ``d Z_{r-1}^{p-r+1}`` per degree."""

    def __init__(self, FC: FilteredCochainComplex):
        self.FC = FC
        self.C = FC.complex
        self.F = FC.field
        self._z = {}

    def Z(self, r, p, n) -> list:
        """``{x in F^p C^n : dx in F^{p+r} C^{n+1}}``."""
        key = (r, p, n)
        if key not in self._z:
            C, F = self.C, self.F
            src = self.FC.sub(p, n)
            if not src:
                self._z[key] = []
            elif C.dim(n + 1) == 0:
                self._z[key] = src
            else:
                D = la.transpose([C.apply(n, v) for v in src], C.dim(n + 1))
                tgt = self.FC.sub(p + r, n + 1)
                # coefficient vectors c with D c in span(tgt)
                coeffs = la.preimage(D, tgt, len(src), F)
                self._z[key] = la.span_basis([_combine(c, src, C.dim(n), F) for c in coeffs], C.dim(n), F)
        return self._z[key]

    def B(self, r, p, n) -> list:
        """``d Z_{r-1}^{p-r+1}`` inside ``C^n``."""
        C = self.C
        Zs = self.Z(r - 1, p - r + 1, n - 1)
        return la.span_basis([C.apply(n - 1, v) for v in Zs], C.dim(n), self.F)

    def denominator(self, r, p, n) -> list:
        return _sum_basis(self.Z(r - 1, p + 1, n), self.B(r, p, n), self.C.dim(n), self.F)


def _combine(c, vectors, dim, F) -> list:
    out = [F.zero] * dim
    for a, v in zip(c, vectors):
        if a:
            out = la.add(out, la.scale(a, v, F), F)
    return out


def _complement(sub, whole, F) -> list:
    """Vectors of ``whole`` extending a basis of ``sub`` to one of ``span(whole)``."""
    whole = list(whole)
    if not whole:
        return []
    # pivot columns of [sub | whole] are exactly the greedy choice
    cols = list(sub) + whole
    _, piv = la.rref(la.transpose(cols), F)
    k = len(sub)
    return [whole[c - k] for c in piv if c >= k]


def spectral_sequence(FC: FilteredCochainComplex, up_to_page: int = 0, start: int = 0) -> SpectralSequence:
    """Pages ``E_r`` for ``r >= start`` from the subspaces

        Z_r^p = F^p ∩ d^{-1}(F^{p+r}),   E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}).

    Pages are computed at least up to ``up_to_page`` and until they are
    stable (``r`` beyond the filtration length), each checked against the
    homology of the previous one."""
    W = _Filtered(FC)
    C, F = FC.complex, FC.field
    lo, hi = FC.p_min, FC.p_max
    degrees = list(C.degrees)
    stable = hi - lo + 1
    last_r = max(up_to_page, stable + 1, start)
    pages = []
    prev = None
    for r in range(start, last_r + 1):
        reps, dens, dims = {}, {}, {}
        for n in degrees:
            for p in range(lo, hi + 1):
                Z = W.Z(r, p, n)
                den = W.denominator(r, p, n)
                rep = _complement(den, Z, F)
                reps[(p, n)] = rep
                dens[(p, n)] = den
                dims[(p, n - p)] = len(rep)
        diffs = {}
        for (p, n), rep in reps.items():
            if not rep:
                continue
            tgt = (p + r, n + 1)
            trep = reps.get(tgt, [])
            if not trep:
                continue
            basis = dens[tgt] + trep
            cols = []
            for v in rep:
                c = la.coordinates(C.apply(n, v), basis, F)
                if c is None:
                    raise FiltrationError(f"d_{r} is not defined on E_{r}^{p},{n - p}")
                cols.append(c[len(dens[tgt]):])
            diffs[((p, n - p), (p + r, n + 1 - p - r))] = la.transpose(cols, len(trep))
        page = SpectralSequencePage(r, dims, diffs)
        _check_page(page, F)
        if prev is not None:
            _check_homology(prev, page, F)
        pages.append(page)
        prev = page
    e_inf = dict(pages[-1].dims)
    gr = graded_cohomology(FC)
    return SpectralSequence(FC, tuple(pages), e_inf, gr, stable)


def _check_page(page: SpectralSequencePage, F) -> None:
    for (a, b), M in page.differentials.items():
        nxt = page.differentials.get((b, (2 * b[0] - a[0], 2 * b[1] - a[1])))
        if nxt is not None and not la.is_zero_matrix(la.matmul(nxt, M, F)):
            raise ComplexError(f"d_{page.r} ∘ d_{page.r} != 0 at {a}")


def _check_homology(prev: SpectralSequencePage, page: SpectralSequencePage, F) -> None:
    out_rank, in_rank = {}, {}
    for (a, b), M in prev.differentials.items():
        k = la.rank(M, F)
        out_rank[a] = k
        in_rank[b] = k
    for pq in set(prev.dims) | set(page.dims):
        expect = prev[pq] - out_rank.get(pq, 0) - in_rank.get(pq, 0)
        if expect != page[pq]:
            raise ComplexError(f"E_{page.r}{pq} has dimension {page[pq]}, homology of E_{prev.r} gives {expect}")


def graded_cohomology(FC: FilteredCochainComplex) -> dict:
    """``dim F^p H^n / F^{p+1} H^n`` keyed by ``(p, n - p)``, from the
    cohomology of the complex and the induced filtration."""
    C, F = FC.complex, FC.field
    out = {}
    for n in C.degrees:
        Bn = C.coboundaries(n)
        Zn = C.cocycles(n)

        def level(p):
            sub = la.intersect_spans(FC.sub(p, n), Zn, C.dim(n), F) if FC.sub(p, n) and Zn else []
            return la.span_dim(list(sub) + list(Bn), F) - len(Bn) if (sub or Bn) else 0

        for p in range(FC.p_min, FC.p_max + 1):
            out[(p, n - p)] = level(p) - level(p + 1)
    return out


# -- random data ---------------------------------------------------------------

def random_complex(rng: random.Random, dims, field=QQ, start: int = 0, scale: int = 2,
                   weights=None) -> CochainComplex:
    """A random complex with ``d ∘ d = 0``. With ``weights`` the differentials
    also preserve the weight filtration (entries only from lower to higher
    or equal weight)."""
    dims = list(dims)
    d = {}
    prev = None
    for i in range(len(dims) - 1):
        m, k = dims[i + 1], dims[i]
        n = start + i
        if not m or not k:
            prev = None
            continue
        allowed = [(a, b) for a in range(m) for b in range(k)
                   if weights is None or weights[n + 1][a] >= weights[n][b]]
        # D with D * prev = 0 and support in ``allowed``: solve for the entries
        if prev is None:
            sols = [[field.one if j == t else field.zero for j in range(len(allowed))] for t in range(len(allowed))]
        else:
            rows = []
            for a in range(m):
                for c in range(len(prev[0])):
                    row = [field.zero] * len(allowed)
                    for t, (aa, b) in enumerate(allowed):
                        if aa == a:
                            row[t] = prev[b][c]
                    rows.append(row)
            sols = la.nullspace(rows, len(allowed), field)
        D = la.zeros(m, k, field)
        for s in sols:
            c = field(rng.randint(-scale, scale))
            if c:
                for t, (a, b) in enumerate(allowed):
                    if s[t]:
                        D[a][b] = (D[a][b] + c * s[t]) % field.p if field.p else D[a][b] + c * s[t]
        d[n] = D
        prev = D
    return CochainComplex({start + i: k for i, k in enumerate(dims)}, d, field)


def random_filtered_complex(rng: random.Random, total_dim: int = 6, steps: int = 4, field=QQ,
                            change_basis: bool = True) -> FilteredCochainComplex:
    """Random complex of total dimension ``<= total_dim`` with a filtration of
    ``<= steps`` steps; a random change of basis hides the adapted basis."""
    ndeg = rng.randint(1, 4)
    dims = [0] * ndeg
    for _ in range(rng.randint(1, total_dim)):
        dims[rng.randrange(ndeg)] += 1
    nsteps = rng.randint(1, steps)
    weights = {n: [rng.randrange(nsteps) for _ in range(k)] for n, k in enumerate(dims)}
    C = random_complex(rng, dims, field, weights=weights)
    FC = FilteredCochainComplex.from_weights(C, weights)
    if not change_basis:
        return FC
    g = {n: la.random_invertible(rng, k, field) for n, k in enumerate(dims) if k}
    ginv = {n: la.inverse(M, field) for n, M in g.items()}
    d = {n: la.matmul(la.matmul(g[n + 1], M, field), ginv[n], field) for n, M in C.d.items()}
    C2 = CochainComplex(C.dims, d, field)
    filt = {p: {n: [la.apply(g[n], v, field) for v in vs] for n, vs in byn.items() if n in g}
            for p, byn in FC.filtration.items()}
    return FilteredCochainComplex(C2, filt)
