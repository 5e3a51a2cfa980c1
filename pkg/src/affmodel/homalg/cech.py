"""Čech complexes of finite cover data and Mayer–Vietoris for two-element covers.

Cover data assigns a vector space ``F(S)`` to every nonempty set ``S`` of
cover indices (the value on ``U_S = ∩_{i∈S} U_i``) and a restriction matrix
``F(S) -> F(S ∪ {i})`` to every one-step enlargement. Longer restrictions
are composites; their independence of the path is what makes ``d ∘ d = 0``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Mapping

from ..polyalg.field import QQ
from . import linalg as la
from .complexes import (
    CochainComplex,
    ComplexError,
    FilteredCochainComplex,
    GradedVectorSpace,
    cohomology,
    random_complex,
    spectral_sequence,
)


class IncompatibleRestrictions(ComplexError):
    pass


def _key(S) -> tuple:
    return tuple(sorted(set(S)))


@dataclass(frozen=True, eq=False)
class CoverData:
    """``dims[S]`` for nonempty index sets ``S`` (missing means 0) and
    ``restrictions[(S, i)]``: matrix ``F(S) -> F(S ∪ {i})`` for ``i ∉ S``."""

    size: int
    dims: Mapping
    restrictions: Mapping
    field: object = QQ

    def __post_init__(self):
        dims = {_key(S): int(k) for S, k in dict(self.dims).items() if k}
        object.__setattr__(self, "dims", dims)
        res = {}
        for (S, i), M in dict(self.restrictions).items():
            S = _key(S)
            T = _key(S + (i,))
            rows, cols = self.dim(T), self.dim(S)
            if rows and cols:
                if len(M) != rows or any(len(r) != cols for r in M):
                    raise ValueError(f"restriction {S} -> {T} has the wrong shape")
                res[(S, i)] = [[self.field(v) for v in r] for r in M]
        object.__setattr__(self, "restrictions", res)

    def dim(self, S) -> int:
        return self.dims.get(_key(S), 0)

    def restriction(self, S, T) -> list:
        """Composite ``F(S) -> F(T)`` along increasing indices of ``T \\ S``."""
        S, T = _key(S), _key(T)
        F = self.field
        M = la.identity(self.dim(S), F)
        cur = S
        for i in T:
            if i in cur:
                continue
            nxt = _key(cur + (i,))
            step = self.restrictions.get((cur, i))
            if step is None:
                step = la.zeros(self.dim(nxt), self.dim(cur), F)
            M = la.matmul(step, M, F, inner=self.dim(cur), ncols=self.dim(S))
            cur = nxt
        return M

    def compatibility_failures(self) -> list:
        """Squares ``S ⊂ S+i, S+j ⊂ S+i+j`` that do not commute."""
        out = []
        F = self.field
        for S in [()] + [c for k in range(1, self.size + 1) for c in combinations(range(self.size), k)]:
            rest = [i for i in range(self.size) if i not in S]
            for i, j in combinations(rest, 2):
                if not S:
                    continue
                a = self._step(_key(S + (i,)), j, self._step(S, i, la.identity(self.dim(S), F)))
                b = self._step(_key(S + (j,)), i, self._step(S, j, la.identity(self.dim(S), F)))
                if a != b:
                    out.append((S, i, j))
        return out

    def _step(self, S, i, M):
        F = self.field
        step = self.restrictions.get((_key(S), i))
        T = _key(S + (i,))
        if step is None:
            step = la.zeros(self.dim(T), self.dim(S), F)
        return la.matmul(step, M, F, inner=self.dim(S), ncols=len(M[0]) if M else 0)


def _cochain_complex(data: CoverData, tuples_by_degree, top: int) -> CochainComplex:
    F = data.field
    index, dims = {}, {}
    for n in range(top + 1):
        off = 0
        index[n] = {}
        for s in tuples_by_degree(n):
            k = data.dim(s)
            if k:
                index[n][s] = off
                off += k
        dims[n] = off
    d = {}
    for n in range(top):
        M = la.zeros(dims[n + 1], dims[n], F)
        for s, row0 in index[n + 1].items():
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                if face not in index[n]:
                    continue
                col0 = index[n][face]
                R = data.restriction(face, s)
                sign = 1 if j % 2 == 0 else -1
                for a, r in enumerate(R):
                    for b, v in enumerate(r):
                        if v:
                            M[row0 + a][col0 + b] = M[row0 + a][col0 + b] + sign * v
        if F.p:
            M = [[v % F.p for v in r] for r in M]
        d[n] = M
    try:
        return CochainComplex(dims, d, F)
    except ComplexError as exc:
        raise IncompatibleRestrictions(f"restriction maps are incompatible: {exc}") from None


def cech_complex(data: CoverData, top: int | None = None) -> CochainComplex:
    """Full Čech complex on all index tuples, truncated after degree ``top``
    (default: the cover size, so cohomology below it is exact)."""
    top = data.size if top is None else top
    return _cochain_complex(data, lambda n: list(product(range(data.size), repeat=n + 1)), top)


def ordered_cech_complex(data: CoverData) -> CochainComplex:
    """Čech complex on strictly increasing index tuples."""
    return _cochain_complex(data, lambda n: list(combinations(range(data.size), n + 1)), data.size - 1)


def cech_cohomology(data: CoverData, ordered: bool = True, top: int | None = None) -> GradedVectorSpace:
    if ordered:
        return cohomology(ordered_cech_complex(data))
    top = data.size if top is None else top
    H = cohomology(cech_complex(data, top))
    return GradedVectorSpace({n: k for n, k in H.dims.items() if n < top})


def one_element_cover(dim: int, field=QQ) -> CoverData:
    return CoverData(1, {(0,): dim}, {}, field)


def two_element_cover(d0: int, d1: int, d01: int, r0, r1, field=QQ) -> CoverData:
    return CoverData(2, {(0,): d0, (1,): d1, (0, 1): d01}, {((0,), 1): r0, ((1,), 0): r1}, field)


def _random_quotient_data(rng: random.Random, size: int, ambient: int, field) -> CoverData:
    """``F(S) = V / Σ_{i∈S} K_i`` for random subspaces ``K_i`` of ``V``, in
    a random basis; some intersections are made empty."""
    V = ambient
    K = {}
    for i in range(size):
        k = rng.randint(0, V - 1)
        K[i] = [[field(rng.randint(-2, 2)) for _ in range(V)] for _ in range(k)]
    kill = set()
    for S in (c for k in range(2, size + 1) for c in combinations(range(size), k)):
        if rng.random() < 0.35:
            kill.add(S)
    subsets = [c for k in range(1, size + 1) for c in combinations(range(size), k)]
    quo = {}
    for S in subsets:
        if any(set(T) <= set(S) for T in kill):
            quo[S] = None
            continue
        vecs = [v for i in S for v in K[i]]
        R, piv = la.rref(vecs, field) if vecs and any(any(v) for v in vecs) else ([], [])
        rows = [r for r in R[: len(piv)]]
        free = [c for c in range(V) if c not in piv]
        quo[S] = (rows, piv, free)
    bases = {S: la.random_invertible(rng, len(q[2]), field) for S, q in quo.items() if q and q[2]}
    dims = {S: len(q[2]) for S, q in quo.items() if q}
    res = {}
    for S in subsets:
        for i in range(size):
            if i in S:
                continue
            T = _key(S + (i,))
            if not quo[S] or not quo[T] or not quo[S][2] or not quo[T][2]:
                continue
            _, _, freeS = quo[S]
            rowsT, pivT, freeT = quo[T]
            M = []
            for c in freeS:
                v = [field.zero] * V
                v[c] = field.one
                for r, pc in zip(rowsT, pivT):
                    if v[pc]:
                        f = v[pc]
                        v = [((a - f * b) % field.p) if field.p else a - f * b for a, b in zip(v, r)]
                M.append([v[c2] for c2 in freeT])
            M = la.transpose(M, len(freeT))
            # change of basis: coordinates x on F(S) mean bases[S] x
            M = la.matmul(la.matmul(la.inverse(bases[T], field), M, field), bases[S], field)
            res[(S, i)] = M
    return CoverData(size, dims, res, field)


def constant_cover_data(size: int, alive, dim: int = 1, field=QQ) -> CoverData:
    """Constant coefficients ``k^dim`` on the nerve whose simplices are the
    index sets in ``alive`` (closed under subsets)."""
    alive = {_key(S) for S in alive}
    dims = {S: dim for S in alive}
    res = {}
    for S in alive:
        for i in range(size):
            if i not in S and _key(S + (i,)) in alive:
                res[(S, i)] = la.identity(dim, field)
    return CoverData(size, dims, res, field)


def direct_sum(A: CoverData, B: CoverData) -> CoverData:
    F = A.field
    keys = set(A.dims) | set(B.dims)
    dims = {S: A.dim(S) + B.dim(S) for S in keys}
    res = {}
    for S in keys:
        for i in range(A.size):
            if i in S:
                continue
            T = _key(S + (i,))
            ra = A.restrictions.get((S, i)) or la.zeros(A.dim(T), A.dim(S), F)
            rb = B.restrictions.get((S, i)) or la.zeros(B.dim(T), B.dim(S), F)
            M = la.zeros(dims.get(T, 0), dims[S], F)
            for r, row in enumerate(ra):
                for c, v in enumerate(row):
                    M[r][c] = v
            for r, row in enumerate(rb):
                for c, v in enumerate(row):
                    M[A.dim(T) + r][A.dim(S) + c] = v
            res[(S, i)] = M
    return CoverData(A.size, dims, res, F)


def random_cover_data(rng: random.Random, size: int = 3, ambient: int = 4, field=QQ) -> CoverData:
    """Compatible random data: a quotient presheaf ``V / Σ K_i`` plus constant
    coefficients on a random nerve (so higher Čech cohomology occurs)."""
    Q = _random_quotient_data(rng, size, ambient, field)
    alive = [(i,) for i in range(size)]
    for k in range(2, size + 1):
        for S in combinations(range(size), k):
            if all(_key(T) in alive for T in combinations(S, k - 1)) and rng.random() < 0.6:
                alive.append(S)
    return direct_sum(Q, constant_cover_data(size, alive, rng.randint(1, 2), field))


# -- Mayer–Vietoris ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoverCohomologyData:
    """Cohomology of ``U``, ``V`` and ``U ∩ V`` with the restriction
    matrices ``r_u[n]: H^n(U) -> H^n(U∩V)`` and ``r_v[n]``."""

    h_u: GradedVectorSpace
    h_v: GradedVectorSpace
    h_uv: GradedVectorSpace
    r_u: Mapping
    r_v: Mapping
    field: object = QQ

    def __post_init__(self):
        for name, H, R in (("U", self.h_u, self.r_u), ("V", self.h_v, self.r_v)):
            for n, M in R.items():
                rows, cols = self.h_uv[n], H[n]
                if rows and cols and (len(M) != rows or any(len(r) != cols for r in M)):
                    raise ValueError(f"restriction from {name} in degree {n} has the wrong shape")

    def rho(self, n) -> list:
        """``ρ^n(a, b) = a|_{U∩V} - b|_{U∩V}``."""
        F = self.field
        m = self.h_uv[n]
        a, b = self.h_u[n], self.h_v[n]
        ru = self.r_u.get(n) or la.zeros(m, a, F)
        rv = self.r_v.get(n) or la.zeros(m, b, F)
        return [[F(x) for x in ru[i]] + [F(-x) for x in rv[i]] for i in range(m)]

    def degrees(self) -> range:
        ks = set(self.h_u.dims) | set(self.h_v.dims) | set(self.h_uv.dims)
        if not ks:
            return range(0)
        return range(min(ks), max(ks) + 2)


@dataclass(frozen=True)
class MayerVietorisSplit:
    """``0 -> coker ρ^{n-1} -> H^n(X) -> ker ρ^n -> 0`` by degree."""

    coker: GradedVectorSpace
    ker: GradedVectorSpace
    total: GradedVectorSpace


def mayer_vietoris_split(data: CoverCohomologyData) -> MayerVietorisSplit:
    F = data.field
    ker, cok = {}, {}
    for n in data.degrees():
        rows, cols = data.h_uv[n], data.h_u[n] + data.h_v[n]
        rk = la.rank(data.rho(n), F) if rows and cols else 0
        ker[n] = cols - rk
        cok[n + 1] = rows - rk
    K, Q = GradedVectorSpace(ker), GradedVectorSpace(cok)
    return MayerVietorisSplit(Q, K, K + Q)


def mayer_vietoris(data: CoverCohomologyData) -> GradedVectorSpace:
    """``dim H^n(X) = dim coker ρ^{n-1} + dim ker ρ^n``."""
    return mayer_vietoris_split(data).total


def sphere_data(field=QQ) -> CoverCohomologyData:
    """Two disks over a circle."""
    pt = GradedVectorSpace.of(1)
    return CoverCohomologyData(pt, pt, GradedVectorSpace.of(1, 1), {0: [[1]]}, {0: [[1]]}, field)


# -- complexes on a two-element cover ------------------------------------------

@dataclass(frozen=True, eq=False)
class TwoCoverComplexes:
    """Cochain complexes on ``U``, ``V``, ``U ∩ V`` with chain maps
    ``f: C(U) -> C(U∩V)`` and ``g: C(V) -> C(U∩V)``."""

    cu: CochainComplex
    cv: CochainComplex
    cuv: CochainComplex
    f: Mapping
    g: Mapping

    @property
    def field(self):
        return self.cu.field

    def check(self) -> list:
        out = []
        F = self.field
        for name, src, m in (("f", self.cu, self.f), ("g", self.cv, self.g)):
            for n in set(src.degrees) | set(self.cuv.degrees):
                a = la.matmul(self.cuv.differential(n), self._m(m, n, src), F,
                              inner=self.cuv.dim(n), ncols=src.dim(n))
                b = la.matmul(self._m(m, n + 1, src), src.differential(n), F,
                              inner=src.dim(n + 1), ncols=src.dim(n))
                if a != b:
                    out.append(f"{name} is not a chain map in degree {n}")
        return out

    def _m(self, m, n, src):
        M = m.get(n)
        return M if M is not None else la.zeros(self.cuv.dim(n), src.dim(n), self.field)


def total_complex(data: TwoCoverComplexes) -> CochainComplex:
    """``T^n = C^n(U) ⊕ C^n(V) ⊕ C^{n-1}(U∩V)`` with
    ``d(a, b, c) = (da, db, f a - g b - dc)``: the two-column Čech double complex."""
    F = data.field
    cu, cv, cuv = data.cu, data.cv, data.cuv
    degs = set(cu.degrees) | set(cv.degrees) | {n + 1 for n in cuv.degrees}
    if not degs:
        return CochainComplex({}, {}, F)
    lo, hi = min(degs), max(degs)
    dims = {n: cu.dim(n) + cv.dim(n) + cuv.dim(n - 1) for n in range(lo, hi + 1)}
    d = {}
    for n in range(lo, hi):
        M = la.zeros(dims[n + 1], dims[n], F)
        a, b = cu.dim(n), cv.dim(n)
        a1, b1 = cu.dim(n + 1), cv.dim(n + 1)
        blocks = [
            (0, 0, cu.differential(n)),
            (a1, a, cv.differential(n)),
            (a1 + b1, 0, data._m(data.f, n, cu)),
            (a1 + b1, a, [[-x for x in r] for r in data._m(data.g, n, cv)]),
            (a1 + b1, a + b, [[-x for x in r] for r in cuv.differential(n - 1)]),
        ]
        for r0, c0, B in blocks:
            for i, row in enumerate(B):
                for j, v in enumerate(row):
                    if v:
                        M[r0 + i][c0 + j] = F(v)
        d[n] = M
    return CochainComplex(dims, d, F)


def _induced_on_cohomology(src: CochainComplex, tgt: CochainComplex, m: Mapping, n) -> list:
    """Matrix of ``H^n(src) -> H^n(tgt)`` in cohomology bases."""
    from .complexes import cohomology_basis

    F = src.field
    reps_s = cohomology_basis(src, n)
    reps_t = cohomology_basis(tgt, n)
    if not reps_s or not reps_t:
        return la.zeros(len(reps_t), len(reps_s), F)
    B = tgt.coboundaries(n)
    basis = list(B) + reps_t
    M = m.get(n)
    cols = []
    for z in reps_s:
        w = la.apply(M, z, F) if M is not None else [F.zero] * tgt.dim(n)
        c = la.coordinates(w, basis, F)
        assert c is not None, "chain map does not send cocycles to cocycles"
        cols.append(c[len(B):])
    return la.transpose(cols, len(reps_t))


def cohomology_data(data: TwoCoverComplexes) -> CoverCohomologyData:
    F = data.field
    hu, hv, huv = cohomology(data.cu), cohomology(data.cv), cohomology(data.cuv)
    ru = {n: _induced_on_cohomology(data.cu, data.cuv, data.f, n) for n in data.cuv.degrees}
    rv = {n: _induced_on_cohomology(data.cv, data.cuv, data.g, n) for n in data.cuv.degrees}
    return CoverCohomologyData(hu, hv, huv, ru, rv, F)


def random_chain_map(rng: random.Random, src: CochainComplex, tgt: CochainComplex, scale: int = 2) -> dict:
    """A random chain map, from the solution space of ``d f = f d``."""
    F = src.field
    degs = sorted(set(src.degrees) & set(tgt.degrees))
    unknowns = [(n, a, b) for n in degs for a in range(tgt.dim(n)) for b in range(src.dim(n))]
    pos = {u: k for k, u in enumerate(unknowns)}
    rows = []
    for n in sorted(set(src.degrees) | set(tgt.degrees)):
        # (d_tgt f_n - f_{n+1} d_src)[a][b] = 0
        Dt, Ds = tgt.differential(n), src.differential(n)
        for a in range(tgt.dim(n + 1)):
            for b in range(src.dim(n)):
                row = [F.zero] * len(unknowns)
                for c in range(tgt.dim(n)):
                    if Dt[a][c] and (n, c, b) in pos:
                        row[pos[(n, c, b)]] += Dt[a][c]
                for c in range(src.dim(n + 1)):
                    if Ds[c][b] and (n + 1, a, c) in pos:
                        row[pos[(n + 1, a, c)]] -= Ds[c][b]
                rows.append([F(x) for x in row])
    sols = la.nullspace(rows, len(unknowns), F) if rows else la.nullspace([], len(unknowns), F)
    vals = [F.zero] * len(unknowns)
    for s in sols:
        c = F(rng.randint(-scale, scale))
        vals = la.add(vals, la.scale(c, s, F), F)
    out = {}
    for (n, a, b), v in zip(unknowns, vals):
        out.setdefault(n, la.zeros(tgt.dim(n), src.dim(n), F))[a][b] = v
    return out


def random_two_cover(rng: random.Random, max_dim: int = 2, degrees: int = 2, field=QQ) -> TwoCoverComplexes:
    def cx():
        return random_complex(rng, [rng.randint(0, max_dim) for _ in range(degrees)], field)

    cu, cv, cuv = cx(), cx(), cx()
    return TwoCoverComplexes(cu, cv, cuv, random_chain_map(rng, cu, cuv), random_chain_map(rng, cv, cuv))


# -- the Čech double complex of a two-element cover ------------------------------

@dataclass(frozen=True, eq=False)
class TwoCoverPipeline:
    """Column-filtered full Čech double complex of a two-element cover and
    its spectral sequence, truncated after column ``columns - 1``."""

    data: TwoCoverComplexes
    columns: int
    filtered: FilteredCochainComplex
    sequence: object
    mv: MayerVietorisSplit

    def e2(self) -> dict:
        return self.sequence.page(2).nonzero()

    def e2_vanishing_failures(self) -> list:
        """``(p, q)`` with ``p >= 2`` and ``E_2^{p,q} != 0``, among the columns
        unaffected by the truncation."""
        return [pq for pq, k in self.e2().items() if k and 2 <= pq[0] < self.columns - 1]

    def exact_sequence_failures(self) -> list:
        """Compare ``0 -> E_2^{1,n-1} -> H^n -> E_2^{0,n} -> 0`` with the
        Mayer–Vietoris split and with the total cohomology."""
        out = []
        E2 = self.e2()
        H = self.mv.total
        top = self.columns - 2
        for n in range(0, top + 1):
            a, b = E2.get((1, n - 1), 0), E2.get((0, n), 0)
            if a != self.mv.coker[n]:
                out.append(f"E_2^(1,{n - 1}) = {a} but coker ρ^{n - 1} = {self.mv.coker[n]}")
            if b != self.mv.ker[n]:
                out.append(f"E_2^(0,{n}) = {b} but ker ρ^{n} = {self.mv.ker[n]}")
            if a + b != H[n]:
                out.append(f"H^{n}: {a} + {b} != {H[n]}")
        return out


def two_cover_pipeline(data: TwoCoverComplexes, columns: int | None = None) -> TwoCoverPipeline:
    """Build ``K^{p,q} = ⊕_{σ ∈ {0,1}^{p+1}} C^q(U_σ)`` for ``p < columns``,
    filter by columns and run the spectral sequence."""
    F = data.field
    if data.check():
        raise ComplexError("; ".join(data.check()))
    qs = sorted(set(data.cu.degrees) | set(data.cv.degrees) | set(data.cuv.degrees))
    if columns is None:
        columns = (max(qs) - min(qs) + 3) if qs else 4
    comp = {(0,): data.cu, (1,): data.cv, (0, 1): data.cuv}
    maps = {((0,), (0, 1)): data.f, ((1,), (0, 1)): data.g}

    def C(s):
        return comp[_key(s)]

    def restrict(face, s, q):
        a, b = _key(face), _key(s)
        src = comp[a]
        if a == b:
            return la.identity(src.dim(q), F)
        return data._m(maps[(a, b)], q, src)

    # layout of the total complex: degree n, column p, tuple σ, then C^q(U_σ)
    cells = {}
    dims = {}
    if qs:
        nlo, nhi = min(qs), columns - 1 + max(qs)
    else:
        nlo, nhi = 0, -1
    for n in range(nlo, nhi + 1):
        off = 0
        for p in range(columns):
            q = n - p
            for s in product((0, 1), repeat=p + 1):
                k = C(s).dim(q)
                if k:
                    cells[(n, p, s)] = (off, k)
                    off += k
        dims[n] = off
    d = {}
    for n in range(nlo, nhi):
        M = la.zeros(dims[n + 1], dims[n], F)
        for (m, p, s), (c0, k) in cells.items():
            if m != n:
                continue
            q = n - p
            # vertical: (-1)^p d_{U_σ}
            if (n + 1, p, s) in cells:
                r0, _ = cells[(n + 1, p, s)]
                D = C(s).differential(q)
                sign = -1 if p % 2 else 1
                for i, row in enumerate(D):
                    for j, v in enumerate(row):
                        if v:
                            M[r0 + i][c0 + j] += sign * v
            # horizontal Čech differential
            for t in product((0, 1), repeat=p + 2):
                if (n + 1, p + 1, t) not in cells:
                    continue
                r0, _ = cells[(n + 1, p + 1, t)]
                for j in range(p + 2):
                    if t[:j] + t[j + 1:] != s:
                        continue
                    R = restrict(s, t, q)
                    sign = 1 if j % 2 == 0 else -1
                    for a, row in enumerate(R):
                        for b, v in enumerate(row):
                            if v:
                                M[r0 + a][c0 + b] += sign * v
        if F.p:
            M = [[v % F.p for v in r] for r in M]
        d[n] = M
    T = CochainComplex(dims, d, F)
    weights = {n: [0] * dims[n] for n in dims}
    for (n, p, s), (c0, k) in cells.items():
        for i in range(k):
            weights[n][c0 + i] = p
    FC = FilteredCochainComplex.from_weights(T, {n: w for n, w in weights.items() if w})
    seq = spectral_sequence(FC, up_to_page=2)
    return TwoCoverPipeline(data, columns, FC, seq, mayer_vietoris_split(cohomology_data(data)))
