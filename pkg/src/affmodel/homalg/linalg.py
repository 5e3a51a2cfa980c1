"""Exact dense linear algebra over QQ or GF(p).

Matrices are lists of rows of field elements (``gmpy2.mpq`` or ints mod p);
the field object supplies coercion and inverses.
"""

from __future__ import annotations

from ..polyalg.field import QQ


def matrix(rows, field=QQ) -> list:
    return [[field(v) for v in r] for r in rows]


def zeros(m: int, n: int, field=QQ) -> list:
    z = field.zero
    return [[z] * n for _ in range(m)]


def identity(n: int, field=QQ) -> list:
    out = zeros(n, n, field)
    for i in range(n):
        out[i][i] = field.one
    return out


def shape(A, ncols: int | None = None) -> tuple:
    if not A:
        return (0, ncols or 0)
    return (len(A), len(A[0]))


def matmul(A, B, field=QQ, inner: int | None = None, ncols: int | None = None) -> list:
    """``A @ B``; ``inner``/``ncols`` give the shapes when a factor has no rows."""
    m = len(A)
    k = len(B) if B else (inner or 0)
    n = len(B[0]) if B else (ncols or 0)
    p = field.p
    out = zeros(m, n, field)
    for i in range(m):
        Ai = A[i]
        row = out[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(n):
                    if Bt[j]:
                        row[j] = row[j] + a * Bt[j]
        if p:
            out[i] = [v % p for v in row]
    return out


def is_zero_matrix(A) -> bool:
    return all(not v for r in A for v in r)


def transpose(A, ncols: int = 0) -> list:
    if not A:
        return [[] for _ in range(ncols)]
    return [list(c) for c in zip(*A)]


def rref(A, field=QQ) -> tuple:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in A]
    p = field.p
    rows = len(M)
    cols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = field.inv(M[r][c])
        M[r] = [(v * inv % p) if p else v * inv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [((a - f * b) % p) if p else a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A, field=QQ) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A, field)[1])


def nullspace(A, ncols: int, field=QQ) -> list:
    """Basis of ``{x : A x = 0}`` as a list of vectors of length ``ncols``."""
    if not A:
        return [[field.one if i == j else field.zero for i in range(ncols)] for j in range(ncols)]
    R, piv = rref(A, field)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for i, c in enumerate(piv):
            v[c] = -R[i][f] % field.p if field.p else -R[i][f]
        out.append(v)
    return out


def column_space(A, nrows: int, field=QQ) -> list:
    """Basis of the column span (vectors of length ``nrows``)."""
    cols = transpose(A)
    if not cols:
        return []
    R, piv = rref(cols, field)
    return [R[i] for i in range(len(piv))]


def span_basis(vectors, dim: int, field=QQ) -> list:
    """Echelon basis of the span of ``vectors``."""
    vectors = [list(v) for v in vectors if any(v)]
    if not vectors:
        return []
    R, piv = rref(vectors, field)
    return [R[i] for i in range(len(piv))]


def span_dim(vectors, field=QQ) -> int:
    vectors = [list(v) for v in vectors]
    if not vectors:
        return 0
    return rank(vectors, field)


def intersect_spans(U, V, dim: int, field=QQ) -> list:
    """Basis of ``span(U) ∩ span(V)``."""
    U = span_basis(U, dim, field)
    V = span_basis(V, dim, field)
    if not U or not V:
        return []
    # solve sum a_i u_i - sum b_j v_j = 0
    cols = U + [[-x % field.p if field.p else -x for x in v] for v in V]
    A = transpose(cols)
    ns = nullspace(A, len(cols), field)
    out = []
    for c in ns:
        w = [field.zero] * dim
        for a, u in zip(c[: len(U)], U):
            if a:
                w = [x + a * y for x, y in zip(w, u)]
        if field.p:
            w = [x % field.p for x in w]
        out.append(w)
    return span_basis(out, dim, field)


def preimage(A, V, ncols: int, field=QQ) -> list:
    """Basis of ``{x : A x ∈ span(V)}`` for a matrix with ``ncols`` columns."""
    m = len(A)
    V = span_basis(V, m, field)
    if m == 0:
        return nullspace([], ncols, field)
    # [A | -V] (x, y) = 0
    big = [list(A[i]) + [(-v[i] % field.p) if field.p else -v[i] for v in V] for i in range(m)]
    ns = nullspace(big, ncols + len(V), field)
    return span_basis([c[:ncols] for c in ns], ncols, field)


def apply(A, v, field=QQ) -> list:
    p = field.p
    zero = field.zero
    nz = [(j, b) for j, b in enumerate(v) if b]
    out = []
    for row in A:
        s = zero
        for j, b in nz:
            a = row[j]
            if a:
                s = s + a * b
        out.append(s % p if p else s)
    return out


def in_span(v, V, field=QQ) -> bool:
    if not any(v):
        return True
    return span_dim(list(V) + [v], field) == span_dim(V, field)


def inverse(A, field=QQ) -> list:
    """Inverse of a square matrix; raises ``ValueError`` when singular."""
    n = len(A)
    big = [list(r) + [field.one if i == j else field.zero for j in range(n)] for i, r in enumerate(A)]
    R, piv = rref(big, field)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ValueError("matrix is singular")
    return [r[n:] for r in R[:n]]


def coordinates(v, basis, field=QQ):
    """Coefficients of ``v`` in a linearly independent list, or ``None``."""
    if not basis:
        return [] if not any(v) else None
    A = transpose(basis)
    big = [list(row) + [x] for row, x in zip(A, v)]
    R, piv = rref(big, field)
    k = len(basis)
    if k in piv:
        return None
    out = [field.zero] * k
    for i, c in enumerate(piv):
        out[c] = R[i][k]
    return out


def add(u, v, field=QQ) -> list:
    p = field.p
    return [((a + b) % p) if p else a + b for a, b in zip(u, v)]


def scale(c, v, field=QQ) -> list:
    p = field.p
    return [(c * a % p) if p else c * a for a in v]


def random_matrix(rng, m: int, n: int, field=QQ, scale: int = 2, density: float = 1.0) -> list:
    return [[field(rng.randint(-scale, scale)) if rng.random() < density else field.zero for _ in range(n)]
            for _ in range(m)]


def random_invertible(rng, n: int, field=QQ, scale: int = 2) -> list:
    while True:
        A = random_matrix(rng, n, n, field, scale)
        if rank(A, field) == n:
            return A
