"""Degree-bounded linear-algebra oracles.

These answer ideal questions by Gaussian elimination on Macaulay matrices
(rows ``m*g`` for monomials ``m`` and generators ``g`` with ``deg(m*g) <= D``)
and never touch Gröbner bases, so they serve as independent checks.
A positive membership answer is a certificate; a negative answer only means
"no certificate up to degree D".
"""

from __future__ import annotations

from itertools import combinations_with_replacement

DEFAULT_DEGREE = 8


def monomials_up_to(n: int, D: int) -> list:
    out = []
    for d in range(D + 1):
        for combo in combinations_with_replacement(range(n), d):
            m = [0] * n
            for i in combo:
                m[i] += 1
            out.append(tuple(m))
    return out


class _Echelon:
    """Incremental row echelon form over a field; rows are dicts keyed by
    column labels, pivots chosen as the maximum under ``rank``."""

    def __init__(self, field, rank):
        self.field = field
        self.rank = rank
        self.rows = {}  # pivot -> row normalized to pivot coefficient 1

    def _sub(self, row, piv, c):
        p = self.field.p
        for m, v in self.rows[piv].items():
            w = row.get(m, 0) - c * v
            if p:
                w %= p
            if w:
                row[m] = w
            else:
                row.pop(m, None)

    def reduce(self, row: dict) -> dict:
        row = dict(row)
        done = {}
        while row:
            piv = max(row, key=self.rank)
            if piv in self.rows:
                self._sub(row, piv, row[piv])
            else:
                done[piv] = row.pop(piv)
        return done

    def add(self, row: dict) -> bool:
        r = self.reduce(row)
        if not r:
            return False
        piv = max(r, key=self.rank)
        inv = self.field.inv(r[piv])
        p = self.field.p
        self.rows[piv] = {m: (v * inv % p if p else v * inv) for m, v in r.items()}
        return True


def _macaulay(gens, D, rank):
    gens = [g for g in gens if g]
    if not gens:
        return None
    R = gens[0].ring
    E = _Echelon(R.field, rank)
    for g in gens:
        dg = g.total_degree()
        for m in monomials_up_to(R.ngens, D - dg):
            E.add({tuple(a + b for a, b in zip(k, m)): c for k, c in g.terms.items()})
    return E


def _grevlex_rank(m):
    return (sum(m),) + tuple(-e for e in reversed(m))


def macaulay_membership(f, gens, degree: int = DEFAULT_DEGREE) -> bool:
    """True iff ``f`` is an explicit combination ``sum h_i g_i`` with every
    ``deg(h_i g_i) <= degree``."""
    if not f:
        return True
    if f.total_degree() > degree:
        return False
    E = _macaulay(gens, degree, _grevlex_rank)
    if E is None:
        return False
    return not E.reduce(f.terms)


def macaulay_subring_elements(gens, keep, degree: int = DEFAULT_DEGREE) -> list:
    """Basis (as polynomials) of the degree-``<= degree`` part of the Macaulay
    span that involves only the variables in ``keep``."""
    gens = [g for g in gens if g]
    if not gens:
        return []
    R = gens[0].ring
    keep_idx = {R.index(k) if isinstance(k, str) else int(k) for k in keep}
    drop = [i for i in range(R.ngens) if i not in keep_idx]

    def rank(m):
        # any monomial touching a dropped variable outranks the keep-only ones
        return (sum(m[i] for i in drop) > 0,) + _grevlex_rank(m)

    E = _macaulay(gens, degree, rank)
    out = []
    for piv, row in E.rows.items():
        if not any(piv[i] for i in drop):
            out.append(R.from_terms(row))
    return out


def subalgebra_contains(f, images, degree: int = DEFAULT_DEGREE) -> bool:
    """True iff ``f`` is a linear combination of products of ``images`` using
    at most ``degree`` factors."""
    if not images:
        return f.is_constant()
    R = f.ring
    E = _Echelon(R.field, _grevlex_rank)
    for m in monomials_up_to(len(images), degree):
        prod = R.one
        for img, e in zip(images, m):
            if e:
                prod = prod * img ** e
        E.add(prod.terms)
    return not E.reduce(f.terms)
