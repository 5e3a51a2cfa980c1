"""Multivariate division and Buchberger's algorithm.

The kernels work on raw ``{monomial: coefficient}`` dicts; the public
functions take and return :class:`Polynomial` values.
"""

from __future__ import annotations

import heapq
import logging
from operator import add, ge, sub

from .ring import Polynomial, mono_lcm, ring_of

log = logging.getLogger(__name__)


def _mask(m) -> int:
    """Bit ``i`` set iff variable ``i`` occurs in ``m``."""
    out = 0
    for i, e in enumerate(m):
        if e:
            out |= 1 << i
    return out


def _divisor(m, basis, masks):
    mm = _mask(m)
    for idx, g in enumerate(basis):
        if not masks[idx] & ~mm and all(map(ge, m, g[0])):
            return idx
    return -1


def _reduce(f: dict, basis: list, key, p: int, quotients: list | None = None, masks: list | None = None) -> dict:
    """Full reduction of ``f`` by ``basis`` (entries ``(lm, terms, lc_inv)``).

    ``f`` is consumed. If ``quotients`` is given, ``quotients[i]`` accumulates
    the multiplier of basis element ``i`` as a dict.
    """
    if masks is None:
        masks = [_mask(g[0]) for g in basis]
    neg = {}

    def nk(m):
        k = neg.get(m)
        if k is None:
            k = neg[m] = tuple(-x for x in key(m))
        return k

    heap = [(nk(m), m) for m in f]
    heapq.heapify(heap)
    r = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = f.get(m)
        if c is None:
            continue  # cancelled, or a stale duplicate
        idx = _divisor(m, basis, masks)
        del f[m]
        if idx < 0:
            r[m] = c
            continue
        lm, g, lcinv = basis[idx][:3]
        q = tuple(map(sub, m, lm))
        cq = c * lcinv
        if p:
            cq %= p
        if quotients is not None:
            qd = quotients[idx]
            v = qd.get(q, 0) + cq
            if p:
                v %= p
            if v:
                qd[q] = v
            else:
                qd.pop(q, None)
        for gm, gc in g.items():
            if gm == lm:
                continue
            mm = tuple(map(add, gm, q))
            old = f.get(mm)
            v = (0 if old is None else old) - cq * gc
            if p:
                v %= p
            if v:
                f[mm] = v
                if old is None:
                    heapq.heappush(heap, (nk(mm), mm))
            elif old is not None:
                del f[mm]
    return r


def _entry(terms: dict, key, field):
    lm = max(terms, key=key)
    return (lm, terms, field.inv(terms[lm]))


def normal_form(f: Polynomial, G) -> Polynomial:
    """Remainder of ``f`` on division by ``G``; canonical when ``G`` is a
    reduced Gröbner basis."""
    R = f.ring
    basis = []
    for g in G:
        if g.ring != R:
            raise ValueError(f"ring mismatch: {g.ring} vs {R}")
        if g:
            basis.append(_entry(g.terms, R.keyfunc, R.field))
    return Polynomial(R, _reduce(dict(f.terms), basis, R.keyfunc, R.p))


def divide(f: Polynomial, G) -> tuple[list, Polynomial]:
    """Division with quotients: ``f == sum(q*g) + r``."""
    R = f.ring
    G = list(G)
    for g in G:
        if g.ring != R:
            raise ValueError(f"ring mismatch: {g.ring} vs {R}")
    basis = [_entry(g.terms, R.keyfunc, R.field) if g else ((None,), {}, 0) for g in G]
    quots = [dict() for _ in G]
    live = [b if b[1] else ((float("inf"),) * R.ngens, {}, 0) for b in basis]
    r = _reduce(dict(f.terms), live, R.keyfunc, R.p, quots)
    return [Polynomial(R, q) for q in quots], Polynomial(R, r)


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    L = mono_lcm(f.LM, g.LM)
    F = f.ring.field
    a = f.mul_term(tuple(map(lambda x, y: x - y, L, f.LM)), F.inv(f.LC))
    b = g.mul_term(tuple(map(lambda x, y: x - y, L, g.LM)), F.inv(g.LC))
    return a - b


def _monic(terms: dict, key, field, p):
    lm = max(terms, key=key)
    inv = field.inv(terms[lm])
    if p:
        return lm, {m: c * inv % p for m, c in terms.items()}
    return lm, {m: c * inv for m, c in terms.items()}


def _buchberger_raw(F: list, n: int, key, field) -> list:
    """Return a (non-reduced) Gröbner basis of raw dicts, all monic.

    Pairs are selected by sugar degree, then by the order of their lcm, and
    pruned with the Gebauer-Moller criteria.
    """
    p = field.p
    one = (0,) * n
    G: list = []  # (lm, terms, 1, sugar)
    masks: list = []
    active: list = []  # indices whose leading monomial is not divisible by a later one
    live: dict = {}  # (i, j) -> (lcm, mask of lcm)
    heap: list = []
    fresh: list = []

    def update(t):
        h_lm = G[t][0]
        h_sugar = G[t][3]
        hm = masks[t]
        cands = []
        for i in active:
            L = tuple(map(max, G[i][0], h_lm))
            cands.append((sum(L), i, L, masks[i] | hm))
        cands.sort()
        # criterion M: drop a new pair whose lcm is divisible by another kept
        # one (a proper divisor has lower degree, so it was seen earlier)
        kept = []
        for _, i, L, Lm in cands:
            if any(not km & ~Lm and all(map(ge, L, K)) for K, km in kept):
                continue
            kept.append((L, Lm))
            if not masks[i] & hm:
                continue  # product criterion (coprime leading monomials)
            dL = sum(L)
            sugar = max(G[i][3] + dL - sum(G[i][0]), h_sugar + dL - sum(h_lm))
            fresh.append((i, L, Lm, sugar))
        # criterion B on old pairs
        for pr, (L, Lm) in list(live.items()):
            if hm & ~Lm or not all(map(ge, L, h_lm)):
                continue
            i, j = pr
            if mono_lcm(G[i][0], h_lm) != L and mono_lcm(G[j][0], h_lm) != L:
                del live[pr]
        for i, L, Lm, sugar in fresh:
            live[(i, t)] = (L, Lm)
            heapq.heappush(heap, (sugar, key(L), i, t))
        fresh.clear()
        active[:] = [i for i in active if masks[i] & ~hm or not all(map(ge, G[i][0], h_lm))] + [t]

    def add_basis(terms, sugar):
        lm, terms = _monic(terms, key, field, p)
        G.append((lm, terms, 1, sugar))
        masks.append(_mask(lm))
        update(len(G) - 1)
        if len(G) % 100 == 0:
            log.debug("buchberger: %d basis elements, %d pairs pending", len(G), len(live))
        return lm

    # inputs wait in the queue like S-polynomials, keyed by their degree
    log.debug("buchberger: %d inputs in %d variables", len(F), n)
    for idx, f in enumerate(F):
        heapq.heappush(heap, (max(sum(m) for m in f), key(max(f, key=key)), -1, idx))

    while heap:
        sugar, _, i, j = heapq.heappop(heap)
        if i < 0:
            h = _reduce(dict(F[j]), G, key, p, masks=masks)
            if h and add_basis(h, sugar) == one:
                return [{one: field.one}]
            continue
        if live.pop((i, j), None) is None:
            continue
        gi, gj = G[i], G[j]
        L = mono_lcm(gi[0], gj[0])
        qi = tuple(map(sub, L, gi[0]))
        qj = tuple(map(sub, L, gj[0]))
        s = {}
        for m, c in gi[1].items():
            s[tuple(map(add, m, qi))] = c
        for m, c in gj[1].items():
            mm = tuple(map(add, m, qj))
            v = s.get(mm, 0) - c
            if p:
                v %= p
            if v:
                s[mm] = v
            else:
                s.pop(mm, None)
        h = _reduce(s, G, key, p, masks=masks)
        if h:
            if add_basis(h, sugar) == one:
                return [{one: field.one}]
    return [G[i][1] for i in active]


def _reduce_basis(G: list, key, field) -> list:
    """Minimalize and interreduce a Gröbner basis of monic raw dicts."""
    p = field.p
    entries = sorted(((max(g, key=key), g) for g in G), key=lambda e: key(e[0]))
    minimal = []
    for lm, g in entries:
        if not any(all(map(ge, lm, h[0])) for h in minimal):
            minimal.append((lm, g))
    out = []
    for idx, (lm, g) in enumerate(minimal):
        others = [(h[0], h[1], 1) for jdx, h in enumerate(minimal) if jdx != idx]
        tail = dict(g)
        c = tail.pop(lm)
        r = _reduce(tail, others, key, p)
        r[lm] = c
        _, r = _monic(r, key, field, p)
        out.append((lm, r))
    out.sort(key=lambda e: key(e[0]), reverse=True)
    return [g for _, g in out]


def buchberger(gens) -> list:
    """Reduced Gröbner basis of the ideal generated by ``gens``.

    Returns monic polynomials sorted by strictly descending leading monomial;
    the zero ideal gives ``[]`` and the unit ideal ``[1]``.
    """
    gens = list(gens)
    if not gens:
        return []
    R = ring_of(gens)
    raw = [dict(g.terms) for g in gens if g]
    if not raw:
        return []
    G = _buchberger_raw(raw, R.ngens, R.keyfunc, R.field)
    G = _reduce_basis(G, R.keyfunc, R.field)
    return [Polynomial(R, g) for g in G]


def is_groebner_basis(G) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    G = [g for g in G if g]
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            if normal_form(s_polynomial(G[i], G[j]), G):
                return False
    return True
