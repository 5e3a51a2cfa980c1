"""Ideals of polynomial rings and the elimination-based operations on them."""

from __future__ import annotations

from typing import Iterable

from .groebner import buchberger, normal_form
from .ring import GREVLEX, Polynomial, PolynomialRing, block_order


class Ideal:
    """Finitely generated ideal. The reduced Gröbner basis for the ring's
    order is computed on first use and cached."""

    __slots__ = ("ring", "gens", "_gb")

    def __init__(self, ring: PolynomialRing, gens: Iterable = ()):
        gens = tuple(ring(g) for g in gens)
        self.ring = ring
        self.gens = tuple(g for g in gens if g)
        self._gb = None

    @classmethod
    def from_basis(cls, ring, basis) -> Ideal:
        """Wrap a known reduced Gröbner basis without recomputing it."""
        I = cls(ring, basis)
        I._gb = tuple(I.gens)
        return I

    @property
    def groebner_basis(self) -> tuple:
        if self._gb is None:
            self._gb = tuple(buchberger(self.gens))
        return self._gb

    @property
    def known_generators(self) -> tuple:
        """The reduced Gröbner basis if already computed, else the generators."""
        return self._gb if self._gb is not None else self.gens

    def reduce(self, f) -> Polynomial:
        return normal_form(self.ring(f), self.groebner_basis)

    def contains(self, f) -> bool:
        f = self.ring(f)
        if f.ring != self.ring:
            raise ValueError("ring mismatch")
        return not self.reduce(f)

    __contains__ = contains

    def contains_ideal(self, other: Ideal) -> bool:
        _check_same(self, other)
        return all(self.contains(g) for g in other.gens)

    def equals(self, other: Ideal) -> bool:
        """Ideal equality via reduced Gröbner bases."""
        _check_same(self, other)
        return self.groebner_basis == other.groebner_basis

    def is_unit(self) -> bool:
        return self.groebner_basis == (self.ring.one,)

    def is_zero(self) -> bool:
        return not self.gens

    def __add__(self, other: Ideal) -> Ideal:
        _check_same(self, other)
        return Ideal(self.ring, self.gens + other.gens)

    def __mul__(self, other: Ideal) -> Ideal:
        _check_same(self, other)
        return Ideal(self.ring, [f * g for f in self.gens for g in other.gens])

    def __repr__(self):
        return f"Ideal({[str(g) for g in self.gens]})"


def _check_same(I, J):
    if I.ring != J.ring:
        raise ValueError(f"ring mismatch: {I.ring} vs {J.ring}")


def ideal_membership(f: Polynomial, I: Ideal) -> bool:
    if f.ring != I.ring:
        raise ValueError(f"ring mismatch: {f.ring} vs {I.ring}")
    return I.contains(f)


def transfer(f: Polynomial, target: PolynomialRing, positions) -> Polynomial:
    """Move ``f`` into ``target``; source variable ``i`` becomes target
    variable ``positions[i]`` (``None`` means the variable must not occur)."""
    n = target.ngens
    terms = {}
    for m, c in f.terms.items():
        new = [0] * n
        for i, e in enumerate(m):
            if e:
                j = positions[i]
                if j is None:
                    raise ValueError(f"variable {f.ring.names[i]} cannot be transferred")
                new[j] += e
        terms[tuple(new)] = c
    return Polynomial(target, terms)


def fresh_name(taken, base: str) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def eliminate(gens, eliminated: Iterable[int], target: PolynomialRing | None = None) -> list:
    """Gröbner-basis elements of ``(gens) ∩ k[kept]`` via a block order that
    puts the eliminated variables first.

    Returns polynomials in ``target`` (default: the kept variables with
    grevlex), kept variables in their original relative order.
    """
    gens = list(gens)
    R = gens[0].ring if gens else None
    if R is None:
        return []
    elim = sorted(set(eliminated))
    keep = [i for i in range(R.ngens) if i not in set(elim)]
    S = PolynomialRing(R.field, tuple(f"_v{i}" for i in elim + keep), block_order(len(elim)))
    pos = {old: new for new, old in enumerate(elim + keep)}
    G = buchberger([transfer(g, S, [pos[i] for i in range(R.ngens)]) for g in gens])
    if target is None:
        target = PolynomialRing(R.field, tuple(R.names[i] for i in keep), GREVLEX)
    back = [None] * len(elim) + list(range(len(keep)))
    if target.ngens != len(keep):
        raise ValueError("target ring must have one variable per kept variable")
    out = []
    for g in G:
        if all(not any(m[: len(elim)]) for m in g.terms):
            out.append(transfer(g, target, back))
    return out


def elimination_ideal(I: Ideal, keep) -> Ideal:
    """``I ∩ k[keep]`` as an ideal of the subring on ``keep``."""
    R = I.ring
    keep_idx = {R.index(k) if isinstance(k, str) else int(k) for k in keep}
    elim = [i for i in range(R.ngens) if i not in keep_idx]
    sub = PolynomialRing(R.field, tuple(R.names[i] for i in sorted(keep_idx)),
                         R.order if R.order.kind != "block" else GREVLEX)
    if not I.gens:
        return Ideal(sub, [])
    return _wrap(sub, eliminate(I.gens, elim, sub))


def ideal_intersection(I: Ideal, J: Ideal) -> Ideal:
    """``I ∩ J`` by eliminating ``t`` from ``t·I + (1 - t)·J``."""
    _check_same(I, J)
    R = I.ring
    if not I.gens or not J.gens:
        return Ideal(R, [])
    T = PolynomialRing(R.field, (fresh_name(R.names, "_t"),) + R.names, R.order)
    shift = [i + 1 for i in range(R.ngens)]
    t = T.gen(0)
    gens = [t * transfer(f, T, shift) for f in I.gens]
    gens += [(1 - t) * transfer(g, T, shift) for g in J.gens]
    return _wrap(R, eliminate(gens, [0], R))


def _wrap(ring, gens) -> Ideal:
    # the kept part of a reduced block-order basis is a reduced grevlex basis
    if ring.order == GREVLEX:
        return Ideal.from_basis(ring, gens)
    return Ideal(ring, gens)
