"""Polynomial rings with a fixed monomial order, and their elements."""

from __future__ import annotations

from dataclasses import dataclass, field
from operator import add, ge, sub
from typing import Iterable, Mapping

from .field import QQ, Field

Monomial = tuple  # tuple of non-negative ints, one per ring variable


def _revneg(m):
    return tuple(-e for e in reversed(m))


@dataclass(frozen=True)
class MonomialOrder:
    """``lex``, ``grevlex``, or ``block`` (grevlex on the first ``split``
    variables, ties broken by grevlex on the rest)."""

    kind: str = "grevlex"
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def key(self, m: Monomial):
        if self.kind == "lex":
            return m
        if self.kind == "grevlex":
            return (sum(m),) + _revneg(m)
        a, b = m[: self.split], m[self.split:]
        return (sum(a),) + _revneg(a) + (sum(b),) + _revneg(b)

    def __str__(self):
        return f"block({self.split})" if self.kind == "block" else self.kind


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def block_order(split: int) -> MonomialOrder:
    return MonomialOrder("block", split)


class _KeyCache(dict):
    __slots__ = ("fn",)

    def __init__(self, fn):
        super().__init__()
        self.fn = fn

    def __missing__(self, m):
        k = self[m] = self.fn(m)
        return k


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(add, a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(sub, a, b))


def mono_divides(b: Monomial, a: Monomial) -> bool:
    """True iff ``b`` divides ``a``."""
    return all(map(ge, a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(max, a, b))


@dataclass(frozen=True)
class PolynomialRing:
    """k[names] with a monomial order. Variables are positional."""

    field: Field
    names: tuple
    order: MonomialOrder = GREVLEX
    _keys: _KeyCache = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if self.order.kind == "block" and not 0 <= self.order.split <= len(names):
            raise ValueError("block split out of range")
        object.__setattr__(self, "_keys", _KeyCache(self.order.key))

    @property
    def ngens(self) -> int:
        return len(self.names)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def keyfunc(self):
        return self._keys.__getitem__

    @property
    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    @property
    def one(self) -> Polynomial:
        return self.constant(1)

    def constant(self, c) -> Polynomial:
        c = self.field(c)
        if c == 0:
            return self.zero
        return Polynomial(self, {(0,) * self.ngens: c})

    @property
    def gens(self) -> tuple:
        return tuple(self.gen(i) for i in range(self.ngens))

    def gen(self, i) -> Polynomial:
        if isinstance(i, str):
            i = self.index(i)
        m = [0] * self.ngens
        m[i] = 1
        return Polynomial(self, {tuple(m): self.field.one})

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no variable {name!r} in {self.names}") from None

    def __call__(self, value) -> Polynomial:
        if isinstance(value, Polynomial):
            if value.ring != self:
                raise ValueError("polynomial belongs to a different ring")
            return value
        if isinstance(value, str):
            from .parse import parse_polynomial
            return parse_polynomial(value, self)
        return self.constant(value)

    def from_terms(self, terms: Mapping) -> Polynomial:
        """Build from ``{monomial: coefficient}``, normalizing coefficients."""
        F = self.field
        d = {}
        for m, c in terms.items():
            c = F(c)
            if c != 0:
                m = tuple(m)
                if len(m) != self.ngens or min(m, default=0) < 0:
                    raise ValueError(f"bad monomial {m} for {self.ngens} variables")
                d[m] = c
        return Polynomial(self, d)

    def with_order(self, order: MonomialOrder) -> PolynomialRing:
        return PolynomialRing(self.field, self.names, order)

    def with_names(self, names) -> PolynomialRing:
        return PolynomialRing(self.field, tuple(names), self.order)

    def __str__(self):
        return f"{self.field!r}[{', '.join(self.names)}] ({self.order})"


class Polynomial:
    """Immutable sparse polynomial. ``terms`` maps exponent tuples to nonzero
    coefficients; do not mutate it."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolynomialRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_coefficient(self):
        return self.terms.get((0,) * self.ring.ngens, self.ring.field.zero)

    @property
    def LM(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.ring.keyfunc)

    @property
    def LC(self):
        return self.terms[self.LM]

    def sorted_terms(self) -> list:
        """Terms in strictly descending order."""
        return sorted(self.terms.items(), key=lambda t: self.ring.keyfunc(t[0]), reverse=True)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree(self, var) -> int:
        i = self.ring.index(var) if isinstance(var, str) else var
        return max((m[i] for m in self.terms), default=-1)

    def support(self) -> set:
        """Indices of the variables that occur."""
        s = set()
        for m in self.terms:
            s.update(i for i, e in enumerate(m) if e)
        return s

    def monic(self) -> Polynomial:
        if not self.terms:
            return self
        inv = self.ring.field.inv(self.LC)
        return self._scale(inv)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.constant(other)

    def _scale(self, c):
        p = self.ring.p
        if c == 0:
            return self.ring.zero
        if p:
            return Polynomial(self.ring, {m: v * c % p for m, v in self.terms.items()})
        return Polynomial(self.ring, {m: v * c for m, v in self.terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        p = self.ring.p
        d = dict(self.terms)
        for m, c in other.terms.items():
            v = d.get(m, 0) + c
            if p:
                v %= p
            if v:
                d[m] = v
            else:
                d.pop(m, None)
        return Polynomial(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        if p:
            return Polynomial(self.ring, {m: (-c) % p for m, c in self.terms.items()})
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self._scale(self.ring.field(other))
        other = self._coerce(other)
        p = self.ring.p
        d: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(map(add, m1, m2))
                v = d.get(m, 0) + c1 * c2
                if p:
                    v %= p
                if v:
                    d[m] = v
                else:
                    d.pop(m, None)
        return Polynomial(self.ring, d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_term(self, m: Monomial, c) -> Polynomial:
        p = self.ring.p
        if p:
            return Polynomial(self.ring, {mono_mul(k, m): v * c % p for k, v in self.terms.items()})
        return Polynomial(self.ring, {mono_mul(k, m): v * c for k, v in self.terms.items()})

    # -- evaluation ---------------------------------------------------------
    def compose(self, images, target: PolynomialRing | None = None) -> Polynomial:
        """Substitute ``images[i]`` for variable ``i``."""
        images = list(images)
        if len(images) != self.ring.ngens:
            raise ValueError("need one image per variable")
        if target is None:
            target = images[0].ring if images else self.ring
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = images[i] if e == 1 else power(i, e - 1) * images[i]
            return cache[key]

        F = self.ring.field
        result = target.zero
        for m, c in self.terms.items():
            t = target.constant(c) if F == target.field else target.constant(F.format(c))
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
                    if not t:
                        break
            result = result + t
        return result

    def evaluate(self, point) -> object:
        """Evaluate at a full point (sequence of field elements)."""
        F = self.ring.field
        p = F.p
        total = F.zero
        pt = [F(v) for v in point]
        for m, c in self.terms.items():
            t = c
            for v, e in zip(pt, m):
                if e:
                    t = t * v ** e
            total = total + t
        return total % p if p else total

    # -- comparisons --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int,)) or hasattr(other, "denominator"):
            return self.terms == self.ring.constant(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __str__(self):
        from .parse import format_polynomial
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def ring_of(polys: Iterable[Polynomial]) -> PolynomialRing:
    rings = {f.ring for f in polys}
    if len(rings) != 1:
        raise ValueError("polynomials must share exactly one ring")
    return rings.pop()


def polynomial_ring(names, field: Field = QQ, order: MonomialOrder = GREVLEX) -> PolynomialRing:
    """Convenience constructor: ``polynomial_ring("x y z")``."""
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    return PolynomialRing(field, tuple(names), order)
