"""Coefficient fields: the rationals and prime fields.

Elements are plain values so that the polynomial kernels can use native
arithmetic: ``gmpy2.mpq`` for QQ (always in lowest terms, positive
denominator) and Python ints in ``[0, p)`` for GF(p).
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpq


def _is_prime(n: int) -> bool:
    return n >= 2 and bool(gmpy2.is_prime(n))


class Field:
    """Base class; use :data:`QQ` or :func:`GF`."""

    p: int = 0

    def __call__(self, value):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == 0

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)


class RationalField(Field):
    p = 0

    def __call__(self, value):
        if isinstance(value, str):
            return mpq(Fraction(value.strip()))
        if isinstance(value, Fraction):
            return mpq(value.numerator, value.denominator)
        return mpq(value)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def format(self, a) -> str:
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def spec(self) -> str:
        return "q"

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField(Field):
    def __init__(self, p: int):
        p = int(p)
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __call__(self, value):
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, (Fraction, type(mpq(0)))):
            num, den = int(value.numerator), int(value.denominator)
            if den % self.p == 0:
                raise ZeroDivisionError(f"denominator {den} vanishes mod {self.p}")
            return num * pow(den, -1, self.p) % self.p
        return int(value) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(int(a), -1, self.p)

    def format(self, a) -> str:
        return str(int(a))

    def spec(self) -> str:
        return f"fp:{self.p}"

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_spec(spec: str) -> Field:
    """Parse ``"q"`` or ``"fp:<p>"``."""
    spec = spec.strip().lower()
    if spec in ("q", "qq", "rational"):
        return QQ
    if spec.startswith("fp:"):
        return GF(int(spec[3:]))
    raise ValueError(f"unknown field spec {spec!r}")
