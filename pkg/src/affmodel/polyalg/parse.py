"""Text form of polynomials.

Grammar: terms joined by ``+``/``-``; a term is ``coef*var^exp*...`` where
the coefficient is an integer or ``p/q`` and may be omitted. Variables match
``[A-Za-z_][A-Za-z0-9_]*``. Whitespace is ignored.
"""

from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\^)|(\*)|([+-]))")


class PolynomialSyntaxError(ValueError):
    pass


def _tokens(text: str):
    pos = 0
    text = text.rstrip()
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character at {pos} in {text!r}")
        num, name, caret, star, sign = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("var", name))
        elif caret:
            out.append(("^", caret))
        elif star:
            out.append(("*", star))
        else:
            out.append(("sign", sign))
        pos = m.end()
    return out


def parse_polynomial(text: str, ring):
    toks = _tokens(text)
    if not toks:
        raise PolynomialSyntaxError("empty polynomial")
    n = ring.ngens
    terms: dict = {}
    i = 0

    def expect_factor():
        nonlocal i
        if i >= len(toks):
            raise PolynomialSyntaxError(f"dangling operator in {text!r}")
        kind, val = toks[i]
        i += 1
        if kind == "num":
            return ("num", Fraction(val))
        if kind == "var":
            try:
                idx = ring.names.index(val)
            except ValueError:
                raise PolynomialSyntaxError(f"unknown variable {val!r} in {text!r}") from None
            e = 1
            if i < len(toks) and toks[i][0] == "^":
                i += 1
                if i >= len(toks) or toks[i][0] != "num" or "/" in toks[i][1]:
                    raise PolynomialSyntaxError(f"bad exponent in {text!r}")
                e = int(toks[i][1])
                i += 1
            return ("var", idx, e)
        raise PolynomialSyntaxError(f"unexpected {val!r} in {text!r}")

    first = True
    while i < len(toks):
        sign = 1
        if toks[i][0] == "sign":
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
        elif not first:
            raise PolynomialSyntaxError(f"missing operator in {text!r}")
        first = False
        coef = Fraction(sign)
        mono = [0] * n
        while True:
            f = expect_factor()
            if f[0] == "num":
                coef *= f[1]
            else:
                mono[f[1]] += f[2]
            if i < len(toks) and toks[i][0] == "*":
                i += 1
                continue
            break
        m = tuple(mono)
        terms[m] = terms.get(m, 0) + coef
    return ring.from_terms(terms)


def format_polynomial(f) -> str:
    """Canonical text: terms descending in the ring order, unit coefficients
    omitted, rationals in lowest terms."""
    if not f.terms:
        return "0"
    F = f.ring.field
    names = f.ring.names
    p = F.p
    parts = []
    for m, c in f.sorted_terms():
        if p:
            c = int(c)
            neg = False
            s = str(c)
        else:
            neg = c < 0
            s = F.format(-c if neg else c)
        factors = []
        for name, e in zip(names, m):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        if factors:
            body = "*".join(factors if s == "1" else [s] + factors)
        else:
            body = s
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("-" if neg else "+") + body)
    return "".join(parts)
