"""Tiny exact polynomial arithmetic in two variables ``(t, m)``.

A polynomial is a ``dict`` mapping ``(power_of_t, power_of_m)`` to a
non-zero :class:`~fractions.Fraction`.  Only what the pencil derivation
needs is implemented.
"""
from __future__ import annotations

from fractions import Fraction

Poly = dict  # {(i, j): Fraction}


def poly(terms) -> Poly:
    out: Poly = {}
    for (i, j), c in terms:
        c = Fraction(c)
        if c:
            out[(i, j)] = out.get((i, j), Fraction(0)) + c
            if not out[(i, j)]:
                del out[(i, j)]
    return out


def add(*ps: Poly) -> Poly:
    out: Poly = {}
    for p in ps:
        for k, c in p.items():
            v = out.get(k, Fraction(0)) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def scale(p: Poly, c) -> Poly:
    c = Fraction(c)
    if not c:
        return {}
    return {k: v * c for k, v in p.items()}


def neg(p: Poly) -> Poly:
    return {k: -v for k, v in p.items()}


def mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            k = (i1 + i2, j1 + j2)
            v = out.get(k, Fraction(0)) + c1 * c2
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def dt(p: Poly) -> Poly:
    """Derivative with respect to ``t``."""
    return {(i - 1, j): c * i for (i, j), c in p.items() if i > 0}


def t_degree(p: Poly) -> int:
    return max((i for i, _ in p), default=-1)


def coeff_t(p: Poly, i: int) -> dict:
    """Coefficient of ``t**i`` as a polynomial in ``m`` (``{j: Fraction}``)."""
    return {j: c for (ii, j), c in p.items() if ii == i}


def divide_unit_constant(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Divide by ``den`` in increasing powers of ``t``.

    ``den`` must have constant term exactly 1 (no ``m`` dependence), which
    makes the division possible over ``Q[m]``.  Returns ``(quotient,
    remainder)``; the remainder is empty iff the division is exact.
    """
    if coeff_t(den, 0) != {0: Fraction(1)}:
        raise ValueError("divisor must have unit constant term")
    rem = dict(num)
    quot: Poly = {}
    top = t_degree(num) - t_degree(den)
    for i in range(top + 1):
        ci = coeff_t(rem, i)
        if not ci:
            continue
        term = {(i, j): c for j, c in ci.items()}
        quot = add(quot, term)
        rem = add(rem, neg(mul(term, den)))
    return quot, rem


def eval_m(cm: dict, m: float) -> float:
    """Evaluate a polynomial in ``m`` given as ``{power: Fraction}``."""
    return sum(float(c) * m**j for j, c in cm.items())
