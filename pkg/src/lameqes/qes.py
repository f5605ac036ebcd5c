"""Residue bookkeeping and quasi-exact solvability conditions.

The logarithmic derivative of a band-edge state, written in ``t = sn(x)``,
has fixed poles at ``t = +-1`` and ``t = +-1/sqrt(m)``.  Each pole admits two
residues, giving four residue sets.  Matching the large-``t`` behaviour of the
pole sum against the ``lambda1 = a + 1`` branch fixes the degree ``n`` of the
polynomial factor of the wave function

    psi(x) = cn(x)**alpha * dn(x)**beta * P_n(sn(x)).

All of this is integer/rational arithmetic and is done with
:class:`fractions.Fraction` throughout.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import NamedTuple

from .elliptic import check_modulus

__all__ = [
    "MixedParityError",
    "ParameterError",
    "PotentialParams",
    "ResidueSet",
    "SetSurvey",
    "SolvabilityRecord",
    "TableMismatchWarning",
    "classify_period",
    "degree",
    "lambda1_branches",
    "parse_rational",
    "qes_condition",
    "residue_sets",
    "solvability_records",
    "survey_sets",
]

QUARTER = Fraction(1, 4)
THREE_QUARTERS = Fraction(3, 4)


class ParameterError(ValueError):
    """Potential parameters outside the supported domain."""


class MixedParityError(ParameterError):
    """One of ``a``, ``b`` is an integer and the other a half-integer."""


class TableMismatchWarning(UserWarning):
    """Solution count from the wave-function tables disagrees with the degree."""


def parse_rational(value) -> Fraction:
    """Exact rational from ``int``, ``Fraction`` or a string like ``"7/2"``.

    Floats and decimal strings are refused so that half-integers stay exact.
    """
    if isinstance(value, bool):
        raise ParameterError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ParameterError(f"decimal literals are not accepted, use p/q: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse rational {value!r}") from exc
    raise ParameterError(f"expected an int, Fraction or 'p/q' string, got {type(value).__name__}")


def _is_integer(q: Fraction) -> bool:
    return q.denominator == 1


@dataclass(frozen=True)
class PotentialParams:
    """Parameters of ``V(x) = a(a+1) m sn^2 + b(b+1) m cn^2/dn^2 + shift``."""

    a: Fraction
    b: Fraction
    m: float
    shift: float = 0.0

    def __post_init__(self):
        a = parse_rational(self.a)
        b = parse_rational(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        try:
            object.__setattr__(self, "m", check_modulus(self.m))
        except ValueError as exc:
            raise ParameterError(str(exc)) from None
        object.__setattr__(self, "shift", float(self.shift))
        if not (2 * a).denominator == 1 or not (2 * b).denominator == 1:
            raise ParameterError(f"a and b must be integers or half-integers, got a={a}, b={b}")
        if _is_integer(a) != _is_integer(b):
            raise MixedParityError("mixed integer/half-integer case unsupported")
        if not a > b > 0:
            raise ParameterError(f"need a > b > 0, got a={a}, b={b}")

    @property
    def integer_case(self) -> bool:
        return _is_integer(self.a)


class ResidueSet(NamedTuple):
    set_id: int
    b1: Fraction
    d1: Fraction


@dataclass(frozen=True)
class SolvabilityRecord:
    residue_set: ResidueSet
    n: int
    lambda1: Fraction
    alpha: Fraction
    beta: Fraction
    poly_parity: str
    period_class: str
    li_count: int

    @property
    def set_id(self) -> int:
        return self.residue_set.set_id

    @property
    def b1(self) -> Fraction:
        return self.residue_set.b1

    @property
    def d1(self) -> Fraction:
        return self.residue_set.d1

    @property
    def dimension(self) -> int:
        return self.n // 2 + 1


class SetSurvey(NamedTuple):
    """Degree of one residue set before admissibility filtering."""

    residue_set: ResidueSet
    n: Fraction
    admissible: bool


def lambda1_branches(a) -> tuple[Fraction, Fraction]:
    """Both large-``t`` coefficients ``(a + 1, -a)``.

    Only the first generates states; the second is the same condition
    for the relabelled parameters ``a -> -a - 1``.
    """
    a = parse_rational(a)
    return a + 1, -a


def residue_sets(b) -> list[ResidueSet]:
    """The four ``(b1, d1)`` pairs, in table order.

    ``b`` only has to be an integer or half-integer here, so the relabelled
    value ``-b - 1`` is accepted as well.
    """
    b = parse_rational(b)
    if (2 * b).denominator != 1:
        raise ParameterError(f"b must be an integer or half-integer, got {b}")
    d_hi = THREE_QUARTERS + b / 2
    d_lo = QUARTER - b / 2
    return [
        ResidueSet(1, THREE_QUARTERS, d_hi),
        ResidueSet(2, THREE_QUARTERS, d_lo),
        ResidueSet(3, QUARTER, d_hi),
        ResidueSet(4, QUARTER, d_lo),
    ]


def degree(a, rs: ResidueSet) -> Fraction:
    """``n = a + 1 - 2 b1 - 2 d1`` (may be negative or fractional)."""
    lam, _ = lambda1_branches(a)
    return lam - 2 * rs.b1 - 2 * rs.d1


def qes_condition(set_id: int, a, b, n) -> bool:
    """Check the closed-form solvability condition of one residue set."""
    a, b, n = Fraction(a), Fraction(b), Fraction(n)
    if set_id == 1:
        return b - a == -n - 2
    if set_id == 2:
        return a + b + 1 == n + 2
    if set_id == 3:
        return b - a == -n - 1
    if set_id == 4:
        return a + b == n
    raise ValueError(f"set_id must be 1..4, got {set_id}")


def survey_sets(p: PotentialParams) -> list[SetSurvey]:
    """Degree of every residue set, including the inadmissible ones."""
    out = []
    for rs in residue_sets(p.b):
        n = degree(p.a, rs)
        out.append(SetSurvey(rs, n, _is_integer(n) and n >= 0))
    return out


def _table_li_count(set_id: int, a: Fraction, b: Fraction) -> int:
    # Sets 1 and 3 have n fixed by a - b, sets 2 and 4 by a + b.  An even
    # combination uses the 2N / 2M table, an odd one the 2N'+1 / 2M'+1 table.
    combo = a - b if set_id in (1, 3) else a + b
    if combo.denominator != 1:
        raise MixedParityError("mixed integer/half-integer case unsupported")
    combo = int(combo)
    if combo % 2 == 0:
        half = combo // 2  # M or N
        return {1: half, 2: half, 3: half, 4: half + 1}[set_id]
    half = (combo - 1) // 2  # M' or N'
    return {1: half, 2: half + 1, 3: half + 1, 4: half + 1}[set_id]


def classify_period(r: SolvabilityRecord) -> str:
    """``"2K"`` if the state is periodic over ``2K``, ``"4K"`` if antiperiodic.

    Under ``x -> x + 2K`` both ``sn`` and ``cn`` flip sign while ``dn`` is
    unchanged, so ``psi`` picks up ``(-1)**(alpha + n)`` for a polynomial of
    definite parity ``n mod 2``.
    """
    return "2K" if (int(r.alpha) + r.n) % 2 == 0 else "4K"


def solvability_records(p: PotentialParams) -> list[SolvabilityRecord]:
    """Structural description of every admissible residue set for ``p``."""
    if _is_integer(p.a) != _is_integer(p.b):
        raise MixedParityError("mixed integer/half-integer case unsupported")
    lam, _ = lambda1_branches(p.a)
    records = []
    for rs, n, ok in survey_sets(p):
        if not ok:
            continue
        n = int(n)
        alpha = (4 * rs.b1 - 1) / 2
        beta = (4 * rs.d1 - 1) / 2
        li = _table_li_count(rs.set_id, p.a, p.b)
        if li != n // 2 + 1:
            warnings.warn(
                f"set {rs.set_id}: table count {li} != floor(n/2)+1 = {n // 2 + 1} "
                f"for a={p.a}, b={p.b}",
                TableMismatchWarning,
                stacklevel=2,
            )
        rec = SolvabilityRecord(
            residue_set=rs,
            n=n,
            lambda1=lam,
            alpha=alpha,
            beta=beta,
            poly_parity="even" if n % 2 == 0 else "odd",
            period_class="",
            li_count=li,
        )
        records.append(replace(rec, period_class=classify_period(rec)))
    return records
