"""Exact angular-momentum coupling coefficients.

Wigner 3j / 6j symbols and Clebsch-Gordan coefficients evaluated through the
Racah factorial-sum formulas with exact integer/rational intermediates.  The
result of every symbol is sign * S * sqrt(R) with S, R exact `Fraction`s, so
symmetry-related symbols convert to bit-identical floats.  That exactness is
what lets downstream sign-sensitive identities (the closed-loop ratio of
dipole couplings) come out as exact +-1 instead of "within tolerance".

Selection-rule failures (projection sum, triangle rules) return 0.0; malformed
(j, m) pairs raise, because they indicate a caller bug rather than a physics
zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = ["HalfInt", "wigner_3j", "clebsch_gordan", "wigner_6j"]


@dataclass(frozen=True, order=True)
class HalfInt:
    """Angular momentum or projection stored as twice its value (exact)."""

    twice: int

    @staticmethod
    def of(value) -> "HalfInt":
        """Coerce an int, float, Fraction or HalfInt into a HalfInt."""
        if isinstance(value, HalfInt):
            return value
        doubled = 2 * Fraction(value)
        if doubled.denominator != 1:
            raise ValueError(f"{value!r} is not integer or half-integer")
        return HalfInt(int(doubled))

    def __float__(self) -> float:
        return self.twice / 2.0

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def _twice(value) -> int:
    return HalfInt.of(value).twice


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    if n < 0:
        raise ValueError("factorial of negative integer")
    return math.factorial(n)


def _check_momentum(tj: int, name: str = "j") -> None:
    if tj < 0:
        raise ValueError(f"momentum {name} = {tj / 2} must be nonnegative")


def _check_pair(tj: int, tm: int) -> None:
    """A (j, m) pair is valid when |m| <= j and j - m is an integer."""
    _check_momentum(tj)
    if abs(tm) > tj or (tj - tm) % 2 != 0:
        raise ValueError(f"invalid (j, m) pair ({tj / 2}, {tm / 2})")


def _triangle_ok(ta: int, tb: int, tc: int) -> bool:
    return (
        abs(ta - tb) <= tc <= ta + tb
        and (ta + tb + tc) % 2 == 0
    )


def _triangle_coeff(ta: int, tb: int, tc: int) -> Fraction:
    """Delta(abc) as an exact rational; caller guarantees the triangle rule."""
    return Fraction(
        _fact((ta + tb - tc) // 2)
        * _fact((ta - tb + tc) // 2)
        * _fact((-ta + tb + tc) // 2),
        _fact((ta + tb + tc) // 2 + 1),
    )


def _three_j_parts(tj1, tj2, tj3, tm1, tm2, tm3):
    """Racah decomposition of a 3j symbol: (sign, sum S, radicand R).

    The symbol equals sign * S * sqrt(R); S and R are exact Fractions.
    Returns None when a selection rule makes the symbol zero.
    """
    if tm1 + tm2 + tm3 != 0:
        return None
    if not _triangle_ok(tj1, tj2, tj3):
        return None

    radicand = _triangle_coeff(tj1, tj2, tj3)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        radicand *= _fact((tj + tm) // 2) * _fact((tj - tm) // 2)

    t_min = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    t_max = min(
        (tj1 + tj2 - tj3) // 2,
        (tj1 - tm1) // 2,
        (tj2 + tm2) // 2,
    )
    total = Fraction(0)
    for t in range(t_min, t_max + 1):
        denom = (
            _fact(t)
            * _fact((tj3 - tj2 + tm1) // 2 + t)
            * _fact((tj3 - tj1 - tm2) // 2 + t)
            * _fact((tj1 + tj2 - tj3) // 2 - t)
            * _fact((tj1 - tm1) // 2 - t)
            * _fact((tj2 + tm2) // 2 - t)
        )
        total += Fraction(-1 if t % 2 else 1, denom)
    sign = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    return sign, total, radicand


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol; 0.0 on selection-rule failure."""
    tj1, tj2, tj3 = _twice(j1), _twice(j2), _twice(j3)
    tm1, tm2, tm3 = _twice(m1), _twice(m2), _twice(m3)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        _check_pair(tj, tm)
    parts = _three_j_parts(tj1, tj2, tj3, tm1, tm2, tm3)
    if parts is None:
        return 0.0
    sign, total, radicand = parts
    return sign * float(total) * math.sqrt(float(radicand))


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """<j1 m1; j2 m2 | J M> in the Condon-Shortley phase convention."""
    tj1, tm1 = _twice(j1), _twice(m1)
    tj2, tm2 = _twice(j2), _twice(m2)
    tJ, tM = _twice(J), _twice(M)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tJ, tM)):
        _check_pair(tj, tm)
    if tm1 + tm2 != tM:
        return 0.0
    parts = _three_j_parts(tj1, tj2, tJ, tm1, tm2, -tM)
    if parts is None:
        return 0.0
    sign, total, radicand = parts
    # (-1)^(j1 - j2 + M) sqrt(2J + 1), folded into the exact radicand
    if ((tj1 - tj2 + tM) // 2) % 2:
        sign = -sign
    return sign * float(total) * math.sqrt(float(radicand * (tJ + 1)))


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}; 0.0 when a triad fails."""
    tj = tuple(_twice(j) for j in (j1, j2, j3, j4, j5, j6))
    for k, t in enumerate(tj):
        _check_momentum(t, f"j{k + 1}")
    a, b, c, d, e, f = tj
    triads = ((a, b, c), (a, e, f), (d, b, f), (d, e, c))
    if not all(_triangle_ok(*tr) for tr in triads):
        return 0.0

    radicand = Fraction(1)
    for tr in triads:
        radicand *= _triangle_coeff(*tr)

    t_min = max((x + y + z) // 2 for x, y, z in triads)
    quads = (
        (a + b + d + e) // 2,
        (b + c + e + f) // 2,
        (a + c + d + f) // 2,
    )
    t_max = min(quads)
    total = Fraction(0)
    for t in range(t_min, t_max + 1):
        denom = _fact(quads[0] - t) * _fact(quads[1] - t) * _fact(quads[2] - t)
        for tr in triads:
            denom *= _fact(t - sum(tr) // 2)
        total += Fraction((-1 if t % 2 else 1) * _fact(t + 1), denom)
    return float(total) * math.sqrt(float(radicand))
