"""Unit complex phases stored as exact rational turns.

A phase is exp(2*pi*i*t) with t kept as a Fraction whenever possible, so
products, conjugates and rational powers stay exact until a complex value
is requested.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Integral


def as_rational(value: object) -> Fraction:
    """Parse an exact rational from an int, Fraction or a "p/q" string.

    Floats are rejected on purpose: callers that only hold an approximate
    angle must say so by building an inexact Phase directly.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational from {value!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def rational_str(value: Fraction) -> str:
    """Render a Fraction as "p/q" (or "p" when integral)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Phase:
    """The unit complex number exp(2*pi*i*turns).

    ``turns`` is a Fraction reduced mod 1 when the phase is exact, else a
    float.  Arithmetic keeps exactness as long as both operands are exact.
    """

    __slots__ = ("turns", "exact")

    def __init__(self, turns: object, exact: bool | None = None):
        if exact is None:
            exact = not isinstance(turns, float)
        if exact:
            self.turns = as_rational(turns) % 1
        else:
            self.turns = float(turns) % 1.0
        self.exact = bool(exact)

    @classmethod
    def one(cls) -> "Phase":
        return cls(0)

    @classmethod
    def from_angle(cls, radians: float) -> "Phase":
        """Inexact phase from an angle in radians."""
        return cls(radians / (2.0 * cmath.pi), exact=False)

    @property
    def value(self) -> complex:
        return cmath.exp(2j * cmath.pi * float(self.turns))

    def __mul__(self, other: "Phase") -> "Phase":
        if not isinstance(other, Phase):
            return NotImplemented
        if self.exact and other.exact:
            return Phase(self.turns + other.turns)
        return Phase(float(self.turns) + float(other.turns), exact=False)

    def conjugate(self) -> "Phase":
        if self.exact:
            return Phase(-self.turns)
        return Phase(-float(self.turns), exact=False)

    def __pow__(self, exponent: int) -> "Phase":
        if not isinstance(exponent, Integral):
            return NotImplemented
        if self.exact:
            return Phase(self.turns * int(exponent))
        return Phase(float(self.turns) * int(exponent), exact=False)

    def scaled(self, s: object) -> "Phase":
        """Phase with turns multiplied by an exact rational s."""
        s = as_rational(s)
        if not self.exact:
            raise ValueError("rational scaling needs an exact phase")
        return Phase(self.turns * s)

    @property
    def is_one(self) -> bool:
        if self.exact:
            return self.turns == 0
        return min(self.turns, 1.0 - self.turns) < 1e-12

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Phase):
            return NotImplemented
        if self.exact and other.exact:
            return self.turns == other.turns
        return abs(self.value - other.value) < 1e-12

    def __hash__(self) -> int:
        if self.exact:
            return hash(("Phase", self.turns))
        return hash(("Phase~", round(float(self.turns), 9)))

    def approx_equal(self, other: "Phase", tol: float = 1e-12) -> bool:
        return abs(self.value - other.value) <= tol

    def __repr__(self) -> str:
        if self.exact:
            return f"Phase({rational_str(self.turns)})"
        return f"Phase({float(self.turns):.12g}, exact=False)"
