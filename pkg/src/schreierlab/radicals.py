"""Exact scalars of the form r**(1/2**level) with rational r.

Certificate thresholds occasionally take an iterated square root of a
rational parameter (restriction halves the exponent each time).  Rather
than approximate, we keep the radicand and the root level and decide every
comparison by raising the rational side to the matching power.  All
comparisons against non-negative rationals are therefore exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None."""
    x = _as_fraction(x)
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


@dataclass(frozen=True)
class Radical:
    """The positive real radicand ** (1 / 2**level).

    level == 0 is a plain rational.  The radicand must be positive; the
    represented value is always positive.
    """

    radicand: Fraction
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "radicand", _as_fraction(self.radicand))
        if self.radicand <= 0:
            raise ValueError("radicand must be positive")
        if self.level < 0:
            raise ValueError("level must be >= 0")
        # canonicalise: pull out exact square roots while possible
        rad, lvl = self.radicand, self.level
        while lvl > 0:
            root = rational_sqrt(rad)
            if root is None:
                break
            rad, lvl = root, lvl - 1
        object.__setattr__(self, "radicand", rad)
        object.__setattr__(self, "level", lvl)

    @classmethod
    def of(cls, x) -> "Radical":
        if isinstance(x, Radical):
            return x
        return cls(_as_fraction(x), 0)

    @property
    def is_rational(self) -> bool:
        return self.level == 0

    def as_fraction(self) -> Fraction:
        if self.level != 0:
            raise ValueError(f"{self} is irrational")
        return self.radicand

    def sqrt(self) -> "Radical":
        return Radical(self.radicand, self.level + 1)

    def squared(self) -> "Radical":
        if self.level == 0:
            return Radical(self.radicand * self.radicand, 0)
        return Radical(self.radicand, self.level - 1)

    # ordering against rationals and other radicals, all exact

    def _pow2(self, x: Fraction, k: int) -> Fraction:
        return x ** (2**k)

    def cmp_fraction(self, x) -> int:
        """Sign of (self - x) for rational x."""
        x = _as_fraction(x)
        if x < 0:
            return 1
        lhs, rhs = self.radicand, self._pow2(x, self.level)
        return (lhs > rhs) - (lhs < rhs)

    def cmp(self, other: "Radical") -> int:
        other = Radical.of(other)
        k = max(self.level, other.level)
        lhs = self._pow2(self.radicand, k - self.level)
        rhs = self._pow2(other.radicand, k - other.level)
        return (lhs > rhs) - (lhs < rhs)

    def __lt__(self, other):
        return self._compare(other) < 0

    def __le__(self, other):
        return self._compare(other) <= 0

    def __gt__(self, other):
        return self._compare(other) > 0

    def __ge__(self, other):
        return self._compare(other) >= 0

    def _compare(self, other) -> int:
        if isinstance(other, Radical):
            return self.cmp(other)
        return self.cmp_fraction(other)

    def __eq__(self, other):
        if isinstance(other, Radical):
            return self.radicand == other.radicand and self.level == other.level
        if isinstance(other, (int, Fraction)):
            return self.level == 0 and self.radicand == other
        return NotImplemented

    def __hash__(self):
        return hash((self.radicand, self.level))

    def __str__(self):
        s = str(self.radicand)
        for _ in range(self.level):
            s = f"sqrt({s})"
        return s

    __repr__ = __str__


def le_scaled(value: Fraction, eps: Radical, scale: Fraction) -> bool:
    """Exact test of value <= (1 + eps) * scale for scale >= 0."""
    value = _as_fraction(value)
    scale = _as_fraction(scale)
    if scale < 0:
        raise ValueError("scale must be non-negative")
    if value <= scale:
        return True
    # value - scale > 0; compare against eps * scale
    if scale == 0:
        return False
    return eps.cmp_fraction(Fraction(value - scale, scale)) >= 0


def lt_scaled(value: Fraction, eps: Radical, scale: Fraction) -> bool:
    """Exact test of value < (1 + eps) * scale for scale >= 0."""
    value = _as_fraction(value)
    scale = _as_fraction(scale)
    if scale < 0:
        raise ValueError("scale must be non-negative")
    if value < scale:
        return True
    if scale == 0:
        return False
    return eps.cmp_fraction(Fraction(value - scale, scale)) > 0
