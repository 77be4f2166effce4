"""Exact rationals and residues in Q/Z and Q/2Z."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, isqrt

from .errors import NotInvertible, ZeroInput

Rational = Fraction


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-4/3"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class Residue:
    """A class in Q/Z (modulus 1) or Q/2Z (modulus 2), stored in [0, modulus)."""

    value: Fraction
    modulus: int = 1

    def __post_init__(self):
        if self.modulus not in (1, 2):
            raise ValueError(f"modulus must be 1 or 2, got {self.modulus}")
        v = as_rational(self.value)
        object.__setattr__(self, "value", v - self.modulus * floor(v / self.modulus))

    def __add__(self, other):
        if isinstance(other, Residue):
            self._check(other)
            other = other.value
        return Residue(self.value + as_rational(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Residue):
            self._check(other)
            other = other.value
        return Residue(self.value - as_rational(other), self.modulus)

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __mul__(self, k):
        if not isinstance(k, int) or isinstance(k, bool):
            return NotImplemented
        return Residue(self.value * k, self.modulus)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.value == 0

    def reduce(self, modulus: int) -> Residue:
        """Coarsen a Q/2Z class to Q/Z (the other direction is not defined)."""
        if modulus > self.modulus:
            raise ValueError("cannot refine a residue to a larger modulus")
        return Residue(self.value, modulus)

    def _check(self, other: Residue):
        if other.modulus != self.modulus:
            raise ValueError("residues with different moduli")

    def __str__(self):
        return format_rational(self.value)


def normalize_mod(q, modulus: int) -> Residue:
    return Residue(as_rational(q), modulus)


def mod_inverse(a: int, m: int) -> int:
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 0
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NotInvertible(f"{a} is not invertible modulo {m}") from None


def padic_valuation(a: int, p: int) -> int:
    if a == 0:
        raise ZeroInput("the valuation of 0 is infinite")
    a = abs(a)
    e = 0
    while a % p == 0:
        a //= p
        e += 1
    return e


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division; desk-scale inputs only."""
    n = abs(n)
    if n == 0:
        raise ZeroInput("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
