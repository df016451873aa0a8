"""Exact real quadratic irrationals ``(a + b*sqrt(D)) / c``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class RealQuadratic:
    """The real number ``(a + b*sqrt(D)) / c`` with ``D > 0`` not a square and ``c > 0``."""

    a: int
    b: int
    c: int
    D: int

    def __post_init__(self):
        if self.c == 0:
            raise ZeroDivisionError("denominator c must be nonzero")
        if self.D <= 0 or _is_square(self.D):
            raise ValueError(f"D = {self.D} must be a positive non-square")
        if self.c < 0:
            object.__setattr__(self, "a", -self.a)
            object.__setattr__(self, "b", -self.b)
            object.__setattr__(self, "c", -self.c)
        g = math.gcd(math.gcd(self.a, self.b), self.c)
        if g > 1:
            object.__setattr__(self, "a", self.a // g)
            object.__setattr__(self, "b", self.b // g)
            object.__setattr__(self, "c", self.c // g)

    @classmethod
    def golden_ratio(cls) -> "RealQuadratic":
        return cls(1, 1, 2, 5)

    @classmethod
    def sqrt(cls, D: int) -> "RealQuadratic":
        return cls(0, 1, 1, D)

    def __float__(self) -> float:
        return (self.a + self.b * math.sqrt(self.D)) / self.c

    def _floor_num(self, t: Fraction) -> int:
        """floor(self + t) without floating point."""
        # value = (a + b sqrt D)/c + t ; write as (A + b sqrt D) / C with integers
        t = Fraction(t)
        A = self.a * t.denominator + t.numerator * self.c
        C = self.c * t.denominator
        B = self.b * t.denominator
        # floor((A + B sqrt D) / C), C > 0
        if B >= 0:
            s = math.isqrt(B * B * self.D)  # floor(B sqrt D)
            return (A + s) // C
        s = math.isqrt(B * B * self.D)  # B sqrt D = -(s + frac), frac in (0,1)
        return (A - s - 1) // C

    def floor(self) -> int:
        return self._floor_num(Fraction(0))

    def scale(self, n: int | Fraction) -> "RealQuadratic":
        n = Fraction(n)
        return RealQuadratic(self.a * n.numerator, self.b * n.numerator, self.c * n.denominator, self.D)

    def shift(self, t: int | Fraction) -> "RealQuadratic":
        t = Fraction(t)
        return RealQuadratic(self.a * t.denominator + t.numerator * self.c, self.b * t.denominator,
                             self.c * t.denominator, self.D)

    def floor_affine(self, n: int, t: Fraction | int = 0) -> int:
        """Exact ``floor(n*self + t)``."""
        return self.scale(n)._floor_num(Fraction(t))

    def sign_minus(self, t: Fraction) -> int:
        """Sign of ``self - t`` (never zero since self is irrational)."""
        # (a - c t) + b sqrt D compared with 0
        t = Fraction(t)
        A = self.a * t.denominator - self.c * t.numerator
        B = self.b * t.denominator
        if A >= 0 and B >= 0:
            return 1
        if A <= 0 and B <= 0:
            return -1
        lhs = B * B * self.D
        rhs = A * A
        if B > 0:
            return 1 if lhs > rhs else -1
        return -1 if lhs > rhs else 1

    def __lt__(self, t) -> bool:
        return self.sign_minus(Fraction(t)) < 0

    def __gt__(self, t) -> bool:
        return self.sign_minus(Fraction(t)) > 0

    def nearest_int_distance_bracket(self, q: int) -> tuple[int, int]:
        """``(t, s)`` where ``t`` is the integer nearest to ``q*x`` and ``s`` the sign of ``q*x - t``."""
        y = self.scale(q)
        f = y.floor()
        # compare fractional part against 1/2
        if y.sign_minus(Fraction(2 * f + 1, 2)) < 0:
            return f, 1
        return f + 1, -1

    def distance_to_int(self, q: int) -> "RealQuadratic":
        """``||q*x||`` as an exact quadratic irrational."""
        t, s = self.nearest_int_distance_bracket(q)
        y = self.scale(q).shift(-t)
        return y if s > 0 else y.scale(-1)

    def continued_fraction(self, n: int) -> list[int]:
        """First ``n`` partial quotients ``[a0; a1, a2, ...]``."""
        return list(_cf_terms(self, n))

    def reciprocal(self) -> "RealQuadratic":
        # c / (a + b sqrt D) = c (a - b sqrt D) / (a^2 - b^2 D)
        den = self.a * self.a - self.b * self.b * self.D
        return RealQuadratic(self.c * self.a, -self.c * self.b, den, self.D)

    def exact_product_bound(self, q: int, bound: Fraction) -> bool:
        """Whether ``||q*x|| <= bound`` holds exactly."""
        d = self.distance_to_int(q)
        return d.sign_minus(Fraction(bound)) <= 0

    def __str__(self) -> str:
        return f"({self.a} + {self.b}*sqrt({self.D}))/{self.c}"


@lru_cache(maxsize=1024)
def _cf_terms(x: RealQuadratic, n: int) -> tuple[int, ...]:
    out = []
    y = x
    for _ in range(n):
        f = y.floor()
        out.append(f)
        y = y.shift(-f).reciprocal()
    return tuple(out)
