"""Fixed-precision p-adic numbers, their quadratic extensions and exact norms.

A :class:`PAdic` stores ``unit * p**valuation`` together with the number of
relative digits that are actually known.  Every arithmetic operation tracks
the absolute precision of its result, so cancellation never produces
spurious digits.  A value whose known digits all vanish becomes an *inexact
zero* ``O(p^N)``; asking for its norm raises :class:`PrecisionError`.

Absolute values are never floats: :class:`ExtVal` keeps the exponent of ``p``
(integer or half-integer) and :class:`Magnitude` keeps ``c * p**e`` with a
rational coefficient ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when a quantity cannot be resolved at the available precision.

    ``bound`` is an :class:`ExtVal` upper bound for the unresolved absolute
    value when one is known.
    """

    def __init__(self, message: str, bound: "ExtVal | None" = None):
        super().__init__(message)
        self.bound = bound


def vp(n: int, p: int) -> int | float:
    """p-adic valuation of an integer (``INF`` for 0)."""
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(x: Fraction, p: int) -> int | float:
    if x == 0:
        return INF
    return vp(x.numerator, p) - vp(x.denominator, p)


def ilog(n: int, p: int) -> int:
    """Largest e with p**e <= n (n >= 1)."""
    e = 0
    q = p
    while q <= n:
        q *= p
        e += 1
    return e


# --------------------------------------------------------------------------
# exact absolute values


@total_ordering
@dataclass(frozen=True)
class ExtVal:
    """``|x|_p = p**(-numerator/denominator)``; numerator ``INF`` means 0.

    Ordering follows the absolute value, so ``max``/``min`` behave like the
    ultrametric formulas they stand for.
    """

    numerator: int | float
    denominator: int = 1

    def __post_init__(self):
        if self.denominator not in (1, 2):
            raise ValueError("ExtVal denominator must be 1 or 2")
        if self.numerator != INF and self.denominator == 2 and self.numerator % 2 == 0:
            object.__setattr__(self, "numerator", self.numerator // 2)
            object.__setattr__(self, "denominator", 1)
        if self.numerator == INF:
            object.__setattr__(self, "denominator", 1)

    @classmethod
    def from_exponent(cls, e: Fraction | int | float) -> "ExtVal":
        """From the valuation ``e`` (so that ``|x| = p**-e``)."""
        if e == INF:
            return cls(INF)
        e = Fraction(e)
        if e.denominator == 1:
            return cls(int(e))
        if e.denominator != 2:
            raise ValueError(f"valuation {e} is not a half-integer")
        return cls(e.numerator, 2)

    ZERO_EXPONENT = None  # placeholder so attribute lookups stay simple

    @property
    def exponent(self) -> Fraction | float:
        """The valuation v with ``|x| = p**-v``."""
        if self.numerator == INF:
            return INF
        return Fraction(self.numerator, self.denominator)

    @property
    def is_zero(self) -> bool:
        return self.numerator == INF

    def __lt__(self, other: "ExtVal") -> bool:
        if not isinstance(other, ExtVal):
            return NotImplemented
        return self.exponent > other.exponent

    def __mul__(self, other: "ExtVal") -> "ExtVal":
        if self.is_zero or other.is_zero:
            return ExtVal(INF)
        return ExtVal.from_exponent(self.exponent + other.exponent)

    def __truediv__(self, other: "ExtVal") -> "ExtVal":
        if other.is_zero:
            raise ZeroDivisionError("division by |0|")
        if self.is_zero:
            return self
        return ExtVal.from_exponent(self.exponent - other.exponent)

    def __pow__(self, n: int) -> "ExtVal":
        if self.is_zero:
            return self if n > 0 else ExtVal(0)
        return ExtVal.from_exponent(self.exponent * n)

    def as_fraction(self, p: int) -> Fraction:
        """Exact value; only defined for integral exponents."""
        if self.is_zero:
            return Fraction(0)
        if self.denominator != 1:
            raise ValueError("half-integral absolute value is irrational")
        return Fraction(p) ** (-self.numerator)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        e = -self.exponent
        if e == 0:
            return "1"
        if e.denominator == 1:
            return f"p^{e.numerator}"
        return f"p^{e.numerator}/{e.denominator}"


ONE = ExtVal(0)


@total_ordering
@dataclass(frozen=True)
class Magnitude:
    """Exact positive quantity ``coeff * prime**exponent`` with exponent in Z/2."""

    prime: int
    coeff: Fraction
    exponent: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        e = Fraction(self.exponent)
        if e.denominator not in (1, 2):
            raise ValueError("Magnitude exponent must be a half-integer")
        if self.coeff < 0:
            raise ValueError("Magnitude is a non-negative quantity")
        # fold the integral part of the exponent into the coefficient
        if self.coeff == 0:
            e = Fraction(0)
        elif e.denominator == 1:
            object.__setattr__(self, "coeff", self.coeff * Fraction(self.prime) ** int(e))
            e = Fraction(0)
        else:
            whole = (e.numerator - 1) // 2
            object.__setattr__(self, "coeff", self.coeff * Fraction(self.prime) ** whole)
            e = Fraction(1, 2)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def of(cls, p: int, value: ExtVal | Fraction | int) -> "Magnitude":
        if isinstance(value, ExtVal):
            if value.is_zero:
                return cls(p, Fraction(0))
            return cls(p, Fraction(1), -value.exponent)
        return cls(p, Fraction(value))

    def _check(self, other: "Magnitude") -> "Magnitude":
        if isinstance(other, (int, Fraction, ExtVal)):
            other = Magnitude.of(self.prime, other)
        if other.prime != self.prime:
            raise ValueError("mixed primes")
        return other

    def __mul__(self, other) -> "Magnitude":
        other = self._check(other)
        return Magnitude(self.prime, self.coeff * other.coeff, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Magnitude":
        other = self._check(other)
        if other.coeff == 0:
            raise ZeroDivisionError
        return Magnitude(self.prime, self.coeff / other.coeff, self.exponent - other.exponent)

    def __pow__(self, n: int) -> "Magnitude":
        return Magnitude(self.prime, self.coeff**n, self.exponent * n)

    def squared(self) -> Fraction:
        """The exact rational value of ``self**2``."""
        return self.coeff**2 * Fraction(self.prime) ** int(2 * self.exponent)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Magnitude):
            try:
                other = self._check(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.prime == other.prime and self.coeff == other.coeff and self.exponent == other.exponent

    def __hash__(self) -> int:
        return hash((self.prime, self.coeff, self.exponent))

    def __lt__(self, other) -> bool:
        other = self._check(other)
        return self.squared() < other.squared()

    def floor(self) -> int:
        """Exact floor of the (possibly irrational) value."""
        if self.exponent == 0:
            return math.floor(self.coeff)
        # coeff * sqrt(p): floor(sqrt(n^2 p) / d)
        n, d = self.coeff.numerator, self.coeff.denominator
        return math.isqrt(n * n * self.prime) // d

    def __float__(self) -> float:
        return float(self.coeff) * self.prime ** float(self.exponent)

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.coeff)
        return f"{self.coeff}*p^1/2"


# --------------------------------------------------------------------------
# Q_p


def _coerce_int_like(value, like: "PAdic") -> "PAdic":
    if isinstance(value, PAdic):
        return value
    if isinstance(value, int):
        p = like.prime
        if value == 0:
            return PAdic.zero(p)
        v = vp(value, p)
        target = like.abs_precision
        prec = max(like.precision, 1) if target == INF else max(int(target - v), 1)
        mod = p**prec
        return PAdic(p, prec, v, (value // p**v) % mod)
    if isinstance(value, Fraction):
        value = Fraction(value)
        v = vp_fraction(value, like.prime)
        if v == INF:
            return PAdic.zero(like.prime)
        target = like.abs_precision
        if target == INF:
            prec = max(like.precision, 1)
        else:
            prec = max(int(target - v), 1)
        return PAdic.from_rational(value, like.prime, prec)
    return NotImplemented


@dataclass(frozen=True)
class PAdic:
    """An element ``unit * p**valuation + O(p**(valuation + precision))``.

    ``valuation == INF`` encodes the exact zero.  ``precision == 0`` (with
    ``unit == 0``) encodes an inexact zero known only modulo ``p**valuation``.
    """

    prime: int
    precision: int
    valuation: int | float
    unit: int

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "PAdic":
        return cls(p, 0, INF, 0)

    @classmethod
    def inexact_zero(cls, p: int, abs_precision: int) -> "PAdic":
        return cls(p, 0, abs_precision, 0)

    @classmethod
    def from_int(cls, n: int, p: int, k: int) -> "PAdic":
        """``n`` with ``k`` relative digits."""
        if k < 1:
            raise ValueError("precision must be >= 1")
        if n == 0:
            return cls.zero(p)
        v = vp(n, p)
        return cls(p, k, v, (n // p**v) % p**k)

    @classmethod
    def from_rational(cls, x: Fraction | int, p: int, k: int) -> "PAdic":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p)
        vn, vd = vp(x.numerator, p), vp(x.denominator, p)
        num = x.numerator // p**vn
        den = x.denominator // p**vd
        mod = p**k
        return cls(p, k, vn - vd, num * pow(den, -1, mod) % mod)

    @classmethod
    def from_residue(cls, r: int, p: int, abs_precision: int) -> "PAdic":
        """An integer known only modulo ``p**abs_precision``."""
        r %= p**abs_precision
        if r == 0:
            return cls.inexact_zero(p, abs_precision)
        v = vp(r, p)
        k = abs_precision - v
        return cls(p, k, v, (r // p**v) % p**k)

    # -- basic properties -------------------------------------------------

    @property
    def abs_precision(self) -> int | float:
        return self.valuation + self.precision

    @property
    def is_zero(self) -> bool:
        """Exactly zero."""
        return self.valuation == INF

    @property
    def is_inexact_zero(self) -> bool:
        return self.precision == 0 and self.valuation != INF

    def norm(self) -> ExtVal:
        if self.is_zero:
            return ExtVal(INF)
        if self.is_inexact_zero:
            raise PrecisionError(
                f"value indistinguishable from 0 modulo {self.prime}^{self.valuation}",
                ExtVal(self.valuation),
            )
        return ExtVal(self.valuation)

    def norm_bound(self) -> ExtVal:
        """Norm, or its upper bound for an inexact zero."""
        if self.is_inexact_zero:
            return ExtVal(self.valuation)
        return self.norm()

    def lift(self) -> int:
        """Least non-negative integer representative (needs valuation >= 0)."""
        if self.is_zero or self.is_inexact_zero:
            return 0
        if self.valuation < 0:
            raise ValueError("element is not a p-adic integer")
        return self.unit * self.prime**self.valuation

    def residue(self, n: int) -> int:
        """The value modulo ``p**n``; requires ``n`` digits to be known."""
        if self.is_zero:
            return 0
        if self.abs_precision < n:
            raise PrecisionError(f"only {self.abs_precision} digits known, {n} requested")
        return self.lift() % self.prime**n

    def with_precision(self, k: int) -> "PAdic":
        """Truncate to at most ``k`` relative digits."""
        if self.is_zero or self.is_inexact_zero or k >= self.precision:
            return self
        return PAdic(self.prime, k, self.valuation, self.unit % self.prime**k)

    def to_fraction(self) -> Fraction:
        """A rational representative (exact for exact zero)."""
        if self.is_zero or self.is_inexact_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    # -- arithmetic -------------------------------------------------------

    def _same(self, other) -> "PAdic":
        other = _coerce_int_like(other, self)
        if other is NotImplemented:
            return other
        if other.prime != self.prime:
            raise ValueError(f"mixed primes {self.prime} and {other.prime}")
        return other

    def __neg__(self) -> "PAdic":
        if self.precision == 0:
            return self
        return PAdic(self.prime, self.precision, self.valuation, (-self.unit) % self.prime**self.precision)

    def __add__(self, other) -> "PAdic":
        other = self._same(other)
        if other is NotImplemented:
            return other
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.prime
        N = min(self.abs_precision, other.abs_precision)
        v0 = min(self.valuation, other.valuation)
        if N <= v0:
            return PAdic.inexact_zero(p, N)
        mod = p ** (N - v0)
        s = (self.unit * p ** (self.valuation - v0) + other.unit * p ** (other.valuation - v0)) % mod
        if s == 0:
            return PAdic.inexact_zero(p, N)
        e = vp(s, p)
        v = v0 + e
        return PAdic(p, N - v, v, (s // p**e) % p ** (N - v))

    __radd__ = __add__

    def __sub__(self, other) -> "PAdic":
        other = self._same(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "PAdic":
        return (-self) + other

    def __mul__(self, other) -> "PAdic":
        other = self._same(other)
        if other is NotImplemented:
            return other
        p = self.prime
        if self.is_zero or other.is_zero:
            return PAdic.zero(p)
        if self.is_inexact_zero or other.is_inexact_zero:
            return PAdic.inexact_zero(p, self.valuation + other.valuation)
        k = min(self.precision, other.precision)
        return PAdic(p, k, self.valuation + other.valuation, self.unit * other.unit % p**k)

    __rmul__ = __mul__

    def inverse(self) -> "PAdic":
        if self.is_zero:
            raise ZeroDivisionError("inverse of exact zero")
        if self.is_inexact_zero:
            raise PrecisionError("inverse of a value indistinguishable from zero", ExtVal(self.valuation))
        k = self.precision
        return PAdic(self.prime, k, -self.valuation, pow(self.unit, -1, self.prime**k))

    def __truediv__(self, other) -> "PAdic":
        other = self._same(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "PAdic":
        return self.inverse() * other

    def __pow__(self, n: int) -> "PAdic":
        if n < 0:
            return self.inverse() ** (-n)
        p = self.prime
        if n == 0:
            return PAdic.from_int(1, p, max(self.precision, 1))
        if self.is_zero:
            return self
        if self.is_inexact_zero:
            return PAdic.inexact_zero(p, self.valuation * n)
        k = self.precision
        return PAdic(p, k, self.valuation * n, pow(self.unit, n, p**k))

    def __str__(self) -> str:
        p = self.prime
        if self.is_zero:
            return "0"
        if self.is_inexact_zero:
            return f"O({p}^{self.valuation})"
        return f"{self.unit}*{p}^{self.valuation} + O({p}^{self.abs_precision})"


# --------------------------------------------------------------------------
# quadratic extensions


_SMALL_PRIMES = [q for q in range(2, 1000) if all(q % r for r in range(2, math.isqrt(q) + 1))]


def split_square(n: int, p: int) -> tuple[int, int]:
    """Write ``n = q**2 * m`` removing every power of ``p**2`` and small squares.

    Only ``v_p(m) in {0, 1}`` matters for the extension; stripping other small
    squares just keeps coefficients short.
    """
    if n == 0:
        raise ValueError("zero has no square class")
    q = 1
    m = n
    for r in [p] + [s for s in _SMALL_PRIMES if s != p]:
        while m % (r * r) == 0:
            m //= r * r
            q *= r
    return q, m


Scalar = Union[PAdic, int, Fraction]


@dataclass(frozen=True)
class QuadExt:
    """``a + b*omega`` in ``Q_p(omega)`` with ``omega**2 = disc``."""

    prime: int
    disc: int
    a: PAdic
    b: PAdic

    @classmethod
    def from_ints(cls, a, b, disc: int, p: int, k: int) -> "QuadExt":
        return cls(p, disc, PAdic.from_rational(Fraction(a), p, k), PAdic.from_rational(Fraction(b), p, k))

    @classmethod
    def embed(cls, x: PAdic, disc: int) -> "QuadExt":
        return cls(x.prime, disc, x, PAdic.zero(x.prime))

    @property
    def precision(self) -> int | float:
        """Smallest absolute precision of the two coordinates."""
        return min(self.a.abs_precision, self.b.abs_precision)

    @property
    def ramified(self) -> bool:
        return vp(self.disc, self.prime) % 2 == 1

    def _same(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.prime != self.prime or other.disc != self.disc:
                raise ValueError("QuadExt operands live in different extensions")
            return other
        if isinstance(other, (int, Fraction)):
            like = self.a if not self.a.is_zero else self.b
            other = _coerce_int_like(other, like)
        if isinstance(other, PAdic):
            if other.prime != self.prime:
                raise ValueError("mixed primes")
            return QuadExt.embed(other, self.disc)
        return NotImplemented

    def __neg__(self) -> "QuadExt":
        return QuadExt(self.prime, self.disc, -self.a, -self.b)

    def __add__(self, other) -> "QuadExt":
        other = self._same(other)
        if other is NotImplemented:
            return other
        return QuadExt(self.prime, self.disc, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other) -> "QuadExt":
        other = self._same(other)
        if other is NotImplemented:
            return other
        return QuadExt(self.prime, self.disc, self.a - other.a, self.b - other.b)

    def __rsub__(self, other) -> "QuadExt":
        return (-self) + other

    def __mul__(self, other) -> "QuadExt":
        other = self._same(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.a, self.b, other.a, other.b
        bd = b * d
        return QuadExt(self.prime, self.disc, a * c + bd * self.disc, a * d + b * c)

    __rmul__ = __mul__

    def conj(self) -> "QuadExt":
        """The non-trivial automorphism ``omega -> -omega``."""
        return QuadExt(self.prime, self.disc, self.a, -self.b)

    def norm_value(self) -> PAdic:
        """``x * conj(x) = a^2 - disc * b^2`` as an element of Q_p."""
        return self.a * self.a - self.b * self.b * self.disc

    def valuation(self) -> Fraction | float:
        nv = self.norm_value()
        if nv.is_zero:
            return INF
        return Fraction(nv.norm().exponent) / 2

    def norm(self) -> ExtVal:
        if self.a.is_zero and self.b.is_zero:
            return ExtVal(INF)
        nv = self.norm_value()
        if nv.is_inexact_zero:
            raise PrecisionError(
                "extension element indistinguishable from zero",
                ExtVal.from_exponent(Fraction(nv.valuation, 2)),
            )
        return ExtVal.from_exponent(Fraction(nv.valuation) / 2)

    def norm_bound(self) -> ExtVal:
        try:
            return self.norm()
        except PrecisionError as exc:
            return exc.bound

    @property
    def is_zero(self) -> bool:
        return self.a.is_zero and self.b.is_zero

    def inverse(self) -> "QuadExt":
        if self.is_zero:
            raise ZeroDivisionError("inverse of exact zero")
        n = self.norm_value()
        ninv = n.inverse()
        c = self.conj()
        return QuadExt(self.prime, self.disc, c.a * ninv, c.b * ninv)

    def __truediv__(self, other) -> "QuadExt":
        other = self._same(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "QuadExt":
        return self.inverse() * other

    def __pow__(self, n: int) -> "QuadExt":
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            k = max(self.a.precision, self.b.precision, 1)
            return QuadExt.from_ints(1, 0, self.disc, self.prime, k)
        return result

    def __str__(self) -> str:
        return f"({self.a}) + ({self.b})*sqrt({self.disc})"


Number = Union[PAdic, QuadExt]


def padic_norm(x: Number) -> ExtVal:
    """Exact p-adic absolute value as an :class:`ExtVal`."""
    return x.norm()


def quad_arith(op: str, x: QuadExt, y: QuadExt | None = None) -> QuadExt:
    """Dispatch for ``add``/``mul``/``inv``/``conj`` on extension elements."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    if op == "conj":
        return x.conj()
    raise ValueError(f"unknown operation {op!r}")


# --------------------------------------------------------------------------
# logarithm


def _series_length(v: Fraction, target: Fraction, p: int, slack: Fraction) -> int:
    """Smallest N such that every term n > N has coordinate valuation >= target."""
    # n*v - log_p(n) is increasing once n > 1/(v ln p)
    n = max(2, math.ceil(1 / (float(v) * math.log(p))) + 1)
    while n * v - math.log(n, p) - float(slack) < float(target) + 1e-9:
        n += 1
    return n


def _log_qp(x: PAdic) -> PAdic:
    p = x.prime
    y = x - 1
    if y.is_zero:
        return PAdic.zero(p)
    if y.valuation < 1:
        raise ValueError("p-adic log requires |x - 1|_p < 1")
    T = int(y.abs_precision)
    if y.is_inexact_zero:
        return PAdic.inexact_zero(p, T)
    v, u = y.valuation, y.unit
    mod = p**T
    total = 0
    n = 1
    nmax = _series_length(Fraction(v), Fraction(T), p, Fraction(0))
    un = 1
    while n <= nmax:
        un = un * u % mod
        e = n * v - vp(n, p)
        if e < T:
            cofactor = n // p ** vp(n, p)
            term = p**e * un * pow(cofactor, -1, mod) % mod
            total = (total + term) % mod if n % 2 else (total - term) % mod
        n += 1
    return PAdic.from_residue(total, p, T)


def _log_quad(x: QuadExt) -> QuadExt:
    p = x.prime
    y = x - 1
    if y.is_zero:
        return y
    vy = y.norm_bound().exponent
    if vy <= 0:
        raise ValueError("p-adic log requires |x - 1|_p < 1")
    target = y.precision
    slack = vp(2, p) + Fraction(vp(y.disc, p), 2)
    nmax = _series_length(Fraction(vy), Fraction(target), p, slack)
    total = y
    power = y
    for n in range(2, nmax + 1):
        power = power * y
        term = power * PAdic.from_rational(Fraction(1, n), p, max(int(target) + 2, 1))
        total = total - term if n % 2 == 0 else total + term
    return total


def padic_log(x: Number) -> Number:
    """The p-adic logarithm ``sum (-1)^(n-1) (x-1)^n / n``.

    The result carries the absolute precision of ``x - 1``; terms are summed
    until every remaining term vanishes at that precision.
    """
    if isinstance(x, PAdic):
        return _log_qp(x)
    return _log_quad(x)


# --------------------------------------------------------------------------
# square roots


def _sqrt_unit_odd(u: int, p: int, k: int) -> int | None:
    from sympy.ntheory import sqrt_mod

    r = sqrt_mod(u % p, p)
    if r is None:
        return None
    mod_reached = p
    while mod_reached < p**k:
        mod_reached = min(mod_reached * mod_reached, p**k)
        r = (r - (r * r - u) * pow(2 * r, -1, mod_reached)) % mod_reached
    return r % p**k


def _sqrt_unit_two(u: int, k: int) -> int | None:
    """Root of the odd unit ``u`` modulo 2**(k-1), needs k >= 3."""
    if u % 8 != 1:
        return None
    x = 1
    for j in range(3, k):
        if (x * x - u) % 2 ** (j + 1):
            x += 2 ** (j - 1)
    return x % 2 ** (k - 1)


def hensel_sqrt(d: PAdic) -> PAdic | None:
    """Square root of ``d`` in Q_p, or ``None`` when ``d`` is not a square.

    The returned root's unit part is the representative ``r <= (p^k - 1)/2``
    where ``k`` is the root's relative precision.  At ``p = 2`` the unit must
    be ``1 mod 8`` and one relative digit is lost.
    """
    p = d.prime
    if d.is_zero:
        raise ValueError("hensel_sqrt needs a nonzero argument")
    if d.is_inexact_zero:
        raise PrecisionError("argument indistinguishable from zero", ExtVal(d.valuation))
    if d.valuation % 2:
        return None
    k = d.precision
    if p == 2:
        if k < 3:
            raise PrecisionError("2-adic square test needs 3 relative digits")
        r = _sqrt_unit_two(d.unit, k)
        k -= 1
    else:
        r = _sqrt_unit_odd(d.unit, p, k)
    if r is None:
        return None
    mod = p**k
    if r > (mod - 1) // 2:
        r = mod - r
    return PAdic(p, k, d.valuation // 2, r)


def is_qp_square(n: int, p: int) -> bool:
    """Exact test whether the nonzero integer ``n`` is a square in Q_p."""
    if n == 0:
        return True
    v = vp(n, p)
    if v % 2:
        return False
    u = n // p**v
    if p == 2:
        return u % 8 == 1
    return pow(u % p, (p - 1) // 2, p) == 1
