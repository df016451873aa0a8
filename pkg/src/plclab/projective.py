"""Points of the p-adic projective line, the determinant metric and PBad scans.

A point is stored in canonical normalized form: ``(1, y)`` with ``|y|_p <= 1``
or ``(x, 1)`` with ``|x|_p < 1``.  For such representatives the distance is
just ``|x1*y2 - x2*y1|_p`` and two points are within ``p^-k`` of each other
exactly when they sit in the same chart with coordinates congruent modulo
``p^k``; :meth:`ProjPoint.key` exposes that residue as a hashable value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .padic import INF, ExtVal, Magnitude, PAdic, PrecisionError, QuadExt, vp
from .semigroup import Mat2

Coord = Union[PAdic, QuadExt]


def _embed(z: Coord, other: Coord) -> Coord:
    if isinstance(z, PAdic) and isinstance(other, QuadExt):
        return QuadExt.embed(z, other.disc)
    return z


def _one_like(z: Coord) -> Coord:
    k = int(z.precision if isinstance(z, QuadExt) else z.abs_precision)
    k = max(k, 1)
    if isinstance(z, QuadExt):
        return QuadExt.from_ints(1, 0, z.disc, z.prime, k)
    return PAdic.from_int(1, z.prime, k)


def _zero_like(z: Coord) -> Coord:
    if isinstance(z, QuadExt):
        return QuadExt(z.prime, z.disc, PAdic.zero(z.prime), PAdic.zero(z.prime))
    return PAdic.zero(z.prime)


def _is_exact_zero(z: Coord) -> bool:
    return z.is_zero


@dataclass(frozen=True)
class ProjPoint:
    """Canonical representative ``(x, y)`` of a point of P^1 over Q_p or a quadratic extension.

    ``chart == 0`` means ``x == 1``; ``chart == 1`` means ``y == 1`` and ``|x| < 1``.
    """

    prime: int
    x: Coord
    y: Coord
    chart: int

    @classmethod
    def from_ints(cls, x: int | Fraction, y: int | Fraction, p: int, k: int) -> "ProjPoint":
        """The rational point ``(x : y)`` carried at ``k`` relative digits."""
        def conv(t):
            return PAdic.from_rational(Fraction(t), p, k) if t != 0 else PAdic.zero(p)

        return normalize(conv(x), conv(y))

    @property
    def coordinate(self) -> Coord:
        """The affine coordinate of the chart (``y`` or ``x``)."""
        return self.y if self.chart == 0 else self.x

    @property
    def precision(self) -> int | float:
        z = self.coordinate
        if z.is_zero:
            return INF
        return z.precision if isinstance(z, QuadExt) else z.abs_precision

    @property
    def is_quadratic(self) -> bool:
        return isinstance(self.coordinate, QuadExt)

    def key(self, k: int) -> tuple:
        """Hashable residue identifying the closed ball of radius ``p^-k`` around the point."""
        z = self.coordinate
        mod = self.prime**k
        if isinstance(z, QuadExt):
            return (self.chart, z.a.residue(k) if not z.a.is_zero else 0, z.b.residue(k) if not z.b.is_zero else 0)
        return (self.chart, z.residue(k) % mod)

    def as_tuple(self) -> tuple[Coord, Coord]:
        return (self.x, self.y)

    def __str__(self) -> str:
        return f"({self.x} : {self.y})"


def normalize(x: Coord, y: Coord) -> ProjPoint:
    """Canonical normalized representative of ``(x : y)``."""
    if isinstance(x, QuadExt) or isinstance(y, QuadExt):
        x, y = _embed(x, y), _embed(y, x)
    if _is_exact_zero(x) and _is_exact_zero(y):
        raise ValueError("(0, 0) is not a projective point")
    p = x.prime
    if _is_exact_zero(y):
        return ProjPoint(p, _one_like(x), y, 0)
    if _is_exact_zero(x):
        return ProjPoint(p, x, _one_like(y), 1)
    nx, ny = x.norm_bound(), y.norm_bound()
    if nx >= ny:
        try:
            x.norm()
        except PrecisionError as exc:
            raise PrecisionError("both coordinates indistinguishable from zero", exc.bound) from None
        return ProjPoint(p, _one_like(x), y / x, 0)
    return ProjPoint(p, x / y, _one_like(y), 1)


def cross(w: ProjPoint, v: ProjPoint) -> Coord:
    """``w1*v2 - w2*v1``."""
    a, b, c, d = w.x, w.y, v.x, v.y
    if any(isinstance(t, QuadExt) for t in (a, b, c, d)):
        ref = next(t for t in (a, b, c, d) if isinstance(t, QuadExt))
        a, b, c, d = (_embed(t, ref) for t in (a, b, c, d))
    return a * d - b * c


def proj_distance(w: ProjPoint, v: ProjPoint) -> ExtVal:
    """``d(w, v)`` for normalized points; raises :class:`PrecisionError` when unresolved."""
    if w.prime != v.prime:
        raise ValueError("points over different primes")
    z = cross(w, v)
    if z.is_zero:
        return ExtVal(INF)
    try:
        return z.norm()
    except PrecisionError as exc:
        raise PrecisionError(f"points indistinguishable at precision {exc.bound}", exc.bound) from None


def distance_bound(w: ProjPoint, v: ProjPoint) -> tuple[ExtVal, bool]:
    """``(value, exact)``; when unresolved the value is an upper bound."""
    try:
        return proj_distance(w, v), True
    except PrecisionError as exc:
        return exc.bound, False


def apply_matrix(A: Mat2, x: ProjPoint) -> ProjPoint:
    """``A`` acting on the column vector ``(x, y)``; ``det A`` must be a p-adic unit."""
    p = x.prime
    if A.modulus:
        raise ValueError("apply_matrix needs an integer matrix")
    if A.det == 0 or vp(A.det, p) != 0:
        raise ValueError(f"determinant {A.det} is not a {p}-adic unit")
    u, v = x.x, x.y
    return normalize(u * A.a + v * A.b, u * A.c + v * A.d)


# --------------------------------------------------------------------------
# residue-level points (fast trajectories)


def residue_point(point: ProjPoint, k: int) -> tuple[int, int]:
    """``(chart, coordinate mod p^k)`` of a Q_p point."""
    if point.is_quadratic:
        raise ValueError("residue trajectories need a Q_p point")
    return point.key(k)


def residue_apply(M: tuple[int, int, int, int], pt: tuple[int, int], p: int, mod: int) -> tuple[int, int]:
    """Act by an integer matrix on a residue point of P^1(Z/p^k)."""
    a, b, c, d = M
    chart, z = pt
    if chart == 0:
        X, Y = a + b * z, c + d * z
    else:
        X, Y = a * z + b, c * z + d
    X %= mod
    Y %= mod
    if X % p:
        return (0, Y * pow(X, -1, mod) % mod)
    return (1, X * pow(Y, -1, mod) % mod)


# --------------------------------------------------------------------------
# PBad estimation


@dataclass(frozen=True)
class PBadReport:
    """Minimum of ``|a q1 + b q2|_p * max(a^2, b^2)`` over the box ``max(|a|,|b|) <= B``.

    ``epsilon`` is exact; when ``precision_limited`` is set it is only an upper
    bound because some pair could not be resolved at the point's precision.
    """

    point: ProjPoint
    bound: int
    epsilon: Magnitude
    witness: tuple[int, int]
    precision_limited: bool
    unresolved: int

    @property
    def positive(self) -> bool:
        return self.epsilon.coeff > 0


def _pair_order(a: int, b: int) -> tuple[int, int, int]:
    return (abs(a) + abs(b), a, b)


def _half_plane(B: int):
    for a in range(0, B + 1):
        for b in range(-B, B + 1):
            if a == 0 and b <= 0:
                continue
            yield a, b


def pbad_estimate(x: ProjPoint, B: int) -> PBadReport:
    """Exhaustive scan of integer pairs ``(a, b)`` with ``0 < max(|a|, |b|) <= B``.

    Pairs ``(a, b)`` and ``(-a, -b)`` give the same value, so only ``a > 0``
    or ``a = 0, b > 0`` are visited.  Values are compared as ``weight * p^-e``
    with exact integer cross-multiplication.
    """
    if B < 1:
        raise ValueError("search bound must be >= 1")
    p = x.prime
    z = x.coordinate
    quadratic = isinstance(z, QuadExt)
    if z.is_zero:
        T, mod, za, zb, disc = None, None, 0, 0, 0
    elif quadratic:
        T = int(z.precision)
        mod = p**T
        za = z.a.lift() if not z.a.is_zero else 0
        zb = z.b.lift() if not z.b.is_zero else 0
        disc = z.disc
    else:
        T = int(z.abs_precision)
        mod = p**T
        za, zb, disc = z.lift(), 0, 0
    # each candidate is (weight, twice the valuation); zero value has weight 0
    best_w, best_e2, best_key, best_pair, best_exact = None, 0, None, None, True
    unresolved = 0
    for a, b in _half_plane(B):
        if x.chart == 0:
            one, coef = a, b
        else:
            one, coef = b, a
        weight = a * a if a * a >= b * b else b * b
        exact = True
        if mod is None:
            if one == 0:
                weight, e2 = 0, 0
            else:
                e2 = 2 * vp(one, p)
        elif quadratic:
            alpha = (one + coef * za) % mod
            beta = (coef * zb) % mod
            nv = (alpha * alpha - disc * beta * beta) % mod
            if nv == 0:
                e2, exact = T, False
            else:
                e2 = vp(nv, p)
        else:
            r = (one + coef * za) % mod
            if r == 0:
                if coef == 0:
                    weight, e2 = 0, 0
                else:
                    e2, exact = 2 * T, False
            else:
                e2 = 2 * vp(r, p)
        if not exact:
            unresolved += 1
        key = (abs(a) + abs(b), a, b)
        if best_w is None:
            better = True
        else:
            # compare weight * p^(-e2/2) with best_w * p^(-best_e2/2)
            if weight == 0 or best_w == 0:
                lhs, rhs = weight, best_w
            else:
                lhs = weight * weight * p ** max(best_e2 - e2, 0)
                rhs = best_w * best_w * p ** max(e2 - best_e2, 0)
            better = lhs < rhs or (lhs == rhs and key < best_key)
        if better:
            best_w, best_e2, best_key, best_pair, best_exact = weight, e2, key, (a, b), exact
    eps = Magnitude(p, Fraction(best_w), Fraction(-best_e2, 2))
    return PBadReport(x, B, eps, best_pair, not best_exact, unresolved)


def pbad_pair_value(x: ProjPoint, a: int, b: int) -> Magnitude:
    """``|a q1 + b q2|_p * max(a^2, b^2)`` for one pair, via generic arithmetic."""
    z = a * x.x + b * x.y
    n = z.norm()
    return Magnitude.of(x.prime, n) * max(a * a, b * b)
