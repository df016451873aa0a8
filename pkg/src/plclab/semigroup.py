"""The continued-fraction matrix semigroup and the eigen-data of its members.

Letter matrices are ``A_a = [[0, 1], [1, a]]``; a word ``a1 a2 ... an`` maps to
the product ``A_a1 * A_a2 * ... * A_an``.  Exact integer matrices are the source
of truth; residues modulo ``p**k`` are derived views.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .padic import (
    ExtVal,
    PAdic,
    PrecisionError,
    QuadExt,
    hensel_sqrt,
    is_qp_square,
    padic_log,
    split_square,
    vp,
)

Word = Union[bytes, Sequence[int], str]


def as_word(w: Word) -> bytes:
    """Coerce a word (``"121"``, ``[1, 2, 1]`` or bytes) to the internal bytes form."""
    if isinstance(w, bytes):
        return w
    if isinstance(w, str):
        if "," in w or "." in w or " " in w:
            parts = [s for s in w.replace(",", " ").replace(".", " ").split() if s]
            return bytes(int(s) for s in parts)
        return bytes(int(ch) for ch in w)
    return bytes(w)


def word_str(w: bytes) -> str:
    if all(x < 10 for x in w):
        return "".join(str(x) for x in w)
    return ".".join(str(x) for x in w)


@dataclass(frozen=True)
class Mat2:
    """A 2x2 integer matrix ``[[a, b], [c, d]]``; ``modulus > 0`` marks a residue view."""

    a: int
    b: int
    c: int
    d: int
    modulus: int = 0

    def __post_init__(self):
        if self.modulus:
            m = self.modulus
            object.__setattr__(self, "a", self.a % m)
            object.__setattr__(self, "b", self.b % m)
            object.__setattr__(self, "c", self.c % m)
            object.__setattr__(self, "d", self.d % m)

    @classmethod
    def identity(cls, modulus: int = 0) -> "Mat2":
        return cls(1, 0, 0, 1, modulus)

    @classmethod
    def from_tuple(cls, t: tuple[int, int, int, int], modulus: int = 0) -> "Mat2":
        return cls(t[0], t[1], t[2], t[3], modulus)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def det(self) -> int:
        v = self.a * self.d - self.b * self.c
        return v % self.modulus if self.modulus else v

    @property
    def trace(self) -> int:
        v = self.a + self.d
        return v % self.modulus if self.modulus else v

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d, self.modulus)

    def reduce(self, modulus: int) -> "Mat2":
        """The image under reduction modulo ``modulus``."""
        return Mat2(self.a, self.b, self.c, self.d, modulus)

    def __mul__(self, other: "Mat2") -> "Mat2":
        m = self.modulus or other.modulus
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            m,
        )

    def __pow__(self, n: int) -> "Mat2":
        if n < 0:
            return self.inverse() ** (-n)
        result = Mat2.identity(self.modulus)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "Mat2":
        """Inverse of a matrix with unit determinant (``+-1`` over Z)."""
        det = self.det
        if self.modulus:
            inv = pow(det, -1, self.modulus)
        elif det in (1, -1):
            inv = det
        else:
            raise ValueError(f"determinant {det} is not invertible over Z")
        return Mat2(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv, self.modulus)

    def apply(self, x, y):
        """Matrix times column vector ``(x, y)``."""
        return self.a * x + self.b * y, self.c * x + self.d * y

    def is_identity(self) -> bool:
        if self.modulus == 1:
            return True
        return self.as_tuple() == (1, 0, 0, 1)

    def __str__(self) -> str:
        suffix = f" mod {self.modulus}" if self.modulus else ""
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]{suffix}"


def letter(a: int) -> Mat2:
    """The letter matrix ``[[0, 1], [1, a]]``."""
    return Mat2(0, 1, 1, a)


def unipotent(a: int) -> Mat2:
    """``D_a = [[1, 0], [a, 1]]``."""
    return Mat2(1, 0, a, 1)


def matrix_of_word(w: Word, modulus: int = 0) -> Mat2:
    """Product of letter matrices along ``w`` (identity for the empty word)."""
    a, b, c, d = 1, 0, 0, 1
    if modulus:
        for x in as_word(w):
            a, b, c, d = b, (a + b * x) % modulus, d, (c + d * x) % modulus
        return Mat2(a, b, c, d, modulus)
    for x in as_word(w):
        a, b, c, d = b, a + b * x, d, c + d * x
    return Mat2(a, b, c, d)


def right_letter(t: tuple[int, int, int, int], x: int, modulus: int) -> tuple[int, int, int, int]:
    """``t * A_x`` for a residue tuple; the hot loop of every prefix scan."""
    a, b, c, d = t
    return (b, (a + b * x) % modulus, d, (c + d * x) % modulus)


def tuple_mul(s: tuple, t: tuple, modulus: int) -> tuple[int, int, int, int]:
    a, b, c, d = s
    e, f, g, h = t
    return ((a * e + b * g) % modulus, (a * f + b * h) % modulus,
            (c * e + d * g) % modulus, (c * f + d * h) % modulus)


def tuple_inverse(t: tuple, modulus: int) -> tuple[int, int, int, int]:
    a, b, c, d = t
    inv = pow((a * d - b * c) % modulus, -1, modulus)
    return ((d * inv) % modulus, (-b * inv) % modulus, (-c * inv) % modulus, (a * inv) % modulus)


# --------------------------------------------------------------------------
# membership and exact invariants


ROOT_OF_UNITY_POLYS = frozenset({(0, -1), (0, 1), (-2, 1), (2, 1), (-1, 1), (1, 1)})
"""Monic quadratics ``x^2 + s x + t`` (as ``(s, t)``) whose roots are roots of unity."""


def char_poly(A: Mat2) -> tuple[int, int]:
    """``(s, t)`` with characteristic polynomial ``x^2 + s x + t``."""
    return (-A.trace, A.det)


def discriminant(A: Mat2) -> int:
    return A.trace**2 - 4 * A.det


@dataclass(frozen=True)
class Membership:
    member: bool
    reason: str

    def __bool__(self) -> bool:
        return self.member


def in_tilde_sl(A: Mat2) -> Membership:
    """Whether ``A`` (det +-1) has distinct eigenvalues that are not roots of unity."""
    if A.modulus:
        raise ValueError("membership needs an exact integer matrix")
    if A.det not in (1, -1):
        return Membership(False, f"determinant {A.det} is not +-1")
    if discriminant(A) == 0:
        return Membership(False, "non-semisimple: repeated eigenvalue")
    if char_poly(A) in ROOT_OF_UNITY_POLYS:
        return Membership(False, "eigenvalues are roots of unity")
    return Membership(True, "distinct eigenvalues, not roots of unity")


@lru_cache(maxsize=4096)
def _kappa_cached(a: int, b: int, c: int, d: int, p: int) -> int:
    mod = p * p
    det = (a * d - b * c) % mod
    base = (a % mod, b % mod, c % mod, d % mod)
    cur = base
    det_t = det
    for t in range(1, p * p + 1):
        tr = (cur[0] + cur[3]) % mod
        # (l1^t - 1) + (l2^t - 1) and (l1^t - 1)(l2^t - 1) must both be divisible enough
        if (tr - 2) % p == 0 and (det_t - tr + 1) % mod == 0:
            return t
        cur = tuple_mul(cur, base, mod)
        det_t = det_t * det % mod
    raise AssertionError("no kappa <= p^2; input is not a unit-determinant matrix")


def kappa(A: Mat2, p: int) -> int:
    """Least ``t >= 1`` with ``|lambda^t - 1|_p <= 1/p`` for both eigenvalues of ``A``.

    With ``s_t = tr(A^t)`` and ``n_t = det(A)^t`` the two quantities
    ``lambda_i^t - 1`` are the roots of ``X^2 - (s_t - 2) X + (n_t - s_t + 1)``;
    both have absolute value at most ``1/p`` exactly when ``p | s_t - 2`` and
    ``p^2 | n_t - s_t + 1``.  Only integer arithmetic modulo ``p^2`` is needed.
    """
    if A.det not in (1, -1) and vp(A.det, p) != 0:
        raise ValueError("kappa needs a unit determinant")
    return _kappa_cached(A.a, A.b, A.c, A.d, p)


def eigenform(A: Mat2) -> tuple[int, int, int]:
    """Coefficients ``(c, a - d, -b)`` of the binary quadratic form vanishing on
    the eigenvectors of ``A^T``: ``c X^2 + (a - d) X Y - b Y^2`` at ``(X, Y) = (y1, y0)``.

    The eigenvectors ``(x, y)`` of ``A^T = [[a, c], [b, d]]`` satisfy
    ``c y^2 + (a - d) x y - b x^2 = 0``.
    """
    return (A.c, A.a - A.d, -A.b)


def eigenform_resultant(A: Mat2, B: Mat2) -> int:
    """Resultant of the eigenforms of ``A^T`` and ``B^T``: zero iff they share an eigenvector.

    Both matrices must be non-scalar.
    """
    c1, e1, f1 = A.c, A.a - A.d, -A.b
    c2, e2, f2 = B.c, B.a - B.d, -B.b
    return (c1 * f2 - c2 * f1) ** 2 - (c1 * e2 - c2 * e1) * (e1 * f2 - e2 * f1)


def shares_eigenvector(A: Mat2, B: Mat2) -> bool:
    for M in (A, B):
        if M.b == 0 and M.c == 0 and M.a == M.d:
            return True  # scalar: every vector is an eigenvector
    return eigenform_resultant(A, B) == 0


def eps3_exact(A: Mat2, p: int) -> ExtVal:
    """``|lambda^(4 kappa) - 1|_p`` from the trace of ``A^(4 kappa)`` alone.

    With ``L = lambda_1^(4 kappa)`` the other eigenvalue power is ``1/L`` and
    ``(L - 1)(1/L - 1) = 2 - tr``; both factors have the same absolute value.
    """
    t = 4 * kappa(A, p)
    tr = (A**t).trace
    v = vp(tr - 2, p)
    if v == float("inf"):
        return ExtVal(float("inf"))
    return ExtVal.from_exponent(Fraction(v, 2))


# --------------------------------------------------------------------------
# eigen decomposition


SPLIT = "split-distinct"
QUAD = "quad-distinct"
NON_SEMISIMPLE = "non-semisimple"


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues of ``A`` and normalized eigenvectors of ``A^T``.

    ``v1`` belongs to ``lambda1``; eigenvectors are :class:`ProjPoint`.
    """

    matrix: Mat2
    prime: int
    precision: int
    kind: str
    lambda1: object
    lambda2: object
    v1: object
    v2: object
    kappa: int
    eps3: ExtVal | None
    disc: int
    ext_disc: int | None = None
    ramified: bool = False
    notes: tuple = field(default_factory=tuple)


def _eigvec(A: Mat2, lam):
    """Eigenvector of ``A^T`` for ``lam``: (c, lam - a) or (lam - d, b)."""
    from .projective import normalize

    def const(n: int):
        if isinstance(lam, QuadExt):
            k = int(lam.precision)
            return QuadExt.from_ints(n, 0, lam.disc, lam.prime, max(k, 1))
        return PAdic.from_int(n, lam.prime, max(int(lam.abs_precision), 1)) if n else PAdic.zero(lam.prime)

    first = (const(A.c), lam - A.a)
    second = (lam - A.d, const(A.b))

    def size(pair):
        best = None
        for z in pair:
            if z.is_zero:
                continue
            try:
                n = z.norm()
            except PrecisionError:
                continue
            best = n if best is None or n > best else best
        return best

    s1, s2 = size(first), size(second)
    if s1 is None and s2 is None:
        raise PrecisionError("eigenvector unresolved at working precision")
    pick = first if s2 is None or (s1 is not None and s1 >= s2) else second
    return normalize(pick[0], pick[1])


def _lambda_precision(p: int, k: int) -> int:
    return k + 4 + (3 if p == 2 else 0)


def eigen_decompose(A: Mat2, p: int, k: int, with_eps3: bool = True) -> EigenData:
    """Eigenvalues of ``A`` over Q_p or ``Q_p(sqrt(disc))`` and eigenvectors of ``A^T``."""
    if A.modulus:
        raise ValueError("eigen_decompose needs the exact integer matrix")
    if A.det not in (1, -1):
        raise ValueError("eigen_decompose needs det = +-1")
    tr, det = A.trace, A.det
    disc = tr * tr - 4 * det
    K = _lambda_precision(p, k)
    half = PAdic.from_rational(Fraction(1, 2), p, K)
    if disc == 0:
        lam = PAdic.from_rational(Fraction(tr, 2), p, K)
        if A.b == 0 and A.c == 0:
            # scalar: every direction is an eigenvector
            return EigenData(A, p, k, NON_SEMISIMPLE, lam, lam, None, None, kappa(A, p), ExtVal(float("inf")),
                             disc, notes=("scalar matrix",))
        v = _eigvec(A, lam)
        return EigenData(A, p, k, NON_SEMISIMPLE, lam, lam, v, v, kappa(A, p), ExtVal(float("inf")), disc)
    if is_qp_square(disc, p):
        s = hensel_sqrt(PAdic.from_int(disc, p, K + 2 * vp(disc, p) + 2))
        l1 = (PAdic.from_int(tr, p, K) + s) * half
        l2 = (PAdic.from_int(tr, p, K) - s) * half
        kind, ext, ram = SPLIT, None, False
    else:
        q, delta = split_square(disc, p)
        l1 = QuadExt(p, delta, PAdic.from_rational(Fraction(tr, 2), p, K), PAdic.from_rational(Fraction(q, 2), p, K))
        l2 = l1.conj()
        kind, ext = QUAD, delta
        ram = l1.ramified or (p == 2 and delta % 4 != 1)
    v1 = _eigvec(A, l1)
    v2 = _eigvec(A, l2)
    kap = kappa(A, p)
    e3 = eps3(A, p, k, kappa_value=kap, lam=l1) if with_eps3 else None
    return EigenData(A, p, k, kind, l1, l2, v1, v2, kap, e3, disc, ext, ram)


def eps3(A: Mat2, p: int, k: int, kappa_value: int | None = None, lam=None, max_precision: int = 512) -> ExtVal:
    """``|log(lambda_1^(4 kappa))|_p`` via the p-adic logarithm.

    Precision is doubled and the computation retried while the logarithm is
    indistinguishable from zero.
    """
    if not in_tilde_sl(A):
        return ExtVal(float("inf"))
    kap = kappa_value if kappa_value is not None else kappa(A, p)
    while True:
        if lam is None:
            lam = eigen_decompose(A, p, k, with_eps3=False).lambda1
        try:
            return padic_log(lam ** (4 * kap)).norm()
        except PrecisionError:
            if k >= max_precision:
                raise
            k *= 2
            lam = None


def is_power_of(u: bytes, v: bytes) -> bool:
    """Whether ``u`` and ``v`` are powers of a common word."""
    return u + v == v + u


def minimal_period(u: Word) -> bytes:
    """Shortest ``t`` with ``u = t^r``."""
    u = as_word(u)
    n = len(u)
    for l in range(1, n + 1):
        if n % l == 0 and u[:l] * (n // l) == u:
            return u[:l]
    return u


def words_up_to(length: int, alphabet: Iterable[int]) -> Iterable[bytes]:
    """All nonempty words of length ``<= length`` over ``alphabet``."""
    import itertools

    letters = list(alphabet)
    for n in range(1, length + 1):
        for t in itertools.product(letters, repeat=n):
            yield bytes(t)
