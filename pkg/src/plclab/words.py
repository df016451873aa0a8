"""Lazy infinite words over the alphabet ``{1, ..., N}`` and their factors.

Words are handled as ``bytes`` (one byte per letter).  A :class:`WordSource`
is an immutable description; prefixes are generated on demand and memoized
per source behind a lock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .semigroup import Word, as_word, minimal_period, word_str
from .surds import RealQuadratic

PERIODIC = "periodic"
MORPHIC = "morphic"
STURMIAN = "sturmian"
CONCAT = "concat"
EXPLICIT = "explicit"
KINDS = (PERIODIC, MORPHIC, STURMIAN, CONCAT, EXPLICIT)


@dataclass(frozen=True)
class ConcatProgram:
    """A concatenation map ``W(X_1, ..., X_m)`` written as a sequence of placeholder indices.

    ``body = (1,)`` with ``arity = 2`` is ``W(X_1, X_2) = X_1``, which turns the
    recursion ``s_{n+m} = s_{n+m-1} W(s_n, ..., s_{n+m-1})`` into
    ``s_{n+2} = s_{n+1} s_n``.
    """

    arity: int
    body: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be positive")
        if not self.body:
            raise ValueError("the concatenation map must use at least one placeholder")
        for i in self.body:
            if not 1 <= i <= self.arity:
                raise ValueError(f"placeholder X{i} outside X1..X{self.arity}")

    @classmethod
    def parse(cls, text: str, arity: int) -> "ConcatProgram":
        """Parse ``"X1 X2 X1"`` (whitespace or ``*`` separated)."""
        toks = text.replace("*", " ").replace("·", " ").split()
        body = []
        for t in toks:
            t = t.strip().upper()
            if not t.startswith("X"):
                raise ValueError(f"bad placeholder {t!r}")
            body.append(int(t[1:]))
        return cls(arity, tuple(body))

    def evaluate(self, args: tuple) -> bytes:
        return b"".join(args[i - 1] for i in self.body)

    def evaluate_matrix(self, mats: tuple, mul, identity):
        out = identity
        for i in self.body:
            out = mul(out, mats[i - 1])
        return out

    def __str__(self) -> str:
        return " ".join(f"X{i}" for i in self.body)


@dataclass(frozen=True)
class WordSource:
    """Immutable description of an infinite word.

    Only the fields relevant to ``kind`` are used:

    * periodic: ``word`` is the period;
    * morphic: ``morphism`` maps letters to images, ``seed`` starts the fixed
      point and ``coding`` optionally renames letters;
    * sturmian: the mechanical word ``floor((n+1)a + r) - floor(n a + r)``
      coded to ``{1, 2}`` with slope ``a`` and intercept ``r``;
    * concat: ``program`` and length-1 ``seeds``;
    * explicit: ``word`` is a finite word (prefixes beyond it are refused).
    """

    kind: str
    alphabet_size: int
    word: bytes = b""
    morphism: tuple = ()
    seed: int = 0
    coding: tuple = ()
    slope: Union[Fraction, RealQuadratic, None] = None
    intercept: Fraction = Fraction(0)
    program: ConcatProgram | None = None
    seeds: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown word kind {self.kind!r}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def periodic(cls, period: Word, alphabet_size: int | None = None) -> "WordSource":
        u = as_word(period)
        if not u:
            raise ValueError("period must be nonempty")
        return cls(PERIODIC, alphabet_size or max(u), word=u, name=f"periodic:{word_str(u)}")

    @classmethod
    def explicit(cls, w: Word, alphabet_size: int | None = None) -> "WordSource":
        u = as_word(w)
        return cls(EXPLICIT, alphabet_size or (max(u) if u else 1), word=u, name=f"explicit:{word_str(u)}")

    @classmethod
    def morphic(cls, morphism: Mapping[int, Word], seed: int, coding: Mapping[int, int] | None = None,
                name: str = "") -> "WordSource":
        table = tuple(sorted((int(k), as_word(v)) for k, v in morphism.items()))
        images = dict(table)
        if seed not in images:
            raise ValueError("seed letter has no image")
        img = images[seed]
        if not img or img[0] != seed or len(img) < 2:
            raise ValueError("morphism must be prolongable on the seed (image starts with it and grows)")
        for k, v in table:
            if not v:
                raise ValueError(f"erasing image for letter {k}")
        cod = tuple(sorted((int(k), int(v)) for k, v in (coding or {}).items()))
        letters = set(images) | {x for _, v in table for x in v}
        out_letters = {dict(cod).get(x, x) for x in letters}
        return cls(MORPHIC, max(out_letters), morphism=table, seed=seed, coding=cod,
                   name=name or "morphic:" + ",".join(f"{k}->{word_str(v)}" for k, v in table))

    @classmethod
    def sturmian(cls, slope: Fraction | RealQuadratic, intercept: Fraction = Fraction(0)) -> "WordSource":
        if isinstance(slope, RealQuadratic):
            if not (slope > 0 and slope < 1):
                raise ValueError("slope must lie in (0, 1)")
        else:
            slope = Fraction(slope)
            if not 0 < slope < 1:
                raise ValueError("slope must lie in (0, 1)")
        return cls(STURMIAN, 2, slope=slope, intercept=Fraction(intercept),
                   name=f"sturmian:{slope}+{Fraction(intercept)}")

    @classmethod
    def concat(cls, program: ConcatProgram, seeds: Iterable[Word]) -> "WordSource":
        seeds = tuple(as_word(s) for s in seeds)
        if len(seeds) != program.arity:
            raise ValueError(f"need {program.arity} seeds, got {len(seeds)}")
        if any(len(s) != 1 for s in seeds):
            raise ValueError("seeds must be one-letter words")
        if len(set(seeds)) == 1:
            raise ValueError("seeds must not all be equal to each other")
        return cls(CONCAT, max(s[0] for s in seeds), program=program, seeds=seeds,
                   name=f"concat:{program}|" + ",".join(word_str(s) for s in seeds))

    # -- properties -------------------------------------------------------

    @property
    def period(self) -> bytes | None:
        """Minimal period for periodic sources (``None`` otherwise)."""
        if self.kind == PERIODIC:
            return minimal_period(self.word)
        return None

    @property
    def uniformly_recurrent(self) -> bool:
        """Known uniform recurrence by construction."""
        if self.kind == PERIODIC:
            return True
        if self.kind == STURMIAN:
            return isinstance(self.slope, RealQuadratic)
        if self.kind == MORPHIC:
            return is_primitive(dict(self.morphism))
        return False

    @property
    def finite_length(self) -> int | None:
        return len(self.word) if self.kind == EXPLICIT else None

    def prefix(self, L: int) -> bytes:
        return prefix(self, L)

    def __str__(self) -> str:
        return self.name or self.kind


def is_primitive(morphism: Mapping[int, bytes]) -> bool:
    """Whether some power of the incidence matrix is strictly positive."""
    letters = sorted(morphism)
    idx = {a: i for i, a in enumerate(letters)}
    n = len(letters)
    if any(x not in idx for v in morphism.values() for x in v):
        return False
    M = [[0] * n for _ in range(n)]
    for a, img in morphism.items():
        for x in img:
            M[idx[a]][idx[x]] = 1
    P = [row[:] for row in M]
    for _ in range((n - 1) ** 2 + 1 + 1):
        if all(all(v for v in row) for row in P):
            return True
        P = [[1 if any(P[i][l] and M[l][j] for l in range(n)) else 0 for j in range(n)] for i in range(n)]
    return False


# --------------------------------------------------------------------------
# prefix generation


_CACHE: dict = {}
_LOCK = threading.Lock()


def _generate(source: WordSource, L: int) -> bytes:
    kind = source.kind
    if kind == PERIODIC:
        u = source.word
        return (u * (L // len(u) + 1))[:L]
    if kind == EXPLICIT:
        if L > len(source.word):
            raise ValueError(f"explicit word has only {len(source.word)} letters")
        return source.word[:L]
    if kind == MORPHIC:
        table = dict(source.morphism)
        w = bytes([source.seed])
        while len(w) < L:
            w = b"".join(table[x] for x in w)
        w = w[:L]
        if source.coding:
            cod = dict(source.coding)
            w = bytes(cod.get(x, x) for x in w)
        return w
    if kind == STURMIAN:
        return _sturmian(source.slope, source.intercept, L)
    if kind == CONCAT:
        return _concat_prefix(source.program, source.seeds, L)
    raise AssertionError(kind)


def _sturmian(slope, intercept: Fraction, L: int) -> bytes:
    out = bytearray()
    if isinstance(slope, RealQuadratic):
        prev = slope.floor_affine(0, intercept)
        for n in range(1, L + 1):
            cur = slope.floor_affine(n, intercept)
            out.append(1 + cur - prev)
            prev = cur
    else:
        a = Fraction(slope)
        num, den = a.numerator, a.denominator
        r = intercept
        prev = (r.numerator * den) // (r.denominator * den)
        for n in range(1, L + 1):
            cur = (n * num * r.denominator + r.numerator * den) // (den * r.denominator)
            out.append(1 + cur - prev)
            prev = cur
    return bytes(out)


def concat_expand(program: ConcatProgram, seeds: Iterable[Word], n: int) -> bytes:
    """The word ``s_n`` (1-based) of the concatenation recursion."""
    seeds = tuple(as_word(s) for s in seeds)
    m = program.arity
    if len(seeds) != m:
        raise ValueError(f"need {m} seeds")
    if len(set(seeds)) == 1:
        raise ValueError("seeds must not all be equal to each other")
    if n < 1:
        raise ValueError("index starts at 1")
    seq = list(seeds)
    while len(seq) < n:
        window = tuple(seq[-m:])
        seq.append(seq[-1] + program.evaluate(window))
    return seq[n - 1]


def concat_sequence(program: ConcatProgram, seeds: tuple, until_length: int) -> list[bytes]:
    seq = list(seeds)
    m = program.arity
    while len(seq[-1]) < until_length or len(seq) <= m:
        seq.append(seq[-1] + program.evaluate(tuple(seq[-m:])))
    return seq


def _concat_prefix(program: ConcatProgram, seeds: tuple, L: int) -> bytes:
    seq = concat_sequence(program, seeds, L)
    return seq[-1][:L]


def prefix(source: WordSource, L: int) -> bytes:
    """The first ``L`` letters of the word."""
    if L < 0:
        raise ValueError("negative length")
    if L == 0:
        return b""
    with _LOCK:
        cached = _CACHE.get(source)
        if cached is not None and len(cached) >= L:
            return cached[:L]
    target = max(L, 2 * len(cached) if cached else 0)
    if source.kind == EXPLICIT:
        target = L
    w = _generate(source, target)
    with _LOCK:
        old = _CACHE.get(source)
        if old is None or len(old) < len(w):
            _CACHE[source] = w
    return w[:L]


def shift(source: WordSource, s: int, L: int) -> bytes:
    """Letters ``s+1 .. s+L`` of the word, i.e. the prefix of ``T^s w``."""
    return prefix(source, s + L)[s:]


# --------------------------------------------------------------------------
# factors


@dataclass(frozen=True)
class FactorSet:
    """Length-``n`` factors of a prefix; ``exact`` when they are all factors of the infinite word."""

    n: int
    window: int
    factors: frozenset
    exact: bool
    reason: str = ""

    def __len__(self) -> int:
        return len(self.factors)

    def __contains__(self, u) -> bool:
        return as_word(u) in self.factors


def factors_of(w: bytes, n: int) -> set[bytes]:
    return {w[i:i + n] for i in range(len(w) - n + 1)}


def _max_gaps(w: bytes, n: int) -> dict[bytes, int]:
    """For each factor, the maximum of its first position and the gaps between occurrences."""
    last: dict[bytes, int] = {}
    gap: dict[bytes, int] = {}
    for i in range(len(w) - n + 1):
        u = w[i:i + n]
        j = last.get(u)
        g = i + 1 if j is None else i - j
        if g > gap.get(u, 0):
            gap[u] = g
        last[u] = i
    return gap


def factors(source: WordSource, n: int, window: int) -> FactorSet:
    """Distinct length-``n`` factors occurring in ``prefix(window)``.

    Exactness rules:

    * periodic: rigorous once ``window >= period + n - 1``;
    * explicit: the factors of the finite word itself;
    * uniformly recurrent sources (primitive morphic, irrational Sturmian):
      exact when the first half of the window already contains every factor
      and ``window >= n + G`` where ``G`` is the largest observed return gap;
    * anything else is a lower bound.
    """
    if n < 0:
        raise ValueError("negative factor length")
    if window < n:
        raise ValueError("window shorter than factor length")
    if source.kind == EXPLICIT:
        window = min(window, len(source.word))
    w = prefix(source, window)
    found = factors_of(w, n)
    if source.kind == EXPLICIT:
        return FactorSet(n, window, frozenset(found), window == len(source.word), "finite word")
    if source.kind == PERIODIC:
        l = len(source.period)
        ok = window >= l + n - 1
        return FactorSet(n, window, frozenset(found), ok, "periodic rule" if ok else "window below period + n - 1")
    if source.uniformly_recurrent:
        half = factors_of(w[: window // 2], n)
        gaps = _max_gaps(w, n)
        G = max(gaps.values()) if gaps else window
        ok = half == found and window >= n + G
        reason = f"max return gap {G}" if ok else "factors not stabilized in window"
        return FactorSet(n, window, frozenset(found), ok, reason)
    return FactorSet(n, window, frozenset(found), False, "no recurrence certificate for this kind")


def complexity(source: WordSource, n: int, window: int) -> int:
    """``P(w, n)``: number of distinct length-``n`` factors seen in the window."""
    return len(factors(source, n, window))


def recurrence_gap(source: WordSource, u: Word, window: int) -> int | None:
    """Largest distance between consecutive occurrences of ``u`` in the window.

    ``None`` when ``u`` occurs fewer than twice.
    """
    u = as_word(u)
    w = prefix(source, window)
    pos = []
    i = w.find(u)
    while i != -1:
        pos.append(i)
        i = w.find(u, i + 1)
    if len(pos) < 2:
        return None
    return max(b - a for a, b in zip(pos, pos[1:]))


# --------------------------------------------------------------------------
# presets


def fibonacci() -> WordSource:
    """Fixed point of ``1 -> 12, 2 -> 1``."""
    return WordSource.morphic({1: b"\x01\x02", 2: b"\x01"}, 1, name="fibonacci")


def thue_morse() -> WordSource:
    """Thue-Morse word on ``{1, 2}``: fixed point of ``1 -> 12, 2 -> 21``."""
    return WordSource.morphic({1: b"\x01\x02", 2: b"\x02\x01"}, 1, name="thue-morse")


def fibonacci_concat() -> WordSource:
    """The Fibonacci word from the recursion ``s_{n+2} = s_{n+1} s_n`` with seeds ``2, 1``."""
    return WordSource.concat(ConcatProgram(2, (1,)), [b"\x02", b"\x01"])


PRESETS = {
    "fibonacci": fibonacci,
    "thue-morse": thue_morse,
    "fibonacci-concat": fibonacci_concat,
}


def _parse_number(text: str) -> Fraction | RealQuadratic:
    text = text.strip()
    if text.startswith("(") or "sqrt" in text:
        # (a + b*sqrt(D))/c
        import re

        m = re.fullmatch(r"\(?\s*(-?\d+)\s*([+-])\s*(\d*)\s*\*?\s*sqrt\((\d+)\)\s*\)?\s*(?:/\s*(\d+))?", text)
        if not m:
            raise ValueError(f"cannot parse quadratic irrational {text!r}")
        a = int(m.group(1))
        b = int(m.group(3) or 1) * (1 if m.group(2) == "+" else -1)
        D = int(m.group(4))
        c = int(m.group(5) or 1)
        return RealQuadratic(a, b, c, D)
    return Fraction(text)


def source_from_mapping(cfg: Mapping[str, str]) -> WordSource:
    """Build a source from string key/value pairs (the experiment file schema).

    Recognized keys: ``kind`` plus ``period`` | ``preset`` | ``morphism``
    (``1:12,2:1``), ``seed``, ``coding`` | ``slope``, ``intercept`` |
    ``program``, ``arity``, ``seeds`` | ``word``; optional ``alphabet``.
    """
    kind = cfg.get("kind", "").strip() or ("preset" if cfg.get("preset") else "")
    alphabet = int(cfg["alphabet"]) if cfg.get("alphabet") else None
    if kind == "preset":
        name = cfg.get("preset", "").strip()
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        return PRESETS[name]()
    if kind == PERIODIC:
        if "period" not in cfg:
            raise ValueError("periodic source needs 'period'")
        return WordSource.periodic(cfg["period"], alphabet)
    if kind == EXPLICIT:
        return WordSource.explicit(cfg["word"], alphabet)
    if kind == MORPHIC:
        table = {}
        for item in cfg["morphism"].split(","):
            k, v = item.split(":")
            table[int(k)] = as_word(v.strip())
        coding = None
        if cfg.get("coding"):
            coding = {int(k): int(v) for k, v in (it.split(":") for it in cfg["coding"].split(","))}
        return WordSource.morphic(table, int(cfg.get("seed", "1")), coding)
    if kind == STURMIAN:
        return WordSource.sturmian(_parse_number(cfg["slope"]), Fraction(cfg.get("intercept", "0")))
    if kind == CONCAT:
        arity = int(cfg["arity"])
        program = ConcatProgram.parse(cfg["program"], arity)
        seeds = [as_word(s.strip()) for s in cfg["seeds"].split(",")]
        return WordSource.concat(program, seeds)
    raise ValueError(f"unknown source kind {kind!r}")
