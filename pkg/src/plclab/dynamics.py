"""Prefix-matrix sets modulo ``p^k``, their shift collections and factor graphs.

For a word ``w`` the set ``U_k(w)`` collects the reductions of ``A_{w_n}``
(the matrix of the length-``n`` prefix) for every ``n >= 0``.  Matrices are
handled as residue 4-tuples ``(a, b, c, d)`` in the hot loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .semigroup import Mat2, right_letter, tuple_inverse, tuple_mul
from .words import (
    PERIODIC,
    WordSource,
    factors,
    prefix,
)

Res = tuple  # residue matrix (a, b, c, d)
ID: Res = (1, 0, 0, 1)


def group_order_bound(p: int, k: int) -> int:
    """Order of the group of matrices over ``Z/p^k`` with determinant ``+-1``."""
    mod = p**k
    sl = p ** (3 * k) - p ** (3 * k - 2)  # |SL_2(Z/p^k)| = p^(3k) (1 - p^-2)
    return sl * (2 if mod > 2 else 1)


@dataclass(frozen=True)
class UkSet:
    """Reduced prefix matrices of a word seen during a scan.

    ``saturated`` is ``True`` when the scan is known (periodic sources) or
    judged (no new element for a full group-order window) to be complete.
    """

    prime: int
    k: int
    matrices: frozenset
    saturated: bool
    prefixes_scanned: int
    how: str = ""

    @property
    def modulus(self) -> int:
        return self.prime**self.k

    def canonical(self) -> tuple:
        """Sorted encoding used for equality and indexing."""
        return tuple(sorted(self.matrices))

    def as_mats(self) -> list[Mat2]:
        return [Mat2.from_tuple(t, self.modulus) for t in self.canonical()]

    def __len__(self) -> int:
        return len(self.matrices)

    def left_multiply(self, M: Res) -> frozenset:
        return frozenset(tuple_mul(M, t, self.modulus) for t in self.matrices)


def _scan_periodic(period: bytes, offset: int, p: int, k: int, N_max: int) -> UkSet:
    mod = p**k
    l = len(period)
    rot = period[offset % l:] + period[: offset % l]
    seen = {ID}
    cur = ID
    n = 0
    while n < N_max:
        cur = right_letter(cur, rot[n % l], mod)
        n += 1
        seen.add(cur)
        if n % l == 0 and cur == ID:
            return UkSet(p, k, frozenset(seen), True, n, "periodic cycle closed")
    return UkSet(p, k, frozenset(seen), False, n, "periodic cycle not closed")


def _scan_word(w: bytes, p: int, k: int) -> UkSet:
    """Scan ``w`` and stop once saturation is reached.

    Saturation means the set fills the whole group, or no new element has
    appeared during a quiet window of ``max(2G, 4 * last_new)`` steps, where
    ``G`` is the group order and ``last_new`` the step of the latest discovery.
    """
    mod = p**k
    G = group_order_bound(p, k)
    seen = {ID}
    cur = ID
    last_new = 0
    n = 0
    for x in w:
        cur = right_letter(cur, x, mod)
        n += 1
        if cur not in seen:
            seen.add(cur)
            last_new = n
            if len(seen) == G:
                return UkSet(p, k, frozenset(seen), True, n, "whole group reached")
        elif n - last_new >= max(2 * G, 4 * last_new):
            return UkSet(p, k, frozenset(seen), True, n, f"quiet for {n - last_new} steps")
    need = max(2 * G, 4 * last_new)
    return UkSet(p, k, frozenset(seen), False, n, f"quiet for {n - last_new} steps, need {need}")


def uk_set(source: WordSource, p: int, k: int, N_max: int, shift: int = 0) -> UkSet:
    """``U_k(T^shift w)`` from prefixes of length ``0..N_max``."""
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    if source.kind == PERIODIC:
        return _scan_periodic(source.period, shift, p, k, N_max)
    w = prefix(source, shift + N_max)[shift:]
    return _scan_word(w, p, k)


def default_scan_length(p: int, k: int) -> int:
    """Cap on the prefix length of a single scan (scans stop early when saturated)."""
    return 128 * group_order_bound(p, k) + 4096


@dataclass(frozen=True)
class UkCollection:
    """Distinct sets among ``U_k(T^m w)`` for ``m <= shift_max``."""

    sets: tuple
    index: tuple  # shift -> position in ``sets``
    all_saturated: bool

    @property
    def count(self) -> int:
        return len(self.sets)

    def equal_cardinality(self) -> bool | None:
        """``None`` when some member is unsaturated."""
        if not self.all_saturated:
            return None
        return len({len(s) for s in self.sets}) <= 1


def uk_collection(source: WordSource, p: int, k: int, shift_max: int, N_max: int | None = None) -> UkCollection:
    """Scan each shift independently and group equal sets (first-appearance order)."""
    N = N_max or default_scan_length(p, k)
    order: dict[tuple, int] = {}
    sets: list[UkSet] = []
    index = []
    for m in range(shift_max + 1):
        s = uk_set(source, p, k, N, shift=m)
        key = s.canonical()
        if key not in order:
            order[key] = len(sets)
            sets.append(s)
        else:
            # merge saturation evidence: equal content, keep the stronger flag
            j = order[key]
            if s.saturated and not sets[j].saturated:
                sets[j] = s
        index.append(order[key])
    return UkCollection(tuple(sets), tuple(index), all(s.saturated for s in sets))


def shift_identity_check(source: WordSource, p: int, k: int, shift_max: int, N_max: int | None = None) -> dict:
    """Check ``A_{w_m} * U_k(T^m w) = U_k(w)`` for ``m <= shift_max``.

    Each shifted set comes from its own scan; nothing is derived from the
    unshifted one.  Returns counts and the list of failing shifts.
    """
    N = N_max or default_scan_length(p, k)
    mod = p**k
    base = uk_set(source, p, k, N)
    w = prefix(source, shift_max + 1)
    failures = []
    unsaturated = 0 if base.saturated else 1
    cur = ID
    for m in range(shift_max + 1):
        if m:
            cur = right_letter(cur, w[m - 1], mod)
        s = uk_set(source, p, k, N, shift=m)
        if not s.saturated:
            unsaturated += 1
        if s.left_multiply(cur) != base.matrices:
            failures.append(m)
    return {"shifts": shift_max + 1, "failures": failures, "unsaturated": unsaturated, "base_size": len(base)}


def identity_return(source: WordSource, p: int, k: int, N_max: int) -> int | None:
    """Least ``m >= 1`` with ``A_{w_m} = Id`` modulo ``p^k``."""
    mod = p**k
    w = prefix(source, N_max)
    cur = ID
    for i, x in enumerate(w):
        cur = right_letter(cur, x, mod)
        if cur == ID:
            return i + 1
    return None


@dataclass(frozen=True)
class VkSet:
    n: int
    matrices: frozenset
    shifts: tuple


def vk_set(source: WordSource, n: int, p: int, k: int, shift_max: int) -> VkSet:
    """Reduced ``A_{w_m}`` over shifts ``m <= shift_max`` where ``T^m w`` starts with ``w_n``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    mod = p**k
    w = prefix(source, shift_max + n)
    head = w[:n]
    cur = ID
    mats = set()
    shifts = []
    for m in range(shift_max + 1):
        if m:
            cur = right_letter(cur, w[m - 1], mod)
        if w[m:m + n] == head:
            mats.add(cur)
            shifts.append(m)
    return VkSet(n, frozenset(mats), tuple(shifts))


def stabilizes(A: Res, U: UkSet) -> bool:
    return U.left_multiply(A) == U.matrices


def stabilizer_search(source: WordSource, p: int, k: int, n_max: int, shift_max: int, N_max: int | None = None) -> dict:
    """Smallest ``n <= n_max`` such that every element of ``V_k(n, w)`` stabilizes ``U_k(w)``."""
    U = uk_set(source, p, k, N_max or default_scan_length(p, k))
    for n in range(0, n_max + 1):
        V = vk_set(source, n, p, k, shift_max)
        bad = [A for A in V.matrices if not stabilizes(A, U)]
        if not bad:
            return {"n": n, "vk_size": len(V.matrices), "uk_size": len(U), "saturated": U.saturated}
    return {"n": None, "vk_size": None, "uk_size": len(U), "saturated": U.saturated}


# --------------------------------------------------------------------------
# derived word


@dataclass(frozen=True)
class DerivedWord:
    """``letters[i]`` indexes ``collection.sets``: the set ``U_k(T^i w)``."""

    letters: tuple
    collection: UkCollection

    @property
    def saturated(self) -> bool:
        return self.collection.all_saturated


def derived_word(source: WordSource, p: int, k: int, length: int, N_max: int | None = None) -> DerivedWord:
    coll = uk_collection(source, p, k, length - 1, N_max)
    return DerivedWord(coll.index, coll)


def pair_letter_check(source: WordSource, u: DerivedWord) -> dict:
    """Map each two-letter factor of ``u`` to the letters of ``w`` seen beneath it.

    Returns the conflicting factors with their letter sets.
    """
    w = prefix(source, len(u.letters))
    seen: dict[tuple, set] = {}
    for i in range(len(u.letters) - 1):
        seen.setdefault((u.letters[i], u.letters[i + 1]), set()).add(w[i])
    conflicts = {key: sorted(v) for key, v in seen.items() if len(v) > 1}
    return {"pairs": len(seen), "conflicts": conflicts}


def pair_letter_witnesses(source: WordSource, u: DerivedWord) -> list[tuple[int, int, int, int]]:
    """``(i, j, a, a')``: positions with equal ``(b_i, b_{i+1})`` but different letters."""
    w = prefix(source, len(u.letters))
    first: dict[tuple, tuple[int, int]] = {}
    out = []
    for i in range(len(u.letters) - 1):
        key = (u.letters[i], u.letters[i + 1])
        if key in first:
            j, a = first[key]
            if a != w[i]:
                out.append((j, i, a, w[i]))
        else:
            first[key] = (i, w[i])
    return out


def factor_lift_check(source: WordSource, u: DerivedWord, l: int) -> dict:
    """Whether each ``l``-letter factor of ``w`` fixes the ``(l+1)``-letter factor of ``u`` at the same place."""
    L = len(u.letters)
    w = prefix(source, L)
    seen: dict[bytes, set] = {}
    for i in range(L - l):
        seen.setdefault(w[i:i + l], set()).add(u.letters[i:i + l + 1])
    conflicts = [f for f, v in seen.items() if len(v) > 1]
    return {"l": l, "factors": len(seen), "conflicts": len(conflicts)}


def factor_lift_search(source: WordSource, u: DerivedWord, l_max: int) -> int | None:
    for l in range(1, l_max + 1):
        if factor_lift_check(source, u, l)["conflicts"] == 0:
            return l
    return None


# --------------------------------------------------------------------------
# factor graphs


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry

    def count(self) -> int:
        return sum(1 for x in self.parent if self.parent[x] == x)


@dataclass(frozen=True)
class FactorGraph:
    """Bipartite graph: left and right copies of the length-``n`` factors,
    an edge ``(s, t)`` whenever ``st`` is a factor of length ``2n``."""

    n: int
    left: frozenset
    right: frozenset
    edges: frozenset
    component_count: int
    exact: bool
    isolated: int = 0


def factor_graph(source: WordSource, n: int, window: int) -> FactorGraph:
    if n < 1:
        raise ValueError("n must be >= 1")
    Fn = factors(source, n, window)
    F2n = factors(source, 2 * n, window)
    edges = frozenset((f[:n], f[n:]) for f in F2n.factors)
    uf = _UnionFind()
    for s in Fn.factors:
        uf.add(("L", s))
        uf.add(("R", s))
    for s, t in edges:
        uf.add(("L", s))
        uf.add(("R", t))
        uf.union(("L", s), ("R", t))
    touched_left = {s for s, _ in edges}
    touched_right = {t for _, t in edges}
    isolated = len(Fn.factors - touched_left) + len(Fn.factors - touched_right)
    return FactorGraph(n, Fn.factors, Fn.factors, edges, uf.count(), Fn.exact and F2n.exact, isolated)
