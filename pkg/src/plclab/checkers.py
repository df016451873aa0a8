"""Executable hypothesis checks and exact epsilon bounds.

Every inequality is decided in exact arithmetic: p-adic absolute values are
:class:`ExtVal`, products of them with integers are :class:`Magnitude`, and
real-side quantities are integers, fractions or :class:`RealQuadratic`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .dynamics import group_order_bound
from .padic import INF, ExtVal, Magnitude, PrecisionError, vp
from .projective import (
    ProjPoint,
    apply_matrix,
    distance_bound,
    pbad_estimate,
    proj_distance,
    residue_apply,
)
from .semigroup import (
    Mat2,
    NON_SEMISIMPLE,
    EigenData,
    as_word,
    eigen_decompose,
    eigenform,
    eigenform_resultant,
    in_tilde_sl,
    is_power_of,
    letter,
    matrix_of_word,
    minimal_period,
    shares_eigenvector,
    tuple_inverse,
    tuple_mul,
    unipotent,
    word_str,
)
from .surds import RealQuadratic
from .words import PERIODIC, ConcatProgram, WordSource, concat_sequence, prefix

APPLIES = "applies"
HYPOTHESIS_FAILED = "hypothesis_failed"
PRECISION_LIMITED = "precision_limited"
NOT_IN_LMAD = "not_in_lmad"


def fmt_magnitude(m: Magnitude) -> str:
    """Exact string for a positive real ``coeff * p^(e)`` with ``e in {0, 1/2}``."""
    if m.exponent == 0:
        return str(m.coeff)
    return f"{m.coeff}*p^1/2"


def sqrt_decimal(radicand: Magnitude) -> float:
    return math.sqrt(float(radicand))


@dataclass
class Verdict:
    """Outcome of a theorem check.

    ``status`` is one of ``applies``, ``hypothesis_failed``,
    ``precision_limited`` or ``not_in_lmad``.  For ``applies`` the pair is
    outside ``LMad_epsilon``; ``epsilon_squared`` holds the exact square of
    epsilon when epsilon is a square root, otherwise ``epsilon`` is exact.
    """

    status: str
    reason: str
    epsilon: Magnitude | None = None
    epsilon_squared: Magnitude | None = None
    quantities: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    @property
    def epsilon_value(self) -> float | None:
        if self.epsilon is not None:
            return float(self.epsilon)
        if self.epsilon_squared is not None:
            return sqrt_decimal(self.epsilon_squared)
        return None

    def epsilon_sq_exact(self) -> Fraction | None:
        """Square of epsilon as an exact rational (``None`` if irrational or absent)."""
        if self.epsilon_squared is not None:
            if self.epsilon_squared.exponent != 0:
                return None
            return self.epsilon_squared.coeff
        if self.epsilon is not None:
            return self.epsilon.squared()
        return None

    def to_dict(self) -> dict:
        out = {"status": self.status, "reason": self.reason, "quantities": self.quantities,
               "caveats": list(self.caveats)}
        if self.epsilon is not None:
            out["epsilon"] = fmt_magnitude(self.epsilon)
        if self.epsilon_squared is not None:
            out["epsilon_squared"] = fmt_magnitude(self.epsilon_squared)
        if self.epsilon_value is not None:
            out["epsilon_decimal"] = f"{self.epsilon_value:.6e}"
        return out


# --------------------------------------------------------------------------
# trajectory balls


def trajectory_keys(source: WordSource, x_p: ProjPoint, k: int, window: int) -> tuple[set, str]:
    """Residues modulo ``p^k`` of ``x_{p,n} = A_{a_n} ... A_{a_1} x_p``.

    Periodic sources are followed until the ``(phase, point)`` state repeats,
    which yields the complete set; otherwise ``n <= window``.
    """
    p = x_p.prime
    mod = p**k
    pt = x_p.key(k)
    keys = {pt}
    if source.kind == PERIODIC:
        u = source.period
        l = len(u)
        state_seen = {(0, pt)}
        n = 0
        while True:
            pt = residue_apply(letter(u[n % l]).as_tuple(), pt, p, mod)
            n += 1
            state = (n % l, pt)
            if state in state_seen:
                return keys, f"complete: periodic state cycle after {n} steps"
            state_seen.add(state)
            keys.add(pt)
    w = prefix(source, window)
    for x in w:
        pt = residue_apply((0, 1, 1, x), pt, p, mod)
        keys.add(pt)
    return keys, f"window of {window} steps"


def orbit_keys(M: Mat2, x_p: ProjPoint, k: int, m: int) -> list:
    """Distinct residues of ``M^j x_p`` for ``0 <= j <= m`` (stops at the first repeat)."""
    p = x_p.prime
    mod = p**k
    pt = x_p.key(k)
    out = [pt]
    seen = {pt}
    t = M.as_tuple()
    for _ in range(m):
        pt = residue_apply(t, pt, p, mod)
        if pt in seen:
            break
        seen.add(pt)
        out.append(pt)
    return out


def periodic_power_certificate(source: WordSource, A: Mat2) -> int | None:
    """``N`` with ``A = A_{w_N}`` and ``T^N w = w`` for a periodic source, else ``None``.

    Then ``(A^T)^j x_p = x_{p, jN}`` for every ``j``, so the orbit lies on the
    trajectory itself.
    """
    if source.kind != PERIODIC:
        return None
    u = source.period
    B = matrix_of_word(u)
    P = Mat2.identity()
    r = 0
    limit = max(abs(A.a), abs(A.b), abs(A.c), abs(A.d)) + 2
    while True:
        P = P * B
        r += 1
        if P == A:
            return r * len(u)
        if max(abs(P.a), abs(P.b), abs(P.c), abs(P.d)) > limit:
            return None


def verify_orbit_in_trajectory(A: Mat2, x_p: ProjPoint, source: WordSource, k: int, m: int,
                               window: int) -> tuple[bool, str]:
    """Decide ``{x_p, A^T x_p, ..., (A^T)^m x_p} ⊂ B_k`` (``True`` only when certified)."""
    N = periodic_power_certificate(source, A)
    if N is not None:
        return True, f"orbit lies on the trajectory: A is the matrix of the first {N} letters and the period divides {N}"
    orbit = orbit_keys(A.transpose(), x_p, k, m)
    traj, how = trajectory_keys(source, x_p, k, window)
    missing = [pt for pt in orbit if pt not in traj]
    if missing:
        return False, f"{len(missing)} of {len(orbit)} orbit residues not on trajectory ({how})"
    return True, f"all {len(orbit)} orbit residues found on trajectory ({how})"


# --------------------------------------------------------------------------
# main theorem


@dataclass
class ThMainInstance:
    """All quantities entering the main theorem for one ``(A, x_p, w)`` and ``(k, m)``."""

    A: Mat2
    x_p: ProjPoint
    source: WordSource
    p: int
    k: int
    m: int
    eigen: EigenData
    eps1: ExtVal
    eps2: ExtVal
    eps3: ExtVal
    delta: ExtVal
    d_w1w2: ExtVal
    kappa: int
    resolved: bool = True
    note: str = ""

    @property
    def ramified(self) -> bool:
        return self.eigen.ramified

    def th1_rhs_squared(self) -> Magnitude:
        """Square of the right-hand side of the precision condition."""
        p = self.p
        num = Magnitude.of(p, self.d_w1w2) * self.m
        den = (Magnitude.of(p, self.eps3) ** 2 * Magnitude.of(p, self.delta) ** 2
               * Magnitude.of(p, self.eps1) * Magnitude.of(p, self.eps2) * (2 * p * self.kappa))
        return num / den

    def epsilon_squared(self) -> Magnitude:
        p = self.p
        num = Magnitude.of(p, self.eps1) * Magnitude.of(p, self.eps2) * (2 * p * self.kappa)
        den = (Magnitude.of(p, self.eps3) ** 2 * Magnitude.of(p, self.delta) ** 2
               * Magnitude.of(p, self.d_w1w2) * self.m)
        return num / den

    def quantities(self) -> dict:
        return {
            "p": self.p, "k": self.k, "m": self.m, "kappa": self.kappa,
            "eps1": str(self.eps1), "eps2": str(self.eps2), "eps3": str(self.eps3),
            "delta": str(self.delta), "d_w1w2": str(self.d_w1w2),
            "eigen_class": self.eigen.kind, "ramified": self.eigen.ramified,
        }


def max_m_th_main(p: int, k: int, eps1: ExtVal, eps2: ExtVal, eps3: ExtVal, delta: ExtVal,
                  d_w1w2: ExtVal, kap: int) -> int:
    """Largest ``m`` satisfying the precision condition ``p^k >= sqrt(d m) / (...)``."""
    bound = (Magnitude(p, Fraction(1), 2 * k) * Magnitude.of(p, eps3) ** 2 * Magnitude.of(p, delta) ** 2
             * Magnitude.of(p, eps1) * Magnitude.of(p, eps2) * (2 * p * kap) / Magnitude.of(p, d_w1w2))
    return bound.floor()


def build_th_main(A: Mat2 | str | bytes, x_p: ProjPoint, source: WordSource, k: int,
                  m: int | str = "max", work_precision: int | None = None) -> ThMainInstance:
    """Compute eigenvectors, distances, ``kappa`` and ``eps3`` for the main theorem."""
    if not isinstance(A, Mat2):
        A = matrix_of_word(A)
    p = x_p.prime
    if not in_tilde_sl(A):
        raise ValueError(f"matrix {A} is outside the admissible class: {in_tilde_sl(A).reason}")
    K = work_precision or max(k, 8) + 4
    eig = eigen_decompose(A, p, K)
    e1, ok1 = distance_bound(x_p, eig.v1)
    e2, ok2 = distance_bound(x_p, eig.v2)
    d12 = proj_distance(eig.v1, eig.v2)
    resolved = ok1 and ok2
    inv_p = ExtVal(1)
    delta = min(e1, e2, inv_p)
    if m == "max":
        if resolved and not delta.is_zero:
            m_val = max_m_th_main(p, k, e1, e2, eig.eps3, delta, d12, eig.kappa)
        else:
            m_val = 0
    else:
        m_val = int(m)
    note = "" if resolved else "x_p agrees with an eigenvector to working precision"
    return ThMainInstance(A, x_p, source, p, k, m_val, eig, e1, e2, eig.eps3, delta, d12, eig.kappa,
                          resolved, note)


def check_th_main(inst: ThMainInstance, trajectory_window: int | None = None) -> Verdict:
    """Verify both hypotheses of the main theorem and return the exact epsilon."""
    p, k = inst.p, inst.k
    q = inst.quantities()
    caveats = []
    if inst.ramified:
        caveats.append("eigenvalues in a ramified extension: half-integral exponents")
    if not inst.resolved or inst.delta.is_zero:
        return Verdict(HYPOTHESIS_FAILED, "delta zero: x_p is an eigenvector of A^T"
                       + ("" if inst.resolved else " (to working precision)"), quantities=q, caveats=caveats)
    if inst.m < 1:
        return Verdict(HYPOTHESIS_FAILED, "no m >= 1 satisfies the precision condition at this k",
                       quantities=q, caveats=caveats)
    lhs = Magnitude(p, Fraction(1), 2 * k)
    rhs = inst.th1_rhs_squared()
    if lhs < rhs:
        deficit = rhs / lhs
        q["precision_deficit_squared"] = fmt_magnitude(deficit)
        return Verdict(HYPOTHESIS_FAILED, f"precision condition violated: p^2k falls short by factor {fmt_magnitude(deficit)}",
                       quantities=q, caveats=caveats)
    window = trajectory_window if trajectory_window is not None else 10 * p**k
    try:
        ok, how = verify_orbit_in_trajectory(inst.A, inst.x_p, inst.source, k, inst.m, window)
    except PrecisionError as exc:
        return Verdict(PRECISION_LIMITED, f"orbit residues unresolved: {exc}", quantities=q, caveats=caveats)
    q["orbit_check"] = how
    if not ok:
        return Verdict(HYPOTHESIS_FAILED, "orbit condition unverified within window: " + how,
                       quantities=q, caveats=caveats)
    eps_sq = inst.epsilon_squared()
    return Verdict(APPLIES, "both hypotheses hold; the pair lies outside LMad_epsilon",
                   epsilon_squared=eps_sq, quantities=q, caveats=caveats)


# --------------------------------------------------------------------------
# unipotent theorem


def check_th_da(a: int, x_p: ProjPoint, source: WordSource, k: int, m: int | str = "max",
                trajectory_window: int | None = None) -> Verdict:
    """The unipotent variant with ``A = D_a``."""
    if a == 0:
        raise ValueError("a must be nonzero")
    p = x_p.prime
    # x_p = (q0, q0'); delta = |a q0'|_p
    q0p = x_p.y
    if q0p.is_zero:
        return Verdict(NOT_IN_LMAD, "delta = 0: x_p is the point (1 : 0)", quantities={"delta": "0", "a": a})
    try:
        nq = q0p.norm()
    except PrecisionError:
        return Verdict(PRECISION_LIMITED, "second coordinate of x_p unresolved", quantities={"a": a})
    delta = ExtVal(vp(a, p)) * nq
    q = {"a": a, "p": p, "k": k, "delta": str(delta)}
    pd = Magnitude.of(p, delta) * p
    if m == "max":
        m = (Magnitude(p, Fraction(1), k) * pd).floor()
    q["m"] = m
    if m < 1:
        return Verdict(HYPOTHESIS_FAILED, "no m >= 1 satisfies p^k >= m / (p delta)", quantities=q)
    if Magnitude(p, Fraction(1), k) < Magnitude(p, Fraction(m)) / pd:
        return Verdict(HYPOTHESIS_FAILED, "precision condition p^k >= m/(p delta) violated", quantities=q)
    window = trajectory_window if trajectory_window is not None else 10 * p**k
    ok, how = verify_orbit_in_trajectory(unipotent(a), x_p, source, k, m, window)
    q["orbit_check"] = how
    if not ok:
        return Verdict(HYPOTHESIS_FAILED, "orbit condition unverified within window: " + how, quantities=q)
    eps = Magnitude(p, Fraction(p, m)) / Magnitude.of(p, delta)
    return Verdict(APPLIES, "both hypotheses hold; the pair lies outside LMad_epsilon", epsilon=eps, quantities=q)


# --------------------------------------------------------------------------
# PBad floor for quadratic points


def quadratic_pbad_floor(form: tuple[int, int, int], point: ProjPoint) -> Magnitude:
    """Proven lower bound for ``|a q1 + b q2|_p max(a^2, b^2)`` when ``point`` is a root of ``form``.

    ``form = (A, B, C)`` means ``A*y^2 + B*x*y + C*x^2 = 0`` at ``point = (x : y)``.
    Writing the affine coordinate ``z`` as a root of ``alpha z^2 + beta z + gamma``,
    the value is at least ``1 / (H * |alpha|_p * max(1, |conj z|_p))`` with
    ``H = |alpha| + |beta| + |gamma|``.
    """
    A, B, C = form
    p = point.prime
    if point.chart == 0:
        alpha, beta, gamma = A, B, C
    else:
        alpha, beta, gamma = C, B, A
    if alpha == 0 or gamma == 0:
        raise ValueError("form has a rational root")
    z = point.coordinate
    H = abs(alpha) + abs(beta) + abs(gamma)
    n_alpha = ExtVal(vp(alpha, p))
    n_z = z.norm()
    n_conj = ExtVal(vp(gamma, p)) / (n_alpha * n_z)
    big = max(ExtVal(0), n_conj)
    return Magnitude(p, Fraction(1, H)) / (Magnitude.of(p, n_alpha) * Magnitude.of(p, big))


# --------------------------------------------------------------------------
# periodic words


@dataclass
class LmadReport:
    period: str
    prime: int
    k: int
    bounds: tuple
    eigenvectors: list
    eigen_pbad: list          # per eigenvector: list over bounds of (epsilon string, witness, limited)
    trajectory_pbad: list     # per eigenvector: min epsilon over the first |u| images, per bound
    floors: list
    if_direction: bool
    only_if: list             # verdicts for sampled points
    caveats: list

    def to_dict(self) -> dict:
        return {
            "period": self.period, "p": self.prime, "k": self.k, "bounds": list(self.bounds),
            "eigenvectors": self.eigenvectors, "eigen_pbad": self.eigen_pbad,
            "trajectory_pbad": self.trajectory_pbad, "floors": self.floors,
            "if_direction_supported": self.if_direction,
            "only_if": [v.to_dict() for v in self.only_if], "caveats": self.caveats,
        }


def lmad_certificate_periodic(period: str | bytes, p: int, k: int, bounds: Sequence[int] = (10, 50, 100),
                              samples: int = 5, sample_k: int | None = None, seed: int = 0) -> LmadReport:
    """Evidence for both directions on a periodic word.

    The eigenvectors of ``A_u^T`` are scanned for small PBad constants (the
    "if" direction); random rational points get the main-theorem verdict (the
    "only if" direction).
    """
    u = minimal_period(as_word(period))
    A = matrix_of_word(u)
    eig = eigen_decompose(A, p, k)
    source = WordSource.periodic(u)
    form = eigenform(A)
    pbad_rows, traj_rows, floors, vecs = [], [], [], []
    positive = True
    for v in (eig.v1, eig.v2):
        vecs.append(str(v))
        row = []
        for B in bounds:
            r = pbad_estimate(v, B)
            row.append({"B": B, "epsilon": fmt_magnitude(r.epsilon), "witness": list(r.witness),
                        "precision_limited": r.precision_limited})
            positive = positive and r.positive and not r.precision_limited
        pbad_rows.append(row)
        floor = quadratic_pbad_floor(form, v)
        floors.append(fmt_magnitude(floor))
        images = []
        pt = v
        for x in u:
            pt = apply_matrix(letter(x), pt)
            images.append(pt)
        trow = []
        for B in bounds:
            vals = [pbad_estimate(img, B) for img in images]
            best = min(vals, key=lambda r: r.epsilon)
            trow.append({"B": B, "epsilon": fmt_magnitude(best.epsilon)})
            positive = positive and best.positive
        traj_rows.append(trow)
    rng = random.Random(seed)
    only_if = []
    kk = sample_k or k
    for _ in range(samples):
        while True:
            y = rng.randrange(p * p)
            x_p = ProjPoint.from_ints(1, y, p, kk + 8)
            inst = build_th_main(A, x_p, source, kk)
            if inst.resolved and not inst.delta.is_zero:
                break
        only_if.append(check_th_main(inst))
    caveats = [f"PBad evidence limited to the box max(|a|,|b|) <= {max(bounds)}"]
    return LmadReport(word_str(u), p, k, tuple(bounds), vecs, pbad_rows, traj_rows, floors, positive,
                      only_if, caveats)


# --------------------------------------------------------------------------
# concatenation scheme


def _all_group_elements(p: int, k: int):
    mod = p**k
    for a in range(mod):
        for b in range(mod):
            for c in range(mod):
                for d in range(mod):
                    if (a * d - b * c) % mod in (1, mod - 1):
                        yield (a, b, c, d)


@dataclass
class ConcatReport:
    program: str
    seeds: list
    p: int
    k: int
    pure_period: bool
    preperiod: int
    period: int
    steps: int
    group_bound: int
    uniqueness: str
    uniqueness_ok: bool
    tower_checks: list
    exclusion: str | None
    seed_pairs: list

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def concat_scheme_checker(program: ConcatProgram, seeds: Sequence, p: int, k: int,
                          n_max: int | None = None, tower_terms: int = 12) -> ConcatReport:
    """Reduce the recursion modulo ``p^k`` and look for pure periodicity."""
    seeds = [as_word(s) for s in seeds]
    source = WordSource.concat(program, seeds)  # validates the seeds
    m = program.arity
    mod = p**k
    G = group_order_bound(p, k)
    limit = n_max or G**m + m + 1
    ident = (1, 0, 0, 1)
    mats = tuple(matrix_of_word(s, mod).as_tuple() for s in seeds)

    def mul(x, y):
        return tuple_mul(x, y, mod)

    def step(state):
        W = program.evaluate_matrix(state, mul, ident)
        return state[1:] + (mul(state[-1], W),)

    seen = {mats: 0}
    state = mats
    n = 0
    pre = per = None
    while n < limit:
        state = step(state)
        n += 1
        if state in seen:
            pre = seen[state]
            per = n - pre
            break
        seen[state] = n
    pure = pre == 0
    # backward uniqueness: X appears ``count`` times in W(X, ...)
    count = sum(1 for i in program.body if i == 1)
    if count == 0:
        uniqueness, uniq_ok = "X1 absent from the concatenation map: s_n is not determined by its successors", False
    elif count == 1:
        uniqueness, uniq_ok = "X1 occurs once: X = P^-1 s^-1 s' Q^-1 is the only solution", True
    else:
        uniq_ok = True
        if G > 20000:
            uniqueness, uniq_ok = "X1 repeats and the group is too large to enumerate", False
        else:
            group = list(_all_group_elements(p, k))
            for st in list(seen)[: 64]:
                target = step(st)[-1]
                sols = sum(1 for X in group if step((X,) + st[1:])[-1] == target)
                if sols > 1:
                    uniq_ok = False
                    break
            uniqueness = ("brute force over the group: unique solutions" if uniq_ok
                          else "brute force over the group: multiple solutions")
    # members of the V towers: T^{L(n-1)} w starts with s_{n-m}
    seq = concat_sequence(program, tuple(seeds), 0)
    while len(seq) < m + tower_terms:
        seq.append(seq[-1] + program.evaluate(tuple(seq[-m:])))
    total = max(len(x) for x in seq)
    w = prefix(source, 2 * total)
    towers = []
    for idx in range(m + 1, len(seq) + 1):
        L_prev = len(seq[idx - 2])
        L_head = len(seq[idx - m - 1])
        ok = w[L_prev:L_prev + L_head] == w[:L_head] if L_prev + L_head <= len(w) else None
        towers.append({"n": idx, "shift": L_prev, "prefix_length": L_head, "holds": ok})
    # exclusion stamp: two seed matrices in the admissible class with four distinct eigenvectors
    pairs = []
    exclusion = None
    exact = [matrix_of_word(s) for s in seeds]
    for i in range(len(exact)):
        for j in range(i + 1, len(exact)):
            A1, A2 = exact[i], exact[j]
            if A1 == A2:
                continue
            both = bool(in_tilde_sl(A1)) and bool(in_tilde_sl(A2))
            res = eigenform_resultant(A1, A2)
            pairs.append({"pair": [word_str(seeds[i]), word_str(seeds[j])], "admissible": both, "resultant": res})
            if both and res != 0 and pure and uniq_ok and exclusion is None:
                exclusion = (f"not in LMad for any x_p: A_{word_str(seeds[i])} and A_{word_str(seeds[j])} recur in "
                             f"every V tower and have four distinct eigenvectors")
    return ConcatReport(str(program), [word_str(s) for s in seeds], p, k, pure, pre if pre is not None else -1,
                        per if per is not None else -1, n, G, uniqueness, uniq_ok, towers, exclusion, pairs)


# --------------------------------------------------------------------------
# real side


def cf_denominators(quotients: Sequence[int], n: int) -> list[int]:
    """``q_0 .. q_n`` for ``[a0; a1, a2, ...]``."""
    q_prev, q = 0, 1
    out = [1]
    for i in range(1, n + 1):
        q_prev, q = q, quotients[i] * q + q_prev
        out.append(q)
    return out


def cf_numerators(quotients: Sequence[int], n: int) -> list[int]:
    p_prev, pn = 1, quotients[0]
    out = [pn]
    for i in range(1, n + 1):
        p_prev, pn = pn, quotients[i] * pn + p_prev
        out.append(pn)
    return out


@lru_cache(maxsize=256)
def quadratic_cf_bound(x: RealQuadratic, max_terms: int = 10000) -> tuple[tuple[int, ...], int]:
    """Partial quotients through one full period and their exact maximum (excluding ``a0``)."""
    seen = {}
    out = []
    y = x
    for i in range(max_terms):
        key = (y.a, y.b, y.c)
        if key in seen and i > 0:
            start = seen[key]
            return tuple(out), max(out[max(start, 1):] + out[1:]) if len(out) > 1 else out[0]
        seen[key] = i
        f = y.floor()
        out.append(f)
        y = y.shift(-f).reciprocal()
    raise ValueError("continued fraction period not found")


@dataclass
class Lem1Report:
    n: int
    a: int
    b: int
    p: int
    q_n: int
    q_n1: int
    r: int
    N: int
    lhs: str
    rhs: str
    holds: bool
    exact: bool
    pair_threshold: str | None
    pair_holds: bool | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def prop_lem1_check(x: RealQuadratic | Sequence[int], n: int, a: int, b: int, p: int,
                    eps: Fraction | None = None) -> Lem1Report:
    """``r |r|_p ||r x|| <= 4 max(a^2, b^2) (N + 1) |r|_p`` with ``r = |a q_n + b q_{n+1}|``.

    ``x`` is either a quadratic irrational or a finite list of partial
    quotients ``[a0, a1, ...]`` (then ``||r x||`` is bounded above rigorously
    via the last convergent).
    """
    if isinstance(x, RealQuadratic):
        quotients = x.continued_fraction(n + 2)
        _, N = quadratic_cf_bound(x)
    else:
        quotients = list(x)
        if len(quotients) < n + 2:
            raise ValueError("need partial quotients through index n+1")
        N = max(quotients[1:])
    qs = cf_denominators(quotients, n + 1)
    qn, qn1 = qs[n], qs[n + 1]
    r = abs(a * qn + b * qn1)
    M = max(a * a, b * b)
    bound = 4 * M * (N + 1)
    rp = ExtVal(vp(r, p)) if r else ExtVal(INF)
    if r == 0:
        holds, exact = True, True
        lhs_s = "0"
    elif isinstance(x, RealQuadratic):
        dist = x.distance_to_int(r)
        # r * ||r x|| <= bound  <=>  ||r x|| <= bound / r
        holds = dist.sign_minus(Fraction(bound, r)) <= 0
        exact = True
        lhs_s = f"{r}*||{r}x||*{rp}"
    else:
        ps = cf_numerators(quotients, len(quotients) - 1)
        c = Fraction(ps[-1], cf_denominators(quotients, len(quotients) - 1)[-1])
        qM = c.denominator
        rc = r * c
        near = abs(rc - round(rc))
        upper = near + Fraction(r, qM * qM)
        holds = r * upper <= bound
        exact = False
        lhs_s = f"<= {r}*({near} + {r}/{qM}^2)*{rp}"
    rhs_s = f"{bound}*{rp}"
    thr = pair_ok = None
    if r:
        threshold = Magnitude.of(p, rp) * (4 * (N + 1) * M)
        thr = fmt_magnitude(threshold)
        if eps is not None:
            pair_ok = Magnitude(p, Fraction(eps)) <= threshold
    elif eps is not None:
        pair_ok = True
    return Lem1Report(n, a, b, p, qn, qn1, r, N, lhs_s, rhs_s, holds, exact, thr, pair_ok)


# --------------------------------------------------------------------------
# stabilizer screen


@dataclass
class VpwVerdict:
    status: str
    reason: str
    survivors: list
    pairs: list
    caveats: list

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def th_vpw_screen(candidates: Sequence[Mat2 | str | bytes], x_p: ProjPoint | None, p: int, k: int = 12) -> VpwVerdict:
    """Screen observed stabilizer matrices against a point (or all points when ``x_p`` is ``None``)."""
    words = [as_word(c) if not isinstance(c, Mat2) else None for c in candidates]
    mats = [c if isinstance(c, Mat2) else matrix_of_word(c) for c in candidates]
    caveats = ["conditional on the candidates lying in the infinite-precision stabilizer set"]
    pairs = []
    full_exclusion = None
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            A, B = mats[i], mats[j]
            shared = shares_eigenvector(A, B)
            entry = {"pair": [i, j], "shared_eigenvector": shared}
            if shared and words[i] is not None and words[j] is not None:
                entry["common_power_word"] = is_power_of(words[i], words[j])
            pairs.append(entry)
            if not shared and in_tilde_sl(A) and in_tilde_sl(B) and full_exclusion is None:
                full_exclusion = (i, j)
    if full_exclusion is not None:
        i, j = full_exclusion
        return VpwVerdict("excluded_all", f"candidates {i} and {j} have four distinct eigenvectors: "
                          "excluded for every x_p", [], pairs, caveats)
    admissible = [(i, A) for i, A in enumerate(mats) if in_tilde_sl(A)]
    if not admissible:
        return VpwVerdict("no_verdict", "no candidate lies in the admissible class", [], pairs, caveats)
    i, A = admissible[0]
    eig = eigen_decompose(A, p, k, with_eps3=False)
    survivors = [str(eig.v1), str(eig.v2)]
    if x_p is None:
        return VpwVerdict("at_most_two", f"only the eigenvectors of candidate {i} can survive", survivors, pairs, caveats)
    for idx, A in admissible:
        e = eigen_decompose(A, p, k, with_eps3=False)
        d1, ok1 = distance_bound(x_p, e.v1)
        d2, ok2 = distance_bound(x_p, e.v2)
        if ok1 and ok2 and not d1.is_zero and not d2.is_zero:
            return VpwVerdict("excluded", f"x_p is not an eigenvector of candidate {idx}", survivors, pairs, caveats)
    return VpwVerdict("at_most_two", "x_p matches an eigenvector of every admissible candidate", survivors, pairs,
                      caveats)
