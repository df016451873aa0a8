"""Acceptance suite: one or more tests per numbered criterion, each with its runtime budget."""

import random
import time
from pathlib import Path

import pytest

from plclab import checkers as ck
from plclab import experiments as ex
from plclab.dynamics import factor_graph, shift_identity_check, uk_collection
from plclab.padic import INF, ExtVal, PAdic, padic_log, vp
from plclab.projective import ProjPoint, apply_matrix, distance_bound, pbad_estimate
from plclab.semigroup import Mat2, eigen_decompose, eigenform, in_tilde_sl, kappa, matrix_of_word, words_up_to
from plclab.surds import RealQuadratic
from plclab.words import ConcatProgram, WordSource, complexity, factors, fibonacci, prefix, thue_morse

SPECS = Path(__file__).resolve().parent.parent / "specs"


class Budget:
    def __init__(self, seconds: float):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False

    def check(self):
        assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


# -- 1 ----------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_log_isometry():
    rng = random.Random(20240601)
    failures = []
    with Budget(5) as b:
        for p in (3, 5, 11):
            done = 0
            while done < 1000:
                x = 1 + p * rng.randrange(p**11)
                y = 1 + p * rng.randrange(p**11)
                if x == y:
                    continue
                X, Y = PAdic.from_int(x, p, 12), PAdic.from_int(y, p, 12)
                if (padic_log(X) - padic_log(Y)).norm() != (X - Y).norm():
                    failures.append((p, x, y))
                done += 1
    b.check()
    assert failures == []


# -- 2 and 3 ----------------------------------------------------------------


CF_WORDS = [w for w in words_up_to(6, range(1, 5))]


@pytest.mark.criterion(2)
def test_kappa_bound():
    one_over_p = ExtVal(1)
    failures = []
    with Budget(30) as b:
        for p in (2, 3, 5):
            for w in CF_WORDS:
                A = matrix_of_word(w)
                kap = kappa(A, p)
                e = eigen_decompose(A, p, 4, with_eps3=False)
                # norm_bound is exact when resolved and an upper bound otherwise
                ok = kap <= p * p and all((lam**kap - 1).norm_bound() <= one_over_p for lam in (e.lambda1, e.lambda2))
                if not ok:
                    failures.append((p, w))
    b.check()
    assert len(CF_WORDS) == 4 + 16 + 64 + 256 + 1024 + 4096
    assert failures == []


@pytest.mark.criterion(3)
def test_cf_words_are_admissible():
    with Budget(30) as b:
        bad = [w for w in CF_WORDS if not in_tilde_sl(matrix_of_word(w))]
    b.check()
    assert bad == []


# -- 4 ----------------------------------------------------------------------


def _int_distance_exponent(x: tuple[int, int], y: tuple[int, int], p: int):
    """Valuation of d(x, y) for integer vectors: v(det) - min v(x) - min v(y)."""
    det = x[0] * y[1] - x[1] * y[0]
    if det == 0:
        return INF
    return vp(det, p) - min(vp(x[0], p), vp(x[1], p)) - min(vp(y[0], p), vp(y[1], p))


@pytest.mark.criterion(4)
def test_congruent_matrices_move_points_by_at_most_p_to_minus_k():
    rng = random.Random(77)
    failures = []
    with Budget(5) as b:
        for _ in range(500):
            p = rng.choice([2, 3, 5, 7, 11])
            k = rng.randint(1, 6)
            A = matrix_of_word(bytes(rng.randint(1, 9) for _ in range(rng.randint(1, 6))))
            E = [rng.randint(-50, 50) for _ in range(4)]
            q = p**k
            B = Mat2(A.a + q * E[0], A.b + q * E[1], A.c + q * E[2], A.d + q * E[3])
            w = (rng.randint(-(10**6), 10**6), rng.randint(1, 10**6))
            v = (rng.randint(-(10**6), 10**6), rng.randint(1, 10**6))
            W, V = ProjPoint.from_ints(*w, p, 80), ProjPoint.from_ints(*v, p, 80)
            lhs, lhs_exact = distance_bound(apply_matrix(A, W), V)
            rhs, rhs_exact = distance_bound(apply_matrix(B, W), V)
            # second route: exact integer determinants
            Aw = (A.a * w[0] + A.b * w[1], A.c * w[0] + A.d * w[1])
            Bw = (B.a * w[0] + B.b * w[1], B.c * w[0] + B.d * w[1])
            lv, rv = _int_distance_exponent(Aw, v, p), _int_distance_exponent(Bw, v, p)
            if lhs_exact:
                assert lhs == ExtVal.from_exponent(lv)
            if rhs_exact:
                assert rhs == ExtVal.from_exponent(rv)
            if not ExtVal.from_exponent(lv) <= max(ExtVal.from_exponent(rv), ExtVal(k)):
                failures.append((p, k, A, B, w, v))
    b.check()
    assert failures == []


# -- 5 and 6 ----------------------------------------------------------------


SHIFT_SOURCES = {"periodic-12": WordSource.periodic("12"), "fibonacci": fibonacci(), "thue-morse": thue_morse()}
_shift_cache: dict = {}


def _shift_runs():
    """Runs the shift sweep once; returns (results by (source, p, k), elapsed seconds)."""
    if not _shift_cache:
        start = time.perf_counter()
        runs = {}
        for name, src in SHIFT_SOURCES.items():
            for p in (2, 3):
                for k in (1, 2):
                    runs[(name, p, k)] = (shift_identity_check(src, p, k, 100), uk_collection(src, p, k, 100))
        _shift_cache["runs"] = runs
        _shift_cache["elapsed"] = time.perf_counter() - start
    return _shift_cache["runs"], _shift_cache["elapsed"]


@pytest.mark.criterion(5)
def test_shift_identity():
    runs, elapsed = _shift_runs()
    assert elapsed < 60
    for key, (res, _) in runs.items():
        assert res["shifts"] == 101
        assert res["unsaturated"] == 0, key
        assert res["failures"] == [], key


@pytest.mark.criterion(6)
def test_equal_cardinality():
    runs, _ = _shift_runs()
    for key, (_, coll) in runs.items():
        saturated = [s for s in coll.sets if s.saturated]
        assert saturated, key
        assert len({len(s) for s in saturated}) == 1, key


# -- 7 ----------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_golden_word_both_directions():
    p = 11
    A = matrix_of_word("1")
    src = WordSource.periodic("1")
    with Budget(120) as b:
        eig = eigen_decompose(A, p, 16)
        for v in (eig.v1, eig.v2):
            reps = [pbad_estimate(v, B) for B in (10, 50, 100)]
            assert all(r.positive and not r.precision_limited for r in reps)
            assert reps[0].epsilon == reps[1].epsilon == reps[2].epsilon
            assert reps[0].epsilon >= ck.quadratic_pbad_floor(eigenform(A), v)
        rng = random.Random(11)
        tested = 0
        while tested < 20:
            y = rng.randrange(p**6)
            x = ProjPoint.from_ints(1, y, p, 24)
            verdicts = [ck.check_th_main(ck.build_th_main(A, x, src, k)) for k in (4, 8, 12)]
            assert all(v.status == ck.APPLIES for v in verdicts), (y, [v.reason for v in verdicts])
            sq = [v.epsilon_squared for v in verdicts]
            assert sq[0] > sq[1] > sq[2], y
            tested += 1
    b.check()


# -- 8 ----------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_convergent_inequality():
    failures = []
    total = 0
    with Budget(10) as b:
        for x in (RealQuadratic.golden_ratio(), RealQuadratic(-1, 1, 1, 2)):
            for p in (2, 3):
                for n in range(41):
                    for a in range(-5, 6):
                        for bb in range(-5, 6):
                            if a == 0 and bb == 0:
                                continue
                            r = ck.prop_lem1_check(x, n, a, bb, p)
                            total += 1
                            if not (r.holds and r.exact):
                                failures.append((str(x), p, n, a, bb))
    b.check()
    assert total == 2 * 2 * 41 * 120
    assert failures == []


# -- 9 ----------------------------------------------------------------------


def _naive_factor_count(word: bytes, n: int) -> int:
    return len({word[i:i + n] for i in range(len(word) - n + 1)})


@pytest.mark.criterion(9)
def test_complexity_suite():
    with Budget(10) as b:
        for n in range(1, 13):
            fs = factors(fibonacci(), n, 4096)
            assert fs.exact and len(fs) == n + 1
        tm_bits = bytes(1 + bin(i).count("1") % 2 for i in range(4096))
        tm = [complexity(thue_morse(), n, 4096) for n in range(1, 5)]
        assert tm == [2, 4, 6, 10] == [_naive_factor_count(tm_bits, n) for n in range(1, 5)]
        for period in ("1", "12", "1123", "2131"):
            src = WordSource.periodic(period)
            vals = [complexity(src, n, 256) for n in range(1, 16)]
            assert vals[-1] == vals[-2] == len(period)
    b.check()


# -- 10 ---------------------------------------------------------------------


@pytest.mark.criterion(10)
def test_edge_law_and_thue_morse_table(tmp_path):
    with Budget(120) as b:
        spec = ex.load_spec(str(SPECS / "thue_morse_graphs.ini"))
        assert spec.get("prefix_window") == str(2**16)
        record = ex.run(spec)
        ex.write_results(record, str(tmp_path))
    b.check()
    rows = record.tables["factor_graph"]
    assert [r["n"] for r in rows] == list(range(1, 9))
    assert all(r["exact"] for r in rows)
    assert all(r["edges"] == r["P_2n"] for r in rows)
    verdict = next(v for v in record.verdicts if v["checker"] == "factor_graph")
    assert verdict["data"]["component_counts"] == [r["components"] for r in rows]
    assert verdict["data"]["trend"]
    csv = (tmp_path / "thue_morse_graphs.factor_graph.csv").read_text().splitlines()
    assert len(csv) == 9
    for src in (fibonacci(), WordSource.periodic("123"), WordSource.sturmian(RealQuadratic(-1, 1, 1, 2))):
        for n in range(1, 7):
            g = factor_graph(src, n, 2**12)
            if g.exact:
                assert len(g.edges) == complexity(src, 2 * n, 2**12)


# -- 11 ---------------------------------------------------------------------


@pytest.mark.criterion(11)
def test_fibonacci_concat_pipeline():
    src = WordSource.concat(ConcatProgram(2, (1,)), ["2", "1"])
    assert prefix(src, 500) == prefix(fibonacci(), 500)
    with Budget(30) as b:
        rep = ck.concat_scheme_checker(src.program, src.seeds, 2, 3)
    b.check()
    assert rep.pure_period and rep.preperiod == 0
    assert 0 < rep.period <= rep.group_bound
    assert rep.uniqueness_ok
    assert rep.exclusion is not None


# -- 12 ---------------------------------------------------------------------


@pytest.mark.criterion(12)
@pytest.mark.parametrize("spec", sorted(p.name for p in SPECS.glob("*.ini")))
def test_reruns_are_byte_identical(spec, tmp_path):
    outs = []
    for run in ("first", "second"):
        d = tmp_path / run
        record = ex.run(ex.load_spec(str(SPECS / spec)))
        ex.write_results(record, str(d))
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] and outs[0] == outs[1]
