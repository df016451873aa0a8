from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from plclab.padic import INF, ExtVal, Magnitude, PAdic, vp
from plclab.projective import (
    ProjPoint,
    apply_matrix,
    distance_bound,
    normalize,
    pbad_estimate,
    pbad_pair_value,
    proj_distance,
    residue_apply,
    residue_point,
)
from plclab.semigroup import eigen_decompose, letter, matrix_of_word

small = st.integers(-(10**6), 10**6)
points = st.tuples(small, small).filter(lambda t: t != (0, 0))


def pt(x, y, p=11, k=20):
    return ProjPoint.from_ints(x, y, p, k)


def test_axes_are_at_distance_one():
    assert proj_distance(pt(1, 0), pt(0, 1)) == ExtVal(0)


def test_point_is_at_distance_zero_from_itself():
    # carried at 20 digits, a point is only known to be within 11^-20 of itself
    bound, exact = distance_bound(pt(3, 7), pt(3, 7))
    assert not exact and bound == ExtVal(20)
    axis = pt(1, 0)
    assert proj_distance(axis, axis).is_zero


def test_hand_computed_distance_at_11():
    # |1*4 - 8*1|_11 = |-4|_11 = 1
    assert proj_distance(pt(1, 8), pt(1, 4)) == ExtVal(0)
    # |1*(8+121) - 8*1| = |121| = 11^-2
    assert proj_distance(pt(1, 8), pt(1, 129)) == ExtVal(2)


def test_normalization_examples():
    a = ProjPoint.from_ints(11, 22, 11, 8)
    assert a.chart == 0 and a.y.lift() == 2
    b = ProjPoint.from_ints(0, 7, 11, 8)
    assert b.chart == 1 and b.x.is_zero
    c = ProjPoint.from_ints(5, 10, 5, 8)
    assert c.key(6) == ProjPoint.from_ints(1, 2, 5, 8).key(6)


def test_identity_and_letter_action():
    x = pt(3, 5)
    assert apply_matrix(matrix_of_word([]), x).key(10) == x.key(10)
    img = apply_matrix(letter(1), pt(0, 1))
    assert img.key(10) == pt(1, 1).key(10)


def test_a1_fixes_1_8_mod_11():
    img = apply_matrix(letter(1), pt(1, 8))
    assert img.key(1) == pt(1, 8).key(1)
    assert (8 * 8 - 9) % 11 == 0  # (8, 9) = 8 * (1, 8) mod 11


@given(points, points, points, st.sampled_from([2, 3, 5, 11]))
@settings(max_examples=300, deadline=None)
def test_distance_is_an_ultrametric(a, b, c, p):
    x, y, z = (ProjPoint.from_ints(*t, p, 40) for t in (a, b, c))
    pairs = [distance_bound(x, y), distance_bound(y, z), distance_bound(x, z)]
    assume(all(exact for _, exact in pairs))
    dxy, dyz, dxz = (d for d, _ in pairs)
    assert dxz <= max(dxy, dyz)
    assert dxy == proj_distance(y, x)
    assert dxy <= ExtVal(0)


@given(points, st.sampled_from([2, 3, 5, 11]), st.integers(1, 10**4))
@settings(max_examples=200, deadline=None)
def test_distance_matches_integer_oracle(a, p, c):
    """For primitive integer vectors, d = |x1 y2 - x2 y1|_p directly."""
    b = (a[0] + c * p, a[1] + 2 * c)
    assume(b != (0, 0))
    x, y = ProjPoint.from_ints(*a, p, 40), ProjPoint.from_ints(*b, p, 40)

    def prim(v):
        e = min(vp(v[0], p), vp(v[1], p))
        return (Fraction(v[0], p**e), Fraction(v[1], p**e))

    u, w = prim(a), prim(b)
    det = u[0] * w[1] - u[1] * w[0]
    got, exact = distance_bound(x, y)
    if det == 0:
        assert not exact
    else:
        assert exact and got == ExtVal(vp(det.numerator, p) - vp(det.denominator, p))


@given(points, st.lists(st.integers(1, 6), min_size=1, max_size=8), st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=200, deadline=None)
def test_action_is_normalized_and_an_isometry(a, w, p):
    A = matrix_of_word(bytes(w))
    x = ProjPoint.from_ints(*a, p, 30)
    y = ProjPoint.from_ints(a[0] + p, a[1] + 1, p, 30)
    Ax, Ay = apply_matrix(A, x), apply_matrix(A, y)
    assert Ax.x.norm_bound() <= ExtVal(0) and Ax.y.norm_bound() <= ExtVal(0)
    if Ax.chart == 0:
        assert Ax.x.lift() == 1
    else:
        assert Ax.y.lift() == 1 and Ax.x.norm_bound() < ExtVal(0)
    # GL2(Z_p) acts isometrically
    before, after = distance_bound(x, y), distance_bound(Ax, Ay)
    assert before[1] == after[1]
    if before[1]:
        assert before[0] == after[0]


@given(points, st.lists(st.integers(1, 6), min_size=1, max_size=8), st.sampled_from([2, 3, 5, 7]), st.integers(1, 5))
@settings(max_examples=200, deadline=None)
def test_residue_action_matches_exact_action(a, w, p, k):
    A = matrix_of_word(bytes(w))
    x = ProjPoint.from_ints(*a, p, 30)
    mod = p**k
    fast = residue_apply(A.reduce(mod).as_tuple(), residue_point(x, k), p, mod)
    assert fast == apply_matrix(A, x).key(k)


def test_rejects_non_unit_determinant():
    from plclab.semigroup import Mat2

    with pytest.raises(ValueError):
        apply_matrix(Mat2(2, 0, 0, 1), pt(1, 1, p=2))


def test_rational_point_is_not_badly_approximable():
    r = pbad_estimate(pt(0, 1), 50)
    assert r.epsilon == Magnitude.of(11, 0)
    assert not r.positive


def brute_pbad(x: ProjPoint, B: int) -> Magnitude:
    """Oracle: scan the same box through the generic pair evaluator."""
    best = None
    for a in range(0, B + 1):
        for b in range(-B, B + 1):
            if a == 0 and b <= 0:
                continue
            val = pbad_pair_value(x, a, b)
            best = val if best is None or val < best else best
    return best


@pytest.mark.parametrize("B", [5, 12])
def test_fast_pbad_matches_generic_route(B):
    for w, p in [("1", 11), ("12", 5)]:
        e = eigen_decompose(matrix_of_word(w), p, 16)
        for v in (e.v1, e.v2):
            assert pbad_estimate(v, B).epsilon == brute_pbad(v, B), (w, p)
    x = pt(3, 17, p=5)
    assert pbad_estimate(x, B).epsilon == brute_pbad(x, B)


def test_golden_eigenvector_is_badly_approximable_and_stable():
    e = eigen_decompose(letter(1), 11, 16)
    eps = [pbad_estimate(e.v1, B).epsilon for B in (10, 50, 100)]
    assert eps[0] > Magnitude.of(11, 0)
    assert eps[0] == eps[1] == eps[2]


def test_image_of_badly_approximable_point_stays_positive():
    e = eigen_decompose(matrix_of_word("12"), 5, 16)
    for A in (matrix_of_word("3"), matrix_of_word("21"), matrix_of_word("1111")):
        img = apply_matrix(A, e.v1)
        assert pbad_estimate(img, 40).positive


def test_normalize_rejects_origin():
    z = PAdic.zero(5)
    with pytest.raises(ValueError):
        normalize(z, z)
