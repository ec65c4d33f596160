from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonarch.exact import (
    Magnitude,
    Sum,
    as_fraction,
    ceil_real,
    compare,
    exact_root,
    iroot,
    perfect_power_root,
    pow_bounds,
    rational_power,
    real_pow,
    real_sum,
)



@pytest.fixture(autouse=True)
def _mp_precision():
    with mpmath.workprec(400):
        yield

pos = st.fractions(min_value=Fraction(1, 30), max_value=50, max_denominator=30).filter(lambda x: x > 0)
exps = st.fractions(min_value=Fraction(-3), max_value=3, max_denominator=6).filter(lambda e: e != 0)


def mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


@pytest.mark.parametrize(
    "text, expected",
    [("1/3", Fraction(1, 3)), ("0.3", Fraction(3, 10)), ("-2", Fraction(-2)), ("1e-3", Fraction(1, 1000))],
)
def test_as_fraction_parses_exactly(text, expected):
    assert as_fraction(text) == expected


def test_as_fraction_rejects_garbage():
    with pytest.raises(ValueError):
        as_fraction("abc")


@given(st.integers(0, 10**40), st.integers(1, 7))
def test_iroot_is_floor_root(n, k):
    r = iroot(n, k)
    assert r ** k <= n < (r + 1) ** k


def test_exact_root_and_rational_power():
    assert exact_root(Fraction(9, 4), 2) == Fraction(3, 2)
    assert exact_root(Fraction(2), 2) is None
    assert rational_power(Fraction(4), Fraction(3, 2)) == 8
    assert rational_power(Fraction(8), Fraction(-2, 3)) == Fraction(1, 4)
    assert rational_power(Fraction(2), Fraction(1, 2)) is None


@pytest.mark.parametrize(
    "x, root, k",
    [(Fraction(8), Fraction(2), 3), (Fraction(1, 4), Fraction(2), -2), (Fraction(36), Fraction(6), 2), (Fraction(6), Fraction(6), 1)],
)
def test_perfect_power_root(x, root, k):
    assert perfect_power_root(x) == (root, k)


@given(pos, exps, st.sampled_from([64, 256]))
def test_pow_bounds_enclose_mpmath(x, e, bits):
    lo, hi = pow_bounds(x, e, bits)
    if lo == hi:
        assert lo == rational_power(x, e)
        return
    true = mp(x) ** (mpmath.mpf(e.numerator) / e.denominator)
    assert mp(lo) <= true <= mp(hi)
    assert (hi - lo) / hi < Fraction(1, 2 ** (bits - 8))


@given(pos, exps, pos, exps)
def test_magnitude_order_matches_mpmath(a, ea, b, eb):
    ma, mb = Magnitude.power(a, ea), Magnitude.power(b, eb)
    ta = mp(a) ** (mpmath.mpf(ea.numerator) / ea.denominator)
    tb = mp(b) ** (mpmath.mpf(eb.numerator) / eb.denominator)
    c = ma.cmp(mb)
    if abs(ta - tb) > mpmath.mpf(2) ** -300 * max(ta, tb):
        assert c == (1 if ta > tb else -1)


def test_magnitude_equality_is_exact_across_forms():
    assert Magnitude.power(6, Fraction(1, 2)) == Magnitude.power(2, Fraction(1, 2)) * Magnitude.power(3, Fraction(1, 2))
    assert Magnitude.power(4, Fraction(1, 4)) == Magnitude.power(2, Fraction(1, 2))
    assert Magnitude.power(2, Fraction(1, 2)) ** 2 == Magnitude(2)
    assert Magnitude.power(2, Fraction(1, 3)) * Magnitude.power(2, Fraction(2, 3)) == 2
    assert Magnitude.power(2, Fraction(1, 2)) != Magnitude.power(3, Fraction(1, 3))


def test_sum_comparisons():
    # sqrt2 + sqrt3 vs sqrt10: 3.146 > 3.162? no
    s = Sum((Magnitude.power(2, Fraction(1, 2)), Magnitude.power(3, Fraction(1, 2))))
    assert compare(s, Magnitude.power(10, Fraction(1, 2))) < 0
    assert compare(s, Magnitude.power(9, Fraction(1, 2))) > 0
    # (sqrt2)^2 + (sqrt2)^2 == 4 exactly, through a Pow of a Sum
    t = real_pow(Sum((Magnitude.power(2, Fraction(1, 2)),) * 2), 2)
    assert compare(t, 8) == 0


def test_equal_irrational_sums_compare_as_ties():
    a = Sum((Magnitude.power(2, Fraction(1, 2)), Magnitude.power(2, Fraction(1, 2))))
    b = Magnitude.power(8, Fraction(1, 2))
    assert compare(a, b) == 0


def test_equal_radical_sums_in_different_forms():
    half = Fraction(1, 2)
    a = Sum((Magnitude.power(12, half), Magnitude.power(2, half), Magnitude(1)))
    b = Sum((Magnitude(2, [(3, half)]), Magnitude.power(8, half) * Magnitude(half), Magnitude(1)))
    assert compare(a, b) == 0


def test_tiny_nonzero_radical_difference_is_resolved():
    # (1 + sqrt2)^n = x + y sqrt2 and x - y sqrt2 = (1 - sqrt2)^n, far below 2^-4096
    x, y = 1, 0
    for _ in range(4000):
        x, y = x + 2 * y, x + y
    root3 = Magnitude.power(3, Fraction(1, 2))
    lhs = Sum((Magnitude(x), root3))
    rhs = Sum((Magnitude(y, [(2, Fraction(1, 2))]), root3))
    assert compare(lhs, rhs) == 1 and compare(rhs, lhs) == -1


RADICALS = [(2, Fraction(1, 2)), (8, Fraction(1, 2)), (3, Fraction(1, 2)), (12, Fraction(1, 2)), (2, Fraction(1, 3)), (16, Fraction(1, 3)), (5, Fraction(3, 2))]


@given(st.lists(st.tuples(st.sampled_from(RADICALS), st.integers(1, 5)), max_size=6), st.lists(st.tuples(st.sampled_from(RADICALS), st.integers(1, 5)), max_size=6))
def test_radical_sum_order_matches_mpmath(xs, ys):
    build = lambda terms: Sum(tuple(Magnitude(c, [(b, e)]) for (b, e), c in terms))
    value = lambda terms: mpmath.fsum(c * mp(Fraction(b)) ** mp(e) for (b, e), c in terms)
    diff = value(xs) - value(ys)
    expected = 0 if abs(diff) < mpmath.mpf(10) ** -100 else (1 if diff > 0 else -1)
    assert compare(build(xs), build(ys)) == expected


def test_real_sum_collapses_rationals():
    assert isinstance(real_sum([1, Fraction(1, 2)]), Magnitude)
    assert real_sum([]).exact() == 0


@pytest.mark.parametrize(
    "value, expected",
    [(Magnitude(Fraction(7, 2)), 4), (Magnitude(3), 3), (Magnitude.power(4000, Fraction(1, 2)), 64)],
)
def test_ceil_real(value, expected):
    assert ceil_real(value) == expected


@given(pos, st.integers(-10**13, 10**13).filter(bool), st.integers(10**12, 10**13), st.sampled_from([64, 256, 1024]))
def test_large_exponents_use_log_enclosure(x, num, den, bits):
    e = Fraction(num, den)
    lo, hi = pow_bounds(x, e, bits)
    if lo == hi:
        assert e.denominator == 1 and lo == x**e
        return
    with mpmath.workprec(bits + 200):
        true = mp(x) ** (mpmath.mpf(e.numerator) / e.denominator)
        slack = true * mpmath.mpf(2) ** -(bits + 150)  # rounding in the oracle itself
        assert mp(lo) - slack <= true <= mp(hi) + slack
    assert hi - lo <= hi * Fraction(1, 2 ** (bits - 16))


def test_compare_with_huge_exponent_denominators():
    q = Fraction(2 * 10**9 + 1, 10**9)
    five = Magnitude.power(5, q)
    assert compare(five, Sum((Magnitude.power(3, q), Magnitude.power(4, q)))) > 0
    q = Fraction(2 * 10**9 - 1, 10**9)
    assert compare(Magnitude.power(5, q), Sum((Magnitude.power(3, q), Magnitude.power(4, q)))) < 0
    assert Magnitude.power(2, q).cmp(Magnitude.power(3, q / 2)) > 0


def test_magnitude_text_parenthesizes_fractional_bases():
    assert str(Magnitude.power(2, Fraction(1, 2))) == "2^(1/2)"
    assert str(Magnitude.power(Fraction(1001, 100), Fraction(1, 2))) == "(1001/100)^(1/2)"
    assert str(Magnitude(3, [(5, Fraction(1, 3))])) == "3*5^(1/3)"
