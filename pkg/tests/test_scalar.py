import math
from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from mhahn.scalar import (
    EXACT,
    FLOAT,
    BackendMismatch,
    ZeroDenominator,
    backend_of_all,
    factorial,
    format_scalar,
    hyp3f2,
    hyp3f2_with_mag,
    multi_poch,
    parse_rational,
    poch,
    poch_signed,
    termination_index,
)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=60)


def q(f: Fraction) -> mpq:
    return mpq(f.numerator, f.denominator)


def test_poch_small_cases():
    assert poch(mpq(3), 0) == 1
    assert poch(mpq(3), 4) == 3 * 4 * 5 * 6
    assert poch(mpq(-2), 3) == 0
    assert poch(mpq(1, 2), 2) == mpq(3, 4)
    assert poch(2.5, 2) == 2.5 * 3.5
    with pytest.raises(ValueError):
        poch(mpq(1), -1)


@given(fractions, st.integers(0, 12), st.integers(0, 12))
def test_pochhammer_split(a, j, k):
    a = q(a)
    assert poch(a, j + k) == poch(a, j) * poch(a + j, k)


@given(fractions, st.integers(0, 10))
def test_poch_matches_sympy_rising_factorial(a, k):
    assert poch(q(a), k) == q(Fraction(str(sp.rf(sp.Rational(a.numerator, a.denominator), k))))


@given(fractions, st.integers(-8, 8))
def test_poch_signed_inverts_across_zero(a, k):
    a = q(a)
    if any(a + i == 0 for i in range(-abs(k), abs(k) + 1)):
        return
    # (a)_k (a+k)_{-k} = 1 for every integer k
    assert poch_signed(a, k) * poch_signed(a + k, -k) == 1


def test_poch_signed_negative_order_value():
    a = mpq(7, 3)
    assert poch_signed(a, -2) == 1 / ((a - 2) * (a - 1))


def test_multi_poch_and_factorial():
    assert multi_poch([mpq(1), mpq(2)], 3) == 6 * 24
    assert factorial(5, mpq(1)) == 120
    assert factorial(5, 1.0) == 120.0


def _sympy_3f2(top, bottom, kmax):
    s = sp.Integer(0)
    for k in range(kmax + 1):
        num = sp.Mul(*[sp.rf(t, k) for t in top])
        if num == 0:  # the series has terminated
            break
        den = sp.Mul(*[sp.rf(b, k) for b in bottom]) * sp.factorial(k)
        s += num / den
    return s


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 8), fractions, fractions, st.integers(1, 8), fractions)
def test_hyp3f2_matches_independent_sum(m, t2, t3, N, b2):
    if m > N:
        m = N
    top = [mpq(-m), q(t2), q(t3)]
    bottom = [mpq(-N), q(b2)]
    hits_zero = False
    for k in range(m):
        if (top[1] + k) * (top[2] + k) * (top[0] + k) == 0:
            break
        if (bottom[1] + k) * (bottom[0] + k) == 0:
            hits_zero = True
            break
    if hits_zero:
        with pytest.raises(ZeroDenominator):
            hyp3f2(top, bottom, m)
        return
    want = _sympy_3f2([sp.Rational(str(x)) for x in top], [sp.Rational(str(x)) for x in bottom], m)
    assert hyp3f2(top, bottom, m) == mpq(str(want))


def test_hyp3f2_float_matches_mpmath():
    top = (-4.0, 2.5, -1.75)
    bottom = (-6.0, 0.3)
    want = float(mpmath.hyp3f2(*top, *bottom, 1))
    assert math.isclose(hyp3f2(top, bottom, 4), want, rel_tol=1e-12)
    val, mag = hyp3f2_with_mag(top, bottom, 4)
    assert val == hyp3f2(top, bottom, 4)
    assert mag >= abs(val)


def test_hyp3f2_stops_at_vanishing_numerator():
    # -x with x = 2 kills every term past k = 2, so the -N denominator at k = 5
    # is never reached even though kmax = 6.
    top = (mpq(-6), mpq(1, 3), mpq(-2))
    bottom = (mpq(-4), mpq(5, 7))
    assert hyp3f2(top, bottom, 6) == hyp3f2(top, bottom, 2)


def test_termination_index():
    assert termination_index(5, mpq(2)) == 2
    assert termination_index(2, mpq(5)) == 2
    assert termination_index(3, mpq(1, 2)) == 3
    assert termination_index(3, mpq(-1)) == 3


def test_parse_and_format():
    assert parse_rational("3/6") == mpq(1, 2)
    assert parse_rational("-4") == -4
    with pytest.raises(ValueError):
        parse_rational("1/0")
    assert parse_rational("0.1") == mpq(1, 10)  # decimals are read exactly
    with pytest.raises(ValueError):
        parse_rational("1/2/3")
    assert format_scalar(mpq(-3, 4)) == "-3/4"
    assert format_scalar(mpq(2)) == "2"


def test_backend_scalar_rejects_floats_when_exact():
    with pytest.raises(TypeError):
        EXACT.scalar(0.5)
    assert EXACT.scalar("2/4") == mpq(1, 2)
    assert FLOAT.scalar("1/4") == 0.25


def test_backend_mixing_rejected():
    with pytest.raises(BackendMismatch):
        backend_of_all([mpq(1), 1.0])
    assert backend_of_all([1, 2]) is None
    assert backend_of_all([mpq(1), 3]) is EXACT
