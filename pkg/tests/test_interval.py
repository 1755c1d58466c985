import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shockcert import interval as iv
from shockcert.interval import ComplexInterval, RealInterval

from inclusion import OPS, violations

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def _iv(a, b):
    return RealInterval(min(a, b), max(a, b))


@pytest.mark.parametrize("op", OPS)
def test_inclusion_batches(op):
    rng = np.random.default_rng(hash(op) % 2**32)
    assert violations(op, rng, 5000) == 0


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite, st.floats(0, 1), st.floats(0, 1))
def test_mul_isotone(a, b, c, d, s, t):
    x, y = _iv(a, b), _iv(c, d)
    px = Fraction(float(x.lo)) + Fraction(s) * (Fraction(float(x.hi)) - Fraction(float(x.lo)))
    py = Fraction(float(y.lo)) + Fraction(t) * (Fraction(float(y.hi)) - Fraction(float(y.lo)))
    z = x * y
    assert Fraction(float(z.lo)) <= px * py <= Fraction(float(z.hi))


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite)
def test_sub_add_contain_exact(a, b, c, d):
    x, y = _iv(a, b), _iv(c, d)
    for z, e in ((x + y, Fraction(float(x.lo)) + Fraction(float(y.lo))), (x - y, Fraction(float(x.hi)) - Fraction(float(y.lo)))):
        assert Fraction(float(z.lo)) <= e <= Fraction(float(z.hi))


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 30), st.floats(0, 2))
def test_exp_log_enclose_mpmath(a, w):
    x = RealInterval(a, a + w)
    mpmath.mp.dps = 40
    e = iv.exp(x)
    assert mpmath.mpf(float(e.lo)) <= mpmath.exp(mpmath.mpf(a)) and mpmath.exp(mpmath.mpf(float(x.hi))) <= mpmath.mpf(float(e.hi))
    p = RealInterval(abs(a) + 1e-3, abs(a) + 1e-3 + w)
    l = iv.log(p)
    assert mpmath.mpf(float(l.lo)) <= mpmath.log(mpmath.mpf(float(p.lo)))
    assert mpmath.log(mpmath.mpf(float(p.hi))) <= mpmath.mpf(float(l.hi))


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(0, 7))
def test_cos_sin_enclose_samples(a, w):
    mpmath.mp.dps = 40
    x = RealInterval(a, a + w)
    c, s = iv.cos(x), iv.sin(x)
    for t in np.linspace(a, a + w, 17):
        if t > float(x.hi):
            continue
        ct = mpmath.cos(mpmath.mpf(float(t)))
        st_ = mpmath.sin(mpmath.mpf(float(t)))
        assert mpmath.mpf(float(c.lo)) <= ct <= mpmath.mpf(float(c.hi))
        assert mpmath.mpf(float(s.lo)) <= st_ <= mpmath.mpf(float(s.hi))


def test_division_by_zero_interval_raises():
    with pytest.raises(iv.IntervalDomainError):
        RealInterval(1.0, 2.0) / RealInterval(-1.0, 1.0)


def test_sqr_is_tighter_than_self_product():
    x = RealInterval(-1.0, 2.0)
    assert float(x.sqr().lo) == 0.0
    assert float((x * x).lo) < 0


def test_point_intervals_do_not_alias():
    x = RealInterval.point(np.zeros(3))
    x[1] = RealInterval(-1.0, 1.0)
    assert x.lo[1] == -1.0 and x.hi[1] == 1.0
    z = ComplexInterval.zeros((2, 3, 3))
    z[..., 0, 1] = ComplexInterval(RealInterval(0.0, 1.0), RealInterval(2.0, 3.0))
    assert float(z.im.lo[0, 0, 1]) == 2.0 and float(z.im.hi[0, 0, 1]) == 3.0


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite, finite, finite, finite, finite)
def test_complex_mul_contains_point_product(a, b, c, d, e, f, g, h):
    x = ComplexInterval(_iv(a, b), _iv(c, d))
    y = ComplexInterval(_iv(e, f), _iv(g, h))
    px = complex(float(x.re.lo), float(x.im.hi))
    py = complex(float(y.re.hi), float(y.im.lo))
    z = x * y
    re = Fraction(px.real) * Fraction(py.real) - Fraction(px.imag) * Fraction(py.imag)
    im = Fraction(px.real) * Fraction(py.imag) + Fraction(px.imag) * Fraction(py.real)
    assert Fraction(float(z.re.lo)) <= re <= Fraction(float(z.re.hi))
    assert Fraction(float(z.im.lo)) <= im <= Fraction(float(z.im.hi))


def test_modulus_and_cexp():
    z = ComplexInterval(RealInterval(3.0, 3.0), RealInterval(4.0, 4.0))
    m = iv.modulus(z)
    assert float(m.lo) <= 5.0 <= float(m.hi)
    w = iv.cexp(ComplexInterval(RealInterval(0.0, 0.0), iv.PI))
    assert float(w.re.lo) <= -1.0 <= float(w.re.hi)
    assert w.im.contains(0.0)


def test_isum_contains_exact_sum(rng):
    x = rng.standard_normal(1000) * 10.0 ** rng.integers(-10, 10, 1000)
    s = iv.isum(RealInterval.point(x))
    exact = sum(Fraction(float(v)) for v in x)
    assert Fraction(float(s.lo)) <= exact <= Fraction(float(s.hi))


def test_from_value_encloses_rationals():
    x = RealInterval.from_value(Fraction(1, 3))
    assert Fraction(float(x.lo)) <= Fraction(1, 3) <= Fraction(float(x.hi))
    assert float(x.hi) > float(x.lo)
