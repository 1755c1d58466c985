import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from shockcert.polymodel import ChebModel, min_modulus_1d


def _rand_model(rng, deg, err=1e-9):
    c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    c /= (1 + np.arange(deg + 1)) ** 2
    return ChebModel(c, err, 1)


def _eval(m, t):
    return np.polynomial.chebyshev.chebval(t, m.c)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 30), st.integers(1, 30))
def test_product_encloses_pointwise_product(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = _rand_model(rng, da, 0.0), _rand_model(rng, db, 0.0)
    p = a * b
    t = np.linspace(-1, 1, 301)
    diff = np.abs(_eval(a, t) * _eval(b, t) - _eval(p, t))
    assert diff.max() <= float(p.err) + 1e-13 * np.abs(_eval(p, t)).max()


def test_product_error_propagation():
    rng = np.random.default_rng(3)
    a, b = _rand_model(rng, 10, 1e-6), _rand_model(rng, 12, 2e-6)
    p = a * b
    assert float(p.err) >= float(a.l1()) * 2e-6 + float(b.l1()) * 1e-6


def test_truncate_moves_tail_to_error():
    rng = np.random.default_rng(4)
    a = _rand_model(rng, 20, 0.0)
    b = a.truncate((5,))
    t = np.linspace(-1, 1, 501)
    assert np.abs(_eval(a, t) - _eval(b, t)).max() <= float(b.err)


def test_sup_bounds_values():
    rng = np.random.default_rng(5)
    a = _rand_model(rng, 15, 1e-3)
    t = np.linspace(-1, 1, 1001)
    assert np.abs(_eval(a, t)).max() + 1e-3 <= float(a.sup()) + 1e-15


def test_min_modulus_1d_lower_bound():
    m = ChebModel(np.array([2.0, 0.5, 0.25]), 1e-3, 1)
    lo = min_modulus_1d(m)
    t = np.linspace(-1, 1, 10001)
    assert 0 < lo <= np.abs(_eval(m, t)).min() - 1e-3 + 1e-12


def test_matmul_of_constant_matrices():
    A = ChebModel(np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(2, 2, 1), 0.0, 1)
    B = ChebModel(np.eye(2).reshape(2, 2, 1), 0.0, 1)
    C = A @ B
    assert np.allclose(C.c[..., 0], [[1, 2], [3, 4]])
