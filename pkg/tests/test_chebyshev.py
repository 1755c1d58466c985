import math

import mpmath
import numpy as np
import pytest

from shockcert import interval as iv
from shockcert.chebyshev import (
    Stadium,
    coefficients,
    evaluate_theta,
    hermite_error_bound,
    lebesgue_constant,
    nodes,
    nodes_float,
)
from shockcert.interval import ComplexInterval, RealInterval

from cheb_oracle import FUNCS, analytic_inside, measured_error, sup_bound


def test_nodes_enclose_exact_roots():
    mpmath.mp.dps = 40
    for N in (5, 8, 33):
        x = nodes(N)
        for j in range(N):
            e = mpmath.cos((j + mpmath.mpf(0.5)) * mpmath.pi / N)
            assert mpmath.mpf(float(x.lo[j])) <= e <= mpmath.mpf(float(x.hi[j]))
    assert float(nodes(7).lo[3]) <= 0.0 <= float(nodes(7).hi[3])


@pytest.mark.parametrize("name", ["exp", "inv_x_minus_2", "sin5x"])
def test_hermite_bound_dominates_measured_error(name):
    f, pole = FUNCS[name]
    for rho in (1.5, 2.0):
        if not analytic_inside(pole, rho):
            continue
        st = Stadium(rho, sup_bound(name, rho))
        for N in (8, 16):
            assert measured_error(f, N, grid=201) <= hermite_error_bound(st, N).hi


def test_bound_decreases_with_degree_and_rho():
    a = [float(hermite_error_bound(Stadium(2.0, 1.0), N).hi) for N in (4, 8, 16)]
    assert a[0] > a[1] > a[2]
    assert float(hermite_error_bound(Stadium(4.0, 1.0), 8).hi) < a[1]


def test_stadium_requires_rho_above_one():
    with pytest.raises(iv.IntervalDomainError):
        Stadium(1.0, 1.0)


def test_lebesgue_constant_dominates_computed():
    for N in (4, 9, 16):
        x = nodes_float(N)
        t = np.linspace(-1, 1, 4001)
        L = np.zeros_like(t)
        for j in range(N):
            others = np.delete(x, j)
            L += np.abs(np.prod((t[:, None] - others) / (x[j] - others), axis=1))
        assert L.max() <= float(lebesgue_constant(N).hi) + 1e-12


def test_interval_coefficients_enclose_exact_interpolant():
    N = 12
    x = nodes(N)
    vals = iv.exp(x)
    enc = coefficients(ComplexInterval(vals, RealInterval.point(np.zeros(N))))
    c = np.polynomial.chebyshev.chebinterpolate(np.exp, N - 1)
    got = enc.coeffs
    assert np.all((got.re.lo <= c + 1e-15) & (c - 1e-15 <= got.re.hi))


def test_evaluate_theta_contains_function_values():
    N = 24
    x = nodes(N)
    enc = coefficients(ComplexInterval(iv.exp(x), RealInterval.point(np.zeros(N))))
    enc = enc.with_err(float(hermite_error_bound(Stadium(2.0, math.exp(1.25)), N - 1).hi))
    edges = np.linspace(-1, 1, 17)
    boxes = evaluate_theta(enc, RealInterval(edges[:-1], edges[1:]))
    for k in range(16):
        for t in np.linspace(edges[k], edges[k + 1], 5):
            assert float(boxes.re.lo[k]) <= math.exp(t) <= float(boxes.re.hi[k])
