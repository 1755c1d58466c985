import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shockcert import interval as iv
from shockcert.evans_system import (
    SpectralParams,
    assemble_A,
    init_vectors,
    interpolate_mu,
    kappa_enclosure,
    limit_matrix,
    mu_enclosure,
    mu_minus_enclosure,
    right_limit_vector,
)
from shockcert.interval import ComplexInterval, RealInterval
from shockcert.ode_enclosure import ContourPiece

SP = SpectralParams()
LAMS = [0.05j, 0.5j, 2j, 3.2j, 0.3 + 0.1j, 1.5 + 2.0j, 3.2, 2.2 + 2.3j]


def _cpt(z):
    z = np.atleast_1d(np.asarray(z, complex))
    return ComplexInterval(RealInterval.point(z.real), RealInterval.point(z.imag))


def _contains(X: ComplexInterval, z) -> bool:
    return bool(np.all((X.re.lo <= z.real) & (z.real <= X.re.hi) & (X.im.lo <= z.imag) & (z.imag <= X.im.hi)))


def _mp_unstable_roots(lam, vbar):
    """Roots with positive real part of det(mu - A) computed with mpmath at 40 digits."""
    with mp.workdps(40):
        g = mp.mpf(5) / 3
        vp = mp.mpf(2) / 5
        a = vp**g * (1 - vp) / (1 - vp**g)
        v = vp if vbar == "plus" else mp.mpf(vbar)
        f = 2 * v - (a + 1) - a * (g - 1) * v ** (-g)
        L = mp.mpc(lam)
        roots = mp.polyroots([1, L - f, -2 * L * v, -L * L * v], maxsteps=200, extraprec=80)
        return [complex(r) for r in roots if mp.re(r) > 0]


@pytest.mark.parametrize("lam", LAMS)
def test_mu_minus_matches_mpmath(lam):
    X = mu_minus_enclosure(_cpt(lam), SP)
    pos = _mp_unstable_roots(lam, 1.0)
    assert len(pos) == 1
    assert _contains(X, np.array(pos[0]))
    assert float(np.max(X.re.hi - X.re.lo)) < 1e-12


@pytest.mark.parametrize("lam", LAMS)
def test_kappa_gives_unstable_eigenvalue_of_right_limit(lam):
    K = kappa_enclosure(_cpt(lam), SP)
    nu = _cpt(lam) * K
    pos = _mp_unstable_roots(lam, "plus")
    assert len(pos) == 1
    assert _contains(nu, np.array(pos[0]))


@pytest.mark.parametrize("lam", LAMS)
def test_limit_vectors_are_eigenvectors(lam):
    L = _cpt(lam)
    mm = mu_minus_enclosure(L, SP)
    A = limit_matrix("left", L, SP)[0]
    V = init_vectors(L, mm, mu_enclosure("right", L, SP), SP.vplus_iv).V_minus[0]
    r = [sum((A[i, j] * V[j] for j in range(3)), ComplexInterval.zeros(())) - mm[0] * V[i] for i in range(3)]
    assert all(bool(np.all(x.contains_zero())) for x in r)
    K = kappa_enclosure(L, SP)
    Ap = limit_matrix("right", L, SP)[0]
    Z = right_limit_vector(K, SP.vplus_iv)[0]
    nu = (L * K)[0]
    r = [sum((Ap[j, i] * Z[j] for j in range(3)), ComplexInterval.zeros(())) - nu * Z[i] for i in range(3)]
    assert all(bool(np.all(x.contains_zero())) for x in r)


def test_conjugation_identity_is_exact():
    lam = _cpt(np.array([0.3 + 1.1j, 2.0 + 0.5j]))
    v = RealInterval(0.41, 0.97)
    A = assemble_A(v, lam, SP.gamma_iv, SP.a)
    B = assemble_A(v, lam.conj(), SP.gamma_iv, SP.a)
    C = A.conj()
    for p, q in ((C.re, B.re), (C.im, B.im)):
        assert np.array_equal(p.lo, q.lo) and np.array_equal(p.hi, q.hi)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, np.pi / 2), st.floats(0.02, 3.3))
def test_unique_unstable_root_in_closed_right_half_plane(phi, r):
    # property: the splitting is consistent across the whole contour region
    lam = r * np.exp(1j * phi)
    X = mu_minus_enclosure(_cpt(lam), SP)
    assert float(X.re.lo[0]) > 0
    roots = np.roots([1, lam - float(SP.f_minus.mid()), -2 * lam, -lam * lam])
    assert np.sum(roots.real > 0) == 1


@pytest.mark.parametrize("side", ["left", "right"])
@pytest.mark.parametrize("piece", [ContourPiece("axis", 0.5, 0.8), ContourPiece("arc", 0.0, 0.1, radius=3.23)])
def test_interpolant_dense_check(side, piece):
    m = interpolate_mu(piece, side, SP, rho=1.4, N=96)
    t = np.linspace(-1, 1, 201)
    lam = piece.lam_float(t)
    from shockcert.evans_system import _select_kappa, _select_left

    if side == "left":
        exact = np.array([_select_left(np.roots([1, l - float(SP.f_minus.mid()), -2 * l, -l * l])[None])[0] for l in lam])
    else:
        vp = float(SP.vplus_iv.mid())
        exact = np.array([_select_kappa(np.roots([l, l - float(SP.f_plus.mid()), -2 * vp, -vp])[None], np.array([l]))[0] for l in lam])
    from numpy.polynomial import chebyshev as C

    approx = C.chebval(t, np.asarray(m.check().c, complex))
    assert np.max(np.abs(approx - exact)) <= m.delta() + 1e-10
    assert m.errBound < 1e-10
