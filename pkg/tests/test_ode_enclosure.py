import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from shockcert import interval as iv
from shockcert.evans_system import SpectralParams
from shockcert.interval import ComplexInterval, RealInterval
from shockcert.ode_enclosure import (
    ContourPiece,
    EvansContext,
    PieceRejected,
    _tiles,
    adjugate3,
    collocate_transform,
    defect_bound,
    det3,
    norm2_up,
    propagation_radius,
    solve_piece,
    start_offset,
)
from shockcert.polymodel import ChebModel


def _const_model(A):
    return ChebModel(np.asarray(A, complex)[:, :, None, None], 0.0, 2)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_constant_coefficients_against_expm(seed):
    # oracle: for constant A the tile map is exactly expm(2A)
    rng = np.random.default_rng(seed)
    A = 0.4 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    A -= np.trace(A) / 3 * np.eye(3)
    Am = _const_model(A)
    T = collocate_transform(Am, 0.0, 24, 4)
    eps, coeff, lower = defect_bound(T, Am)
    assert eps is not None and eps < 1e-10
    d0 = start_offset(T)
    G = T.at_edge(0, +1).eval_points(0.3)[..., 0]
    E = expm(2 * A)
    # |Phi - G| <= |G| ((1 + d0) exp(2 eps) - 1)
    bound = norm2_up(np.abs(G)) * ((1 + d0) * np.exp(2 * eps) - 1) + 1e-13
    assert np.linalg.norm(E - G) <= bound


def test_adjugate_and_determinant_match_numpy():
    rng = np.random.default_rng(5)
    c = rng.standard_normal((3, 3, 3, 2)) + 1j * rng.standard_normal((3, 3, 3, 2))
    T = ChebModel(c, 0.0, 2)
    adj = adjugate3(T)
    det = det3(T, adj)
    for y, t in [(0.2, -0.4), (-0.9, 0.7)]:
        M = T.eval_points(y, t)[..., 0, 0]
        assert np.allclose(det.eval_points(y, t)[0, 0], np.linalg.det(M))
        assert np.allclose(adj.eval_points(y, t)[..., 0, 0] @ M, np.linalg.det(M) * np.eye(3))


def test_start_offset_rejects_far_from_identity():
    T = _const_model(np.eye(3) * 3.0)
    with pytest.raises(PieceRejected):
        start_offset(T)


def test_propagation_radius_formula():
    r = propagation_radius(1e-3, 2.0, 5.0)
    assert r.contains(5.0 * np.expm1(2e-3))


@pytest.mark.parametrize("side,L,length", [("left", 10.0, 2.0), ("right", 10.0, 2.0), ("left", 10.0, 3.0)])
def test_tiles_cover_half_line(side, L, length):
    tiles = _tiles(side, L, length)
    assert tiles[0][0] == (-L if side == "left" else L)
    assert tiles[-1][1] == 0.0
    assert all(a[1] == b[0] for a, b in zip(tiles, tiles[1:]))


def test_piece_validation():
    with pytest.raises(ValueError):
        ContourPiece("line", 0.0, 1.0)
    with pytest.raises(ValueError):
        ContourPiece("axis", 1.0, 1.0)
    with pytest.raises(ValueError):
        ContourPiece("arc", 0.0, 1.5, radius=3.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1, 1), st.sampled_from(["axis", "arc"]))
def test_lambda_enclosure_contains_float(t, kind):
    p = ContourPiece(kind, 0.25, 0.5, radius=3.23)
    z = p.lam(ComplexInterval(RealInterval.point(t), RealInterval.point(0.0)))
    w = p.lam_float(t)
    assert float(z.re.lo) <= w.real <= float(z.re.hi) and float(z.im.lo) <= w.imag <= float(z.im.hi)
    m = p.lam_model()
    assert abs(m.eval_points(t)[0] - w) <= float(m.err) + 1e-14


@pytest.mark.slow
def test_piece_encloses_truncated_shooting(prof04):
    # with theta = 0 the rigorous object is the solution started exactly at x = -L and x = +L
    from shockcert.verify import ReferenceEvans

    sp = SpectralParams()
    ctx = EvansContext(prof04, sp, theta=(0.0, 0.0), L=10.0)
    piece = ContourPiece("axis", 2.75, 3.0)
    ref = ReferenceEvans(sp, L=40.0, rtol=1e-12, atol=1e-14)
    t = np.array([-0.8, 0.1, 0.9])
    encs = {s: solve_piece(ctx, piece, s) for s in ("left", "right")}
    for k, lam in enumerate(piece.lam_float(t)):
        V, Y = ref.sides(lam, L=10.0)
        for s, true in (("left", V), ("right", Y)):
            e = encs[s]
            sc = np.exp(complex(e.log_scale.mid()))
            approx = sc * e.vec.eval_points(t[k])[:, 0]
            rad = abs(sc) * np.exp(float(e.log_scale.re.rad())) * (e.radius + e.correction * (np.linalg.norm(approx / sc) + e.radius))
            assert np.linalg.norm(true - approx) <= rad + 1e-8 * np.linalg.norm(true)
