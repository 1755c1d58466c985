import numpy as np
import pytest
from scipy.linalg import expm

from shockcert import interval as iv
from shockcert.evans_system import SpectralParams, _select_kappa, _select_left
from shockcert.init_error import (
    C1_PUBLISHED,
    ETA_HAT,
    ExpBound,
    NoContraction,
    coefficient_decay,
    contour_lambda_boxes,
    contraction_theta,
    init_constants,
    initial_enclosure,
    matrix_exp_bound,
    resolvent_norm,
)
from shockcert.interval import ComplexInterval, RealInterval

SP = SpectralParams()

# published constants table (rows v+ = 0.4 and 0.1)
TABLE = {
    "0.4": {"eta_minus": 0.7222, "C2_minus": 2.038e-3, "theta_minus": 1.296e-5, "eta_plus": -0.3663, "C2_plus": 7.159e-4, "theta_plus": 2.611e-4},
    "0.1": {"C2_minus": 2.676e-4, "theta_minus": 1.056e-7, "eta_plus": -0.8197, "C2_plus": 1.759e-5, "theta_plus": 3.963e-8},
}


def _float_B(side, lam, sp=SP):
    if side == "left":
        v, f = 1.0, float(sp.f_minus.mid())
    else:
        v, f = float(sp.vplus_iv.mid()), float(sp.f_plus.mid())
    A = np.array([[0, lam, 1], [0, 0, 1], [lam * v, lam * v, f - lam]], complex)
    if side == "left":
        mu = _select_left(np.roots([1, lam - f, -2 * lam, -lam * lam])[None])[0]
        return A - mu * np.eye(3)
    k = _select_kappa(np.roots([lam, lam - f, -2 * v, -v])[None], np.array([lam]))[0]
    return lam * k * np.eye(3) - A.T


def _small_boxes(lams, r=1e-6):
    lams = np.asarray(lams, complex)
    return ComplexInterval(RealInterval(lams.real - r, lams.real + r), RealInterval(lams.imag - r, lams.imag + r))


@pytest.fixture(scope="module")
def sample_lams():
    rng = np.random.default_rng(7)
    R = SP.R_outer
    ax = 1j * rng.uniform(0.05, R, 10)
    arc = R * np.exp(1j * rng.uniform(0, np.pi / 2, 10))
    return np.concatenate([ax, arc])


@pytest.mark.parametrize("side", ["left", "right"])
def test_exp_bound_dominates_expm(side, sample_lams):
    eb = matrix_exp_bound(side, SP, _small_boxes(sample_lams), n_sub=400)
    C1 = float(eb.C1.hi)
    eh = ETA_HAT[side]
    sgn = 1.0 if side == "left" else -1.0
    for lam in sample_lams:
        B = _float_B(side, lam)
        for x in (0.5, 1.0, 2.0, 5.0):
            xs = sgn * x
            assert np.linalg.norm(expm(B * xs), 2) <= C1 * np.exp(eh * xs) * (1 + 1e-9)


def test_exp_bound_per_box_is_finite_and_reports_worst(sample_lams):
    eb = matrix_exp_bound("left", SP, _small_boxes(sample_lams[:4]), n_sub=200)
    assert np.all(np.isfinite(eb.per_box))
    assert float(eb.C1.hi) == np.max(eb.per_box)
    assert eb.to_dict()["n_sub"] == 200


def test_resolvent_norm_against_numpy():
    lam, u = 0.7 + 1.3j, 2.0 - 0.5j
    v, f = 1.0, float(SP.f_minus.mid())
    A = np.array([[0, lam, 1], [0, 0, 1], [lam * v, lam * v, f - lam]], complex)
    exact = np.linalg.norm(np.linalg.inv(u * np.eye(3) - A), 2)
    pt = lambda z: ComplexInterval(RealInterval.point(np.array([z.real])), RealInterval.point(np.array([z.imag])))
    r = resolvent_norm(pt(u), pt(lam), RealInterval.point(1.0), SP.f_minus)
    assert exact <= float(r.hi[0]) <= 2 * exact


def test_contour_boxes_cover_axis_and_arc():
    b = contour_lambda_boxes(SP, 16, 8)
    assert b.shape == (24,)
    assert float(b.im.lo[0]) == 0.0 and float(b.im.hi[15]) == SP.R_outer
    # the arc boxes contain their float samples
    th = np.linspace(0, 1, 9)
    z = SP.R_outer * np.exp(1j * np.pi / 2 * 0.5 * (th[:-1] + th[1:]))
    assert np.all((b.re.lo[16:] <= z.real) & (z.real <= b.re.hi[16:]))


def _fake_C1(val=5.0):
    return {s: ExpBound(s, RealInterval(0.0, val), ETA_HAT[s], 1, 1) for s in ("left", "right")}


@pytest.mark.parametrize("vp", ["0.4", "0.1"])
def test_published_table_row(vp):
    from fractions import Fraction

    from shockcert.profile import ProfileParams, solve_profile

    sp = SpectralParams(vplus=Fraction(vp))
    prof = solve_profile(ProfileParams(vplus=Fraction(vp)))
    c = init_constants(sp, prof, C1=_fake_C1())
    row = TABLE[vp]
    got = {
        "eta_minus": float(c["left"]["decay"].eta.mid()),
        "C2_minus": float(c["left"]["decay"].C2.hi),
        "theta_minus": float(c["left"]["published"].theta.hi),
        "eta_plus": float(c["right"]["decay"].eta.mid()),
        "C2_plus": float(c["right"]["decay"].C2.hi),
        "theta_plus": float(c["right"]["published"].theta.hi),
    }
    for k, want in row.items():
        ratio = got[k] / want
        assert 1 / 1.5 <= ratio <= 1.5, (k, got[k], want)
    for side in ("left", "right"):
        assert float(c[side]["sound"].q.hi) < 1
        assert c[side]["published_C1_verified"]


def test_sign_conventions(prof04):
    vm = prof04.value_at(RealInterval.point(-10.0))
    vpM = prof04.value_at(RealInterval.point(10.0))
    left = coefficient_decay("left", SP, vm)
    right = coefficient_decay("right", SP, vpM)
    assert float(left.eta.lo) > ETA_HAT["left"] > 0
    assert float(right.eta.hi) < ETA_HAT["right"] < 0


def test_zero_coefficient_gap_gives_zero_theta():
    r = contraction_theta("left", RealInterval(0.0, 5.0), RealInterval.point(0.0), RealInterval(0.7, 0.72))
    assert float(r.theta.hi) == 0.0


def test_no_contraction_raises():
    with pytest.raises(NoContraction):
        contraction_theta("left", RealInterval(0.0, 5.0), RealInterval(0.0, 1.0), RealInterval(0.7, 0.72))
    with pytest.raises(NoContraction):
        contraction_theta("right", RealInterval(0.0, 5.0), RealInterval(0.0, 1e-3), RealInterval(-0.2, -0.1))


def test_initial_enclosure_contains_ball():
    V = ComplexInterval(RealInterval.point(np.array([3.0, 0.0, 4.0])), RealInterval.point(np.zeros(3)))
    W = initial_enclosure(V, RealInterval(0.0, 0.1))
    assert np.all(W.re.hi - W.re.lo >= 1.0 - 1e-12)
    assert W.contains_zero()[1]
