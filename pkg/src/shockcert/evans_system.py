"""The Evans eigenvalue ODE: coefficient matrices, limiting eigenvalues and eigenvectors.

Left of the shock (x <= 0) the scaled system is ``V' = (A - mu_- I) V`` where
``mu_-`` is the unstable eigenvalue of ``A_-``.  Right of the shock the
adjoint system ``W' = -A^* W`` is used.  Its conjugate ``Z = conj(W)`` solves
``Z' = -A^T Z``; scaling by ``nu``, the unstable eigenvalue of ``A_+``, gives
``Y' = (nu I - A^T) Y``.  The adjoint eigenvalue with negative real part is
``mu_+ = -conj(nu)``.

Near ``lambda = 0`` the eigenvalue ``nu`` is O(lambda), so we write
``nu = lambda * kappa`` where ``kappa`` is a simple root of the regular cubic
``lambda k^3 + (lambda - f_+) k^2 - 2 v_+ k - v_+``.  The limiting vector
``(kappa, 1 + kappa, kappa^2 / v_+)`` is analytic through ``lambda = 0`` and
equals the conjugate of the usual ``V_+`` eigenvector wherever that is defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import interval as iv
from .chebyshev import ChebEnclosure, Stadium, coefficients, hermite_error_bound, nodes
from .interval import ComplexInterval, IntervalMatrix, RealInterval
from .polymodel import ChebModel
from .profile import compute_a, enclose, f_of_v

LEFT = "left"
RIGHT = "right"


class NewtonFailure(RuntimeError):
    """Interval Newton did not contract; the caller should subdivide."""


@dataclass(frozen=True)
class SpectralParams:
    gamma: Fraction = Fraction(5, 3)
    vplus: Fraction = Fraction(2, 5)

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma) if not isinstance(self.gamma, float) else Fraction(repr(self.gamma)))
        object.__setattr__(self, "vplus", Fraction(self.vplus) if not isinstance(self.vplus, float) else Fraction(repr(self.vplus)))

    @property
    def gamma_iv(self) -> RealInterval:
        return enclose(self.gamma)

    @property
    def vplus_iv(self) -> RealInterval:
        return enclose(self.vplus)

    @property
    def a(self) -> RealInterval:
        return compute_a(self.gamma, self.vplus)

    @property
    def R(self) -> RealInterval:
        """Radius (sqrt(gamma) + 1/2)^2 of the contour."""
        return (iv.sqrt(self.gamma_iv) + 0.5).sqr()

    @property
    def R_outer(self) -> float:
        """A float at least R, rounded up to a multiple of 2^-20 (keeps breakpoints exact)."""
        return math.ceil(float(self.R.hi) * 2**20) / 2**20

    @property
    def f_minus(self) -> RealInterval:
        return f_of_v(RealInterval.point(1.0), self.a, self.gamma_iv)

    @property
    def f_plus(self) -> RealInterval:
        return f_of_v(self.vplus_iv, self.a, self.gamma_iv)


# ---------------------------------------------------------------- matrices


def _cx(x) -> ComplexInterval:
    return iv.as_complex(x)


def assemble_A(vbar, lam, gamma, a) -> ComplexInterval:
    """A(x, lambda) = [[0, lam, 1], [0, 0, 1], [lam v, lam v, f(v) - lam]] (batched)."""
    v = iv._to_real(vbar)
    lam = _cx(lam)
    shape = np.broadcast_shapes(v.shape, lam.shape)
    f = f_of_v(v, a, iv._to_real(gamma))
    lv = lam * v
    out = ComplexInterval.zeros(shape + (3, 3))
    one = ComplexInterval.point(np.ones(shape))
    lam_b = lam + ComplexInterval.zeros(shape)
    lv_b = lv + ComplexInterval.zeros(shape)
    out[..., 0, 1] = lam_b
    out[..., 0, 2] = one
    out[..., 1, 2] = one
    out[..., 2, 0] = lv_b
    out[..., 2, 1] = lv_b
    out[..., 2, 2] = (_cx(f) - lam) + ComplexInterval.zeros(shape)
    if out.ndim == 2:
        return IntervalMatrix.of(out)
    return out


def limit_matrix(side: str, lam, sp: SpectralParams) -> ComplexInterval:
    v = RealInterval.point(1.0) if side == LEFT else sp.vplus_iv
    return assemble_A(v, lam, sp.gamma_iv, sp.a)


def _conj_T(m: ComplexInterval) -> ComplexInterval:
    return ComplexInterval(m.re.swapaxes(-1, -2), (-m.im).swapaxes(-1, -2))


def assemble_adjoint(vbar, lam, mu_plus, gamma, a) -> ComplexInterval:
    """-A(x, lambda)^* - mu_+ I."""
    A = assemble_A(vbar, lam, gamma, a)
    out = -_conj_T(A)
    mu = _cx(mu_plus)
    for k in range(3):
        out[..., k, k] = out[..., k, k] - mu
    return IntervalMatrix.of(out) if out.ndim == 2 else out


# ---------------------------------------------------------------- characteristic polynomials


def charpoly_left(lam, f) -> list:
    """Coefficients [1, lam - f, -2 lam, -lam^2] of det(mu - A_-)."""
    lam = _cx(lam)
    return [ComplexInterval.point(np.ones(lam.shape)), lam - f, lam * -2.0, -lam.sqr()]


def charpoly_plus(lam, f_plus, vplus) -> list:
    """Coefficients of det(mu - A_+) = mu^3 + (lam - f) mu^2 - 2 lam v mu - lam^2 v."""
    lam = _cx(lam)
    return [ComplexInterval.point(np.ones(lam.shape)), lam - f_plus, lam * vplus * -2.0, -(lam.sqr() * vplus)]


def kappa_poly(lam, f_plus, vplus) -> list:
    """Coefficients [lam, lam - f_+, -2 v_+, -v_+] of the cubic for kappa = nu / lam."""
    lam = _cx(lam)
    vp = iv._to_real(vplus)
    ones = ComplexInterval.point(np.ones(lam.shape))
    return [lam, lam - f_plus, ones * (vp * -2.0), ones * (-vp)]


def _horner(coeffs, z):
    acc = coeffs[0]
    for c in coeffs[1:]:
        acc = acc * z + c
    return acc


def _dcoeffs(coeffs):
    n = len(coeffs) - 1
    return [c * float(n - k) for k, c in enumerate(coeffs[:-1])]


def _float_coeffs(coeffs):
    return [np.asarray(c.mid(), complex) for c in coeffs]


def _roots_batch(fc) -> np.ndarray:
    """All roots of the cubic with float coefficient arrays fc (shape (...)); returns (..., 3)."""
    c0, c1, c2, c3 = [np.asarray(c, complex) for c in fc]
    shape = np.broadcast_shapes(c0.shape, c1.shape, c2.shape, c3.shape)
    c0, c1, c2, c3 = [np.broadcast_to(c, shape) for c in (c0, c1, c2, c3)]
    comp = np.zeros(shape + (3, 3), complex)
    comp[..., 0, 0] = -c1 / c0
    comp[..., 0, 1] = -c2 / c0
    comp[..., 0, 2] = -c3 / c0
    comp[..., 1, 0] = 1.0
    comp[..., 2, 1] = 1.0
    return np.linalg.eigvals(comp)


def _polish(fc, z, steps=3):
    dc = [c * (3 - k) for k, c in enumerate(fc[:-1])]
    for _ in range(steps):
        p = ((fc[0] * z + fc[1]) * z + fc[2]) * z + fc[3]
        d = (dc[0] * z + dc[1]) * z + dc[2]
        ok = d != 0
        z = np.where(ok, z - np.where(ok, p / np.where(ok, d, 1), 0), z)
    return z


def krawczyk(coeffs, seed: np.ndarray, iters: int = 12, rel: float = 1e-13):
    """Verify a simple root of a cubic with interval coefficients near ``seed``.

    Returns ``(X, ok)``: for entries with ok, X encloses the unique root in X
    for every coefficient choice in the intervals.  Complex rectangles are
    treated as real 2-vectors, so this is the real Krawczyk test in R^2.
    """
    dco = _dcoeffs(coeffs)
    fc = _float_coeffs(coeffs)
    m = np.asarray(_polish(fc, np.asarray(seed, complex)), complex)
    dm = (3 * fc[0] * m + 2 * fc[1]) * m + fc[2]
    Y = np.where(dm != 0, 1.0 / np.where(dm == 0, 1, dm), 0.0)
    M = ComplexInterval.point(m)
    Yi = ComplexInterval.point(Y)
    base = M - Yi * _horner(coeffs, M)
    r = np.maximum(2.0 * iv.modulus(base - M).hi, rel * np.abs(m)) + 1e-300
    ok = np.zeros(m.shape, bool)
    X = ComplexInterval.from_disc(m, r)
    out = X
    for _ in range(iters):
        K = base + (1.0 - Yi * _horner(dco, X)) * (X - M)
        inside = (
            (K.re.lo > X.re.lo) & (K.re.hi < X.re.hi) & (K.im.lo > X.im.lo) & (K.im.hi < X.im.hi)
        )
        newly = inside & ~ok
        if np.any(newly):
            out.re.lo[newly] = K.re.lo[newly]
            out.re.hi[newly] = K.re.hi[newly]
            out.im.lo[newly] = K.im.lo[newly]
            out.im.hi[newly] = K.im.hi[newly]
        ok |= inside
        if np.all(ok):
            break
        # epsilon inflation about the centre for the rest
        kr = np.maximum(np.abs(K.re.hi - m.real), np.abs(K.re.lo - m.real))
        ki = np.maximum(np.abs(K.im.hi - m.imag), np.abs(K.im.lo - m.imag))
        # radii of hopeless entries may overflow to inf; those stay not ok
        with np.errstate(over="ignore", invalid="ignore"):
            rr = np.where(np.isfinite(kr) & np.isfinite(ki), np.maximum(kr, ki), r * 4)
            r = np.where(ok, r, np.maximum(1.5 * rr, 2 * r) + 1e-300)
        X = ComplexInterval.from_disc(m, r)
        keep = ~ok
        out.re.lo[keep] = X.re.lo[keep]
        out.re.hi[keep] = X.re.hi[keep]
        out.im.lo[keep] = X.im.lo[keep]
        out.im.hi[keep] = X.im.hi[keep]
    return out, ok


def _select_left(roots: np.ndarray) -> np.ndarray:
    idx = np.argmax(roots.real, axis=-1)
    return np.take_along_axis(roots, idx[..., None], -1)[..., 0]


def _select_kappa(roots: np.ndarray, lam: np.ndarray) -> np.ndarray:
    idx = np.argmax((roots * lam[..., None]).real, axis=-1)
    return np.take_along_axis(roots, idx[..., None], -1)[..., 0]


def mu_minus_enclosure(lam, sp: SpectralParams, seed=None) -> ComplexInterval:
    """Unstable eigenvalue of A_- (Re > 0 certified)."""
    lam = _cx(lam)
    co = charpoly_left(lam, sp.f_minus)
    if seed is None:
        seed = _select_left(_roots_batch(_float_coeffs(co)))
    X, ok = krawczyk(co, seed)
    if not np.all(ok):
        raise NewtonFailure("interval Newton failed for mu_-")
    if np.any(X.re.lo <= 0):
        raise iv.IntervalDomainError("mu_- does not have a certified positive real part")
    return X


def kappa_enclosure(lam, sp: SpectralParams, seed=None, check_sign: bool = True) -> ComplexInterval:
    """Root kappa with nu = lam kappa the unstable eigenvalue of A_+."""
    lam = _cx(lam)
    co = kappa_poly(lam, sp.f_plus, sp.vplus_iv)
    if seed is None:
        seed = _select_kappa(_roots_batch(_float_coeffs(co)), np.asarray(lam.mid(), complex))
    X, ok = krawczyk(co, seed)
    if not np.all(ok):
        raise NewtonFailure("interval Newton failed for kappa")
    if check_sign and np.any((lam * X).re.lo <= 0):
        raise iv.IntervalDomainError("nu = lam kappa does not have a certified positive real part")
    return X


def mu_enclosure(side: str, lam, sp: SpectralParams) -> ComplexInterval:
    """mu_- (left, Re > 0) or mu_+ = -conj(nu) (right, Re < 0)."""
    if side == LEFT:
        return mu_minus_enclosure(lam, sp)
    lam = _cx(lam)
    nu = lam * kappa_enclosure(lam, sp)
    return -nu.conj()


# ---------------------------------------------------------------- eigenvectors


@dataclass
class InitVectors:
    V_minus: ComplexInterval
    V_plus: ComplexInterval


def init_vectors(lam, mu_minus, mu_plus, vplus) -> InitVectors:
    """V_- = (lam + mu_-, mu_-, mu_-^2) and the adjoint eigenvector V_+ (requires lam != 0)."""
    lam = _cx(lam)
    if np.any(lam.contains_zero()):
        raise iv.IntervalDomainError("the V_+ formula needs lambda bounded away from 0")
    mm = _cx(mu_minus)
    mp = _cx(mu_plus)
    vp = iv._to_real(vplus)
    Vm = iv.stack([lam + mm, mm, mm.sqr()], axis=-1)
    lc = lam.conj()
    pref = (1.0 / lc.sqr()) / vp
    c1 = -(lc * vp * mp)
    c2 = c1 + lc.sqr() * vp
    c3 = mp.sqr()
    Vp = iv.stack([pref * c1, pref * c2, pref * c3], axis=-1)
    return InitVectors(Vm, Vp)


def right_limit_vector(kappa, vplus) -> ComplexInterval:
    """(kappa, 1 + kappa, kappa^2 / v_+): eigenvector of A_+^T for nu = lam kappa."""
    k = _cx(kappa)
    vp = iv._to_real(vplus)
    return iv.stack([k, k + 1.0, k.sqr() / vp], axis=-1)


# ---------------------------------------------------------------- analytic interpolation in lambda


@dataclass
class MuEnclosure:
    """Rigorous interpolant of mu_- (left) or kappa (right) over a contour piece.

    ``enclosure`` has interval coefficients and the Hermite bound as its
    error; ``check`` is the midpoint polynomial with point coefficients and
    ``delta`` bounds |true - check| on the piece.
    """

    side: str
    rho: float
    N: int
    M: float
    enclosure: ChebEnclosure
    node_values: ComplexInterval = field(repr=False)

    @property
    def model(self) -> ChebModel:
        return ChebModel.from_enclosure(self.enclosure)

    def trimmed(self, tol: float = 1e-12) -> ChebModel:
        return self.model.trim(tol)

    def check(self, tol: float = 1e-12) -> ChebModel:
        """Point-coefficient polynomial used inside the ODE (trailing terms dropped)."""
        return ChebModel(self.trimmed(tol).c, 0.0, 1)

    def delta(self, tol: float = 1e-12) -> float:
        """Uniform bound on |true value - check(tol)| over the piece."""
        return float(self.trimmed(tol).err)

    @property
    def errBound(self) -> float:
        return float(self.enclosure.err)


def _clenshaw_complex(c: np.ndarray, t: np.ndarray) -> np.ndarray:
    b1 = np.zeros_like(t, dtype=complex)
    b2 = np.zeros_like(t, dtype=complex)
    for k in range(len(c) - 1, 0, -1):
        b1, b2 = 2 * t * b1 - b2 + c[k], b1
    return t * b1 - b2 + c[0]


def _float_branch(piece, side, sp, N=64):
    """Float Chebyshev coefficients of the selected root along the real piece."""
    from .chebyshev import coefficients_float, nodes_float

    t = nodes_float(N)
    lam = piece.lam_float(t)
    if side == LEFT:
        co = [np.ones_like(lam), lam - float(sp.f_minus.mid()), -2 * lam, -(lam**2)]
        r = _select_left(_roots_batch(co))
    else:
        vp = float(sp.vplus)
        co = [lam, lam - float(sp.f_plus.mid()), np.full_like(lam, -2 * vp), np.full_like(lam, -vp)]
        r = _select_kappa(_roots_batch(co), lam)
    return coefficients_float(r)


def _side_coeffs(side, lam, sp):
    if side == LEFT:
        return charpoly_left(lam, sp.f_minus)
    return kappa_poly(lam, sp.f_plus, sp.vplus_iv)


def _contains(outer: ComplexInterval, inner: ComplexInterval):
    return (outer.re.lo <= inner.re.lo) & (inner.re.hi <= outer.re.hi) & (outer.im.lo <= inner.im.lo) & (inner.im.hi <= outer.im.hi)


def verify_stadium(piece, side: str, sp: SpectralParams, rho: float, ns: int = 48, branch=None):
    """Certify the selected root is analytic on the t-stadium E_rho and bound it.

    The stadium is covered by a grid of boxes; each box gets a Krawczyk
    enclosure (unique simple root for every lambda in the box), and every pair
    of edge-adjacent boxes is re-verified on the hull of both, which glues the
    local branches into one analytic function.  The real segment [-1, 1] is
    covered by thin strips whose enclosures must sit inside the branch and
    satisfy the sign condition.  Returns ``(M, strips)`` or raises NewtonFailure.
    """
    if branch is None:
        branch = _float_branch(piece, side, sp)
    A = 0.5 * (rho + 1.0 / rho)
    B = 0.5 * (rho - 1.0 / rho)
    se = np.linspace(-A, A, ns + 1)
    hs = se[1] - se[0]
    nu = 2 * int(math.ceil(B / hs)) + 1  # odd, so one row straddles the real axis
    hu = 2 * B / nu if nu > 1 else 2 * B
    hu = max(hu, 1e-300)
    # make the middle row symmetric about 0 and contain the real segment
    ue = (np.arange(nu + 1) - nu / 2.0) * hu
    S0, U0 = np.meshgrid(se[:-1], ue[:-1], indexing="ij")
    S1, U1 = np.meshgrid(se[1:], ue[1:], indexing="ij")
    # keep boxes meeting the closed ellipse (nearest point test)
    ns_ = np.clip(0.0, S0, S1)
    nu_ = np.clip(0.0, U0, U1)
    keep = (ns_ / A) ** 2 + (nu_ / B) ** 2 <= 1.0 + 1e-12
    # the real segment must be covered: rows straddling 0 always kept for |s| <= 1
    idx = np.argwhere(keep)
    t_box = ComplexInterval(RealInterval(S0[keep], S1[keep]), RealInterval(U0[keep], U1[keep]))
    lam_box = piece.lam(t_box)
    tc = 0.5 * (S0[keep] + S1[keep]) + 0.5j * (U0[keep] + U1[keep])
    seed = _clenshaw_complex(branch, tc)
    co = _side_coeffs(side, lam_box, sp)
    fc = _float_coeffs(co)
    roots = _roots_batch(fc)
    near = np.argmin(np.abs(roots - seed[:, None]), axis=-1)
    seed = np.take_along_axis(roots, near[:, None], -1)[:, 0]
    X, ok = krawczyk(co, seed)
    if not np.all(ok):
        raise NewtonFailure("stadium box verification failed")
    grid_id = -np.ones(S0.shape, int)
    grid_id[keep] = np.arange(len(idx))
    # edge-adjacent pairs
    pairs = []
    for di, dj in ((1, 0), (0, 1)):
        a = grid_id[: grid_id.shape[0] - di, : grid_id.shape[1] - dj]
        b = grid_id[di:, dj:]
        m = (a >= 0) & (b >= 0)
        pairs.append(np.stack([a[m], b[m]], axis=-1))
    pairs = np.concatenate(pairs, axis=0)
    if len(pairs):
        i, j = pairs[:, 0], pairs[:, 1]
        lam_pair = lam_box[i].hull(lam_box[j])
        co2 = _side_coeffs(side, lam_pair, sp)
        Xh = X[i].hull(X[j])
        seed2 = Xh.mid()
        K, ok2 = krawczyk(co2, seed2)
        # uniqueness must hold on a set containing both box enclosures
        good = ok2 & _contains(K, Xh)
        if not np.all(good):
            bad = ~good
            # retry the failing pairs with an explicit hull-sized candidate set
            r = np.maximum(Xh.re.width(), Xh.im.width())[bad] * 0.75 + 1e-300
            Xc = ComplexInterval.from_disc(Xh.mid()[bad], r)
            dco = _dcoeffs(co2)
            cb = [c[bad] for c in co2]
            db = [c[bad] for c in dco]
            m = np.asarray(Xc.mid(), complex)
            fcb = _float_coeffs(cb)
            dm = (3 * fcb[0] * m + 2 * fcb[1]) * m + fcb[2]
            Y = ComplexInterval.point(1.0 / dm)
            Mi = ComplexInterval.point(m)
            Kc = Mi - Y * _horner(cb, Mi) + (1.0 - Y * _horner(db, Xc)) * (Xc - Mi)
            inside = _contains(Xc, Kc) & (Kc.re.lo > Xc.re.lo) & (Kc.re.hi < Xc.re.hi) & (Kc.im.lo > Xc.im.lo) & (Kc.im.hi < Xc.im.hi)
            if not np.all(inside & _contains(Xc, Xh[bad])):
                raise NewtonFailure("branch gluing failed between neighbouring boxes")
    M = float(np.max(iv.modulus(X).hi))
    # real strips aligned with the middle row of boxes
    mid_row = nu // 2
    cols = np.nonzero((se[1:] > -1.0) & (se[:-1] < 1.0))[0]
    s_lo = np.maximum(se[cols], -1.0)
    s_hi = np.minimum(se[cols + 1], 1.0)
    strips = ComplexInterval(RealInterval(s_lo, s_hi), RealInterval.point(np.zeros(len(cols))))
    lam_s = piece.lam(strips)
    co_s = _side_coeffs(side, lam_s, sp)
    box_ids = grid_id[cols, mid_row]
    if np.any(box_ids < 0):
        raise NewtonFailure("real segment not covered by the stadium grid")
    Xs, oks = krawczyk(co_s, X[box_ids].mid())
    if not np.all(oks) or not np.all(_contains(X[box_ids], Xs)):
        raise NewtonFailure("real-segment enclosure not inside its stadium box")
    if side == LEFT:
        sign_ok = Xs.re.lo > 0
    else:
        # nu = lam kappa vanishes at lam = 0; there the branch is fixed by continuation
        sign_ok = ((lam_s * Xs).re.lo > 0) | lam_s.contains_zero()
    if not np.all(sign_ok):
        raise iv.IntervalDomainError("sign condition for the selected eigenvalue failed on the piece")
    return M, (lam_s, Xs, X, strips)


DEFAULT_RHOS = (1.4, 1.2, 1.1, 1.05, 1.025)


def interpolate_mu(piece, side: str, sp: SpectralParams, tol: float = 1e-12, rhos=DEFAULT_RHOS, max_N: int = 256, N: int | None = None, rho: float | None = None, grids=(64, 128, 256)) -> MuEnclosure:
    """Rigorous Chebyshev interpolant of mu_- (left) or kappa (right) on a piece.

    Tries stadium parameters from large to small until the stadium is
    certified, then picks the smallest degree whose Hermite bound is below
    ``tol`` (or uses ``N`` if given).
    """
    branch = _float_branch(piece, side, sp)
    cands = (rho,) if rho is not None else rhos
    last = None
    best = None
    for r in cands:
        got = None
        for ns in grids:
            try:
                got = verify_stadium(piece, side, sp, r, ns=ns, branch=branch)
                break
            except NewtonFailure as exc:
                last = exc
        if got is None:
            continue
        M, strips = got
        st = Stadium(r, M)
        if N is not None:
            n = N
        else:
            n = None
            for cand in range(8, max_N + 1, 4):
                if hermite_error_bound(st, cand - 1).hi <= tol:
                    n = cand
                    break
            if n is None:
                last = NewtonFailure(f"degree above {max_N} needed at rho={r}")
                continue
        best = (r, M, n, strips)
        break
    if best is None:
        raise NewtonFailure(f"no certified stadium for piece: {last}")
    r, M, n, strips = best
    t = nodes(n)
    lam = piece.lam(ComplexInterval(t, RealInterval.point(np.zeros(n))))
    co = _side_coeffs(side, lam, sp)
    seed = _clenshaw_complex(branch, np.asarray(t.mid(), float) + 0j)
    roots = _roots_batch(_float_coeffs(co))
    near = np.argmin(np.abs(roots - seed[:, None]), axis=-1)
    seed = np.take_along_axis(roots, near[:, None], -1)[:, 0]
    X, ok = krawczyk(co, seed)
    if not np.all(ok):
        raise NewtonFailure("node enclosure failed")
    _check_nodes_on_branch(t, X, strips)
    enc = coefficients(X)
    err = hermite_error_bound(Stadium(r, M), n - 1)
    enc = enc.with_err(err.hi)
    return MuEnclosure(side, r, n, M, enc, X)


def _check_nodes_on_branch(t: RealInterval, X: ComplexInterval, strips):
    """Each node root must lie inside the enclosure of a real strip containing the node."""
    lam_s, Xs, _, t_strips = strips
    s_lo = t_strips.re.lo
    s_hi = t_strips.re.hi
    for k in range(len(t.lo)):
        j = np.nonzero((s_lo <= t.lo[k]) & (t.hi[k] <= s_hi))[0]
        if len(j) == 0 or not any(bool(_contains(Xs[i], X[k])) for i in j):
            raise NewtonFailure("interpolation node not on the certified branch")
