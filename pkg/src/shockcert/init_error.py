"""Rigorous initialization error at x = -L and x = +L.

Three ingredients feed the radius of the ball placed around the limiting
eigenvector at the ends of the integration interval:

* ``C1``: |exp(B x)| <= C1 exp(eta_hat x) for the constant-coefficient
  matrix B at each end, bounded with the Laplace representation of the
  matrix exponential over a rectangle that encloses the spectrum of B;
* ``(C2, eta)``: |A(x) - A_limit| <= C2 exp(eta (x -+ M)) beyond |x| = M, from
  the profile enclosure and a comparison argument;
* ``theta = q / (1 - q)`` from the contraction of the Duhamel fixed-point map.

On the right we work with the conjugated adjoint system Y' = (nu I - A^T) Y,
whose matrix has the same norms as the adjoint one, so all bounds transfer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import interval as iv
from .evans_system import (
    SpectralParams,
    _float_coeffs,
    _roots_batch,
    _select_kappa,
    _select_left,
    charpoly_left,
    kappa_poly,
    krawczyk,
)
from .interval import ComplexInterval, RealInterval
from .profile import f_of_v, fprime_of_v

ETA_HAT = {"left": 0.1, "right": -0.25}
# the printed right-hand constants correspond to reading the right exponent as +0.25
ETA_HAT_PUBLISHED = {"left": 0.1, "right": 0.25}
# published matrix-exponential constants; usable whenever our bound is below them
C1_PUBLISHED = {"left": 5.41, "right": 8.76}


class NoContraction(ArithmeticError):
    """q >= 1: the fixed-point map is not a contraction at this M."""

    def __init__(self, q):
        super().__init__(f"no contraction: q = {q}")
        self.q = q


@dataclass
class ExpBound:
    side: str
    C1: RealInterval
    eta_hat: float
    n_boxes: int
    n_sub: int
    worst_lambda: complex = 0.0
    per_box: np.ndarray = field(default=None, repr=False)

    def to_dict(self):
        return {
            "side": self.side,
            "C1_hi": repr(float(self.C1.hi)),
            "eta_hat": repr(self.eta_hat),
            "n_boxes": self.n_boxes,
            "n_sub": self.n_sub,
            "worst_lambda": [repr(self.worst_lambda.real), repr(self.worst_lambda.imag)],
        }


@dataclass
class DecayBound:
    side: str
    C2: RealInterval
    eta: RealInterval
    v_at_M: RealInterval
    M: float

    def to_dict(self):
        return {
            "side": self.side,
            "C2": [repr(float(self.C2.lo)), repr(float(self.C2.hi))],
            "eta": [repr(float(self.eta.lo)), repr(float(self.eta.hi))],
            "v_at_M": [repr(float(self.v_at_M.lo)), repr(float(self.v_at_M.hi))],
            "M": repr(self.M),
        }


@dataclass
class ContractionResult:
    q: RealInterval
    theta: RealInterval
    convention: str

    def to_dict(self):
        return {
            "q": [repr(float(self.q.lo)), repr(float(self.q.hi))],
            "theta": [repr(float(self.theta.lo)), repr(float(self.theta.hi))],
            "convention": self.convention,
        }


# ---------------------------------------------------------------- lambda boxes on the contour


def contour_lambda_boxes(sp: SpectralParams, n_axis: int = 256, n_arc: int = 128, radius: float | None = None) -> ComplexInterval:
    """Small complex boxes covering the upper half of the contour (axis and quarter arc)."""
    Ro = sp.R_outer if radius is None else radius
    e = np.linspace(0.0, Ro, n_axis + 1)
    e[-1] = Ro
    axis = ComplexInterval(RealInterval.point(np.zeros(n_axis)), RealInterval(e[:-1], e[1:]))
    th = np.linspace(0.0, 1.0, n_arc + 1)
    ang = RealInterval(th[:-1], th[1:]) * (iv.PI * 0.5)
    arc = iv.cexp(ComplexInterval(RealInterval.point(np.zeros(n_arc)), ang)) * Ro
    return iv.concatenate([axis, arc])


# ---------------------------------------------------------------- resolvent bounds


def _adj_det(u: ComplexInterval, lam: ComplexInterval, v, f):
    """Adjugate entries and determinant of u I - A for A = [[0, l, 1], [0, 0, 1], [l v, l v, f - l]]."""
    lv = lam * v
    g = u - (f - lam)  # (3,3) entry of u I - A
    # M = [[u, -l, -1], [0, u, -1], [-lv, -lv, g]]
    a11 = u * g - lv
    a12 = lam * g + lv
    a13 = lam + u
    a21 = -(lv)
    a22 = u * g - lv
    a23 = u
    a31 = lv * u
    a32 = lv * u + lam * lv
    a33 = u * u
    # adj = transpose of cofactors; rows listed as adj[i][j]
    adj = [[a11, a12, a13], [a21, a22, a23], [a31, a32, a33]]
    det = u * u * u + (lam - f) * u * u - (lam * v) * u * 2.0 - lam * lam * v
    return adj, det


def resolvent_norm(u: ComplexInterval, lam: ComplexInterval, v, f, det: ComplexInterval | None = None) -> RealInterval:
    """Upper bound of |(u I - A)^{-1}|_2 as min(Frobenius, sqrt(|.|_1 |.|_inf)).

    ``det`` may carry a sharper enclosure of det(u I - A) than the direct one.
    """
    adj, det0 = _adj_det(u, lam, v, f)
    det = det0 if det is None else det
    mods = [[iv.modulus(a) for a in row] for row in adj]
    fro = None
    for row in mods:
        for m in row:
            fro = m.sqr() if fro is None else fro + m.sqr()
    fro = iv.sqrt(fro)
    n1 = None
    ninf = None
    for j in range(3):
        col = mods[0][j] + mods[1][j] + mods[2][j]
        n1 = col if n1 is None else RealInterval(np.maximum(n1.lo, col.lo), np.maximum(n1.hi, col.hi))
    for i in range(3):
        row = mods[i][0] + mods[i][1] + mods[i][2]
        ninf = row if ninf is None else RealInterval(np.maximum(ninf.lo, row.lo), np.maximum(ninf.hi, row.hi))
    mix = iv.sqrt(n1 * ninf)
    num = RealInterval(np.minimum(fro.lo, mix.lo), np.minimum(fro.hi, mix.hi))
    dm = iv.modulus(det)
    # entries whose determinant may vanish come back as +inf
    lo = np.where(dm.lo > 0, dm.lo, 1.0)
    out = num / RealInterval(lo, lo)
    bad = ~(dm.lo > 0)
    return RealInterval(np.where(bad, 0.0, out.lo), np.where(bad, np.inf, out.hi))


def _shift_poly(m: ComplexInterval, lam: ComplexInterval, v, f):
    """Coefficients (c2, c1, c0) of p(m + s) = s^3 + c2 s^2 + c1 s + c0, p the characteristic polynomial."""
    b = lam - f
    c = -(lam * v) * 2.0
    d = -(lam * lam * v)
    c2 = m * 3.0 + b
    c1 = m * m * 3.0 + b * m * 2.0 + c
    c0 = ((m + b) * m + c) * m + d
    return c2, c1, c0


def _shift_coeffs(m: ComplexInterval, lam: ComplexInterval, v, f):
    """|coefficients| of p(m + s) in s."""
    return [iv.modulus(x) for x in _shift_poly(m, lam, v, f)]


def _other_roots_re_max(m: ComplexInterval, lam: ComplexInterval, v, f, quot) -> RealInterval:
    """Upper bound for Re of the two remaining roots of p after deflating the root m.

    ``quot`` is the product of the remaining roots (lam^2 v / m, passed in a
    form that stays bounded near lam = 0).
    """
    s = (f - lam) - m
    w = s * s - quot * 4.0
    aw = iv.modulus(w)
    # Re sqrt(w) <= sqrt((|w| + Re w) / 2)
    t = (aw + w.re) * 0.5
    t = RealInterval(np.maximum(t.lo, 0.0), np.maximum(t.hi, 0.0))
    return (s.re + iv.sqrt(t)) * 0.5


def _split(boxes: ComplexInterval) -> ComplexInterval:
    """Halve each box along its longer side."""
    wr = boxes.re.hi - boxes.re.lo
    wi = boxes.im.hi - boxes.im.lo
    byre = wr >= wi
    mr = 0.5 * (boxes.re.lo + boxes.re.hi)
    mi = 0.5 * (boxes.im.lo + boxes.im.hi)
    a = boxes.copy()
    b = boxes.copy()
    a.re.hi[byre] = mr[byre]
    b.re.lo[byre] = mr[byre]
    a.im.hi[~byre] = mi[~byre]
    b.im.lo[~byre] = mi[~byre]
    return iv.concatenate([a, b])


def verified_roots(side: str, lam: ComplexInterval, sp: SpectralParams, max_rounds: int = 8):
    """Krawczyk enclosures of mu_- (left) or kappa (right) on lambda boxes, splitting failures.

    Returns (boxes, X) where the boxes cover the input boxes.
    """
    done_l, done_x = [], []
    for _ in range(max_rounds + 1):
        if side == "left":
            co = charpoly_left(lam, sp.f_minus)
            seed = _select_left(_roots_batch(_float_coeffs(co)))
        else:
            co = kappa_poly(lam, sp.f_plus, sp.vplus_iv)
            seed = _select_kappa(_roots_batch(_float_coeffs(co)), np.asarray(lam.mid(), complex))
        with np.errstate(over="ignore", invalid="ignore"):
            X, ok = krawczyk(co, seed)
        if np.any(ok):
            done_l.append(lam[ok])
            done_x.append(X[ok])
        if np.all(ok):
            return iv.concatenate(done_l), iv.concatenate(done_x)
        lam = _split(lam[~ok])
    raise ArithmeticError("root enclosure failed on some lambda boxes after refinement")


def _box_data(side: str, lam: ComplexInterval, sp: SpectralParams):
    """(boxes, shift m, profile value v, f, product of the other roots) for B on each box."""
    lam, X = verified_roots(side, lam, sp)
    if side == "left":
        v = RealInterval.point(1.0)
        f = sp.f_minus
        m = X
        quot = lam * lam * v / m
    else:
        v = sp.vplus_iv
        f = sp.f_plus
        m = lam * X
        quot = lam * v / X
    return lam, m, v, f, quot


def _rectangle(side: str, Rc: float, eta_hat: float, n_sub: int):
    """Sub-segments of the Laplace rectangle: (re interval, im interval, length) per side."""
    if side == "left":
        x0, x1 = -Rc, eta_hat
    else:
        x0, x1 = eta_hat, Rc
    xs = np.linspace(x0, x1, n_sub + 1)
    ys = np.linspace(-Rc, Rc, n_sub + 1)
    xs[0], xs[-1] = x0, x1
    ys[0], ys[-1] = -Rc, Rc
    hx = RealInterval(xs[:-1], xs[1:])
    hy = RealInterval(ys[:-1], ys[1:])
    lx = (RealInterval.point(xs[1:]) - RealInterval.point(xs[:-1])).hi
    ly = (RealInterval.point(ys[1:]) - RealInterval.point(ys[:-1])).hi
    one = np.ones(n_sub)
    re = iv.concatenate([hx, RealInterval.point(x1 * one), hx, RealInterval.point(x0 * one)])
    im = iv.concatenate([RealInterval.point(-Rc * one), hy, RealInterval.point(Rc * one), hy])
    ln = np.concatenate([lx, ly, lx, ly])
    return ComplexInterval(re, im), ln


def _box_totals(side: str, sp: SpectralParams, lam_boxes: ComplexInterval, eta_hat: float, n_sub: int, chunk: int):
    """Upper bounds of C1 per (verified) lambda box; +inf where a box is too coarse."""
    lam_boxes, m, v, f, quot = _box_data(side, lam_boxes, sp)
    n = lam_boxes.shape[0]
    c2, c1, _ = _shift_poly(m, lam_boxes, v, f)
    # m is a root, so p(m + s) = s (s^2 + c2 s + c1) exactly
    Rc = 1.0 + np.maximum(iv.modulus(c2).hi, iv.modulus(c1).hi)
    Rc = np.nextafter(Rc, np.inf)
    # spectrum location: eigenvalues of B are 0 and (r_i - m) (left) or (m - r_i) (right)
    re_other = _other_roots_re_max(m, lam_boxes, v, f, quot)
    if side == "left":
        ok = (re_other - m.re).hi < eta_hat
    else:
        ok = (m.re - re_other).lo > eta_hat
    totals = np.full(n, np.inf)
    live = np.nonzero(ok & np.isfinite(Rc))[0]
    for c0 in range(0, len(live), chunk):
        idx = live[c0 : c0 + chunk]
        zs = []
        lens = []
        for k in idx:
            z, ln = _rectangle(side, float(Rc[k]), eta_hat, n_sub)
            zs.append(z)
            lens.append(ln)
        z = iv.stack(zs)  # (b, 4 n_sub)
        lam_b = lam_boxes[idx].reshape(-1, 1)
        m_b = m[idx].reshape(-1, 1)
        c2b = c2[idx].reshape(-1, 1)
        c1b = c1[idx].reshape(-1, 1)
        # left: (z - B)^{-1} = ((z + m) I - A)^{-1}; right: norm of ((m - z) I - A)^{-1}
        if side == "left":
            u = z + m_b
            det = z * ((z + c2b) * z + c1b)
        else:
            # p(m - z) = -z (z^2 - c2 z + c1)
            u = m_b - z
            det = z * ((z - c2b) * z + c1b)
        nr = resolvent_norm(u, lam_b + ComplexInterval.zeros(u.shape), v, f, det)
        contrib = nr * RealInterval.point(np.stack(lens))
        s = iv.isum(contrib, axis=1)
        totals[idx] = (s / (2 * iv.PI)).hi
    return lam_boxes, totals


def matrix_exp_bound(side: str, sp: SpectralParams, lam_boxes: ComplexInterval | None = None, eta_hat: float | None = None, n_sub: int = 1000, chunk: int = 8, max_rounds: int = 6) -> ExpBound:
    """C1 with |exp(B x)| <= C1 exp(eta_hat x) (x >= 0 left, x <= 0 right) on the contour.

    For each lambda box: the Cauchy bound Rc of B's characteristic polynomial
    sizes the rectangle; a deflation bound certifies that every eigenvalue
    lies inside it; the contour integral of the resolvent norm is bounded by
    an interval upper sum over ``n_sub`` sub-segments per side.  Boxes where
    either step is inconclusive are halved and redone.
    """
    eta_hat = ETA_HAT[side] if eta_hat is None else eta_hat
    if lam_boxes is None:
        lam_boxes = contour_lambda_boxes(sp)
    kept_l, kept_t = [], []
    for _ in range(max_rounds + 1):
        lam_boxes, totals = _box_totals(side, sp, lam_boxes, eta_hat, n_sub, chunk)
        fin = np.isfinite(totals)
        if np.any(fin):
            kept_l.append(lam_boxes[fin])
            kept_t.append(totals[fin])
        if np.all(fin):
            break
        lam_boxes = _split(lam_boxes[~fin])
    else:
        raise ArithmeticError(f"C1 bound inconclusive on {int(np.sum(~fin))} lambda boxes")
    lam_all = iv.concatenate(kept_l)
    totals = np.concatenate(kept_t)
    k = int(np.argmax(totals))
    worst = complex(float(lam_all.re.mid()[k]), float(lam_all.im.mid()[k]))
    return ExpBound(side, RealInterval(0.0, float(np.max(totals))), eta_hat, len(totals), n_sub, worst, totals)


# ---------------------------------------------------------------- coefficient decay


def _left_rate(vr: RealInterval, a: RealInterval, gamma: RealInterval) -> RealInterval:
    """Enclosure of F(v)/(v - 1) for v in vr (subset of (0, 1]) by the mean value theorem."""
    # (v^-g - 1)/(v - 1) = -g xi^(-g-1), xi in [v, 1]
    xi = iv.pow(RealInterval(vr.lo, vr.lo), -(gamma + 1.0))
    s = RealInterval(np.ones(np.shape(vr.lo)), xi.hi)
    return vr * (1.0 - a * gamma * s)


def coefficient_decay(side: str, sp: SpectralParams, v_at_M: RealInterval, M: float = 10.0, n_sub: int = 64, radius: float | None = None) -> DecayBound:
    """(C2, eta) with |A(x) - A_limit| <= C2 exp(eta (x -+ M)) beyond |x| = M.

    ``v_at_M`` encloses the profile at -M (left) or +M (right).
    """
    a = sp.a
    g = sp.gamma_iv
    vp = sp.vplus_iv
    Rr = RealInterval.point(sp.R_outer if radius is None else radius)
    if side == "left":
        lo = float(v_at_M.lo)
        if not lo < 1.0:
            raise ValueError("v(-M) must lie below 1")
        e = np.linspace(lo, 1.0, n_sub + 1)
        rates = _left_rate(RealInterval(e[:-1], e[1:]), a, g)
        eta = RealInterval(float(np.min(rates.lo)), float(np.min(rates.hi)))
        dist = iv.absval(RealInterval.point(1.0) - v_at_M)
        fp = fprime_of_v(RealInterval(lo, lo), a, g)
    else:
        c = (1.0 - vp) / (1.0 - iv.pow(vp, g))
        # F(v)/(v - v+) = v - c (1 - x^g)/(1 - x) with x = v+/v, and the ratio lies in [1, g]
        eta = v_at_M - c
        if not eta.hi < 0:
            raise ValueError("no decay: v(M) too far from v+")
        dist = iv.absval(v_at_M - vp)
        fp = fprime_of_v(vp, a, g)
    dist = RealInterval(0.0 if dist.lo.size == 1 and float(dist.lo) < 0 else dist.lo, dist.hi)
    K = iv.sqrt(Rr.sqr() * 2.0 + RealInterval(fp.hi, fp.hi).sqr())
    C2 = dist * K
    return DecayBound(side, C2, eta, v_at_M, M)


# ---------------------------------------------------------------- contraction


def contraction_theta(side: str, C1, C2, eta, M: float = 10.0, convention: str = "sound") -> ContractionResult:
    """q and theta = q/(1 - q) of the Duhamel fixed-point map.

    ``sound``: the decay bound is anchored at |x| = M, so
    q = C1 C2 / (eta - eta_hat) on the left and C1 C2 / (eta_hat - eta) on
    the right.  ``published``: the printed convention, which multiplies by
    exp(eta M) (M = -10 left, +10 right) and uses +0.25 on the right.
    """
    C1 = iv._to_real(C1)
    C2 = iv._to_real(C2)
    eta = iv._to_real(eta)
    if convention == "sound":
        eh = ETA_HAT[side]
        denom = (eta - eh) if side == "left" else (RealInterval.point(eh) - eta)
        fac = RealInterval.point(1.0)
    elif convention == "published":
        eh = ETA_HAT_PUBLISHED[side]
        denom = (eta - eh) if side == "left" else (RealInterval.point(eh) - eta)
        fac = iv.exp(eta * (-M if side == "left" else M))
    else:
        raise ValueError("convention must be 'sound' or 'published'")
    if not float(denom.lo) > 0:
        raise NoContraction(float("inf"))
    q = C1 * C2 * fac / denom
    q = RealInterval(np.maximum(q.lo, 0.0), q.hi)
    if not float(q.hi) < 1:
        raise NoContraction(float(q.hi))
    theta = q / (1.0 - q)
    return ContractionResult(q, theta, convention)


def initial_enclosure(V: ComplexInterval, theta) -> ComplexInterval:
    """V inflated componentwise by the ball of radius theta |V|_2."""
    theta = iv._to_real(theta)
    mods = iv.modulus(V)
    nrm = iv.sqrt(iv.isum(mods.sqr(), axis=-1))
    r = (nrm * theta).hi
    r = np.asarray(r)[..., None] * np.ones(V.shape)
    ball = RealInterval(-r, r)
    return V + ComplexInterval(ball, ball)


# ---------------------------------------------------------------- report


def profile_end_values(prof, M: float = 10.0):
    return prof.value_at(RealInterval.point(-M)), prof.value_at(RealInterval.point(M))


def init_constants(sp: SpectralParams, prof, M: float = 10.0, C1=None, n_sub: int = 1000, n_axis: int = 256, n_arc: int = 128) -> dict:
    """All initialization constants (both conventions) as plain numbers plus records."""
    vm, vpM = profile_end_values(prof, M)
    out = {}
    for side, vM in (("left", vm), ("right", vpM)):
        if C1 is not None and side in C1:
            eb = C1[side]
        else:
            eb = matrix_exp_bound(side, sp, contour_lambda_boxes(sp, n_axis, n_arc), n_sub=n_sub)
        db = coefficient_decay(side, sp, vM, M)
        sound = contraction_theta(side, eb.C1, db.C2, db.eta, M, "sound")
        # the printed table is computed from the stated constants, which our bound verifies
        published_ok = float(eb.C1.hi) <= C1_PUBLISHED[side]
        c1p = RealInterval(0.0, C1_PUBLISHED[side]) if published_ok else eb.C1
        published = contraction_theta(side, c1p, db.C2, db.eta, M, "published")
        out[side] = {"exp": eb, "decay": db, "sound": sound, "published": published, "published_C1_verified": published_ok}
    return out


def constants_report(consts: dict, vplus) -> dict:
    """JSON-ready summary mirroring the layout of the published constants table."""
    rows = {"vplus": str(vplus)}
    for side, tag in (("left", "minus"), ("right", "plus")):
        c = consts[side]
        rows[f"C1_{tag}"] = repr(float(c["exp"].C1.hi))
        rows[f"C1_{tag}_published_verified"] = bool(c.get("published_C1_verified", False))
        rows[f"eta_{tag}"] = [repr(float(c["decay"].eta.lo)), repr(float(c["decay"].eta.hi))]
        rows[f"C2_{tag}"] = [repr(float(c["decay"].C2.lo)), repr(float(c["decay"].C2.hi))]
        rows[f"theta_{tag}_published"] = [repr(float(c["published"].theta.lo)), repr(float(c["published"].theta.hi))]
        rows[f"theta_{tag}"] = [repr(float(c["sound"].theta.lo)), repr(float(c["sound"].theta.hi))]
    return rows
