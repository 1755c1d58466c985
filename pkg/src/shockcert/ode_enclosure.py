"""Validated integration of the Evans ODE across a whole contour piece at once."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import interval as iv
from .chebyshev import Stadium, coefficients, hermite_error_bound, nodes
from .interval import ComplexInterval, RealInterval
from .polymodel import ChebModel

HALF_PI = iv.PI * 0.5


@dataclass(frozen=True)
class ContourPiece:
    """A piece of the upper half of the contour, parameterised by t in [-1, 1].

    ``axis``: lambda(t) = i (c + w t) with c, w the midpoint and half-length of
    [lo, hi] on the imaginary axis.  ``arc``: lambda(t) = R exp(i pi/2 (c + w t))
    where [lo, hi] is a sub-range of [0, 1] in units of a quarter turn.
    """

    kind: str
    lo: float
    hi: float
    radius: float = 0.0
    index: int = 0

    def __post_init__(self):
        if self.kind not in ("axis", "arc"):
            raise ValueError("piece kind must be 'axis' or 'arc'")
        if not self.hi > self.lo:
            raise ValueError("empty piece")
        if self.kind == "arc" and not (0.0 <= self.lo and self.hi <= 1.0 and self.radius > 0):
            raise ValueError("arc pieces live on [0, 1] quarter turns with a positive radius")

    @property
    def c(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def w(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def _cw(self):
        lo = RealInterval.point(self.lo)
        hi = RealInterval.point(self.hi)
        return (lo + hi) * 0.5, (hi - lo) * 0.5

    def lam(self, t) -> ComplexInterval:
        """Enclosure of lambda(t) for complex-interval t."""
        t = iv.as_complex(t)
        c, w = self._cw()
        if self.kind == "axis":
            return ComplexInterval(-(t.im * w), t.re * w + c)
        arg = ComplexInterval(-(t.im * w) * HALF_PI, (t.re * w + c) * HALF_PI)
        return iv.cexp(arg) * self.radius

    def lam_float(self, t) -> np.ndarray:
        t = np.asarray(t)
        if self.kind == "axis":
            return 1j * (self.c + self.w * t)
        return self.radius * np.exp(1j * np.pi / 2 * (self.c + self.w * t))

    def lam_model(self) -> ChebModel:
        """lambda(t) as a Chebyshev model (exact on the axis, interpolated on arcs)."""
        if self.kind == "axis":
            c, w = self._cw()
            if c.width() > 0 or w.width() > 0:
                raise ValueError("axis breakpoints must give exact midpoints")
            return ChebModel(np.array([1j * float(c.lo), 1j * float(w.lo)]), 0.0, 1)
        rho = 16.0
        st_M = math.exp(math.pi / 2 * self.w * 0.5 * (rho - 1 / rho)) * (1 + 1e-12)
        st = Stadium(rho, st_M)
        n = 4
        while hermite_error_bound(st, n - 1).hi > 1e-17 and n < 64:
            n += 2
        t = nodes(n)
        c, w = self._cw()
        vals = iv.cexp(ComplexInterval(RealInterval.point(np.zeros(n)), (t * w + c) * HALF_PI))
        enc = coefficients(vals).with_err(hermite_error_bound(st, n - 1).hi)
        return ChebModel.from_enclosure(enc).scale(self.radius)

    def describe(self) -> dict:
        return {"index": self.index, "kind": self.kind, "lo": repr(self.lo), "hi": repr(self.hi), "radius": repr(self.radius)}


# ---------------------------------------------------------------- configuration and records


@dataclass
class SolverConfig:
    """Numerical knobs of the validated Evans ODE solver."""

    n_y: int = 24  # degree of T in the tile variable
    n_t: int = 16  # degree of T in the contour parameter
    profile_nodes: int = 24
    tile_length: float = 2.0
    min_tile: float = 1.0 / 16
    beta_max: float = 1e-3
    det_grid: int = 64
    theta_boxes: int = 64
    exact_defect: bool = True
    mu_trim: float = 1e-12


class PieceRejected(RuntimeError):
    """A tile could not be validated even at the minimum tile length."""

    def __init__(self, msg, tile=None):
        super().__init__(msg)
        self.tile = tile


@dataclass
class DefectBound:
    eps: float
    detLower: float
    coeffSum: float
    sigma: complex
    delta0: float

    @property
    def beta(self) -> float:
        """Relative perturbation per tile: T(-1) != I plus the defect growth over length 2."""
        d0 = self.delta0
        g = float(iv.exp(RealInterval.point(2.0 * self.eps)).hi) - 1.0
        return float(np.nextafter(d0 + (1.0 + d0) * g * (1 + 4e-16), np.inf))


@dataclass
class TileRecord:
    x_start: float
    x_end: float
    eps: float
    detLower: float
    beta: float
    sigma: complex

    def to_dict(self):
        return {
            "x_start": repr(self.x_start),
            "x_end": repr(self.x_end),
            "eps": repr(self.eps),
            "detLower": repr(self.detLower),
            "beta": repr(self.beta),
            "sigma_re": repr(self.sigma.real),
            "sigma_im": repr(self.sigma.imag),
        }


@dataclass
class PieceEnclosure:
    """Enclosure of the scaled solution at x = 0 over a whole contour piece.

    The solution is ``c * exp(log_scale) * (vec(t) + r)`` with ``|r| <= radius``
    (Euclidean) and ``|c - 1| <= correction``.
    """

    side: str
    vec: ChebModel
    radius: float
    log_scale: ComplexInterval
    correction: float
    tiles: list
    mu_delta: float

    def records(self):
        return [t.to_dict() for t in self.tiles]


# ---------------------------------------------------------------- small helpers


def _up(x):
    return float(np.nextafter(x, np.inf))


def norm2_up(sups) -> float:
    """Upper bound of sqrt(sum sups^2) (Frobenius / Euclidean norm from entry bounds)."""
    s = np.asarray(sups, float).ravel()
    tot = 0.0
    for v in s:
        tot = _up(tot + _up(v * v))
    return _up(math.sqrt(tot) * (1 + 2**-52))


def stack_models(entries, nvars: int) -> ChebModel:
    """Stack a nested list of models (all with scalar values) into one model."""
    flat = [e for row in entries for e in (row if isinstance(row, (list, tuple)) else [row])]
    shape = tuple(max(e.c.shape[k] for e in flat) for k in range(nvars))
    cs = [e.pad_to(shape) for e in flat]
    c = np.stack([e.c for e in cs]).reshape((len(entries), -1) + shape if isinstance(entries[0], (list, tuple)) else (len(entries),) + shape)
    err = np.array([float(e.err) for e in cs]).reshape(c.shape[: c.ndim - nvars])
    return ChebModel(c, err, nvars)


def _flip(m: ChebModel, axis: int = 0) -> ChebModel:
    """Reverse the orientation of one variable (s -> -s)."""
    ax = m.c.ndim - m.nvars + axis
    n = m.c.shape[ax]
    sign = (-1.0) ** np.arange(n)
    shp = [1] * m.c.ndim
    shp[ax] = n
    return ChebModel(m.c * sign.reshape(shp), m.err, m.nvars)


def adjugate3(T: ChebModel) -> ChebModel:
    """Adjugate of a 3x3 matrix model (exact degree bookkeeping)."""
    e = lambda i, j: T[i, j]
    cof = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = e(r[0], c[0]) * e(r[1], c[1]) - e(r[0], c[1]) * e(r[1], c[0])
            cof[i][j] = minor if (i + j) % 2 == 0 else -minor
    adj = [[cof[j][i] for j in range(3)] for i in range(3)]
    return stack_models(adj, T.nvars)


def det3(T: ChebModel, adj: ChebModel | None = None) -> ChebModel:
    if adj is None:
        adj = adjugate3(T)
    return T[0, 0] * adj[0, 0] + T[0, 1] * adj[1, 0] + T[0, 2] * adj[2, 0]


# ---------------------------------------------------------------- collocation


def _cheb_basis(y: np.ndarray, n: int):
    """T_k(y) and T_k'(y) for k < n at points y (inside (-1, 1))."""
    th = np.arccos(np.clip(y, -1, 1))
    k = np.arange(n)
    Tk = np.cos(np.outer(th, k))
    with np.errstate(divide="ignore", invalid="ignore"):
        dTk = k[None, :] * np.sin(np.outer(th, k)) / np.sin(th)[:, None]
    return Tk, dTk


def build_collocation(A_samples: np.ndarray, N: int) -> np.ndarray:
    """Blocks of the collocation matrix for y' = A(y) y with degree-N vector polynomials.

    ``A_samples`` has shape (K, N+1, 3, 3): A at the N+1 Chebyshev roots for
    each of K lambda nodes.  Block k maps the 3(N+1) coefficients (component
    major) to the 3(N+1) residuals T'(y_j) c - A(y_j) T(y_j) c.  The full
    matrix is block diagonal in the lambda nodes (see ``as_sparse``).
    """
    A_samples = np.asarray(A_samples, complex)
    K, J = A_samples.shape[:2]
    y = np.cos((np.arange(J) + 0.5) * np.pi / J)
    Tk, dTk = _cheb_basis(y, N + 1)
    M = np.zeros((K, 3 * J, 3 * (N + 1)), complex)
    for i in range(3):
        M[:, i * J : (i + 1) * J, i * (N + 1) : (i + 1) * (N + 1)] += dTk[None]
        for l in range(3):
            M[:, i * J : (i + 1) * J, l * (N + 1) : (l + 1) * (N + 1)] -= A_samples[:, :, i, l][:, :, None] * Tk[None]
    return M


def as_sparse(blocks: np.ndarray):
    from scipy.sparse import block_diag

    return block_diag(list(blocks), format="csr")


def approx_basis(blocks: np.ndarray, N: int, gap_check: bool = True):
    """Three right singular vectors with the smallest singular values, per block.

    Returns (B, gap) with B of shape (K, 3, 3, N+1): component, column, degree,
    and gap = max over blocks of s_3 / s_4 (small on healthy pieces).
    """
    _, s, vh = np.linalg.svd(blocks)
    v = np.conj(vh[:, -3:, :])  # (K, 3 columns, 3(N+1))
    B = v.reshape(v.shape[0], 3, 3, N + 1).transpose(0, 2, 1, 3)
    gap = float(np.max(s[:, -3] / s[:, -4])) if s.shape[1] > 3 else 0.0
    return B, gap


def _basis_at(B: np.ndarray, y: float) -> np.ndarray:
    n = B.shape[-1]
    w = np.cos(np.arange(n) * np.arccos(np.clip(y, -1, 1)))
    return B @ w


def transform_coefficients(B: np.ndarray) -> np.ndarray:
    """Coefficients of T(y) = B(y) B(-1)^{-1} per lambda node, shape (K, 3, 3, N+1)."""
    B0 = _basis_at(B, -1.0)  # (K, 3, 3)
    cond = np.linalg.cond(B0)
    if not np.all(np.isfinite(cond)) or np.max(cond) > 1e10:
        raise PieceRejected("near-kernel of the collocation matrix is degenerate")
    inv = np.linalg.inv(B0)
    return np.einsum("kilm,klj->kijm", B, inv)


def collocate_transform(A_model: ChebModel, sigma: complex, n_y: int, n_t: int) -> ChebModel:
    """Approximate fundamental matrix T(y, t), T(-1, t) ~ I, for y' = (A - sigma) y."""
    J = n_y + 1
    yk = np.cos((np.arange(J) + 0.5) * np.pi / J)
    tk = np.cos((np.arange(n_t + 1) + 0.5) * np.pi / (n_t + 1))
    vals = A_model.eval_points(yk, tk)  # (3, 3, J, K)
    vals = np.moveaxis(vals, (2, 3), (1, 0))  # (K, J, 3, 3)
    vals = vals - sigma * np.eye(3)
    blocks = build_collocation(vals, n_y)
    B, gap = approx_basis(blocks, n_y)
    Tc = transform_coefficients(B)  # (K, 3, 3, n_y+1)
    from .chebyshev import coefficients_float

    c2 = coefficients_float(np.moveaxis(Tc, 0, -1), axis=-1)  # (3, 3, n_y+1, K)
    return ChebModel(c2, 0.0, 2)


# ---------------------------------------------------------------- rigorous defect


def defect_bound(T: ChebModel, A_sigma: ChebModel, exact: bool = True, det_grid: int = 64):
    """epsilon with |T^{-1}(A T - T')| <= epsilon over the tile and the piece."""
    from .polymodel import min_modulus_2d

    adj = adjugate3(T)
    det = det3(T, adj)
    R = (A_sigma @ T) - T.deriv(0)
    if exact:
        num = adj @ R
        sups = num.sup()
    else:
        sa = adj.sup()
        sr = R.sup()
        sups = np.zeros((3, 3))
        for i in range(3):
            for k in range(3):
                sups[i, k] = _up(sum(_up(sa[i, j] * sr[j, k]) for j in range(3)) * (1 + 4e-16))
    coeff = norm2_up(sups)
    lower, _ = min_modulus_2d(det, ny=det_grid, nt=det_grid)
    if not lower > 0:
        return None, coeff, 0.0
    eps = _up(_up(coeff / lower) * (1 + 4e-16))
    return eps, coeff, lower


def start_offset(T: ChebModel) -> float:
    """delta_0 with |T(-1, t)^{-1} - I| <= delta_0 on the piece."""
    P = T.at_edge(0, -1) - ChebModel(np.eye(3)[:, :, None], 0.0, 1)
    p = norm2_up(P.sup())
    if p >= 0.5:
        raise PieceRejected("T(-1) too far from the identity")
    return _up(_up(p / (1 - p)) * (1 + 4e-16))


def propagation_radius(eps, length, w_norm) -> RealInterval:
    """|V(b) - V(a)| <= |W(a)| (exp(eps (b - a)) - 1)."""
    e = iv.exp(RealInterval.point(eps) * RealInterval.point(abs(length))) - 1.0
    return e * RealInterval.point(w_norm)


def propagate(V_a: ChebModel, radius_a: float, G: ChebModel, beta: float):
    """One tile: W(b) = G (V(a) + r) with |r| <= beta |V(a)|; returns (centre, radius)."""
    centre = G @ V_a
    ga = norm2_up(G.sup())
    va = norm2_up(V_a.sup())
    rad = _up(_up(ga * radius_a) + _up(ga * beta * _up(va + radius_a)) * (1 + 1e-15))
    return centre, rad


def correction_radius(delta: float, L: float) -> float:
    """|exp((mu_true - mu_check) L) - 1| <= exp(delta L) - 1."""
    if delta == 0.0:
        return 0.0
    return float((iv.exp(RealInterval.point(delta) * RealInterval.point(L)) - 1.0).hi)


def apply_mu_correction(V0: ComplexInterval, delta: float, L: float) -> ComplexInterval:
    """Multiply an enclosure by the disc 1 + D(0, exp(delta L) - 1)."""
    r = correction_radius(delta, L)
    if r == 0.0:
        return V0
    mag = iv.modulus(V0).hi * r
    ball = RealInterval(-mag, mag)
    return V0 + ComplexInterval(ball, ball)


# ---------------------------------------------------------------- whole-piece solver


class EvansContext:
    """Shared data for all pieces: profile, parameters, solver knobs and caches."""

    def __init__(self, prof, sp, config: SolverConfig | None = None, theta=(0.0, 0.0), L: float = 10.0):
        self.prof = prof
        self.sp = sp
        self.config = config or SolverConfig()
        self.theta = {"left": float(theta[0]), "right": float(theta[1])}
        self.L = float(L)
        self._prof_cache = {}

    def profile_models(self, a: float, b: float):
        """(v, f(v)) as 1-variable models on [min(a,b), max(a,b)] oriented from a to b."""
        key = (a, b)
        if key not in self._prof_cache:
            lo, hi = min(a, b), max(a, b)
            n = self.config.profile_nodes
            v = ChebModel.from_enclosure(self.prof.cheb_interpolant(lo, hi, n, "v"))
            f = ChebModel.from_enclosure(self.prof.cheb_interpolant(lo, hi, n, "f"))
            if a > b:
                v, f = _flip(v), _flip(f)
            self._prof_cache[key] = (v, f)
        return self._prof_cache[key]


def tile_matrix(side: str, v: ChebModel, f: ChebModel, lam: ChebModel, m: ChebModel, h: float) -> ChebModel:
    """h times the system matrix as a model in (y, t).

    left:  A - m I with A = [[0, lam, 1], [0, 0, 1], [lam v, lam v, f - lam]]
    right: m I - A^T
    """
    L2 = lam.lift(nvars_before=1)
    M2 = m.lift(nvars_before=1)
    F2 = f.lift(nvars_after=1)
    lv = v.outer(lam)
    zero = ChebModel.const(0.0, 2)
    one = ChebModel.const(1.0, 2)
    if side == "left":
        rows = [[-M2, L2, one], [zero, -M2, one], [lv, lv, F2 - L2 - M2]]
    else:
        rows = [[M2, zero, -lv], [-L2, M2, -lv], [-one, -one, M2 - F2 + L2]]
    return stack_models(rows, 2).scale(float(h))


def _mean_trace(A: ChebModel) -> complex:
    # the constant coefficient of the trace is its mean in the Chebyshev sense
    return complex(sum(A.c[i, i, 0, 0] for i in range(3)) / 3.0)


def validate_tile(ctx: EvansContext, side: str, x_s: float, x_e: float, lam: ChebModel, m: ChebModel):
    """Approximate transform, rigorous defect and tile map for one x-tile.

    Returns (G, DefectBound) or raises PieceRejected.
    """
    cfg = ctx.config
    v, f = ctx.profile_models(x_s, x_e)
    h = 0.5 * (x_e - x_s)
    A = tile_matrix(side, v, f, lam, m, h)
    sigma = _mean_trace(A)
    A_s = A - ChebModel(np.eye(3)[:, :, None, None] * sigma, 0.0, 2)
    T = collocate_transform(A_s, sigma=0.0, n_y=cfg.n_y, n_t=cfg.n_t)
    eps, coeff, lower = defect_bound(T, A_s, exact=cfg.exact_defect, det_grid=cfg.det_grid)
    if eps is None:
        raise PieceRejected("no positive lower bound for det T", tile=(x_s, x_e))
    d0 = start_offset(T)
    db = DefectBound(eps, lower, coeff, sigma, d0)
    G = T.at_edge(0, +1)
    return G, db


def _tiles(side: str, L: float, length: float):
    n = int(round(L / length))
    if side == "left":
        xs = [-L + k * length for k in range(n + 1)]
    else:
        xs = [L - k * length for k in range(n + 1)]
    xs[-1] = 0.0
    return list(zip(xs[:-1], xs[1:]))


def initial_model(side: str, lam: ChebModel, root: ChebModel, vplus) -> ChebModel:
    """Limit eigenvector as a model: (lam + mu, mu, mu^2) or (kappa, 1 + kappa, kappa^2 / v_+)."""
    if side == "left":
        comps = [lam + root, root, root * root]
    else:
        comps = [root, root + 1.0, (root * root).scale(1.0 / iv._to_real(vplus))]
    return stack_models(comps, 1)


def _norm_sup(m: ChebModel) -> float:
    return norm2_up(m.sup())


def solve_piece(ctx: EvansContext, piece: ContourPiece, side: str, mu=None) -> PieceEnclosure:
    """Validated solution at x = 0 of the left (or adjoint right) system over one piece."""
    from .evans_system import interpolate_mu

    cfg = ctx.config
    lam = piece.lam_model()
    if mu is None:
        mu = interpolate_mu(piece, side, ctx.sp)
    root = mu.model
    if side == "left":
        m_check = mu.check(cfg.mu_trim)
        delta = mu.delta(cfg.mu_trim)
    else:
        nu = (lam * root).trim(cfg.mu_trim)
        m_check = ChebModel(nu.c, 0.0, 1)
        delta = float(nu.err)
    U0 = initial_model(side, lam, root, ctx.sp.vplus_iv)
    r0 = _up(ctx.theta[side] * _norm_sup(U0))

    # validate tiles, splitting where needed
    todo = _tiles(side, ctx.L, cfg.tile_length)[::-1]
    maps = []
    while todo:
        xs, xe = todo.pop()
        try:
            G, db = validate_tile(ctx, side, xs, xe, lam, m_check)
            ok = db.beta <= cfg.beta_max
        except PieceRejected:
            ok = False
        if not ok:
            if abs(xe - xs) <= cfg.min_tile:
                raise PieceRejected(f"tile [{xs}, {xe}] failed at minimum length", tile=(xs, xe))
            mid = 0.5 * (xs + xe)
            todo.extend([(mid, xe), (xs, mid)])
            continue
        maps.append((xs, xe, G, db))

    # chain with suffix products; bs[k] bounds the true scaled solution entering tile k
    S = []  # after tile j: S[k] = G_j ... G_k (0-based)
    bs = [_up(_norm_sup(U0) + r0)]
    U = U0
    log_scale = ComplexInterval.point(0.0 + 0.0j)
    records = []
    radius = r0
    for j, (xs, xe, G, db) in enumerate(maps):
        S = [_trim_rel(G @ s) for s in S] + [G]
        U = _trim_rel(G @ U)
        radius = _up(_norm_sup(S[0]) * r0)
        for k in range(j + 1):
            radius = _up(radius + _up(_up(_norm_sup(S[k]) * maps[k][3].beta) * bs[k]))
        bs.append(_up(_norm_sup(U) + radius))
        records.append(TileRecord(xs, xe, db.eps, db.detLower, db.beta, db.sigma))
        log_scale = log_scale + ComplexInterval.point(2.0 * db.sigma)
    corr = correction_radius(delta, ctx.L)
    return PieceEnclosure(side, U, radius, log_scale, corr, records, delta)


def _trim_rel(m: ChebModel, rel: float = 1e-17) -> ChebModel:
    return m.trim(rel * max(1.0, float(np.max(m.sup()))))
