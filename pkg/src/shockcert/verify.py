"""Contour, Evans function enclosures, certification and output."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import interval as iv
from .chebyshev import evaluate_theta
from .evans_system import NewtonFailure, SpectralParams, _float_coeffs, _roots_batch, _select_kappa, _select_left, interpolate_mu
from .interval import ComplexInterval, RealInterval
from .ode_enclosure import ContourPiece, EvansContext, PieceEnclosure, PieceRejected, SolverConfig, norm2_up, solve_piece

CERT_SCHEMA = "shockcert.certificate"
CERT_VERSION = 1


# ---------------------------------------------------------------- contour


@dataclass
class Contour:
    """Upper half of the boundary of {Re >= 0} cap B(0, R): axis pieces then the arc."""

    gamma: object
    R: RealInterval
    R_outer: float
    pieces: list
    budget: int

    def axis_pieces(self):
        return [p for p in self.pieces if p.kind == "axis"]

    def arc_pieces(self):
        return [p for p in self.pieces if p.kind == "arc"]


def _dyadic(x: float, bits: int = 20) -> float:
    return round(x * 2**bits) / 2**bits


def build_contour(sp: SpectralParams, budget: int = 39, smallest: float = 1 / 500, arc_pieces: int = 1) -> Contour:
    """Geometrically graded axis pieces on i[0, R_outer] plus the quarter arc.

    The first piece has length about ``smallest * R``; breakpoints are
    multiples of 2^-20 so piece midpoints and half-lengths are exact.
    """
    if budget < 1:
        raise ValueError("axis piece budget must be at least 1")
    Ro = sp.R_outer
    if budget == 1:
        pts = [0.0, Ro]
    else:
        q = (1.0 / smallest) ** (1.0 / (budget - 1))
        pts = [0.0] + [_dyadic(Ro * q ** (k - budget)) for k in range(1, budget)] + [Ro]
    pieces = [ContourPiece("axis", pts[k], pts[k + 1], index=k) for k in range(budget)]
    for j in range(arc_pieces):
        lo = j / arc_pieces
        hi = (j + 1) / arc_pieces
        pieces.append(ContourPiece("arc", lo, hi, radius=Ro, index=budget + j))
    return Contour(sp.gamma, sp.R, Ro, pieces, budget)


def split_piece(p: ContourPiece, index: int = None):
    mid = 0.5 * (p.lo + p.hi)
    idx = p.index if index is None else index
    return ContourPiece(p.kind, p.lo, mid, p.radius, idx), ContourPiece(p.kind, mid, p.hi, p.radius, idx)


# ---------------------------------------------------------------- Evans function on a piece


@dataclass
class EvansEnclosure:
    piece: ContourPiece
    t_edges: np.ndarray
    rects: ComplexInterval
    infReD: float
    left: PieceEnclosure | None = field(default=None, repr=False)
    right: PieceEnclosure | None = field(default=None, repr=False)

    def rows(self):
        for k in range(len(self.t_edges) - 1):
            r = self.rects[k]
            yield {
                "piece": self.piece.index,
                "kind": self.piece.kind,
                "lo": repr(self.piece.lo),
                "hi": repr(self.piece.hi),
                "t_lo": repr(float(self.t_edges[k])),
                "t_hi": repr(float(self.t_edges[k + 1])),
                "re_lo": repr(float(r.re.lo)),
                "re_hi": repr(float(r.re.hi)),
                "im_lo": repr(float(r.im.lo)),
                "im_hi": repr(float(r.im.hi)),
            }


def _ball(r) -> ComplexInterval:
    r = np.asarray(r, float)
    b = RealInterval(-r, r)
    return ComplexInterval(b, b)


def _vec_norms(enc, t_sub) -> np.ndarray:
    """Upper bounds of the Euclidean norm of a 3-vector model over each t-subinterval."""
    vals = evaluate_theta(enc, t_sub)  # (3, n)
    m = iv.modulus(vals)
    return iv.sqrt(m[0].sqr() + m[1].sqr() + m[2].sqr()).hi


def evans_on_piece(piece: ContourPiece, left: PieceEnclosure, right: PieceEnclosure, n_boxes: int = 64) -> EvansEnclosure:
    """Rectangles enclosing D = Y(0)^T V(0) over n_boxes equal t-subintervals."""
    Dm = _pair(right.vec, left.vec)
    edges = np.linspace(-1.0, 1.0, n_boxes + 1)
    t_sub = RealInterval(edges[:-1], edges[1:])
    vals = evaluate_theta(Dm.enclosure(), t_sub)  # (n,)
    nV = _vec_norms(left.vec.enclosure(), t_sub)
    nY = _vec_norms(right.vec.enclosure(), t_sub)
    rV, rY = left.radius, right.radius
    # |Y^T V - Yc^T Vc| <= |Yc| rV + rY |Vc| + rY rV
    e = RealInterval.point(nY) * rV + RealInterval.point(nV) * rY + RealInterval.point(np.full(nV.shape, rY)) * rV
    W = vals + _ball(e.hi)
    scale = iv.cexp(left.log_scale + right.log_scale)
    W = W * scale
    cl, cr = left.correction, right.correction
    ec = ((RealInterval.point(1.0) + cl) * (RealInterval.point(1.0) + cr) - 1.0).hi
    mag = iv.modulus(W).hi
    rects = W + _ball(np.nextafter(mag * ec, np.inf))
    inf_re = float(np.min(rects.re.lo))
    return EvansEnclosure(piece, edges, rects, inf_re, left, right)


def _pair(Y, V):
    """Y^T V for 3-vector models (no conjugation: the adjoint side is already conjugated)."""
    return Y[0] * V[0] + Y[1] * V[1] + Y[2] * V[2]


# ---------------------------------------------------------------- double-precision reference


def _limit_roots(lam, sp: SpectralParams):
    lam = np.atleast_1d(np.asarray(lam, complex))
    fm = float(sp.f_minus.mid())
    fp = float(sp.f_plus.mid())
    vp = float(sp.vplus)
    mu = _select_left(_roots_batch([np.ones_like(lam), lam - fm, -2 * lam, -(lam**2)]))
    kap = _select_kappa(_roots_batch([lam, lam - fp, np.full_like(lam, -2 * vp), np.full_like(lam, -vp)]), lam)
    return mu, kap


class ReferenceEvans:
    """Non-rigorous Evans function by double-precision shooting from x = -L and x = +L."""

    def __init__(self, sp: SpectralParams, L: float = 40.0, rtol: float = 1e-11, atol: float = 1e-13):
        from .profile import dense_profile

        self.sp = sp
        self.L = L
        self.rtol = rtol
        self.atol = atol
        self.v, self.f = dense_profile(sp.gamma, sp.vplus, L)

    def _A(self, x, lam):
        v = float(self.v(x))
        f = float(self.f(x))
        return np.array([[0, lam, 1], [0, 0, 1], [lam * v, lam * v, f - lam]], complex)

    def sides(self, lam: complex, L=None):
        """(V(0), Y(0)) for the scaled left system and the adjoint right system."""
        from scipy.integrate import solve_ivp

        L = self.L if L is None else L
        mu, kap = _limit_roots(lam, self.sp)
        mu, kap = complex(mu[0]), complex(kap[0])
        nu = lam * kap
        vp = float(self.sp.vplus)
        V0 = np.array([lam + mu, mu, mu * mu], complex)
        Y0 = np.array([kap, 1 + kap, kap * kap / vp], complex)
        I = np.eye(3)
        fl = lambda x, w: (self._A(x, lam) - mu * I) @ w
        fr = lambda x, w: (nu * I - self._A(x, lam).T) @ w
        sl = solve_ivp(fl, (-L, 0.0), V0, method="DOP853", rtol=self.rtol, atol=self.atol)
        sr = solve_ivp(fr, (L, 0.0), Y0, method="DOP853", rtol=self.rtol, atol=self.atol)
        return sl.y[:, -1], sr.y[:, -1]

    def __call__(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, complex))
        out = np.empty(lam.shape, complex)
        for k, l in enumerate(lam):
            V, Y = self.sides(complex(l))
            out[k] = Y @ V
        return out


def overlay_reference(sp: SpectralParams, contour: Contour, samples: int = 10, ref: ReferenceEvans | None = None):
    """Reference Evans values at ``samples`` points per piece: list of (piece, t, lam, D)."""
    ref = ref or ReferenceEvans(sp)
    out = []
    for p in contour.pieces:
        t = np.cos((np.arange(samples) + 0.5) * np.pi / samples)[::-1]
        lam = p.lam_float(t)
        out.append((p, t, lam, ref(lam)))
    return out


def overlay_from_results(results: list):
    """Overlay records from the reference samples already taken during the run."""
    return [(r.piece, *r.samples) for r in results if r.samples is not None]


def winding_number(values: np.ndarray) -> float:
    """Discrete argument sum / 2 pi of a closed polyline."""
    z = np.asarray(values, complex)
    d = np.angle(np.roll(z, -1) / z)
    return float(np.sum(d) / (2 * np.pi))


# ---------------------------------------------------------------- conjugate symmetry


def symmetry_check(sp: SpectralParams, ref: ReferenceEvans, contour: Contour, samples: int = 3) -> dict:
    """Evidence that the lower half of the contour mirrors the upper half.

    Two checks: the double-precision reference satisfies D(conj l) = conj D(l),
    and the interval system matrix satisfies A(x, conj l) = conj A(x, l)
    entrywise (an exact identity, so the enclosures must agree bit for bit).
    """
    from .evans_system import assemble_A

    worst = 0.0
    for p in contour.pieces:
        t = np.linspace(-0.9, 0.9, samples)
        lam = p.lam_float(t)
        lam = lam[np.abs(lam.imag) > 0]
        if lam.size == 0:
            continue
        d = ref(lam)
        dc = ref(np.conj(lam))
        worst = max(worst, float(np.max(np.abs(dc - np.conj(d)) / np.maximum(1.0, np.abs(d)))))
    boxes = iv.concatenate([p.lam(RealInterval(-1.0, 1.0)).reshape(1) for p in contour.pieces])
    vbar = RealInterval(float(sp.vplus_iv.lo), 1.0)
    A = assemble_A(vbar, boxes, sp.gamma_iv, sp.a)
    Ac = assemble_A(vbar, boxes.conj(), sp.gamma_iv, sp.a)
    cj = A.conj()
    exact = bool(
        np.array_equal(cj.re.lo, Ac.re.lo)
        and np.array_equal(cj.re.hi, Ac.re.hi)
        and np.array_equal(cj.im.lo, Ac.im.lo)
        and np.array_equal(cj.im.hi, Ac.im.hi)
    )
    return {"reference_rel_error": repr(worst), "tolerance": "1e-10", "interval_identity": exact, "ok": bool(worst <= 1e-10 and exact)}


# ---------------------------------------------------------------- certification


@dataclass
class RunConfig:
    """Contour and bookkeeping knobs of a certification run."""

    axis_pieces: int = 39
    smallest: float = 1.0 / 500
    arc_pieces: int = 1
    max_split: int = 3
    c1_axis_boxes: int = 256
    c1_arc_boxes: int = 128
    c1_subdivisions: int = 1000
    reference_samples: int = 10
    reference_overlay: bool = True
    workers: int = 1


@dataclass
class PieceResult:
    piece: ContourPiece
    depth: int
    status: str  # "ok" or "failed"
    enclosure: EvansEnclosure | None = None
    message: str = ""
    seconds: float = 0.0
    contained: int | None = None
    sampled: int | None = None
    samples: tuple | None = field(default=None, repr=False)  # (t, lam, D) of the reference check

    @property
    def infReD(self) -> float:
        return self.enclosure.infReD if self.enclosure is not None else -math.inf

    def to_dict(self) -> dict:
        d = {
            "index": self.piece.index,
            "kind": self.piece.kind,
            "lo": repr(self.piece.lo),
            "hi": repr(self.piece.hi),
            "radius": None if self.piece.radius is None else repr(self.piece.radius),
            "depth": self.depth,
            "status": self.status,
            "message": self.message,
        }
        if self.enclosure is not None:
            E = self.enclosure
            d["infReD"] = repr(E.infReD)
            d["rects"] = [
                [r["t_lo"], r["t_hi"], r["re_lo"], r["re_hi"], r["im_lo"], r["im_hi"]] for r in E.rows()
            ]
            d["left_radius"] = repr(E.left.radius)
            d["right_radius"] = repr(E.right.radius)
            d["tiles"] = {"left": len(E.left.tiles), "right": len(E.right.tiles)}
        if self.sampled is not None:
            d["reference"] = {"sampled": self.sampled, "contained": self.contained}
        return d


def contains_points(E: EvansEnclosure, t: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Whether each reference value D at parameter t lies in a rectangle covering t."""
    out = np.zeros(len(t), bool)
    for k in range(len(E.t_edges) - 1):
        sel = (t >= E.t_edges[k]) & (t <= E.t_edges[k + 1])
        r = E.rects[k]
        inside = (D.real >= r.re.lo) & (D.real <= r.re.hi) & (D.imag >= r.im.lo) & (D.imag <= r.im.hi)
        out |= sel & inside
    return out


def _sample_t(n: int) -> np.ndarray:
    return np.cos((np.arange(n) + 0.5) * np.pi / n)[::-1]


def solve_evans_piece(ctx: EvansContext, piece: ContourPiece, run: RunConfig, ref=None, depth: int = 0) -> list:
    """Enclose D on a piece, halving it on failure or when Re D is not bounded away from 0."""
    t0 = time.time()
    msg = ""
    enc = None
    try:
        left = solve_piece(ctx, piece, "left")
        right = solve_piece(ctx, piece, "right")
        enc = evans_on_piece(piece, left, right, ctx.config.theta_boxes)
        if not enc.infReD > 0:
            msg = f"inf Re D = {enc.infReD!r} not positive"
    except (PieceRejected, NewtonFailure, ArithmeticError) as e:
        msg = f"{type(e).__name__}: {e}"
    if msg and depth < run.max_split:
        a, b = split_piece(piece)
        return solve_evans_piece(ctx, a, run, ref, depth + 1) + solve_evans_piece(ctx, b, run, ref, depth + 1)
    res = PieceResult(piece, depth, "failed" if enc is None else "ok", enc, msg, time.time() - t0)
    if ref is not None and enc is not None and run.reference_samples > 0:
        t = _sample_t(run.reference_samples)
        lam = piece.lam_float(t)
        D = ref(lam)
        res.samples = (t, lam, D)
        res.sampled = len(t)
        res.contained = int(np.sum(contains_points(enc, t, D)))
    return [res]


_WORKER = {}


def _worker_init(prof, sp, solver, theta, L, run):
    _WORKER["ctx"] = EvansContext(prof, sp, solver, theta, L)
    _WORKER["run"] = run
    _WORKER["ref"] = ReferenceEvans(sp) if run.reference_overlay else None


def _worker_piece(piece):
    return solve_evans_piece(_WORKER["ctx"], piece, _WORKER["run"], _WORKER["ref"])


@dataclass
class StabilityCertificate:
    params: dict
    contour: dict
    constants: dict
    pieces: list
    c_lower: float
    verdict: str
    reasons: list
    symmetry: dict | None
    reference: dict | None
    run: dict

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_dict(self) -> dict:
        return {
            "schema": CERT_SCHEMA,
            "version": CERT_VERSION,
            "params": self.params,
            "contour": self.contour,
            "constants": self.constants,
            "c_lower": repr(self.c_lower),
            "verdict": self.verdict,
            "reasons": self.reasons,
            "symmetry": self.symmetry,
            "reference": self.reference,
            "pieces": [p.to_dict() for p in self.pieces],
            "run": self.run,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _coverage_gaps(contour: Contour, results: list) -> list:
    """Pieces of the contour not covered by the solved pieces (empty when complete)."""
    gaps = []
    for kind, lo, hi in (("axis", 0.0, contour.R_outer), ("arc", 0.0, 1.0)):
        segs = sorted((r.piece.lo, r.piece.hi) for r in results if r.piece.kind == kind)
        x = lo
        for a, b in segs:
            if a > x:
                gaps.append((kind, x, a))
            x = max(x, b)
        if x < hi:
            gaps.append((kind, x, hi))
    return gaps


def assemble_certificate(params: dict, contour: Contour, constants: dict, results: list, symmetry, reference, run: dict) -> StabilityCertificate:
    """Verdict from the per-piece results: certified iff every rectangle has Re > 0 and nothing is missing."""
    reasons = []
    results = sorted(results, key=lambda r: (r.piece.kind != "axis", r.piece.lo))
    c = min((r.infReD for r in results), default=-math.inf)
    failed = [r for r in results if r.status != "ok"]
    if failed:
        reasons.append(f"{len(failed)} piece(s) could not be enclosed")
    if not c > 0:
        reasons.append("some rectangle reaches Re D <= 0")
    gaps = _coverage_gaps(contour, results)
    if gaps:
        reasons.append(f"contour not fully covered: {len(gaps)} gap(s)")
    if symmetry is not None and not symmetry.get("ok", False):
        reasons.append("conjugate symmetry check failed")
    if symmetry is None:
        reasons.append("conjugate symmetry not checked")
    verdict = "inconclusive" if reasons else "certified"
    return StabilityCertificate(params, _contour_dict(contour), constants, results, c, verdict, reasons, symmetry, reference, run)


def _contour_dict(contour: Contour) -> dict:
    return {
        "R": [repr(float(contour.R.lo)), repr(float(contour.R.hi))],
        "R_outer": repr(contour.R_outer),
        "axis_budget": contour.budget,
        "half": "upper (Im >= 0); lower half by conjugate symmetry",
        "axis_breakpoints": [repr(p.lo) for p in contour.axis_pieces()] + [repr(contour.R_outer)],
        "arc_pieces": len(contour.arc_pieces()),
    }


def _environment() -> dict:
    import platform

    import scipy

    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__, "machine": platform.machine()}


def certify(profile_params, solver: SolverConfig | None = None, run: RunConfig | None = None, prof=None, pieces=None, force_straddle=None, log=None) -> StabilityCertificate:
    """Full certification run for one (gamma, v+).

    ``pieces`` restricts the run to some contour piece indices (the verdict
    is then inconclusive, since the contour is not covered).
    ``force_straddle`` names a piece whose rectangles are widened to contain
    0; it exists to exercise the inconclusive path.
    """
    from .init_error import constants_report, init_constants
    from .profile import check_end_states, solve_profile

    solver = solver or SolverConfig()
    run = run or RunConfig()
    log = log or (lambda *a: None)
    timings = {}
    t0 = time.time()
    check_end_states(profile_params)
    sp = SpectralParams(profile_params.gamma, profile_params.vplus)
    L = float(profile_params.L)
    if prof is None:
        prof = solve_profile(profile_params)
    timings["profile"] = time.time() - t0

    t1 = time.time()
    consts = init_constants(sp, prof, L, n_sub=run.c1_subdivisions, n_axis=run.c1_axis_boxes, n_arc=run.c1_arc_boxes)
    theta = (float(consts["left"]["sound"].theta.hi), float(consts["right"]["sound"].theta.hi))
    constants = {
        "table": constants_report(consts, profile_params.vplus),
        "theta_used": [repr(theta[0]), repr(theta[1])],
        "C1": {s: consts[s]["exp"].to_dict() for s in ("left", "right")},
        "decay": {s: consts[s]["decay"].to_dict() for s in ("left", "right")},
        "contraction": {s: {k: consts[s][k].to_dict() for k in ("sound", "published")} for s in ("left", "right")},
    }
    timings["constants"] = time.time() - t1
    log(f"constants: theta = {theta[0]:.3e}, {theta[1]:.3e}")

    contour = build_contour(sp, run.axis_pieces, run.smallest, run.arc_pieces)
    todo = [p for p in contour.pieces if pieces is None or p.index in pieces]
    t2 = time.time()
    results = []
    if run.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(run.workers, initializer=_worker_init, initargs=(prof, sp, solver, theta, L, run)) as ex:
            for out in ex.map(_worker_piece, todo):
                results.extend(out)
                log(_progress(out))
    else:
        _worker_init(prof, sp, solver, theta, L, run)
        for p in todo:
            out = _worker_piece(p)
            results.extend(out)
            log(_progress(out))
    timings["pieces"] = time.time() - t2

    if force_straddle is not None:
        for r in results:
            if r.piece.index == force_straddle and r.enclosure is not None:
                E = r.enclosure
                lo = np.minimum(E.rects.re.lo, -1.0)
                E.rects = ComplexInterval(RealInterval(lo, E.rects.re.hi), E.rects.im)
                E.infReD = float(np.min(lo))

    t3 = time.time()
    ref = _WORKER.get("ref") if run.reference_overlay else None
    symmetry = symmetry_check(sp, ref or ReferenceEvans(sp), contour)
    reference = None
    if run.reference_overlay:
        sampled = sum(r.sampled or 0 for r in results)
        contained = sum(r.contained or 0 for r in results)
        reference = {"samples_per_piece": run.reference_samples, "sampled": sampled, "contained": contained, "violations": sampled - contained}
    timings["checks"] = time.time() - t3
    timings["total"] = time.time() - t0

    params = {
        "gamma": str(profile_params.gamma),
        "vplus": str(profile_params.vplus),
        "profile": profile_params.to_dict(),
        "solver": {k: repr(v) for k, v in solver.__dict__.items()},
        "run": {k: repr(v) for k, v in run.__dict__.items() if k != "workers"},
        "pieces_subset": None if pieces is None else sorted(pieces),
        "force_straddle": force_straddle,
    }
    runinfo = {"environment": _environment(), "timings": {k: round(v, 3) for k, v in timings.items()}, "workers": run.workers}
    cert = assemble_certificate(params, contour, constants, results, symmetry, reference, runinfo)
    cert.sp = sp
    cert.contour_obj = contour
    return cert


def _progress(out) -> str:
    return "; ".join(
        f"{r.piece.kind} [{r.piece.lo:.6g}, {r.piece.hi:.6g}] {r.status} inf Re D = {r.infReD:.4g} ({r.seconds:.1f} s)" for r in out
    )


# ---------------------------------------------------------------- output


def write_csv(cert: StabilityCertificate, path) -> None:
    cols = ["piece", "kind", "lo", "hi", "t_lo", "t_hi", "re_lo", "re_hi", "im_lo", "im_hi"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for r in cert.pieces:
            if r.enclosure is not None:
                for row in r.enclosure.rows():
                    w.writerow(row)


def plot_evans(cert: StabilityCertificate, path, overlay=None) -> None:
    """Rectangles of D over the whole contour (lower half mirrored) with the reference curve."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.collections import PatchCollection
    from matplotlib.patches import Rectangle

    plt.rcParams["svg.hashsalt"] = "shockcert"
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    up, down = [], []
    for r in cert.pieces:
        if r.enclosure is None:
            continue
        q = r.enclosure.rects
        for k in range(q.shape[0]):
            x0, x1 = float(q.re.lo[k]), float(q.re.hi[k])
            y0, y1 = float(q.im.lo[k]), float(q.im.hi[k])
            up.append(Rectangle((x0, y0), x1 - x0, y1 - y0))
            down.append(Rectangle((x0, -y1), x1 - x0, y1 - y0))
    ax.add_collection(PatchCollection(up, facecolor="tab:red", edgecolor="tab:red", alpha=0.5, linewidth=0.3))
    ax.add_collection(PatchCollection(down, facecolor="tab:orange", edgecolor="tab:orange", alpha=0.35, linewidth=0.3))
    if overlay:
        z = np.concatenate([D for (_, _, _, D) in overlay])
        ax.plot(z.real, z.imag, ".", color="tab:blue", markersize=2, label="double-precision reference")
        ax.plot(z.real, -z.imag, ".", color="tab:blue", markersize=2)
        ax.legend(loc="best", fontsize=8)
    ax.axvline(0.0, color="k", linewidth=0.6)
    ax.plot([0], [0], "k+")
    ax.autoscale_view()
    xl = ax.get_xlim()
    ax.set_xlim(min(xl[0], -0.5), xl[1])
    ax.set_xlabel("Re D")
    ax.set_ylabel("Im D")
    ax.set_title(f"Evans function enclosure, gamma = {cert.params['gamma']}, v+ = {cert.params['vplus']}")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit(cert: StabilityCertificate, out_dir, plot: bool = True, overlay=None) -> dict:
    """Write certificate.json, pieces.csv and (optionally) evans.svg into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {"certificate": out / "certificate.json", "pieces": out / "pieces.csv"}
        paths["certificate"].write_text(cert.to_json())
        write_csv(cert, paths["pieces"])
        if plot:
            paths["plot"] = out / "evans.svg"
            plot_evans(cert, paths["plot"], overlay)
    except OSError as e:
        raise OSError(f"cannot write output under {out}: {e}") from e
    return paths
