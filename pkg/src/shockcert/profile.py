"""Validated computation of the viscous shock profile.

The profile solves ``v' = v (v - 1 + a (v^{-gamma} - 1))`` and decreases
monotonically from 1 (x -> -inf) to ``v_+`` (x -> +inf).  It is pinned by
``v(0) = (1 + v_+) / 2`` and integrated outward from 0 with interval Taylor
steps.  Both endpoints of each enclosure are stepped separately: the flow of
a scalar ODE preserves order, so the image of ``[lo, hi]`` is
``[flow(lo), flow(hi)]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import interval as iv
from .chebyshev import ChebEnclosure, coefficients, nodes
from .interval import RealInterval
from .taylor import Node, Var, horner, ode_series

SCHEMA_VERSION = 1


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


def enclose(x) -> RealInterval:
    """Tight enclosure of a rational given as Fraction, int, str or float."""
    return RealInterval.from_value(_frac(x))


@dataclass(frozen=True)
class ProfileParams:
    """Parameters of the profile computation.

    ``gamma`` and ``vplus`` are exact rationals; everything derived from them
    is enclosed in intervals.
    """

    gamma: Fraction = Fraction(5, 3)
    vplus: Fraction = Fraction(2, 5)
    L: float = 10.0
    h: float = 0.125
    n: int = 18
    cells: int = 256

    def __post_init__(self):
        object.__setattr__(self, "gamma", _frac(self.gamma))
        object.__setattr__(self, "vplus", _frac(self.vplus))
        if not 0 < self.vplus < 1:
            raise iv.IntervalDomainError("v_+ must lie in (0, 1)")
        if self.gamma < 1:
            raise iv.IntervalDomainError("gamma must be at least 1")
        steps = self.L / self.h
        if abs(steps - round(steps)) > 1e-12:
            raise ValueError("L must be a multiple of the grid step")

    @property
    def gamma_iv(self) -> RealInterval:
        return enclose(self.gamma)

    @property
    def vplus_iv(self) -> RealInterval:
        return enclose(self.vplus)

    @property
    def a(self) -> RealInterval:
        return compute_a(self.gamma, self.vplus)

    def to_dict(self) -> dict:
        return {
            "gamma": f"{self.gamma.numerator}/{self.gamma.denominator}",
            "vplus": f"{self.vplus.numerator}/{self.vplus.denominator}",
            "L": repr(self.L),
            "h": repr(self.h),
            "n": self.n,
            "cells": self.cells,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProfileParams":
        return cls(Fraction(d["gamma"]), Fraction(d["vplus"]), float(d["L"]), float(d["h"]), int(d["n"]), int(d["cells"]))


def compute_a(gamma, vplus) -> RealInterval:
    """a = v_+^gamma (1 - v_+) / (1 - v_+^gamma)."""
    vp = enclose(vplus) if not isinstance(vplus, RealInterval) else vplus
    if vp.lo <= 0 or vp.hi >= 1:
        raise iv.IntervalDomainError("v_+ must lie in (0, 1)")
    g = enclose(gamma) if not isinstance(gamma, RealInterval) else gamma
    if isinstance(gamma, (Fraction, int)) and Fraction(gamma) == 1:
        return vp
    vg = iv.pow(vp, g)
    return vg * (1.0 - vp) / (1.0 - vg)


# ---------------------------------------------------------------- right-hand sides


def rhs_expr(v: Node, a: RealInterval, gamma: RealInterval) -> Node:
    """v (v - 1 + a (v^{-gamma} - 1)) as an expression tree."""
    return v * (v - 1.0 + (v ** (-gamma) - 1.0) * a)


def f_expr(v: Node, a: RealInterval, gamma: RealInterval) -> Node:
    """f(v) = 2v - (a + 1) - a (gamma - 1) v^{-gamma}."""
    return v * 2.0 - (a + 1.0) - (v ** (-gamma)) * (a * (gamma - 1.0))


def profile_rhs(v, a: RealInterval, gamma: RealInterval) -> RealInterval:
    v = iv._to_real(v)
    if np.any(v.lo <= 0):
        raise iv.IntervalDomainError("profile right-hand side needs v > 0")
    return v * (v - 1.0 + (iv.pow(v, -gamma) - 1.0) * a)


def f_of_v(v, a: RealInterval, gamma: RealInterval) -> RealInterval:
    v = iv._to_real(v)
    return v * 2.0 - (a + 1.0) - iv.pow(v, -gamma) * (a * (gamma - 1.0))


def fprime_of_v(v, a: RealInterval, gamma: RealInterval) -> RealInterval:
    """f'(v) = 2 + a gamma (gamma - 1) v^{-gamma - 1}."""
    v = iv._to_real(v)
    return 2.0 + iv.pow(v, -gamma - 1.0) * (a * gamma * (gamma - 1.0))


def h_of_v(v, a: RealInterval, gamma: RealInterval) -> RealInterval:
    """h(v) = -v^{gamma+1} + a (gamma - 1) + (a + 1) v^gamma."""
    v = iv._to_real(v)
    vg = iv.pow(v, gamma)
    return -(vg * v) + a * (gamma - 1.0) + (a + 1.0) * vg


class _Series:
    """Reusable Taylor machinery for the profile and f along it."""

    def __init__(self, a: RealInterval, gamma: RealInterval):
        self.var = Var()
        self.rhs = rhs_expr(self.var, a, gamma)
        self.f = f_expr(self.var, a, gamma)

    def solution(self, v0: RealInterval, order: int) -> RealInterval:
        return ode_series(v0, self.rhs, self.var, order)[0]

    def with_f(self, v0: RealInterval, order: int):
        return ode_series(v0, self.rhs, self.var, order, extra=(self.f,))


def _cell_partition(vplus: RealInterval, cells: int) -> RealInterval:
    edges = np.linspace(float(vplus.lo), 1.0, cells + 1)
    edges[0] = vplus.lo
    edges[-1] = 1.0
    return RealInterval(edges[:-1], edges[1:])


def derivative_enclosures(params: ProfileParams, order: int, partition: RealInterval | None = None):
    """Enclosures of v^{(k)} and (f o v)^{(k)}, k = 0..order, on each cell.

    Returns ``(partition, V, F)`` where ``V[k]`` and ``F[k]`` are batches over
    the cells.  The hull over cells is the U_k of the Taylor remainder.
    """
    a = params.a
    g = params.gamma_iv
    if partition is None:
        partition = _cell_partition(params.vplus_iv, params.cells)
    ser = _Series(a, g)
    vs, fs = ser.with_f(partition, order + 1)
    fact = RealInterval.point(np.array([float(math.factorial(k)) for k in range(order + 1)]).reshape((-1, 1)))
    return partition, vs * fact, fs * fact


@dataclass
class ProfileEnclosure:
    """Gridded enclosure of the profile on [-L, L] plus derivative bounds."""

    params: ProfileParams
    x: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    cells: RealInterval = field(repr=False, default=None)
    dv: RealInterval = field(repr=False, default=None)  # (order+1, cells)
    df: RealInterval = field(repr=False, default=None)
    _series: object = field(repr=False, default=None)

    @property
    def values(self) -> RealInterval:
        return RealInterval(self.lo, self.hi)

    @property
    def order(self) -> int:
        return self.dv.shape[0] - 1

    def widths(self) -> np.ndarray:
        return self.values.width()

    def U(self, k: int, vrange: RealInterval | None = None, which: str = "v") -> RealInterval:
        """Hull of the k-th derivative enclosures over cells meeting ``vrange``."""
        d = self.dv if which == "v" else self.df
        row = d[k]
        if vrange is not None:
            mask = (self.cells.hi >= vrange.lo) & (self.cells.lo <= vrange.hi)
            row = row[mask]
        return iv.hull_of(row)

    def ensure_order(self, order: int):
        if self.dv is None or self.order < order:
            self.cells, self.dv, self.df = derivative_enclosures(self.params, order, self.cells)

    def index_of(self, x: float) -> int:
        return int(round((x + self.params.L) / self.params.h))

    def value_at(self, x) -> RealInterval:
        """Enclosure of v(x) for a float or interval x in [-L, L]."""
        x = iv._to_real(x)
        flat = x.reshape(-1)
        out_lo = np.empty(flat.shape)
        out_hi = np.empty(flat.shape)
        for i in range(flat.shape[0]):
            a = self._eval_point(float(flat.hi[i]))  # v decreasing: inf at the right end
            b = self._eval_point(float(flat.lo[i]))
            out_lo[i] = a.lo
            out_hi[i] = b.hi
        return RealInterval(out_lo, out_hi).reshape(x.shape)

    def _eval_point(self, x: float) -> RealInterval:
        p = self.params
        if x < -p.L or x > p.L:
            raise iv.IntervalDomainError("x outside the profile grid")
        k = int(np.floor((x + p.L) / p.h))
        k = min(max(k, 0), len(self.x) - 1)
        if self.x[k] > x:
            k -= 1
        x0 = self.x[k]
        if x0 == x:
            return RealInterval(self.lo[k], self.hi[k])
        delta = RealInterval.point(x) - x0
        start = RealInterval(self.lo[k], self.hi[k])
        return _step(self, start, delta, forward=True)

    def cheb_interpolant(self, a: float, b: float, N: int, which: str = "v") -> ChebEnclosure:
        """Degree N-1 interpolant of v (or f(v)) on [a, b] with a rigorous error bound."""
        xs = nodes(N)
        xm = (RealInterval.point(a) + b) * 0.5 + xs * ((RealInterval.point(b) - a) * 0.5)
        xm = RealInterval(np.clip(xm.lo, a, b), np.clip(xm.hi, a, b))
        vals = self.value_at(xm)
        if which == "f":
            p = self.params
            vals = f_of_v(vals, p.a, p.gamma_iv)
        enc = coefficients(vals, domain=(a, b))
        bound = cheb_bound_profile(self, a, b, N, which)
        return enc.with_err(bound.hi)


def _step(prof: ProfileEnclosure, start: RealInterval, delta: RealInterval, forward: bool) -> RealInterval:
    """Advance the enclosure ``start`` by the (signed) interval displacement ``delta``."""
    p = prof.params
    n = p.n
    ser = prof._series
    ends = RealInterval(np.array([start.lo, start.hi]).reshape(2), np.array([start.lo, start.hi]).reshape(2))
    coeffs = ser.solution(ends, n)  # (n, 2)
    poly = horner(coeffs, delta)
    # remainder: delta^n v^{(n)}(xi) / n!, with v(xi) between the start and the end state
    if delta.lo >= 0:
        vr = RealInterval(p.vplus_iv.lo, start.hi)
    else:
        vr = RealInterval(start.lo, 1.0)
    Un = prof.U(n, vr)
    rem = iv.ipow(delta, n) * Un / float(math.factorial(n))
    out = poly + rem
    res = RealInterval(out.lo[0], out.hi[1])
    return res.intersect(RealInterval(p.vplus_iv.lo, 1.0))


def taylor_step(prof: ProfileEnclosure, U_x: RealInterval, h: float) -> RealInterval:
    """One comparison-principle Taylor step of signed length h."""
    return _step(prof, U_x, RealInterval.point(h), forward=h > 0)


def solve_profile(params: ProfileParams, order: int | None = None) -> ProfileEnclosure:
    """Enclose v on the grid -L..L (step h), anchored at v(0) = (1 + v_+)/2."""
    p = params
    steps = int(round(p.L / p.h))
    x = np.arange(-steps, steps + 1) * p.h
    prof = ProfileEnclosure(p, x, np.zeros(x.shape), np.zeros(x.shape))
    prof._series = _Series(p.a, p.gamma_iv)
    prof.ensure_order(max(p.n, order or 0))
    check_end_states(p)
    anchor = (1.0 + p.vplus_iv) * 0.5
    prof.lo[steps] = anchor.lo
    prof.hi[steps] = anchor.hi
    for direction in (+1, -1):
        cur = anchor
        for i in range(1, steps + 1):
            cur = taylor_step(prof, cur, direction * p.h)
            if np.any(cur.is_empty()) or cur.lo < p.vplus_iv.lo or cur.hi > 1.0:
                raise RuntimeError("profile enclosure left the invariant region")
            prof.lo[steps + direction * i] = cur.lo
            prof.hi[steps + direction * i] = cur.hi
    return prof


def check_end_states(p: ProfileParams):
    """Rigorously confirm that 1 and v_+ are rest points of the profile ODE."""
    a = p.a
    g = p.gamma_iv
    for v in (RealInterval.point(1.0), p.vplus_iv):
        r = v - 1.0 + a * (iv.pow(v, -g) - 1.0)
        if not r.contains_zero():
            raise RuntimeError("end-state identity failed")


def cheb_bound_profile(prof: ProfileEnclosure, a: float, b: float, N: int, which: str = "v") -> RealInterval:
    """((b - a)/2)^N sup|U_N| / (2^{N-1} N!) for the N-node interpolant on [a, b]."""
    prof.ensure_order(N)
    vr = prof.value_at(RealInterval(a, b))
    UN = prof.U(N, vr, which)
    mag = RealInterval.point(UN.mag())
    half = (RealInterval.point(b) - a) * 0.5
    denom = RealInterval.point(2.0) ** (N - 1) * float(math.factorial(N)) if N < 170 else None
    if denom is None:
        raise ValueError("order too large")
    bound = iv.ipow(half, N) * mag / denom
    return RealInterval(0.0, bound.hi)


# ---------------------------------------------------------------- serialization


def _dec(x: float) -> str:
    return repr(float(x))


def save_profile(prof: ProfileEnclosure, path):
    data = {
        "schema": "shockcert.profile",
        "schema_version": SCHEMA_VERSION,
        "params": prof.params.to_dict(),
        "x": [_dec(v) for v in prof.x],
        "lo": [_dec(v) for v in prof.lo],
        "hi": [_dec(v) for v in prof.hi],
        "derivative_order": prof.order,
        "cells_lo": [_dec(v) for v in prof.cells.lo],
        "cells_hi": [_dec(v) for v in prof.cells.hi],
        "dv_lo": [[_dec(v) for v in row] for row in prof.dv.lo],
        "dv_hi": [[_dec(v) for v in row] for row in prof.dv.hi],
        "df_lo": [[_dec(v) for v in row] for row in prof.df.lo],
        "df_hi": [[_dec(v) for v in row] for row in prof.df.hi],
    }
    with open(path, "w") as fh:
        json.dump(data, fh)


def load_profile(path) -> ProfileEnclosure:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != "shockcert.profile" or data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError("unsupported profile file")
    f = lambda xs: np.array([float(v) for v in xs])
    g = lambda rows: np.array([[float(v) for v in row] for row in rows])
    params = ProfileParams.from_dict(data["params"])
    prof = ProfileEnclosure(
        params,
        f(data["x"]),
        f(data["lo"]),
        f(data["hi"]),
        RealInterval(f(data["cells_lo"]), f(data["cells_hi"])),
        RealInterval(g(data["dv_lo"]), g(data["dv_hi"])),
        RealInterval(g(data["df_lo"]), g(data["df_hi"])),
    )
    prof._series = _Series(params.a, params.gamma_iv)
    return prof


# ---------------------------------------------------------------- non-rigorous reference


def reference_profile(gamma, vplus, xs, rtol=1e-13, atol=1e-15):
    """High-accuracy floating-point profile with the same anchor (for tests and plots)."""
    from scipy.integrate import solve_ivp

    g = float(_frac(gamma))
    vp = float(_frac(vplus))
    a = vp**g * (1 - vp) / (1 - vp**g)
    F = lambda x, v: v * (v - 1 + a * (v ** (-g) - 1))
    xs = np.asarray(xs, float)
    out = np.empty(xs.shape)
    v0 = (1 + vp) / 2
    pos = xs >= 0
    if np.any(pos):
        s = solve_ivp(F, (0, xs[pos].max() + 1e-9), [v0], t_eval=np.sort(xs[pos]), method="DOP853", rtol=rtol, atol=atol)
        order = np.argsort(xs[pos])
        tmp = np.empty(order.shape)
        tmp[order] = s.y[0]
        out[pos] = tmp
    neg = ~pos
    if np.any(neg):
        s = solve_ivp(F, (0, xs[neg].min() - 1e-9), [v0], t_eval=np.sort(xs[neg])[::-1], method="DOP853", rtol=rtol, atol=atol)
        order = np.argsort(-xs[neg])
        tmp = np.empty(order.shape)
        tmp[order] = s.y[0]
        out[neg] = tmp
    return out


def dense_profile(gamma, vplus, L: float = 40.0, rtol=1e-13, atol=1e-15):
    """Callable float profile on [-L, L] (dense output of two one-sided solves)."""
    from scipy.integrate import solve_ivp

    g = float(_frac(gamma))
    vp = float(_frac(vplus))
    a = vp**g * (1 - vp) / (1 - vp**g)
    F = lambda x, v: v * (v - 1 + a * (v ** (-g) - 1))
    v0 = (1 + vp) / 2
    right = solve_ivp(F, (0, L), [v0], method="DOP853", rtol=rtol, atol=atol, dense_output=True).sol
    left = solve_ivp(F, (0, -L), [v0], method="DOP853", rtol=rtol, atol=atol, dense_output=True).sol
    gm1 = g

    def v(x):
        x = np.asarray(x, float)
        return np.where(x >= 0, right(np.maximum(x, 0))[0], left(np.minimum(x, 0))[0])

    def f(x):
        w = v(x)
        return 2 * w - (a + 1) - a * (gm1 - 1) * w ** (-gm1)

    return v, f
