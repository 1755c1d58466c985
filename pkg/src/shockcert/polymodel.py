"""Chebyshev models: float coefficients plus a rigorous sup-norm remainder.

A :class:`ChebModel` represents the set of functions within ``err`` (uniformly
on [-1, 1]^nvars) of the polynomial with coefficients ``c``.  Every arithmetic
operation adds a bound for its own floating-point rounding to ``err``, so the
centre coefficients can be ordinary complex floats.  This is the workhorse of
the validated Evans ODE solver, where interval coefficients would double the
cost of every product without tightening anything that matters.

All variables live on [-1, 1]; callers keep track of the physical mapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import interval as iv
from .chebyshev import ChebEnclosure, U, _conv_fold, _sym_extend, coefficients_float
from .interval import ComplexInterval, RealInterval


def _up(x):
    return np.nextafter(x, np.inf)


def _down(x):
    return np.nextafter(x, -np.inf)


def up_add(*xs):
    """Upper bound of a sum of non-negative floats."""
    s = xs[0]
    for x in xs[1:]:
        s = _up(s + x)
    return s


def up_mul(a, b):
    return _up(np.multiply(a, b))


def l1_up(c: np.ndarray, nvars: int) -> np.ndarray:
    """Upper bound of the coefficient 1-norm over the trailing ``nvars`` axes."""
    if nvars == 0:
        return _up(np.abs(c))
    axes = tuple(range(-nvars, 0))
    n = int(np.prod(c.shape[-nvars:]))
    return _up(np.sum(np.abs(c), axis=axes) * (1.0 + (n + 4) * U))


@dataclass
class ChebModel:
    """Polynomial in ``nvars`` Chebyshev variables plus a uniform error bound."""

    c: np.ndarray
    err: np.ndarray
    nvars: int

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=np.complex128)
        vs = self.c.shape[: self.c.ndim - self.nvars]
        self.err = np.broadcast_to(np.asarray(self.err, float), vs).copy()

    # ------------------------------------------------------------ construction
    @classmethod
    def const(cls, value, nvars: int, shape=()):
        """Constant model; ``value`` may be a ComplexInterval/RealInterval or number."""
        if isinstance(value, (ComplexInterval, RealInterval)):
            z = iv.as_complex(value)
            mid = z.mid()
            rad = z.rad()
            c = np.asarray(mid, complex).reshape(np.shape(mid) + (1,) * nvars)
            return cls(c, rad, nvars)
        v = np.broadcast_to(np.asarray(value, complex), shape)
        return cls(v.reshape(v.shape + (1,) * nvars).copy(), np.zeros(v.shape), nvars)

    @classmethod
    def from_enclosure(cls, p: ChebEnclosure) -> "ChebModel":
        c = p.coeffs.mid()
        rad = p.coeffs.rad()
        e = up_add(l1_up(rad.astype(complex), p.nvars), p.err)
        return cls(c, e, p.nvars)

    @classmethod
    def from_samples_float(cls, values: np.ndarray, nvars: int) -> "ChebModel":
        """Non-rigorous interpolant with zero error; only for approximations."""
        c = values
        for ax in range(-nvars, 0):
            c = coefficients_float(c, axis=ax)
        return cls(c, 0.0, nvars)

    # ------------------------------------------------------------ properties
    @property
    def value_shape(self):
        return self.c.shape[: self.c.ndim - self.nvars]

    @property
    def degrees(self):
        return tuple(n - 1 for n in self.c.shape[self.c.ndim - self.nvars :])

    def __getitem__(self, idx) -> "ChebModel":
        if not isinstance(idx, tuple):
            idx = (idx,)
        full = idx + (slice(None),) * self.nvars
        return ChebModel(self.c[full], self.err[idx], self.nvars)

    def copy(self) -> "ChebModel":
        return ChebModel(self.c.copy(), self.err.copy(), self.nvars)

    def l1(self) -> np.ndarray:
        return l1_up(self.c, self.nvars)

    def sup(self) -> np.ndarray:
        """Upper bound of sup |f| over the domain, per value entry."""
        return up_add(self.l1(), self.err)

    def conj(self) -> "ChebModel":
        return ChebModel(np.conj(self.c), self.err, self.nvars)

    def transpose(self) -> "ChebModel":
        nv = self.nvars
        c = np.swapaxes(self.c, -nv - 1, -nv - 2)
        return ChebModel(c, np.swapaxes(self.err, -1, -2), nv)

    @property
    def T(self):
        return self.transpose()

    # ------------------------------------------------------------ reshaping
    def pad_to(self, shape) -> "ChebModel":
        cur = self.c.shape[-self.nvars :]
        if tuple(cur) == tuple(shape):
            return self
        pad = [(0, 0)] * (self.c.ndim - self.nvars) + [(0, s - n) for s, n in zip(shape, cur)]
        return ChebModel(np.pad(self.c, pad), self.err, self.nvars)

    def truncate(self, sizes) -> "ChebModel":
        """Keep at most ``sizes[k]`` coefficients per variable; the tail goes to err."""
        c = self.c
        nv = self.nvars
        keep = tuple(slice(0, min(s, n)) for s, n in zip(sizes, c.shape[-nv:]))
        lead = (slice(None),) * (c.ndim - nv)
        kept = c[lead + keep]
        # sum the tail directly (total minus kept is not safe in floats)
        mask = np.ones(c.shape[-nv:], bool)
        mask[keep] = False
        tail = np.where(mask, c, 0.0)
        return ChebModel(kept.copy(), up_add(self.err, l1_up(tail, nv)), nv)

    def trim(self, tol: float) -> "ChebModel":
        """Drop trailing coefficients whose total magnitude is below ``tol`` per variable."""
        out = self
        for k in range(self.nvars):
            ax = out.c.ndim - self.nvars + k
            mags = np.abs(out.c)
            other = tuple(i for i in range(out.c.ndim) if i != ax)
            col = np.max(mags, axis=other) if other else mags
            col = col * np.prod([out.c.shape[i] for i in other]) if other else col
            cum = np.cumsum(col[::-1])[::-1]
            n = out.c.shape[ax]
            keep = n
            while keep > 1 and cum[keep - 1] <= tol:
                keep -= 1
            if keep < n:
                sizes = list(out.c.shape[-self.nvars :])
                sizes[k] = keep
                out = out.truncate(sizes)
        return out

    # ------------------------------------------------------------ arithmetic
    def _coerce(self, other) -> "ChebModel":
        if isinstance(other, ChebModel):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return ChebModel.const(other, self.nvars)

    def __add__(self, other) -> "ChebModel":
        other = self._coerce(other)
        shape = tuple(max(a, b) for a, b in zip(self.c.shape[-self.nvars :], other.c.shape[-self.nvars :]))
        a = self.pad_to(shape)
        b = other.pad_to(shape)
        c = a.c + b.c
        rnd = _up(l1_up(c, self.nvars) * (2 * U))
        return ChebModel(c, up_add(np.broadcast_to(a.err, np.broadcast_shapes(a.err.shape, b.err.shape)), b.err, rnd), self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "ChebModel":
        return ChebModel(-self.c, self.err, self.nvars)

    def __sub__(self, other) -> "ChebModel":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "ChebModel":
        return self._coerce(other) - self

    def scale(self, s) -> "ChebModel":
        """Multiply by a constant (number, numpy array per entry, or interval)."""
        if isinstance(s, (ComplexInterval, RealInterval)):
            z = iv.as_complex(s)
            mid = np.asarray(z.mid(), complex)
            rad = np.asarray(z.rad(), float)
        else:
            mid = np.asarray(s, complex)
            rad = np.zeros(mid.shape)
        mid_b = mid.reshape(mid.shape + (1,) * self.nvars)
        c = self.c * mid_b
        l1 = self.l1()
        amid = _up(np.abs(mid))
        err = up_add(up_mul(self.err, _up(amid + rad)), up_mul(l1, _up(rad + 4 * U * amid)))
        return ChebModel(c, err, self.nvars)

    def __mul__(self, other) -> "ChebModel":
        if not isinstance(other, ChebModel):
            return self.scale(other)
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        nv = self.nvars
        h, rh = _product(self.c, other.c, nv)
        pa = self.l1()
        pb = other.l1()
        err = up_add(
            l1_up(rh.astype(complex), nv),
            up_mul(pa, other.err),
            up_mul(self.err, pb),
            up_mul(self.err, other.err),
        )
        return ChebModel(h, err, nv)

    __rmul__ = __mul__

    def __matmul__(self, other: "ChebModel") -> "ChebModel":
        """Matrix product of matrix-valued models (``(..., m, k) @ (..., k, n)``)."""
        nv = self.nvars
        a = self
        b = other
        vec = len(b.value_shape) == 1
        if vec:
            b = ChebModel(b.c[..., :, None] if nv == 0 else np.expand_dims(b.c, -nv - 1), b.err[..., None], nv)
        ac = np.expand_dims(a.c, -nv - 1)  # (m, k, 1, ...)
        bc = np.expand_dims(b.c, -nv - 3)  # (1, k, n, ...)
        h, rh = _product(ac, bc, nv)
        pa = np.expand_dims(a.l1(), -1)
        pb = np.expand_dims(b.l1(), -3)
        ea = np.expand_dims(a.err, -1)
        eb = np.expand_dims(b.err, -3)
        err_terms = up_add(
            l1_up(rh.astype(complex), nv), up_mul(pa, eb), up_mul(ea, pb), up_mul(ea, eb)
        )
        csum = np.sum(h, axis=-nv - 2)
        k = h.shape[-nv - 2]
        rnd = _up(l1_up(h, nv).sum(axis=-2) * ((k + 2) * U))
        err = up_add(_up(err_terms.sum(axis=-2) * (1 + (k + 2) * U)), rnd)
        out = ChebModel(csum, err, nv)
        if vec:
            out = ChebModel(out.c[..., 0, :] if nv == 1 else out.c[..., 0, :, :], out.err[..., 0], nv)
        return out

    # ------------------------------------------------------------ calculus and evaluation
    def deriv(self, axis: int = 0) -> "ChebModel":
        """d/ds along variable ``axis`` of the polynomial part (requires err == 0)."""
        if np.any(self.err > 0):
            raise ValueError("cannot differentiate a model with a nonzero remainder")
        nv = self.nvars
        ax = self.c.ndim - nv + axis
        n = self.c.shape[ax]
        Dm = derivative_matrix(n)
        moved = np.moveaxis(self.c, ax, -1)
        d = moved @ Dm.T
        bound = np.abs(moved) @ np.abs(Dm.T)
        rnd = _up(bound * ((n + 4) * U))
        d = np.moveaxis(d, -1, ax)
        rnd = np.moveaxis(rnd, -1, ax)
        return ChebModel(d, l1_up(rnd.astype(complex), nv), nv)

    def at_edge(self, axis: int, side: int) -> "ChebModel":
        """Restrict variable ``axis`` to s = side (+1 or -1)."""
        nv = self.nvars
        ax = self.c.ndim - nv + axis
        n = self.c.shape[ax]
        w = np.ones(n) if side > 0 else (-1.0) ** np.arange(n)
        moved = np.moveaxis(self.c, ax, -1)
        v = moved @ w
        rnd = _up(np.abs(moved).sum(axis=-1) * ((n + 4) * U))
        return ChebModel(v, up_add(self.err, l1_up(rnd.astype(complex), nv - 1)), nv - 1)

    def outer(self, other: "ChebModel") -> "ChebModel":
        """Product of a model in variables A and a model in variables B (A then B)."""
        na, nb = self.nvars, other.nvars
        a = self.c.reshape(self.c.shape + (1,) * nb)
        b = other.c.reshape(other.c.shape[: other.c.ndim - nb] + (1,) * na + other.c.shape[other.c.ndim - nb :])
        c = a * b
        pa = self.l1()
        pb = other.l1()
        err = up_add(up_mul(pa, other.err), up_mul(self.err, pb), up_mul(self.err, other.err))
        err = up_add(err, _up(l1_up(c, na + nb) * (4 * U)))
        return ChebModel(c, err, na + nb)

    def lift(self, nvars_before: int = 0, nvars_after: int = 0) -> "ChebModel":
        """View as a model in more variables (constant in the new ones)."""
        vs = self.value_shape
        poly = self.c.shape[len(vs) :]
        c = self.c.reshape(vs + (1,) * nvars_before + poly + (1,) * nvars_after)
        return ChebModel(c, self.err, self.nvars + nvars_before + nvars_after)

    def eval_points(self, *xs) -> np.ndarray:
        """Non-rigorous float evaluation on the tensor grid of the given points."""
        c = self.c
        vs = len(self.value_shape)
        for x in xs:
            x = np.atleast_1d(np.asarray(x, float))
            n = c.shape[vs]
            Tm = np.cos(np.outer(np.arccos(np.clip(x, -1, 1)), np.arange(n)))
            c = np.tensordot(c, Tm, axes=([vs], [1]))
        return c

    def enclosure(self) -> ChebEnclosure:
        """Interval-coefficient view on [-1, 1]^nvars."""
        z = ComplexInterval.point(self.c)
        dom = tuple((-1.0, 1.0) for _ in range(self.nvars))
        return ChebEnclosure(z, dom, self.err)


def derivative_matrix(n: int) -> np.ndarray:
    """D with d/ds sum_k c_k T_k = sum_j (D c)_j T_j on [-1, 1]."""
    D = np.zeros((n, n))
    for k in range(1, n):
        for j in range(k - 1, -1, -2):
            D[j, k] = 2.0 * k
    D[0, :] *= 0.5
    return D


def _product(a: np.ndarray, b: np.ndarray, nvars: int):
    """Coefficient product with per-coefficient rounding bounds."""
    na = a.shape[a.ndim - nvars :]
    nb = b.shape[b.ndim - nvars :]
    out_shape = tuple(p + q - 1 for p, q in zip(na, nb))
    ae = _sym_extend(a, nvars)
    be = _sym_extend(b, nvars)
    h = _conv_fold(ae, be, nvars, out_shape)
    # summation depth: BLAS inner sums plus the row loop
    K = min(int(np.prod(ae.shape[-nvars:])), int(np.prod(be.shape[-nvars:]))) + sum(ae.shape[-nvars:]) + sum(be.shape[-nvars:])
    gamma = (K + 6) * U * 1.01
    base = _conv_fold(np.abs(ae), np.abs(be), nvars, out_shape)
    rh = _up(base * gamma * (1.0 + 8 * U * K) + 1e-300)
    return h, rh


# ---------------------------------------------------------------- rigorous box evaluation


def cos_table(n: int, phi: np.ndarray):
    """cos(k phi), sin(k phi) for k < n with a bound on their absolute error."""
    k = np.arange(n)
    arg = np.outer(phi, k)
    err = (np.abs(arg) * 2 + 4) * U  # argument rounding plus libm accuracy
    return np.cos(arg), np.sin(arg), err


def min_modulus_2d(m: ChebModel, ny: int = 64, nt: int = 64, max_depth: int = 6):
    """Rigorous lower bound of |m(y, t)| over [-1, 1]^2 (scalar 2D model).

    Uses a centred form in the angle variables y = cos(phi), t = cos(psi) on a
    grid of boxes, subdividing boxes whose bound is not positive.  Returns the
    lower bound (0.0 if it could not be established) and the number of boxes
    evaluated.
    """
    c = m.c
    N, M = c.shape
    n = np.arange(N, dtype=float)
    k = np.arange(M, dtype=float)
    A = np.abs(c)
    l1 = l1_up(c, 2)
    # second-order remainder coefficients
    s_nn = float(np.sum(A * (n[:, None] ** 2)) * (1 + 4 * N * M * U))
    s_mm = float(np.sum(A * (k[None, :] ** 2)) * (1 + 4 * N * M * U))
    s_nm = float(np.sum(A * np.outer(n, k)) * (1 + 4 * N * M * U))
    s_n = float(np.sum(A * n[:, None]) * (1 + 4 * N * M * U))
    s_m = float(np.sum(A * k[None, :]) * (1 + 4 * N * M * U))
    eval_err = float(l1 * ((2 * np.pi * (N + M) + N * M + 16) * U))
    base_err = float(m.err) + eval_err

    def bound(phi_c, dphi, psi_c, dpsi):
        Cy, Sy, _ = cos_table(N, phi_c)
        Ct, St, _ = cos_table(M, psi_c)
        val = np.einsum("pn,nm,qm->pq", Cy, c, Ct)
        dy = np.einsum("pn,nm,qm->pq", Sy * n, c, Ct)
        dt = np.einsum("pn,nm,qm->pq", Cy, c, St * k)
        grad_err = float(s_n + s_m) * (2 * np.pi * (N + M) + N * M + 16) * U
        lin = np.abs(dy) * dphi[:, None] + np.abs(dt) * dpsi[None, :]
        quad = 0.5 * (s_nn * dphi[:, None] ** 2 + 2 * s_nm * dphi[:, None] * dpsi[None, :] + s_mm * dpsi[None, :] ** 2)
        slack = base_err + grad_err * (dphi[:, None] + dpsi[None, :])
        lo = np.abs(val) - lin - quad - slack
        return lo - 8 * U * (np.abs(val) + lin + quad + slack) - 1e-300

    def grid(n_boxes, lo=0.0, hi=np.pi):
        edges = np.linspace(lo, hi, n_boxes + 1)
        centre = 0.5 * (edges[:-1] + edges[1:])
        half = _up(np.maximum(np.abs(edges[1:] - centre), np.abs(centre - edges[:-1])) * (1 + 4 * U) + 1e-15)
        return centre, half

    pc, ph = grid(ny)
    qc, qh = grid(nt)
    lo = bound(pc, ph, qc, qh)
    count = lo.size
    best = float(np.min(lo))
    if best > 0:
        return best, count
    # refine the failing boxes one at a time
    pending = [(pc[i], ph[i], qc[j], qh[j], 0) for i, j in zip(*np.nonzero(lo <= 0))]
    result = float(np.min(lo[lo > 0])) if np.any(lo > 0) else np.inf
    while pending:
        p0, dp, q0, dq, depth = pending.pop()
        if depth >= max_depth:
            return 0.0, count
        sp, sph = grid(4, p0 - dp, p0 + dp)
        sq, sqh = grid(4, q0 - dq, q0 + dq)
        sub = bound(sp, sph, sq, sqh)
        count += sub.size
        for i, j in zip(*np.nonzero(sub <= 0)):
            pending.append((sp[i], sph[i], sq[j], sqh[j], depth + 1))
        if np.any(sub > 0):
            result = min(result, float(np.min(sub[sub > 0])))
        if len(pending) > 20000:
            return 0.0, count
    return result, count


def min_modulus_1d(m: ChebModel, n_boxes: int = 256) -> float:
    """Rigorous lower bound of |m(t)| on [-1, 1] for a scalar 1D model."""
    m2 = m.lift(nvars_after=1)
    lo, _ = min_modulus_2d(m2, ny=n_boxes, nt=1)
    return lo
