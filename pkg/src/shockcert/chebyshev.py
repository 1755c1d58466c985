"""Rigorous Chebyshev interpolation of the first kind.

Interpolants are stored as :class:`ChebEnclosure` objects: interval
coefficients on a mapped domain plus a uniform error bound.  Products,
determinants and adjugates are formed exactly in coefficient space
(``T_m T_n = (T_{m+n} + T_{|m-n|}) / 2``) using floating-point convolutions
with explicit rounding-error bounds, so the degree of a product is always the
sum of the degrees.

Evaluation avoids Clenshaw's recurrence.  With ``x = cos(phi)`` the
interpolant is ``sum a_n cos(n phi)`` and is expanded in a Taylor series in
``phi`` about the centre of the angular interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import convolve2d

from . import interval as iv
from .interval import ComplexInterval, RealInterval

U = 2.0**-53
THETA_TAYLOR_ORDER = 5


# ---------------------------------------------------------------- nodes and coefficients


def angles(N: int) -> RealInterval:
    """Enclosures of theta_j = (j + 1/2) pi / N."""
    if N < 1:
        raise ValueError("N must be positive")
    j = np.arange(N, dtype=float) + 0.5
    return iv.PI * RealInterval.point(j) / float(N)


def nodes(N: int) -> RealInterval:
    """Chebyshev roots x_j = cos((j + 1/2) pi / N), j = 0..N-1."""
    x = iv.cos(angles(N))
    # exact zero for the middle node of odd N
    if N % 2 == 1:
        x.lo[N // 2] = min(x.lo[N // 2], 0.0)
        x.hi[N // 2] = max(x.hi[N // 2], 0.0)
    return x


def nodes_float(N: int) -> np.ndarray:
    return np.cos((np.arange(N) + 0.5) * np.pi / N)


def _cos_matrix(N: int) -> RealInterval:
    """C[m, k] = cos(m theta_k) as intervals."""
    m = np.arange(N, dtype=float)[:, None]
    th = angles(N)
    arg = RealInterval(th.lo[None, :], th.hi[None, :]) * RealInterval.point(m)
    return iv.cos(arg)


def _apply_transform(values, axis: int):
    """Interval discrete cosine transform of ``values`` along ``axis``."""
    values = iv.as_complex(values)
    N = values.shape[axis]
    C = _cos_matrix(N)
    moved = values.swapaxes(axis, -1)
    out = iv.as_complex(moved) @ C.T  # (..., N_k) @ (N_k, N_m)
    scale = np.full(N, 2.0 / N)
    scale[0] = 1.0 / N
    out = out * RealInterval.point(scale)
    return out.swapaxes(axis, -1)


@dataclass(frozen=True)
class ChebEnclosure:
    """Chebyshev interpolant with interval coefficients and a uniform error bound.

    ``coeffs`` has shape ``value_shape + degrees`` where ``degrees`` has one
    entry per variable (one or two).  ``err`` is an upper bound (per value
    entry) for the sup-norm distance between the enclosed function and the
    polynomial over ``domain``.
    """

    coeffs: ComplexInterval
    domain: tuple
    err: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.err is None:
            object.__setattr__(self, "err", np.zeros(self.value_shape))
        else:
            object.__setattr__(self, "err", np.broadcast_to(np.asarray(self.err, float), self.value_shape).copy())

    @property
    def nvars(self) -> int:
        return len(self.domain)

    @property
    def value_shape(self):
        return self.coeffs.shape[: self.coeffs.ndim - self.nvars]

    @property
    def degrees(self):
        return tuple(n - 1 for n in self.coeffs.shape[-self.nvars :])

    @property
    def errBound(self) -> RealInterval:
        return RealInterval(np.zeros_like(self.err), self.err)

    def with_err(self, err) -> "ChebEnclosure":
        return ChebEnclosure(self.coeffs, self.domain, err)

    def add_err(self, extra) -> "ChebEnclosure":
        e = iv.get_rounding().add(self.err, np.asarray(extra, float))[1]
        return ChebEnclosure(self.coeffs, self.domain, e)

    def __getitem__(self, idx) -> "ChebEnclosure":
        if not isinstance(idx, tuple):
            idx = (idx,)
        full = idx + (slice(None),) * self.nvars
        return ChebEnclosure(self.coeffs[full], self.domain, self.err[idx])

    def center_coeffs(self) -> np.ndarray:
        return self.coeffs.mid()

    def sup_bound(self) -> np.ndarray:
        """Upper bound of |p| + err over the whole domain, per value entry."""
        mag = iv.modulus(self.coeffs).hi
        axes = tuple(range(-self.nvars, 0))
        s = _sum_up(mag, axes)
        return iv.get_rounding().add(s, self.err)[1]


def _sum_up(a: np.ndarray, axes) -> np.ndarray:
    """Upper bound of a sum of non-negative floats."""
    if not axes:
        return a
    n = int(np.prod([a.shape[ax] for ax in axes]))
    s = np.sum(a, axis=axes)
    return _up(s * (1.0 + (n + 2) * U))


def _up(x):
    return np.nextafter(x, np.inf)


def coefficients(samples, domain=(-1.0, 1.0)) -> ChebEnclosure:
    """Interval coefficients from samples at the N Chebyshev nodes (last axis)."""
    coeffs = _apply_transform(samples, -1)
    return ChebEnclosure(coeffs, (tuple(domain),))


def coefficients2d(samples, domain_x=(-1.0, 1.0), domain_y=(-1.0, 1.0)) -> ChebEnclosure:
    """Tensor-product coefficients from a grid of samples (last two axes)."""
    c = _apply_transform(samples, -2)
    c = _apply_transform(c, -1)
    return ChebEnclosure(c, (tuple(domain_x), tuple(domain_y)))


def coefficients_float(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Non-rigorous floating-point version of :func:`coefficients` along ``axis``."""
    values = np.asarray(values)
    N = values.shape[axis]
    th = (np.arange(N) + 0.5) * np.pi / N
    C = np.cos(np.outer(np.arange(N), th))
    C[0] *= 0.5
    C *= 2.0 / N
    moved = np.moveaxis(values, axis, -1)
    return np.moveaxis(moved @ C.T, -1, axis)


# ---------------------------------------------------------------- error bounds


@dataclass(frozen=True)
class Stadium:
    """Bernstein ellipse E_rho with the quantities entering the Hermite bound."""

    rho: float
    M: float = 0.0

    def __post_init__(self):
        if not self.rho > 1.0:
            raise iv.IntervalDomainError("stadium parameter rho must exceed 1")

    @property
    def rho_iv(self) -> RealInterval:
        return RealInterval.point(self.rho)

    @property
    def eta(self) -> RealInterval:
        return iv.log(self.rho_iv)

    @property
    def D(self) -> RealInterval:
        r = self.rho_iv
        return (r + 1.0 / r) * 0.5 - 1.0

    @property
    def L(self) -> RealInterval:
        r = self.rho_iv
        return iv.PI * iv.sqrt(r.sqr() + (1.0 / r).sqr())

    @property
    def M_iv(self) -> RealInterval:
        return RealInterval(0.0, self.M)

    def boundary(self, n: int = 256) -> np.ndarray:
        t = np.linspace(0, 2 * np.pi, n, endpoint=False)
        return 0.5 * (self.rho * np.exp(1j * t) + np.exp(-1j * t) / self.rho)


def hermite_error_bound(st: Stadium, N: int) -> RealInterval:
    """Uniform interpolation error bound on [-1, 1] for the degree-N interpolant.

    The interpolant uses the N+1 roots of T_{N+1}; the function must be
    analytic inside and on E_rho with |f| <= st.M there.
    """
    if N < 0:
        raise ValueError("degree must be non-negative")
    if st.M == 0.0:
        return RealInterval.point(0.0)
    s = iv.sinh(st.eta * float(N + 1))
    b = st.M_iv * st.L / (iv.PI * st.D * s)
    return RealInterval(0.0, b.hi)


def lebesgue_constant(N: int) -> RealInterval:
    """Enclosure of Lambda_{N-1} for interpolation in the N Chebyshev roots."""
    if N < 1:
        raise ValueError("N must be positive")
    two_pi = RealInterval.point(2.0) / iv.PI
    base = two_pi * iv.log(RealInterval.point(float(N))) + two_pi * (
        iv.EULER_GAMMA + iv.log(RealInterval.point(8.0) / iv.PI)
    )
    alpha = iv.PI / RealInterval.point(72.0 * N * N)
    return RealInterval(base.lo, (base + alpha).hi)


def error_2d(err_x, err_y, N_x: int) -> RealInterval:
    """err_x + Lambda_{N_x - 1} * err_y for tensor interpolation."""
    ex = iv._to_real(err_x)
    ey = iv._to_real(err_y)
    out = ex + lebesgue_constant(N_x) * ey
    return RealInterval(np.maximum(out.lo, 0.0), out.hi)


# ---------------------------------------------------------------- evaluation


def map_to_unit(x: RealInterval, domain) -> RealInterval:
    a, b = domain
    s = (x * 2.0 - (RealInterval.point(a) + b)) / (RealInterval.point(b) - a)
    return s


def _theta_interval(x, domain) -> RealInterval:
    x = iv._to_real(x)
    a, b = domain
    if np.any((x.lo < min(a, b)) | (x.hi > max(a, b))):
        raise iv.IntervalDomainError("evaluation point outside the interpolation domain")
    s = map_to_unit(x, domain)
    s = RealInterval(np.clip(s.lo, -1.0, 1.0), np.clip(s.hi, -1.0, 1.0))
    return iv.arccos(s)


def eval_cos_series(coeffs: ComplexInterval, phi: RealInterval, order: int = THETA_TAYLOR_ORDER):
    """Enclose sum_n a_n cos(n phi) for phi in the intervals ``phi``.

    ``coeffs`` has shape (..., N); ``phi`` has shape (M,); result (..., M).
    """
    coeffs = iv.as_complex(coeffs)
    N = coeffs.shape[-1]
    n = np.arange(N, dtype=float)
    pc = phi.mid()
    delta = iv.get_rounding().sub(phi.hi, pc)[1]
    delta = np.maximum(delta, iv.get_rounding().sub(pc, phi.lo)[1])
    arg = RealInterval.point(n[:, None]) * RealInterval.point(pc[None, :])  # (N, M)
    C = iv.cos(arg)
    S = iv.sin(arg)
    d = RealInterval(-delta, delta)  # (M,)
    lead = coeffs[..., :, None]  # (..., N, 1)
    total = None
    npow = RealInterval.point(np.ones((N, 1)))
    fact = 1.0
    for k in range(order + 1):
        # k-th derivative of cos(n phi): n^k cos(n phi + k pi / 2)
        basis = (C, -S, -C, S)[k % 4]
        deriv = iv.isum(lead * (basis * npow), axis=-2)  # (..., M)
        term = deriv * (iv.ipow(d, k) / fact)
        total = term if total is None else total + term
        npow = npow * RealInterval.point(n[:, None])
        fact *= k + 1
    # Lagrange remainder: |d^{k} / dphi^{k} sum a_n cos(n phi)| <= sum n^{k} |a_n|
    mag = iv.modulus(coeffs).hi
    w = _sum_up(mag * n ** (order + 1), (-1,))
    rem = RealInterval.point(w[..., None]) * (iv.ipow(RealInterval(0.0, delta), order + 1) / fact)
    ball = RealInterval(-rem.hi, rem.hi)
    return total + ComplexInterval(ball, ball)


def evaluate_theta(p: ChebEnclosure, x, include_err: bool = True) -> ComplexInterval:
    """Enclose p over the interval(s) ``x`` (1D enclosures)."""
    if p.nvars != 1:
        raise ValueError("evaluate_theta expects a one-variable enclosure")
    x = iv._to_real(x)
    flat = x.reshape(-1)
    phi = _theta_interval(flat, p.domain[0])
    out = eval_cos_series(p.coeffs, phi)
    if include_err:
        e = p.err[..., None]
        ball = RealInterval(-e, e)
        out = out + ComplexInterval(ball, ball)
    return out.reshape(*(p.value_shape + x.shape))


def derivative_coeffs(coeffs: ComplexInterval, axis: int = -1) -> ComplexInterval:
    """Coefficients of d/ds on [-1, 1]: c'_{k-1} = c'_{k+1} + 2k c_k."""
    c = iv.as_complex(coeffs).swapaxes(axis, -1)
    N = c.shape[-1]
    if N == 1:
        return ComplexInterval.zeros(c.shape).swapaxes(axis, -1)
    out = [None] * (N - 1)
    nxt = ComplexInterval.zeros(c.shape[:-1])
    nxt2 = ComplexInterval.zeros(c.shape[:-1])
    for k in range(N - 1, 0, -1):
        cur = nxt2 + c[..., k] * float(2 * k)
        out[k - 1] = cur
        nxt2, nxt = nxt, cur
    out[0] = out[0] * 0.5
    res = iv.stack(out, axis=-1)
    return res.swapaxes(axis, -1)


def evaluate_derivative(p: ChebEnclosure, x) -> ComplexInterval:
    """Enclose p' over ``x`` (polynomial part only; the error bound is not differentiable)."""
    if p.nvars != 1:
        raise ValueError("evaluate_derivative expects a one-variable enclosure")
    a, b = p.domain[0]
    dc = derivative_coeffs(p.coeffs)
    scale = RealInterval.point(2.0) / (RealInterval.point(b) - a)
    q = ChebEnclosure(dc * scale, p.domain)
    return evaluate_theta(q, x, include_err=False)


# ---------------------------------------------------------------- exact products


def _sym_extend(c: np.ndarray, nvars: int) -> np.ndarray:
    for ax in range(-nvars, 0):
        head = np.flip(np.take(c, np.arange(1, c.shape[ax]), axis=ax), axis=ax) * 0.5
        tail = np.take(c, np.arange(1, c.shape[ax]), axis=ax) * 0.5
        zero = np.take(c, [0], axis=ax)
        c = np.concatenate([head, zero, tail], axis=ax)
    return c


def _fold(h: np.ndarray, nvars: int, out_shape) -> np.ndarray:
    for i, ax in enumerate(range(-nvars, 0)):
        n = out_shape[i]
        centre = h.shape[ax] // 2
        h = np.take(h, np.arange(centre, centre + n), axis=ax)
        factor = np.full(n, 2.0)
        factor[0] = 1.0
        shape = [1] * h.ndim
        shape[ax] = n
        h = h * factor.reshape(shape)
    return h


def _conv_window_2d(a: np.ndarray, b: np.ndarray, starts, lengths, chunk_bytes: int = 1 << 25) -> np.ndarray:
    """Window of the full 2D convolution over the last two axes (leading axes batched).

    Rows are handled by a loop, columns by a Toeplitz matrix product so the
    inner sums run in BLAS.  Every output is still a sum of the same products
    a[i, j] b[k, l] as in the direct formula, so the usual summation error
    bounds apply (the summation order is the only thing that changes).
    """
    lead = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    a = np.broadcast_to(a, lead + a.shape[-2:]).reshape((-1,) + a.shape[-2:])
    b = np.broadcast_to(b, lead + b.shape[-2:]).reshape((-1,) + b.shape[-2:])
    (n1, m1), (n2, m2) = a.shape[1:], b.shape[1:]
    s0, s1 = starts
    l0, l1 = lengths
    q = s1 + np.arange(l1)
    idx = q[:, None] - np.arange(m1)[None, :]
    valid = (idx >= 0) & (idx < m2)
    idx = np.clip(idx, 0, m2 - 1)
    dtype = np.result_type(a.dtype, b.dtype)
    out = np.zeros((a.shape[0], l0, l1), dtype)
    per = max(1, chunk_bytes // max(1, n2 * l1 * m1 * 16))
    for c0 in range(0, a.shape[0], per):
        bb = b[c0 : c0 + per]
        Tb = bb[:, :, idx] * valid  # (B, n2, l1, m1)
        C = np.matmul(a[c0 : c0 + per], Tb.reshape(bb.shape[0], n2 * l1, m1).transpose(0, 2, 1))
        C = C.reshape(bb.shape[0], n1, n2, l1)
        o = out[c0 : c0 + per]
        ks = np.arange(n2)
        for i in range(n1):
            ps = i + ks - s0
            ok = (ps >= 0) & (ps < l0)
            if np.any(ok):
                o[:, ps[ok]] += C[:, i, ks[ok]]
    return out.reshape(lead + (l0, l1))


def _conv_fold(a: np.ndarray, b: np.ndarray, nvars: int, out_shape) -> np.ndarray:
    """Chebyshev product coefficients from symmetric extensions (conv then fold)."""
    if nvars == 1:
        a2, b2 = a[..., :, None], b[..., :, None]
        shape2 = (out_shape[0], 1)
    else:
        a2, b2 = a, b
        shape2 = tuple(out_shape)
    full = [a2.shape[-2 + k] + b2.shape[-2 + k] - 1 for k in range(2)]
    starts = [f // 2 for f in full]
    h = _conv_window_2d(a2, b2, starts, shape2)
    for k, n in enumerate(shape2):
        factor = np.full(n, 2.0)
        factor[0] = 1.0
        shp = [1] * h.ndim
        shp[h.ndim - 2 + k] = n
        h = h * factor.reshape(shp)
    if nvars == 1:
        h = h[..., 0]
    return h


def _conv_nd(a: np.ndarray, b: np.ndarray, nvars: int) -> np.ndarray:
    """Full convolution over the trailing ``nvars`` axes, broadcasting leading axes."""
    lead = np.broadcast_shapes(a.shape[: a.ndim - nvars], b.shape[: b.ndim - nvars])
    a = np.broadcast_to(a, lead + a.shape[a.ndim - nvars :])
    b = np.broadcast_to(b, lead + b.shape[b.ndim - nvars :])
    if nvars == 1:
        a2 = a[..., :, None]
        b2 = b[..., :, None]
    else:
        a2, b2 = a, b
    sa = a2.shape[-2:]
    sb = b2.shape[-2:]
    out_shape = (sa[0] + sb[0] - 1, sa[1] + sb[1] - 1)
    dtype = np.result_type(a.dtype, b.dtype)
    out = np.empty(lead + out_shape, dtype=dtype)
    for idx in np.ndindex(*lead) if lead else [()]:
        out[idx] = convolve2d(a2[idx], b2[idx], mode="full")
    if nvars == 1:
        out = out[..., 0]
    return out


def product_midrad(c, rc, d, rd, nvars: int):
    """Rigorous coefficient product of two Chebyshev series in mid-radius form.

    Returns ``(h, rh)`` with exact product coefficients within ``rh`` of
    ``h`` entrywise.  ``rc`` and ``rd`` may be ``None`` for exact inputs.
    """
    c = np.asarray(c)
    d = np.asarray(d)
    nc = c.shape[c.ndim - nvars :]
    nd = d.shape[d.ndim - nvars :]
    out_shape = tuple(p + q - 1 for p, q in zip(nc, nd))
    ce = _sym_extend(c, nvars)
    de = _sym_extend(d, nvars)
    h = _conv_fold(ce, de, nvars, out_shape)
    K = min(int(np.prod(ce.shape[-nvars:])), int(np.prod(de.shape[-nvars:]))) + sum(ce.shape[-nvars:]) + sum(de.shape[-nvars:])
    gamma = (K + 6) * U * 1.01
    ac = np.abs(ce)
    ad = np.abs(de)
    base = _conv_fold(ac, ad, nvars, out_shape)
    err = base * gamma
    if rc is not None and np.any(rc):
        rce = _sym_extend(np.asarray(rc, float), nvars)
        extra = _conv_fold(rce, ad, nvars, out_shape)
        if rd is not None and np.any(rd):
            extra = extra + _conv_fold(rce, _sym_extend(np.asarray(rd, float), nvars), nvars, out_shape)
        err = err + extra
    if rd is not None and np.any(rd):
        rde = _sym_extend(np.asarray(rd, float), nvars)
        err = err + _conv_fold(ac, rde, nvars, out_shape)
    err = _up(err * (1.0 + 8 * U * K) + 1e-300)
    return h, err


def _midrad(p: ChebEnclosure):
    c = p.coeffs.mid()
    r = p.coeffs.rad()
    return c, r


def _from_midrad(h, rh) -> ComplexInterval:
    re = RealInterval(np.nextafter(h.real - rh, -np.inf), np.nextafter(h.real + rh, np.inf))
    im = RealInterval(np.nextafter(h.imag - rh, -np.inf), np.nextafter(h.imag + rh, np.inf))
    return ComplexInterval(re, im)


def poly_mul(p: ChebEnclosure, q: ChebEnclosure) -> ChebEnclosure:
    """Exact-degree product of two enclosures on the same domain (entrywise)."""
    if p.domain != q.domain:
        raise ValueError("domains differ")
    c, rc = _midrad(p)
    d, rd = _midrad(q)
    h, rh = product_midrad(c, rc, d, rd, p.nvars)
    # error terms: |p||e_q| + |e_p||q| + e_p e_q
    sp = p.sup_bound()
    sq = q.sup_bound()
    pol = iv.get_rounding()
    err = pol.add(pol.mul(sp, q.err)[1], pol.mul(p.err, sq)[1])[1]
    return ChebEnclosure(_from_midrad(h, rh), p.domain, err)


def poly_add(p: ChebEnclosure, q: ChebEnclosure, sign: float = 1.0) -> ChebEnclosure:
    if p.domain != q.domain:
        raise ValueError("domains differ")
    shape = tuple(max(a, b) for a, b in zip(p.coeffs.shape[-p.nvars :], q.coeffs.shape[-q.nvars :]))
    a = _pad(p.coeffs, shape, p.nvars)
    b = _pad(q.coeffs, shape, q.nvars)
    c = a + b if sign > 0 else a - b
    err = iv.get_rounding().add(p.err, q.err)[1]
    return ChebEnclosure(c, p.domain, err)


def _pad(c: ComplexInterval, shape, nvars) -> ComplexInterval:
    cur = c.shape[-nvars:]
    if tuple(cur) == tuple(shape):
        return c
    pad = [(0, 0)] * (c.ndim - nvars) + [(0, s - n) for s, n in zip(shape, cur)]
    f = lambda a: np.pad(a, pad)
    return ComplexInterval(RealInterval(f(c.re.lo), f(c.re.hi)), RealInterval(f(c.im.lo), f(c.im.hi)))


def poly_det3(m: ChebEnclosure) -> ChebEnclosure:
    """Determinant of a 3x3 matrix of enclosures, exactly in coefficient space."""
    if m.value_shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    adj = poly_adjugate3(m)
    # det = sum_j m[0, j] * adj[j, 0]
    terms = [poly_mul(m[0, j], adj[j, 0]) for j in range(3)]
    out = poly_add(poly_add(terms[0], terms[1]), terms[2])
    return out


def poly_adjugate3(m: ChebEnclosure) -> ChebEnclosure:
    """Adjugate (classical adjoint) of a 3x3 matrix of enclosures."""
    if m.value_shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    entries = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            # cofactor C_ji gives adj[i, j]
            r = [k for k in range(3) if k != j]
            c = [k for k in range(3) if k != i]
            a = poly_mul(m[r[0], c[0]], m[r[1], c[1]])
            b = poly_mul(m[r[0], c[1]], m[r[1], c[0]])
            cof = poly_add(a, b, sign=-1.0)
            if (i + j) % 2:
                cof = ChebEnclosure(-cof.coeffs, cof.domain, cof.err)
            entries[i][j] = cof
    shape = tuple(max(e.coeffs.shape[-m.nvars + k] for row in entries for e in row) for k in range(m.nvars))
    coeffs = iv.stack([iv.stack([_pad(e.coeffs, shape, m.nvars) for e in row]) for row in entries])
    err = np.array([[e.err for e in row] for row in entries])
    return ChebEnclosure(coeffs, m.domain, err)
