"""Real and complex (rectangular) interval arithmetic with outward rounding.

Intervals are stored as pairs of float64 numpy arrays, so a single object can
hold a whole batch of enclosures and every operation is vectorized.  Rounding
is delegated to a :class:`RoundingPolicy`; the active policy lives in a
``contextvars.ContextVar`` so that threads and tasks never see each other's
choice.

Two policies are provided:

* :class:`ErrorFreeRounding` (default) uses error-free transformations
  (TwoSum, Dekker's TwoProduct and exact residuals for division and square
  root) to obtain correctly directed results.  Exact results stay exact.
* :class:`StepRounding` takes the round-to-nearest result and steps one
  representable value outward.

Library functions (exp, log, sin, ...) are not correctly rounded.  Their
results are widened by ``TRANSCENDENTAL_ULPS`` units in the last place, which
assumes the platform libm / numpy kernels are accurate to a few ulp.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass

import numpy as np

TRANSCENDENTAL_ULPS = 8
_TINY = np.finfo(np.float64).tiny
_SPLITTER = 134217729.0  # 2**27 + 1


class IntervalDomainError(ValueError):
    """Raised when an operation is applied outside its mathematical domain."""


# ---------------------------------------------------------------- rounding


def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


class RoundingPolicy:
    """Directed-rounding primitives on float arrays.

    Every method returns ``(down, up)``: the exact result of the operation on
    the float inputs rounded toward minus and plus infinity respectively.
    """

    name = "abstract"

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def div(self, a, b):
        raise NotImplementedError

    def sqrt(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, -b)


class StepRounding(RoundingPolicy):
    """Round to nearest, then step one ulp outward."""

    name = "step"

    def add(self, a, b):
        s = np.add(a, b)
        return _down(s), _up(s)

    def mul(self, a, b):
        p = np.multiply(a, b)
        return _down(p), _up(p)

    def div(self, a, b):
        q = np.divide(a, b)
        return _down(q), _up(q)

    def sqrt(self, a):
        r = np.sqrt(a)
        return np.maximum(_down(r), 0.0), _up(r)


def _two_prod_err(a, b, p):
    # Dekker: a*b = p + e exactly, barring over/underflow in the pieces
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _direct(r, err_sign, fallback):
    """Turn a nearest result plus the sign of (exact - r) into (down, up)."""
    dn = np.where(err_sign < 0, _down(r), r)
    up = np.where(err_sign > 0, _up(r), r)
    if np.any(fallback):
        dn = np.where(fallback, _down(r), dn)
        up = np.where(fallback, _up(r), up)
    return dn, up


def _safe_range(*xs):
    ok = np.ones(np.broadcast(*xs).shape, dtype=bool)
    for x in xs:
        ax = np.abs(x)
        ok &= ((ax > 2.0**-450) & (ax < 2.0**450)) | (ax == 0.0)
    return ok


class ErrorFreeRounding(RoundingPolicy):
    """Correctly directed rounding built from error-free transformations."""

    name = "error-free"

    def add(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        with np.errstate(invalid="ignore", over="ignore"):
            s = a + b
            bb = s - a
            e = (a - (s - bb)) + (b - bb)
        fallback = ~np.isfinite(e)
        return _direct(s, np.nan_to_num(e), fallback)

    def mul(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        with np.errstate(invalid="ignore", over="ignore", under="ignore"):
            p = a * b
            e = _two_prod_err(a, b, p)
        ok = _safe_range(a, b, p) & np.isfinite(e)
        zero = (a == 0.0) | (b == 0.0)
        fallback = ~(ok | zero)
        e = np.where(zero, 0.0, np.nan_to_num(e))
        return _direct(p, e, fallback)

    def div(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        with np.errstate(invalid="ignore", over="ignore", under="ignore", divide="ignore"):
            q = a / b
            p = q * b
            e = _two_prod_err(q, b, p)
            r = (a - p) - e  # exact residual a - q*b
        ok = _safe_range(a, b, q, p) & np.isfinite(r)
        zero = a == 0.0
        fallback = ~(ok | zero)
        sign = np.sign(np.nan_to_num(r)) * np.sign(b)
        sign = np.where(zero, 0.0, sign)
        return _direct(q, sign, fallback)

    def sqrt(self, a):
        a = np.asarray(a, float)
        with np.errstate(invalid="ignore", over="ignore", under="ignore"):
            s = np.sqrt(a)
            p = s * s
            e = _two_prod_err(s, s, p)
            r = (a - p) - e
        ok = _safe_range(a, s, p) & np.isfinite(r)
        zero = a == 0.0
        fallback = ~(ok | zero)
        dn, up = _direct(s, np.where(zero, 0.0, np.nan_to_num(r)), fallback)
        return np.maximum(dn, 0.0), up


_POLICY: contextvars.ContextVar[RoundingPolicy] = contextvars.ContextVar(
    "shockcert_rounding", default=ErrorFreeRounding()
)


def get_rounding() -> RoundingPolicy:
    return _POLICY.get()


def set_rounding(policy: RoundingPolicy):
    """Set the rounding policy for the current context; returns a reset token."""
    return _POLICY.set(policy)


@contextlib.contextmanager
def rounding(policy: RoundingPolicy):
    token = _POLICY.set(policy)
    try:
        yield policy
    finally:
        _POLICY.reset(token)


def widen_ulps(lo, hi, k: int = TRANSCENDENTAL_ULPS):
    """Push ``lo`` down and ``hi`` up by ``k`` ulp (plus one step for safety)."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    with np.errstate(invalid="ignore", over="ignore"):
        lo = _down(lo - k * np.spacing(np.abs(lo)))
        hi = _up(hi + k * np.spacing(np.abs(hi)))
    return lo, hi


# ---------------------------------------------------------------- real intervals


def _as_float_array(x):
    return np.asarray(x, dtype=np.float64)


class RealInterval:
    """A batch of closed real intervals ``[lo, hi]`` with float64 endpoints.

    The empty interval is represented by NaN endpoints and only arises from
    :meth:`intersect`.
    """

    __slots__ = ("lo", "hi")
    __array_ufunc__ = None

    def __init__(self, lo, hi=None, check: bool = True):
        lo = _as_float_array(lo)
        hi = lo if hi is None else _as_float_array(hi)
        if lo.shape != hi.shape:
            lo, hi = np.broadcast_arrays(lo, hi)
            lo, hi = lo.copy(), hi.copy()
        if check and np.any(lo > hi):
            raise ValueError("interval with lo > hi")
        self.lo = lo
        self.hi = hi

    # construction helpers
    @classmethod
    def point(cls, x) -> "RealInterval":
        x = _as_float_array(x)
        return cls(x, x.copy(), check=False)

    @classmethod
    def from_value(cls, x) -> "RealInterval":
        """Enclose a Python number, Fraction or decimal string exactly."""
        from fractions import Fraction

        if isinstance(x, RealInterval):
            return x
        if isinstance(x, (int, float, np.floating, np.integer)) and float(x) == x:
            return cls.point(float(x))
        f = Fraction(x)
        m = float(f)
        lo = m if Fraction(m) <= f else float(_down(m))
        hi = m if Fraction(m) >= f else float(_up(m))
        return cls(lo, hi)

    @classmethod
    def empty(cls, shape=()) -> "RealInterval":
        nan = np.full(shape, np.nan)
        return cls(nan, nan.copy(), check=False)

    @classmethod
    def entire(cls, shape=()) -> "RealInterval":
        return cls(np.full(shape, -np.inf), np.full(shape, np.inf), check=False)

    # array protocol
    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    @property
    def size(self):
        return self.lo.size

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx) -> "RealInterval":
        return RealInterval(self.lo[idx], self.hi[idx], check=False)

    def __setitem__(self, idx, value):
        value = _to_real(value)
        if np.shares_memory(self.lo, self.hi):
            self.hi = self.hi.copy()
        self.lo[idx] = value.lo
        self.hi[idx] = value.hi

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def reshape(self, *shape) -> "RealInterval":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return RealInterval(self.lo.reshape(shape), self.hi.reshape(shape), check=False)

    def copy(self) -> "RealInterval":
        return RealInterval(self.lo.copy(), self.hi.copy(), check=False)

    @property
    def T(self) -> "RealInterval":
        return RealInterval(self.lo.T, self.hi.T, check=False)

    def swapaxes(self, a, b) -> "RealInterval":
        return RealInterval(np.swapaxes(self.lo, a, b), np.swapaxes(self.hi, a, b), check=False)

    def __repr__(self):
        if self.ndim == 0:
            return f"RealInterval([{float(self.lo)!r}, {float(self.hi)!r}])"
        return f"RealInterval(shape={self.shape})"

    # lattice utilities
    def is_empty(self):
        return np.isnan(self.lo)

    def mid(self):
        m = 0.5 * self.lo + 0.5 * self.hi
        return np.where(np.isfinite(m), m, 0.5 * (self.lo + self.hi))

    def width(self):
        """Upper bound on ``hi - lo``."""
        return get_rounding().sub(self.hi, self.lo)[1]

    def rad(self):
        """Upper bound on the distance from :meth:`mid` to either endpoint."""
        m = self.mid()
        pol = get_rounding()
        return np.maximum(pol.sub(self.hi, m)[1], pol.sub(m, self.lo)[1])

    def mag(self):
        """max |x| over the interval."""
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self):
        """min |x| over the interval."""
        return np.where(
            (self.lo <= 0) & (self.hi >= 0), 0.0, np.minimum(np.abs(self.lo), np.abs(self.hi))
        )

    def contains(self, x):
        """Elementwise exact membership test for floats or sub-intervals."""
        if isinstance(x, RealInterval):
            return (self.lo <= x.lo) & (x.hi <= self.hi)
        x = _as_float_array(x)
        return (self.lo <= x) & (x <= self.hi)

    def contains_zero(self):
        return (self.lo <= 0.0) & (self.hi >= 0.0)

    def interior_contains(self, other: "RealInterval"):
        return (self.lo < other.lo) & (other.hi < self.hi)

    def hull(self, other) -> "RealInterval":
        other = _to_real(other)
        return RealInterval(np.fmin(self.lo, other.lo), np.fmax(self.hi, other.hi), check=False)

    def intersect(self, other) -> "RealInterval":
        other = _to_real(other)
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        bad = lo > hi
        lo = np.where(bad, np.nan, lo)
        hi = np.where(bad, np.nan, hi)
        return RealInterval(lo, hi, check=False)

    # arithmetic
    def __neg__(self):
        return RealInterval(-self.hi, -self.lo, check=False)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, ComplexInterval):
            return NotImplemented
        other = _to_real(other)
        pol = get_rounding()
        return RealInterval(pol.add(self.lo, other.lo)[0], pol.add(self.hi, other.hi)[1], check=False)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ComplexInterval):
            return NotImplemented
        other = _to_real(other)
        pol = get_rounding()
        return RealInterval(pol.sub(self.lo, other.hi)[0], pol.sub(self.hi, other.lo)[1], check=False)

    def __rsub__(self, other):
        return _to_real(other) - self

    def __mul__(self, other):
        if isinstance(other, ComplexInterval):
            return NotImplemented
        other = _to_real(other)
        pol = get_rounding()
        d1, u1 = pol.mul(self.lo, other.lo)
        d2, u2 = pol.mul(self.lo, other.hi)
        d3, u3 = pol.mul(self.hi, other.lo)
        d4, u4 = pol.mul(self.hi, other.hi)
        lo = np.minimum(np.minimum(d1, d2), np.minimum(d3, d4))
        hi = np.maximum(np.maximum(u1, u2), np.maximum(u3, u4))
        return RealInterval(lo, hi, check=False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ComplexInterval):
            return NotImplemented
        other = _to_real(other)
        if np.any(other.contains_zero()):
            raise IntervalDomainError("division by an interval containing zero")
        pol = get_rounding()
        d1, u1 = pol.div(self.lo, other.lo)
        d2, u2 = pol.div(self.lo, other.hi)
        d3, u3 = pol.div(self.hi, other.lo)
        d4, u4 = pol.div(self.hi, other.hi)
        lo = np.minimum(np.minimum(d1, d2), np.minimum(d3, d4))
        hi = np.maximum(np.maximum(u1, u2), np.maximum(u3, u4))
        return RealInterval(lo, hi, check=False)

    def __rtruediv__(self, other):
        return _to_real(other) / self

    def sqr(self) -> "RealInterval":
        pol = get_rounding()
        dl, ul = pol.mul(self.lo, self.lo)
        dh, uh = pol.mul(self.hi, self.hi)
        hi = np.maximum(ul, uh)
        lo = np.where(self.contains_zero(), 0.0, np.minimum(dl, dh))
        return RealInterval(lo, hi, check=False)

    def __pow__(self, k):
        if isinstance(k, (int, np.integer)):
            return ipow(self, int(k))
        return pow(self, k)

    def __abs__(self):
        return absval(self)

    def __matmul__(self, other):
        if isinstance(other, ComplexInterval):
            return ComplexInterval(self, zeros_like(self)) @ other
        other = _to_real(other)
        prod = self[..., :, :, None] * other[..., None, :, :]
        return isum(prod, axis=-2)

    def sum(self, axis=None) -> "RealInterval":
        return isum(self, axis)

    def __eq__(self, other):  # structural equality, handy in tests
        other = _to_real(other)
        return bool(np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi))

    __hash__ = None


def _to_real(x) -> RealInterval:
    if isinstance(x, RealInterval):
        return x
    if isinstance(x, ComplexInterval):
        raise TypeError("expected a real interval")
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        raise TypeError("expected a real value")
    return RealInterval.point(arr)


def zeros_like(x: RealInterval) -> RealInterval:
    z = np.zeros(x.shape)
    return RealInterval(z, z.copy(), check=False)


def isum(x, axis=None):
    """Outward-rounded sum along ``axis`` by pairwise folding."""
    if isinstance(x, ComplexInterval):
        return ComplexInterval(isum(x.re, axis), isum(x.im, axis))
    if axis is None:
        x = x.reshape(-1)
        axis = 0
    lo = np.moveaxis(x.lo, axis, 0)
    hi = np.moveaxis(x.hi, axis, 0)
    pol = get_rounding()
    if lo.shape[0] == 0:
        return RealInterval.point(np.zeros(lo.shape[1:]))
    while lo.shape[0] > 1:
        n = lo.shape[0]
        h = n // 2
        nlo = pol.add(lo[:h], lo[h : 2 * h])[0]
        nhi = pol.add(hi[:h], hi[h : 2 * h])[1]
        if n % 2:
            nlo = np.concatenate([nlo, lo[2 * h :]])
            nhi = np.concatenate([nhi, hi[2 * h :]])
        lo, hi = nlo, nhi
    return RealInterval(lo[0], hi[0], check=False)


def hull_of(x: RealInterval, axis=None) -> RealInterval:
    """Hull of a batch of intervals along ``axis``."""
    if isinstance(x, ComplexInterval):
        return ComplexInterval(hull_of(x.re, axis), hull_of(x.im, axis))
    return RealInterval(np.min(x.lo, axis=axis), np.max(x.hi, axis=axis), check=False)


def stack(items, axis=0):
    items = list(items)
    if any(isinstance(i, ComplexInterval) for i in items):
        items = [_to_complex(i) for i in items]
        return ComplexInterval(stack([i.re for i in items], axis), stack([i.im for i in items], axis))
    items = [_to_real(i) for i in items]
    return RealInterval(
        np.stack([i.lo for i in items], axis), np.stack([i.hi for i in items], axis), check=False
    )


def concatenate(items, axis=0):
    items = list(items)
    if any(isinstance(i, ComplexInterval) for i in items):
        items = [_to_complex(i) for i in items]
        return ComplexInterval(
            concatenate([i.re for i in items], axis), concatenate([i.im for i in items], axis)
        )
    return RealInterval(
        np.concatenate([i.lo for i in items], axis),
        np.concatenate([i.hi for i in items], axis),
        check=False,
    )


# ---------------------------------------------------------------- elementary functions


PI = RealInterval(math.pi, float(_up(math.pi)))
EULER_GAMMA = RealInterval(float(_down(0.5772156649015329)), float(_up(0.5772156649015329)))


def _lib(fn, lo, hi):
    with np.errstate(over="ignore", under="ignore"):
        a = fn(lo)
        b = fn(hi)
    return widen_ulps(a, b)


def exp(x: RealInterval) -> RealInterval:
    x = _to_real(x)
    lo, hi = _lib(np.exp, x.lo, x.hi)
    return RealInterval(np.maximum(lo, 0.0), hi, check=False)


def log(x: RealInterval) -> RealInterval:
    x = _to_real(x)
    if np.any(x.lo <= 0):
        raise IntervalDomainError("log of an interval not strictly positive")
    lo, hi = _lib(np.log, x.lo, x.hi)
    return RealInterval(lo, hi, check=False)


def sqrt(x: RealInterval) -> RealInterval:
    x = _to_real(x)
    if np.any(x.lo < 0):
        raise IntervalDomainError("sqrt of an interval with negative part")
    pol = get_rounding()
    return RealInterval(pol.sqrt(x.lo)[0], pol.sqrt(x.hi)[1], check=False)


def ipow(x: RealInterval, k: int) -> RealInterval:
    """Integer power with tight handling of even exponents."""
    x = _to_real(x)
    if k == 0:
        return RealInterval.point(np.ones(x.shape))
    if k < 0:
        return 1.0 / ipow(x, -k)
    if k == 1:
        return x
    if k % 2 == 0:
        return ipow(x.sqr(), k // 2)
    # odd power is monotone: evaluate endpoints by repeated multiplication
    lo = RealInterval.point(x.lo)
    hi = RealInterval.point(x.hi)
    plo, phi = lo, hi
    for _ in range(k - 1):
        plo = plo * lo
        phi = phi * hi
    return RealInterval(plo.lo, phi.hi, check=False)


def pow(x: RealInterval, p) -> RealInterval:
    """``x**p`` for ``x > 0``; ``p`` may be an interval exponent."""
    if isinstance(p, (int, np.integer)):
        return ipow(x, int(p))
    return exp(_to_real(p) * log(x))


def _cos_core(x: RealInterval) -> RealInterval:
    # cos is not monotone: order the endpoint values before widening
    a = np.cos(x.lo)
    b = np.cos(x.hi)
    out_lo, out_hi = widen_ulps(np.minimum(a, b), np.maximum(a, b))
    pi_lo, pi_hi = PI.lo, PI.hi
    m0 = np.floor(x.lo / math.pi)
    for off in (-1.0, 0.0, 1.0, 2.0):
        m = m0 + off
        # m*pi may lie in [x.lo, x.hi]?  conservative with the enclosure of pi
        a = np.where(m >= 0, m * pi_lo, m * pi_hi)
        b = np.where(m >= 0, m * pi_hi, m * pi_lo)
        a = _down(a)
        b = _up(b)
        inside = (b >= x.lo) & (a <= x.hi)
        even = np.mod(m, 2.0) == 0.0
        out_hi = np.where(inside & even, 1.0, out_hi)
        out_lo = np.where(inside & ~even, -1.0, out_lo)
    wide = get_rounding().sub(x.hi, x.lo)[1] >= 2 * math.pi
    out_lo = np.where(wide, -1.0, np.maximum(out_lo, -1.0))
    out_hi = np.where(wide, 1.0, np.minimum(out_hi, 1.0))
    return RealInterval(out_lo, out_hi, check=False)


def cos(x: RealInterval) -> RealInterval:
    return _cos_core(_to_real(x))


def sin(x: RealInterval) -> RealInterval:
    return _cos_core(_to_real(x) - PI * 0.5)


def sinh(x: RealInterval) -> RealInterval:
    x = _to_real(x)
    lo, hi = _lib(np.sinh, x.lo, x.hi)
    return RealInterval(lo, hi, check=False)


def cosh(x: RealInterval) -> RealInterval:
    x = _to_real(x)
    a, b = _lib(np.cosh, x.mig(), x.mag())
    return RealInterval(np.maximum(a, 1.0), b, check=False)


def absval(x: RealInterval) -> RealInterval:
    x = _to_real(x)
    return RealInterval(x.mig(), x.mag(), check=False)


def arccos(x: RealInterval) -> RealInterval:
    """arccos on the part of ``x`` inside [-1, 1] (monotone decreasing)."""
    x = _to_real(x)
    if np.any((x.lo > 1) | (x.hi < -1)):
        raise IntervalDomainError("arccos argument outside [-1, 1]")
    lo_arg = np.clip(x.hi, -1.0, 1.0)
    hi_arg = np.clip(x.lo, -1.0, 1.0)
    lo, hi = _lib(np.arccos, lo_arg, hi_arg)
    return RealInterval(np.maximum(lo, 0.0), np.minimum(hi, PI.hi), check=False)


def arctan(x: RealInterval) -> RealInterval:
    x = _to_real(x)
    lo, hi = _lib(np.arctan, x.lo, x.hi)
    return RealInterval(lo, hi, check=False)


# ---------------------------------------------------------------- complex intervals


class ComplexInterval:
    """A batch of axis-aligned rectangles ``re x im`` in the complex plane."""

    __slots__ = ("re", "im")
    __array_ufunc__ = None

    def __init__(self, re, im=None):
        re = _to_real(re)
        im = zeros_like(re) if im is None else _to_real(im)
        if re.shape != im.shape:
            shape = np.broadcast_shapes(re.shape, im.shape)
            re = RealInterval(np.broadcast_to(re.lo, shape).copy(), np.broadcast_to(re.hi, shape).copy(), check=False)
            im = RealInterval(np.broadcast_to(im.lo, shape).copy(), np.broadcast_to(im.hi, shape).copy(), check=False)
        self.re = re
        self.im = im

    @classmethod
    def point(cls, z) -> "ComplexInterval":
        z = np.asarray(z, dtype=np.complex128)
        return cls(RealInterval.point(z.real.copy()), RealInterval.point(z.imag.copy()))

    @classmethod
    def from_disc(cls, center, radius) -> "ComplexInterval":
        """Rectangle hull of discs ``|z - center| <= radius``."""
        c = cls.point(center) if not isinstance(center, ComplexInterval) else center
        r = RealInterval(-np.asarray(radius, float), np.asarray(radius, float))
        return ComplexInterval(c.re + r, c.im + r)

    @classmethod
    def zeros(cls, shape) -> "ComplexInterval":
        return cls.point(np.zeros(shape, complex))

    # array protocol
    @property
    def shape(self):
        return self.re.shape

    @property
    def ndim(self):
        return self.re.ndim

    def __len__(self):
        return len(self.re)

    def __getitem__(self, idx) -> "ComplexInterval":
        return ComplexInterval(self.re[idx], self.im[idx])

    def __setitem__(self, idx, value):
        value = _to_complex(value)
        self.re[idx] = value.re
        self.im[idx] = value.im

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def reshape(self, *shape) -> "ComplexInterval":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return ComplexInterval(self.re.reshape(shape), self.im.reshape(shape))

    def copy(self) -> "ComplexInterval":
        return ComplexInterval(self.re.copy(), self.im.copy())

    @property
    def T(self) -> "ComplexInterval":
        return ComplexInterval(self.re.T, self.im.T)

    def swapaxes(self, a, b) -> "ComplexInterval":
        return ComplexInterval(self.re.swapaxes(a, b), self.im.swapaxes(a, b))

    def __repr__(self):
        if self.ndim == 0:
            return f"ComplexInterval({self.re!r} + i{self.im!r})"
        return f"ComplexInterval(shape={self.shape})"

    # lattice utilities
    def mid(self):
        return self.re.mid() + 1j * self.im.mid()

    def rad(self):
        """Upper bound on the distance from :meth:`mid` to any point of the rectangle."""
        pol = get_rounding()
        rr = self.re.rad()
        ri = self.im.rad()
        s = pol.add(pol.mul(rr, rr)[1], pol.mul(ri, ri)[1])[1]
        return pol.sqrt(s)[1]

    def width(self):
        return np.maximum(self.re.width(), self.im.width())

    def mag(self):
        return modulus(self).hi

    def contains(self, z):
        if isinstance(z, ComplexInterval):
            return self.re.contains(z.re) & self.im.contains(z.im)
        z = np.asarray(z, dtype=np.complex128)
        return self.re.contains(z.real) & self.im.contains(z.imag)

    def contains_zero(self):
        return self.re.contains_zero() & self.im.contains_zero()

    def interior_contains(self, other: "ComplexInterval"):
        return self.re.interior_contains(other.re) & self.im.interior_contains(other.im)

    def hull(self, other) -> "ComplexInterval":
        other = _to_complex(other)
        return ComplexInterval(self.re.hull(other.re), self.im.hull(other.im))

    def intersect(self, other) -> "ComplexInterval":
        other = _to_complex(other)
        return ComplexInterval(self.re.intersect(other.re), self.im.intersect(other.im))

    def is_empty(self):
        return self.re.is_empty() | self.im.is_empty()

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    # arithmetic
    def __neg__(self):
        return ComplexInterval(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _to_complex(other)
        return ComplexInterval(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _to_complex(other)
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _to_complex(other) - self

    def __mul__(self, other):
        if isinstance(other, RealInterval) or (
            not isinstance(other, ComplexInterval) and not np.iscomplexobj(np.asarray(other))
        ):
            other = _to_real(other)
            return ComplexInterval(self.re * other, self.im * other)
        other = _to_complex(other)
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        return ComplexInterval(re, im)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RealInterval) or (
            not isinstance(other, ComplexInterval) and not np.iscomplexobj(np.asarray(other))
        ):
            other = _to_real(other)
            return ComplexInterval(self.re / other, self.im / other)
        other = _to_complex(other)
        if np.any(other.contains_zero()):
            raise IntervalDomainError("division by a rectangle containing zero")
        den = other.re.sqr() + other.im.sqr()
        re = (self.re * other.re + self.im * other.im) / den
        im = (self.im * other.re - self.re * other.im) / den
        return ComplexInterval(re, im)

    def __rtruediv__(self, other):
        return _to_complex(other) / self

    def sqr(self) -> "ComplexInterval":
        re = self.re.sqr() - self.im.sqr()
        im = (self.re * self.im) * 2.0
        return ComplexInterval(re, im)

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only non-negative integer powers of complex intervals")
        k = int(k)
        if k == 0:
            return ComplexInterval.point(np.ones(self.shape, complex))
        out = None
        base = self
        while k:
            if k & 1:
                out = base if out is None else out * base
            k >>= 1
            if k:
                base = base.sqr()
        return out

    def __abs__(self):
        return modulus(self)

    def __matmul__(self, other):
        other = _to_complex(other)
        if other.ndim == 1:
            prod = self * other[..., None, :]
            return isum(prod, axis=-1)
        if self.ndim == 1:
            prod = self[..., :, None] * other
            return isum(prod, axis=-2)
        prod = self[..., :, :, None] * other[..., None, :, :]
        return isum(prod, axis=-2)

    def __rmatmul__(self, other):
        return _to_complex(other) @ self

    def sum(self, axis=None) -> "ComplexInterval":
        return isum(self, axis)

    def __eq__(self, other):
        other = _to_complex(other)
        return self.re == other.re and self.im == other.im

    __hash__ = None


def _to_complex(x) -> ComplexInterval:
    if isinstance(x, ComplexInterval):
        return x
    if isinstance(x, RealInterval):
        return ComplexInterval(x, zeros_like(x))
    return ComplexInterval.point(x)


def as_complex(x) -> ComplexInterval:
    return _to_complex(x)


def modulus(z: ComplexInterval) -> RealInterval:
    """Enclosure of ``{|w| : w in z}``; the lower bound is 0 if z holds the origin."""
    z = _to_complex(z)
    pol = get_rounding()
    # exact extremes of |w| over the rectangle, evaluated with directed rounding
    xa = z.re.mig()
    ya = z.im.mig()
    xb = z.re.mag()
    yb = z.im.mag()
    lo2 = pol.add(pol.mul(xa, xa)[0], pol.mul(ya, ya)[0])[0]
    hi2 = pol.add(pol.mul(xb, xb)[1], pol.mul(yb, yb)[1])[1]
    return RealInterval(pol.sqrt(lo2)[0], pol.sqrt(hi2)[1], check=False)


def cexp(z: ComplexInterval) -> ComplexInterval:
    z = _to_complex(z)
    r = exp(z.re)
    return ComplexInterval(r * cos(z.im), r * sin(z.im))


def real_sqrt(x):
    return sqrt(x)


# ---------------------------------------------------------------- matrices


class IntervalMatrix(ComplexInterval):
    """A two-dimensional :class:`ComplexInterval` (``rows x cols``)."""

    __slots__ = ()

    def __init__(self, re, im=None):
        super().__init__(re, im)
        if self.ndim != 2:
            raise ValueError("IntervalMatrix must be two-dimensional")

    @classmethod
    def of(cls, x) -> "IntervalMatrix":
        x = _to_complex(x)
        return cls(x.re, x.im)

    @property
    def rows(self):
        return self.shape[0]

    @property
    def cols(self):
        return self.shape[1]

    def H(self) -> "IntervalMatrix":
        return IntervalMatrix(self.re.T, (-self.im).T)


def frobenius_bound(m: ComplexInterval):
    """Upper bound on the Frobenius norm (hence the 2-norm) of every matrix in ``m``."""
    mag = modulus(m).hi
    pol = get_rounding()
    sq = pol.mul(mag, mag)[1]
    s = isum(isum(RealInterval(sq, sq), axis=-1), axis=-1).hi
    return pol.sqrt(s)[1]


@dataclass(frozen=True)
class ErrorSplitMatrix:
    """A matrix set ``{M + E : M in center, E in err}`` with thin ``center``."""

    center: ComplexInterval
    err: ComplexInterval

    @classmethod
    def from_interval(cls, m) -> "ErrorSplitMatrix":
        m = _to_complex(m)
        c = ComplexInterval.point(m.mid())
        return cls(c, m - c)

    def enclosure(self) -> ComplexInterval:
        return self.center + self.err


def product_with_error(A: ErrorSplitMatrix, B: ErrorSplitMatrix, C: ErrorSplitMatrix) -> ErrorSplitMatrix:
    """Triple product keeping the centre thin and collecting the seven error terms."""
    a, b, c = A.center, B.center, C.center
    ea, eb, ec = A.err, B.err, C.err
    abc = a @ b @ c
    mid = ComplexInterval.point(abc.mid())
    bc = b @ c
    ebc = eb @ c
    beC = b @ ec
    ebec = eb @ ec
    err = (
        ea @ bc
        + a @ ebc
        + a @ beC
        + a @ ebec
        + ea @ beC
        + ea @ ebc
        + ea @ ebec
    )
    err = err + (abc - mid)
    return ErrorSplitMatrix(mid, err)
