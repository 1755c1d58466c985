"""Taylor-mode automatic differentiation with interval coefficients.

An expression is a small DAG of nodes.  Each node produces the Taylor
coefficients of its value order by order; coefficient ``k`` of a node only
needs coefficients ``<= k`` of its children.  Solving an autonomous ODE
``v' = F(v)`` then reduces to ``v_{k+1} = F_k / (k + 1)``.

Coefficients are :class:`RealInterval` batches, so the same expression can be
evaluated on many starting intervals at once.
"""

from __future__ import annotations

import numpy as np

from . import interval as iv
from .interval import RealInterval


class Node:
    def __init__(self, *children):
        self.children = children
        self._lo = None
        self._hi = None
        self.n = 0

    # storage
    def _alloc(self, order, shape):
        self._lo = np.zeros((order,) + shape)
        self._hi = np.zeros((order,) + shape)
        self.n = 0

    def coeffs(self, upto: int | None = None) -> RealInterval:
        k = self.n if upto is None else upto
        return RealInterval(self._lo[:k], self._hi[:k], check=False)

    def _store(self, k, value: RealInterval):
        self._lo[k] = value.lo
        self._hi[k] = value.hi
        self.n = k + 1

    def ensure(self, k: int):
        """Make sure coefficients 0..k are available."""
        while self.n <= k:
            for c in self.children:
                c.ensure(self.n)
            self._store(self.n, self.compute(self.n))

    def compute(self, k: int) -> RealInterval:
        raise NotImplementedError

    def reset(self, order, shape):
        if self._lo is not None and self._lo.shape == (order,) + shape and self.n == 0:
            return
        self._alloc(order, shape)
        for c in self.children:
            c.reset(order, shape)

    # operator sugar
    def __add__(self, other):
        return Add(self, _node(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Sub(self, _node(other))

    def __rsub__(self, other):
        return Sub(_node(other), self)

    def __mul__(self, other):
        if isinstance(other, Node):
            return Mul(self, other)
        return Scale(self, iv._to_real(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Scale(self, RealInterval.point(-1.0))

    def __pow__(self, alpha):
        return Pow(self, iv._to_real(alpha) if not isinstance(alpha, (int, np.integer)) else RealInterval.point(float(alpha)))


def _node(x) -> Node:
    return x if isinstance(x, Node) else Const(iv._to_real(x))


class Var(Node):
    """Independent series whose coefficients are written by the caller."""

    def ensure(self, k: int):
        if self.n <= k:
            raise RuntimeError("variable coefficient not yet available")

    def set(self, k: int, value: RealInterval):
        self._store(k, value)


class Const(Node):
    def __init__(self, value: RealInterval):
        super().__init__()
        self.value = value

    def compute(self, k):
        if k == 0:
            return self.value + RealInterval.point(np.zeros(self._lo.shape[1:]))
        return RealInterval.point(np.zeros(self._lo.shape[1:]))


class Add(Node):
    def compute(self, k):
        a, b = self.children
        return a.coeffs(k + 1)[k] + b.coeffs(k + 1)[k]


class Sub(Node):
    def compute(self, k):
        a, b = self.children
        return a.coeffs(k + 1)[k] - b.coeffs(k + 1)[k]


class Scale(Node):
    def __init__(self, a, s: RealInterval):
        super().__init__(a)
        self.s = s

    def compute(self, k):
        return self.children[0].coeffs(k + 1)[k] * self.s


class Mul(Node):
    def compute(self, k):
        a, b = self.children
        A = a.coeffs(k + 1)
        B = b.coeffs(k + 1)
        Br = RealInterval(B.lo[::-1], B.hi[::-1], check=False)
        return iv.isum(A * Br, axis=0)


class Pow(Node):
    """a ** alpha for a > 0 and a real (interval) exponent alpha."""

    def __init__(self, a, alpha: RealInterval):
        super().__init__(a)
        self.alpha = alpha

    def compute(self, k):
        a = self.children[0]
        A = a.coeffs(k + 1)
        if k == 0:
            return iv.pow(A[0], self.alpha)
        j = np.arange(1, k + 1, dtype=float)
        # weights alpha*j - (k - j)
        w = self.alpha * RealInterval.point(j.reshape((-1,) + (1,) * (A.ndim - 1))) - RealInterval.point(
            (k - j).reshape((-1,) + (1,) * (A.ndim - 1))
        )
        Uprev = self.coeffs(k)  # u_0..u_{k-1}
        Ur = RealInterval(Uprev.lo[::-1], Uprev.hi[::-1], check=False)  # u_{k-1}..u_0
        s = iv.isum(w * A[1 : k + 1] * Ur, axis=0)
        return s / (A[0] * float(k))


def ode_series(v0: RealInterval, rhs: Node, var: Var, order: int, extra: tuple = ()):
    """Taylor coefficients v_0..v_{order-1} of v' = rhs(v) with v(0) = v0.

    ``extra`` nodes (functions of ``var``) are advanced to the same order and
    their coefficient arrays are returned as well.
    """
    v0 = iv._to_real(v0)
    shape = v0.shape
    var._alloc(order, shape)
    for node in (rhs,) + tuple(extra):
        _reset_tree(node, order, shape, var)
    var.set(0, v0)
    for k in range(order - 1):
        rhs.ensure(k)
        Fk = rhs.coeffs(k + 1)[k]
        var.set(k + 1, Fk / float(k + 1))
    out = [var.coeffs(order)]
    for node in extra:
        node.ensure(order - 1)
        out.append(node.coeffs(order))
    return out


def _reset_tree(node: Node, order, shape, var):
    if node is var:
        return
    node._alloc(order, shape)
    for c in node.children:
        _reset_tree(c, order, shape, var)


def horner(coeffs: RealInterval, t: RealInterval) -> RealInterval:
    """Evaluate sum_k c_k t^k with interval arithmetic (coefficients on axis 0)."""
    t = iv._to_real(t)
    acc = coeffs[coeffs.shape[0] - 1]
    for k in range(coeffs.shape[0] - 2, -1, -1):
        acc = acc * t + coeffs[k]
    return acc
