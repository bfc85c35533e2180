"""Second-order forward-mode jets in two variables.

A :class:`Jet` carries a value, its gradient and its Hessian with respect to
two base variables, vectorized over arbitrary leading array shapes.  Only the
handful of operations needed by the closed-form operators are provided.
"""
from __future__ import annotations

import numpy as np


class Jet:
    """Value, gradient (``..., 2``) and Hessian (``..., 2, 2``)."""

    __array_priority__ = 100

    def __init__(self, val, d=None, dd=None):
        self.val = np.asarray(val, dtype=float)
        shape = self.val.shape
        self.d = np.zeros(shape + (2,)) if d is None else np.asarray(d, dtype=float)
        self.dd = np.zeros(shape + (2, 2)) if dd is None else np.asarray(dd, dtype=float)

    @classmethod
    def variable(cls, x, k):
        x = np.asarray(x, dtype=float)
        d = np.zeros(x.shape + (2,))
        d[..., k] = 1.0
        return cls(x, d, np.zeros(x.shape + (2, 2)))

    @classmethod
    def const(cls, c, shape=()):
        return cls(np.broadcast_to(np.asarray(c, dtype=float), shape).copy())

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet(np.broadcast_to(np.asarray(other, dtype=float), self.val.shape))

    def __add__(self, other):
        o = self._lift(other)
        return Jet(self.val + o.val, self.d + o.d, self.dd + o.dd)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.d, -self.dd)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return Jet(self.val * c, self.d * c[..., None], self.dd * c[..., None, None])
        a, b = self, other
        outer = a.d[..., :, None] * b.d[..., None, :]
        return Jet(
            a.val * b.val,
            a.d * b.val[..., None] + b.d * a.val[..., None],
            a.dd * b.val[..., None, None] + b.dd * a.val[..., None, None]
            + outer + np.swapaxes(outer, -1, -2),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        x = self.val
        return self.apply(x ** p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2))

    def apply(self, f0, f1, f2):
        """Compose with a scalar function given its value and two derivatives."""
        f1 = np.asarray(f1, dtype=float)
        f2 = np.asarray(f2, dtype=float)
        outer = self.d[..., :, None] * self.d[..., None, :]
        return Jet(f0, f1[..., None] * self.d,
                   f2[..., None, None] * outer + f1[..., None, None] * self.dd)

    def reciprocal(self):
        x = self.val
        return self.apply(1.0 / x, -1.0 / x ** 2, 2.0 / x ** 3)

    def sqrt(self):
        q = np.sqrt(self.val)
        return self.apply(q, 0.5 / q, -0.25 / (q * self.val))

    def exp(self):
        e = np.exp(self.val)
        return self.apply(e, e, e)

    def log(self):
        x = self.val
        return self.apply(np.log(x), 1.0 / x, -1.0 / x ** 2)

    def sin(self):
        s, c = np.sin(self.val), np.cos(self.val)
        return self.apply(s, c, -s)

    def cos(self):
        s, c = np.sin(self.val), np.cos(self.val)
        return self.apply(c, -s, -c)

    def tanh(self):
        th = np.tanh(self.val)
        sech2 = 1.0 - th ** 2
        return self.apply(th, sech2, -2.0 * th * sech2)

    def __getitem__(self, idx):
        return Jet(self.val[idx], self.d[idx], self.dd[idx])


def polar_jets(u, v):
    """Jets of (r, θ) with respect to Cartesian (u, v)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    r2 = u * u + v * v
    r = np.sqrt(r2)
    rd = np.stack([u / r, v / r], axis=-1)
    r3 = r2 * r
    rdd = np.empty(u.shape + (2, 2))
    rdd[..., 0, 0] = v * v / r3
    rdd[..., 1, 1] = u * u / r3
    rdd[..., 0, 1] = rdd[..., 1, 0] = -u * v / r3
    td = np.stack([-v / r2, u / r2], axis=-1)
    r4 = r2 * r2
    tdd = np.empty(u.shape + (2, 2))
    tdd[..., 0, 0] = 2 * u * v / r4
    tdd[..., 1, 1] = -2 * u * v / r4
    tdd[..., 0, 1] = tdd[..., 1, 0] = (v * v - u * u) / r4
    return Jet(r, rd, rdd), Jet(np.arctan2(v, u), td, tdd)


def change_variables(f: Jet, y0: Jet, y1: Jet) -> Jet:
    """Re-express a jet in new variables ``(y0, y1)`` given as jets in the old ones.

    Uses the inverse function theorem to second order.
    """
    J = np.stack([y0.d, y1.d], axis=-2)  # J[k, i] = dy_k/dx_i
    Jinv = np.linalg.inv(J)  # Jinv[i, b] = dx_i/dy_b
    Ydd = np.stack([y0.dd, y1.dd], axis=-3)  # Ydd[k, i, j]
    # X^a_{bc} = -Jinv[a,k] Ydd[k,i,j] Jinv[i,b] Jinv[j,c]
    Xdd = -np.einsum("...ak,...kij,...ib,...jc->...abc", Jinv, Ydd, Jinv, Jinv)
    grad = np.einsum("...i,...ib->...b", f.d, Jinv)
    hess = (np.einsum("...ib,...ij,...jc->...bc", Jinv, f.dd, Jinv)
            + np.einsum("...a,...abc->...bc", f.d, Xdd))
    return Jet(f.val, grad, hess)
