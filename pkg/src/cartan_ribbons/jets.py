"""Second-order forward-mode differentiation in two variables.

Charts and paths are written against the helpers below (``sin``, ``cos``,
``sqrt``, ...).  Called with plain floats or arrays they evaluate normally;
called with :class:`Jet` arguments they also propagate first and second
partial derivatives exactly.
"""
from __future__ import annotations

import numpy as np


class Jet:
    """Value plus first/second partials with respect to two seed variables."""

    __slots__ = ("f", "fu", "fv", "fuu", "fuv", "fvv")
    __array_priority__ = 1000

    def __init__(self, f, fu=0.0, fv=0.0, fuu=0.0, fuv=0.0, fvv=0.0):
        self.f = f
        self.fu = fu
        self.fv = fv
        self.fuu = fuu
        self.fuv = fuv
        self.fvv = fvv

    @classmethod
    def seed(cls, value, slot):
        value = np.asarray(value, dtype=float)
        one, zero = np.ones_like(value), np.zeros_like(value)
        if slot == 0:
            return cls(value, one, zero, zero, zero, zero)
        return cls(value, zero, one, zero, zero, zero)

    def _compose(self, g0, g1, g2):
        # chain rule for a scalar function g applied to self
        return Jet(
            g0,
            g1 * self.fu,
            g1 * self.fv,
            g2 * self.fu * self.fu + g1 * self.fuu,
            g2 * self.fu * self.fv + g1 * self.fuv,
            g2 * self.fv * self.fv + g1 * self.fvv,
        )

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.f + other.f, self.fu + other.fu, self.fv + other.fv,
                       self.fuu + other.fuu, self.fuv + other.fuv, self.fvv + other.fvv)
        return Jet(self.f + other, self.fu, self.fv, self.fuu, self.fuv, self.fvv)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.f, -self.fu, -self.fv, -self.fuu, -self.fuv, -self.fvv)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(
                self.f * other.f,
                self.fu * other.f + self.f * other.fu,
                self.fv * other.f + self.f * other.fv,
                self.fuu * other.f + 2 * self.fu * other.fu + self.f * other.fuu,
                self.fuv * other.f + self.fu * other.fv + self.fv * other.fu + self.f * other.fuv,
                self.fvv * other.f + 2 * self.fv * other.fv + self.f * other.fvv,
            )
        return Jet(self.f * other, self.fu * other, self.fv * other,
                   self.fuu * other, self.fuv * other, self.fvv * other)

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.f
        return self._compose(inv, -inv * inv, 2 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if p == 2:
            return self * self
        return self._compose(self.f ** p, p * self.f ** (p - 1), p * (p - 1) * self.f ** (p - 2))


def sin(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.f), np.cos(x.f)
        return x._compose(s, c, -s)
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.f), np.cos(x.f)
        return x._compose(c, -s, -c)
    return np.cos(x)


def sqrt(x):
    if isinstance(x, Jet):
        r = np.sqrt(x.f)
        return x._compose(r, 0.5 / r, -0.25 / (r * x.f))
    return np.sqrt(x)


def value(x):
    return x.f if isinstance(x, Jet) else x
