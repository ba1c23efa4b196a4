"""Multilinear jets for exact higher derivatives.

A :class:`Jet` over ``k`` infinitesimals ``e_1..e_k`` with ``e_i**2 = 0``
stores one coefficient per subset of ``{1..k}``. Evaluating ``f`` at
``y + sum_i e_i v_i`` and reading the coefficient of ``e_1 e_2 ... e_k``
gives the k-th derivative tensor of ``f`` at ``y`` contracted with
``v_1, ..., v_k``. This is forward-mode automatic differentiation nested
``k`` times, with no truncation error.
"""

from __future__ import annotations

import math
from functools import lru_cache
from numbers import Real

import numpy as np


@lru_cache(maxsize=None)
def _product_table(k: int):
    # for each subset S and each submask A of S: (S, A, S \ A)
    out, left, right = [], [], []
    for S in range(1 << k):
        A = S
        while True:
            out.append(S)
            left.append(A)
            right.append(S ^ A)
            if A == 0:
                break
            A = (A - 1) & S
    return (np.array(out, dtype=np.intp), np.array(left, dtype=np.intp),
            np.array(right, dtype=np.intp))


class Jet:
    """Truncated multilinear Taylor number. Supports ``+ - * /``, integer
    and real powers, ``exp``, ``log`` and ``sqrt``."""

    __slots__ = ("c", "k")
    __array_priority__ = 100

    def __init__(self, coeffs, k: int):
        self.c = np.asarray(coeffs, dtype=float)
        self.k = k

    @classmethod
    def constant(cls, value: float, k: int) -> "Jet":
        c = np.zeros(1 << k)
        c[0] = value
        return cls(c, k)

    @property
    def value(self) -> float:
        return float(self.c[0])

    def top(self) -> float:
        """Coefficient of ``e_1 ... e_k`` (the fully mixed derivative)."""
        return float(self.c[-1])

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.k != self.k:
                raise ValueError("jets of different depth")
            return other
        if isinstance(other, (Real, np.floating, np.integer)):
            return Jet.constant(float(other), self.k)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(self.c + o.c, self.k)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.k)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(self.c - o.c, self.k)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(o.c - self.c, self.k)

    def __mul__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            return Jet(self.c * float(other), self.k)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        S, A, B = _product_table(self.k)
        return Jet(np.bincount(S, weights=self.c[A] * o.c[B], minlength=1 << self.k), self.k)

    __rmul__ = __mul__

    def _apply(self, derivs) -> "Jet":
        # f(a0 + n) = sum_m f^(m)(a0)/m! n^m with n nilpotent of degree k+1
        n = Jet(self.c.copy(), self.k)
        n.c[0] = 0.0
        result = Jet.constant(derivs[0], self.k)
        power = Jet.constant(1.0, self.k)
        for m in range(1, self.k + 1):
            power = power * n
            if derivs[m] != 0.0:
                result = result + power * (derivs[m] / math.factorial(m))
        return result

    def reciprocal(self) -> "Jet":
        a = self.value
        if a == 0.0:
            raise ZeroDivisionError("jet with zero value")
        return self._apply([(-1) ** m * math.factorial(m) * a ** (-m - 1)
                            for m in range(self.k + 1)])

    def __truediv__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            return Jet(self.c / float(other), self.k)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.reciprocal()

    def __pow__(self, r):
        if isinstance(r, (int, np.integer)) and r >= 0:
            out = Jet.constant(1.0, self.k)
            for _ in range(int(r)):
                out = out * self
            return out
        a = self.value
        derivs = []
        coef = 1.0
        for m in range(self.k + 1):
            derivs.append(coef * a ** (r - m))
            coef *= r - m
        return self._apply(derivs)

    def exp(self) -> "Jet":
        e = math.exp(self.value)
        return self._apply([e] * (self.k + 1))

    def log(self) -> "Jet":
        a = self.value
        derivs = [math.log(a)] + [(-1) ** (m - 1) * math.factorial(m - 1) / a ** m
                                  for m in range(1, self.k + 1)]
        return self._apply(derivs)

    def sqrt(self) -> "Jet":
        return self ** 0.5

    def __repr__(self):
        return f"Jet({self.c.tolist()}, k={self.k})"


def seed(y, directions) -> list:
    """Jet-valued point ``y + sum_i e_i * directions[i]``."""
    k = len(directions)
    y = np.asarray(y, dtype=float)
    dirs = np.asarray(directions, dtype=float).reshape(k, len(y))
    out = []
    for m in range(len(y)):
        c = np.zeros(1 << k)
        c[0] = y[m]
        for i in range(k):
            c[1 << i] = dirs[i, m]
        out.append(Jet(c, k))
    return out


def exp(x):
    return x.exp() if isinstance(x, Jet) else math.exp(x)


def log(x):
    return x.log() if isinstance(x, Jet) else math.log(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Jet) else math.sqrt(x)


def top(x) -> float:
    """Fully mixed coefficient of ``x``; zero for plain numbers."""
    return x.top() if isinstance(x, Jet) else 0.0
