"""Elementary differentials, truncated NB-series and NSARK tree coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels
from .jets import Jet, seed
from .trees import ColoredTree, NTreeSet, density, enumerate_trees, symmetry

LABEL_GUARD = 10**6


class DerivativeOrderError(ValueError):
    """The oracle cannot supply a derivative of the requested order."""


class MissingCoefficientError(KeyError):
    """A tree needed by the truncated series has no coefficient."""


class LabelingExplosionError(ValueError):
    """Brute-force label sum would exceed :data:`LABEL_GUARD` terms."""


class DerivativeOracle:
    """Split right-hand side ``F = sum_v F^[v]`` with derivative tensors.

    Subclasses implement :meth:`eval` and :meth:`deriv`; colors are 1-based.
    """

    N: int
    d: int
    max_order: int = 4

    def eval(self, nu: int, y) -> np.ndarray:
        raise NotImplementedError

    def deriv(self, nu: int, y, directions: Sequence) -> np.ndarray:
        """k-th derivative of ``F^[nu]`` at ``y`` applied to ``k`` directions."""
        raise NotImplementedError

    def total(self, y) -> np.ndarray:
        return sum(self.eval(nu, y) for nu in range(1, self.N + 1))


class JetOracle(DerivativeOracle):
    """Derivatives of Python-defined components via :class:`~nsark.jets.Jet`.

    ``components[v-1](y)`` must return a length-``d`` sequence and use only
    arithmetic that jets support (``+ - * / **`` and ``nsark.jets.exp``...).
    """

    def __init__(self, components: Sequence[Callable], d: int, max_order: int = 4):
        self.components = list(components)
        self.N = len(self.components)
        self.d = d
        self.max_order = max_order

    def eval(self, nu, y):
        return np.asarray(self.components[nu - 1](np.asarray(y, dtype=float)), dtype=float)

    def deriv(self, nu, y, directions):
        k = len(directions)
        if k == 0:
            return self.eval(nu, y)
        if k > self.max_order:
            raise DerivativeOrderError(f"order {k} > supported {self.max_order}")
        out = self.components[nu - 1](seed(y, directions))
        return np.array([x.top() if isinstance(x, Jet) else 0.0 for x in out])


class LinearOracle(DerivativeOracle):
    """Components ``F^[v](y) = M_v y``; exact tensors, no jets."""

    def __init__(self, matrices: Sequence):
        self.matrices = [np.asarray(M, dtype=float) for M in matrices]
        self.N = len(self.matrices)
        self.d = self.matrices[0].shape[0]
        self.max_order = 10**9

    def eval(self, nu, y):
        return self.matrices[nu - 1] @ np.asarray(y, dtype=float)

    def deriv(self, nu, y, directions):
        if len(directions) == 0:
            return self.eval(nu, y)
        if len(directions) == 1:
            return self.matrices[nu - 1] @ np.asarray(directions[0], dtype=float)
        return np.zeros(self.d)


def elementary_differential(t: ColoredTree, oracle: DerivativeOracle, y,
                            cache: dict | None = None) -> np.ndarray:
    """F(t)(y): the root color's derivative tensor contracted with the
    children's elementary differentials."""
    if cache is None:
        cache = {}
    hit = cache.get(t)
    if hit is not None:
        return hit
    if t.order - 1 > oracle.max_order:
        raise DerivativeOrderError(
            f"tree of order {t.order} needs derivative order {len(t.children)}")
    dirs = [elementary_differential(c, oracle, y, cache) for c in t.children]
    val = oracle.deriv(t.root_color, y, dirs)
    cache[t] = val
    return val


def nb_truncation(u: Mapping[ColoredTree, float] | Callable[[ColoredTree], float],
                  oracle: DerivativeOracle, y, h: float, k: int,
                  trees: NTreeSet | None = None) -> np.ndarray:
    """NB_k(u, y) = y + sum_{|t| <= k} h^|t| / sigma(t) * u(t) * F(t)(y).

    ``u`` may be a mapping or a callable such as ``exact_u``.
    """
    y = np.asarray(y, dtype=float)
    if k == 0:
        return y.copy()
    if trees is None or trees.max_order < k or trees.colors != oracle.N:
        trees = enumerate_trees(k, oracle.N)
    cache: dict = {}
    out = y.copy()
    for t in trees.up_to(k):
        if callable(u):
            coef = u(t)
        else:
            try:
                coef = u[t]
            except KeyError:
                raise MissingCoefficientError(t.encode()) from None
        if coef == 0.0:
            continue
        out += h**t.order / symmetry(t) * coef * elementary_differential(t, oracle, y, cache)
    return out


def exact_u(t: ColoredTree) -> float:
    """Coefficients of the exact flow, ``1 / gamma(t)``."""
    return 1.0 / density(t)


@dataclass
class CoefficientProvider:
    """Numeric NSARK coefficients at one ``(y^n, h)`` snapshot.

    ``A[v-1, i-1, j-1] = a_ij^[v]`` and ``b[v-1, j-1] = b_j^[v]``.
    """

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.A.ndim == 2:
            self.A = self.A[None]
        if self.b.ndim == 1:
            self.b = self.b[None]
        if self.A.shape[0] != self.b.shape[0] or self.A.shape[1:] != (self.s, self.s):
            raise ValueError(f"inconsistent shapes A{self.A.shape} b{self.b.shape}")

    @classmethod
    def replicated(cls, A, b, N: int) -> "CoefficientProvider":
        """The same classical tableau for every color."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(np.repeat(A[None], N, axis=0), np.repeat(b[None], N, axis=0))

    @property
    def s(self) -> int:
        return self.b.shape[1]

    @property
    def N(self) -> int:
        return self.b.shape[0]

    def a(self, i: int, j: int, nu: int) -> float:
        return float(self.A[nu - 1, i - 1, j - 1])

    def b_coef(self, j: int, nu: int) -> float:
        return float(self.b[nu - 1, j - 1])

    @property
    def is_explicit(self) -> bool:
        return bool(np.all(np.triu(self.A, 0) == 0.0))


@dataclass
class UCoefficients:
    """Memoized g/d recursion for one :class:`CoefficientProvider`.

    ``d(t)`` returns the stage vector ``(d_1(t), ..., d_s(t))``; ``g`` only
    differs from ``delta * prod d(children)`` by the color selector, so the
    product vector is what gets cached.
    """

    coeff: CoefficientProvider
    _prod: dict = field(default_factory=dict, repr=False)
    _d: dict = field(default_factory=dict, repr=False)
    _u: dict = field(default_factory=dict, repr=False)

    def _children_product(self, t: ColoredTree) -> np.ndarray:
        # prod_j d_i(t_j) for i = 1..s
        hit = self._prod.get(t)
        if hit is None:
            hit = np.ones(self.coeff.s)
            for c in t.children:
                hit = hit * self.d(c)
            self._prod[t] = hit
        return hit

    def g(self, t: ColoredTree, nu: int) -> np.ndarray:
        """Stage vector of g_i^[nu](t)."""
        if nu != t.root_color:
            return np.zeros(self.coeff.s)
        return self._children_product(t)

    def d(self, t: ColoredTree) -> np.ndarray:
        hit = self._d.get(t)
        if hit is None:
            hit = self.coeff.A[t.root_color - 1] @ self._children_product(t)
            self._d[t] = hit
        return hit

    def u(self, t: ColoredTree) -> float:
        hit = self._u.get(t)
        if hit is None:
            hit = float(self.coeff.b[t.root_color - 1] @ self._children_product(t))
            self._u[t] = hit
        return hit

    __call__ = u


def nsark_u(t: ColoredTree, coeff: CoefficientProvider | UCoefficients) -> float:
    """u(t, y^n, h) by the g/d recursion."""
    session = coeff if isinstance(coeff, UCoefficients) else UCoefficients(coeff)
    return session.u(t)


def nsark_u_oracle(t: ColoredTree, coeff: CoefficientProvider, guard: int = LABEL_GUARD) -> float:
    """u(t) as the sum over every labeling of ``b_root * prod a_edge``."""
    if coeff.s ** t.order > guard:
        raise LabelingExplosionError(f"{coeff.s}**{t.order} labelings exceed {guard}")
    parents, colors = t.flatten()
    return _kernels.label_sum(parents, [c - 1 for c in colors], coeff.A, coeff.b)
