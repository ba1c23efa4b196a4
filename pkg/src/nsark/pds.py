"""Production-destruction systems and their additive splitting.

A PDS is given by its production terms ``p_{m nu}(y)`` (mass flowing from
species ``nu`` into species ``m``). Destruction is the transpose,
``d_{m nu} = p_{nu m}``, so every system built here is absolutely
conservative by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .nbseries import JetOracle


class NonConservativeError(ValueError):
    pass


class UnknownProblemError(KeyError):
    pass


class ToleranceNotAchievedError(RuntimeError):
    pass


@dataclass(frozen=True)
class Production:
    """One production term: ``p_{m nu}(y) += rate(y)`` (1-based species)."""

    m: int
    nu: int
    rate: Callable


@dataclass
class PDS:
    N: int
    productions: Sequence[Production]
    y0: np.ndarray
    name: str = "pds"
    exact: Callable | None = field(default=None, repr=False)  # (y0, t) -> y(t)
    stiff: bool = False

    def __post_init__(self):
        self.y0 = np.asarray(self.y0, dtype=float)
        for term in self.productions:
            if term.m == term.nu:
                raise NonConservativeError(f"diagonal production p_{term.m}{term.nu}")
            if not (1 <= term.m <= self.N and 1 <= term.nu <= self.N):
                raise ValueError(f"species index out of range in {term}")

    def production(self, y) -> np.ndarray:
        """Matrix ``P[m-1, nu-1] = p_{m nu}(y)``."""
        P = np.zeros((self.N, self.N))
        for term in self.productions:
            P[term.m - 1, term.nu - 1] += term.rate(y)
        return P

    def destruction(self, y) -> np.ndarray:
        return self.production(y).T

    def rhs(self, y) -> np.ndarray:
        P = self.production(y)
        return P.sum(axis=1) - P.sum(axis=0)

    def component(self, nu: int, y) -> list:
        """``F^[nu](y)``; works with jet-valued ``y``."""
        out = [0.0] * self.N
        for term in self.productions:
            if term.nu == nu:
                r = term.rate(y)
                out[term.m - 1] = out[term.m - 1] + r
                out[nu - 1] = out[nu - 1] - r
        return out

    def oracle(self, max_order: int = 4) -> JetOracle:
        comps = [lambda y, nu=nu: self.component(nu, y) for nu in range(1, self.N + 1)]
        return JetOracle(comps, self.N, max_order=max_order)

    def check_conservative(self, y, tol: float = 1e-14) -> None:
        P = self.production(y)
        if np.any(P < 0):
            raise NonConservativeError("negative production rate")
        mass = abs(self.rhs(y).sum())
        if mass > tol * max(1.0, float(np.abs(P).sum())):
            raise NonConservativeError(f"rhs does not sum to zero ({mass:.3e})")


@dataclass
class SplitRHS:
    """The ``N`` components ``F^[nu]`` of a PDS right-hand side."""

    pds: PDS

    @property
    def N(self) -> int:
        return self.pds.N

    def __call__(self, nu: int, y) -> np.ndarray:
        return np.asarray(self.pds.component(nu, np.asarray(y, dtype=float)), dtype=float)

    def all(self, y) -> np.ndarray:
        """Array of shape ``(N, N)``; row ``nu-1`` is ``F^[nu](y)``."""
        P = self.pds.production(np.asarray(y, dtype=float))
        F = P.T.copy()  # F[nu, m] = p_{m nu} off the diagonal
        np.fill_diagonal(F, -P.sum(axis=0))
        return F

    def total(self, y) -> np.ndarray:
        return self.all(y).sum(axis=0)


def split(pds: PDS, probe=None) -> SplitRHS:
    """Split a PDS into ``F^[nu]``; verifies conservativity at ``probe``
    (default: the initial state)."""
    pds.check_conservative(pds.y0 if probe is None else probe)
    return SplitRHS(pds)


# built-in problems -----------------------------------------------------------

def _linear2_exact(y0, t):
    y0 = np.asarray(y0, dtype=float)
    steady = np.array([1.0, 5.0]) / 6.0 * y0.sum()
    return steady + (y0 - steady) * math.exp(-6.0 * t)


def linear2() -> PDS:
    """y1' = y2 - 5 y1, y2' = 5 y1 - y2 with y0 = (0.9, 0.1)."""
    return PDS(
        2,
        [Production(1, 2, lambda y: y[1]), Production(2, 1, lambda y: 5.0 * y[0])],
        np.array([0.9, 0.1]),
        name="linear2",
        exact=_linear2_exact,
    )


def nonlinear3() -> PDS:
    """Nutrient/phytoplankton/detritus model:
    p21 = y1 y2 / (y1 + 1), p32 = 0.3 y2, y0 = (9.98, 0.01, 0.01)."""
    return PDS(
        3,
        [Production(2, 1, lambda y: y[0] * y[1] / (y[0] + 1.0)),
         Production(3, 2, lambda y: 0.3 * y[1])],
        np.array([9.98, 0.01, 0.01]),
        name="nonlinear3",
    )


def robertson_like() -> PDS:
    """Robertson kinetics: p21 = 0.04 y1, p12 = 1e4 y2 y3, p32 = 3e7 y2^2."""
    return PDS(
        3,
        [Production(2, 1, lambda y: 0.04 * y[0]),
         Production(1, 2, lambda y: 1e4 * y[1] * y[2]),
         Production(3, 2, lambda y: 3e7 * y[1] * y[1])],
        np.array([1.0, 1e-10, 1e-10]),
        name="robertson-like",
        stiff=True,
    )


BUILTINS = {
    "linear2": linear2,
    "nonlinear3": nonlinear3,
    "robertson-like": robertson_like,
}


def builtin(name: str) -> PDS:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise UnknownProblemError(f"unknown problem {name!r}; known: {sorted(BUILTINS)}") from None


def reference_solution(pds: PDS, y0, t: float, rtol: float = 1e-12,
                       atol: float | None = None) -> np.ndarray:
    """Flow of ``pds`` from ``y0`` over time ``t``.

    Uses the closed form when the problem has one, otherwise DOP853 (Radau for
    stiff problems) at ``rtol``.
    """
    y0 = np.asarray(y0, dtype=float)
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return y0.copy()
    if pds.exact is not None:
        return pds.exact(y0, t)
    if atol is None:
        atol = rtol * 1e-3 * float(np.abs(y0).sum())
    method = "Radau" if pds.stiff else "DOP853"
    sol = solve_ivp(lambda _t, y: pds.rhs(y), (0.0, t), y0, method=method,
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise ToleranceNotAchievedError(sol.message)
    return sol.y[:, -1]


# JSON polynomial problems ------------------------------------------------------

def _monomial(coeff: float, powers: dict[int, int]) -> Callable:
    items = sorted(powers.items())

    def rate(y):
        out = coeff
        for k, e in items:
            out = out * y[k - 1] ** e
        return out

    return rate


def from_dict(spec: dict) -> PDS:
    """Build a PDS from ``{N, productions: [{m, nu, monomial}], y0, name?}``.

    A monomial is ``{"coeff": c, "powers": {"k": e, ...}}`` meaning
    ``c * prod y_k**e`` (species 1-based, integer exponents >= 0). Several
    entries for the same ``(m, nu)`` are summed.
    """
    N = int(spec["N"])
    terms = []
    for entry in spec["productions"]:
        mono = entry["monomial"]
        powers = {int(k): int(e) for k, e in mono.get("powers", {}).items()}
        if any(e < 0 for e in powers.values()):
            raise ValueError("negative exponents are not polynomial")
        terms.append(Production(int(entry["m"]), int(entry["nu"]),
                                _monomial(float(mono.get("coeff", 1.0)), powers)))
    y0 = np.asarray(spec["y0"], dtype=float)
    if y0.shape != (N,):
        raise ValueError(f"y0 must have length {N}")
    return PDS(N, terms, y0, name=spec.get("name", "json"))


def load(path) -> PDS:
    with open(path) as fh:
        return from_dict(json.load(fh))


__all__ = [
    "PDS", "Production", "SplitRHS", "split", "builtin", "BUILTINS",
    "reference_solution", "from_dict", "load", "linear2", "nonlinear3",
    "robertson_like", "NonConservativeError", "UnknownProblemError",
    "ToleranceNotAchievedError",
]
