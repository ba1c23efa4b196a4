"""Explicit Butcher tableaux used as the base of RK, MPRK and GeCo schemes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    name: str = ""
    order: int | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float)
        if A.shape != (b.size, b.size):
            raise ValueError(f"A has shape {A.shape}, b has {b.size} entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def s(self) -> int:
        return self.b.size

    @property
    def c(self) -> np.ndarray:
        return self.A.sum(axis=1)

    @property
    def is_explicit(self) -> bool:
        return bool(np.all(np.triu(self.A) == 0.0))

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.all(self.A >= 0) and np.all(self.b >= 0))

    def classical_order(self, max_order: int = 6, tol: float = 1e-13) -> int:
        """Largest p with u(t) = 1/gamma(t) on every uncolored tree |t| <= p."""
        from .nbseries import CoefficientProvider, UCoefficients
        from .trees import density, enumerate_trees

        session = UCoefficients(CoefficientProvider(self.A, self.b))
        trees = enumerate_trees(max_order, 1)
        p = 0
        for k in range(1, max_order + 1):
            if any(abs(session.u(t) - 1.0 / density(t)) > tol for t in trees.of_order(k)):
                break
            p = k
        return p

    def to_dict(self) -> dict:
        return {"name": self.name, "A": self.A.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, spec: dict) -> "ButcherTableau":
        if isinstance(spec, str):
            return get(spec)
        A = spec["A"]
        s = len(spec["b"])
        # allow ragged lower-triangular rows
        full = np.zeros((s, s))
        for i, row in enumerate(A):
            full[i, :len(row)] = row
        return cls(full, spec["b"], name=spec.get("name", "custom"))


def _tab(rows, b, name, order):
    s = len(b)
    A = np.zeros((s, s))
    for i, row in enumerate(rows):
        A[i, :len(row)] = row
    return ButcherTableau(A, b, name=name, order=order)


euler = _tab([[]], [1.0], "euler", 1)
heun = _tab([[], [1.0]], [0.5, 0.5], "heun", 2)
midpoint = _tab([[], [0.5]], [0.0, 1.0], "midpoint", 2)
heun3 = _tab([[], [1 / 3], [0.0, 2 / 3]], [0.25, 0.0, 0.75], "heun3", 3)
kutta3 = _tab([[], [0.5], [-1.0, 2.0]], [1 / 6, 2 / 3, 1 / 6], "kutta3", 3)
ssprk3 = _tab([[], [1.0], [0.25, 0.25]], [1 / 6, 1 / 6, 2 / 3], "ssprk3", 3)
rk4 = _tab([[], [0.5], [0.0, 0.5], [0.0, 0.0, 1.0]],
           [1 / 6, 1 / 3, 1 / 3, 1 / 6], "rk4", 4)

GALLERY = {t.name: t for t in (euler, heun, midpoint, heun3, kutta3, ssprk3, rk4)}


def get(name: str) -> ButcherTableau:
    try:
        return GALLERY[name]
    except KeyError:
        raise KeyError(f"unknown tableau {name!r}; known: {sorted(GALLERY)}") from None
