"""Named schemes for the command line and the test-suite."""

from __future__ import annotations

from . import solvers as S
from . import tableaux as T
from .pds import PDS

R, E, O = S.PhiRational, S.PhiExp, S.PhiOne

# GeCo scalings meeting the order-p conditions on an order-p tableau with s = p
GECO = {
    "geco1": (T.euler, lambda: S.GecoPhi([], R(1.0, 1)), 1),
    "geco2": (T.heun, lambda: S.GecoPhi([R(1.0, 1)], R(1.0, 2)), 2),
    "geco3": (T.heun3, lambda: S.GecoPhi([R(1.0, 1), R(1.0, 2)], R(1.0, 3)), 3),
    "geco4": (T.rk4, lambda: S.GecoPhi([E(-1.0, 2), E(1.0, 2), O()], R(1.0, 4)), 4),
}

# each breaks exactly one condition of the configuration of the same order
GECO_BROKEN = {
    "geco2-final": (T.heun, lambda: S.GecoPhi([R(1.0, 1)], R(1.0, 1)), 2),
    "geco3-final": (T.heun3, lambda: S.GecoPhi([R(1.0, 1), R(1.0, 2)], R(1.0, 2)), 3),
    "geco4-stage": (T.rk4, lambda: S.GecoPhi([E(-1.0, 1), E(1.0, 1), E(-1.0, 2)], R(1.0, 4)), 4),
}

MPRK = {
    "mpe": (S.mpe, 1),
    "mprk22": (S.mprk22, 2),
    "mprk22-first-order": (S.mprk22_first_order, 1),
    "mprk43": (S.mprk43, 3),
    "mprk4-expansion": (S.mprk4_expansion, 4),
    "mprk4-shifted-rho": (S.mprk4_shifted_rho, 3),
    "mprk4-rho-prev": (S.mprk4_rho_prev, 2),
}


def names() -> list[str]:
    return sorted([*T.GALLERY, *GECO, *GECO_BROKEN, *MPRK])


def nominal_order(name: str) -> int:
    """Order the named scheme attains (what the convergence study should show)."""
    if name in T.GALLERY:
        return T.GALLERY[name].order
    if name in GECO:
        return GECO[name][2]
    if name in GECO_BROKEN:
        return GECO_BROKEN[name][2] - 1
    if name in MPRK:
        return MPRK[name][1]
    raise KeyError(name)


def design_order(name: str) -> int:
    """Order the scheme is built to be checked at (differs from
    :func:`nominal_order` for the deliberately broken configurations)."""
    if name in GECO_BROKEN:
        return GECO_BROKEN[name][2]
    if name in ("mprk22-first-order",):
        return 2
    if name in ("mprk4-shifted-rho", "mprk4-rho-prev"):
        return 4
    return nominal_order(name)


def scheme(name: str, problem: PDS) -> S.Scheme:
    if name in T.GALLERY:
        return S.RKScheme(T.GALLERY[name], problem)
    for table in (GECO, GECO_BROKEN):
        if name in table:
            tab, phi, _ = table[name]
            return S.GecoScheme(tab, problem, phi())
    if name in MPRK:
        return MPRK[name][0]().bind(problem)
    raise KeyError(f"unknown scheme {name!r}; known: {names()}")


__all__ = ["GECO", "GECO_BROKEN", "MPRK", "names", "nominal_order", "design_order", "scheme"]
