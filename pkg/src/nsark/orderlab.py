"""Numerical verification of order conditions.

Every check reduces to a :class:`ResidualSeries`: a residual evaluated on a
geometric step-size grid, a least-squares slope on the log-log tail and a
target exponent. A series passes when its slope reaches ``target - slack``
or when the residual at the smallest step is below the noise floor.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .nbseries import CoefficientProvider, UCoefficients, exact_u, nb_truncation
from .tableaux import ButcherTableau
from .trees import NTreeSet, enumerate_trees

FLOOR = 1e-13
SLOPE_SLACK = 0.1
MIN_POINTS = 4
TAIL_SPAN = 8.0
# global errors accumulate rounding over ~1/h steps, so they bottom out higher
GLOBAL_FLOOR = 5e-13


class GridTooCoarseError(ValueError):
    """The step-size grid has fewer than :data:`MIN_POINTS` points."""


class UnsupportedOrderError(ValueError):
    pass


def geometric_grid(h0: float = 0.1, ratio: float = 0.5, points: int = 8) -> np.ndarray:
    if h0 <= 0 or not 0 < ratio < 1 or points < 1:
        raise ValueError("need h0 > 0, 0 < ratio < 1 and points >= 1")
    return h0 * ratio ** np.arange(points)


def _check_grid(h_grid) -> np.ndarray:
    h = np.asarray(h_grid, dtype=float)
    if h.ndim != 1 or np.any(h <= 0) or np.any(np.diff(h) >= 0):
        raise ValueError("h grid must be positive and strictly decreasing")
    if h.size < MIN_POINTS:
        raise GridTooCoarseError(f"{h.size} grid points, need at least {MIN_POINTS}")
    return h


def _map(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# slope fitting ---------------------------------------------------------------

@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    rms: float  # root mean square of the log-log fit residuals
    points: int


def fit_slope(h, r, floor: float = FLOOR, min_points: int = MIN_POINTS,
              span: float = TAIL_SPAN) -> SlopeFit | None:
    """Least-squares slope of ``log r`` against ``log h`` on the asymptotic tail.

    Points with ``r <= floor`` are dropped. The tail is every remaining point
    with ``h <= span * h_min`` (at least ``min_points`` of them). Returns
    ``None`` when fewer than ``min_points`` points survive.
    """
    h = np.asarray(h, dtype=float)
    r = np.abs(np.asarray(r, dtype=float))
    keep = np.isfinite(r) & (r > floor)
    h, r = h[keep], r[keep]
    if h.size < min_points:
        return None
    order = np.argsort(h)
    h, r = h[order], r[order]
    n = max(min_points, int(np.sum(h <= span * h[0] * (1 + 1e-12))))
    x, y = np.log(h[:n]), np.log(r[:n])
    (slope, intercept), *_ = np.linalg.lstsq(np.vstack([x, np.ones_like(x)]).T, y, rcond=None)
    rms = float(np.sqrt(np.mean((y - slope * x - intercept) ** 2)))
    return SlopeFit(float(slope), float(intercept), rms, n)


@dataclass
class ResidualSeries:
    """Residual magnitudes of one tree or condition across a step-size grid.

    Target exponents below 1 are checked as 1 (the residual must still vanish
    with at least one factor of h).
    """

    id: str
    h: np.ndarray
    residuals: np.ndarray
    target: float
    floor: float = FLOOR
    slack: float = SLOPE_SLACK
    fit: SlopeFit | None = field(init=False)

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.residuals = np.abs(np.asarray(self.residuals, dtype=float))
        if self.h.shape != self.residuals.shape:
            raise ValueError("grid and residuals differ in length")
        self.fit = fit_slope(self.h, self.residuals, self.floor)

    @property
    def required(self) -> float:
        return max(float(self.target), 1.0) - self.slack

    @property
    def slope(self) -> float | None:
        return None if self.fit is None else self.fit.slope

    @property
    def below_floor(self) -> bool:
        return bool(self.residuals[-1] <= self.floor)

    @property
    def passed(self) -> bool:
        if not np.all(np.isfinite(self.residuals)):
            return False
        return self.below_floor or (self.fit is not None and self.fit.slope >= self.required)

    @property
    def margin(self) -> float:
        """``slope - (target - slack)``; infinite when the residual is below the floor."""
        if self.below_floor:
            return float("inf")
        if self.fit is None:
            return float("-inf")
        return self.fit.slope - self.required

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "target": self.target,
            "h": self.h.tolist(),
            "residuals": self.residuals.tolist(),
            "slope": self.slope,
            "fit_rms": None if self.fit is None else self.fit.rms,
            "below_floor": self.below_floor,
            "passed": self.passed,
        }


@dataclass
class ConditionReport:
    scheme: str
    p: int
    kind: str
    series: list

    def __post_init__(self):
        self.series = sorted(self.series, key=lambda s: s.id)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.series)

    def failing(self) -> list[str]:
        return [s.id for s in self.series if not s.passed]

    def __getitem__(self, key: str) -> ResidualSeries:
        for s in self.series:
            if s.id == key:
                return s
        raise KeyError(key)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "p": self.p, "kind": self.kind,
                "passed": self.passed, "series": [s.to_dict() for s in self.series]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_table(self) -> str:
        rows = [("condition", "target", "slope", "last residual", "margin", "status")]
        for s in self.series:
            slope = "-" if s.slope is None else f"{s.slope:.3f}"
            margin = "floor" if s.below_floor else ("-" if s.fit is None else f"{s.margin:+.3f}")
            rows.append((s.id, f"{s.target:g}", slope, f"{s.residuals[-1]:.3e}", margin,
                         "pass" if s.passed else "FAIL"))
        widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
        lines = [f"{self.kind} report for {self.scheme}, p={self.p}: "
                 f"{'PASS' if self.passed else 'FAIL'}"]
        for n, r in enumerate(rows):
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
            if n == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


# evaluation states -----------------------------------------------------------

def evaluation_states(y0, n_random: int = 3, seed: int = 0) -> np.ndarray:
    """``y0`` followed by ``n_random`` random positive states of equal mass."""
    y0 = np.asarray(y0, dtype=float)
    rng = np.random.default_rng(seed)
    out = [y0]
    for _ in range(n_random):
        y = rng.uniform(0.1, 1.0, y0.size)
        out.append(y * y0.sum() / y.sum())
    return np.array(out)


def _states(yn) -> np.ndarray:
    y = np.asarray(yn, dtype=float)
    return y[None] if y.ndim == 1 else y


def _scheme_name(scheme) -> str:
    tab = getattr(scheme, "tableau", None)
    kind = getattr(scheme, "kind", "")
    return f"{kind}:{tab.name}" if tab is not None else str(scheme)


# tree residuals --------------------------------------------------------------

def _coefficients(step_source, yn, h) -> CoefficientProvider:
    step = getattr(step_source, "step", step_source)
    out = step(yn, h)
    return getattr(out, "coeffs", out)


def _for_colors(coeff: CoefficientProvider, N: int) -> CoefficientProvider:
    if coeff.N == N:
        return coeff
    if coeff.N == 1:
        return CoefficientProvider(np.repeat(coeff.A, N, axis=0), np.repeat(coeff.b, N, axis=0))
    raise ValueError(f"coefficients have {coeff.N} colors, trees have {N}")


def u_residuals(step_source, trees: NTreeSet, p: int, h_grid, yn, *,
                name: str | None = None, jobs: int = 1) -> ConditionReport:
    """Residuals ``|u(t, y^n, h) - 1/gamma(t)|`` for every tree with ``|t| <= p``.

    ``step_source`` is a scheme (anything with ``step(yn, h)``) or a callable
    returning a :class:`StepTrace` or :class:`CoefficientProvider`. ``yn`` may
    hold several states; residuals are maxima over them. The target exponent
    of ``t`` is ``p + 1 - |t|``.
    """
    h = _check_grid(h_grid)
    if trees.max_order < p:
        raise ValueError(f"tree set stops at order {trees.max_order} < {p}")
    states = _states(yn)
    selected = trees.up_to(p)

    def at(hk):
        worst = np.zeros(len(selected))
        for y in states:
            u = UCoefficients(_for_colors(_coefficients(step_source, y, hk), trees.colors))
            res = np.array([abs(u(t) - exact_u(t)) for t in selected])
            worst = np.maximum(worst, res)
        return worst

    table = np.array(_map(at, list(h), jobs))
    series = [ResidualSeries(t.encode(), h, table[:, n], p + 1 - t.order)
              for n, t in enumerate(selected)]
    return ConditionReport(name or _scheme_name(step_source), p, "u", series)


# empirical convergence order -------------------------------------------------

@dataclass
class OrderEstimate:
    order: float
    fit_rms: float
    h: np.ndarray
    errors: np.ndarray

    def to_csv(self) -> str:
        lines = ["h,error"] + [f"{a!r},{b!r}" for a, b in zip(self.h.tolist(), self.errors.tolist())]
        return "\n".join(lines) + "\n"


def empirical_order(scheme, problem=None, t_end: float = 1.0, h_grid=None, *,
                    reference=None, floor: float = GLOBAL_FLOOR, jobs: int = 1) -> OrderEstimate:
    """Slope of the global error at ``t_end`` against ``h``."""
    from .pds import reference_solution
    from .solvers import global_error

    if problem is not None and getattr(scheme, "problem", None) is not problem:
        scheme = scheme.bind(problem) if hasattr(scheme, "bind") else type(scheme)(
            **{**scheme.__dict__, "problem": problem})
    h = _check_grid(geometric_grid() if h_grid is None else h_grid)
    pds = scheme.problem
    if reference is None:
        reference = reference_solution(pds, pds.y0, t_end)
    errors = np.array(_map(lambda hk: global_error(scheme, t_end, hk, reference), list(h), jobs))
    fit = fit_slope(h, errors, floor=floor)
    if fit is None:
        raise GridTooCoarseError("fewer than 4 global errors above the floor")
    return OrderEstimate(fit.slope, fit.rms, h, errors)


# GeCo conditions --------------------------------------------------------------

def _require_order(p: int, allowed=(1, 2, 3, 4)) -> None:
    if p not in allowed:
        raise UnsupportedOrderError(f"order {p} is not supported (choose from {allowed})")


def geco_conditions(phi, tab: ButcherTableau, p: int, yn, h_grid, *,
                    name: str | None = None) -> ConditionReport:
    """Residuals of the GeCo order conditions for a classical order-``p``
    tableau with ``s = p`` stages (any ``s`` when ``p = 1``)."""
    _require_order(p)
    if p >= 2 and tab.s != p:
        raise UnsupportedOrderError(f"GeCo conditions for p={p} need s=p, got s={tab.s}")
    if tab.classical_order() < p:
        raise ValueError(f"tableau {tab.name!r} is not of classical order {p}")
    h = _check_grid(h_grid)
    states = _states(yn)
    bc = tab.b * tab.c
    final, wsum = np.zeros(h.size), np.zeros(h.size)
    stage = np.zeros((tab.s, h.size))
    for k, hk in enumerate(h):
        for y in states:
            phis = np.array([phi.phi(i, y, hk) for i in range(1, tab.s + 1)])
            final[k] = max(final[k], abs(phi.phi_final(y, hk) - 1.0))
            wsum[k] = max(wsum[k], abs(bc[1:] @ phis[1:] - 0.5))
            stage[:, k] = np.maximum(stage[:, k], np.abs(phis - 1.0))
    series = [ResidualSeries("phi_final", h, final, p)]
    if p >= 2:
        series.append(ResidualSeries("weighted_stage_sum", h, wsum, p - 1))
        for i in range(2, tab.s + 1):
            series.append(ResidualSeries(f"phi_stage(i={i})", h, stage[i - 1], max(p - 2, 1)))
    return ConditionReport(name or f"geco:{tab.name}", p, "geco", series)


# MPRK conditions ----------------------------------------------------------------

def mprk_conditions(scheme, p: int, yn, h_grid, *, stage_h2_factor: float = 1.0,
                    name: str | None = None, jobs: int = 1) -> ConditionReport:
    """Stage-free MPRK order conditions for ``p = 1..4``.

    * ``sigma_truncation``: ``sigma - NB_{p-1}(1/gamma, y^n)``, target ``p``.
    * ``rho_expansion(i=k)``: ``rho_k - y^n`` (p = 2, 3, target 1) or
      ``rho_k - y^n - h c_k F`` (p = 4, target 2).
    * ``weighted_stage_sum``: ``sum_i b_i c_i Y_i / rho_i - 1/2`` where ``Y_i``
      is the stage expansion ``y^n + h c_i F`` (p = 3, target 2) or
      ``y^n + h c_i F + f h^2 (A c)_i DF F`` (p = 4, target 3).

    ``f = stage_h2_factor`` defaults to 1, the coefficient of the stage
    expansion (the tree ``[.]`` has symmetry 1). ``f = 1/2`` reproduces the
    variant that is only accurate to ``O(h^2)``.
    """
    _require_order(p)
    tab = scheme.tableau
    if p == 2 and tab.s != 2:
        raise UnsupportedOrderError("the p=2 conditions assume a 2-stage tableau")
    if p >= 3 and tab.s != p:
        raise UnsupportedOrderError(f"the p={p} conditions assume s=p, got s={tab.s}")
    h = _check_grid(h_grid)
    states = _states(yn)
    pds = scheme.problem
    oracle = pds.oracle(max_order=max(p - 2, 1))
    trees = enumerate_trees(max(p - 1, 1), pds.N)
    Ac, bc = tab.A @ tab.c, tab.b * tab.c
    flux = []
    for y in states:
        F = oracle.total(y)
        G = sum(oracle.deriv(nu, y, [F]) for nu in range(1, pds.N + 1))
        flux.append((F, G))

    def at(hk):
        out = {}

        def put(key, value):
            out[key] = max(out.get(key, 0.0), float(value))

        for y, (F, G) in zip(states, flux):
            tr = scheme.step(y, hk)
            nb = nb_truncation(exact_u, oracle, y, hk, p - 1, trees)
            put("sigma_truncation", np.abs(tr.sigma - nb).max())
            for i in range(2, tab.s + 1):
                expect = y + hk * tab.c[i - 1] * F if p == 4 else y
                if p >= 2:
                    put(f"rho_expansion(i={i})", np.abs(tr.rho[i - 1] - expect).max())
            if p >= 3:
                total = np.zeros_like(y)
                for i in range(2, tab.s + 1):
                    Y = y + hk * tab.c[i - 1] * F
                    if p == 4:
                        Y = Y + stage_h2_factor * hk**2 * Ac[i - 1] * G
                    total += bc[i - 1] * Y / tr.rho[i - 1]
                put("weighted_stage_sum", np.abs(total - 0.5).max())
        return out

    rows = _map(at, list(h), jobs)
    targets = {"sigma_truncation": p, "weighted_stage_sum": p - 1}
    series = []
    for key in rows[0]:
        target = targets.get(key, 2 if p == 4 else 1)
        series.append(ResidualSeries(key, h, [r[key] for r in rows], target))
    return ConditionReport(name or _scheme_name(scheme), p, "mprk", series)


# gamma families ------------------------------------------------------------------

@dataclass
class GammaFamily:
    """``gamma^(i)_nu = g0 + x h + z h^2 + t h^3`` (arrays of shape ``(s, N)``,
    row 0 unused) and ``gamma^{n+1}_mu = 1 + w h^q``."""

    g0: np.ndarray
    x: np.ndarray
    z: np.ndarray
    t: np.ndarray
    w: np.ndarray
    q: int
    label: str = "compliant"

    def stages(self, h: float) -> np.ndarray:
        G = self.g0 + self.x * h + self.z * h**2 + self.t * h**3
        G[0] = 1.0
        return G

    def final(self, h: float) -> np.ndarray:
        return 1.0 + self.w * h**self.q


def _reduced_targets(p):
    return {"final": p, "bc": p - 1, "stage": p - 2}


def _full_targets(p):
    if p == 3:
        return {"final": 3, "bc": 2, "bc2": 1, "bac": 1}
    return {"final": 4, "bc": 3, "bc2": 2, "bac": 2, "bcac": 1, "bc3": 1, "baac": 1, "bac2": 1}


def reduced_residuals(tab: ButcherTableau, p: int, G: np.ndarray, gf: np.ndarray) -> dict:
    bc = tab.b * tab.c
    return {"final": np.abs(gf - 1).max(),
            "bc": np.abs(bc @ G - 0.5).max(),
            "stage": np.abs(G[1:] - 1).max()}


def full_residuals(tab: ButcherTableau, p: int, G: np.ndarray, gf: np.ndarray) -> dict:
    """Maxima over all color tuples of the unreduced conditions for
    ``a_ij^[v] = a_ij gamma^(i)_v`` and ``b_i^[m] = b_i gamma^{n+1}_m``."""
    A, b, c = tab.A, tab.b, tab.c
    out = {
        "final": np.abs(gf - 1).max(),
        "bc": np.abs(np.einsum("i,iv->v", b * c, G) - 1 / 2).max(),
        "bc2": np.abs(np.einsum("i,iv,ix->vx", b * c**2, G, G) - 1 / 3).max(),
        "bac": np.abs(np.einsum("ij,iv,jx->vx", b[:, None] * A * c[None, :], G, G) - 1 / 6).max(),
    }
    if p == 4:
        bcac = (b * c)[:, None] * A * c[None, :]
        out["bcac"] = np.abs(np.einsum("ij,iv,ix,je->vxe", bcac, G, G, G) - 1 / 8).max()
        out["bc3"] = np.abs(np.einsum("i,iv,ix,ie->vxe", b * c**3, G, G, G) - 1 / 4).max()
        baac = np.einsum("i,ij,jk,k->ijk", b, A, A, c)
        out["baac"] = np.abs(np.einsum("ijk,iv,jx,ke->vxe", baac, G, G, G) - 1 / 24).max()
        bac2 = b[:, None] * A * c[None, :] ** 2
        out["bac2"] = np.abs(np.einsum("ij,iv,jx,je->vxe", bac2, G, G, G) - 1 / 12).max()
    return out


def _project(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    # remove the component of each column of v along w (rows 1..s-1)
    v = v.copy()
    ww = w[1:]
    v[1:] -= np.outer(ww, ww @ v[1:]) / (ww @ ww)
    return v


# Families whose leading coefficient is tiny only reach their asymptotic rate
# below the grid, where no slope fit can see it. Drawing well-scaled leading
# terms keeps every family inside the regime the grid resolves.
LEAD_MIN = 0.2
HIGHER_SCALE = 0.25


def _leading(rng, shape, bc):
    ww = bc[1:]
    # entries the projection forces to zero (b_i c_i is the only nonzero weight)
    free = 1.0 - ww**2 / (ww @ ww) > 1e-12
    while True:
        v = _project(rng.normal(size=shape), bc)
        if np.all(np.abs(v[1:][free]) >= LEAD_MIN):
            return v


def _higher(rng, shape, bc):
    # the weighted sum sum_i b_i c_i gamma^(i) picks these up at the next power
    while True:
        v = HIGHER_SCALE * rng.normal(size=shape)
        if np.all(np.abs(bc @ v) >= LEAD_MIN * HIGHER_SCALE * np.abs(bc).max()):
            return v


def random_family(tab: ButcherTableau, p: int, rng: np.random.Generator, N: int = 2,
                  violation: str | None = None) -> GammaFamily:
    """Random gamma family that satisfies the reduced conditions, or breaks
    exactly one of them when ``violation`` is ``"final"``, ``"bc"`` or
    ``"stage"``. Violations of ``bc``/``stage`` keep the other reduced
    conditions intact, so only the broken one distinguishes them."""
    s = tab.s
    bc = tab.b * tab.c
    shape = (s, N)
    g0 = np.ones(shape)
    lead = _leading(rng, shape, bc)
    rest = [_higher(rng, shape, bc) for _ in range(2)]
    w = rng.normal(size=N)
    w += np.sign(w) * 0.5  # keep the leading coefficient away from zero
    q = p
    if p == 3:
        x, (z, t) = lead, rest
    else:
        x, z, t = np.zeros(shape), lead, rest[1]
    if violation == "final":
        q = p - 1
    elif violation == "bc":
        kick = np.zeros(shape)
        kick[1:] = np.outer(bc[1:], np.sign(rng.normal(size=N)) * rng.uniform(1, 2, N))
        if p == 3:
            x = x + kick
        else:
            z = z + kick
    elif violation == "stage":
        if p == 4 and rng.random() < 0.5:
            x = _leading(rng, shape, bc)
        else:
            # constant offset orthogonal to b*c: the limit of gamma is not 1
            g0 = 1.0 + _leading(rng, shape, bc)
    elif violation is not None:
        raise ValueError(f"unknown violation {violation!r}")
    return GammaFamily(g0, x, z, t, w, q, violation or "compliant")


def family_reports(tab: ButcherTableau, p: int, fam: GammaFamily, h_grid) -> tuple:
    h = _check_grid(h_grid)
    full = {k: [] for k in _full_targets(p)}
    red = {k: [] for k in _reduced_targets(p)}
    for hk in h:
        G, gf = fam.stages(hk), fam.final(hk)
        for k, v in full_residuals(tab, p, G, gf).items():
            full[k].append(v)
        for k, v in reduced_residuals(tab, p, G, gf).items():
            red[k].append(v)
    ft, rt = _full_targets(p), _reduced_targets(p)
    return (ConditionReport(fam.label, p, "full", [ResidualSeries(k, h, v, ft[k]) for k, v in full.items()]),
            ConditionReport(fam.label, p, "reduced", [ResidualSeries(k, h, v, rt[k]) for k, v in red.items()]))


@dataclass
class SpotCheckReport:
    tableau: str
    p: int
    compliant: int
    compliant_full_pass: int
    compliant_reduced_pass: int
    noncompliant: int
    noncompliant_full_trip: int
    noncompliant_reduced_trip: int
    failures: list

    @property
    def passed(self) -> bool:
        return (self.compliant_full_pass == self.compliant
                and self.noncompliant_full_trip == self.noncompliant)

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()} | {"passed": self.passed}


def appendixB_spotcheck(tab: ButcherTableau, p: int, trials: int = 100, seed: int = 0, *,
                        N: int = 2, h_grid=None) -> SpotCheckReport:
    """Randomized check that the reduced and full gamma conditions agree.

    ``trials`` compliant families must pass every full condition at its
    target and ``trials`` non-compliant ones (cycling through the three
    kinds of violation) must fail at least one.
    """
    _require_order(p, (3, 4))
    if tab.s != p or tab.classical_order() < p:
        raise ValueError(f"need an explicit {p}-stage tableau of order {p}")
    h = geometric_grid() if h_grid is None else h_grid
    rng = np.random.default_rng(seed)
    kinds = itertools.cycle(["final", "bc", "stage"])
    counts = dict(cfull=0, cred=0, nfull=0, nred=0)
    failures = []
    for n in range(trials):
        full, red = family_reports(tab, p, random_family(tab, p, rng, N), h)
        counts["cfull"] += full.passed
        counts["cred"] += red.passed
        if not full.passed:
            failures.append({"trial": n, "label": "compliant", "failing": full.failing()})
        kind = next(kinds)
        full, red = family_reports(tab, p, random_family(tab, p, rng, N, kind), h)
        counts["nfull"] += not full.passed
        counts["nred"] += not red.passed
        if full.passed:
            failures.append({"trial": n, "label": kind, "failing": []})
    return SpotCheckReport(tab.name, p, trials, counts["cfull"], counts["cred"],
                           trials, counts["nfull"], counts["nred"], failures)


__all__ = [
    "FLOOR", "SLOPE_SLACK", "GridTooCoarseError", "UnsupportedOrderError",
    "geometric_grid", "fit_slope", "SlopeFit", "ResidualSeries", "ConditionReport",
    "evaluation_states", "u_residuals", "empirical_order", "OrderEstimate",
    "geco_conditions", "mprk_conditions", "GammaFamily", "random_family",
    "full_residuals", "reduced_residuals", "family_reports", "appendixB_spotcheck",
    "SpotCheckReport",
]
