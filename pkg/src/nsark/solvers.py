"""Time steppers: explicit RK, MPRK and GeCo, all exporting the numeric
NSARK coefficients they realize in each step."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .nbseries import CoefficientProvider
from .pds import PDS, SplitRHS
from .tableaux import ButcherTableau


class SingularStageError(ArithmeticError):
    """A Patankar stage system could not be solved (weight rule violation)."""


class NonPositiveStateError(ValueError):
    pass


@dataclass
class StepTrace:
    """One step: input, stages, output and the realized NSARK coefficients."""

    yn: np.ndarray
    h: float
    stages: np.ndarray  # (s, d)
    y_next: np.ndarray
    coeffs: CoefficientProvider
    rho: np.ndarray | None = None  # (s, N) Patankar weights, row 0 unused
    sigma: np.ndarray | None = None
    phi: np.ndarray | None = None  # (s,) GeCo stage scalings
    phi_final: float | None = None


@dataclass
class Replay:
    """NSARK update rebuilt from a trace. ``scale`` holds, per entry, the
    magnitude ``|y^n| + sum |h a F|`` of the summed terms: the natural unit
    for comparing the rebuilt values against the stepper's."""

    stages: np.ndarray
    y_next: np.ndarray
    stage_scale: np.ndarray
    scale: np.ndarray

    def error(self, trace: StepTrace) -> float:
        """Largest deviation from ``trace`` in units of the term magnitude."""
        tiny = np.finfo(float).tiny
        return float(max((np.abs(self.stages - trace.stages) / np.maximum(self.stage_scale, tiny)).max(),
                         (np.abs(self.y_next - trace.y_next) / np.maximum(self.scale, tiny)).max()))


def replay(trace: StepTrace, components: Callable[[int, np.ndarray], np.ndarray]) -> Replay:
    """Rebuild stages and output from the realized coefficients alone.

    ``components(nu, y)`` returns ``F^[nu](y)``. The right-hand sides are
    evaluated at the recorded stages, so every stage equation is checked on
    its own; feeding rebuilt stages forward would amplify rounding by
    ``h |a| L``, which is huge for Patankar coefficients at large ``h``.
    """
    co = trace.coeffs
    h, yn = trace.h, np.asarray(trace.yn, dtype=float)
    F = np.array([[np.asarray(components(nu + 1, y), dtype=float) for nu in range(co.N)]
                  for y in trace.stages])  # (s, N, d)
    absF = np.abs(F)

    def combine(w):  # w: (N, s) weights of one stage or the output
        terms = h * np.einsum("vj,jvd->d", w, F)
        mag = abs(h) * np.einsum("vj,jvd->d", np.abs(w), absF)
        return yn + terms, np.abs(yn) + mag

    rows = [combine(co.A[:, i, :]) for i in range(co.s)]
    y_next, scale = combine(co.b)
    return Replay(np.array([r[0] for r in rows]), y_next, np.array([r[1] for r in rows]), scale)


def _require_explicit(tab: ButcherTableau) -> None:
    if not tab.is_explicit:
        raise ValueError(f"tableau {tab.name!r} is not explicit")


# classical RK -----------------------------------------------------------------

def rk_step(tab: ButcherTableau, rhs: Callable, yn, h: float) -> StepTrace:
    _require_explicit(tab)
    yn = np.asarray(yn, dtype=float)
    stages = np.empty((tab.s, yn.size))
    K = np.empty_like(stages)
    for i in range(tab.s):
        stages[i] = yn + h * (tab.A[i, :i] @ K[:i])
        K[i] = rhs(stages[i])
    y_next = yn + h * (tab.b @ K)
    return StepTrace(yn, h, stages, y_next, CoefficientProvider(tab.A, tab.b))


# MPRK ----------------------------------------------------------------------------

@dataclass
class PatankarContext:
    """What a weight rule may look at: ``y^n``, ``h`` and finished stages."""

    yn: np.ndarray
    h: float
    stages: list
    tableau: ButcherTableau
    pds: PDS
    _cache: dict = field(default_factory=dict, repr=False)

    def stage(self, k: int) -> np.ndarray:
        """Stage ``k`` (1-based); only stages already computed are visible."""
        if not 1 <= k <= len(self.stages):
            raise IndexError(f"stage {k} is not available yet")
        return self.stages[k - 1]

    def flux(self) -> tuple[np.ndarray, np.ndarray]:
        """``F(y^n)`` and ``DF(y^n) F(y^n)``."""
        if "flux" not in self._cache:
            oracle = self.pds.oracle(max_order=1)
            F = oracle.total(self.yn)
            G = sum(oracle.deriv(nu, self.yn, [F]) for nu in range(1, oracle.N + 1))
            self._cache["flux"] = (F, G)
        return self._cache["flux"]


class WeightRule:
    kind = ""

    def to_dict(self) -> dict:
        return {"rule": self.kind, **self.__dict__}


class RhoPrev(WeightRule):
    """rho_i = y^n."""

    kind = "rho_prev"

    def __call__(self, ctx: PatankarContext, i: int):
        return ctx.yn


class RhoStage(WeightRule):
    """rho_i = y^(k) for a fixed earlier stage k < i."""

    kind = "rho_stage"

    def __init__(self, k: int):
        self.k = k

    def __call__(self, ctx, i):
        if self.k >= i:
            raise ValueError(f"rho for stage {i} cannot use stage {self.k}")
        return ctx.stage(self.k)


class RhoGeometric(WeightRule):
    """rho_i = y^n * (y^(k) / y^n) ** q, a weighted geometric mean."""

    kind = "rho_geometric"

    def __init__(self, k: int, q: float):
        self.k = k
        self.q = q

    def __call__(self, ctx, i):
        if self.k >= i:
            raise ValueError(f"rho for stage {i} cannot use stage {self.k}")
        return ctx.yn * (ctx.stage(self.k) / ctx.yn) ** self.q


# |exponent| cap for RhoExpansion; only reached far outside the asymptotic
# regime (large h or stiff states) and keeps the weights finite and positive
EXPONENT_CAP = 64.0


class RhoExpansion(WeightRule):
    """rho_i = y^n exp(h l_i F/y^n + h^2 (k_i G/y^n - (l_i F/y^n)^2 / 2)).

    Positive for every h and equal to ``y^n + h l_i F + h^2 k_i G + O(h^3)``
    with ``F = F(y^n)``, ``G = DF(y^n) F(y^n)``. ``first``/``second`` hold
    ``l_i``/``k_i`` for stages 1..s. The exponent is clipped to
    ``+-EXPONENT_CAP``.
    """

    kind = "rho_expansion"

    def __init__(self, first: Sequence[float], second: Sequence[float] | None = None):
        self.first = [float(x) for x in first]
        self.second = [0.0] * len(self.first) if second is None else [float(x) for x in second]

    def __call__(self, ctx, i):
        F, G = ctx.flux()
        y, h = ctx.yn, ctx.h
        lin = self.first[i - 1] * F / y
        expo = h * lin + h * h * (self.second[i - 1] * G / y - 0.5 * lin**2)
        return y * np.exp(np.clip(expo, -EXPONENT_CAP, EXPONENT_CAP))


class SigmaYn(WeightRule):
    """sigma = y^n."""

    kind = "sigma_yn"

    def __call__(self, ctx):
        return ctx.yn


class SigmaStage(WeightRule):
    kind = "sigma_stage"

    def __init__(self, k: int):
        self.k = k

    def __call__(self, ctx):
        return ctx.stage(self.k)


class SigmaAux(WeightRule):
    """sigma = output of an auxiliary (lower order) MPRK step from y^n."""

    kind = "sigma_aux"

    def __init__(self, scheme: "MPRKScheme"):
        self.scheme = scheme

    def __call__(self, ctx):
        return mprk_step(self.scheme.tableau, ctx.pds, self.scheme.weights, ctx.yn, ctx.h).y_next

    def to_dict(self):
        return {"rule": self.kind, "scheme": self.scheme.to_dict()}


@dataclass
class PatankarWeights:
    """Weight rules: ``rho[i-1]`` for stage ``i`` (entry 0 is ignored since
    the first stage has no inflow) and one ``sigma`` rule."""

    rho: Sequence[WeightRule]
    sigma: WeightRule

    @classmethod
    def uniform(cls, s: int, rho: WeightRule, sigma: WeightRule) -> "PatankarWeights":
        return cls([rho] * s, sigma)

    def to_dict(self) -> dict:
        return {"rho": [r.to_dict() for r in self.rho], "sigma": self.sigma.to_dict()}


def mprk_step(tab: ButcherTableau, pds: PDS, w: PatankarWeights, yn, h: float) -> StepTrace:
    """One modified Patankar-Runge-Kutta step.

    Each stage solves ``M y^(i) = y^n`` where ``M`` has positive diagonal,
    non-positive off-diagonal and unit column sums, so the stages are
    positive and mass is conserved for every ``h >= 0``.
    """
    _require_explicit(tab)
    if not tab.is_nonnegative:
        raise ValueError(f"tableau {tab.name!r} has negative entries")
    yn = np.asarray(yn, dtype=float)
    if np.any(yn <= 0):
        raise NonPositiveStateError(f"state must be positive, got {yn}")
    s, N = tab.s, pds.N
    ctx = PatankarContext(yn, h, [], tab, pds)
    rho = np.ones((s, N))
    rho[0] = yn
    stages = np.empty((s, N))
    prods = []
    for i in range(s):
        if i == 0:
            y = yn.copy()
        else:
            rho[i] = w.rho[i](ctx, i + 1)
            P = sum(tab.A[i, j] * prods[j] for j in range(i) if tab.A[i, j] != 0.0)
            y = _patankar_solve(P, rho[i], h, yn) if isinstance(P, np.ndarray) else yn.copy()
        stages[i] = y
        ctx.stages.append(y)
        prods.append(pds.production(y))
    sigma = np.asarray(w.sigma(ctx), dtype=float)
    P = sum(tab.b[j] * prods[j] for j in range(s) if tab.b[j] != 0.0)
    y_next = _patankar_solve(P, sigma, h, yn)

    A_real = tab.A[None, :, :] * (stages / rho).T[:, :, None]
    b_real = tab.b[None, :] * (y_next / sigma)[:, None]
    return StepTrace(yn, h, stages, y_next, CoefficientProvider(A_real, b_real),
                     rho=rho, sigma=sigma)


def _patankar_solve(P, weights, h, rhs):
    if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        raise SingularStageError(f"Patankar weights must be positive, got {weights}")
    M = _kernels.patankar_matrix(P, weights, h)
    try:
        return _kernels.solve_patankar(M, rhs)
    except _kernels.SingularSystemError as exc:
        raise SingularStageError(str(exc)) from exc


# GeCo -------------------------------------------------------------------------

class PhiFamily:
    """Scalar function of ``(y^n, h)`` that tends to 1 as h -> 0."""

    kind = ""

    def __call__(self, yn, h: float) -> float:
        raise NotImplementedError

    def to_dict(self):
        return {"family": self.kind, **self.__dict__}


class PhiOne(PhiFamily):
    kind = "one"

    def __call__(self, yn, h):
        return 1.0


class PhiRational(PhiFamily):
    """1 / (1 + alpha h^k)."""

    kind = "rational"

    def __init__(self, alpha: float = 1.0, k: int = 1):
        self.alpha = alpha
        self.k = k

    def __call__(self, yn, h):
        return 1.0 / (1.0 + self.alpha * h**self.k)


class PhiExp(PhiFamily):
    """exp(alpha h^k)."""

    kind = "exp"

    def __init__(self, alpha: float = -1.0, k: int = 1):
        self.alpha = alpha
        self.k = k

    def __call__(self, yn, h):
        try:
            return math.exp(self.alpha * h**self.k)
        except OverflowError:
            raise ValueError(f"exp({self.alpha} h^{self.k}) overflows at h={h}") from None


PHI_FAMILIES = {cls.kind: cls for cls in (PhiOne, PhiRational, PhiExp)}


def phi_from_dict(spec) -> PhiFamily:
    if spec is None:
        return PhiOne()
    spec = dict(spec)
    return PHI_FAMILIES[spec.pop("family")](**spec)


@dataclass
class GecoPhi:
    """Stage scalings ``phi_i`` (i = 2..s; stage 1 is unaffected and fixed to
    1) and the output scaling ``phi_{n+1}``."""

    stages: Sequence[PhiFamily]
    final: PhiFamily

    def phi(self, i: int, yn, h: float) -> float:
        if i == 1:
            return 1.0
        return float(self.stages[i - 2](yn, h))

    def phi_final(self, yn, h: float) -> float:
        return float(self.final(yn, h))

    @classmethod
    def identity(cls, s: int) -> "GecoPhi":
        return cls([PhiOne()] * (s - 1), PhiOne())

    def to_dict(self):
        return {"stages": [p.to_dict() for p in self.stages], "final": self.final.to_dict()}

    @classmethod
    def from_dict(cls, spec) -> "GecoPhi":
        return cls([phi_from_dict(p) for p in spec.get("stages", [])],
                   phi_from_dict(spec.get("final")))


def geco_step(tab: ButcherTableau, rhs: Callable, phi: GecoPhi, yn, h: float) -> StepTrace:
    _require_explicit(tab)
    yn = np.asarray(yn, dtype=float)
    phis = np.array([phi.phi(i, yn, h) for i in range(1, tab.s + 1)])
    pf = phi.phi_final(yn, h)
    stages = np.empty((tab.s, yn.size))
    K = np.empty_like(stages)
    for i in range(tab.s):
        stages[i] = yn + phis[i] * h * (tab.A[i, :i] @ K[:i])
        K[i] = rhs(stages[i])
    y_next = yn + pf * h * (tab.b @ K)
    coeffs = CoefficientProvider(tab.A * phis[:, None], tab.b * pf)
    return StepTrace(yn, h, stages, y_next, coeffs, phi=phis, phi_final=pf)


# scheme objects and time integration -------------------------------------------

class Scheme:
    """A stepper bound to a problem: ``step(yn, h) -> StepTrace``."""

    kind = ""
    tableau: ButcherTableau
    problem: PDS

    def step(self, yn, h: float) -> StepTrace:
        raise NotImplementedError

    def components(self):
        """``(nu, y) -> F^[nu](y)`` matching the realized coefficients' colors."""
        raise NotImplementedError


@dataclass
class RKScheme(Scheme):
    tableau: ButcherTableau
    problem: PDS
    kind = "rk"

    def step(self, yn, h):
        return rk_step(self.tableau, self.problem.rhs, yn, h)

    def components(self):
        return lambda nu, y: self.problem.rhs(y)

    def to_dict(self):
        return {"kind": self.kind, "tableau": self.tableau.to_dict()}


@dataclass
class GecoScheme(Scheme):
    tableau: ButcherTableau
    problem: PDS
    phi: GecoPhi
    kind = "geco"

    def step(self, yn, h):
        return geco_step(self.tableau, self.problem.rhs, self.phi, yn, h)

    def components(self):
        return lambda nu, y: self.problem.rhs(y)

    def to_dict(self):
        return {"kind": self.kind, "tableau": self.tableau.to_dict(), "phi": self.phi.to_dict()}


@dataclass
class MPRKScheme(Scheme):
    tableau: ButcherTableau
    weights: PatankarWeights
    problem: PDS | None = None
    kind = "mprk"

    def bind(self, problem: PDS) -> "MPRKScheme":
        return MPRKScheme(self.tableau, self.weights, problem)

    def step(self, yn, h):
        return mprk_step(self.tableau, self.problem, self.weights, yn, h)

    def components(self):
        return SplitRHS(self.problem)

    def to_dict(self):
        return {"kind": self.kind, "tableau": self.tableau.to_dict(),
                "weights": self.weights.to_dict()}


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    traces: list
    min_component: float
    max_mass_drift: float  # max |sum y^{n+1} - sum y^n| / sum y^n over steps


def integrate(scheme: Scheme, y0, t_end: float, h: float, keep_traces: bool = False) -> Trajectory:
    """Fixed-step integration; the last step is shortened to land on ``t_end``."""
    if h <= 0:
        raise ValueError("h must be positive")
    y = np.asarray(y0, dtype=float)
    times, states, traces = [0.0], [y], []
    t = 0.0
    drift = 0.0
    lowest = float(y.min())
    n_full = int(math.floor(t_end / h * (1 + 1e-12)))
    steps = [h] * n_full
    rest = t_end - n_full * h
    if rest > 1e-12 * max(1.0, t_end):
        steps.append(rest)
    for dt in steps:
        tr = scheme.step(y, dt)
        m0 = y.sum()
        drift = max(drift, abs(tr.y_next.sum() - m0) / abs(m0) if m0 != 0 else 0.0)
        lowest = min(lowest, float(tr.stages.min()), float(tr.y_next.min()))
        y = tr.y_next
        t += dt
        times.append(t)
        states.append(y)
        if keep_traces:
            traces.append(tr)
    return Trajectory(np.array(times), np.array(states), traces, lowest, drift)


def global_error(scheme: Scheme, t_end: float, h: float, reference=None) -> float:
    """Max-norm error at ``t_end`` against :func:`nsark.pds.reference_solution`."""
    from .pds import reference_solution

    pds = scheme.problem
    if reference is None:
        reference = reference_solution(pds, pds.y0, t_end)
    traj = integrate(scheme, pds.y0, t_end, h)
    return float(np.abs(traj.states[-1] - reference).max())


# standard MPRK configurations ---------------------------------------------------

def mpe() -> MPRKScheme:
    """Modified Patankar-Euler: sigma = y^n."""
    from .tableaux import euler

    return MPRKScheme(euler, PatankarWeights([RhoPrev()], SigmaYn()))


def mprk22() -> MPRKScheme:
    """Heun-based second order MPRK: rho_2 = y^n, sigma from a Patankar-Euler
    predictor."""
    from .tableaux import heun

    return MPRKScheme(heun, PatankarWeights([RhoPrev(), RhoPrev()], SigmaAux(mpe())))


def mprk22_first_order() -> MPRKScheme:
    """Heun tableau with sigma = y^n: only first order."""
    from .tableaux import heun

    return MPRKScheme(heun, PatankarWeights([RhoPrev(), RhoPrev()], SigmaYn()))


def mprk43() -> MPRKScheme:
    """Third order MPRK on Heun's 3-stage tableau.

    rho_3 = y^n (y^(2)/y^n)^q with q = 1/(3 b_3 c_2 c_3) = 2 gives
    rho_3 = y^n + h c_3 F + O(h^2); sigma comes from an MPRK22 step.
    """
    from .tableaux import heun3

    return MPRKScheme(heun3, PatankarWeights([RhoPrev(), RhoPrev(), RhoGeometric(2, 2.0)],
                                             SigmaAux(mprk22())))


def _rk4_second():
    from .tableaux import rk4

    return [float(x) for x in rk4.A @ rk4.c]


def mprk4_expansion() -> MPRKScheme:
    """Fourth order MPRK test configuration on classical RK4.

    rho_i follows the stage expansion y^n + h c_i F + h^2 (A c)_i DF F, sigma
    comes from a third-order MPRK step. The rho rule evaluates DF F, so it is
    a verification device rather than a practical scheme.
    """
    from .tableaux import rk4

    rho = RhoExpansion(list(rk4.c), _rk4_second())
    return MPRKScheme(rk4, PatankarWeights([rho] * 4, SigmaAux(mprk43())))


def mprk4_shifted_rho() -> MPRKScheme:
    """Like :func:`mprk4_expansion` but with rho_i = y^n + (2/3) h F + ...

    The shift delta = (0, 1/6, 1/6, -1/3) satisfies sum b_i c_i delta_i = 0 and
    sum b_i c_i (c_i + delta_i) delta_i = 0, so the weighted stage sum still
    holds to O(h^3) while rho_i = y^n + h c_i F + O(h^2) fails.
    """
    from .tableaux import rk4

    first = [0.0, 2 / 3, 2 / 3, 2 / 3]
    rho = RhoExpansion(first, _rk4_second())
    return MPRKScheme(rk4, PatankarWeights([rho] * 4, SigmaAux(mprk43())))


def mprk4_rho_prev() -> MPRKScheme:
    """RK4 with rho_i = y^n: violates the rho expansion and the weighted sum."""
    from .tableaux import rk4

    return MPRKScheme(rk4, PatankarWeights([RhoPrev()] * 4, SigmaAux(mprk43())))


# JSON configs -------------------------------------------------------------------

def weight_rule_from_dict(spec: dict) -> WeightRule:
    spec = dict(spec)
    kind = spec.pop("rule")
    if kind == "rho_prev":
        return RhoPrev()
    if kind == "rho_stage":
        return RhoStage(int(spec["k"]))
    if kind == "rho_geometric":
        return RhoGeometric(int(spec["k"]), float(spec["q"]))
    if kind == "rho_expansion":
        return RhoExpansion(spec["first"], spec.get("second"))
    if kind == "sigma_yn":
        return SigmaYn()
    if kind == "sigma_stage":
        return SigmaStage(int(spec["k"]))
    if kind in ("sigma_aux", "sigma_predictor"):
        aux = spec.get("scheme")
        return SigmaAux(mpe() if aux is None else scheme_from_dict(aux))
    raise ValueError(f"unknown weight rule {kind!r}")


def scheme_from_dict(spec: dict, problem: PDS | None = None) -> Scheme:
    """Build a scheme from its JSON description (see README for the schema)."""
    from .tableaux import ButcherTableau

    kind = spec["kind"]
    tab = ButcherTableau.from_dict(spec["tableau"])
    if kind == "rk":
        return RKScheme(tab, problem)
    if kind == "geco":
        return GecoScheme(tab, problem, GecoPhi.from_dict(spec.get("phi", {})))
    if kind == "mprk":
        w = spec["weights"]
        rho = w.get("rho", {"rule": "rho_prev"})
        rules = ([weight_rule_from_dict(r) for r in rho] if isinstance(rho, list)
                 else [weight_rule_from_dict(rho)] * tab.s)
        if len(rules) != tab.s:
            raise ValueError(f"need {tab.s} rho rules, got {len(rules)}")
        return MPRKScheme(tab, PatankarWeights(rules, weight_rule_from_dict(w["sigma"])), problem)
    raise ValueError(f"unknown scheme kind {kind!r}")


__all__ = [
    "StepTrace", "Replay", "replay", "rk_step", "mprk_step", "geco_step", "integrate",
    "global_error", "PatankarContext", "PatankarWeights", "RhoPrev", "RhoStage",
    "RhoGeometric", "RhoExpansion", "SigmaYn", "SigmaStage", "SigmaAux",
    "GecoPhi", "PhiOne", "PhiRational", "PhiExp", "RKScheme", "GecoScheme",
    "MPRKScheme", "Trajectory", "SingularStageError", "NonPositiveStateError",
    "mpe", "mprk22", "mprk22_first_order", "mprk43", "mprk4_expansion",
    "mprk4_shifted_rho", "mprk4_rho_prev", "scheme_from_dict",
]
