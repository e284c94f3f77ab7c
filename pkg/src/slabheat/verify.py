"""Property battery run by ``slabheat verify``.

Each check measures one identity the solver must satisfy and compares the
worst case against a fixed threshold. Checks never raise; an arithmetic
failure inside a check (overflow, inf - inf) is reported as a failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import odes
from .domain import EvalPoint, SlabProblem
from .heat_operator import HeatOperatorStencil, check_linearity, check_scaling
from .series import (
    SeriesSolution,
    d2dx2,
    ddt,
    ddx,
    evaluate,
    tail_bound,
    truncate,
)

BOUNDARY_TIMES = (0.0, 0.01, 0.1, 1.0)
TAIL_N = (4, 8, 16, 32)
TAIL_T_MIN = 0.05
TAIL_TIMES = (0.05, 0.1, 0.5)
RECOVERY_N = (8, 16, 32, 64)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}: measured={self.measured:.3e} threshold={self.threshold:.3e}{extra}"


@dataclass(frozen=True)
class Sabotage:
    """Deliberate faults used to show the battery can fail.

    ``flip_mode`` negates ``B_w`` for that mode; ``break_decay`` turns the
    exponential decay into growth.
    """

    flip_mode: int | None = None
    break_decay: bool = False

    def apply(self, sol: SeriesSolution) -> SeriesSolution:
        if self.flip_mode is not None and self.flip_mode <= sol.n_modes:
            w = self.flip_mode
            sol = replace(sol, coeffs=sol.coeffs.replace_coefficient(w, -sol.coeffs.coeffs[w - 1]))
        if self.break_decay:
            sol = replace(sol, _decay_sign=1.0)
        return sol


def _check(name: str, threshold: float, fn: Callable[[], tuple[float, str]]) -> CheckResult:
    try:
        with np.errstate(all="ignore"):
            measured, detail = fn()
    except (ArithmeticError, ValueError) as exc:
        return CheckResult(name, False, math.nan, threshold, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, bool(measured <= threshold), float(measured), threshold, detail)


def _spatial_residuals(rng: np.random.Generator, n: int = 1000) -> tuple[float, str]:
    worst = 0.0
    for _ in range(n):
        A, B = rng.uniform(-10, 10, 2)
        beta = rng.uniform(0, 50)
        x = rng.uniform(-5, 5)
        s = odes.SpatialSolution(A, B, beta)
        scale = 1e-10 * (1 + beta * beta) * (abs(A) + abs(B))
        worst = max(worst, abs(odes.spatial_ode_residual(s, x)) / scale)
    return worst, "max |X'' + beta^2 X| / (1e-10 (1+beta^2)(|A|+|B|))"


def _temporal_residuals(rng: np.random.Generator, n: int = 1000) -> tuple[float, str]:
    worst = 0.0
    for _ in range(n):
        C = rng.uniform(-10, 10)
        beta = rng.uniform(0, 50)
        c = rng.uniform(0.01, 5)
        t = rng.uniform(0, 2)
        s = odes.TemporalSolution(C, beta, c)
        scale = 1e-10 * (1 + c * beta * beta) * abs(C)
        worst = max(worst, abs(odes.temporal_ode_residual(s, t)) / scale)
    return worst, "max |W' + c beta^2 W| / (1e-10 (1+c beta^2)|C|)"


def _eigenpairs(L: float, n_modes: int) -> tuple[float, str]:
    worst = 0.0
    for w in range(1, n_modes + 1):
        beta = odes.eigenvalue(w, L).beta_w
        elim = odes.apply_boundary_conditions(1.0, beta, L)
        if not elim.is_nontrivial_eigenpair or elim.A != 0.0:
            return math.inf, f"mode {w} not an eigenpair"
        X = odes.SpatialSolution(0.0, 1.0, beta)
        scale = 1e-12 * beta * L
        worst = max(worst, abs(X(0.0)) / scale, abs(X(L)) / scale)
    return worst, "max |X(0)|, |X(L)| / (1e-12 beta L)"


def field_battery(c: float, sol: SeriesSolution):
    """Pairs of smooth test fields for the operator checks."""
    lam = math.pi**2 * c

    def mode(x, t):
        return math.exp(-lam * t) * math.sin(math.pi * x)

    def square(x, t):
        return x * x

    def const(x, t):
        return 7.0

    def wave(x, t):
        return math.sin(2.0 * x + 3.0 * t)

    def cubic(x, t):
        return x**3 * t + math.exp(x) * math.cos(t)

    def series(x, t):
        return evaluate(sol, EvalPoint(x, t))[0]

    return [
        (mode, square),
        (const, wave),
        (mode, mode),
        (cubic, series),
        (wave, square),
        (series, mode),
    ]


def _operator(kind: str, c: float, L: float, sol: SeriesSolution, rng: np.random.Generator) -> tuple[float, str]:
    worst = 0.0
    for u, v in field_battery(c, sol):
        for _ in range(5):
            p = EvalPoint(float(rng.uniform(0.1, 0.9) * L), float(rng.uniform(0.05, 1.0)))
            st = HeatOperatorStencil.default(p.t, L)
            if kind == "linearity":
                reports = [check_linearity(u, v, p, c, st, L)]
            else:
                reports = [check_scaling(u, a, p, c, st, L) for a in (0.0, 1.0, -3.5, 1e3)]
            for r in reports:
                worst = max(worst, r.abs_diff / (1e-10 * (1.0 + r.scale)))
    return worst, "max |lhs - rhs| / (1e-10 (1 + stencil magnitude))"


def _boundaries(sol: SeriesSolution) -> tuple[float, str]:
    L = sol.problem.length
    worst = max(
        abs(evaluate(sol, EvalPoint(x, t))[0]) for x in (0.0, L) for t in BOUNDARY_TIMES
    )
    return worst, "max |u(0,t)|, |u(L,t)|"


def _random_points(rng: np.random.Generator, L: float, n: int, t_lo: float, margin: float = 0.0):
    xs = rng.uniform(margin, L - margin, n)
    ts = rng.uniform(t_lo, 1.0, n)
    return [EvalPoint(float(x), float(t)) for x, t in zip(xs, ts)]


def _pde_identity(sol: SeriesSolution, rng: np.random.Generator) -> tuple[float, str]:
    c = sol.problem.diffusivity
    worst = 0.0
    for p in _random_points(rng, sol.problem.length, 100, 1e-3):
        dt = ddt(sol, p)
        worst = max(worst, abs(dt - c * d2dx2(sol, p)) / (1e-12 * (1.0 + abs(dt))))
    return worst, "max |ddt - c d2dx2| / (1e-12 (1 + |ddt|))"


def _tail_soundness(sol: SeriesSolution) -> tuple[float, str]:
    L = sol.problem.length
    xs = np.linspace(0.0, L, 101)
    worst = 0.0
    for N in TAIL_N:
        if 2 * N > sol.n_modes:
            continue
        lo, hi = truncate(sol, N), truncate(sol, 2 * N)
        bound = sol.tail_bound(N, TAIL_T_MIN).bound
        for t in TAIL_TIMES:
            for x in xs:
                p = EvalPoint(float(x), t)
                gap = abs(evaluate(hi, p)[0] - evaluate(lo, p)[0])
                if gap > bound:
                    return gap / max(bound, 1e-300), f"N={N} t={t} x={x:.3g} gap={gap:.3e} > bound={bound:.3e}"
                if bound > 0:
                    worst = max(worst, gap / bound)
    return worst, "max |u_2N - u_N| / tail_bound(N)"


def _derivatives(sol: SeriesSolution, rng: np.random.Generator) -> tuple[float, str]:
    h1, h2 = 1e-5, 1e-4

    def u(x, t):
        return evaluate(sol, EvalPoint(x, t))[0]

    worst = 0.0
    for p in _random_points(rng, sol.problem.length, 50, 0.05, margin=2 * h2):
        x, t = p.x, p.t
        fd_t = (u(x, t + h1) - u(x, t - h1)) / (2 * h1)
        fd_x = (u(x + h1, t) - u(x - h1, t)) / (2 * h1)
        fd_xx = (u(x + h2, t) - 2 * u(x, t) + u(x - h2, t)) / (h2 * h2)
        worst = max(
            worst,
            abs(ddt(sol, p) - fd_t),
            abs(ddx(sol, p) - fd_x),
            abs(d2dx2(sol, p) - fd_xx),
        )
    return worst, "max |termwise - central difference|"


def recovery_rms(sol: SeriesSolution, N: int) -> float:
    L = sol.problem.length
    f = sol.problem.initial_profile
    xs = np.linspace(0.0, L, 101)
    s = truncate(sol, N)
    err = np.array([evaluate(s, EvalPoint(float(x), 0.0))[0] for x in xs]) - f.value(xs, L)
    return float(np.sqrt(np.mean(err * err)))


def _recovery(sol: SeriesSolution) -> tuple[float, str]:
    ns = [n for n in RECOVERY_N if n <= sol.n_modes]
    rms = [recovery_rms(sol, n) for n in ns]
    detail = ", ".join(f"N={n}: {r:.2e}" for n, r in zip(ns, rms))
    if any(b >= a for a, b in zip(rms, rms[1:])):
        return math.inf, "RMS not decreasing: " + detail
    return rms[-1], detail


def run_battery(
    problem: SlabProblem,
    n_modes: int = 64,
    seed: int = 0,
    sabotage: Sabotage | None = None,
) -> list[CheckResult]:
    """Build the series for ``problem`` and run every check in order."""
    rng = np.random.default_rng(seed)
    sol = SeriesSolution.build(problem, n_modes)
    if sabotage is not None:
        sol = sabotage.apply(sol)
    L, c = problem.length, problem.diffusivity
    return [
        _check("ode_spatial_residual", 1.0, lambda: _spatial_residuals(rng)),
        _check("ode_temporal_residual", 1.0, lambda: _temporal_residuals(rng)),
        _check("boundary_constants", 1.0, lambda: _eigenpairs(L, n_modes)),
        _check("operator_linearity", 1.0, lambda: _operator("linearity", c, L, sol, rng)),
        _check("operator_scaling", 1.0, lambda: _operator("scaling", c, L, sol, rng)),
        _check("series_boundary_conditions", 1e-12, lambda: _boundaries(sol)),
        _check("termwise_pde_identity", 1.0, lambda: _pde_identity(sol, rng)),
        _check("tail_bound_soundness", 1.0, lambda: _tail_soundness(sol)),
        _check("derivative_fd_agreement", 1e-5, lambda: _derivatives(sol, rng)),
        _check("initial_condition_recovery", 1e-3, lambda: _recovery(sol)),
    ]
