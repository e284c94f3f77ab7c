"""Truncated sine-series solution with a certified tail bound.

``u_N(x, t) = sum_{w=1}^{N} B_w sin(w pi x / L) exp(-c (w pi / L)^2 t)``

Every mode is bounded independently of ``x`` by
``M_w = K exp(-c (w pi / L)^2 t)`` with ``K = (2/L) integral |f|``. For
``w >= N + 1`` we have ``w^2 >= (N + 1) w``, so for ``t >= t_min``

    M_w <= K r^w,   r = exp(-c (pi / L)^2 t_min (N + 1))

and the neglected tail is at most ``K r^(N+1) / (1 - r)``.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence, TextIO

import numpy as np

from ._trig import cospi, sinpi
from .domain import EvalPoint, SlabProblem, check_point, validate_problem
from .errors import ModeOutOfRange, NonPositiveTime, TruncationCapExceeded
from .fourier import DEFAULT_TOL, CoefficientVector, abs_integral, coefficient_vector

N_MAX = 4096


@dataclass(frozen=True)
class TailBound:
    N: int
    t_min: float
    K: float
    ratio: float
    bound: float


def tail_bound(K: float, c: float, L: float, N: int, t_min: float) -> TailBound:
    """Upper bound on ``sum_{w > N} M_w`` valid for every ``t >= t_min``."""
    if not t_min > 0:
        raise NonPositiveTime(f"tail bound needs t_min > 0, got {t_min!r}")
    rate = c * (math.pi / L) ** 2 * t_min
    ratio = math.exp(-rate * (N + 1))
    if K == 0.0:
        return TailBound(N, t_min, K, ratio, 0.0)
    # r^(N+1) / (1 - r), evaluated without forming r^(N+1) by repeated products
    bound = K * math.exp(-rate * (N + 1) ** 2) / -math.expm1(-rate * (N + 1))
    return TailBound(N, t_min, K, ratio, bound)


@dataclass(frozen=True)
class SeriesSolution:
    problem: SlabProblem
    coeffs: CoefficientVector
    abs_f_integral: float
    # test hook: +1 turns decay into growth (see cli --sabotage); -1 is physics
    _decay_sign: float = field(default=-1.0, repr=False)

    def __post_init__(self):
        if self.coeffs.L != self.problem.length:
            raise ValueError("coefficient vector was computed for a different slab length")
        if not self.abs_f_integral >= 0:
            raise ValueError("abs_f_integral must be >= 0")

    @classmethod
    def build(
        cls,
        problem: SlabProblem,
        n_modes: int,
        tol: float = DEFAULT_TOL,
        workers: int = 1,
    ) -> "SeriesSolution":
        problem = validate_problem(problem)
        f, L = problem.initial_profile, problem.length
        coeffs = coefficient_vector(f, n_modes, L, tol, workers=workers)
        return cls(problem, coeffs, abs_integral(f, L, tol))

    @property
    def n_modes(self) -> int:
        return self.coeffs.n_modes

    @property
    def K(self) -> float:
        return 2.0 / self.problem.length * self.abs_f_integral

    def _wavenumbers(self) -> np.ndarray:
        w = np.arange(1, self.n_modes + 1, dtype=float)
        return w * (math.pi / self.problem.length)

    def _modes(self, p: EvalPoint) -> np.ndarray:
        """B_w sin(w pi x / L) exp(-c k_w^2 t) for every retained mode."""
        L, c = self.problem.length, self.problem.diffusivity
        w = np.arange(1, self.n_modes + 1, dtype=float)
        k = self._wavenumbers()
        decay = np.exp(self._decay_sign * c * k * k * p.t)
        return self.coeffs.coeffs * sinpi(w * (p.x / L)) * decay

    def tail_bound(self, N: int, t_min: float) -> TailBound:
        return tail_bound(self.K, self.problem.diffusivity, self.problem.length, N, t_min)


def _point(sol: SeriesSolution, p: EvalPoint) -> EvalPoint:
    return check_point(p, sol.problem.length)


def _positive_time(sol: SeriesSolution, p: EvalPoint) -> EvalPoint:
    p = _point(sol, p)
    if not p.t > 0:
        raise NonPositiveTime(f"derivatives need t > 0, got t={p.t!r}")
    return p


def mode_value(sol: SeriesSolution, w: int, p: EvalPoint) -> float:
    if not 1 <= w <= sol.n_modes:
        raise ModeOutOfRange(f"mode {w} not in 1..{sol.n_modes}")
    p = _point(sol, p)
    L, c = sol.problem.length, sol.problem.diffusivity
    k = w * math.pi / L
    return float(sol.coeffs.coeffs[w - 1] * sinpi(w * (p.x / L)) * math.exp(sol._decay_sign * c * k * k * p.t))


def evaluate(sol: SeriesSolution, p: EvalPoint) -> tuple[float, float | None]:
    """Partial sum ``u_N(x, t)`` and its tail bound at ``t`` (``None`` at t = 0).

    The sum is exactly rounded (``math.fsum``), so it does not depend on
    summation order or on how a grid sweep is scheduled.
    """
    p = _point(sol, p)
    value = math.fsum(sol._modes(p))
    bound = sol.tail_bound(sol.n_modes, p.t).bound if p.t > 0 else None
    return value, bound


def compute_tail_bound(sol: SeriesSolution, N: int, t_min: float) -> TailBound:
    return sol.tail_bound(N, t_min)


def select_truncation(
    problem: SlabProblem,
    target_error: float,
    t_min: float,
    abs_f_integral: float | None = None,
    n_max: int = N_MAX,
) -> int:
    """Smallest ``N <= n_max`` whose tail bound at ``t_min`` is within
    ``target_error``."""
    if not target_error > 0:
        raise ValueError(f"target_error must be > 0, got {target_error!r}")
    problem = validate_problem(problem)
    L, c = problem.length, problem.diffusivity
    if abs_f_integral is None:
        abs_f_integral = abs_integral(problem.initial_profile, L)
    K = 2.0 / L * abs_f_integral
    for N in range(1, n_max + 1):
        if tail_bound(K, c, L, N, t_min).bound <= target_error:
            return N
    raise TruncationCapExceeded(n_max, tail_bound(K, c, L, n_max, t_min).bound, target_error)


def ddt(sol: SeriesSolution, p: EvalPoint) -> float:
    """Termwise time derivative, ``sum -c k_w^2 u_w``."""
    p = _positive_time(sol, p)
    k = sol._wavenumbers()
    return math.fsum(-sol.problem.diffusivity * k * k * sol._modes(p))


def ddx(sol: SeriesSolution, p: EvalPoint) -> float:
    """Termwise first space derivative, ``sum B_w k_w cos(k_w x) exp(-c k_w^2 t)``."""
    p = _positive_time(sol, p)
    L, c = sol.problem.length, sol.problem.diffusivity
    w = np.arange(1, sol.n_modes + 1, dtype=float)
    k = sol._wavenumbers()
    decay = np.exp(sol._decay_sign * c * k * k * p.t)
    return math.fsum(sol.coeffs.coeffs * k * cospi(w * (p.x / L)) * decay)


def d2dx2(sol: SeriesSolution, p: EvalPoint) -> float:
    """Termwise second space derivative, ``sum -k_w^2 u_w``."""
    p = _positive_time(sol, p)
    k = sol._wavenumbers()
    return math.fsum(-(k * k) * sol._modes(p))


def evaluate_grid(
    sol: SeriesSolution,
    xs: Sequence[float],
    ts: Sequence[float],
    workers: int = 1,
) -> list[tuple[float, float, float, float | None]]:
    """Rows ``(x, t, u, tail_bound)``, time-major, in input order.

    Per-point results do not depend on ``workers``.
    """
    points = [EvalPoint(float(x), float(t)) for t in ts for x in xs]

    def one(p):
        value, bound = evaluate(sol, p)
        return (p.x, p.t, value, bound)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, points))
    return [one(p) for p in points]


def format_float(v: float | None) -> str:
    """Shortest round-trip decimal; empty for a missing value."""
    return "" if v is None else repr(float(v))


def write_grid_csv(rows: Iterable[Sequence], fh: TextIO, with_bound: bool = True) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["x", "t", "u", "tail_bound"] if with_bound else ["x", "t", "u"])
    for row in rows:
        cells = row if with_bound else row[:3]
        writer.writerow([format_float(v) for v in cells])


def truncate(sol: SeriesSolution, N: int) -> SeriesSolution:
    """The same solution keeping only modes ``1..N``."""
    if not 1 <= N <= sol.n_modes:
        raise ModeOutOfRange(f"cannot truncate {sol.n_modes} modes to {N}")
    c = sol.coeffs
    coeffs = CoefficientVector(c.L, c.coeffs[:N], c.methods[:N], c.est_errors[:N])
    return replace(sol, coeffs=coeffs)
