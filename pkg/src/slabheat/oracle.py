"""Crank-Nicolson finite-difference solver for the same slab problem.

It shares nothing with the series path except the problem definition, so
it serves as an independent oracle for the sine-series solution.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numba
import numpy as np

from .domain import EvalPoint, SlabProblem, validate_problem
from .errors import ResourceLimit, SingularSystem, SnapshotNotFound
from .series import SeriesSolution, evaluate, format_float

#: cap on n_x * n_steps
MAX_CELLS = 4 * 10**9


@dataclass(frozen=True)
class FdConfig:
    n_x: int
    dt: float
    t_end: float

    def __post_init__(self):
        if self.n_x < 3:
            raise ValueError(f"n_x must be >= 3, got {self.n_x}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not self.t_end >= self.dt:
            raise ValueError(f"t_end must be >= dt, got t_end={self.t_end!r}, dt={self.dt!r}")


@dataclass(frozen=True)
class FdSolution:
    """Snapshots of the grid temperature.

    ``u[i]`` is the field at ``times[i]`` (a multiple of ``dt``), which is
    the grid time nearest to ``requested_times[i]``. Row 0 is the initial
    state.
    """

    x: np.ndarray
    times: np.ndarray
    requested_times: np.ndarray
    u: np.ndarray
    dt: float

    def snapshot(self, t: float) -> tuple[float, np.ndarray]:
        """``(actual_time, row)`` for a requested or actual snapshot time."""
        tol = 1e-12 * max(1.0, abs(t))
        for req, act, row in zip(self.requested_times, self.times, self.u):
            if abs(req - t) <= tol or abs(act - t) <= tol:
                return float(act), row
        raise SnapshotNotFound(f"no snapshot at t={t!r}; have {list(map(float, self.times))}")

    def rows(self):
        for t, row in zip(self.times, self.u):
            for x, v in zip(self.x, row):
                yield (float(x), float(t), float(v))

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "t", "u"])
        for row in self.rows():
            writer.writerow([format_float(v) for v in row])


@numba.njit(cache=True)
def _factor(r, m):
    """Thomas factorization of tridiag(-r/2, 1 + r, -r/2) of size m."""
    off = -0.5 * r
    diag = 1.0 + r
    denom = np.empty(m)
    upper = np.empty(m)
    denom[0] = diag
    upper[0] = off / diag
    for i in range(1, m):
        denom[i] = diag - off * upper[i - 1]
        upper[i] = off / denom[i]
    return denom, upper


@numba.njit(cache=True)
def _march(u0, r, denom, upper, record_steps, out):
    m = u0.size
    off = -0.5 * r
    u = u0.copy()
    d = np.empty(m)
    rec = 0
    n_steps = record_steps[-1]
    for step in range(1, n_steps + 1):
        # right-hand side (I - r/2 A) u with zero Dirichlet neighbours
        for i in range(m):
            left = u[i - 1] if i > 0 else 0.0
            right = u[i + 1] if i < m - 1 else 0.0
            d[i] = (1.0 - r) * u[i] + 0.5 * r * (left + right)
        # forward elimination
        d[0] = d[0] / denom[0]
        for i in range(1, m):
            d[i] = (d[i] - off * d[i - 1]) / denom[i]
        # back substitution
        u[m - 1] = d[m - 1]
        for i in range(m - 2, -1, -1):
            u[i] = d[i] - upper[i] * u[i + 1]
        while rec < record_steps.size and record_steps[rec] == step:
            out[rec, :] = u
            rec += 1


@numba.njit(cache=True)
def solve_tridiagonal(sub, diag, sup, rhs):
    """Solve a tridiagonal system by forward elimination and back substitution.

    ``sub`` and ``sup`` have length ``n - 1``. No pivoting: intended for
    diagonally dominant matrices.
    """
    n = diag.size
    c = np.empty(n)
    d = np.empty(n)
    c[0] = sup[0] / diag[0] if n > 1 else 0.0
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        den = diag[i] - sub[i - 1] * c[i - 1]
        if i < n - 1:
            c[i] = sup[i] / den
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / den
    x = np.empty(n)
    x[n - 1] = d[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def solve_fd(
    p: SlabProblem,
    cfg: FdConfig,
    times: Sequence[float] | None = None,
    max_cells: int = MAX_CELLS,
) -> FdSolution:
    """March the heat equation with Crank-Nicolson (theta = 1/2).

    Parameters
    ----------
    p : SlabProblem
    cfg : FdConfig
        ``n_x`` grid points including both faces, step ``dt``, horizon ``t_end``.
    times : sequence of float, optional
        Snapshot times in ``[0, t_end]``; each is rounded to the nearest
        multiple of ``dt``. Defaults to ``[t_end]``. ``t = 0`` is always
        stored as row 0.

    Returns
    -------
    FdSolution
    """
    p = validate_problem(p)
    L, c = p.length, p.diffusivity
    x = np.linspace(0.0, L, cfg.n_x)
    dx = L / (cfg.n_x - 1)
    r = c * cfg.dt / (dx * dx)

    requested = [0.0] + [float(t) for t in (times if times is not None else [cfg.t_end])]
    for t in requested:
        if not 0.0 <= t <= cfg.t_end * (1 + 1e-12):
            raise ValueError(f"snapshot time {t!r} outside [0, {cfg.t_end!r}]")
    steps = [int(round(t / cfg.dt)) for t in requested]
    n_steps = max(steps)
    if cfg.n_x * n_steps > max_cells:
        raise ResourceLimit(f"n_x * steps = {cfg.n_x * n_steps} exceeds cap {max_cells}")

    u0 = np.asarray(p.initial_profile.value(x, L), dtype=float).copy()
    u0[0] = u0[-1] = 0.0
    m = cfg.n_x - 2

    order = sorted(range(len(steps)), key=lambda i: steps[i])
    record_steps = np.array([steps[i] for i in order if steps[i] > 0], dtype=np.int64)
    interior = np.zeros((record_steps.size, m))
    if record_steps.size:
        denom, upper = _factor(r, m)
        if not (np.all(np.isfinite(denom)) and np.all(denom > 0)):
            raise SingularSystem("Crank-Nicolson matrix lost diagonal dominance")
        _march(u0[1:-1].copy(), r, denom, upper, record_steps, interior)

    u = np.zeros((len(steps), cfg.n_x))
    k = 0
    for i in order:
        if steps[i] == 0:
            u[i] = u0
        else:
            u[i, 1:-1] = interior[k]
            k += 1
    t_actual = np.array([s * cfg.dt for s in steps])
    for arr in (x, t_actual, u):
        arr.setflags(write=False)
    return FdSolution(x=x, times=t_actual, requested_times=np.array(requested), u=u, dt=cfg.dt)


@dataclass(frozen=True)
class ComparisonReport:
    t_requested: float
    t_actual: float
    max_abs: float
    rms: float
    tail_bound: float | None


def compare(series: SeriesSolution, fd: FdSolution, t: float) -> ComparisonReport:
    """Series vs finite differences on the FD grid at snapshot ``t``.

    The series is evaluated at the snapshot's actual grid time.
    """
    t_actual, row = fd.snapshot(t)
    vals = []
    bound = None
    for xi in fd.x:
        v, bound = evaluate(series, EvalPoint(float(xi), t_actual))
        vals.append(v)
    diff = np.asarray(vals) - row
    return ComparisonReport(
        t_requested=float(t),
        t_actual=t_actual,
        max_abs=float(np.max(np.abs(diff))),
        rms=float(np.sqrt(np.mean(diff * diff))),
        tail_bound=bound,
    )
