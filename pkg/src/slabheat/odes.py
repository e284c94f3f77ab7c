"""Closed-form building blocks of the separated solution u = X(x) W(t).

X solves X'' + beta^2 X = 0 and W solves W' + c beta^2 W = 0. The
residual helpers use the analytic derivatives of the closed forms, so
they vanish up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ZeroModeIndex


@dataclass(frozen=True)
class SpatialSolution:
    """X(x) = A cos(beta x) + B sin(beta x)."""

    A: float
    B: float
    beta: float

    def __call__(self, x: float) -> float:
        return eval_spatial(self, x)

    def second_derivative(self, x: float) -> float:
        b2 = self.beta * self.beta
        return -self.A * b2 * math.cos(self.beta * x) - self.B * b2 * math.sin(self.beta * x)


@dataclass(frozen=True)
class TemporalSolution:
    """W(t) = C exp(-c beta^2 t)."""

    C: float
    beta: float
    c: float

    def __call__(self, t: float) -> float:
        return eval_temporal(self, t)

    def derivative(self, t: float) -> float:
        k = self.c * self.beta * self.beta
        return -k * self.C * math.exp(-k * t)


@dataclass(frozen=True)
class Eigenvalue:
    w: int
    beta_w: float


@dataclass(frozen=True)
class ConstantElimination:
    A: float
    residual_at_L: float
    is_nontrivial_eigenpair: bool


def eval_spatial(s: SpatialSolution, x: float) -> float:
    return s.A * math.cos(s.beta * x) + s.B * math.sin(s.beta * x)


def spatial_ode_residual(s: SpatialSolution, x: float) -> float:
    """X''(x) + beta^2 X(x) with the analytic X''."""
    return s.second_derivative(x) + s.beta * s.beta * eval_spatial(s, x)


def eval_temporal(s: TemporalSolution, t: float) -> float:
    return s.C * math.exp(-s.c * s.beta * s.beta * t)


def temporal_ode_residual(s: TemporalSolution, t: float) -> float:
    """W'(t) + c beta^2 W(t) with the analytic W'."""
    return s.derivative(t) + s.c * s.beta * s.beta * eval_temporal(s, t)


def apply_boundary_conditions(B: float, beta: float, L: float) -> ConstantElimination:
    """Impose X(0) = 0 and X(L) = 0 on X = A cos + B sin.

    X(0) = A forces ``A = 0``; what is left at ``x = L`` is
    ``B sin(beta L)``. The pair is a non-trivial eigenpair when that
    vanishes (to ``1e-9 * beta * L``) with ``B != 0``.
    """
    residual = B * math.sin(beta * L)
    tol = 1e-9 * abs(beta) * L
    nontrivial = B != 0 and beta > 0 and abs(math.sin(beta * L)) < tol
    return ConstantElimination(A=0.0, residual_at_L=residual, is_nontrivial_eigenpair=nontrivial)


def eigenvalue(w: int, L: float) -> Eigenvalue:
    """beta_w = w pi / L for mode index ``w >= 1``."""
    if w < 1:
        raise ZeroModeIndex(f"mode index must be >= 1, got {w}")
    return Eigenvalue(w=int(w), beta_w=w * math.pi / L)
