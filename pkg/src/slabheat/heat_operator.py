"""The heat operator ``du/dt - c d2u/dx2`` applied to arbitrary fields.

Fields are opaque callables ``u(x, t)``, so derivatives come from central
finite differences on a five-point stencil:

    du/dt   ~ (u(x, t+ht) - u(x, t-ht)) / (2 ht)
    d2u/dx2 ~ (u(x+hx, t) - 2 u(x, t) + u(x-hx, t)) / hx^2

The stencil is a linear functional of the sampled values, so linearity and
homogeneity of the operator hold exactly at the discrete level, up to the
rounding incurred when the combined field is sampled. Smoothness of the
field is the caller's responsibility; only finiteness at the stencil points
is checked. Stateful fields forfeit thread-safety.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable

from .domain import EvalPoint
from .errors import ProbeOutOfDomain
from .series import SeriesSolution, d2dx2, ddt

CandidateField = Callable[[float, float], float]


@dataclass(frozen=True)
class HeatOperatorStencil:
    h_t: float
    h_x: float

    def __post_init__(self):
        if not (self.h_t > 0 and self.h_x > 0):
            raise ValueError(f"stencil steps must be positive, got h_t={self.h_t!r}, h_x={self.h_x!r}")

    @classmethod
    def default(cls, t: float, L: float = 1.0) -> "HeatOperatorStencil":
        return cls(h_t=1e-5 * max(1.0, t), h_x=1e-3 * L)


@dataclass(frozen=True)
class _Stencil:
    value: float
    scale: float


def _probe(u: CandidateField, p: EvalPoint, c: float, st: HeatOperatorStencil, L: float | None) -> _Stencil:
    x, t = p.x, p.t
    if t - st.h_t < 0:
        raise ProbeOutOfDomain(f"t - h_t = {t - st.h_t!r} < 0")
    if L is not None and (x - st.h_x < 0 or x + st.h_x > L):
        raise ProbeOutOfDomain(f"x +- h_x leaves [0, {L!r}] at x={x!r}")
    up, um = u(x, t + st.h_t), u(x, t - st.h_t)
    xp, x0, xm = u(x + st.h_x, t), u(x, t), u(x - st.h_x, t)
    vals = (up, um, xp, x0, xm)
    if not all(math.isfinite(v) for v in vals):
        raise ProbeOutOfDomain(f"field is not finite on the stencil around ({x!r}, {t!r})")
    dt_w = 1.0 / (2.0 * st.h_t)
    dx_w = c / (st.h_x * st.h_x)
    value = (up - um) * dt_w - (xp - 2.0 * x0 + xm) * dx_w
    # magnitude of what the stencil combines; rounding in the samples is
    # amplified by at most this much
    scale = (abs(up) + abs(um)) * dt_w + (abs(xp) + 2.0 * abs(x0) + abs(xm)) * dx_w
    return _Stencil(value, scale)


def residual(
    field: CandidateField,
    p: EvalPoint,
    c: float,
    st: HeatOperatorStencil | None = None,
    L: float | None = None,
) -> float:
    """Finite-difference ``du/dt - c d2u/dx2`` of ``field`` at ``p``.

    If ``L`` is given the spatial probes must stay inside ``[0, L]``.
    """
    st = st or HeatOperatorStencil.default(p.t, L or 1.0)
    return _probe(field, p, c, st, L).value


def residual_series(sol: SeriesSolution, p: EvalPoint) -> float:
    """Operator applied to a truncated series with termwise analytic
    derivatives; zero up to rounding because every mode solves the PDE."""
    return ddt(sol, p) - sol.problem.diffusivity * d2dx2(sol, p)


@dataclass(frozen=True)
class OperatorReport:
    """Comparison of the two sides of a linearity/scaling identity.

    ``scale`` bounds how much sampling rounding the stencil can amplify;
    ``passes`` compares ``abs_diff`` against ``rtol * (1 + scale)``.
    """

    lhs: float
    rhs: float
    abs_diff: float
    rel_diff: float
    scale: float
    h_t: float
    h_x: float

    def passes(self, rtol: float = 1e-10) -> bool:
        return self.abs_diff <= rtol * (1.0 + self.scale)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {
            "lhs": d["lhs"],
            "rhs": d["rhs"],
            "abs_diff": d["abs_diff"],
            "rel_diff": d["rel_diff"],
            "stencil": {"h_t": d["h_t"], "h_x": d["h_x"]},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _report(lhs: float, rhs: float, scale: float, st: HeatOperatorStencil) -> OperatorReport:
    diff = abs(lhs - rhs)
    denom = max(abs(lhs), abs(rhs))
    rel = diff / denom if denom > 0 else 0.0
    return OperatorReport(lhs, rhs, diff, rel, scale, st.h_t, st.h_x)


# LinearityReport and ScalingReport share one layout
LinearityReport = ScalingReport = OperatorReport


def check_linearity(
    u: CandidateField,
    v: CandidateField,
    p: EvalPoint,
    c: float,
    st: HeatOperatorStencil | None = None,
    L: float | None = None,
) -> OperatorReport:
    """residual(u + v) against residual(u) + residual(v)."""
    st = st or HeatOperatorStencil.default(p.t, L or 1.0)
    su, sv = _probe(u, p, c, st, L), _probe(v, p, c, st, L)
    sw = _probe(lambda x, t: u(x, t) + v(x, t), p, c, st, L)
    return _report(sw.value, su.value + sv.value, max(sw.scale, su.scale + sv.scale), st)


def check_scaling(
    u: CandidateField,
    a: float,
    p: EvalPoint,
    c: float,
    st: HeatOperatorStencil | None = None,
    L: float | None = None,
) -> OperatorReport:
    """residual(a * u) against a * residual(u)."""
    st = st or HeatOperatorStencil.default(p.t, L or 1.0)
    su = _probe(u, p, c, st, L)
    sa = _probe(lambda x, t: a * u(x, t), p, c, st, L)
    return _report(sa.value, a * su.value, max(sa.scale, abs(a) * su.scale), st)
