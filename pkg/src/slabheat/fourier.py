"""Fourier sine coefficients of the initial profile.

``B_w = (2/L) * integral_0^L f(x) sin(w pi x / L) dx``

Closed forms are used for single modes, constants and polynomials up to
degree 3; everything else goes through :func:`adaptive_simpson`.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, TextIO

import numpy as np

from ._trig import sinpi
from .domain import (
    CallableProfile,
    Constant,
    InitialProfile,
    PiecewiseLinear,
    Polynomial,
    SingleMode,
)
from .errors import QuadratureNonConvergence, ZeroModeIndex

DEFAULT_TOL = 1e-10
MAX_PANELS = 2**16

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"


def adaptive_simpson(
    g: Callable[[np.ndarray], np.ndarray],
    nodes: Iterable[float],
    tol: float,
    max_panels: int = MAX_PANELS,
) -> tuple[float, float]:
    """Integrate ``g`` over ``[nodes[0], nodes[-1]]`` by adaptive Simpson.

    ``g`` must accept and return arrays. ``nodes`` are the initial panel
    edges; put discontinuities of ``g`` or its derivatives there. Each
    panel gets a share of ``tol`` proportional to its width, halved on every
    split. A panel is accepted when the two-half Simpson sum differs from
    the whole-panel sum by at most ``15 * eps``; the Richardson-corrected
    value is kept and ``|diff| / 15`` is booked as its error.

    Panels are refined breadth-first, one vectorized ``g`` call per level.

    Returns ``(value, estimated_error)``. Raises
    :class:`QuadratureNonConvergence` once more than ``max_panels`` panels
    would be live.
    """
    edges = np.asarray(sorted(set(float(v) for v in nodes)), dtype=float)
    if edges.size < 2:
        return 0.0, 0.0
    total = edges[-1] - edges[0]
    a, b = edges[:-1], edges[1:]
    m = 0.5 * (a + b)
    fa, fm, fb = np.split(g(np.concatenate([a, m, b])), 3)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = tol * (b - a) / total

    parts: list[float] = []
    errors: list[float] = []
    n_done = 0
    while a.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = np.split(g(np.concatenate([lm, rm])), 2)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        ok = np.abs(delta) <= 15.0 * eps
        if not np.all(np.isfinite(delta)):
            raise QuadratureNonConvergence(math.nan, math.inf)
        parts.extend((left + right + delta / 15.0)[ok])
        errors.extend(np.abs(delta[ok]) / 15.0)
        n_done += int(ok.sum())

        keep = ~ok
        n_live = 2 * int(keep.sum())
        if n_done + n_live > max_panels:
            estimate = math.fsum(parts) + math.fsum((left + right + delta / 15.0)[keep])
            err = math.fsum(errors) + math.fsum(np.abs(delta[keep]) / 15.0)
            raise QuadratureNonConvergence(estimate, err)

        a, m, b = a[keep], m[keep], b[keep]
        fa, flm, fm, frm, fb = fa[keep], flm[keep], fm[keep], frm[keep], fb[keep]
        left, right, eps = left[keep], right[keep], eps[keep]
        # children: [a, m] and [m, b]
        a, m, b = np.concatenate([a, m]), np.concatenate([lm[keep], rm[keep]]), np.concatenate([m, b])
        fa, fm, fb = np.concatenate([fa, fm]), np.concatenate([flm, frm]), np.concatenate([fm, fb])
        whole = np.concatenate([left, right])
        eps = np.concatenate([eps, eps]) * 0.5

    return math.fsum(parts), math.fsum(errors)


def _panel_nodes(L: float, n_panels: int, extra: Iterable[float] = ()) -> list[float]:
    nodes = [L * i / n_panels for i in range(n_panels + 1)]
    nodes[-1] = L
    nodes.extend(v for v in extra if 0.0 < v < L)
    return nodes


def _breakpoints(f: InitialProfile) -> tuple[float, ...]:
    return f.knots if isinstance(f, PiecewiseLinear) else ()


def _polynomial_sine_integral(coefficients, w: int, L: float) -> float:
    """integral_0^L p(x) sin(a x) dx, a = w pi / L, deg p <= 3.

    Integration by parts with sin(a L) = 0 and cos(a L) = (-1)^w:
      I_0 = (1 - (-1)^w) / a,              J_0 = 0
      I_k = -L^k (-1)^w / a + k J_{k-1} / a
      J_k = -k I_{k-1} / a
    where I_k, J_k integrate x^k sin(a x), x^k cos(a x).
    """
    a = w * math.pi / L
    sign = -1.0 if w % 2 else 1.0
    I = [(1.0 - sign) / a]
    J = [0.0]
    for k in range(1, len(coefficients)):
        I.append(-(L**k) * sign / a + k * J[k - 1] / a)
        J.append(-k * I[k - 1] / a)
    return math.fsum(ck * Ik for ck, Ik in zip(coefficients, I))


def has_closed_form(f: InitialProfile) -> bool:
    if isinstance(f, Polynomial):
        return f.degree <= 3
    return isinstance(f, (SingleMode, Constant))


def _closed_form_coefficient(f: InitialProfile, w: int, L: float) -> float:
    if isinstance(f, SingleMode):
        return float(f.amplitude) if w == f.mode else 0.0
    if isinstance(f, Constant):
        return 2.0 * f.value_ * (1.0 - (-1.0) ** w) / (w * math.pi)
    return 2.0 / L * _polynomial_sine_integral(f.coefficients, w, L)


def sine_coefficient(
    f: InitialProfile,
    w: int,
    L: float,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
) -> tuple[float, float]:
    """Fourier sine coefficient ``B_w`` of ``f`` on ``[0, L]``.

    Parameters
    ----------
    f : InitialProfile
    w : int
        Mode index, ``w >= 1``.
    L : float
        Slab thickness.
    tol : float
        Absolute tolerance on ``B_w``.
    method : {"auto", "quadrature"}
        ``"quadrature"`` skips the closed forms (used to cross-check them).

    Returns
    -------
    (B_w, estimated_error)
        ``estimated_error`` is 0 for closed-form profiles.
    """
    if w < 1:
        raise ZeroModeIndex(f"mode index must be >= 1, got {w}")
    if method == "auto" and has_closed_form(f):
        return _closed_form_coefficient(f, w, L), 0.0

    def integrand(x):
        return f.value(x, L) * sinpi(w * (x / L))

    # sin(w pi x / L) changes sign w times: seed at least 2w panels
    nodes = _panel_nodes(L, max(2 * w, 16), _breakpoints(f))
    try:
        value, err = adaptive_simpson(integrand, nodes, tol * L / 2.0)
    except QuadratureNonConvergence as exc:
        raise QuadratureNonConvergence(2.0 / L * exc.estimate, 2.0 / L * exc.estimated_error, mode=w) from None
    return 2.0 / L * value, 2.0 / L * err


@dataclass(frozen=True)
class CoefficientVector:
    """``coeffs[w - 1] == B_w`` for ``w = 1..n_modes``."""

    L: float
    coeffs: np.ndarray
    methods: tuple[str, ...]
    est_errors: np.ndarray

    @property
    def n_modes(self) -> int:
        return int(self.coeffs.size)

    def replace_coefficient(self, w: int, value: float) -> "CoefficientVector":
        coeffs = self.coeffs.copy()
        coeffs[w - 1] = value
        coeffs.setflags(write=False)
        return CoefficientVector(self.L, coeffs, self.methods, self.est_errors)

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["w", "B_w", "method", "est_error"])
        for i, (b, meth, err) in enumerate(zip(self.coeffs, self.methods, self.est_errors), start=1):
            writer.writerow([i, repr(float(b)), meth, repr(float(err))])


def coefficient_vector(
    f: InitialProfile,
    N: int,
    L: float,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    workers: int = 1,
) -> CoefficientVector:
    """Coefficients ``B_1..B_N``.

    Modes are independent, so ``workers > 1`` computes them on a thread
    pool; each mode's result does not depend on the schedule.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")

    def one(w):
        return sine_coefficient(f, w, L, tol, method)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(1, N + 1)))
    else:
        results = [one(w) for w in range(1, N + 1)]

    quad = method != "auto" or not has_closed_form(f)
    coeffs = np.array([r[0] for r in results], dtype=float)
    errs = np.array([r[1] for r in results], dtype=float)
    coeffs.setflags(write=False)
    errs.setflags(write=False)
    methods = (QUADRATURE if quad else CLOSED_FORM,) * N
    return CoefficientVector(L=float(L), coeffs=coeffs, methods=methods, est_errors=errs)


def _real_roots_in(coefficients, L: float) -> list[float]:
    c = np.trim_zeros(np.asarray(coefficients, dtype=float), "b")
    if c.size < 2:
        return []
    roots = np.roots(c[::-1])
    return [float(r.real) for r in roots if abs(r.imag) < 1e-12 and 0.0 < r.real < L]


def _linear_crossings(f: PiecewiseLinear) -> list[float]:
    out = []
    for (x0, y0), (x1, y1) in zip(zip(f.knots, f.values), zip(f.knots[1:], f.values[1:])):
        if y0 * y1 < 0:
            out.append(x0 - y0 * (x1 - x0) / (y1 - y0))
    return out


def abs_integral(f: InitialProfile, L: float, tol: float = DEFAULT_TOL) -> float:
    """``integral_0^L |f(x)| dx``.

    Polynomials and piecewise-linear profiles are split at their sign
    changes, where Simpson's rule is exact for each resulting piece up to
    degree 3.
    """
    if isinstance(f, Constant):
        return abs(f.value_) * L
    if isinstance(f, SingleMode):
        return abs(f.amplitude) * 2.0 * L / math.pi
    extra: list[float] = []
    if isinstance(f, Polynomial):
        extra = _real_roots_in(f.coefficients, L)
    elif isinstance(f, PiecewiseLinear):
        extra = list(f.knots) + _linear_crossings(f)
    n0 = 16 if isinstance(f, CallableProfile) else 4
    value, _ = adaptive_simpson(lambda x: np.abs(f.value(x, L)), _panel_nodes(L, n0, extra), tol)
    return value
