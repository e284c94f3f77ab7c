"""Problem data model: the slab, its diffusivity and the initial profile.

The boundary values are zero at both faces and are not configurable; every
type here encodes them structurally. Units are up to the caller, but
``L``, ``c`` and ``t`` must be mutually consistent (e.g. metres, m^2/s,
seconds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from ._trig import sinpi
from .errors import (
    MalformedProfile,
    NonPositiveDiffusivity,
    NonPositiveLength,
    OutOfDomain,
)

#: points this far outside [0, L] are clamped instead of rejected
CLAMP_SLACK = 1e-12


def _finite(v) -> bool:
    return isinstance(v, (int, float, np.floating, np.integer)) and math.isfinite(v)


@dataclass(frozen=True)
class SingleMode:
    """``amplitude * sin(mode * pi * x / L)``."""

    mode: int
    amplitude: float = 1.0

    def value(self, x, L: float):
        return self.amplitude * sinpi(self.mode * (np.asarray(x, dtype=float) / L))

    def check(self, L: float) -> None:
        if isinstance(self.mode, bool) or not isinstance(self.mode, (int, np.integer)) or self.mode < 1:
            raise MalformedProfile("initial_profile.mode", f"must be a positive integer, got {self.mode!r}")
        if not _finite(self.amplitude):
            raise MalformedProfile("initial_profile.amplitude", f"must be finite, got {self.amplitude!r}")


@dataclass(frozen=True)
class Polynomial:
    """``sum(coefficients[k] * x**k)``, coefficients in ascending order."""

    coefficients: tuple[float, ...]

    def __init__(self, coefficients: Sequence[float]):
        object.__setattr__(self, "coefficients", tuple(float(a) for a in coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def value(self, x, L: float):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for a in reversed(self.coefficients):
            acc = acc * x + a
        return acc

    def check(self, L: float) -> None:
        if not self.coefficients:
            raise MalformedProfile("initial_profile.coefficients", "must not be empty")
        if not all(math.isfinite(a) for a in self.coefficients):
            raise MalformedProfile("initial_profile.coefficients", "must be finite")


@dataclass(frozen=True)
class Constant:
    value_: float

    def value(self, x, L: float):
        return np.full_like(np.asarray(x, dtype=float), float(self.value_))

    def check(self, L: float) -> None:
        if not _finite(self.value_):
            raise MalformedProfile("initial_profile.value", f"must be finite, got {self.value_!r}")


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear interpolation through ``(knot, value)`` pairs.

    Outside the first/last knot the end values are held constant.
    """

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __init__(self, knots: Sequence[float], values: Sequence[float]):
        object.__setattr__(self, "knots", tuple(float(k) for k in knots))
        object.__setattr__(self, "values", tuple(float(v) for v in values))

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]]) -> "PiecewiseLinear":
        return cls([p[0] for p in points], [p[1] for p in points])

    def value(self, x, L: float):
        return np.interp(np.asarray(x, dtype=float), self.knots, self.values)

    def check(self, L: float) -> None:
        k, v = self.knots, self.values
        if len(k) < 2 or len(k) != len(v):
            raise MalformedProfile("initial_profile.knots", "need >= 2 knots with one value each")
        if not all(math.isfinite(a) for a in k + v):
            raise MalformedProfile("initial_profile.knots", "knots and values must be finite")
        if any(b <= a for a, b in zip(k, k[1:])):
            raise MalformedProfile("initial_profile.knots", "knots must be strictly increasing")
        if k[0] < 0 or k[-1] > L:
            raise MalformedProfile("initial_profile.knots", f"knots must lie in [0, {L!r}]")


@dataclass(frozen=True)
class CallableProfile:
    """Wraps a caller-supplied ``f(x) -> float``.

    The function is assumed absolutely integrable on ``[0, L]``; this is not
    checked.
    """

    func: Callable[[float], float]

    def value(self, x, L: float):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return np.asarray(float(self.func(float(x))))
        return np.array([float(self.func(float(xi))) for xi in x.ravel()]).reshape(x.shape)

    def check(self, L: float) -> None:
        if not callable(self.func):
            raise MalformedProfile("initial_profile.func", "must be callable")


InitialProfile = Union[SingleMode, Polynomial, Constant, PiecewiseLinear, CallableProfile]
_PROFILE_TYPES = (SingleMode, Polynomial, Constant, PiecewiseLinear, CallableProfile)


@dataclass(frozen=True)
class SlabProblem:
    """Heat conduction in a slab of thickness ``length`` with zero face
    temperatures and initial temperature ``initial_profile``."""

    length: float
    diffusivity: float
    initial_profile: InitialProfile


@dataclass(frozen=True)
class EvalPoint:
    x: float
    t: float


def validate_problem(p: SlabProblem) -> SlabProblem:
    """Return ``p`` unchanged if it satisfies every invariant, else raise
    the error naming the offending field."""
    if not _finite(p.length) or p.length <= 0:
        raise NonPositiveLength("length", f"must be positive and finite, got {p.length!r}")
    if not _finite(p.diffusivity) or p.diffusivity <= 0:
        raise NonPositiveDiffusivity("diffusivity", f"must be positive and finite, got {p.diffusivity!r}")
    if not isinstance(p.initial_profile, _PROFILE_TYPES):
        raise MalformedProfile("initial_profile", f"unsupported profile type {type(p.initial_profile).__name__}")
    p.initial_profile.check(p.length)
    return p


def clamp_x(x: float, L: float) -> float:
    """Snap ``x`` into ``[0, L]`` if it is within :data:`CLAMP_SLACK`."""
    if not math.isfinite(x) or x < -CLAMP_SLACK or x > L + CLAMP_SLACK:
        raise OutOfDomain(f"x={x!r} outside [0, {L!r}]")
    return min(max(x, 0.0), L)


def check_point(p: EvalPoint, L: float) -> EvalPoint:
    x = clamp_x(float(p.x), L)
    if not math.isfinite(p.t) or p.t < 0:
        raise OutOfDomain(f"t={p.t!r} must be finite and >= 0")
    return p if x == p.x else EvalPoint(x, p.t)


def eval_profile(f: InitialProfile, x: float, L: float) -> float:
    """Value of the initial profile at ``x``."""
    return float(f.value(clamp_x(float(x), L), L))
