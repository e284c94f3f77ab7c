"""Exception hierarchy for slabheat.

Every error raised by the library derives from :class:`SlabHeatError` so
callers (and the CLI) can catch one type.
"""

from __future__ import annotations


class SlabHeatError(Exception):
    """Base class for all library errors."""


class InvalidProblem(SlabHeatError, ValueError):
    """A problem definition violates its invariants."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NonPositiveLength(InvalidProblem):
    pass


class NonPositiveDiffusivity(InvalidProblem):
    pass


class MalformedProfile(InvalidProblem):
    pass


class OutOfDomain(SlabHeatError, ValueError):
    """An evaluation point lies outside ``[0, L] x [0, inf)``."""


class ZeroModeIndex(SlabHeatError, ValueError):
    """Mode indices start at 1."""


class ModeOutOfRange(SlabHeatError, IndexError):
    pass


class NonPositiveTime(SlabHeatError, ValueError):
    """Raised where a quantity only exists for ``t > 0``."""


class QuadratureNonConvergence(SlabHeatError, ArithmeticError):
    """Adaptive quadrature hit its panel limit before reaching tolerance.

    The best available estimate travels with the exception.
    """

    def __init__(self, estimate: float, estimated_error: float, mode: int | None = None):
        self.estimate = estimate
        self.estimated_error = estimated_error
        self.mode = mode
        where = f" (mode {mode})" if mode is not None else ""
        super().__init__(
            f"quadrature did not converge{where}: estimate={estimate!r}, "
            f"estimated_error={estimated_error!r}"
        )


class TruncationCapExceeded(SlabHeatError, RuntimeError):
    def __init__(self, n_max: int, achievable: float, target: float):
        self.n_max = n_max
        self.achievable = achievable
        self.target = target
        super().__init__(
            f"no N <= {n_max} reaches tail bound {target:g}; "
            f"bound at N={n_max} is {achievable:g}"
        )


class ProbeOutOfDomain(SlabHeatError, ValueError):
    """A finite-difference stencil point is outside the admissible region
    or the field is not finite there."""


class SingularSystem(SlabHeatError, ArithmeticError):
    pass


class ResourceLimit(SlabHeatError, RuntimeError):
    pass


class SnapshotNotFound(SlabHeatError, KeyError):
    pass


class ConfigError(SlabHeatError, ValueError):
    pass
