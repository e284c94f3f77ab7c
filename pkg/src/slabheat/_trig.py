"""sin(pi*s) and cos(pi*s) with exact zeros at the integers / half-integers.

Reducing the argument before multiplying by pi keeps the Dirichlet
boundary terms sin(w*pi*x/L) at x = 0 and x = L exactly zero instead of
~1e-16 * w.
"""

from __future__ import annotations

import numpy as np


def _reduce(s):
    # r in [0, 2): sin(pi*s) = sin(pi*r), cos(pi*s) = cos(pi*r)
    return np.mod(np.asarray(s, dtype=float), 2.0)


def sinpi(s):
    """sin(pi * s), exact (0.0) for integer s."""
    r = _reduce(s)
    sign = np.where(r >= 1.0, -1.0, 1.0)
    r = np.where(r >= 1.0, r - 1.0, r)
    # sin(pi*r) == sin(pi*(1 - r)) on [0, 1]
    r = np.where(r > 0.5, 1.0 - r, r)
    return sign * np.sin(np.pi * r)


def cospi(s):
    """cos(pi * s), exact (0.0) for half-integer s."""
    r = _reduce(s)
    sign = np.where(r >= 1.0, -1.0, 1.0)
    r = np.where(r >= 1.0, r - 1.0, r)
    # cos(pi*r) == sin(pi*(0.5 - r)) on [0, 1]
    return sign * np.sin(np.pi * (0.5 - r))
