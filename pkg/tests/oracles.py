"""Closed-form references for the Koebe-flow generator f(z) = z(1 + z)/(1 - z)."""
from __future__ import annotations

import cmath

import numpy as np


def koebe_resolvent(w, r: float):
    """Root in the disk of (r - 1) z^2 + (1 + r + w) z - w = 0, i.e. z + r f(z) = w."""
    w = np.asarray(w, dtype=complex)
    b = 1.0 + r + w
    if r == 1.0:
        return w / b
    return 2.0 * w / (b + np.sqrt(b * b + 4.0 * (r - 1.0) * w))


def koebe_flow(z: complex, t: float) -> complex:
    """Inner root of u = c (1 + u)^2 with c = exp(-t) z / (1 + z)^2."""
    c = cmath.exp(-t) * z / (1.0 + z) ** 2
    b = 1.0 - 2.0 * c
    return 2.0 * c / (b + cmath.sqrt(b * b - 4.0 * c * c))
