"""Generalized amplitude damping: closed-form EB and Bell-state boundaries."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..qchannel import QubitChannel


def _x(gamma: float) -> float:
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma={gamma} outside [0, 1]")
    return gamma * (1 - gamma)


def gad_eb_boundary(gamma: float) -> float:
    """Smallest p with gad(p, gamma) entanglement breaking."""
    x = _x(gamma)
    if x < 1e-12:
        # the formula tends to 1 - x + O(x^2)
        return 1.0 - x
    return min(1.0, max(0.0, (math.sqrt(1 + 4 * x) - 1) / (2 * x)))


def gad_bell_boundary(gamma: float) -> float:
    """Largest p for which the Bell state stays entangled under gad(p, gamma)^(x)2."""
    x = _x(gamma)
    return (1 - math.sqrt(2 * x)) / (1 - 2 * x)


@dataclass(frozen=True)
class GadParams:
    p: float
    gamma: float


def recognize_gad(ch: QubitChannel, tol: float = 1e-10) -> GadParams | None:
    """Read (p, gamma) back from a PTM in the standard GAD form."""
    r = np.asarray(ch.ptm)
    p = 1.0 - r[3, 3]
    if not -tol <= p <= 1 + tol:
        return None
    # compare r11^2 with 1 - p: the square root would amplify rounding near p = 1
    s = r[1, 1]
    expected = np.diag([1.0, s, s, 1 - p])
    expected[3, 0] = r[3, 0]
    if s < -tol or abs(s * s - (1 - p)) > tol or np.abs(r - expected).max() > tol:
        return None
    if p < tol:
        return GadParams(0.0, 0.5) if abs(r[3, 0]) <= tol else None
    gamma = (r[3, 0] / p + 1) / 2
    if not -tol <= gamma <= 1 + tol:
        return None
    return GadParams(float(min(max(p, 0.0), 1.0)), float(min(max(gamma, 0.0), 1.0)))
