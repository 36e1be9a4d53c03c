"""Constructors for the qubit channel families and the CLI spec grammar.

Spec strings look like ``depol:q=0.5``, ``pauli:0.1,0.2,0.3``,
``gad:p=0.4,gamma=0.25``, ``extremal:u=0.7,v=0.3``, ``pd:l=0.2``,
``ad:p=0.6`` or ``id``. Numbers may be written as fractions (``1/3``).
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DomainError, SpecParseError
from .qchannel import (CPFlag, QubitChannel, channel_from_record, identity_channel,
                       ptm_from_kraus)

_EPS = 1e-12


def _check_range(name: str, value: float, lo: float, hi: float, hi_open: bool = False):
    upper_ok = value < hi if hi_open else value <= hi + _EPS
    if not (value >= lo - _EPS and upper_ok):
        bracket = ")" if hi_open else "]"
        raise DomainError(f"{name}={value} outside [{lo}, {hi}{bracket}")


TETRAHEDRON = (
    ("1+l1+l2+l3 >= 0", (1, 1, 1)),
    ("1+l1-l2-l3 >= 0", (1, -1, -1)),
    ("1-l1+l2-l3 >= 0", (-1, 1, -1)),
    ("1-l1-l2+l3 >= 0", (-1, -1, 1)),
)


def tetrahedron_violations(l1: float, l2: float, l3: float, tol: float = _EPS) -> list[str]:
    """Names of the complete-positivity inequalities a Pauli channel violates."""
    return [name for name, s in TETRAHEDRON
            if 1 + s[0] * l1 + s[1] * l2 + s[2] * l3 < -tol]


def depolarizing(q: float) -> QubitChannel:
    _check_range("q", q, -1 / 3, 1.0)
    return QubitChannel(np.diag([1.0, q, q, q]), cp=CPFlag.CP, label=f"depol(q={q:g})")


def pauli_diagonal(l1: float, l2: float, l3: float) -> QubitChannel:
    bad = tetrahedron_violations(l1, l2, l3)
    if bad:
        raise DomainError(f"not completely positive: violates {', '.join(bad)}")
    return QubitChannel(np.diag([1.0, l1, l2, l3]), cp=CPFlag.CP,
                        label=f"pauli({l1:g},{l2:g},{l3:g})")


def phase_damping(l: float) -> QubitChannel:
    _check_range("l", l, -1.0, 1.0)
    return QubitChannel(np.diag([1.0, l, l, 1.0]), cp=CPFlag.CP, label=f"pd(l={l:g})")


def gad_kraus(p: float, gamma: float) -> list[np.ndarray]:
    a, b = math.sqrt(gamma), math.sqrt(1 - gamma)
    s, c = math.sqrt(p), math.sqrt(1 - p)
    return [
        a * np.array([[1, 0], [0, c]]),
        a * np.array([[0, s], [0, 0]]),
        b * np.array([[c, 0], [0, 1]]),
        b * np.array([[0, 0], [s, 0]]),
    ]


def gad(p: float, gamma: float) -> QubitChannel:
    """Generalized amplitude damping with fixed state diag(gamma, 1-gamma)."""
    _check_range("p", p, 0.0, 1.0)
    _check_range("gamma", gamma, 0.0, 1.0)
    p, gamma = min(max(p, 0.0), 1.0), min(max(gamma, 0.0), 1.0)
    return ptm_from_kraus(gad_kraus(p, gamma), label=f"gad(p={p:g},gamma={gamma:g})")


def amplitude_damping(p: float) -> QubitChannel:
    ch = gad(p, 0.0)
    return QubitChannel(ch.ptm, kraus=ch.kraus, cp=CPFlag.CP, label=f"ad(p={p:g})")


def ruskai_extremal(u: float, v: float) -> QubitChannel:
    """Extremal qubit channel in its canonical frame (translation along sigma_3)."""
    _check_range("u", u, 0.0, 2 * math.pi, hi_open=True)
    _check_range("v", v, 0.0, math.pi, hi_open=True)
    ptm = np.diag([1.0, math.cos(u), math.cos(v), math.cos(u) * math.cos(v)])
    ptm[3, 0] = math.sin(u) * math.sin(v)
    return QubitChannel(ptm, cp=CPFlag.CP, label=f"extremal(u={u:g},v={v:g})")


# ---------------------------------------------------------------------------
# Spec strings
# ---------------------------------------------------------------------------


def _number(token: str) -> float:
    try:
        return float(Fraction(token.strip()))
    except (ValueError, ZeroDivisionError):
        raise SpecParseError(f"bad number {token!r}", token) from None


_KEYED = {
    "depol": (depolarizing, ("q",)),
    "pd": (phase_damping, ("l",)),
    "ad": (amplitude_damping, ("p",)),
    "gad": (gad, ("p", "gamma")),
    "extremal": (ruskai_extremal, ("u", "v")),
    "pauli": (pauli_diagonal, ("l1", "l2", "l3")),
}


def parse_family_spec(spec: str) -> QubitChannel:
    """Build a channel from a CLI spec string, a JSON record, or ``@file.json``."""
    spec = spec.strip()
    if spec.startswith("@"):
        try:
            spec = Path(spec[1:]).read_text()
        except OSError as exc:
            raise SpecParseError(f"cannot read {spec[1:]!r}: {exc}", spec) from None
        spec = spec.strip()
    if spec.startswith("{"):
        try:
            return channel_from_record(json.loads(spec))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise SpecParseError(f"bad channel record: {exc}", spec) from None
    if spec == "id":
        return identity_channel()
    family, sep, rest = spec.partition(":")
    if family not in _KEYED or not sep:
        raise SpecParseError(f"unknown channel family {family!r}", family)
    ctor, names = _KEYED[family]
    tokens = [t for t in rest.split(",") if t.strip()]
    values: dict[str, float] = {}
    positional = []
    for tok in tokens:
        key, eq, val = tok.partition("=")
        if eq:
            key = key.strip()
            if key not in names:
                raise SpecParseError(f"{family} has no parameter {key!r}", tok)
            values[key] = _number(val)
        else:
            positional.append(_number(tok))
    if positional:
        if values or len(positional) != len(names):
            raise SpecParseError(f"{family} expects {len(names)} values", rest)
        values = dict(zip(names, positional))
    missing = [n for n in names if n not in values]
    if missing:
        raise SpecParseError(f"{family} is missing {', '.join(missing)}", rest)
    return ctor(**values)
