"""Closed-form criteria: EB tests, the depolarizing rule, and the unital
sphere, sufficiency and dot-product witness rules."""
from __future__ import annotations

import numpy as np

from .. import qchannel, qstate
from ..errors import DomainError
from ..families import tetrahedron_violations
from ..qchannel import QubitChannel
from ..qstate import BELL_PARAMS, DEFAULT_TOL, PSI_PLUS
from .verdict import Criterion, EaVerdict, ea, not_ea, undecided

BELL = np.outer(PSI_PLUS, PSI_PLUS.conj())
_EXACT = 1e-12


def is_eb(ch: QubitChannel, tol: float = DEFAULT_TOL) -> bool:
    """Entanglement breaking iff the Choi matrix is PPT (qubit channels)."""
    if not qchannel.is_cptp(ch, tol):
        raise DomainError("is_eb needs a CPTP channel")
    return qstate.is_ppt(qchannel.choi_from_channel(ch), tol)


def _check_tetra(l) -> np.ndarray:
    l = np.asarray(l, dtype=float)
    if l.shape != (3,):
        raise DomainError("expected three diagonal values")
    bad = tetrahedron_violations(*l)
    if bad:
        raise DomainError(f"not completely positive: violates {', '.join(bad)}")
    return l


def eb_unital_diag(l1: float, l2: float, l3: float) -> bool:
    _check_tetra([l1, l2, l3])
    return abs(l1) + abs(l2) + abs(l3) <= 1 + _EXACT


def two_lea_unital(l1: float, l2: float, l3: float) -> bool:
    """E (x) E is EA iff E^2 is EB, i.e. the diagonal lies in the unit ball."""
    _check_tetra([l1, l2, l3])
    return l1 * l1 + l2 * l2 + l3 * l3 <= 1 + _EXACT


def ea_unital_sufficient(l, lp) -> bool:
    l, lp = _check_tetra(l), _check_tetra(lp)
    return bool(l @ l <= 1 + _EXACT and lp @ lp <= 1 + _EXACT)


def bell_pt_eigenvalues(l, lp) -> np.ndarray:
    """PT spectrum of (E1 (x) E2)[psi+] for diagonal unital channels."""
    l, lp = np.asarray(l, dtype=float), np.asarray(lp, dtype=float)
    a, b, c = l * lp
    return np.sort(np.array([1 + c + (a - b), 1 + c - (a - b),
                             1 - c + (a + b), 1 - c - (a + b)]) / 4)


def ea_depolarizing(q1: float, q2: float) -> EaVerdict:
    for q in (q1, q2):
        if not -1 / 3 - _EXACT <= q <= 1 + _EXACT:
            raise DomainError(f"depolarizing parameter {q} outside [-1/3, 1]")
    s = q1 * q2
    if s <= 1 / 3 + _EXACT:
        # the Bell state is the worst input; its PT spectrum is (1+s)/4 x3 and (1-3s)/4
        return ea(Criterion.DEPOLARIZING_PRODUCT, min_pt_eig=min((1 + s) / 4, (1 - 3 * s) / 4))
    return not_ea(Criterion.DEPOLARIZING_PRODUCT, BELL_PARAMS, (1 - 3 * s) / 4)


def not_ea_dot_witness(l, lp) -> EaVerdict:
    l, lp = _check_tetra(l), _check_tetra(lp)
    value = float(bell_pt_eigenvalues(l, lp)[0])
    if float(l @ lp) > 1 + _EXACT:
        return not_ea(Criterion.DOT_PRODUCT_WITNESS, BELL_PARAMS, value)
    return undecided(Criterion.DOT_PRODUCT_WITNESS, value, note="dot product <= 1")
