"""Verdict dispatch over all rules, plus the decomposition and mixture checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import qchannel, qstate
from ..errors import DomainError
from ..qchannel import CLIFFORDS, QubitChannel, TwoQubitMap
from ..qstate import BELL_PARAMS, PSI_PLUS
from . import extremal, gad, rules, search
from .verdict import (DEFAULT_BUDGET, Criterion, EaVerdict, SearchBudget, Status, ea, not_ea,
                      undecided)


# ---------------------------------------------------------------------------
# Diagonal frames of unital channels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalFrame:
    """``diag(1, lam) = diag(1, O_A) R diag(1, O_B)`` for local unitaries A, B."""

    lam: np.ndarray
    out_unitary: np.ndarray
    in_unitary: np.ndarray


def diagonal_frames(ch: QubitChannel) -> list[DiagonalFrame]:
    """Every signed diagonal form reachable by Clifford frame changes.

    The first entry is the channel's own diagonal when its block is already
    diagonal.
    """
    if not qchannel.is_unital(ch):
        raise DomainError("diagonal frames exist for unital channels only")
    lam, u, vt = qchannel.signed_singular_values(ch)
    oa0, ob0 = u.T, vt.T
    frames, seen = [], set()
    base = np.diag(lam)
    for ca, _ in CLIFFORDS:
        for cb, _ in CLIFFORDS:
            d = ca @ base @ cb
            if np.abs(d - np.diag(np.diag(d))).max() > 1e-12:
                continue
            key = tuple(np.round(np.diag(d), 12) + 0.0)
            if key in seen:
                continue
            seen.add(key)
            frames.append(DiagonalFrame(np.diag(d).copy(),
                                        qchannel.unitary_from_rotation(ca @ oa0),
                                        qchannel.unitary_from_rotation(ob0 @ cb)))
    return frames


def best_dot_frames(ch1: QubitChannel, ch2: QubitChannel):
    """Frames maximizing lam . lam' (first maximum in the fixed frame order)."""
    fr1, fr2 = diagonal_frames(ch1), diagonal_frames(ch2)
    best, best_dot = (fr1[0], fr2[0]), float(fr1[0].lam @ fr2[0].lam)
    for a in fr1:
        for b in fr2:
            d = float(a.lam @ b.lam)
            if d > best_dot + 1e-12:
                best, best_dot = (a, b), d
    return best, best_dot


def _bell_in_frames(f1: DiagonalFrame, f2: DiagonalFrame) -> qstate.PureStateParams:
    psi = np.kron(f1.in_unitary, f2.in_unitary) @ PSI_PLUS
    return qstate.params_from_vector(psi)


def squared_norm(ch: QubitChannel) -> float:
    """Sum of squared singular values of the Bloch block."""
    return float(np.sum(np.asarray(ch.block) ** 2))


# ---------------------------------------------------------------------------
# Example 1: a pair that is EA through a decomposition G . F
# ---------------------------------------------------------------------------

EXAMPLE1_E1 = (Fraction(1, 20), Fraction(1, 20), Fraction(1))
EXAMPLE1_E2 = (Fraction(2, 3),) * 3


def _delta(n: int) -> int:
    return 1 if n == 0 else 0


def example1_f_diag() -> list[Fraction]:
    rows = []
    for m in range(4):
        for n in range(4):
            if m in (0, 3):
                rows.append(Fraction(4 + _delta(n), 5))
            else:
                rows.append(Fraction(2 - _delta(n), 5))
    return rows


def example1_g_diag() -> list[Fraction]:
    g1 = [Fraction(1), Fraction(0), Fraction(0), Fraction(1)]
    g2 = [Fraction(1)] + [Fraction(1, 3)] * 3
    return [Fraction(3, 4) * g1[m] + Fraction(1, 4) * g2[n] for m in range(4) for n in range(4)]


def example1_diagnostics(f_diag=None, g_diag=None) -> list[str]:
    """Failed checks of the Example 1 decomposition; empty means it holds."""
    f = list(example1_f_diag() if f_diag is None else f_diag)
    g = list(example1_g_diag() if g_diag is None else g_diag)
    e1 = (Fraction(1),) + EXAMPLE1_E1
    e2 = (Fraction(1),) + EXAMPLE1_E2
    problems = []
    target = [e1[m] * e2[n] for m in range(4) for n in range(4)]
    for k in range(16):
        if Fraction(g[k]) * Fraction(f[k]) != target[k]:
            problems.append(f"G.F != E1(x)E2 at diagonal entry (m={k // 4}, n={k % 4})")
    fmap = TwoQubitMap(np.diag([float(x) for x in f]))
    gmap = TwoQubitMap(np.diag([float(x) for x in g]))
    pair = qchannel.tensor(QubitChannel(np.diag([float(x) for x in e1])),
                           QubitChannel(np.diag([float(x) for x in e2])))
    if np.abs(qchannel.compose(gmap, fmap).ptm16 - pair.ptm16).max() > 1e-12:
        problems.append("G.F != E1(x)E2 in floating point beyond 1e-12")
    if qstate.min_eig_hermitian(qchannel.choi16(fmap)) < -1e-9:
        problems.append("F is not completely positive (Choi eigenvalue below -1e-9)")
    g1 = (0.0, 0.0, 1.0)
    g2 = (1 / 3, 1 / 3, 1 / 3)
    if not (rules.eb_unital_diag(*g1) and rules.eb_unital_diag(*g2)):
        problems.append("G1 or G2 is not entanglement breaking")
    g_expected = [Fraction(3, 4) * a + Fraction(1, 4) * b
                  for a in (1, 0, 0, 1) for b in (1, *[Fraction(1, 3)] * 3)]
    if [Fraction(x) for x in g] != g_expected:
        problems.append("G != 3/4 G1(x)I + 1/4 I(x)G2")
    return problems


def verify_example1(f_diag=None, g_diag=None) -> bool:
    return not example1_diagnostics(f_diag, g_diag)


def _is_example1_pair(ch1: QubitChannel, ch2: QubitChannel) -> bool:
    d1 = np.diag([1.0, *map(float, EXAMPLE1_E1)])
    d2 = np.diag([1.0, *map(float, EXAMPLE1_E2)])
    return bool(np.abs(ch1.ptm - d1).max() < 1e-12 and np.abs(ch2.ptm - d2).max() < 1e-12)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def _depolarizing_q(ch: QubitChannel) -> float | None:
    if not qchannel.is_unital(ch, 1e-12):
        return None
    q = ch.block[0, 0]
    if np.abs(ch.block - q * np.eye(3)).max() > 1e-12:
        return None
    return float(q)


def _witness_or_undecided(v: EaVerdict, m: TwoQubitMap, tol: float) -> EaVerdict:
    """Keep an analytic NotEA only when its witness clears the tolerance."""
    if v.status is not Status.NOT_EA:
        return v
    value = search.witness_value(m, v.witness)
    if value < -tol:
        return not_ea(v.criterion, v.witness, value, v.note)
    return undecided(v.criterion, value, witness=v.witness,
                     note="analytic witness within tolerance of zero")


def _unital_pair(ch1, ch2, m: TwoQubitMap, budget: SearchBudget) -> EaVerdict:
    tol = budget.tol
    (f1, f2), dot = best_dot_frames(ch1, ch2)
    if dot > 1 + 1e-12:
        witness = _bell_in_frames(f1, f2)
        value = search.witness_value(m, witness)
        if value < -tol:
            return not_ea(Criterion.DOT_PRODUCT_WITNESS, witness, value)
    if np.abs(ch1.ptm - ch2.ptm).max() < 1e-12 and squared_norm(ch1) <= 1 + 1e-12:
        return ea(Criterion.UNITAL_NECESSARY_2LEA)
    if squared_norm(ch1) <= 1 + 1e-12 and squared_norm(ch2) <= 1 + 1e-12:
        return ea(Criterion.UNITAL_SUFFICIENT)
    if _is_example1_pair(ch1, ch2) or _is_example1_pair(ch2, ch1):
        if verify_example1():
            return ea(Criterion.DECOMPOSITION, note="E1 (x) E2 = G . F with G EA")
    best = None
    for left, right in ((qchannel.overline_map(ch1), ch2), (ch1, qchannel.overline_map(ch2))):
        res = search.search_min(qchannel.tensor(left, right), budget, transpose=False)
        if best is None or res.value < best.value:
            best = res
    if best.value < -tol:
        value = search.witness_value(m, best.params)
        if value < -tol:
            return not_ea(Criterion.LEMMA1_NUMERIC, best.params, value)
    return undecided(Criterion.LEMMA1_NUMERIC, best.value,
                     note="overline maps looked positive; not a certificate")


def ea_auto(ch1: QubitChannel, ch2: QubitChannel,
            budget: SearchBudget = DEFAULT_BUDGET) -> EaVerdict:
    """Classify E1 (x) E2, preferring exact rules and recording which fired."""
    tol = budget.tol
    for ch in (ch1, ch2):
        if not qchannel.is_cptp(ch, tol):
            raise DomainError("ea_auto needs CPTP channels")
    if rules.is_eb(ch1, tol) or rules.is_eb(ch2, tol):
        return ea(Criterion.EB_FACTOR)
    m = qchannel.tensor(qchannel.with_cp_flag(ch1, tol), qchannel.with_cp_flag(ch2, tol))
    q1, q2 = _depolarizing_q(ch1), _depolarizing_q(ch2)
    if q1 is not None and q2 is not None:
        return _witness_or_undecided(rules.ea_depolarizing(q1, q2), m, tol)
    e1, e2 = extremal.extremal_frame(ch1), extremal.extremal_frame(ch2)
    if e1 is not None and e2 is not None:
        return extremal.ea_extremal_frames(ch1, ch2, e1, e2, tol, budget)
    if qchannel.is_unital(ch1) and qchannel.is_unital(ch2):
        return _unital_pair(ch1, ch2, m, budget)
    g1, g2 = gad.recognize_gad(ch1), gad.recognize_gad(ch2)
    if g1 is not None and g2 is not None:
        value = search.witness_value(m, BELL_PARAMS)
        if value < -tol:
            return not_ea(Criterion.GAD_BOUNDARY, BELL_PARAMS, value,
                          note="Bell state stays entangled")
    return search.ea_numeric(m, budget)


# ---------------------------------------------------------------------------
# Mixtures of 2-LEA and EB channels
# ---------------------------------------------------------------------------


def is_two_lea(ch: QubitChannel, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    """2-LEA check: exact for unital channels, witness-free search otherwise."""
    if qchannel.is_unital(ch):
        return squared_norm(ch) <= 1 + 1e-12
    if rules.is_eb(ch, budget.tol):
        return True
    c = qchannel.with_cp_flag(ch, budget.tol)
    return search.ea_numeric(qchannel.tensor(c, c), budget).status is not Status.NOT_EA


def verify_property7(e: QubitChannel, f: QubitChannel, mu: float,
                     budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    """mu E + (1 - mu) F stays 2-LEA for 2-LEA E and EB F."""
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mixing weight {mu} outside [0, 1]")
    if not is_two_lea(e, budget):
        raise DomainError("first channel is not 2-LEA")
    if not rules.is_eb(f, budget.tol):
        raise DomainError("second channel is not entanglement breaking")
    mixture = qchannel.mix(mu, qchannel.with_cp_flag(e), qchannel.with_cp_flag(f))
    return is_two_lea(mixture, budget)


__all__ = [
    "DiagonalFrame", "diagonal_frames", "best_dot_frames", "squared_norm",
    "example1_f_diag", "example1_g_diag", "example1_diagnostics", "verify_example1",
    "ea_auto", "is_two_lea", "verify_property7",
]
