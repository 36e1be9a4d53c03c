"""Extremal (Ruskai-form) channel pairs: frame canonicalization, the
reduction-operator test state and the EA rule."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import qchannel, qstate
from ..errors import DomainError
from ..families import ruskai_extremal
from ..qchannel import CLIFFORDS, QubitChannel
from ..qstate import I2, TWO_PI, PureStateParams
from .search import ea_numeric, witness_value
from .verdict import (DEFAULT_BUDGET, Criterion, EaVerdict, SearchBudget, Status, ea, not_ea,
                      undecided)

_MATCH = 1e-9
_EB_EPS = 1e-12


@dataclass(frozen=True)
class ExtremalFrame:
    """``diag(1, O_A) R diag(1, O_B)`` is the canonical extremal PTM with
    block ``diag(a, b, a b)``, translation ``(0, 0, t)``, ``a >= b >= 0`` and
    ``t = sqrt((1 - a^2)(1 - b^2)) >= 0``."""

    a: float
    b: float
    t: float
    out_unitary: np.ndarray  # A: canonical = Ad_A . E . Ad_B
    in_unitary: np.ndarray   # B

    @property
    def cos_u(self) -> float:
        return self.a

    @property
    def cos_v(self) -> float:
        return self.b

    @property
    def sin_u(self) -> float:
        # t = sin u sin v; dividing is well conditioned where a = cos u is near 1
        sv = self.sin_v
        if sv > 1e-6:
            return min(1.0, self.t / sv)
        return math.sqrt(max(0.0, 1 - self.a * self.a))

    @property
    def sin_v(self) -> float:
        return math.sqrt(max(0.0, 1 - self.b * self.b))


def _canonical_form(r: np.ndarray, tol: float):
    if np.abs(r[1:, 1:] - np.diag(np.diag(r[1:, 1:]))).max() > tol:
        return None
    if abs(r[1, 0]) > tol or abs(r[2, 0]) > tol:
        return None
    a, b, c = r[1, 1], r[2, 2], r[3, 3]
    t = r[3, 0]
    # order and signs are checked tightly: a Clifford frame realizing the
    # exact order always exists, and a loosely ordered one biases <M>
    if not (a >= b - _EB_EPS and b >= -_EB_EPS and t >= -_EB_EPS):
        return None
    if abs(c - a * b) > tol or abs(t * t - (1 - a * a) * (1 - b * b)) > tol:
        return None
    a = float(min(a, 1.0))
    b = float(max(min(b, a), 0.0))
    if a - b < 1e-12:
        # sqrt(a^2 - b^2) would amplify rounding noise
        b = a
    return a, b, float(max(t, 0.0))


def extremal_frame(ch: QubitChannel, tol: float = _MATCH) -> ExtremalFrame | None:
    """Clifford frame bringing ``ch`` to canonical extremal form, if one exists.

    Returns None for channels that are not Clifford-equivalent to the
    extremal family. The first match in the fixed Clifford order wins.
    """
    r = np.asarray(ch.ptm)
    for oa, ua in CLIFFORDS:
        left = np.eye(4)
        left[1:, 1:] = oa
        lr = left @ r
        for ob, ub in CLIFFORDS:
            right = np.eye(4)
            right[1:, 1:] = ob
            form = _canonical_form(lr @ right, tol)
            if form is not None:
                return ExtremalFrame(*form, out_unitary=ua, in_unitary=ub)
    return None


def m_operator(out: np.ndarray) -> np.ndarray:
    """Reduction-criterion operator Tr_2[out] (x) I - out."""
    return np.kron(qstate.partial_trace(out, 2), I2) - out


def _input_angle(fr: ExtremalFrame) -> float:
    # cos(theta) ~ sin u cos v, sin(theta) ~ sqrt(cos^2 u - cos^2 v), common factor cos u sin v
    s = math.sqrt(max(0.0, fr.a * fr.a - fr.b * fr.b))
    c = fr.sin_u * fr.b
    if s == 0.0 and c == 0.0:
        return 0.0
    return math.atan2(s, c)


def _bloch_params(n: np.ndarray) -> tuple[float, float]:
    norm = float(np.linalg.norm(n))
    theta = math.acos(max(-1.0, min(1.0, n[2] / norm)))
    phi = math.atan2(n[1], n[0]) % TWO_PI if math.hypot(n[0], n[1]) > 1e-15 else 0.0
    return theta, phi


def closed_form_terms(f1: ExtremalFrame, f2: ExtremalFrame) -> tuple[float, float, float]:
    """(K, X, Y) with 4<psi_p|M|psi_p> = K - (1-2p) X - 4 sqrt(p(1-p)) Y."""
    su1, su2 = f1.sin_u, f2.sin_u
    cu1, cu2, cv1, cv2 = f1.a, f2.a, f1.b, f2.b
    k = 1 - su1 ** 2 * su2 ** 2 - cu1 ** 2 * cu2 ** 2
    x = su1 ** 2 - su2 ** 2
    y = cv1 * cv2 + su1 * su2 * math.sqrt(max(0.0, (cu1 ** 2 - cv1 ** 2) * (cu2 ** 2 - cv2 ** 2)))
    return k, x, y


def closed_form_m(f1: ExtremalFrame, f2: ExtremalFrame, p: float) -> float:
    k, x, y = closed_form_terms(f1, f2)
    return (k - (1 - 2 * p) * x - 4 * math.sqrt(p * (1 - p)) * y) / 4


@dataclass(frozen=True)
class ExtremalTestState:
    input: PureStateParams
    test: PureStateParams
    m_value: float
    p_star: float
    input_vector: np.ndarray
    test_vector: np.ndarray


def _frames(u1, v1, u2, v2):
    frames = []
    for u, v in ((u1, v1), (u2, v2)):
        fr = extremal_frame(ruskai_extremal(u, v))
        if fr is None:  # pragma: no cover - every Ruskai channel has a frame
            raise DomainError(f"no canonical frame for extremal(u={u}, v={v})")
        frames.append(fr)
    return frames


def build_test_state(f1: ExtremalFrame, f2: ExtremalFrame) -> ExtremalTestState:
    if f1.a * f1.b < _EB_EPS or f2.a * f2.b < _EB_EPS:
        raise DomainError("an entanglement-breaking factor has no test state")
    th1, th2 = _input_angle(f1), _input_angle(f2)
    a, a_perp = qstate.basis_pair(th1, 0.0)
    b, b_perp = qstate.basis_pair(th2, 0.0)
    psi_c = (np.kron(a, b) + np.kron(a_perp, b_perp)) / math.sqrt(2)
    # pure outputs of the canonical channels on the first basis vectors
    outs = []
    for fr, th in ((f1, th1), (f2, th2)):
        n = np.array([fr.a * math.sin(th), 0.0, fr.a * fr.b * math.cos(th) + fr.t])
        outs.append(_bloch_params(n))
    k, x, y = closed_form_terms(f1, f2)
    rad = math.hypot(x, 2 * y)
    p_star = 0.5 if rad == 0.0 else 0.5 * (1 - x / rad)
    xi, xi_perp = qstate.basis_pair(*outs[0])
    ze, ze_perp = qstate.basis_pair(*outs[1])
    test_c = math.sqrt(p_star) * np.kron(xi, ze) + math.sqrt(1 - p_star) * np.kron(xi_perp, ze_perp)
    # back to the original frame: input (B1 (x) B2) psi_c, test (A1^dag (x) A2^dag) test_c
    psi = np.kron(f1.in_unitary, f2.in_unitary) @ psi_c
    test = np.kron(f1.out_unitary.conj().T, f2.out_unitary.conj().T) @ test_c
    return ExtremalTestState(qstate.params_from_vector(psi), qstate.params_from_vector(test),
                             (k - rad) / 4, p_star, psi, test)


def extremal_test_state(u1: float, v1: float, u2: float, v2: float) -> ExtremalTestState:
    """Input state, minimizing test state and closed-form <M> for an extremal pair.

    The reduction operator of the output on the input state has expectation
    ``m_value`` on the test state; a negative value certifies entanglement.
    """
    return build_test_state(*_frames(u1, v1, u2, v2))


def direct_m_value(ch1: QubitChannel, ch2: QubitChannel, st: ExtremalTestState) -> float:
    """<test|M|test> by explicit matrix construction."""
    rho = np.outer(st.input_vector, st.input_vector.conj())
    out = qchannel.apply(qchannel.tensor(ch1, ch2), rho, check=False)
    return float(np.vdot(st.test_vector, m_operator(out) @ st.test_vector).real)


def ea_extremal_frames(ch1: QubitChannel, ch2: QubitChannel, f1: ExtremalFrame,
                       f2: ExtremalFrame, tol: float = qstate.DEFAULT_TOL,
                       budget: SearchBudget | None = None) -> EaVerdict:
    if f1.a * f1.b <= _EB_EPS or f2.a * f2.b <= _EB_EPS:
        return ea(Criterion.EXTREMAL_RULE, note="an entanglement-breaking factor")
    st = build_test_state(f1, f2)
    pair = qchannel.tensor(ch1, ch2)
    value = witness_value(pair, st.input)
    if value < -tol:
        return not_ea(Criterion.EXTREMAL_RULE, st.input, value)
    # the constructed input is too weak here; look for another witness
    found = ea_numeric(pair, budget or DEFAULT_BUDGET)
    if found.status is Status.NOT_EA:
        return found
    return undecided(Criterion.EXTREMAL_RULE, value, witness=st.input,
                     note="no witness below tolerance; the rule says NotEA")


def ea_extremal(u1: float, v1: float, u2: float, v2: float,
                tol: float = qstate.DEFAULT_TOL, budget: SearchBudget | None = None) -> EaVerdict:
    """EA iff one factor is entanglement breaking (cos u cos v = 0)."""
    ch1, ch2 = ruskai_extremal(u1, v1), ruskai_extremal(u2, v2)
    if abs(math.cos(u1) * math.cos(v1)) <= _EB_EPS or abs(math.cos(u2) * math.cos(v2)) <= _EB_EPS:
        return ea(Criterion.EXTREMAL_RULE, note="an entanglement-breaking factor")
    f1, f2 = _frames(u1, v1, u2, v2)
    return ea_extremal_frames(ch1, ch2, f1, f2, tol, budget)
