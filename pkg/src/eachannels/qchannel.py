"""Qubit channel representations and the algebra of two-qubit maps.

The canonical form of a qubit map is its Pauli transfer matrix (PTM)
``R[j, k] = 1/2 tr[sigma_j E(sigma_k)]``; Kraus operators and Choi matrices
are derived views. Two-qubit maps are 16x16 PTMs in the basis
``sigma_m (x) sigma_n`` indexed ``4*m + n``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qstate
from .errors import DomainError
from .qstate import DEFAULT_TOL, I2, PAULI, PAULI2, PSI_PLUS


class CPFlag(enum.Enum):
    CP = "CP"
    NOT_CP = "not-CP"
    UNKNOWN = "unknown"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


def _combine_cp(a: CPFlag, b: CPFlag) -> CPFlag:
    return CPFlag.CP if a is CPFlag.CP and b is CPFlag.CP else CPFlag.UNKNOWN


@dataclass(frozen=True, eq=False)
class QubitChannel:
    """A trace-preserving qubit map held as its 4x4 real PTM.

    ``kraus`` is kept when the map was built from Kraus operators. ``cp``
    records complete positivity when known; maps like the overline of a
    non-EB channel reuse this container with ``cp=CPFlag.NOT_CP``.
    """

    ptm: np.ndarray
    kraus: tuple | None = None
    cp: CPFlag = CPFlag.UNKNOWN
    label: str = ""

    def __post_init__(self):
        ptm = np.asarray(self.ptm, dtype=float)
        if ptm.shape != (4, 4):
            raise DomainError(f"PTM must be 4x4, got {ptm.shape}")
        if np.abs(ptm[0] - [1, 0, 0, 0]).max() > 1e-10:
            raise DomainError(f"map is not trace preserving: first PTM row {ptm[0]}")
        ptm = ptm.copy()
        ptm[0] = [1.0, 0.0, 0.0, 0.0]
        object.__setattr__(self, "ptm", _frozen(ptm))
        if self.kraus is not None:
            object.__setattr__(self, "kraus", tuple(_frozen(k) for k in self.kraus))

    @property
    def block(self) -> np.ndarray:
        """Lower-right 3x3 block acting on Bloch vectors."""
        return self.ptm[1:, 1:]

    @property
    def translation(self) -> np.ndarray:
        return self.ptm[1:, 0]

    def __repr__(self):
        name = self.label or "QubitChannel"
        return f"<{name} ptm={np.round(self.ptm, 6).tolist()} cp={self.cp.value}>"


@dataclass(frozen=True, eq=False)
class TwoQubitMap:
    ptm16: np.ndarray
    cp: CPFlag = CPFlag.UNKNOWN
    label: str = ""

    def __post_init__(self):
        ptm = np.asarray(self.ptm16, dtype=float)
        if ptm.shape != (16, 16):
            raise DomainError(f"two-qubit PTM must be 16x16, got {ptm.shape}")
        e0 = np.zeros(16)
        e0[0] = 1.0
        if np.abs(ptm[0] - e0).max() > 1e-10:
            raise DomainError("two-qubit map is not trace preserving")
        ptm = ptm.copy()
        ptm[0] = e0
        object.__setattr__(self, "ptm16", _frozen(ptm))


# ---------------------------------------------------------------------------
# Representation changes
# ---------------------------------------------------------------------------


def ptm_from_kraus(kraus: Sequence[np.ndarray], label: str = "") -> QubitChannel:
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    if not ops or any(k.shape != (2, 2) for k in ops):
        raise DomainError("Kraus operators must be a non-empty list of 2x2 matrices")
    completeness = sum(k.conj().T @ k for k in ops)
    if np.abs(completeness - I2).max() > 1e-10:
        raise DomainError("Kraus operators are not complete: sum K^dag K != I")
    image = [sum(k @ s @ k.conj().T for k in ops) for s in PAULI]
    ptm = np.array([[0.5 * np.trace(sj @ image[k]).real for k in range(4)] for sj in PAULI])
    return QubitChannel(ptm, kraus=tuple(ops), cp=CPFlag.CP, label=label)


def apply_channel(ch: QubitChannel, rho: np.ndarray) -> np.ndarray:
    """Action of a qubit map on a 2x2 operator."""
    c = np.array([np.trace(np.asarray(rho) @ s).real for s in PAULI])
    out = ch.ptm @ c
    return 0.5 * np.einsum("k,kij->ij", out, PAULI)


def choi_from_channel(ch: QubitChannel) -> np.ndarray:
    """(E (x) I)[|psi+><psi+|]; the channel acts on the left factor."""
    return apply(tensor(ch, identity_channel()), np.outer(PSI_PLUS, PSI_PLUS.conj()), check=False)


def channel_from_choi(choi: np.ndarray, tol: float = DEFAULT_TOL) -> QubitChannel:
    """Recover Kraus operators (and the PTM) from a Choi matrix."""
    choi = np.asarray(choi, dtype=complex)
    if choi.shape != (4, 4):
        raise DomainError("Choi matrix must be 4x4")
    if np.abs(choi - choi.conj().T).max() > 1e-12:
        raise DomainError("Choi matrix is not Hermitian")
    if abs(np.trace(choi) - 1) > 1e-12:
        raise DomainError("Choi matrix must have unit trace")
    if np.abs(qstate.partial_trace(choi, 1) - I2 / 2).max() > 1e-10:
        raise DomainError("Choi matrix does not describe a trace-preserving map")
    w, v = qstate.jacobi_eigh(choi)
    if w[0] < -tol:
        raise DomainError(f"Choi matrix has eigenvalue {w[0]:.3g} < 0: not a channel")
    # column |v> = sum_{o,a} v[2o+a] |o>|a> corresponds to K[o, a] * sqrt(1/2)
    kraus = [math.sqrt(2 * wi) * v[:, i].reshape(2, 2) for i, wi in enumerate(w) if wi > 1e-14]
    ops = np.array(kraus)
    # enforce completeness exactly up to rounding left by the eigensolver
    completeness = sum(k.conj().T @ k for k in ops)
    evals, evecs = np.linalg.eigh(completeness)
    fix = evecs @ np.diag(evals ** -0.5) @ evecs.conj().T
    return ptm_from_kraus([k @ fix for k in ops])


def choi16(m: TwoQubitMap) -> np.ndarray:
    """16x16 Choi matrix (M (x) I_4)[|Phi><Phi|] of a two-qubit map."""
    units = np.zeros((4, 4, 4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            e = np.zeros((4, 4), dtype=complex)
            e[i, j] = 1.0
            units[i, j] = apply(m, e, check=False)
    # sum_ij M(|i><j|) (x) |i><j| / 4, indexed [(a, i), (b, j)]
    return units.transpose(2, 0, 3, 1).reshape(16, 16) / 4


def is_cptp(ch: QubitChannel, tol: float = DEFAULT_TOL) -> bool:
    if np.abs(ch.ptm[0] - [1, 0, 0, 0]).max() > tol:
        return False
    return qstate.min_eig_hermitian(choi_from_channel(ch)) >= -tol


def is_cp16(m: TwoQubitMap, tol: float = DEFAULT_TOL) -> bool:
    return qstate.min_eig_hermitian(choi16(m)) >= -tol


def is_unital(ch: QubitChannel, tol: float = 1e-10) -> bool:
    return bool(np.abs(ch.ptm[:, 0] - [1, 0, 0, 0]).max() <= tol)


def with_cp_flag(ch: QubitChannel, tol: float = DEFAULT_TOL) -> QubitChannel:
    """Copy of ``ch`` with its CP flag computed from the Choi matrix."""
    flag = CPFlag.CP if is_cptp(ch, tol) else CPFlag.NOT_CP
    return QubitChannel(ch.ptm, kraus=ch.kraus, cp=flag, label=ch.label)


def identity_channel() -> QubitChannel:
    return QubitChannel(np.eye(4), kraus=(I2,), cp=CPFlag.CP, label="id")


def overline_map(ch: QubitChannel, tol: float = 1e-10) -> QubitChannel:
    """Unital map with the Bloch block negated, i.e. the reduction map after ``ch``.

    CP exactly when ``ch`` is entanglement breaking.
    """
    if not is_unital(ch, tol):
        raise DomainError("overline map is defined for unital channels only")
    ptm = np.array(ch.ptm)
    ptm[1:, 1:] *= -1
    ptm[1:, 0] = 0.0
    return with_cp_flag(QubitChannel(ptm, label=f"overline({ch.label})" if ch.label else ""))


def mix(mu: float, a: QubitChannel, b: QubitChannel) -> QubitChannel:
    """Convex combination ``mu a + (1-mu) b``."""
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mixing weight {mu} outside [0, 1]")
    flag = _combine_cp(a.cp, b.cp)
    return QubitChannel(mu * a.ptm + (1 - mu) * b.ptm, cp=flag)


# ---------------------------------------------------------------------------
# Two-qubit maps
# ---------------------------------------------------------------------------


def tensor(ch1: QubitChannel, ch2: QubitChannel) -> TwoQubitMap:
    return TwoQubitMap(np.kron(ch1.ptm, ch2.ptm), cp=_combine_cp(ch1.cp, ch2.cp),
                       label=f"{ch1.label}*{ch2.label}" if ch1.label or ch2.label else "")


def compose(outer: TwoQubitMap, inner: TwoQubitMap) -> TwoQubitMap:
    """The map ``outer . inner`` (inner acts first)."""
    return TwoQubitMap(outer.ptm16 @ inner.ptm16, cp=_combine_cp(outer.cp, inner.cp))


def mix16(weights: Sequence[float], maps: Sequence[TwoQubitMap]) -> TwoQubitMap:
    if abs(sum(weights) - 1) > 1e-12 or min(weights) < 0:
        raise DomainError("mixture weights must be a probability vector")
    flag = CPFlag.CP if all(m.cp is CPFlag.CP for m in maps) else CPFlag.UNKNOWN
    return TwoQubitMap(sum(w * m.ptm16 for w, m in zip(weights, maps)), cp=flag)


def identity_map16() -> TwoQubitMap:
    return TwoQubitMap(np.eye(16), cp=CPFlag.CP)


def swap_map(m: TwoQubitMap) -> TwoQubitMap:
    """Conjugate a two-qubit map by the qubit swap."""
    perm = np.array([4 * (k % 4) + k // 4 for k in range(16)])
    return TwoQubitMap(m.ptm16[np.ix_(perm, perm)], cp=m.cp)


def apply(m: TwoQubitMap, rho: np.ndarray, check: bool = True) -> np.ndarray:
    """Apply a two-qubit map to a 4x4 operator through its Pauli expansion.

    The output is Hermitian; it is a density matrix when ``m`` is positive.
    """
    rho = np.asarray(rho, dtype=complex)
    if check:
        qstate.validate_density_matrix(rho)
    if check or np.abs(rho - rho.conj().T).max() < 1e-14:
        c = qstate.pauli_coefficients(rho)
        return qstate.from_pauli_coefficients(m.ptm16 @ c)
    # non-Hermitian operator units: expand real and imaginary Hermitian parts
    herm = (rho + rho.conj().T) / 2
    anti = (rho - rho.conj().T) / 2j
    return (qstate.from_pauli_coefficients(m.ptm16 @ qstate.pauli_coefficients(herm))
            + 1j * qstate.from_pauli_coefficients(m.ptm16 @ qstate.pauli_coefficients(anti)))


def ptm16_from_kraus(kraus: Sequence[np.ndarray]) -> TwoQubitMap:
    """16x16 PTM of a general (possibly non-local) two-qubit channel."""
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    if np.abs(sum(k.conj().T @ k for k in ops) - np.eye(4)).max() > 1e-10:
        raise DomainError("two-qubit Kraus operators are not complete")
    image = np.array([sum(k @ s @ k.conj().T for k in ops) for s in PAULI2])
    ptm = np.einsum("jab,kba->jk", PAULI2, image).real / 4
    return TwoQubitMap(ptm, cp=CPFlag.CP)


# ---------------------------------------------------------------------------
# Local unitary frames
# ---------------------------------------------------------------------------


def rotation_of_unitary(u: np.ndarray) -> np.ndarray:
    """SO(3) matrix O with u sigma_k u^dag = sum_j O[j, k] sigma_j."""
    u = np.asarray(u, dtype=complex)
    return np.array([[0.5 * np.trace(PAULI[j] @ u @ PAULI[k] @ u.conj().T).real
                      for k in range(1, 4)] for j in range(1, 4)])


def unitary_from_rotation(o: np.ndarray) -> np.ndarray:
    """An SU(2) matrix whose adjoint action on Bloch vectors is ``o``."""
    o = np.asarray(o, dtype=float)
    tr = np.trace(o)
    # Shepperd's method: pick the largest quaternion component
    cands = [1 + tr, 1 + o[0, 0] - o[1, 1] - o[2, 2],
             1 - o[0, 0] + o[1, 1] - o[2, 2], 1 - o[0, 0] - o[1, 1] + o[2, 2]]
    k = int(np.argmax(cands))
    r = math.sqrt(max(cands[k], 0.0)) / 2
    if k == 0:
        w = r
        x, y, z = (o[2, 1] - o[1, 2]) / (4 * r), (o[0, 2] - o[2, 0]) / (4 * r), (o[1, 0] - o[0, 1]) / (4 * r)
    elif k == 1:
        x = r
        w, y, z = (o[2, 1] - o[1, 2]) / (4 * r), (o[0, 1] + o[1, 0]) / (4 * r), (o[0, 2] + o[2, 0]) / (4 * r)
    elif k == 2:
        y = r
        w, x, z = (o[0, 2] - o[2, 0]) / (4 * r), (o[0, 1] + o[1, 0]) / (4 * r), (o[1, 2] + o[2, 1]) / (4 * r)
    else:
        z = r
        w, x, y = (o[1, 0] - o[0, 1]) / (4 * r), (o[0, 2] + o[2, 0]) / (4 * r), (o[1, 2] + o[2, 1]) / (4 * r)
    return w * I2 - 1j * (x * PAULI[1] + y * PAULI[2] + z * PAULI[3])


def _build_clifford_group():
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    s = np.diag([1, 1j])
    found = {}
    frontier = [I2]
    while frontier:
        nxt = []
        for u in frontier:
            key = tuple(np.round(rotation_of_unitary(u), 6).ravel())
            if key in found:
                continue
            found[key] = u
            nxt.extend([h @ u, s @ u])
        frontier = nxt
    # deterministic order: sort by rotation entries
    return [(np.round(np.array(k).reshape(3, 3)), found[k]) for k in sorted(found)]


CLIFFORDS = _build_clifford_group()


def signed_singular_values(ch: QubitChannel):
    """Signed singular values of the Bloch block: block = U diag(lam) Vt, U, Vt in SO(3).

    Diagonal blocks are returned as-is (with signs) and identity frames.
    """
    t = np.array(ch.block)
    if np.abs(t - np.diag(np.diag(t))).max() < 1e-13:
        return np.diag(t).copy(), np.eye(3), np.eye(3)
    u, s, vt = np.linalg.svd(t)
    s = s.copy()
    if np.linalg.det(u) < 0:
        u[:, 2] *= -1
        s[2] *= -1
    if np.linalg.det(vt) < 0:
        vt[2] *= -1
        s[2] *= -1
    return s, u, vt


def is_diagonal_unital(ch: QubitChannel, tol: float = 1e-12) -> bool:
    return is_unital(ch, tol) and np.abs(ch.block - np.diag(np.diag(ch.block))).max() <= tol


# ---------------------------------------------------------------------------
# Random channels (test helpers)
# ---------------------------------------------------------------------------


def random_kraus(rng: np.random.Generator, rank: int | None = None, dim: int = 2):
    """Kraus operators of a random channel from a random Stinespring isometry."""
    rank = rank or int(rng.integers(1, dim * dim + 1))
    g = rng.normal(size=(dim * rank, dim)) + 1j * rng.normal(size=(dim * rank, dim))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return [q[i * dim:(i + 1) * dim] for i in range(rank)]


def random_channel(rng: np.random.Generator, rank: int | None = None) -> QubitChannel:
    return ptm_from_kraus(random_kraus(rng, rank))


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def channel_to_record(ch: QubitChannel, repr: str = "ptm") -> dict:
    if repr == "ptm":
        return {"repr": "ptm", "matrix": [float(x) for x in ch.ptm.ravel()]}
    if repr == "kraus":
        if ch.kraus is None:
            ch = channel_from_choi(choi_from_channel(ch))
        return {"repr": "kraus",
                "ops": [[[[float(z.real), float(z.imag)] for z in row] for row in k] for k in ch.kraus]}
    raise DomainError(f"unknown channel representation {repr!r}")


def channel_from_record(rec: dict) -> QubitChannel:
    kind = rec.get("repr")
    if kind == "ptm":
        m = np.asarray(rec["matrix"], dtype=float)
        if m.size != 16:
            raise DomainError("ptm record needs 16 entries")
        return with_cp_flag(QubitChannel(m.reshape(4, 4)))
    if kind == "kraus":
        ops = [np.array([[complex(re, im) for re, im in row] for row in op]) for op in rec["ops"]]
        return ptm_from_kraus(ops)
    raise DomainError(f"unknown channel representation {kind!r}")


IDENTITY = identity_channel()
