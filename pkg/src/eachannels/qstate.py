"""Two-qubit states, partial operations, separability tests and a small
Hermitian eigensolver.

Basis order is |00>, |01>, |10>, |11>; qubit 1 is the left tensor factor.
Density matrices are plain ``numpy`` arrays of shape (4, 4).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

DEFAULT_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.array([I2, SX, SY, SZ])
# PAULI2[4*m + n] = sigma_m (x) sigma_n
PAULI2 = np.array([np.kron(a, b) for a in PAULI for b in PAULI])
# transposition flips the sign of sigma_y only
_PT_SIGN = np.array([1.0, 1.0, -1.0, 1.0])
PT2_SIGN = np.tile(_PT_SIGN, 4)
PT1_SIGN = np.repeat(_PT_SIGN, 4)

PSI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class PureStateParams:
    """Schmidt coordinates of a pure two-qubit state.

    The state is ``sqrt(p)|phi,chi> + sqrt(1-p) e^{i alpha} |phi_perp,chi_perp>``
    with the local bases fixed by ``(theta1, phi1)`` and ``(theta2, phi2)``.
    ``alpha`` is an extra relative phase; at ``alpha=0`` this is the usual
    five-angle family.
    """

    p: float
    theta1: float
    phi1: float
    theta2: float
    phi2: float
    alpha: float = 0.0

    def __post_init__(self):
        eps = 1e-12
        checks = [
            ("p", self.p, 0.0, 1.0),
            ("theta1", self.theta1, 0.0, math.pi),
            ("theta2", self.theta2, 0.0, math.pi),
            ("phi1", self.phi1, 0.0, TWO_PI),
            ("phi2", self.phi2, 0.0, TWO_PI),
            ("alpha", self.alpha, 0.0, TWO_PI),
        ]
        for name, value, lo, hi in checks:
            if not (lo - eps <= value <= hi + eps):
                raise DomainError(f"{name}={value} outside [{lo}, {hi}]")

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.theta1, self.phi1, self.theta2, self.phi2, self.alpha])

    def swapped(self) -> "PureStateParams":
        """Parameters of the same state with the two qubits exchanged."""
        return PureStateParams(self.p, self.theta2, self.phi2, self.theta1, self.phi1, self.alpha)

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "theta1": self.theta1,
            "phi1": self.phi1,
            "theta2": self.theta2,
            "phi2": self.phi2,
            "alpha": self.alpha,
        }


BELL_PARAMS = PureStateParams(0.5, 0.0, 0.0, 0.0, 0.0)


def basis_pair(theta, phi):
    """Orthonormal qubit basis (|v>, |v_perp>) for Bloch angles; broadcasts."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    em, ep = np.exp(-0.5j * phi), np.exp(0.5j * phi)
    v = np.stack([c * em, s * ep], axis=-1)
    v_perp = np.stack([-s * em, c * ep], axis=-1)
    return v, v_perp


def schmidt_vectors(params: np.ndarray) -> np.ndarray:
    """State vectors for an (N, 5) or (N, 6) array of Schmidt coordinates.

    No range checks; used by the witness search on already-mapped points.
    """
    params = np.atleast_2d(params)
    p = params[:, 0]
    a, a_perp = basis_pair(params[:, 1], params[:, 2])
    b, b_perp = basis_pair(params[:, 3], params[:, 4])
    alpha = params[:, 5] if params.shape[1] > 5 else np.zeros(len(p))
    first = np.einsum("ni,nj->nij", a, b).reshape(-1, 4)
    second = np.einsum("ni,nj->nij", a_perp, b_perp).reshape(-1, 4)
    return (np.sqrt(p)[:, None] * first
            + (np.sqrt(1 - p) * np.exp(1j * alpha))[:, None] * second)


def schmidt_vector(params: PureStateParams) -> np.ndarray:
    return schmidt_vectors(params.as_array())[0]


def schmidt_pure_state(params: PureStateParams) -> np.ndarray:
    """Rank-one density matrix of the Schmidt-parametrized state."""
    psi = schmidt_vector(params)
    return np.outer(psi, psi.conj())


def _bloch_angles(v: np.ndarray) -> tuple[float, float]:
    rho = np.outer(v, v.conj())
    n = [np.trace(rho @ s).real for s in (SX, SY, SZ)]
    theta = math.acos(max(-1.0, min(1.0, n[2])))
    phi = math.atan2(n[1], n[0]) % TWO_PI
    return theta, phi


def params_from_vector(psi: np.ndarray) -> PureStateParams:
    """Schmidt coordinates of an arbitrary normalized two-qubit vector."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    u, s, vh = np.linalg.svd(psi.reshape(2, 2))
    theta1, phi1 = _bloch_angles(u[:, 0])
    theta2, phi2 = _bloch_angles(vh[0])
    a, a_perp = basis_pair(theta1, phi1)
    b, b_perp = basis_pair(theta2, phi2)
    # phases of the singular vectors relative to the canonical basis vectors
    first = np.vdot(np.kron(a, b), psi)
    second = np.vdot(np.kron(a_perp, b_perp), psi)
    p = float(min(1.0, max(0.0, abs(first) ** 2)))
    if abs(second) < 1e-14 or abs(first) < 1e-14:
        alpha = 0.0
    else:
        alpha = (np.angle(second) - np.angle(first)) % TWO_PI
    if abs(first) < 1e-14:
        # p = 0: the state is |phi_perp, chi_perp> up to phase
        p = 0.0
    return PureStateParams(p, theta1, phi1, theta2, phi2, float(alpha))


def validate_density_matrix(rho, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > 1e-12 * max(1.0, np.abs(rho).max()) + 1e-12:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-12 + tol:
        raise DomainError(f"density matrix has trace {np.trace(rho).real}")
    if min_eig_hermitian(rho) < -tol:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def partial_trace(rho: np.ndarray, traced: int) -> np.ndarray:
    """Trace out qubit ``traced`` (1 or 2) of a 4x4 operator."""
    t = np.asarray(rho).reshape(2, 2, 2, 2)
    if traced == 1:
        return np.einsum("ijik->jk", t)
    if traced == 2:
        return np.einsum("ijkj->ik", t)
    raise DomainError(f"subsystem must be 1 or 2, got {traced}")


def partial_transpose(rho: np.ndarray, subsystem: int = 2) -> np.ndarray:
    t = np.asarray(rho).reshape(2, 2, 2, 2)
    if subsystem == 2:
        return t.transpose(0, 3, 2, 1).reshape(4, 4)
    if subsystem == 1:
        return t.transpose(2, 1, 0, 3).reshape(4, 4)
    raise DomainError(f"subsystem must be 1 or 2, got {subsystem}")


def min_pt_eig(rho: np.ndarray) -> float:
    """Smallest eigenvalue of the partial transpose (negative means entangled)."""
    return min_eig_hermitian(partial_transpose(rho, 2))


def is_ppt(rho: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Peres-Horodecki test; for two qubits PPT is equivalent to separability."""
    return min_pt_eig(rho) >= -tol


def reduction_check(rho: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    rho = np.asarray(rho)
    left = np.kron(partial_trace(rho, 2), I2) - rho
    right = np.kron(I2, partial_trace(rho, 1)) - rho
    return min_eig_hermitian(left) >= -tol and min_eig_hermitian(right) >= -tol


def pauli_coefficients(rho: np.ndarray) -> np.ndarray:
    """Real vector c[4m+n] = tr[rho sigma_m (x) sigma_n]."""
    return np.einsum("kji,ij->k", PAULI2, np.asarray(rho)).real


def from_pauli_coefficients(c: np.ndarray) -> np.ndarray:
    return np.einsum("k,kij->ij", np.asarray(c, dtype=float), PAULI2) / 4


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver for small Hermitian matrices
# ---------------------------------------------------------------------------


def jacobi_eigh(h, tol: float = 1e-13, max_sweeps: int = 100):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns. Sweeps stop once the off-diagonal Frobenius norm
    drops below ``tol * max(1, ||h||_F)``.
    """
    a = np.array(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if np.abs(a - a.conj().T).max(initial=0.0) > 1e-10:
        raise DomainError("matrix is not Hermitian within 1e-10")
    a = (a + a.conj().T) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if math.sqrt(float(np.sum(np.abs(a[offdiag]) ** 2))) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2 * mag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1 + tau * tau))
                c = 1 / math.sqrt(1 + t * t)
                s = t * c
                rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ rot
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def spectrum(h) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending."""
    return jacobi_eigh(h)[0]


def min_eig_hermitian(h) -> float:
    return float(jacobi_eigh(h)[0][0])
