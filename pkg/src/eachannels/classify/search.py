"""Numerical witness search over pure two-qubit inputs.

The objective is the smallest eigenvalue of the (optionally partially
transposed) output of a two-qubit map on a Schmidt-parametrized pure state.
A coarse grid picks starting cells, then a batched Nelder-Mead refines them
together with seeded random restarts. Cell ranking and refinement use a
vectorized characteristic-polynomial estimate of the smallest eigenvalue;
the reported minimum is recomputed with LAPACK. The refinement runs over six
coordinates (p, theta1, phi1, theta2, phi2, alpha) so every pure state is
reachable.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .. import qchannel, qstate
from ..errors import DomainError
from ..qchannel import CPFlag, TwoQubitMap
from ..qstate import PAULI2, PT2_SIGN, TWO_PI, PureStateParams
from .verdict import DEFAULT_BUDGET, Criterion, EaVerdict, SearchBudget, not_ea, undecided

_P = PAULI2.reshape(16, 16)
_CHUNK = 1 << 16
_REFINE_NEWTON = 40
_PERIOD = np.array([2.0, 2 * math.pi, TWO_PI, 2 * math.pi, TWO_PI, TWO_PI])
_REFLECT = np.array([True, True, False, True, False, False])
_HALF = np.array([1.0, math.pi, TWO_PI, math.pi, TWO_PI, TWO_PI])


@dataclass(frozen=True)
class SearchResult:
    value: float
    params: PureStateParams
    evaluations: int


def output_operator(ptm16: np.ndarray, transpose: bool = True) -> np.ndarray:
    """16x16 complex L with vec(out) = L vec(rho) (row-major vec).

    ``out`` is the map's output, partially transposed on qubit 2 when
    ``transpose`` is set.
    """
    sign = PT2_SIGN if transpose else np.ones(16)
    return 0.25 * _P.T @ (sign[:, None] * np.asarray(ptm16)) @ _P.conj()


def to_domain(x: np.ndarray) -> np.ndarray:
    """Fold unconstrained coordinates into the parameter box.

    p and the polar angles are reflected at their ends, azimuths wrap.
    The fold is continuous, so the objective stays continuous in x.
    """
    x = np.asarray(x, dtype=float)
    y = np.mod(x, _PERIOD)
    refl = _REFLECT & (y > _HALF)
    return np.where(refl, _PERIOD - y, y)


def _projector_vecs(psi: np.ndarray) -> np.ndarray:
    return (psi[..., :, None] * psi.conj()[..., None, :]).reshape(*psi.shape[:-1], 16)


def _min_eigs(lmap: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Exact smallest eigenvalues (LAPACK) for one map and a stack of states."""
    return np.linalg.eigvalsh((_projector_vecs(psi) @ lmap.T).reshape(-1, 4, 4))[:, 0]


def _batch_objective(lt: np.ndarray, x: np.ndarray, owner: np.ndarray) -> np.ndarray:
    """Estimated min eigenvalue at points x (N, 6); row i uses map ``owner[i]``.

    ``lt`` holds the transposed output operators, shape (P, 16, 16). Each
    row is computed on its own, so values do not depend on the batch.
    """
    psi = qstate.schmidt_vectors(to_domain(x))
    a = np.einsum("nk,nkj->nj", _projector_vecs(psi), lt[owner]).reshape(-1, 4, 4)
    return lower_eig_estimate(a, iters=_REFINE_NEWTON, overwrite=True, fixed=True)


def _grid_min_eigs(lmap: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    out = np.empty(len(vecs))
    for s in range(0, len(vecs), _CHUNK):
        out[s:s + _CHUNK] = lower_eig_estimate((vecs[s:s + _CHUNK] @ lmap.T).reshape(-1, 4, 4), iters=20,
                                                overwrite=True)
    return out


def lower_eig_estimate(a: np.ndarray, iters: int = 50, overwrite: bool = False,
                       fixed: bool = False) -> np.ndarray:
    """Approximate smallest eigenvalues of a stack of 4x4 Hermitian matrices.

    Newton on the characteristic polynomial started below the spectrum; the
    iterates rise monotonically toward the smallest root. Near multiple roots
    the coefficients limit accuracy to about 1e-8, so it ranks candidates and
    exact values come from LAPACK. With ``fixed`` every entry gets exactly
    ``iters`` steps, making each result independent of the rest of the stack.
    """
    n = len(a)
    b = np.asarray(a, dtype=complex)
    if not (overwrite and b.flags.writeable and b.flags.c_contiguous):
        b = b.copy()
    # strided view of the diagonal; fancy indexing is several times slower
    diag = b.reshape(n, 16)[:, ::5]
    shift = diag.real.sum(axis=1) / 4
    diag -= shift[:, None]
    b2 = b @ b
    # Hermitian b and b^2: tr[x y] = sum Re(x_ij conj(y_ij)), a flat real dot
    br = b.view(float).reshape(n, 32)
    b2r = b2.view(float).reshape(n, 32)
    t2 = np.einsum("ni,ni->n", br, br)
    t3 = np.einsum("ni,ni->n", b2r, br)
    t4 = np.einsum("ni,ni->n", b2r, b2r)
    # elementary symmetric polynomials of a traceless spectrum
    e2 = -t2 / 2
    e3 = t3 / 3
    e4 = (-e2 * t2 - t4) / 4
    x = -np.sqrt(0.75 * t2) - 1e-12
    scale = 1e-9 * (1 + np.abs(x).max(initial=0.0))
    for _ in range(iters):
        x2 = x * x
        val = ((x2 + e2) * x - e3) * x + e4
        # below the spectrum the derivative is negative; zero means a root
        der = (4 * x2 + 2 * e2) * x - e3
        ok = der < -1e-30
        step = np.divide(val, der, out=np.zeros_like(x), where=ok)
        x -= step
        if not fixed and np.abs(step).max(initial=0.0) < scale:
            break
    return x + shift


@functools.lru_cache(maxsize=4)
def _grid(g: int):
    """Grid points and the vectorized projectors onto their states.

    p runs over [0, 1/2] only: (p, angles, alpha) and (1-p, antipodal
    angles, -alpha) describe the same ray.
    """
    p = np.linspace(0.0, 0.5, g)
    theta = np.linspace(0.0, math.pi, g)
    phi = TWO_PI * np.arange(g) / g
    mesh = np.meshgrid(p, theta, phi, theta, phi, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh] + [np.zeros(g ** 5)], axis=1)
    vecs = _projector_vecs(qstate.schmidt_vectors(pts))
    pts.setflags(write=False)
    vecs.setflags(write=False)
    return pts, vecs


def _steps(g: int) -> np.ndarray:
    return np.array([0.5 / (g - 1), math.pi / (g - 1), TWO_PI / g,
                     math.pi / (g - 1), TWO_PI / g, math.pi / 4])


def _nelder_mead(f, x0: np.ndarray, owner: np.ndarray, steps: np.ndarray, iters: int,
                 ftol: float = 1e-12):
    """Lockstep Nelder-Mead on K starting points; returns (best x, best f, evals per start).

    ``f(x, owner)`` evaluates points x (N, n) whose rows belong to the starts
    ``owner``. Simplices evolve independently; converged ones drop out.
    """
    k, n = x0.shape
    simplex = np.repeat(x0[:, None, :], n + 1, axis=1)
    simplex[:, 1:, :] += np.eye(n) * steps
    fv = f(simplex.reshape(-1, n), np.repeat(owner, n + 1)).reshape(k, n + 1)
    evals = np.full(k, n + 1)
    active = np.ones(k, dtype=bool)
    for _ in range(iters):
        order = np.argsort(fv, axis=1, kind="stable")
        simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
        fv = np.take_along_axis(fv, order, axis=1)
        active &= (fv[:, -1] - fv[:, 0]) > ftol * (1 + np.abs(fv[:, 0]))
        if not active.any():
            break
        idx = np.flatnonzero(active)
        s, fs = simplex[idx], fv[idx]
        xo = s[:, :-1].mean(axis=1)
        d = xo - s[:, -1]
        cand = np.stack([xo + d, xo + 2 * d, xo + 0.5 * d, xo - 0.5 * d], axis=1)
        fc = f(cand.reshape(-1, n), np.repeat(owner[idx], 4)).reshape(len(idx), 4)
        evals[idx] += 4
        fr, fe, foc, fic = fc.T
        f0, fsw, fw = fs[:, 0], fs[:, -2], fs[:, -1]
        new = np.full(len(idx), -1)
        better = fr < f0
        new[better] = np.where(fe[better] < fr[better], 1, 0)
        new[(fr >= f0) & (fr < fsw)] = 0
        new[(fr >= fsw) & (fr < fw) & (foc <= fr)] = 2
        new[(fr >= fw) & (fic < fw)] = 3
        take = new >= 0
        rows = idx[take]
        simplex[rows, -1] = cand[take, new[take]]
        fv[rows, -1] = fc[take, new[take]]
        shrink = idx[~take]
        if len(shrink):
            best = simplex[shrink, :1]
            simplex[shrink, 1:] = best + 0.5 * (simplex[shrink, 1:] - best)
            fv[shrink, 1:] = f(simplex[shrink, 1:].reshape(-1, n),
                               np.repeat(owner[shrink], n)).reshape(len(shrink), n)
            evals[shrink] += n
    j = np.argmin(fv, axis=1)
    return simplex[np.arange(k), j], fv[np.arange(k), j], evals


def search_min_batch(maps, budget: SearchBudget = DEFAULT_BUDGET,
                     transpose: bool = True) -> list[SearchResult]:
    """``search_min`` for many maps at once; each result equals the single-map one.

    The grid ranks starting cells per map; all refinements then run in one
    lockstep Nelder-Mead. Final values are recomputed exactly.
    """
    maps = list(maps)
    if not maps:
        return []
    g = budget.grid_points_per_axis
    pts, vecs = _grid(g)
    n_cells = min(budget.refine_cells, len(pts))
    lmaps, starts, grid_evals = [], [], []
    for m in maps:
        lmap = output_operator(m.ptm16, transpose)
        fg = _grid_min_eigs(lmap, vecs)
        # stable sort: ties go to the lexicographically first grid point
        best = np.argsort(fg, kind="stable")[:n_cells]
        rng = np.random.default_rng(budget.seed)
        starts.append(np.vstack([pts[best], rng.uniform(0.0, 1.0, (budget.restarts, 6)) * _HALF]))
        lmaps.append(lmap)
        grid_evals.append(len(fg))
    lt = np.ascontiguousarray(np.transpose(np.array(lmaps), (0, 2, 1)))
    per_map = len(starts[0])
    owner = np.repeat(np.arange(len(maps)), per_map)
    xb, _, evals = _nelder_mead(functools.partial(_batch_objective, lt), np.vstack(starts), owner,
                                _steps(g), budget.refine_iters)
    results = []
    for i, lmap in enumerate(lmaps):
        rows = slice(i * per_map, (i + 1) * per_map)
        y = to_domain(xb[rows])
        exact = _min_eigs(lmap, qstate.schmidt_vectors(y))
        j = int(np.argmin(exact))
        params = PureStateParams(*(float(v) for v in y[j]))
        results.append(SearchResult(float(exact[j]), params, grid_evals[i] + int(evals[rows].sum())))
    return results


def search_min(m: TwoQubitMap, budget: SearchBudget = DEFAULT_BUDGET,
               transpose: bool = True) -> SearchResult:
    """Best pure input found for the min-eigenvalue objective."""
    return search_min_batch([m], budget, transpose)[0]


def _require_cp(m: TwoQubitMap, tol: float):
    if m.cp is CPFlag.NOT_CP or (m.cp is CPFlag.UNKNOWN and not qchannel.is_cp16(m, tol)):
        raise DomainError("ea_numeric needs a completely positive map; use positive_map_min")


def witness_value(m: TwoQubitMap, params: PureStateParams) -> float:
    """Re-verification: min PT eigenvalue of the output, by the Jacobi solver."""
    out = qchannel.apply(m, qstate.schmidt_pure_state(params), check=False)
    return qstate.min_pt_eig(out)


def _numeric_verdict(m: TwoQubitMap, res: SearchResult, tol: float) -> EaVerdict:
    if res.value < -tol:
        value = witness_value(m, res.params)
        if value < -tol:
            return not_ea(Criterion.NUMERIC_WITNESS, res.params, value)
    return undecided(Criterion.NUMERIC_NO_WITNESS, res.value,
                     note="no witness found; absence is not a certificate")


def ea_numeric(m: TwoQubitMap, budget: SearchBudget = DEFAULT_BUDGET) -> EaVerdict:
    _require_cp(m, budget.tol)
    return _numeric_verdict(m, search_min(m, budget, transpose=True), budget.tol)


def ea_numeric_batch(maps, budget: SearchBudget = DEFAULT_BUDGET) -> list[EaVerdict]:
    """``ea_numeric`` over many maps with one shared refinement pass."""
    maps = list(maps)
    for m in maps:
        _require_cp(m, budget.tol)
    results = search_min_batch(maps, budget, transpose=True)
    return [_numeric_verdict(m, r, budget.tol) for m, r in zip(maps, results)]


def positive_map_min(m: TwoQubitMap, budget: SearchBudget = DEFAULT_BUDGET) -> float:
    """Smallest output eigenvalue over pure inputs (negative: m is not positive)."""
    return search_min(m, budget, transpose=False).value
