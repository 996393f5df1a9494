"""Steady states of assembled Liouvillians."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import InvalidSteadyState, NoConvergence, NullSpaceDegenerate
from .liouvillian import GAMMA, ModelSpec, Superoperator, assemble, unvec

log = logging.getLogger(__name__)

DENSE_ENTRY_LIMIT = 10**6
DEGENERACY_RATIO = 1e-10
POSITIVITY_TOL = 1e-8
RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class SteadyState:
    spec: ModelSpec | None
    rho: np.ndarray = field(repr=False)
    residual_norm: float
    min_eigenvalue: float
    method: str = "svd"
    singular_gap: float = np.inf

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def expect(self, op) -> complex:
        m = op.entries if hasattr(op, "entries") else op
        return complex((m @ self.rho).trace() if not sp.issparse(m) else (m @ self.rho).trace())


def _null_vector_dense(M: np.ndarray) -> tuple[np.ndarray, float]:
    _, s, vh = sla.svd(M, lapack_driver="gesvd")
    smallest, second, largest = s[-1], s[-2] if len(s) > 1 else np.inf, s[0]
    if second <= DEGENERACY_RATIO * largest:
        raise NullSpaceDegenerate(
            f"two singular values below {DEGENERACY_RATIO:g} x largest: {smallest:.3g}, {second:.3g}")
    gap = second / smallest if smallest > 0 else np.inf
    return vh[-1].conj(), gap


def _null_vector_sparse(M: sp.spmatrix) -> tuple[np.ndarray, float]:
    M = sp.csc_matrix(M)
    scale = abs(M).max()
    try:
        vals, vecs = spla.eigs(M, k=2, sigma=-1e-9 * scale, which="LM", tol=1e-13, maxiter=5000)
    except spla.ArpackNoConvergence as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(np.abs(vals))
    vals, vecs = vals[order], vecs[:, order]
    if abs(vals[1]) <= DEGENERACY_RATIO * scale:
        raise NullSpaceDegenerate(f"two eigenvalues near zero: {vals}")
    return vecs[:, 0], abs(vals[1]) / max(abs(vals[0]), np.finfo(float).tiny)


def solve_steady_state(L: Superoperator, spec: ModelSpec | None = None,
                       check: bool = True) -> SteadyState:
    """Unique null vector of ``L`` as a Hermitian, unit-trace density matrix.

    If ``L`` conserves excitation number the search is restricted to the
    charge-zero block (the one holding populations), otherwise the full
    matrix is used. Dense SVD below :data:`DENSE_ENTRY_LIMIT` entries,
    shift-invert Arnoldi above.
    """
    d = L.space.dim
    if L.conserves_excitations():
        idx = L.sector(0)
        M = sp.csr_matrix(L.matrix)[idx][:, idx]
    else:
        idx = np.arange(d * d)
        M = sp.csr_matrix(L.matrix)
    if M.shape[0] ** 2 <= DENSE_ENTRY_LIMIT:
        v, gap = _null_vector_dense(M.toarray())
        method = "svd"
    else:
        v, gap = _null_vector_sparse(M)
        method = "shift-invert"
    full = np.zeros(d * d, dtype=complex)
    full[idx] = v
    rho = unvec(full, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho)
    # relative to the generator scale, so stiff models are judged fairly
    scale = max(abs(sp.csr_matrix(L.matrix)).sum(axis=1).max(), np.finfo(float).tiny)
    residual = np.linalg.norm(L.matrix @ full_vec(rho)) / (scale * np.linalg.norm(rho))
    min_ev = float(np.linalg.eigvalsh(rho)[0])
    state = SteadyState(spec, rho, float(residual), min_ev, method, float(gap))
    if check:
        validate(state)
    return state


def full_vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1, order="F")


def validate(state: SteadyState):
    rho = state.rho
    if abs(np.trace(rho) - 1) > 1e-12:
        raise InvalidSteadyState(f"trace {np.trace(rho)}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise InvalidSteadyState("density matrix not Hermitian")
    if state.min_eigenvalue < -POSITIVITY_TOL:
        raise InvalidSteadyState(f"negative eigenvalue {state.min_eigenvalue:.3g}")
    if state.residual_norm > RESIDUAL_TOL:
        raise InvalidSteadyState(f"residual {state.residual_norm:.3g} above {RESIDUAL_TOL:g}")


def steady_state(spec: ModelSpec) -> SteadyState:
    return solve_steady_state(assemble(spec), spec)


def single_atom_reference(w: float) -> dict[str, float]:
    """Closed forms for the lone pumped atom (no unpumped partners)."""
    if w < 0:
        raise ValueError("w must be non-negative")
    if np.isinf(w):
        sz = 0.5
    else:
        sz = (w - GAMMA) / (2 * (w + GAMMA))
    return {"magnetization": sz, "intensity": 0.5 + sz, "linewidth": w + GAMMA}
