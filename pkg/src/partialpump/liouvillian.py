"""Lindblad superoperators under column-stacking vectorisation.

``vec(rho)`` stacks columns (``rho.reshape(-1, order="F")``) so that
``vec(X rho Y) = (Y^T kron X) vec(rho)``. All rates are in units of the
collective decay rate, which is fixed to 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .operators import (HilbertSpace, Matrix, OperatorMatrix, SpaceKind,
                        build_dicke_ladder, composite_operators)

GAMMA = 1.0
MAX_DIM_SQ = 4 * 10**8
# superoperators of spaces with dim <= 32 stay dense
SUPEROP_SPARSE_THRESHOLD = 1024


class Model(enum.Enum):
    TOY = "toy"
    INTERACTING = "interacting"
    COLLECTIVE_PUMP = "collective_pump"
    AUXILIARY = "auxiliary"
    HP_TOY = "hp_toy"


@dataclass(frozen=True)
class ModelSpec:
    """One point of one model family.

    ``basis`` selects exact Dicke (``"dicke"``) or truncated Holstein-Primakoff
    (``"hp"``) treatment of the unpumped spins; ``HP_TOY`` implies ``"hp"``.
    """
    model: Model
    N: int
    w: float
    phi: float = 0.0
    V: float = 0.0
    kappa: float = 0.0
    basis: str = "dicke"
    n_cut: int | None = None

    def __post_init__(self):
        if isinstance(self.model, str):
            object.__setattr__(self, "model", Model(self.model))
        if self.model is Model.HP_TOY and self.basis != "hp":
            object.__setattr__(self, "basis", "hp")
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))
        if self.N < 1:
            raise ValueError("N must be >= 1")
        for name in ("w", "V", "kappa"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.basis not in ("dicke", "hp"):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.basis == "hp":
            if self.n_cut is None or self.n_cut < 2:
                raise ValueError("HP basis needs n_cut >= 2")
        m = self.model
        if m is Model.INTERACTING and self.phi != 0.0:
            raise ValueError("interacting model fixes phi = 0; put the phase in the observables")
        if m in (Model.TOY, Model.HP_TOY, Model.COLLECTIVE_PUMP) and (self.V or self.kappa):
            raise ValueError(f"{m.value} model has no V or kappa")
        if m is Model.AUXILIARY and self.kappa <= 0:
            raise ValueError("auxiliary-channel model needs kappa > 0")
        if m is not Model.AUXILIARY and self.kappa:
            raise ValueError("kappa only enters the auxiliary-channel model")

    @property
    def space(self) -> HilbertSpace:
        if self.basis == "hp":
            return HilbertSpace.pumped_boson(self.N, self.n_cut)
        return HilbertSpace.pumped_dicke(self.N)

    @property
    def jump_phase(self) -> float:
        """Phase carried by the collective jump operator (zero where the model fixes it)."""
        if self.model in (Model.INTERACTING, Model.AUXILIARY):
            return 0.0
        return self.phi

    def with_(self, **kw) -> "ModelSpec":
        return replace(self, **kw)


@dataclass(frozen=True)
class Superoperator:
    space: HilbertSpace
    matrix: Matrix = field(repr=False)
    vectorization: str = "column"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if sp.issparse(m) else np.asarray(m)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        if other.space != self.space:
            raise ValueError("superoperators act on different spaces")
        return Superoperator(self.space, _store(self.matrix + other.matrix))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.space.dim
        return (self.matrix @ vec(rho)).reshape(d, d, order="F")

    def charges(self) -> np.ndarray:
        """Excitation-number difference n_i - n_j of every vectorised entry rho_ij."""
        n = self.space.excitations()
        return np.subtract.outer(n, n).ravel(order="F")

    def conserves_excitations(self) -> bool:
        """True if the generator never mixes coherences of different charge."""
        q = self.charges()
        coo = sp.coo_matrix(self.matrix)
        mask = np.abs(coo.data) > 0
        return bool(np.all(q[coo.row[mask]] == q[coo.col[mask]]))

    def sector(self, q: int) -> np.ndarray:
        return np.flatnonzero(self.charges() == q)

    def block(self, q: int) -> tuple[np.ndarray, np.ndarray]:
        idx = self.sector(q)
        m = sp.csr_matrix(self.matrix)[idx][:, idx]
        return idx, m.toarray()


def vec(rho) -> np.ndarray:
    rho = rho.toarray() if sp.issparse(rho) else np.asarray(rho)
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


def _store(m) -> Matrix:
    if m.shape[0] > SUPEROP_SPARSE_THRESHOLD:
        return sp.csr_matrix(m)
    return m.toarray() if sp.issparse(m) else np.asarray(m)


def _sparse(op) -> sp.csr_matrix:
    if isinstance(op, OperatorMatrix):
        return op.sparse()
    return sp.csr_matrix(op)


def _check_square(A):
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"operator must be square, got {A.shape}")


def dissipator_superop(A: OperatorMatrix, rate: float) -> Superoperator:
    """``(rate/2) D[A]`` with ``D[A]rho = 2 A rho A^dag - {A^dag A, rho}``.

    Column stacking gives ``(rate/2)(2 conj(A) kron A - I kron A^dag A - (A^dag A)^T kron I)``.
    """
    if rate < 0:
        raise ValueError("rate must be non-negative")
    a = _sparse(A)
    _check_square(a)
    d = a.shape[0]
    eye = sp.identity(d, dtype=complex, format="csr")
    ada = (a.conj().T @ a).tocsr()
    mat = 0.5 * rate * (2 * sp.kron(a.conj(), a) - sp.kron(eye, ada) - sp.kron(ada.T, eye))
    return Superoperator(A.space, _store(mat.tocsr()))


def hamiltonian_superop(H: OperatorMatrix, tol: float = 1e-12) -> Superoperator:
    """``-i[H, .]`` as ``-i(I kron H - H^T kron I)``."""
    h = _sparse(H)
    _check_square(h)
    if h.nnz and abs(h - h.conj().T).max() > tol:
        raise ValueError("Hamiltonian is not Hermitian")
    eye = sp.identity(h.shape[0], dtype=complex, format="csr")
    mat = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
    return Superoperator(H.space, _store(mat.tocsr()))


def build_liouvillian(space: HilbertSpace,
                      channels: Iterable[tuple[OperatorMatrix, float]] = (),
                      hamiltonian: OperatorMatrix | None = None,
                      max_dim_sq: int = MAX_DIM_SQ) -> Superoperator:
    """Sum of ``-i[H, .]`` and ``(rate/2) D[A]`` for each ``(A, rate)`` channel."""
    if space.dim ** 2 > max_dim_sq:
        raise MemoryError(f"superoperator dimension {space.dim ** 2} exceeds cap {max_dim_sq}")
    total = sp.csr_matrix((space.dim ** 2, space.dim ** 2), dtype=complex)
    if hamiltonian is not None:
        total = total + sp.csr_matrix(hamiltonian_superop(hamiltonian).matrix)
    for A, rate in channels:
        if A.space != space:
            raise ValueError(f"channel {A.label!r} lives on {A.space}, not {space}")
        if rate:
            total = total + sp.csr_matrix(dissipator_superop(A, rate).matrix)
    total.eliminate_zeros()
    return Superoperator(space, _store(total))


def model_channels(spec: ModelSpec, ops: dict | None = None):
    """(channels, hamiltonian) of a model in the reduced pumped (x) collective space."""
    ops = ops or composite_operators(spec.space)
    phase = np.exp(1j * spec.jump_phase)
    sm, sp_, Jm, Jp = ops["sm"], ops["sp"], ops["Jm"], ops["Jp"]
    H = None
    m = spec.model
    if m is Model.COLLECTIVE_PUMP:
        channels = [(Jm.scale(phase) + sm, GAMMA), (Jp, spec.w)]
    else:
        channels = [(sm.scale(phase) + Jm, GAMMA), (sp_, spec.w)]
    if m is Model.AUXILIARY:
        channels += [(sm, spec.kappa), (Jm, spec.kappa)]
    if spec.V:
        H = (Jp @ sm + sp_ @ Jm).scale(spec.V, "V(J+s- + s+J-)")
    return channels, H


def assemble(spec: ModelSpec, max_dim_sq: int = MAX_DIM_SQ) -> Superoperator:
    """Liouvillian of ``spec`` on its reduced space."""
    if spec.space.dim ** 2 > max_dim_sq:
        raise MemoryError(f"{spec} needs dim^2 = {spec.space.dim ** 2} > cap {max_dim_sq}")
    channels, H = model_channels(spec)
    return build_liouvillian(spec.space, channels, H, max_dim_sq)


def collective_only_liouvillian(N: int, w: float, w_up: float | None = None) -> Superoperator:
    """Pumped and damped collective spin alone: ``(1/2)D[J-] + (w/2)D[J+]``.

    This is the collective-pump model with the single spin removed, and also
    the adiabatically eliminated interacting model when ``w`` is replaced by
    the effective pump ``(2V)^2 / w_pump``.
    """
    ladder = build_dicke_ladder(N)
    return build_liouvillian(ladder["z"].space, [(ladder["minus"], GAMMA), (ladder["plus"], w)])


def effective_pump_rate(w: float, V: float) -> float:
    """Pump rate seen by the collective spin after eliminating the pumped one."""
    return w * (2 * V) ** 2 / w ** 2


def unitary_superop(U: np.ndarray) -> np.ndarray:
    """Matrix of ``rho -> U rho U^dag``."""
    U = np.asarray(U)
    return np.kron(U.conj(), U)


def pumped_phase_rotation(space: HilbertSpace, phi: float) -> np.ndarray:
    """``exp(i phi n_sigma)``: maps ``sigma^-`` to ``exp(-i phi) sigma^-``."""
    if space.kind not in (SpaceKind.PUMPED_DICKE, SpaceKind.PUMPED_BOSON):
        raise ValueError("phase rotation needs a pumped (x) collective space")
    n_sigma = np.repeat([1.0, 0.0], space.dim // 2)
    return np.diag(np.exp(1j * phi * n_sigma))


def is_trace_preserving(L: Superoperator, tol: float = 1e-12) -> bool:
    d = L.space.dim
    row = vec(np.eye(d)) @ L.matrix
    return bool(np.max(np.abs(row)) <= tol)


def preserves_hermiticity(L: Superoperator, rng=None, tol: float = 1e-12) -> bool:
    rng = np.random.default_rng(rng)
    d = L.space.dim
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    x = x + x.conj().T
    y = L.apply(x)
    return bool(np.max(np.abs(y - y.conj().T)) <= tol * max(1.0, np.max(np.abs(y))))


def sum_superops(parts: Sequence[Superoperator]) -> Superoperator:
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out
