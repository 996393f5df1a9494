"""Spin, collective-spin and bosonic operators with explicit tensor embedding.

Conventions used throughout the package:

* single spin basis is (|up>, |down>), so ``sigma_z = diag(+1/2, -1/2)``;
* Dicke basis index ``j`` holds ``m = J - j`` (index 0 is the fully excited state),
  which makes the N=1 ladder identical to the spin-1/2 one;
* Fock index ``n`` holds ``n`` bosons;
* the pumped spin is always the LEFT Kronecker factor of the reduced spaces.

Operators are stored dense up to :data:`SPARSE_THRESHOLD` and as CSR above it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.sparse as sp

SPARSE_THRESHOLD = 64

Matrix = Union[np.ndarray, sp.spmatrix]


class SpaceKind(enum.Enum):
    PUMPED_SPIN = "pumped_spin"
    DICKE = "dicke"
    BOSON = "boson"
    PUMPED_DICKE = "pumped_dicke"
    PUMPED_BOSON = "pumped_boson"
    FULL_CHAIN = "full_chain"


class Slot(enum.Enum):
    PUMPED = "pumped"
    COLLECTIVE = "collective"


@dataclass(frozen=True)
class HilbertSpace:
    kind: SpaceKind
    dim: int
    N: int = 0
    n_cut: int = 0
    n_atoms: int = 0

    def __post_init__(self):
        expected = {
            SpaceKind.PUMPED_SPIN: 2,
            SpaceKind.DICKE: self.N + 1,
            SpaceKind.BOSON: self.n_cut,
            SpaceKind.PUMPED_DICKE: 2 * (self.N + 1),
            SpaceKind.PUMPED_BOSON: 2 * self.n_cut,
            SpaceKind.FULL_CHAIN: 2 ** self.n_atoms,
        }[self.kind]
        if self.dim != expected or self.dim < 1:
            raise ValueError(f"{self.kind.value} space must have dim {expected}, got {self.dim}")

    @classmethod
    def pumped_spin(cls) -> "HilbertSpace":
        return cls(SpaceKind.PUMPED_SPIN, 2)

    @classmethod
    def dicke(cls, N: int) -> "HilbertSpace":
        return cls(SpaceKind.DICKE, N + 1, N=N)

    @classmethod
    def boson(cls, N: int, n_cut: int) -> "HilbertSpace":
        return cls(SpaceKind.BOSON, n_cut, N=N, n_cut=n_cut)

    @classmethod
    def pumped_dicke(cls, N: int) -> "HilbertSpace":
        return cls(SpaceKind.PUMPED_DICKE, 2 * (N + 1), N=N)

    @classmethod
    def pumped_boson(cls, N: int, n_cut: int) -> "HilbertSpace":
        return cls(SpaceKind.PUMPED_BOSON, 2 * n_cut, N=N, n_cut=n_cut)

    @classmethod
    def full_chain(cls, n_atoms: int) -> "HilbertSpace":
        return cls(SpaceKind.FULL_CHAIN, 2 ** n_atoms, N=n_atoms - 1, n_atoms=n_atoms)

    @property
    def is_composite(self) -> bool:
        return self.kind in (SpaceKind.PUMPED_DICKE, SpaceKind.PUMPED_BOSON)

    def factors(self) -> tuple["HilbertSpace", "HilbertSpace"]:
        if self.kind is SpaceKind.PUMPED_DICKE:
            return HilbertSpace.pumped_spin(), HilbertSpace.dicke(self.N)
        if self.kind is SpaceKind.PUMPED_BOSON:
            return HilbertSpace.pumped_spin(), HilbertSpace.boson(self.N, self.n_cut)
        raise ValueError(f"{self.kind.value} space is not a pumped x collective product")

    def excitations(self) -> np.ndarray:
        """Number of excitations carried by each basis state."""
        k = self.kind
        if k is SpaceKind.PUMPED_SPIN:
            return np.array([1, 0])
        if k is SpaceKind.DICKE:
            return self.N - np.arange(self.N + 1)
        if k is SpaceKind.BOSON:
            return np.arange(self.n_cut)
        if k is SpaceKind.FULL_CHAIN:
            idx = np.arange(self.dim)
            downs = np.array([bin(i).count("1") for i in idx])
            return self.n_atoms - downs
        left, right = self.factors()
        return np.add.outer(left.excitations(), right.excitations()).ravel()


def _store(mat) -> Matrix:
    if mat.shape[0] > SPARSE_THRESHOLD:
        return sp.csr_matrix(mat)
    return mat.toarray() if sp.issparse(mat) else np.asarray(mat)


@dataclass(frozen=True)
class OperatorMatrix:
    space: HilbertSpace
    entries: Matrix = field(repr=False)
    label: str = ""

    def __post_init__(self):
        shape = self.entries.shape
        if shape != (self.space.dim, self.space.dim):
            raise ValueError(f"operator {self.label!r} has shape {shape}, space needs {self.space.dim}")

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, _store(self.entries.conj().T), f"({self.label})^dag")

    def dense(self) -> np.ndarray:
        e = self.entries
        return e.toarray() if sp.issparse(e) else np.asarray(e)

    def sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.entries)

    def _check(self, other: "OperatorMatrix"):
        if other.space != self.space:
            raise ValueError(f"space mismatch: {self.space} vs {other.space}")

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.space, _store(self.entries @ other.entries), f"{self.label} {other.label}")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.space, _store(self.entries + other.entries), f"{self.label} + {other.label}")

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.space, _store(self.entries - other.entries), f"{self.label} - {other.label}")

    def scale(self, c: complex, label: str | None = None) -> "OperatorMatrix":
        return OperatorMatrix(self.space, _store(c * self.entries), label or f"{c}*{self.label}")

    def power(self, k: int) -> "OperatorMatrix":
        """``op^k`` by repeated multiplication (never via diagonalisation)."""
        out = sp.identity(self.space.dim, dtype=complex, format="csr")
        base = self.sparse()
        for _ in range(k):
            out = out @ base
        return OperatorMatrix(self.space, _store(out), f"({self.label})^{k}")


def identity(space: HilbertSpace) -> OperatorMatrix:
    return OperatorMatrix(space, _store(sp.identity(space.dim, dtype=complex, format="csr")), "I")


def build_pumped_spin() -> dict[str, OperatorMatrix]:
    space = HilbertSpace.pumped_spin()
    plus = np.array([[0, 1], [0, 0]], dtype=complex)
    return {
        "plus": OperatorMatrix(space, plus, "sigma+"),
        "minus": OperatorMatrix(space, plus.T.copy(), "sigma-"),
        "z": OperatorMatrix(space, np.diag([0.5, -0.5]).astype(complex), "sigma_z"),
    }


def build_dicke_ladder(N: int) -> dict[str, OperatorMatrix]:
    """J+, J-, Jz on the (N+1)-dimensional maximal-J Dicke manifold, J = N/2."""
    if N < 1:
        raise ValueError("Dicke ladder needs N >= 1; use the single-atom closed forms for N = 0")
    space = HilbertSpace.dicke(N)
    J = N / 2
    m = J - np.arange(N + 1)
    # J+ |m> = sqrt(J(J+1) - m(m+1)) |m+1>, i.e. index j -> j-1
    coeff = np.sqrt(J * (J + 1) - m[1:] * (m[1:] + 1))
    plus = sp.diags(coeff, offsets=1, shape=(N + 1, N + 1), dtype=complex, format="csr")
    return {
        "plus": OperatorMatrix(space, _store(plus), "J+"),
        "minus": OperatorMatrix(space, _store(plus.T.tocsr()), "J-"),
        "z": OperatorMatrix(space, _store(sp.diags(m.astype(complex), format="csr")), "Jz"),
    }


def build_hp_operators(N: int, n_cut: int) -> dict[str, OperatorMatrix]:
    """Lowest-order Holstein-Primakoff boson on a truncated Fock space.

    ``J+ ~ sqrt(N) a^dag`` and ``Jz ~ -N/2 + a^dag a``; the top level is
    absorbing (``a^dag |n_cut-1> = 0``), no sqrt(1 - n/N) corrections.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if n_cut < 2:
        raise ValueError(f"n_cut must be >= 2, got {n_cut}")
    space = HilbertSpace.boson(N, n_cut)
    a = sp.diags(np.sqrt(np.arange(1, n_cut)).astype(complex), offsets=1, shape=(n_cut, n_cut), format="csr")
    adag = a.T.tocsr()
    num = sp.diags(np.arange(n_cut).astype(complex), format="csr")
    return {
        "a": OperatorMatrix(space, _store(a), "a"),
        "adag": OperatorMatrix(space, _store(adag), "a^dag"),
        "plus": OperatorMatrix(space, _store(np.sqrt(N) * adag), "J+"),
        "minus": OperatorMatrix(space, _store(np.sqrt(N) * a), "J-"),
        "z": OperatorMatrix(space, _store(num - (N / 2) * sp.identity(n_cut, format="csr")), "Jz"),
    }


def embed(op: OperatorMatrix, slot: Slot, target: HilbertSpace) -> OperatorMatrix:
    """Lift a factor operator into the pumped (x) collective product space."""
    left, right = target.factors()
    factor = left if slot is Slot.PUMPED else right
    if op.space != factor:
        raise ValueError(f"cannot embed {op.space} into the {slot.value} slot of {target}")
    eye_l = sp.identity(left.dim, dtype=complex, format="csr")
    eye_r = sp.identity(right.dim, dtype=complex, format="csr")
    if slot is Slot.PUMPED:
        mat = sp.kron(op.sparse(), eye_r, format="csr")
    else:
        mat = sp.kron(eye_l, op.sparse(), format="csr")
    return OperatorMatrix(target, _store(mat), op.label)


def composite_operators(space: HilbertSpace) -> dict[str, OperatorMatrix]:
    """All embedded operators of a pumped (x) collective space.

    Keys: ``sm, sp, sz`` (pumped spin), ``Jm, Jp, Jz`` (collective, exact Dicke
    or HP depending on the space) and ``Sm, Sp, Sz`` for the bare sums.
    """
    if space.kind is SpaceKind.PUMPED_DICKE:
        coll = build_dicke_ladder(space.N)
    elif space.kind is SpaceKind.PUMPED_BOSON:
        coll = build_hp_operators(space.N, space.n_cut)
    else:
        raise ValueError(f"no composite operators for {space.kind.value}")
    spin = build_pumped_spin()
    ops = {
        "sm": embed(spin["minus"], Slot.PUMPED, space),
        "sp": embed(spin["plus"], Slot.PUMPED, space),
        "sz": embed(spin["z"], Slot.PUMPED, space),
        "Jm": embed(coll["minus"], Slot.COLLECTIVE, space),
        "Jp": embed(coll["plus"], Slot.COLLECTIVE, space),
        "Jz": embed(coll["z"], Slot.COLLECTIVE, space),
    }
    ops["Sm"] = ops["sm"] + ops["Jm"]
    ops["Sp"] = ops["sp"] + ops["Jp"]
    ops["Sz"] = ops["sz"] + ops["Jz"]
    return ops


def build_full_space_operators(n_atoms: int) -> dict:
    """Site-resolved spin operators on the full 2**n_atoms space.

    Sites are ordered 1..n_atoms left to right in the Kronecker product; the
    last site is the pumped spin. Returns per-site lists ``sm``/``sp``/``sz``
    plus the collective sums over the unpumped sites (``Jm``, ``Jp``, ``Jz``),
    the pumped spin (``sigma_m`` ...) and ``Sm = Jm + sigma_m`` etc.
    """
    if not 2 <= n_atoms <= 5:
        raise ValueError(f"n_atoms must be in 2..5, got {n_atoms}")
    space = HilbertSpace.full_chain(n_atoms)
    one = build_pumped_spin()

    def site(op, i):
        mats = [sp.identity(2, dtype=complex, format="csr")] * n_atoms
        mats = list(mats)
        mats[i] = sp.csr_matrix(op.entries)
        out = mats[0]
        for m in mats[1:]:
            out = sp.kron(out, m, format="csr")
        return OperatorMatrix(space, _store(out), f"{op.label}_{i + 1}")

    out = {key: [site(one[name], i) for i in range(n_atoms)]
           for key, name in (("sm", "minus"), ("sp", "plus"), ("sz", "z"))}
    for key, name in (("m", "sm"), ("p", "sp"), ("z", "sz")):
        coll = out[name][0]
        for op in out[name][1:-1]:
            coll = coll + op
        out["J" + key] = OperatorMatrix(space, coll.entries, "J" + key)
        out["sigma_" + key] = out[name][-1]
        out["S" + key] = OperatorMatrix(space, (coll + out[name][-1]).entries, "S" + key)
    out["space"] = space
    return out
