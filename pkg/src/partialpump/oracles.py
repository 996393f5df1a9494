"""Reference results that share no code with the solver.

Everything here is built from bare numpy arrays: its own spin matrices, its
own (row-stacking) vectorisation and its own null-space projection. Keep it
that way; these functions are what the solver is checked against.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg as sla

# spin-1/2 basis (|up>, |down>)
_SM = np.array([[0.0, 0.0], [1.0, 0.0]])
_SP = _SM.T
_SZ = np.diag([0.5, -0.5])
_I2 = np.eye(2)

# closed-form basis (|uu>, |du>, |ud>, |dd>) with labels (pumped, unpumped),
# reordered to pumped (x) unpumped Kronecker order
TWO_SPIN_PERMUTATION = np.array([0, 2, 1, 3])


def two_spin_closed_form(w: float, phi: float = 0.0, gamma: float = 1.0) -> np.ndarray:
    """Normalised two-spin steady state, pumped spin as left Kronecker factor."""
    if w < 0:
        raise ValueError("w must be non-negative")
    g = gamma
    c = -(w + 2 * g) / (2 * g)
    M = np.zeros((4, 4), dtype=complex)
    M[0, 0] = w / (2 * g)
    M[1, 1] = 1.0
    M[1, 2] = c * np.exp(1j * phi)
    M[2, 1] = c * np.exp(-1j * phi)
    M[2, 2] = (6 * w * g + w ** 2 + 2 * g ** 2) / (2 * g ** 2)
    M[3, 3] = (w + 4 * g) / (2 * g)
    M /= np.trace(M).real
    # M is given in the closed-form basis; rho[P[i], P[j]] = M[i, j]
    P = TWO_SPIN_PERMUTATION
    rho = np.empty_like(M)
    rho[np.ix_(P, P)] = M
    return rho


@dataclass(frozen=True)
class ThermalDicke:
    """Geometric Dicke populations ``alpha_m ~ r^(m+J)`` and their moments."""
    m: np.ndarray
    alpha: np.ndarray
    intensity: float
    g2: float


def thermal_dicke_distribution(N: int, w: float, gamma: float = 1.0) -> ThermalDicke:
    """Steady state of collective pump and decay alone, ``m`` ascending from ``-J``."""
    if N < 1 or w <= 0:
        raise ValueError("need N >= 1 and w > 0")
    J = N / 2
    k = np.arange(N + 1)  # m + J
    m = k - J
    logs = k * np.log(w / gamma)
    alpha = np.exp(logs - logs.max())
    alpha /= alpha.sum()
    # J+J- |m> = (J+m)(J-m+1) |m>
    a1 = (J + m) * (J - m + 1)
    a2 = a1 * (J + m - 1) * (J - m + 2)
    intensity = float(np.dot(alpha, a1))
    g2 = float(np.dot(alpha, a2) / intensity ** 2)
    return ThermalDicke(m, alpha, intensity, g2)


def _site(op: np.ndarray, k: int, n: int) -> np.ndarray:
    return reduce(np.kron, [op if i == k else _I2 for i in range(n)])


def _lindblad_rowvec(H: np.ndarray, jumps) -> np.ndarray:
    """Generator for row-stacked rho: ``vec(A rho B) = (A kron B^T) vec(rho)``."""
    d = H.shape[0]
    I = np.eye(d)
    L = -1j * (np.kron(H, I) - np.kron(I, H.T))
    for A, rate in jumps:
        AdA = A.conj().T @ A
        L += 0.5 * rate * (2 * np.kron(A, A.conj()) - np.kron(AdA, I) - np.kron(I, AdA.T))
    return L


def _long_time_state(L: np.ndarray, rho0: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, int]:
    """``lim exp(L t) rho0`` by projecting onto the (possibly degenerate) kernel."""
    U, s, Vh = sla.svd(L)
    null = s <= tol * s[0]
    R = Vh[null].conj().T  # right kernel
    Y = U[:, null]  # left kernel: Y^H L = 0
    coeff = np.linalg.solve(Y.conj().T @ R, Y.conj().T @ rho0.reshape(-1))
    d = rho0.shape[0]
    rho = (R @ coeff).reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real, int(null.sum())


@dataclass(frozen=True)
class BruteForceResult:
    rho: np.ndarray
    kernel_dim: int
    Sz: float
    intensity: float
    g: dict


def brute_force_lindblad(n_atoms: int, w: float, phi: float = 0.0, V: float = 0.0,
                         kappa: float = 0.0, pump: str = "single", phase_in: str = "jump",
                         k_max: int = 3, gamma: float = 1.0) -> BruteForceResult:
    """Full ``2^n`` solution started from all spins down.

    Site 0 is the pumped spin, sites ``1..n-1`` the unpumped ones. ``pump`` is
    ``"single"`` (``w D[sigma+]``) or ``"collective"`` (``w D[J+]``, with the
    phase then attached to ``J-`` in the loss). With ``phase_in="observable"``
    the loss carries no phase and ``S- = exp(-i phi) sigma- + J-`` instead.
    """
    if not 2 <= n_atoms <= 4:
        raise ValueError("brute force is limited to 2..4 atoms")
    n = n_atoms
    sm = _site(_SM, 0, n)
    Jm = sum(_site(_SM, k, n) for k in range(1, n))
    Sz = sum(_site(_SZ, k, n) for k in range(n))
    ph = np.exp(1j * phi)
    if phase_in == "jump":
        loss = ph * Jm + sm if pump == "collective" else ph * sm + Jm
        S_minus = sm + Jm
    elif phase_in == "observable":
        loss = sm + Jm
        S_minus = np.conj(ph) * sm + Jm
    else:
        raise ValueError(phase_in)
    jumps = [(loss, gamma)]
    jumps.append((Jm.conj().T if pump == "collective" else sm.conj().T, w))
    if kappa:
        jumps += [(sm, kappa), (Jm, kappa)]
    H = V * (Jm.conj().T @ sm + sm.conj().T @ Jm)
    L = _lindblad_rowvec(H.astype(complex), jumps)
    d = 2 ** n
    rho0 = np.zeros((d, d), dtype=complex)
    rho0[-1, -1] = 1.0  # all down
    rho, kdim = _long_time_state(L, rho0)
    S_plus = S_minus.conj().T
    intensity = np.trace(S_plus @ S_minus @ rho).real
    g = {}
    power = S_minus
    for k in range(2, k_max + 1):
        power = S_minus @ power
        g[k] = np.trace(power.conj().T @ power @ rho).real / intensity ** k
    return BruteForceResult(rho, kdim, float(np.trace(Sz @ rho).real), float(intensity), g)
