"""Liouvillian eigenmodes, emission spectra and linewidths.

The emission correlator ``<S+(t) S-(0)>`` only involves coherences that lower
the excitation number by one, so for excitation-conserving models every
spectral quantity is computed in the charge -1 block of the Liouvillian.
"""
from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.signal import czt

from .errors import DefectiveNearEP, GridError, NoConvergence
from .liouvillian import GAMMA, ModelSpec, Superoperator, assemble, vec
from .observables import default_convention, emission_operators
from .steady import SteadyState, solve_steady_state

log = logging.getLogger(__name__)

EMISSION_SECTOR = -1
COND_LIMIT = 1e8
NEGLIGIBLE_RESIDUE = 1e-12
PEAK_FLOOR = 0.05


class PeakStructure(enum.Enum):
    SINGLE = "single"
    SYMMETRIC_DOUBLE = "symmetric_double"
    MULTI = "multi"


@dataclass(frozen=True)
class LiouvillianSpectrum:
    """Biorthonormal eigensystem of (a block of) a Liouvillian.

    Columns of ``right`` are vectorised right eigenmatrices, rows of ``left``
    are the matching ``l_k^dag`` so that ``left @ right = 1``. ``indices``
    maps block coordinates to full vectorised coordinates (``None`` for the
    whole matrix).
    """
    eigenvalues: np.ndarray
    right: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    condition_estimate: float
    dim: int
    indices: np.ndarray | None = field(default=None, repr=False)
    residues: np.ndarray | None = None
    contributing: np.ndarray | None = None

    def restrict(self, v: np.ndarray) -> np.ndarray:
        return v if self.indices is None else v[self.indices]

    def biorthonormality_error(self) -> float:
        return float(np.max(np.abs(self.left @ self.right - np.eye(len(self.eigenvalues)))))


@dataclass
class SpectrumResult:
    omega: np.ndarray
    S: np.ndarray
    linewidth: float = math.nan
    peak_shift: float = math.nan
    peak_structure: PeakStructure | None = None
    per_mode: list | None = None
    method: str = "residue"
    meta: dict = field(default_factory=dict)


def mode_order(eigenvalues: np.ndarray) -> np.ndarray:
    """Ascending |Re|, ties (to 1e-9) broken by ascending Im."""
    ev = np.asarray(eigenvalues)
    return np.lexsort((ev.imag, np.round(np.abs(ev.real), 9)))


def eigendecompose(L: Superoperator, sector: int | None = EMISSION_SECTOR,
                   cond_limit: float = COND_LIMIT, strict: bool = True) -> LiouvillianSpectrum:
    """Full non-Hermitian eigendecomposition of ``L`` or of one charge block.

    Left vectors come from inverting the right-vector matrix, which makes the
    pair biorthonormal by construction. With ``strict`` a condition number
    above ``cond_limit`` raises :class:`DefectiveNearEP`.
    """
    if sector is not None and L.conserves_excitations():
        idx, M = L.block(sector)
    else:
        idx, M = None, L.dense()
    vals, R = sla.eig(M)
    R = R / np.linalg.norm(R, axis=0)
    order = mode_order(vals)
    vals, R = vals[order], R[:, order]
    cond = float(np.linalg.cond(R))
    if strict and cond > cond_limit:
        raise DefectiveNearEP(cond)
    left = np.linalg.inv(R)
    return LiouvillianSpectrum(vals, R, left, cond, L.space.dim, idx)


def residues(spec: LiouvillianSpectrum, Sp, Sm, state: SteadyState) -> LiouvillianSpectrum:
    """``c_k = tr(r_k S+) tr(l_k^dag S- rho_ss)`` for every mode."""
    sp_m = Sp.entries if hasattr(Sp, "entries") else Sp
    sm_m = Sm.entries if hasattr(Sm, "entries") else Sm
    sp_m = sp_m.toarray() if sp.issparse(sp_m) else np.asarray(sp_m)
    sm_m = sm_m.toarray() if sp.issparse(sm_m) else np.asarray(sm_m)
    # tr(r S+) = vec(S+^T) . vec(r)
    readout = spec.restrict(vec(sp_m.T))
    source = spec.restrict(vec(sm_m @ state.rho))
    c = (readout @ spec.right) * (spec.left @ source)
    scale = np.max(np.abs(c)) if c.size else 0.0
    contributing = np.abs(c) >= NEGLIGIBLE_RESIDUE * scale
    return replace(spec, residues=c, contributing=contributing)


def _check_grid(omega: np.ndarray, eigenvalues: np.ndarray, residues_: np.ndarray):
    live = np.abs(residues_) > 0
    if not np.any(live):
        return
    rates = np.abs(eigenvalues.real[live])
    rates = rates[rates > 0]
    if rates.size == 0:
        return
    step = np.max(np.diff(omega)) if omega.size > 1 else np.inf
    if 2 * rates.min() < 10 * step:
        warnings.warn("frequency grid too coarse: slowest line spans fewer than 10 points",
                      RuntimeWarning, stacklevel=3)


def mode_contributions(c: np.ndarray, eigenvalues: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Per-mode ``2 Re[c_k / (-i(omega + Im l_k) - Re l_k)]``, shape (modes, omega)."""
    om = np.asarray(omega, dtype=float)[None, :]
    lam = np.asarray(eigenvalues)[:, None]
    return 2 * np.real(np.asarray(c)[:, None] / (-1j * (om + lam.imag) - lam.real))


def spectral_function(c: np.ndarray, eigenvalues: np.ndarray, omega: np.ndarray,
                      per_mode: bool = False, zero_tol: float = 1e-10) -> SpectrumResult:
    """Residue sum ``S(w) = 2 Re sum_k c_k / (-i(w + Im l_k) - Re l_k)``.

    Modes with ``|lambda| <= zero_tol`` (stationary) are dropped; they would
    contribute a delta line of weight ``|<S->|^2``, zero for these models.
    """
    c = np.asarray(c)
    ev = np.asarray(eigenvalues)
    keep = np.abs(ev) > zero_tol
    if np.any(~keep) and np.max(np.abs(c[~keep]), initial=0.0) > 1e-10:
        log.warning("stationary mode carries residue %g; delta line omitted", np.max(np.abs(c[~keep])))
    c, ev = c[keep], ev[keep]
    omega = np.asarray(omega, dtype=float)
    _check_grid(omega, ev, c)
    parts = mode_contributions(c, ev, omega)
    res = SpectrumResult(omega, parts.sum(axis=0))
    if per_mode:
        res.per_mode = [(complex(l), complex(ck), p) for l, ck, p in zip(ev, c, parts)]
    return res


def _gauss_nodes(order: int = 4):
    x, wts = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1), 0.5 * wts


def correlator_samples(M: np.ndarray, readout: np.ndarray, source: np.ndarray,
                       h: float, t_max: float | None = None, rtol: float = 1e-13,
                       max_steps: int = 4_000_000, order: int = 4):
    """Propagate ``source`` under ``exp(M t)`` and read out at Gauss nodes.

    Returns ``(t_starts, nodes, weights, C)`` with ``C[n, j]`` the correlator at
    ``t_starts[n] + nodes[j] * h``. Propagation stops at ``t_max`` or once the
    state norm has decayed below ``rtol`` of its initial value.
    """
    nodes, weights = _gauss_nodes(order)
    step = sla.expm(M * h)
    node_rows = np.array([readout @ sla.expm(M * s * h) for s in nodes])  # (order, d)
    block = 256
    powers = [np.eye(M.shape[0], dtype=complex)]
    for _ in range(block - 1):
        powers.append(step @ powers[-1])
    stack = np.concatenate(powers, axis=0)  # (block*d, d)
    jump = step @ powers[-1]
    d = M.shape[0]
    x = source.astype(complex)
    norm0 = np.linalg.norm(x)
    chunks = []
    n_done = 0
    while True:
        xs = (stack @ x).reshape(block, d)
        chunks.append(xs @ node_rows.T)
        n_done += block
        x = jump @ x
        t = n_done * h
        if t_max is not None and t >= t_max:
            break
        if t_max is None and np.linalg.norm(x) <= rtol * norm0 and np.max(np.abs(xs[-1])) <= rtol * norm0:
            break
        if n_done >= max_steps:
            raise NoConvergence(f"correlator still {np.linalg.norm(x) / norm0:.2e} of initial after {n_done} steps")
    C = np.concatenate(chunks, axis=0)
    if t_max is not None:
        C = C[: int(math.ceil(t_max / h))]
    return np.arange(C.shape[0]) * h, nodes, weights, C


def _fourier(t0: np.ndarray, nodes, weights, C, h: float, omega: np.ndarray) -> np.ndarray:
    """``2 Re int_0^T exp(i w t) C(t) dt`` by composite Gauss-Legendre."""
    omega = np.asarray(omega, dtype=float)
    out = np.zeros(omega.size, dtype=complex)
    steps = np.diff(omega)
    uniform = omega.size > 2 and np.allclose(steps, steps[0], rtol=1e-9, atol=0)
    for j, (s, wt) in enumerate(zip(nodes, weights)):
        col = C[:, j]
        if uniform:
            # sum_n col[n] exp(i w_m n h) via chirp z-transform, w_m = w_0 + m dw
            a = np.exp(-1j * omega[0] * h)
            ww = np.exp(1j * steps[0] * h)
            inner = czt(col, m=omega.size, w=ww, a=a)
        else:
            inner = np.zeros(omega.size, dtype=complex)
            for lo in range(0, col.size, 20000):
                tt = t0[lo:lo + 20000]
                inner += np.exp(1j * np.outer(omega, tt)) @ col[lo:lo + 20000]
        out += wt * h * np.exp(1j * omega * s * h) * inner
    return 2 * out.real


class TimeDomainCorrelator:
    """``C(t) = tr(S+ exp(M t) source)`` sampled once, Fourier transformed on demand.

    ``omega_max`` bounds the frequencies that will be requested; the step is
    chosen as ``0.5 / max(||M||_inf, omega_max)``.
    """

    def __init__(self, M: np.ndarray, readout: np.ndarray, source: np.ndarray,
                 omega_max: float, t_max: float | None = None, dt: float | None = None):
        if dt is None:
            dt = 0.5 / max(np.abs(M).sum(axis=1).max(), omega_max, 1e-12)
        self.dt = dt
        self.t0, self.nodes, self.weights, self.C = correlator_samples(M, readout, source, dt, t_max)
        self.c0 = complex(readout @ source)

    @property
    def t_max(self) -> float:
        return float(self.t0[-1] + self.dt)

    def spectrum(self, omega: np.ndarray) -> np.ndarray:
        return _fourier(self.t0, self.nodes, self.weights, self.C, self.dt, omega)


def time_domain_spectrum(L: Superoperator, Sp, Sm, state: SteadyState, omega: np.ndarray,
                         t_max: float | None = None, dt: float | None = None) -> SpectrumResult:
    """Spectrum from the propagated two-time correlator, no eigenvectors involved.

    ``C(t) = tr(S+ exp(L t)(S- rho_ss))`` is sampled with the exact step
    propagator ``expm(L dt)`` at Gauss-Legendre nodes of each step and Fourier
    transformed by composite quadrature. Default ``dt`` keeps
    ``dt * max(||L||, max|w|) <= 0.5``; default ``t_max`` runs until the
    propagated state has decayed to 1e-13 of its initial norm.
    """
    omega = np.asarray(omega, dtype=float)
    sp_m = Sp.dense() if hasattr(Sp, "dense") else np.asarray(Sp)
    sm_m = Sm.dense() if hasattr(Sm, "dense") else np.asarray(Sm)
    if L.conserves_excitations():
        idx, M = L.block(EMISSION_SECTOR)
    else:
        idx, M = np.arange(L.dim), L.dense()
    corr = TimeDomainCorrelator(M, vec(sp_m.T)[idx], vec(sm_m @ state.rho)[idx],
                                np.max(np.abs(omega), initial=0.0), t_max, dt)
    res = SpectrumResult(omega, corr.spectrum(omega), method="time_domain")
    res.meta.update(dt=corr.dt, t_max=corr.t_max, c0=corr.c0)
    return res


def _crossing(omega, S, i, j, level):
    """Linear interpolation of where S crosses ``level`` between samples i and j."""
    s0, s1 = S[i], S[j]
    if s1 == s0:
        return omega[i]
    return omega[i] + (level - s0) * (omega[j] - omega[i]) / (s1 - s0)


def peak_fwhm(omega: np.ndarray, S: np.ndarray, p: int) -> tuple[float, float, float]:
    """FWHM of the peak at index ``p``: walk outwards to the half-height crossings."""
    half = S[p] / 2
    i = p
    while i > 0 and S[i] >= half:
        i -= 1
    if S[i] >= half:
        raise GridError("half maximum not bracketed on the low-frequency side")
    j = p
    while j < len(S) - 1 and S[j] >= half:
        j += 1
    if S[j] >= half:
        raise GridError("half maximum not bracketed on the high-frequency side")
    lo = _crossing(omega, S, i, i + 1, half)
    hi = _crossing(omega, S, j - 1, j, half)
    return hi - lo, lo, hi


def local_maxima(omega: np.ndarray, S: np.ndarray, floor: float = PEAK_FLOOR,
                 rel_tol: float = 1e-10) -> np.ndarray:
    """Interior local maxima above ``floor * max(S)``.

    Steps smaller than ``rel_tol * max(S)`` count as flat, so roundoff ripples
    on a plateau do not split it into several peaks.
    """
    top = np.max(S)
    d = np.diff(S)
    sign = np.sign(np.where(np.abs(d) <= rel_tol * top, 0.0, d))
    peaks = []
    last_up = None
    for i, sgn in enumerate(sign):
        if sgn > 0:
            last_up = i
        elif sgn < 0 and last_up is not None:
            # plateau between last_up+1 and i
            p = (last_up + 1 + i) // 2
            if S[p] >= floor * top:
                peaks.append(p)
            last_up = None
    if not peaks:
        k = int(np.argmax(S))
        if k in (0, len(S) - 1):
            raise GridError("spectral maximum sits on the grid edge")
        peaks.append(k)
    return np.array(peaks, dtype=int)


def peak_position(omega: np.ndarray, S: np.ndarray, p: int) -> float:
    """Vertex of the parabola through the three samples around index ``p``."""
    if p == 0 or p == len(S) - 1:
        return float(omega[p])
    x, y = omega[p - 1:p + 2], S[p - 1:p + 2]
    a, b, _ = np.polyfit(x - x[1], y, 2)
    if a >= 0:
        return float(omega[p])
    return float(np.clip(x[1] - b / (2 * a), x[0], x[2]))


def extract_linewidth(result: SpectrumResult) -> tuple[float, float, PeakStructure]:
    """(linewidth, peak shift, structure) of a sampled spectrum.

    Two maxima mirrored about zero (positions within two local grid steps,
    heights within 5%) count as one symmetric doublet and the width of one
    of its peaks is reported, with the shift as its |position|.
    """
    omega, S = np.asarray(result.omega), np.asarray(result.S)
    peaks = local_maxima(omega, S)
    heights = S[peaks]
    if len(peaks) == 1:
        p = peaks[0]
        width, _, _ = peak_fwhm(omega, S, p)
        return width, peak_position(omega, S, p), PeakStructure.SINGLE
    if len(peaks) == 2:
        a, b = peaks
        step = 2 * max(omega[a + 1] - omega[a - 1], omega[b + 1] - omega[b - 1]) / 2
        mirrored = abs(omega[a] + omega[b]) <= step
        similar = abs(heights[0] - heights[1]) <= 0.05 * max(heights)
        if mirrored and similar:
            p = b if omega[b] > 0 else a
            width, _, _ = peak_fwhm(omega, S, p)
            return width, abs(peak_position(omega, S, p)), PeakStructure.SYMMETRIC_DOUBLE
    p = peaks[int(np.argmax(heights))]
    width, _, _ = peak_fwhm(omega, S, p)
    return width, peak_position(omega, S, p), PeakStructure.MULTI


def default_grid(spec: ModelSpec, points: int = 4001) -> np.ndarray:
    half = 5 * (spec.w + GAMMA * (spec.N + 1) + 2 * spec.V + spec.kappa)
    return np.linspace(-half, half, points)


def merge_grid(omega: np.ndarray, new: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """New points not already present in ``omega`` (to ``rel_tol`` of the span)."""
    span = max(np.ptp(omega), 1e-300)
    new = np.unique(new)
    pos = np.searchsorted(omega, new)
    left = np.abs(new - omega[np.clip(pos - 1, 0, len(omega) - 1)])
    right = np.abs(new - omega[np.clip(pos, 0, len(omega) - 1)])
    return new[np.minimum(left, right) > rel_tol * span]


def refine_grid(evaluate, omega: np.ndarray, S: np.ndarray, min_points: int = 200,
                max_rounds: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Add samples around the reported peak(s) until its FWHM holds ``min_points``."""
    for _ in range(max_rounds):
        try:
            width, shift, structure = extract_linewidth(SpectrumResult(omega, S))
        except GridError:
            break
        centres = [shift, -shift] if structure is PeakStructure.SYMMETRIC_DOUBLE else [shift]
        counts = [np.count_nonzero(np.abs(omega - c) <= width / 2) for c in centres]
        if min(counts) >= min_points:
            break
        fine = np.concatenate([np.linspace(c - width, c + width, 4 * min_points + 1) for c in centres])
        new = merge_grid(omega, fine)
        if new.size == 0:
            break
        omega = np.concatenate([omega, new])
        S = np.concatenate([S, evaluate(new)])
        order = np.argsort(omega)
        omega, S = omega[order], S[order]
    return omega, S


class SchurResolvent:
    """``2 Re[-readout . (M + i w)^-1 source]`` through a complex Schur form.

    One ``O(d^3)`` factorisation, then a triangular solve per frequency.
    Backward stable, so it does not care how ill-conditioned the eigenbasis is.
    """

    def __init__(self, M: np.ndarray, readout: np.ndarray, source: np.ndarray):
        T, Z = sla.schur(np.asarray(M, dtype=complex), output="complex")
        self.T = T
        self.a = readout @ Z
        self.b = Z.conj().T @ source

    def spectrum(self, omega: np.ndarray) -> np.ndarray:
        d = self.T.shape[0]
        out = np.empty(len(omega))
        shifted = self.T.copy()
        diag = np.diag(self.T)
        for i, w in enumerate(omega):
            shifted[np.arange(d), np.arange(d)] = diag + 1j * w
            y = sla.solve_triangular(shifted, self.b, check_finite=False)
            out[i] = 2 * np.real(-self.a @ y)
        return out


def time_domain_steps(M: np.ndarray, eigenvalues: np.ndarray, omega_max: float,
                      rtol: float = 1e-13) -> float:
    """Rough number of propagation steps the time-domain route would need."""
    rates = np.abs(np.asarray(eigenvalues).real)
    rates = rates[rates > 1e-10]
    if rates.size == 0:
        return math.inf
    dt = 0.5 / max(np.abs(M).sum(axis=1).max(), omega_max, 1e-12)
    return -math.log(rtol) / rates.min() / dt


def resolvent_spectrum(M: np.ndarray, readout: np.ndarray, source: np.ndarray,
                       omega: np.ndarray) -> np.ndarray:
    """``2 Re[-readout . (M + i w)^-1 source]`` by direct solves, one per frequency."""
    eye = np.eye(M.shape[0])
    return np.array([2 * np.real(-readout @ np.linalg.solve(M + 1j * w * eye, source)) for w in omega])


@dataclass
class EmissionAnalysis:
    """Everything computed for one model point."""
    spec: ModelSpec
    state: SteadyState
    spectrum: SpectrumResult
    modes: LiouvillianSpectrum | None


def analyze_emission(spec: ModelSpec, omega: np.ndarray | None = None, phase_in: str | None = None,
                     phi: float | None = None, per_mode: bool = False, refine: bool = True,
                     L: Superoperator | None = None, state: SteadyState | None = None,
                     min_points: int = 200, check_points: int = 7,
                     check_tol: float = 1e-6, max_steps: float = 2e5) -> EmissionAnalysis:
    """Steady state, eigenmodes, residues, sampled S(w) and its linewidth.

    The residue sum is accepted only if it matches exact resolvent solves at
    ``check_points`` frequencies to ``check_tol`` (relative to the peak);
    otherwise, typically next to an exceptional point, the time-domain route
    is used, or the Schur resolvent when propagation would take more than
    ``max_steps`` steps. ``spectrum.method`` records which path produced the
    numbers.
    """
    L = L if L is not None else assemble(spec)
    state = state if state is not None else solve_steady_state(L, spec)
    if phase_in is None:
        phase_in, phi0 = default_convention(spec)
        phi = phi0 if phi is None else phi
    Sp, Sm = emission_operators(spec.space, phase_in, phi or 0.0)
    omega = default_grid(spec) if omega is None else np.asarray(omega, dtype=float)
    modes = residues(eigendecompose(L, strict=False), Sp, Sm, state)
    lam, c = modes.eigenvalues, modes.residues

    def by_residues(om):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return spectral_function(c, lam, om).S

    S = by_residues(omega)
    # a-posteriori check of the eigen route against exact solves
    if L.conserves_excitations():
        idx, M = L.block(EMISSION_SECTOR)
    else:
        idx, M = np.arange(L.dim), L.dense()
    readout = vec(Sp.dense().T)[idx]
    source = vec(Sm.dense() @ state.rho)[idx]
    probe = np.unique(np.concatenate([[0.0], omega[np.linspace(0, omega.size - 1, check_points).astype(int)],
                                      [omega[int(np.argmax(S))]]]))
    exact = resolvent_spectrum(M, readout, source, probe)
    deviation = np.max(np.abs(by_residues(probe) - exact)) / max(np.max(np.abs(exact)), 1e-300)
    if deviation <= check_tol:
        evaluate, method = by_residues, "residue"
    else:
        omega_max = np.max(np.abs(omega))
        if time_domain_steps(M, lam, omega_max) <= max_steps:
            log.info("residue sum off by %.2e, switching to time domain", deviation)
            evaluate, method = TimeDomainCorrelator(M, readout, source, omega_max).spectrum, "time_domain"
        else:
            log.info("residue sum off by %.2e and too stiff to propagate, using Schur resolvent", deviation)
            evaluate, method = SchurResolvent(M, readout, source).spectrum, "resolvent"
        S = evaluate(omega)
    if refine:
        omega, S = refine_grid(evaluate, omega, S, min_points)
    result = SpectrumResult(omega, S, method=method)
    result.meta.update(condition=modes.condition_estimate, residue_check=float(deviation))
    if per_mode:
        result.per_mode = spectral_function(c, lam, omega, per_mode=True).per_mode
    try:
        result.linewidth, result.peak_shift, result.peak_structure = extract_linewidth(result)
    except GridError as exc:
        result.meta["error"] = str(exc)
    return EmissionAnalysis(spec, state, result, modes)


def emission_eigenvalues(spec: ModelSpec) -> np.ndarray:
    """Sorted eigenvalues of the emission block (no eigenvectors)."""
    L = assemble(spec)
    if L.conserves_excitations():
        _, M = L.block(EMISSION_SECTOR)
    else:
        M = L.dense()
    ev = sla.eigvals(M)
    return ev[mode_order(ev)]


def _paired(ev: np.ndarray, tol: float) -> bool:
    """Two slowest modes form a complex-conjugate pair with equal real parts."""
    a, b = ev[0], ev[1]
    return abs(a.real - b.real) <= tol and abs(a.imag + b.imag) <= tol and abs(a.imag) > tol


def find_exceptional_points(spec: ModelSpec, w_min: float, w_max: float, samples: int = 400,
                            log_scale: bool = False, tol: float = 0.01) -> list[float]:
    """Pump rates where the two slowest emission modes coalesce.

    The scan flags where the slowest pair switches between two real modes and
    a complex-conjugate pair; each switch is refined by bisection to ``tol``
    (in units of the decay rate).
    """
    ws = np.geomspace(w_min, w_max, samples) if log_scale else np.linspace(w_min, w_max, samples)

    def state_at(w):
        ev = emission_eigenvalues(spec.with_(w=float(w)))
        scale = max(abs(ev[1]), GAMMA)
        return _paired(ev, 1e-9 * scale)

    flags = [state_at(w) for w in ws]
    found = []
    for i in range(len(ws) - 1):
        if flags[i] == flags[i + 1]:
            continue
        lo, hi, f_lo = ws[i], ws[i + 1], flags[i]
        while hi - lo > tol / 10:
            mid = 0.5 * (lo + hi)
            if state_at(mid) == f_lo:
                lo = mid
            else:
                hi = mid
        w_star = 0.5 * (lo + hi)
        found.append(float(w_star))
    return found


def exceptional_point_condition(spec: ModelSpec, w: float) -> float:
    """Eigenvector condition number of the emission block at pump ``w``."""
    return eigendecompose(assemble(spec.with_(w=w)), strict=False).condition_estimate


def cumulant_reference_eigenvalues(N: int, w: float) -> tuple[complex, complex]:
    """Large-pump cumulant estimate of the two slowest emission modes."""
    G = GAMMA
    x = w + G * (N + 1)
    root = np.sqrt(complex(-4 * N * G * (w + 2 * G) + x ** 2))
    return -0.25 * (x - root), -0.25 * (x + root)


def cumulant_merging_pump(N: int) -> float:
    """Pump rate where the cumulant discriminant vanishes (largest root)."""
    G = GAMMA
    # (w + G(N+1))^2 - 4 N G (w + 2G) = 0  ->  w^2 + b w + c = 0
    b = 2 * G * (N + 1) - 4 * N * G
    c = G ** 2 * (N + 1) ** 2 - 8 * N * G ** 2
    disc = b * b - 4 * c
    if disc < 0:
        return math.nan
    return (-b + math.sqrt(disc)) / 2
