"""Regime labels: photon statistics crossed with linewidth class."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .liouvillian import GAMMA, Model, ModelSpec, collective_only_liouvillian, effective_pump_rate
from .observables import ObservableSet
from .spectrum import SpectrumResult
from .steady import SteadyState, solve_steady_state, steady_state

EPS_C = 0.1
ULTRANARROW = 2.5 * GAMMA


class Statistics(enum.Enum):
    QUANTUM = "Q"
    COHERENT = "C"
    BUNCHED = "B"
    UNCLASSIFIABLE = "?"


class Width(enum.Enum):
    ULTRANARROW = "UN"
    NARROW = "N"
    BROAD = "B"
    UNCLASSIFIABLE = "?"


@dataclass(frozen=True)
class RegimeLabel:
    statistics: Statistics
    width: Width
    g2: float
    linewidth: float
    peak_shift: float = math.nan
    Sz: float = math.nan
    intensity: float = math.nan

    @property
    def code(self) -> str:
        """Short form such as ``"Q UN"``."""
        return f"{self.statistics.value} {self.width.value}"


def classify_statistics(g2: float, eps_c: float = EPS_C) -> Statistics:
    if not np.isfinite(g2):
        return Statistics.UNCLASSIFIABLE
    if g2 < 1 - eps_c:
        return Statistics.QUANTUM
    if g2 > 1 + eps_c:
        return Statistics.BUNCHED
    return Statistics.COHERENT


def classify_width(linewidth: float, N: int, ultranarrow: float = ULTRANARROW) -> Width:
    if not np.isfinite(linewidth):
        return Width.UNCLASSIFIABLE
    if linewidth <= ultranarrow:
        return Width.ULTRANARROW
    if linewidth < GAMMA * N:
        return Width.NARROW
    return Width.BROAD


def label(g2: float, linewidth: float, N: int, eps_c: float = EPS_C, peak_shift: float = math.nan,
          Sz: float = math.nan, intensity: float = math.nan) -> RegimeLabel:
    """Pure labelling from raw numbers; used again when relabelling saved sweeps."""
    return RegimeLabel(classify_statistics(g2, eps_c), classify_width(linewidth, N),
                       float(g2), float(linewidth), float(peak_shift), float(Sz), float(intensity))


def classify(obs: ObservableSet, spectrum: SpectrumResult, N: int, eps_c: float = EPS_C) -> RegimeLabel:
    g2 = math.nan if obs.underflow else obs.g2
    return label(g2, spectrum.linewidth, N, eps_c, spectrum.peak_shift, obs.Sz, obs.intensity)


def inversion_window(N: int, V: float) -> tuple[float, float]:
    """Pump range ``[N^2/2, 4 V^2]`` (decay-rate units) where inversion is expected.

    Empty (``lo > hi``) for weak interaction.
    """
    if V <= 0:
        raise ValueError("V must be positive")
    return GAMMA * N ** 2 / 2, 4 * V ** 2 / GAMMA


def window_is_empty(N: int, V: float) -> bool:
    lo, hi = inversion_window(N, V)
    return lo > hi


def collective_populations(state: SteadyState) -> np.ndarray:
    """Dicke populations of the collective spin, the pumped spin traced out."""
    d = state.rho.shape[0] // 2
    rho = state.rho
    return np.real(np.diag(rho[:d, :d]) + np.diag(rho[d:, d:]))


@dataclass(frozen=True)
class EffectiveModelComparison:
    w: float
    V: float
    w_eff: float
    full: np.ndarray
    effective: np.ndarray

    @property
    def l1_distance(self) -> float:
        return float(np.abs(self.full - self.effective).sum())

    @property
    def Jz_full(self) -> float:
        return _jz(self.full)

    @property
    def Jz_effective(self) -> float:
        return _jz(self.effective)


def _jz(p: np.ndarray) -> float:
    J = (len(p) - 1) / 2
    return float(np.dot(J - np.arange(len(p)), p))


def effective_model_comparison(N: int, w: float, V: float) -> EffectiveModelComparison:
    """Collective-spin populations of the interacting model against the
    model with the pumped spin adiabatically eliminated."""
    if V <= 0 or w <= 0:
        raise ValueError("need w > 0 and V > 0")
    full = collective_populations(steady_state(ModelSpec(Model.INTERACTING, N, w, V=V)))
    w_eff = effective_pump_rate(w, V)
    eff = solve_steady_state(collective_only_liouvillian(N, w_eff))
    return EffectiveModelComparison(w, V, w_eff, full, np.real(np.diag(eff.rho)))
