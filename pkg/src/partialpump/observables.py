"""Steady-state magnetisation, intensity and equal-time coherences g^(k)(0)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .liouvillian import Model, ModelSpec
from .operators import OperatorMatrix, composite_operators
from .steady import SteadyState, steady_state

UNDERFLOW = 1e-12


@dataclass(frozen=True)
class ObservableSet:
    Sz: float
    intensity: float
    g: dict = field(default_factory=dict)
    phi_obs: float = 0.0
    phase_in: str = "jump"
    underflow: bool = False

    @property
    def g2(self) -> float:
        return self.g.get(2, math.nan)

    @property
    def g3(self) -> float:
        return self.g.get(3, math.nan)


def emission_operators(space, phase_in: str = "jump", phi: float = 0.0,
                       ops: dict | None = None) -> tuple[OperatorMatrix, OperatorMatrix]:
    """(S+, S-) for the requested phase convention.

    ``"jump"``: bare sums ``S- = sigma- + J-`` (the phase sits in the Liouvillian).
    ``"observable"``: ``S- = exp(-i phi) sigma- + J-`` for a model built at phi = 0.
    """
    ops = ops or composite_operators(space)
    if phase_in == "jump":
        Sm = ops["Sm"]
    elif phase_in == "observable":
        Sm = ops["sm"].scale(np.exp(-1j * phi)) + ops["Jm"]
    else:
        raise ValueError(f"phase_in must be 'jump' or 'observable', got {phase_in!r}")
    return Sm.dag, Sm


def default_convention(spec: ModelSpec) -> tuple[str, float]:
    """Phase convention a model is measured in when nothing else is asked for."""
    if spec.model is Model.AUXILIARY:
        return "observable", spec.phi
    return "jump", 0.0


def _expect(rho: np.ndarray, op: OperatorMatrix) -> complex:
    # tr(rho O) = sum_ij rho_ij O_ji
    m = op.entries
    if hasattr(m, "multiply"):
        return complex(m.T.multiply(rho).sum())
    return complex(np.sum(m.T * rho))


def evaluate(state: SteadyState, k_max: int = 3, phase_in: str | None = None,
             phi: float | None = None, ops: dict | None = None) -> ObservableSet:
    """Observables of a steady state.

    With ``phase_in="observable"`` the model must have been assembled with
    no phase in its jump operator.
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    spec = state.spec
    if phase_in is None:
        phase_in, default_phi = default_convention(spec) if spec else ("jump", 0.0)
        phi = default_phi if phi is None else phi
    phi = 0.0 if phi is None else phi
    if phase_in == "observable" and spec is not None and spec.jump_phase != 0.0:
        raise ValueError("observable-side phase needs a model assembled at phi = 0")
    space = spec.space if spec else None
    if ops is None:
        ops = composite_operators(space)
    Sp, Sm = emission_operators(space, phase_in, phi, ops)
    rho = state.rho
    Sz = _expect(rho, ops["Sz"]).real
    intensity = _expect(rho, Sp @ Sm).real
    g = {}
    underflow = intensity < UNDERFLOW
    power = Sm
    for k in range(2, k_max + 1):
        power = Sm @ power
        if underflow:
            g[k] = math.nan
            continue
        num = _expect(rho, power.dag @ power).real
        g[k] = num / intensity ** k
    return ObservableSet(Sz, intensity, g, phi if phase_in == "observable" else 0.0, phase_in, underflow)


def observables(spec: ModelSpec, k_max: int = 3) -> ObservableSet:
    return evaluate(steady_state(spec), k_max)


def phase_convention_equivalence_check(spec: ModelSpec, phi_grid, k_max: int = 3,
                                       tol: float = 1e-9) -> list[dict]:
    """Compare phase-in-jump against phase-in-observable for each phi.

    Returns one record per phi with the largest field deviation; raises
    ``AssertionError`` on a mismatch above ``tol``.
    """
    if spec.model not in (Model.TOY, Model.HP_TOY):
        raise ValueError("equivalence check is defined for the toy model")
    base = steady_state(spec.with_(phi=0.0))
    report = []
    for phi in phi_grid:
        a = evaluate(steady_state(spec.with_(phi=phi)), k_max, "jump")
        b = evaluate(base, k_max, "observable", phi)
        diffs = {"Sz": abs(a.Sz - b.Sz), "intensity": abs(a.intensity - b.intensity)}
        for k in a.g:
            diffs[f"g{k}"] = abs(a.g[k] - b.g[k]) / max(1.0, abs(b.g[k]))
        worst = max(diffs.values())
        report.append({"phi": float(phi), "max_deviation": worst, "passed": worst <= tol, **diffs})
        if worst > tol:
            raise AssertionError(f"phase conventions disagree at phi={phi}: {diffs}")
    return report
