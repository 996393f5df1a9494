"""Steady states, photon statistics and emission spectra of a partially pumped
spin ensemble with collective decay."""
from .errors import DefectiveNearEP, GridError, InvalidSteadyState, NoConvergence, NullSpaceDegenerate
from .liouvillian import Model, ModelSpec, Superoperator, assemble
from .observables import ObservableSet, evaluate, observables
from .regimes import RegimeLabel, classify, inversion_window
from .spectrum import EmissionAnalysis, PeakStructure, SpectrumResult, analyze_emission
from .steady import SteadyState, solve_steady_state, steady_state

__all__ = [
    "DefectiveNearEP", "GridError", "InvalidSteadyState", "NoConvergence", "NullSpaceDegenerate",
    "Model", "ModelSpec", "Superoperator", "assemble",
    "ObservableSet", "evaluate", "observables",
    "RegimeLabel", "classify", "inversion_window",
    "EmissionAnalysis", "PeakStructure", "SpectrumResult", "analyze_emission",
    "SteadyState", "solve_steady_state", "steady_state",
]
