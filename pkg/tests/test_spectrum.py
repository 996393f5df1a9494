import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from partialpump.errors import DefectiveNearEP, GridError
from partialpump.liouvillian import ModelSpec, assemble, vec
from partialpump.observables import emission_operators, observables
from partialpump.spectrum import (EMISSION_SECTOR, PeakStructure, SchurResolvent, SpectrumResult,
                                  TimeDomainCorrelator, analyze_emission, cumulant_merging_pump,
                                  cumulant_reference_eigenvalues, eigendecompose, emission_eigenvalues,
                                  extract_linewidth, find_exceptional_points, local_maxima, merge_grid,
                                  mode_order, refine_grid, residues, resolvent_spectrum, spectral_function)
from partialpump.steady import steady_state


def lorentzian(omega, centre, fwhm):
    return (fwhm / 2) ** 2 / ((omega - centre) ** 2 + (fwhm / 2) ** 2)


def emission_block(spec):
    L = assemble(spec)
    state = steady_state(spec)
    Sp, Sm = emission_operators(spec.space)
    idx, M = L.block(EMISSION_SECTOR)
    return M, vec(Sp.dense().T)[idx], vec(Sm.dense() @ state.rho)[idx]


def modes_for(spec):
    L = assemble(spec)
    state = steady_state(spec)
    Sp, Sm = emission_operators(spec.space)
    return residues(eigendecompose(L, strict=False), Sp, Sm, state)


@given(st.integers(1, 6), st.floats(0.05, 50.0), st.floats(0.0, 2 * math.pi))
def test_residues_sum_to_intensity(N, w, phi):
    spec = ModelSpec("toy", N, w, phi=phi)
    modes = modes_for(spec)
    assert modes.residues.sum().real == pytest.approx(observables(spec).intensity, rel=1e-8)
    assert modes.biorthonormality_error() < 1e-8


def test_negative_residue_on_slowest_mode():
    modes = modes_for(ModelSpec("toy", 1, 5.0))
    assert modes.residues[0].real < 0


def test_mode_order_ties():
    ev = np.array([-1 + 2j, -0.5, -1 - 2j, -3])
    assert list(ev[mode_order(ev)]) == [-0.5, -1 - 2j, -1 + 2j, -3]


def test_strict_decomposition_at_exceptional_point():
    spec = ModelSpec("toy", 1, 1.0)
    eps = find_exceptional_points(spec, 0.1, 5.0, samples=60, tol=1e-6)
    with pytest.raises(DefectiveNearEP):
        eigendecompose(assemble(spec.with_(w=eps[0])), cond_limit=10.0)


@given(st.integers(1, 3), st.floats(0.2, 10.0))
def test_three_routes_agree(N, w):
    spec = ModelSpec("toy", N, w, phi=0.4)
    M, readout, source = emission_block(spec)
    omega = np.linspace(-15, 15, 41)
    exact = resolvent_spectrum(M, readout, source, omega)
    scale = np.max(np.abs(exact))
    assert np.allclose(SchurResolvent(M, readout, source).spectrum(omega), exact, atol=1e-9 * scale)
    td = TimeDomainCorrelator(M, readout, source, 15.0).spectrum(omega)
    assert np.allclose(td, exact, atol=1e-6 * scale)
    modes = modes_for(spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        S = spectral_function(modes.residues, modes.eigenvalues, omega).S
    assert np.allclose(S, exact, atol=1e-8 * scale)


@given(st.floats(-5, 5), st.floats(0.3, 4.0))
def test_linewidth_of_a_lorentzian(centre, fwhm):
    omega = np.linspace(-20, 20, 8001)
    width, shift, structure = extract_linewidth(SpectrumResult(omega, lorentzian(omega, centre, fwhm)))
    assert structure is PeakStructure.SINGLE
    assert width == pytest.approx(fwhm, rel=1e-3)
    assert shift == pytest.approx(centre, abs=1e-3)


def test_symmetric_doublet_and_multi():
    omega = np.linspace(-20, 20, 8001)
    double = lorentzian(omega, 4, 1) + lorentzian(omega, -4, 1)
    width, shift, structure = extract_linewidth(SpectrumResult(omega, double))
    assert structure is PeakStructure.SYMMETRIC_DOUBLE
    assert shift == pytest.approx(4, abs=1e-3) and width == pytest.approx(1, rel=1e-2)
    lopsided = lorentzian(omega, 4, 1) + 0.5 * lorentzian(omega, -2, 1)
    assert extract_linewidth(SpectrumResult(omega, lopsided))[2] is PeakStructure.MULTI


def test_grid_errors():
    omega = np.linspace(0, 10, 101)
    with pytest.raises(GridError):
        local_maxima(omega, np.exp(-omega))
    with pytest.raises(GridError):
        extract_linewidth(SpectrumResult(omega, lorentzian(omega, 5, 40)))


def test_plateau_ripple_is_one_peak():
    omega = np.linspace(-10, 10, 2001)
    S = lorentzian(omega, 0, 2)
    S[990:1011] = 1.0 + 1e-13 * (-1) ** np.arange(21)
    assert len(local_maxima(omega, S)) == 1


def test_merge_grid_drops_duplicates():
    omega = np.linspace(0, 1, 11)
    new = merge_grid(omega, np.array([0.1 + 1e-14, 0.15, 0.15, 0.9]))
    assert np.allclose(new, [0.15])


def test_refinement_resolves_narrow_line():
    omega = np.linspace(-50, 50, 201)
    f = lambda om: lorentzian(om, 0.3, 0.2)
    om, S = refine_grid(f, omega, f(omega), min_points=50)
    assert np.count_nonzero(np.abs(om - 0.3) <= 0.1) >= 50
    assert np.all(np.diff(om) > 0)


def test_coarse_grid_warns():
    modes = modes_for(ModelSpec("toy", 2, 1.0))
    with pytest.warns(RuntimeWarning):
        spectral_function(modes.residues, modes.eigenvalues, np.linspace(-100, 100, 11))


def test_weakly_pumped_pair_is_a_doublet():
    sr = analyze_emission(ModelSpec("toy", 1, 0.5)).spectrum
    assert sr.method == "residue"
    assert sr.peak_structure is PeakStructure.SYMMETRIC_DOUBLE
    assert sr.peak_shift > sr.linewidth / 4 > 0


def test_phi_pi_line_is_centred():
    sr = analyze_emission(ModelSpec("toy", 4, 1.0, phi=math.pi)).spectrum
    assert sr.peak_structure is PeakStructure.SINGLE
    assert abs(sr.peak_shift) < 1e-6 * sr.linewidth


def test_exceptional_point_fallback_is_recorded():
    spec = ModelSpec("toy", 1, 1.0)
    ep = find_exceptional_points(spec, 0.1, 5.0, samples=60, tol=1e-9)[0]
    an = analyze_emission(spec.with_(w=ep))
    assert an.spectrum.meta["condition"] > 1e3
    assert an.spectrum.method in ("residue", "time_domain", "resolvent")
    assert np.isfinite(an.spectrum.linewidth)


def test_cumulant_reference():
    N = 30
    w = cumulant_merging_pump(N)
    a, b = cumulant_reference_eigenvalues(N, w)
    assert a == pytest.approx(b, abs=1e-6)
    assert math.isnan(cumulant_merging_pump(1)) or cumulant_merging_pump(1) > 0


def test_emission_eigenvalues_are_decaying():
    ev = emission_eigenvalues(ModelSpec("interacting", 5, 3.0, V=2.0))
    assert np.all(ev.real < 0)
    # charge counts 0..6 occur 1, 2, 2, 2, 2, 2, 1 times; pairs one charge apart
    assert len(ev) == 1 * 2 + 4 * 2 * 2 + 2 * 1
