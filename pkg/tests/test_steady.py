import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from partialpump import steady as steady_mod
from partialpump.errors import NullSpaceDegenerate
from partialpump.liouvillian import ModelSpec, assemble, build_liouvillian
from partialpump.operators import HilbertSpace, build_pumped_spin
from partialpump.steady import single_atom_reference, solve_steady_state, steady_state

models = st.sampled_from(["toy", "interacting", "collective_pump", "auxiliary"])


def make_spec(model, N, w, phi):
    extra = {"toy": dict(phi=phi), "interacting": dict(V=0.7), "collective_pump": dict(phi=phi),
             "auxiliary": dict(phi=phi, kappa=0.3)}[model]
    return ModelSpec(model, N, w, **extra)


@given(st.floats(0.0, 1e3))
def test_lone_pumped_atom(w):
    spin = build_pumped_spin()
    space = HilbertSpace.pumped_spin()
    L = build_liouvillian(space, [(spin["minus"], 1.0), (spin["plus"], w)])
    state = solve_steady_state(L)
    ref = single_atom_reference(w)
    sz = (state.rho @ spin["z"].dense()).trace().real
    assert sz == pytest.approx(ref["magnetization"], abs=1e-12)


def test_single_atom_reference_limits():
    assert single_atom_reference(1.0)["magnetization"] == 0.0
    assert single_atom_reference(math.inf)["intensity"] == 1.0
    with pytest.raises(ValueError):
        single_atom_reference(-1.0)


def test_unpumped_pair_is_degenerate():
    # with w = 0 the dark state and the ground state are both stationary
    with pytest.raises(NullSpaceDegenerate):
        steady_state(ModelSpec("toy", 1, 0.0, phi=math.pi))


@given(models, st.integers(1, 6), st.floats(0.01, 100.0), st.floats(0.0, 2 * math.pi))
def test_steady_state_is_a_density_matrix(model, N, w, phi):
    state = steady_state(make_spec(model, N, w, phi))
    rho = state.rho
    assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert state.min_eigenvalue >= -1e-8
    assert state.residual_norm <= steady_mod.RESIDUAL_TOL


def test_shift_invert_matches_dense(monkeypatch):
    spec = ModelSpec("toy", 6, 2.0, phi=1.0)
    dense = steady_state(spec)
    monkeypatch.setattr(steady_mod, "DENSE_ENTRY_LIMIT", 1)
    sparse = steady_state(spec)
    assert sparse.method == "shift-invert"
    assert np.allclose(sparse.rho, dense.rho, atol=1e-9)


@given(st.integers(1, 5), st.floats(0.05, 30.0), st.floats(0.0, 2 * math.pi))
def test_phase_rotates_coherences_only(N, w, phi):
    a = steady_state(ModelSpec("toy", N, w)).rho
    b = steady_state(ModelSpec("toy", N, w, phi=phi)).rho
    assert np.allclose(np.diag(a), np.diag(b), atol=1e-10)
    h = a.shape[0] // 2
    # pumped-up / pumped-down block picks up exp(-i phi)
    assert np.allclose(b[:h, h:], np.exp(-1j * phi) * a[:h, h:], atol=1e-10)


def test_charge_sector_restriction_gives_diagonal_blocks():
    state = steady_state(ModelSpec("toy", 4, 3.0))
    n = state.spec.space.excitations()
    off = n[:, None] != n[None, :]
    assert np.max(np.abs(state.rho[off])) == 0.0


def test_large_stiff_collective_pump():
    state = steady_state(ModelSpec("collective_pump", 100, 1e3))
    assert state.residual_norm <= steady_mod.RESIDUAL_TOL
    assert np.isfinite(state.singular_gap)
