import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scarlab.duality import lgt_state_to_ising
from scarlab.fermions import (
    anticommutator_residual,
    build_fermion_rep,
    end_matter_plaquette_residual,
    fermion_report,
    pauli_identity_residuals,
    quadratic_term_residuals,
    verify_commutant,
)
from scarlab.geometry import Geometry
from scarlab.hamiltonian import CouplingConfig, build_ising_hamiltonian, build_lgt_hamiltonian
from scarlab.scars import (
    ScarLabel,
    check_subspace_invariance,
    effective_hamiltonian,
    projected_hamiltonian,
    scar_basis_matrix,
    scar_labels,
    scar_patterns,
    scar_spec,
    scar_state,
)
from scarlab.sectors import apply_pauli, enumerate_lgt_sector


def test_label_validation():
    with pytest.raises(ValueError):
        ScarLabel("odd", alpha=5, k=1).validate(3)
    with pytest.raises(ValueError):
        ScarLabel("odd", alpha=1, k=4).validate(3)
    with pytest.raises(ValueError):
        ScarLabel("even", which=1).validate(3)
    assert len(scar_labels(5)) == 20
    assert len(scar_labels(4)) == 2


@pytest.mark.parametrize("L", [3, 4, 5])
@pytest.mark.parametrize("side", ["ising", "lgt"])
def test_specs_are_complete(L, side):
    for lab in scar_labels(L):
        assert scar_spec(L, lab, side).is_complete()


@pytest.mark.parametrize("L", [3, 4, 5])
def test_states_satisfy_their_stabilizers(L):
    geom = Geometry(L, 2)
    basis = enumerate_lgt_sector(geom)
    for side in ("ising", "lgt"):
        for lab in scar_labels(L):
            psi = scar_state(L, lab, side, basis if side == "lgt" else None)
            for P, val in scar_spec(L, lab, side).generators:
                Ppsi = apply_pauli(psi.basis, P, psi)
                assert np.allclose(Ppsi.amplitudes, val * psi.amplitudes)


@pytest.mark.parametrize("L", [3, 5])
def test_scar_basis_is_orthonormal(L):
    for side in ("ising", "lgt"):
        S = scar_basis_matrix(L, side)
        assert np.allclose(S.conj().T @ S, np.eye(4 * L), atol=1e-14)


@pytest.mark.parametrize("L", [3, 5])
def test_gauge_scars_are_dual_images(L):
    basis = enumerate_lgt_sector(Geometry(L, 2))
    for lab in scar_labels(L):
        lgt = scar_state(L, lab, "lgt", basis)
        ising = scar_state(L, lab, "ising")
        assert np.allclose(lgt_state_to_ising(lgt).amplitudes, ising.amplitudes, atol=1e-14)


@pytest.mark.parametrize("which", [1, 2])
def test_even_patterns_alternate(which):
    zp, xp = scar_patterns(6, ScarLabel("even", which=which))
    assert np.all(zp[1:] == -zp[:-1])
    assert np.all(xp == -1)


def test_odd_pattern_has_single_defect():
    # exactly one rung has X parity +1, at the defect column k
    for lab in scar_labels(5):
        zp, xp = scar_patterns(5, lab)
        assert np.sum(xp == 1) == 1
        assert np.argmax(xp) == lab.k - 1


@pytest.mark.parametrize("L", [4, 6])
@settings(derandomize=True, max_examples=6, deadline=None)
@given(g=st.floats(0.0, 3.0))
def test_even_scars_have_zero_energy(L, g):
    H = build_ising_hamiltonian(L, CouplingConfig(g))
    for lab in scar_labels(L):
        psi = scar_state(L, lab, "ising")
        assert np.linalg.norm(H.matrix @ psi.amplitudes) <= 1e-12


@pytest.mark.parametrize("L", [3, 5])
@pytest.mark.parametrize("vx", [1, -1])
def test_effective_hamiltonian_matches_projection(L, vx):
    geom = Geometry(L, 2)
    cfg = CouplingConfig(0.7, v_x=vx)
    basis = enumerate_lgt_sector(geom, vx, 1)
    H = build_lgt_hamiltonian(geom, basis, cfg)
    S = scar_basis_matrix(L, "lgt", basis)
    assert np.max(np.abs(projected_hamiltonian(H, S) - effective_hamiltonian(L, cfg))) <= 1e-12


def test_effective_hamiltonian_with_break():
    L = 5
    geom = Geometry(L, 2)
    cfg = CouplingConfig(0.9, epsilon=0.3, epsilon_site=2)
    basis = enumerate_lgt_sector(geom)
    H = build_lgt_hamiltonian(geom, basis, cfg)
    S = scar_basis_matrix(L, "lgt", basis)
    states = [scar_state(L, lab, "lgt", basis) for lab in scar_labels(L)]
    assert check_subspace_invariance(H, states) <= 1e-12
    assert np.max(np.abs(projected_hamiltonian(H, S) - effective_hamiltonian(L, cfg))) <= 1e-12


def test_effective_hamiltonian_is_symmetric_ring():
    h = effective_hamiltonian(7, CouplingConfig(0.9))
    assert np.allclose(h, h.T)
    # every state hops to exactly two neighbours
    off = h - np.diag(np.diag(h))
    assert np.all(np.sum(off != 0, axis=1) == 2)


def test_effective_hamiltonian_rejects_even_l():
    with pytest.raises(ValueError):
        effective_hamiltonian(4, CouplingConfig(0.9))


@pytest.mark.parametrize("L", [2, 3])
def test_majoranas_anticommute(L):
    assert anticommutator_residual(build_fermion_rep(L)) <= 1e-12


@pytest.mark.parametrize("L", [2, 3])
def test_jordan_wigner_identities(L):
    rep = build_fermion_rep(L)
    assert max(pauli_identity_residuals(rep).values()) <= 1e-12
    assert max(quadratic_term_residuals(rep).values()) <= 1e-12


def test_alternative_plaquette_sign_misses_by_two():
    # the opposite-sign form of the plaquette identity is off by exactly 2
    assert abs(end_matter_plaquette_residual(build_fermion_rep(2)) - 2.0) < 1e-12


@pytest.mark.parametrize("L", [2, 3])
@pytest.mark.parametrize("g", [0.3, 0.9])
def test_commutant_on_physical_sector(L, g):
    assert verify_commutant(build_fermion_rep(L), CouplingConfig(g)) <= 1e-12


def test_commutant_fails_off_the_physical_sector():
    rep = build_fermion_rep(3)
    assert verify_commutant(rep, CouplingConfig(0.9), parity_even=False) > 1.0


def test_report_keys():
    rep = fermion_report(2, CouplingConfig(0.9))
    assert rep["commutant"] <= 1e-12
    assert "commutant_full_space" in rep and "plaquette_fermion_alt_sign" in rep
