import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scarlab.entanglement import (
    Block,
    Cut,
    EntanglementError,
    all_cuts,
    decompose,
    entropy_decomposition,
    entropy_direct,
    half_cut,
    ising_parity_blocks,
    lgt_superselection_blocks,
    reduced_density_matrix,
    symmetry_cap,
    von_neumann,
)
from scarlab.geometry import Geometry
from scarlab.hamiltonian import CouplingConfig, build_lgt_hamiltonian, spectrum_dense
from scarlab.scan import CutPlan, geometry_scan, mark_degeneracies, momentum_spectrum
from scarlab.scars import effective_hamiltonian, scar_basis_matrix, scar_labels, scar_state
from scarlab.sectors import SectorLabel, StateVector, basis_from_configs, enumerate_ising_sector, enumerate_lgt_sector


def random_state(basis, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    return StateVector(basis, v).normalized()


def test_cut_partitions_register():
    for side in ("lgt", "ising"):
        for cut in all_cuts(5, side):
            assert sorted(cut.qubits_A + cut.qubits_Abar) == list(range(cut.n_qubits))
            if side == "lgt":
                assert set(cut.boundary_links) <= set(cut.qubits_Abar)


def test_cut_width_range():
    with pytest.raises(ValueError):
        Cut("lgt", 5, 0, 1)
    with pytest.raises(ValueError):
        Cut("ising", 5, 0, 2, k=3)


def test_product_state_has_rank_one():
    basis = enumerate_ising_sector(3)
    rdm = reduced_density_matrix(StateVector.basis_state(basis, 5), half_cut(3, "ising"))
    eig = rdm.eigenvalues()
    assert np.sum(eig > 1e-12) == 1


def test_bell_pair_has_two_half_eigenvalues():
    basis = enumerate_ising_sector(3)
    # qubits 0 and 1 entangled across the cut at plaquette column 1
    v = np.zeros(64, dtype=complex)
    v[0] = v[0b11] = 1 / np.sqrt(2)
    cut = Cut("ising", 3, 2, 1)  # A = column 0, so qubits 0 and 3
    assert 0 in cut.qubits_A and 1 not in cut.qubits_A
    eig = reduced_density_matrix(StateVector(basis, v), cut).eigenvalues()
    assert np.allclose(np.sort(eig)[-2:], [0.5, 0.5])


def test_unnormalized_state_rejected():
    basis = enumerate_ising_sector(3)
    with pytest.raises(ValueError):
        reduced_density_matrix(StateVector(basis, np.ones(64)), half_cut(3, "ising"))


@pytest.mark.parametrize("side", ["lgt", "ising"])
@settings(derandomize=True, max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_block_split_matches_direct_entropy(side, seed):
    L = 5
    basis = enumerate_lgt_sector(Geometry(L, 2)) if side == "lgt" else enumerate_ising_sector(L)
    psi = random_state(basis, seed)
    if side == "ising":
        # restrict to the parity-even sector
        full = (1 << 2 * L) - 1
        a = psi.amplitudes
        psi = StateVector(basis, (a + a[basis.states ^ full]) / 2).normalized()
    cut = Cut(side, L, seed % L, (seed % L + 2 + seed % 2) % L)
    rdm = reduced_density_matrix(psi, cut)
    d = decompose(psi, cut)
    assert abs(sum(b.p for b in d.blocks) - 1) < 1e-10
    assert abs(d.S_total - entropy_direct(rdm.matrix)) < 1e-10
    assert abs(d.S_total - (d.S_dist + d.S_symm)) < 1e-12
    assert d.S_symm <= symmetry_cap(side) + 1e-12
    if side == "lgt":
        assert d.n_blocks <= 8
    for b in d.blocks:
        m = b.matrix
        assert abs(np.trace(m) - 1) < 1e-10
        assert np.linalg.eigvalsh((m + m.conj().T) / 2).min() > -1e-10


def test_maximally_mixed_parity_rdm():
    blocks = [Block((1,), 0.5, np.array([1.0])), Block((-1,), 0.5, np.array([1.0]))]
    s_dist, s_symm, s_total = entropy_decomposition(blocks)
    assert s_dist == 0 and abs(s_symm - math.log(2)) < 1e-15 and s_total == s_symm


def test_negative_eigenvalue_raises():
    with pytest.raises(EntanglementError):
        von_neumann(np.array([1.1, -0.1]))


def test_lgt_blocks_reject_ising_cut():
    basis = enumerate_ising_sector(3)
    rdm = reduced_density_matrix(random_state(basis, 0), half_cut(3, "ising"))
    with pytest.raises(ValueError):
        lgt_superselection_blocks(rdm)


def test_mixed_superselection_raises():
    # flipping one labelled link inside A, with the complement untouched,
    # superposes two superselection blocks coherently
    geom = Geometry(4, 2)
    cut = half_cut(4, "lgt")
    b1 = enumerate_lgt_sector(geom, 1, 1)
    m = cut.label_masks()[0]
    other = int(b1.states[0] ^ (m & -m))
    basis = basis_from_configs(geom.n_links, [int(b1.states[0]), other], SectorLabel("full"), geom)
    psi = StateVector(basis, np.array([1, 1]) / np.sqrt(2))
    with pytest.raises(EntanglementError):
        lgt_superselection_blocks(reduced_density_matrix(psi, cut))


@pytest.mark.parametrize("L", [4, 6])
def test_even_scars_are_products(L):
    for lab in scar_labels(L):
        psi = scar_state(L, lab, "ising")
        for cut in all_cuts(L, "ising"):
            d = ising_parity_blocks(reduced_density_matrix(psi, cut))
            assert d.S_dist <= 1e-12 and d.S_symm <= 1e-12
        lgt = scar_state(L, lab, "lgt")
        for cut in all_cuts(L, "lgt"):
            assert decompose(lgt, cut).S_dist <= 1e-12


def test_odd_scar_eigenstate_gauge_side():
    L = 5
    geom = Geometry(L, 2)
    basis = enumerate_lgt_sector(geom)
    res = spectrum_dense(build_lgt_hamiltonian(geom, basis, CouplingConfig(0.9)))
    S = scar_basis_matrix(L, "lgt", basis)
    e, u = np.linalg.eigh(effective_hamiltonian(L, CouplingConfig(0.9)))
    psi = StateVector(basis, S @ u[:, 0])
    assert np.linalg.norm(res.eigenvalues - e[0], ord=-np.inf) < 1e-10
    for cut in all_cuts(L, "lgt"):
        d = decompose(psi, cut)
        assert d.S_dist <= 1e-10
        assert d.S_symm <= 3 * math.log(2) + 1e-12


@pytest.mark.parametrize("L,k", [(4, 2), (3, 3)])
def test_translation_scan_matches_dense(L, k):
    geom = Geometry(L, k)
    basis = enumerate_lgt_sector(geom)
    cfg = CouplingConfig(0.9)
    recs = mark_degeneracies(list(momentum_spectrum(geom, cfg)))
    res = spectrum_dense(build_lgt_hamiltonian(geom, basis, cfg))
    assert np.allclose([r.energy for r in recs], res.eigenvalues, atol=1e-10)
    cut = half_cut(L, "lgt", k)
    for r in recs:
        if r.degeneracy == 1:
            j = int(np.argmin(abs(res.eigenvalues - r.energy)))
            d = decompose(StateVector(basis, res.eigenvectors[:, j]), cut)
            assert abs(d.S_dist - r.S_dist) < 1e-9


def test_scan_summary_counts():
    recs, summary = geometry_scan(3, 3, 0.9)
    assert summary.dim == 256 == len(recs)
    assert summary.n_low >= summary.n_artifacts


@pytest.mark.parametrize("L,k", [(4, 2), (5, 2), (3, 3)])
@settings(derandomize=True, max_examples=5, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_cut_plan_matches_direct_blocks(L, k, seed):
    basis = enumerate_lgt_sector(Geometry(L, k))
    rng = np.random.default_rng(seed)
    amp = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    amp /= np.linalg.norm(amp)
    for cut in all_cuts(L, "lgt", k):
        plan = CutPlan(basis, cut)
        assert plan.blocks is not None
        fast, slow = plan.decompose(amp), decompose(StateVector(basis, amp), cut)
        assert fast.n_blocks == slow.n_blocks
        assert abs(fast.S_dist - slow.S_dist) < 1e-12
        assert abs(fast.S_symm - slow.S_symm) < 1e-12
