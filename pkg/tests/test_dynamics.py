import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from scarlab.dynamics import (
    EchoSeries,
    RandomCircuitAngles,
    electric_expectation,
    electric_trajectory,
    entanglement_trajectory,
    evolve,
    loschmidt_echo,
    non_scar_initial_state,
    power_law_exponent,
    random_circuit_echo,
    random_circuit_evolve,
    rms_envelope,
    scar_overlaps,
    scar_subspace_echo,
    write_trajectory_csv,
)
from scarlab.duality import lgt_state_to_ising
from scarlab.entanglement import half_cut
from scarlab.geometry import Geometry
from scarlab.hamiltonian import CouplingConfig, build_ising_hamiltonian, build_lgt_hamiltonian
from scarlab.krylov import FlipHamiltonian, KrylovError, krylov_expm, krylov_propagate
from scarlab.scars import ScarLabel, scar_basis_matrix, scar_labels, scar_state
from scarlab.sectors import StateVector, enumerate_ising_sector, enumerate_lgt_sector


def lgt_setup(L, g=0.9, k=2):
    geom = Geometry(L, k)
    basis = enumerate_lgt_sector(geom)
    return geom, basis, build_lgt_hamiltonian(geom, basis, CouplingConfig(g))


@settings(derandomize=True, max_examples=10, deadline=None)
@given(seed=st.integers(0, 1000), t=st.floats(0.0, 20.0))
def test_krylov_matches_expm(seed, t):
    geom, basis, H = lgt_setup(4)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    v /= np.linalg.norm(v)
    ref = sla.expm(-1j * t * H.to_dense()) @ v
    assert np.linalg.norm(krylov_expm(H, v, t) - ref) < 1e-9


def test_krylov_rejects_unsorted_times():
    _, basis, H = lgt_setup(3)
    with pytest.raises(ValueError):
        krylov_propagate(H, np.ones(len(basis)), [1.0, 0.5], lambda t, v: None)


def test_krylov_step_budget():
    _, basis, H = lgt_setup(3)
    v = np.ones(len(basis)) / np.sqrt(len(basis))
    with pytest.raises(KrylovError):
        krylov_propagate(H, v, [50.0], lambda t, v: None, m=4, max_steps=2)


def test_krylov_full_reorth_agrees():
    _, basis, H = lgt_setup(4)
    v = np.random.default_rng(3).normal(size=len(basis)) + 0j
    v /= np.linalg.norm(v)
    a = krylov_expm(H, v, 7.0)
    b = krylov_expm(H, v, 7.0, full_reorth=True)
    assert np.linalg.norm(a - b) < 1e-9


@pytest.mark.parametrize("L,k", [(3, 2), (3, 3)])
def test_flip_hamiltonian_matches_sparse(L, k):
    geom, basis, H = lgt_setup(L, 0.7, k)
    F = FlipHamiltonian.build(geom, basis, CouplingConfig(0.7))
    x = np.random.default_rng(0).normal(size=len(basis)) + 0j
    y = F.frame.from_frame(F.matvec(F.frame.to_frame(x)))
    assert np.allclose(y, H.matrix @ x, atol=1e-13)


def test_dense_and_krylov_echo_agree():
    _, basis, H = lgt_setup(4)
    psi = non_scar_initial_state(basis, 0)
    times = np.linspace(0, 10, 21)
    a = loschmidt_echo(H, psi, times, method="dense").values
    b = loschmidt_echo(H, psi, times, method="krylov").values
    assert np.max(np.abs(a - b)) < 1e-9


def test_evolution_is_unitary_and_conserves_energy():
    _, basis, H = lgt_setup(4)
    psi = non_scar_initial_state(basis, 2)
    e0 = np.vdot(psi.amplitudes, H.matrix @ psi.amplitudes).real
    for t in (0.3, 2.0, 9.0):
        out = evolve(H, psi, t)
        assert abs(out.norm() - 1) < 1e-12
        assert abs(np.vdot(out.amplitudes, H.matrix @ out.amplitudes).real - e0) < 1e-10


def test_evolution_composes():
    _, basis, H = lgt_setup(3)
    psi = non_scar_initial_state(basis, 1)
    a = evolve(H, evolve(H, psi, 1.3), 2.1)
    b = evolve(H, psi, 3.4)
    assert np.allclose(a.amplitudes, b.amplitudes, atol=1e-10)


def test_eigenstate_echo_is_a_phase():
    L = 4
    H = build_ising_hamiltonian(L, CouplingConfig(0.9))
    psi = scar_state(L, ScarLabel("even", which=1), "ising")
    echo = loschmidt_echo(H, psi, np.linspace(0, 30, 31), method="krylov")
    # zero-energy eigenstate: the echo stays exactly 1
    assert np.max(np.abs(echo.values - 1)) < 1e-10


@pytest.mark.parametrize("L", [3, 5, 7])
def test_subspace_echo_matches_full_evolution(L):
    geom = Geometry(L, 2)
    basis = enumerate_lgt_sector(geom)
    cfg = CouplingConfig(0.9)
    F = FlipHamiltonian.build(geom, basis, cfg)
    lab = ScarLabel("odd", alpha=2, k=L)
    times = np.linspace(0, 20, 41)
    full = loschmidt_echo(F, scar_state(L, lab, "lgt", basis), times).values
    sub = scar_subspace_echo(L, cfg, lab, times).values
    assert np.max(np.abs(full - sub)) < 1e-9


def test_non_scar_state_is_orthogonal_to_scars():
    L = 5
    basis = enumerate_lgt_sector(Geometry(L, 2))
    psi = non_scar_initial_state(basis, 4)
    S = scar_basis_matrix(L, "lgt", basis)
    assert np.max(np.abs(S.conj().T @ psi.amplitudes)) == 0
    cfg = int(basis.states[np.argmax(np.abs(psi.amplitudes))])
    assert np.all(scar_overlaps(L, cfg) == 0)
    # balanced electric field
    assert bin(cfg).count("1") * 2 == Geometry(L, 2).n_links


def test_late_time_average_window():
    s = EchoSeries(np.arange(8.0), np.array([1, 1, 1, 1, 1, 1, 0.5, 0.5]))
    assert s.late_time_average() == 0.5
    assert s.late_time_average(0.5) == 0.75


def test_echo_check_flags_bad_series():
    with pytest.raises(ArithmeticError):
        EchoSeries(np.array([0.0, 1.0]), np.array([1.0, 1.5])).check()


def test_rms_envelope_of_exact_power_law():
    x = np.geomspace(1, 1000, 4000)
    xs, env = rms_envelope(x, x ** -0.5, 10, 500, n_bins=20)
    slope = np.polyfit(np.log(xs), np.log(env), 1)[0]
    assert abs(slope + 0.5) < 1e-2


def test_power_law_exponent_on_synthetic_series():
    g = 0.5
    t = np.linspace(0, 2000, 40001)
    vals = np.where(t > 0, (g * np.maximum(t, 1e-9)) ** -0.5, 1.0) * np.exp(1j * t)
    s = EchoSeries(t, vals, {"L": 900})
    assert abs(power_law_exponent(s, g) + 0.5) < 0.02


def test_electric_expectation_of_basis_state():
    geom, basis, _ = lgt_setup(3)
    cfg = int(basis.states[5])
    psi = StateVector.basis_state(basis, cfg)
    for link in range(geom.n_links):
        assert electric_expectation(psi, link) == 1 - 2 * ((cfg >> link) & 1)


def test_electric_trajectory_shape_and_start():
    geom, basis, H = lgt_setup(3)
    psi = non_scar_initial_state(basis, 0)
    times = np.linspace(0, 2, 5)
    traj = electric_trajectory(H, psi, [0, 3], times)
    assert traj.shape == (5, 2)
    assert abs(traj[0, 0] - electric_expectation(psi, 0)) < 1e-12


def test_scar_superposition_keeps_zero_distillable_entanglement():
    L = 5
    geom = Geometry(L, 2)
    basis = enumerate_lgt_sector(geom)
    H = FlipHamiltonian.build(geom, basis, CouplingConfig(0.9))
    rng = np.random.default_rng(0)
    c = rng.normal(size=4 * L) + 1j * rng.normal(size=4 * L)
    psi = StateVector(basis, scar_basis_matrix(L, "lgt", basis) @ (c / np.linalg.norm(c)))
    traj = entanglement_trajectory(H, psi, half_cut(L, "lgt"), np.linspace(0, 10, 6))
    assert np.max(np.abs(traj[:, 0])) < 1e-10


def test_angles_are_reproducible():
    a = RandomCircuitAngles.draw(7, 20)
    b = RandomCircuitAngles.draw(7, 20)
    assert np.array_equal(a.alphas, b.alphas) and np.array_equal(a.betas, b.betas)
    assert np.all((a.betas >= 0) & (a.betas <= np.pi))
    with pytest.raises(ValueError):
        RandomCircuitAngles.draw(0, 3, "gaussian")


def test_cue_beta_marginal():
    # Haar: cos(beta) is uniform on [-1, 1]
    b = RandomCircuitAngles.draw(1, 20000).betas
    assert abs(np.mean(np.cos(b))) < 0.02
    assert abs(np.mean(np.cos(b) ** 2) - 1 / 3) < 0.01


@pytest.mark.parametrize("L", [3, 5])
def test_random_circuit_keeps_scar_span(L):
    geom = Geometry(L, 2)
    basis = enumerate_lgt_sector(geom)
    S = scar_basis_matrix(L, "lgt", basis)
    angles = RandomCircuitAngles.draw(3, 30)
    for lab in scar_labels(L)[:4]:
        out = random_circuit_evolve(scar_state(L, lab, "lgt", basis), angles, 30)
        assert abs(out.norm() - 1) < 1e-12
        leak = out.amplitudes - S @ (S.conj().T @ out.amplitudes)
        assert np.linalg.norm(leak) < 1e-10


def test_random_circuit_gauge_and_ising_agree():
    L = 3
    lab = ScarLabel("odd", alpha=1, k=2)
    angles = RandomCircuitAngles.draw(11, 15, "uniform")
    lgt = random_circuit_echo(scar_state(L, lab, "lgt"), angles, 15).values
    ising = random_circuit_echo(scar_state(L, lab, "ising"), angles, 15).values
    assert np.max(np.abs(lgt - ising)) < 1e-12


def test_random_circuit_layer_count_checked():
    with pytest.raises(ValueError):
        random_circuit_evolve(scar_state(3, scar_labels(3)[0], "ising"), RandomCircuitAngles.draw(0, 2), 5)


def test_random_circuit_dual_map_commutes():
    L = 3
    basis = enumerate_lgt_sector(Geometry(L, 2))
    psi = non_scar_initial_state(basis, 0)
    angles = RandomCircuitAngles.draw(5, 6)
    a = lgt_state_to_ising(random_circuit_evolve(psi, angles, 6))
    b = random_circuit_evolve(lgt_state_to_ising(psi), angles, 6)
    assert np.allclose(a.amplitudes, b.amplitudes, atol=1e-12)


def test_trajectory_csv(tmp_path):
    path = tmp_path / "out.csv"
    write_trajectory_csv(path, [0.0, 1.0], {"abs": [1.0, 0.5]}, comment='{"L": 3}')
    lines = path.read_text().splitlines()
    assert lines[0] == '# {"L": 3}'
    assert lines[1] == "t,abs"
    assert len(lines) == 4


def test_ising_basis_echo_dense():
    L = 3
    H = build_ising_hamiltonian(L, CouplingConfig(0.4))
    psi = scar_state(L, ScarLabel("odd", alpha=3, k=1), "ising")
    times = np.linspace(0, 5, 11)
    sub = scar_subspace_echo(L, CouplingConfig(0.4), ScarLabel("odd", alpha=3, k=1), times).values
    assert np.max(np.abs(loschmidt_echo(H, psi, times).values - sub)) < 1e-10
    assert math.isclose(abs(sub[0]), 1.0)
    assert len(enumerate_ising_sector(L)) == 64
