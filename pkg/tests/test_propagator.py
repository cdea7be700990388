import numpy as np
import pytest

from cavityqed.algebra import AlgebraKind, matrix_exp
from cavityqed.errors import StepSizeError
from cavityqed.model import (
    ModelParams,
    cat_transform,
    dressed_frame,
    dressed_generator,
    e_delta,
    hamiltonian,
    u0,
    u0_propagator,
)
from cavityqed.propagator import (
    coefficient_levels,
    compare_rwa,
    evolve_exact,
    extract_coefficients,
    interaction_state,
    min_steps,
    step_norm_bound,
)
from cavityqed.rwa import Family, ResonanceSpec, rabi_solution, solve_resonance
from cavityqed.specfun import bessel_j

N = AlgebraKind.heisenberg()
DRIVEN = ModelParams(N, g1=0.25, g2=0.4, omega_E=1.3, dim=24)


def test_static_hamiltonian_matches_matrix_exponential():
    p = DRIVEN.replace(g2=0.0, delta=0.05)
    frame = dressed_frame(p)
    psi0 = interaction_state(p, frame, 1, 1)
    steps = min_steps(p, 5.0)
    traj = evolve_exact(p, psi0, 5.0, steps)
    exact = matrix_exp(-5j * hamiltonian(p, 0.0)) @ psi0
    assert np.linalg.norm(traj.final_state - exact) <= 1e-8


@pytest.mark.parametrize("phi", [0.0, 0.7])
def test_solvable_case_follows_u0(phi):
    p = DRIVEN.replace(phi=phi)
    frame = dressed_frame(p)
    psi0 = interaction_state(p, frame, 2, -1)
    traj = evolve_exact(p, psi0, 6.0, 12000, sample_every=200)
    for t, psi in zip(traj.times, traj.states):
        assert np.linalg.norm(psi - u0_propagator(p, frame, t) @ psi0) <= 1e-6


def test_taylor_and_dense_kernels_agree():
    p = DRIVEN.replace(delta=0.1)
    psi0 = np.zeros(48, complex)
    psi0[0] = 1.0
    a = evolve_exact(p, psi0, 2.0, 1000)
    b = evolve_exact(p, psi0, 2.0, 1000, method="expm")
    assert np.linalg.norm(a.final_state - b.final_state) <= 1e-12
    with pytest.raises(ValueError):
        evolve_exact(p, psi0, 2.0, 1000, method="rk4")


def test_second_order_convergence():
    p = DRIVEN.replace(delta=0.05)
    psi0 = interaction_state(p, dressed_frame(p), 0, 1)
    out = [evolve_exact(p, psi0, 4.0, s).final_state for s in (1000, 2000, 4000)]
    ratio = np.linalg.norm(out[0] - out[1]) / np.linalg.norm(out[1] - out[2])
    assert 3.2 <= ratio <= 4.8


def test_norm_drift_over_many_steps():
    p = ModelParams(N, g1=0.3, g2=0.2, omega_E=0.9, delta=0.05, dim=64)
    psi0 = np.zeros(128, complex)
    psi0[[0, 65]] = 1 / np.sqrt(2)
    traj = evolve_exact(p, psi0, 10_000 * 0.1 / step_norm_bound(p), 10_000, sample_every=1000)
    assert traj.norms.size == 10_001
    assert traj.max_norm_drift <= 1e-8


def test_time_reversal():
    p = DRIVEN.replace(delta=0.05, phi=0.3)
    psi0 = interaction_state(p, dressed_frame(p), 1, 1)
    fwd = evolve_exact(p, psi0, 3.0, 3000)
    back = evolve_exact(p, fwd.final_state / np.linalg.norm(fwd.final_state), 0.0, 3000, t0=3.0)
    assert np.linalg.norm(back.final_state - psi0) <= 1e-6
    assert back.times[0] == 3.0 and back.times[-1] == pytest.approx(0.0)


def test_input_guards():
    p = DRIVEN
    psi0 = np.zeros(48, complex)
    psi0[0] = 1.0
    with pytest.raises(StepSizeError, match="steps"):
        evolve_exact(p, psi0, 10.0, 10)
    with pytest.raises(ValueError, match="normalized"):
        evolve_exact(p, 2 * psi0, 1.0, 1000)
    with pytest.raises(ValueError, match="shape"):
        evolve_exact(p, psi0[:10], 1.0, 1000)
    with pytest.raises(ValueError, match="multiple"):
        evolve_exact(p, psi0, 1.0, 1000, sample_every=3)


def test_coefficients_frozen_without_splitting():
    p = DRIVEN
    frame = dressed_frame(p)
    traj = evolve_exact(p, interaction_state(p, frame, 1, 1), 5.0, 10000, sample_every=250)
    table = extract_coefficients(traj, p, frame)
    assert np.max(np.abs(table.values - table.values[0])) <= 1e-6
    assert abs(table.column(1, 1)[0] - 1) <= 1e-12
    assert np.all(np.abs(table.total_population() - 1) <= 1e-6)


def test_coefficient_completeness_bound():
    p = DRIVEN.replace(delta=0.2)
    frame = dressed_frame(p)
    traj = evolve_exact(p, interaction_state(p, frame, 0, -1), 5.0, 10000, sample_every=500)
    table = extract_coefficients(traj, p, frame)
    assert np.all(table.total_population() <= 1 + 1e-8)
    assert np.all(table.total_population() >= 1 - 1e-6)


def test_coefficient_extraction_rejects_mismatch():
    p = DRIVEN
    frame = dressed_frame(p)
    traj = evolve_exact(p, interaction_state(p, frame, 0, 1), 0.1, 200)
    with pytest.raises(ValueError, match="mismatch"):
        extract_coefficients(traj, p.replace(delta=0.1), frame)
    with pytest.raises(ValueError, match="mismatch"):
        extract_coefficients(traj, p.replace(g1=0.3), dressed_frame(p.replace(g1=0.3)))


def test_coefficients_obey_interaction_picture_equation():
    p = DRIVEN.replace(delta=0.1)
    frame = dressed_frame(p)
    n_lev = coefficient_levels(frame)
    psi0 = interaction_state(p, frame, 0, 1)
    traj = evolve_exact(p, psi0, 2.0, 40000, sample_every=20)
    table = extract_coefficients(traj, p, frame)
    dt = traj.times[1] - traj.times[0]
    w = cat_transform(frame.dim)
    e_d = np.zeros(2 * frame.dim)
    e_d[: 2 * n_lev] = [e_delta(frame, p, n, s) for n in range(n_lev) for s in (1, -1)]
    for k in (200, 600, 900):
        t = traj.times[k]
        deriv = (table.values[k + 1] - table.values[k - 1]) / (2 * dt)
        # c = e^{i t E} W^T d, with i dd/dt = G d
        d = np.exp(1j * (t * frame.energies[frame.n_of_index()] + frame.lam_of_index() * p.g2
                          * np.sin(p.omega_E * t) / p.omega_E)) * (frame.basis.conj().T @ traj.states[k])
        rhs = np.exp(1j * t * e_d) * (1j * e_d * (w.T @ d) - 1j * w.T @ dressed_generator(p, frame, t) @ d)
        rhs = rhs[: 2 * n_lev]
        assert np.linalg.norm(deriv - rhs) <= 1e-4 * np.linalg.norm(rhs)


def test_rwa_comparison_trivial_without_splitting():
    p = ModelParams(N, g1=0.25, g2=0.4, delta=0.0, dim=24)
    frame = dressed_frame(p)
    spec = solve_resonance(Family.TWO1, p, frame, 1, 0, 1)[0]
    q = p.replace(omega_E=spec.omega_E)
    sol = rabi_solution(q, frame, spec)
    assert sol.r == 0
    traj = evolve_exact(q, interaction_state(q, frame, 0, 1), 10.0, min_steps(q, 10.0))
    traj = traj.with_coefficients(extract_coefficients(traj, q, frame))
    metrics = compare_rwa(traj, sol)
    assert metrics.max_deviation <= 1e-6
    assert metrics.leakage <= 1e-6
    assert metrics.fidelity >= 1 - 1e-6


def test_compare_requires_coefficients():
    p = DRIVEN
    frame = dressed_frame(p)
    traj = evolve_exact(p, interaction_state(p, frame, 0, 1), 0.1, 200)
    spec = ResonanceSpec(Family.ONE_QUBIT, 1, 0, 1.3, 0.0)
    with pytest.raises(ValueError, match="coefficient"):
        compare_rwa(traj, rabi_solution(p, frame, spec))


def _spin1_one_qubit(delta):
    # middle level of spin 1 has a negative diagonal element, so alpha = 1
    # resonates at small drive index, where the rotating-wave picture holds
    p = ModelParams(AlgebraKind.su2(1), g1=1.0, delta=delta)
    frame = dressed_frame(p)
    gamma = 0.2
    w = -delta * frame.table.diagonal(1) * bessel_j(0, gamma)
    p = p.replace(g2=gamma * w / 2)
    spec = solve_resonance(Family.ONE_QUBIT, p, frame, 1, None, 1, window=(0.5 * w, 2 * w))[0]
    q = p.replace(omega_E=spec.omega_E)
    sol = rabi_solution(q, frame, spec)
    steps = min_steps(q, sol.rabi_period)
    steps += (-steps) % 100
    traj = evolve_exact(q, interaction_state(q, frame, 1, 1), sol.rabi_period, steps, sample_every=100)
    traj = traj.with_coefficients(extract_coefficients(traj, q, frame))
    return compare_rwa(traj, sol)


def test_one_qubit_rwa_tracks_exact_run_and_leakage_falls_with_splitting():
    large = _spin1_one_qubit(0.02)
    small = _spin1_one_qubit(0.002)
    assert large.max_deviation <= 0.05
    assert small.max_deviation <= 0.05
    assert small.leakage < large.leakage / 10
    assert small.fidelity >= 0.99
