"""
One-qubit Rabi flopping in the dressed frame
============================================

With a resonant drive the two cat states built on one dressed level
rotate into each other at the Rabi frequency ``R``. The one-qubit
resonance pins ``omega_E`` to the splitting itself, so the rotating-wave
picture only holds when the drive index ``Gamma`` is small. We pick the
middle level of a spin-1 mode (its diagonal element is negative, which
makes ``alpha = 1`` resonant) and keep ``Gamma = 0.2``.
"""

import numpy as np

from cavityqed import (
    AlgebraKind,
    Family,
    ModelParams,
    bessel_j,
    compare_rwa,
    dressed_frame,
    evolve_exact,
    extract_coefficients,
    interaction_state,
    min_steps,
    solve_resonance,
)
from cavityqed.rwa import rabi_solution

p = ModelParams(AlgebraKind.su2(1), g1=1.0, delta=0.02)
frame = dressed_frame(p)
n = 1
gamma = 0.2

# rough location of the resonance, then let the solver refine it
w_guess = -p.delta * frame.table.diagonal(n) * bessel_j(0, gamma)
p = p.replace(g2=gamma * w_guess / 2)
spec = solve_resonance(Family.ONE_QUBIT, p, frame, 1, None, n, window=(0.5 * w_guess, 2 * w_guess))[0]
p = p.replace(omega_E=spec.omega_E)
sol = rabi_solution(p, frame, spec)
print(sol.describe())

# exact run over one Rabi period from |{+1, psi_1}>
steps = min_steps(p, sol.rabi_period)
steps += (-steps) % 100
traj = evolve_exact(p, interaction_state(p, frame, n, 1), sol.rabi_period, steps, sample_every=100)
traj = traj.with_coefficients(extract_coefficients(traj, p, frame))

t = traj.times
p_exact = traj.coefficients.population(n, 1)
p_rwa = np.cos(abs(sol.r) * t / 2) ** 2
for k in np.linspace(0, t.size - 1, 9).astype(int):
    print(f"t = {t[k]:9.1f}   exact {p_exact[k]:.4f}   rwa {p_rwa[k]:.4f}")

m = compare_rwa(traj, sol)
print(f"max deviation {m.max_deviation:.3f}, leakage {m.leakage:.1e}, fidelity {m.fidelity:.4f}")
