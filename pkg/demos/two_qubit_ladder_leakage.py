"""
Two-qubit pi-pulses and the equally spaced ladder
=================================================

A type-1 resonance couples ``|{+1, psi_0}>`` and ``|{+1, psi_1}>``. The
dressed ladder is equally spaced, so the same drive harmonic is nearly
resonant with ``1 -> 2`` as well: only the small ``E_delta`` shifts
detune it, and they scale with ``delta`` just like the Rabi coupling.
The exact run shows how much population walks further up the ladder.
"""

import numpy as np

from cavityqed import (
    AlgebraKind,
    Family,
    ModelParams,
    dressed_frame,
    evolve_exact,
    extract_coefficients,
    interaction_state,
    min_steps,
    solve_resonance,
)
from cavityqed.rwa import coupled_positions, synthesize_gate

p = ModelParams(AlgebraKind.heisenberg(), g1=0.5, g2=0.4, delta=0.02, dim=32)
frame = dressed_frame(p)

for fam, alpha in [(Family.TWO1, 1), (Family.TWO3, 2)]:
    spec = solve_resonance(fam, p, frame, alpha, 0, 1)[0]
    q = p.replace(omega_E=spec.omega_E)
    gate = synthesize_gate(q, frame, spec)
    print(gate.describe())
    i, k = coupled_positions(fam)
    src, dst = gate.labels[i], gate.labels[k]
    steps = min_steps(q, gate.duration)
    steps += (-steps) % 50
    traj = evolve_exact(q, interaction_state(q, frame, *src), gate.duration, steps, sample_every=50)
    tab = extract_coefficients(traj, q, frame)
    final = np.abs(tab.values[-1]) ** 2
    print(f"   RWA target {dst}: {tab.population(*dst)[-1]:.3f}")
    for lev in range(4):
        print(f"   level {lev}: p(+1) = {final[2 * lev]:.3f}   p(-1) = {final[2 * lev + 1]:.3f}")
