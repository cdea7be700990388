"""
Dressed levels of the three ladder algebras
===========================================

The drive-plus-mode part of the model is solved exactly by displaced
states. Here we build the dressed frame for the oscillator, su(1,1) and
su(2) realizations and look at the level energies and the first-order
splittings ``E_delta``.
"""

import numpy as np

from cavityqed import AlgebraKind, ModelParams, dressed_frame, e_delta
from cavityqed.specfun import bessel_zero_j0

# one set of couplings, three algebras
cases = {
    "oscillator": ModelParams(AlgebraKind.heisenberg(), g1=0.25, g2=0.4, omega_E=1.3, delta=0.05, dim=48),
    "su(1,1), k=1/2": ModelParams(AlgebraKind.su11(0.5), g1=0.25, g2=0.4, omega_E=1.3, delta=0.05, dim=64),
    "su(2), j=3": ModelParams(AlgebraKind.su2(3), g1=0.25, g2=0.4, omega_E=1.3, delta=0.05),
}

for name, p in cases.items():
    frame = dressed_frame(p)
    print(f"{name}: Omega = {frame.omega_big:.6f}, x = {frame.x:.6f}, trusted levels = {frame.n_interior}")
    for n in range(4):
        print(f"   n={n}  E_n={frame.energies[n]: .6f}  E_delta={e_delta(frame, p, n, 1): .3e}")
    # the dressed states solve the driven eigenproblem at any time
    print(f"   max eigen residual at t=2.1: {np.max(frame.eigen_residuals(2.1)):.1e}")

# the splitting carries a J0(Gamma) factor, so it closes at the zeros of J0
p = cases["oscillator"]
frame = dressed_frame(p)
gamma0 = bessel_zero_j0()
closed = p.replace(omega_E=2 * p.g2 / gamma0)
print(f"\nGamma = {gamma0:.10f}: E_delta(0, +1) = {e_delta(frame, closed, 0, 1):.1e}")
