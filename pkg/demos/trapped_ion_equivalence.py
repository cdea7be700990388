"""
Trapped-ion Hamiltonian as a driven cavity model
================================================

A unitary built from ``exp(+-i eta X / 2)`` maps the trapped-ion
Hamiltonian onto a Rabi-type form with coupling ``omega0 eta / 2``, up
to a constant ``omega0 eta^2 / 4``. In a truncated Fock space the
identity holds away from the cutoff; the residual falls quickly as the
space grows.
"""

from cavityqed.model import nist_constant_offset, nist_default_block, nist_equivalence

omega0, g, delta = 1.0, 0.3, 0.1
block = nist_default_block(64)
for eta in (0.0, 0.1, 0.2, 0.4):
    res = [nist_equivalence(omega0, g, delta, eta, d, block=block) for d in (64, 128, 256)]
    shown = "  ".join(f"D={d}: {r:.1e}" for d, r in zip((64, 128, 256), res))
    print(f"eta={eta:.1f}  offset={nist_constant_offset(omega0, eta):.4f}  {shown}")
