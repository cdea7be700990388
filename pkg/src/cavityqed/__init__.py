"""Dressed-state analysis of a two-level atom coupled to a ladder algebra
(oscillator, su(1,1) or su(2)) under a classical drive.

The main entry points are re-exported here; see the submodules for details.
"""
from .algebra import AlgebraKind, Kind, LadderSet, ladder_ops, matrix_exp
from .errors import (
    AdmissibilityError,
    CavityQEDError,
    ConfigError,
    ConvergenceError,
    StepSizeError,
)
from .model import (
    DressedFrame,
    GeneratorSplit,
    ModelParams,
    cat_basis,
    dressed_frame,
    dressed_generator,
    e_delta,
    generator_split,
    hamiltonian,
    nist_equivalence,
    omega_x,
    u0,
    u0_propagator,
)
from .propagator import (
    CoefficientTable,
    RWAComparison,
    Trajectory,
    compare_rwa,
    evolve_exact,
    extract_coefficients,
    interaction_state,
    min_steps,
)
from .rwa import (
    Family,
    PulseTarget,
    RabiSolution,
    ResonanceSpec,
    rabi_frequency,
    rabi_frequency_adjoint,
    resonance_condition_value,
    rwa_propagator,
    solve_resonance,
    synthesize_gate,
)
from .specfun import MatrixElementTable, bessel_j, displacement_elements, laguerre

__version__ = "0.1.0"
