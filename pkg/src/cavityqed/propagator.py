"""Exact time evolution of the driven model and dressed-frame bookkeeping.

The integrator is the exponential midpoint rule

    psi_{k+1} = exp(-i dt H(t_k + dt/2)) psi_k,

second order in ``dt`` and unitary up to the accuracy of the step
exponential. The default kernel applies the exponential to the state by a
Taylor series (numba-compiled); ``method="expm"`` forms the dense step
exponential instead and is kept as an independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numba
import numpy as np

from .algebra import matrix_exp
from .errors import StepSizeError
from .model import (
    DressedFrame,
    ModelParams,
    cat_transform,
    dressed_index,
    e_delta,
    hamiltonian_parts,
    u0,
    u0_phases,
)
from .rwa import RabiSolution, coefficient_labels, coupled_positions

STEP_GUARD = 0.1
NORM_TOL = 1e-8


@dataclass(frozen=True)
class CoefficientTable:
    """Interaction-picture amplitudes ``c_{n,s}(t)`` in the cat basis.

    ``values[k, dressed_index(n, s)]`` is the amplitude of ``|{s, psi_n}>``
    at ``times[k]``, for levels ``n < n_levels``.
    """

    times: np.ndarray
    values: np.ndarray
    n_levels: int

    def column(self, n: int, s: int) -> np.ndarray:
        if not 0 <= n < self.n_levels:
            raise IndexError(f"level {n} outside the {self.n_levels} tabulated levels")
        return self.values[:, dressed_index(n, s)]

    def population(self, n: int, s: int) -> np.ndarray:
        return np.abs(self.column(n, s)) ** 2

    def total_population(self) -> np.ndarray:
        return np.sum(np.abs(self.values) ** 2, axis=1)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the Schroedinger equation.

    ``norms`` holds the state norm after every step (``steps + 1``
    entries); ``states`` only the sampled ones, aligned with ``times``.
    """

    times: np.ndarray
    states: np.ndarray
    norms: np.ndarray
    params: ModelParams
    dt: float
    coefficients: CoefficientTable | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms - 1.0)))

    def with_coefficients(self, table: CoefficientTable) -> "Trajectory":
        return replace(self, coefficients=table)


def step_norm_bound(params: ModelParams) -> float:
    """Max-row-sum bound on ``||H(t)||`` valid for all ``t``."""
    static, drive = hamiltonian_parts(params)
    rows = np.sum(np.abs(static), axis=1) + params.g2 * np.sum(np.abs(drive), axis=1)
    return float(np.max(rows))


def min_steps(params: ModelParams, t_final: float, t0: float = 0.0) -> int:
    """Smallest step count satisfying the step-size guard."""
    return max(1, math.ceil(abs(t_final - t0) * step_norm_bound(params) / STEP_GUARD))


@numba.njit(cache=True)
def _expv_taylor(h, psi, scale):
    # exp(scale * h) @ psi with |scale| ||h|| <= 0.1; terms shrink geometrically
    out = psi.copy()
    term = psi.copy()
    for k in range(1, 40):
        term = (scale / k) * (h @ term)
        out += term
        if np.max(np.abs(term)) < 1e-18:
            break
    return out


@numba.njit(cache=True)
def _run_taylor(static, drive, psi, t0, dt, steps, g2, w_e, phi, every, samples, norms):
    norms[0] = np.sqrt(np.sum(np.abs(psi) ** 2))
    samples[0] = psi
    j = 1
    for k in range(steps):
        tm = t0 + (k + 0.5) * dt
        h = static + (g2 * np.cos(w_e * tm + phi)) * drive
        psi = _expv_taylor(h, psi, -1j * dt)
        norms[k + 1] = np.sqrt(np.sum(np.abs(psi) ** 2))
        if (k + 1) % every == 0:
            samples[j] = psi
            j += 1
    return psi


def _run_expm(static, drive, psi, t0, dt, steps, g2, w_e, phi, every, samples, norms):
    norms[0] = np.linalg.norm(psi)
    samples[0] = psi
    j = 1
    for k in range(steps):
        tm = t0 + (k + 0.5) * dt
        psi = matrix_exp(-1j * dt * (static + g2 * math.cos(w_e * tm + phi) * drive)) @ psi
        norms[k + 1] = np.linalg.norm(psi)
        if (k + 1) % every == 0:
            samples[j] = psi
            j += 1
    return psi


def evolve_exact(
    params: ModelParams,
    psi0: np.ndarray,
    t_final: float,
    steps: int,
    sample_every: int = 1,
    t0: float = 0.0,
    method: str = "taylor",
) -> Trajectory:
    """Integrate ``i dpsi/dt = H(t) psi`` from ``t0`` to ``t_final``.

    Parameters
    ----------
    params : ModelParams
    psi0 : ndarray, shape (2*dim,)
        Normalized initial state (lab basis, atom factor first).
    t_final : float
        End time; may be smaller than ``t0`` to integrate backwards.
    steps : int
        Number of uniform steps. Must satisfy ``||H|| |dt| <= 0.1`` with
        ``||H||`` the max row sum, see :func:`min_steps`.
    sample_every : int
        Keep every ``sample_every``-th state; must divide ``steps``.
    method : {"taylor", "expm"}

    Raises
    ------
    StepSizeError
        If the step-size guard is violated.
    ValueError
        For a non-normalized or wrongly sized initial state.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (2 * params.dim,):
        raise ValueError(f"psi0 must have shape ({2 * params.dim},), got {psi0.shape}")
    if abs(np.linalg.norm(psi0) - 1.0) > NORM_TOL:
        raise ValueError(f"psi0 is not normalized (norm {np.linalg.norm(psi0):.12g})")
    if steps < 1 or sample_every < 1 or steps % sample_every:
        raise ValueError("steps must be positive and a multiple of sample_every")
    dt = (t_final - t0) / steps
    bound = step_norm_bound(params)
    if bound * abs(dt) > STEP_GUARD:
        raise StepSizeError(
            f"||H|| dt = {bound * abs(dt):.4g} exceeds {STEP_GUARD}; "
            f"use at least {min_steps(params, t_final, t0)} steps"
        )
    static, drive = hamiltonian_parts(params)
    static = np.ascontiguousarray(static, dtype=complex)
    drive = np.ascontiguousarray(drive, dtype=complex)
    n_samples = steps // sample_every + 1
    samples = np.empty((n_samples, psi0.size), dtype=complex)
    norms = np.empty(steps + 1)
    args = (static, drive, psi0.copy(), float(t0), float(dt), int(steps), float(params.g2),
            float(params.omega_E), float(params.phi), int(sample_every), samples, norms)
    if method == "taylor":
        _run_taylor(*args)
    elif method == "expm":
        _run_expm(*args)
    else:
        raise ValueError(f"unknown method {method!r}")
    times = t0 + dt * sample_every * np.arange(n_samples)
    return Trajectory(times, samples, norms, params, dt)


def coefficient_levels(frame: DressedFrame) -> int:
    """Levels with a trustworthy dressed state and matrix element."""
    return min(frame.n_interior, frame.table.n_converged)


def interaction_state(params: ModelParams, frame: DressedFrame, n: int, s: int) -> np.ndarray:
    """Lab-frame state whose interaction-picture amplitudes at ``t = 0`` are ``c_{n,s} = 1``.

    This is ``U0(0) |{s, psi_n}>``; for ``phi = 0`` it is the cat state itself.
    """
    frame.check_compatible(params)
    cat = frame.basis @ cat_transform(frame.dim)[:, dressed_index(n, s)]
    return u0(params, frame, 0.0) @ cat


def extract_coefficients(traj: Trajectory, params: ModelParams, frame: DressedFrame) -> CoefficientTable:
    """Amplitudes ``c_{n,s}(t)`` of the slowly varying ansatz.

    The state is mapped to the interaction picture with ``U0(t)^dagger``,
    expressed in the cat basis, and the unperturbed splitting is removed
    with ``exp(+i t E_{delta,n,s})``.
    """
    frame.check_compatible(params)
    if traj.params != params:
        raise ValueError("frame/params mismatch: trajectory computed for different parameters")
    n_lev = coefficient_levels(frame)
    k = 2 * n_lev
    w = cat_transform(frame.dim)[:k, :k]
    e_d = np.array([e_delta(frame, params, n, s) for n in range(n_lev) for s in (1, -1)])
    out = np.empty((traj.times.size, k), dtype=complex)
    for i, (t, psi) in enumerate(zip(traj.times, traj.states)):
        dressed = frame.basis.conj().T @ psi
        dressed *= np.exp(1j * u0_phases(params, frame, t))
        out[i] = (w.conj().T @ dressed[:k]) * np.exp(1j * t * e_d)
    return CoefficientTable(traj.times.copy(), out, n_lev)


@dataclass(frozen=True)
class RWAComparison:
    """Exact-versus-RWA metrics, each the maximum over the time grid.

    ``population_deviation`` maps each coupled ``(level, label)`` to
    ``max |p_exact - p_rwa|``; ``leakage`` is ``max (N0 - sum_pair |c|^2)``
    with ``N0`` the initial pair population, and ``block_leakage`` the same
    over all rows of the propagator. ``fidelity`` is the terminal overlap
    of the RWA and exact coefficient vectors.
    """

    population_deviation: dict
    leakage: float
    block_leakage: float
    fidelity: float
    spectator_change: dict

    @property
    def max_deviation(self) -> float:
        return max(self.population_deviation.values())

    def as_dict(self) -> dict:
        fmt = lambda d: {f"{n},{s:+d}": float(v) for (n, s), v in d.items()}  # noqa: E731
        return {
            "population_deviation": fmt(self.population_deviation),
            "max_deviation": float(self.max_deviation),
            "leakage": float(self.leakage),
            "block_leakage": float(self.block_leakage),
            "fidelity": float(self.fidelity),
            "spectator_change": fmt(self.spectator_change),
        }


def rwa_coefficients(rabi: RabiSolution, c0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """RWA amplitudes over the propagator rows for initial amplitudes ``c0``."""
    return np.array([rabi.propagator(t) @ c0 for t in times])


def compare_rwa(traj: Trajectory, rabi: RabiSolution) -> RWAComparison:
    """Quantify how well the rotating-wave solution tracks the exact run.

    The trajectory must carry coefficients from :func:`extract_coefficients`.
    Untouched rows of the propagator are reported in ``spectator_change``
    as ``max |p(t) - p(0)|``.
    """
    table = traj.coefficients
    if table is None:
        raise ValueError("trajectory has no coefficient table; call extract_coefficients first")
    labels = coefficient_labels(rabi.spec)
    exact = np.stack([table.column(n, s) for n, s in labels], axis=1)
    approx = rwa_coefficients(rabi, exact[0], table.times)
    p_exact, p_rwa = np.abs(exact) ** 2, np.abs(approx) ** 2
    i, k = coupled_positions(rabi.family)
    dev = {labels[j]: float(np.max(np.abs(p_exact[:, j] - p_rwa[:, j]))) for j in (i, k)}
    pair = p_exact[:, i] + p_exact[:, k]
    block = p_exact.sum(axis=1)
    spectators = {
        labels[j]: float(np.max(np.abs(p_exact[:, j] - p_exact[0, j])))
        for j in range(len(labels))
        if j not in (i, k)
    }
    # outside the block the RWA amplitudes stay frozen at their initial values
    rwa_full = table.values[0].copy()
    for j, (n, s) in enumerate(labels):
        rwa_full[dressed_index(n, s)] = approx[-1, j]
    fid = abs(np.vdot(rwa_full, table.values[-1])) ** 2
    return RWAComparison(
        population_deviation=dev,
        leakage=float(max(0.0, np.max(pair[0] - pair))),
        block_leakage=float(max(0.0, np.max(block[0] - block))),
        fidelity=float(fid),
        spectator_change=spectators,
    )
