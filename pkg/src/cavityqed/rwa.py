"""Resonance conditions, Rabi frequencies and rotating-wave propagators.

Coefficients ``c_{n,s}`` refer to the Schroedinger-cat states
``|{s, psi_n}>`` of the dressed frame in the interaction picture (see
:func:`cavityqed.propagator.extract_coefficients`). One-qubit propagators act on
``(c_{n,1}, c_{n,-1})``; two-qubit propagators act on
``(c_{m,1}, c_{m,-1}, c_{n,1}, c_{n,-1})`` with ``m < n``.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .model import DressedFrame, ModelParams, e_delta
from .specfun import BESSEL_X_MAX, bessel_j

log = logging.getLogger(__name__)


class Family(str, enum.Enum):
    ONE_QUBIT = "OneQubit"
    TWO1 = "Two1"
    TWO2 = "Two2"
    TWO3 = "Two3"
    TWO4 = "Two4"

    @property
    def is_two_qubit(self) -> bool:
        return self is not Family.ONE_QUBIT

    @property
    def branches(self) -> tuple[int, int]:
        """Cat labels ``(s_m, s_n)`` coupled by a two-qubit family."""
        return _BRANCHES[self]


_BRANCHES = {
    Family.TWO1: (1, 1),
    Family.TWO2: (-1, -1),
    Family.TWO3: (1, -1),
    Family.TWO4: (-1, 1),
}

# position pair inside (m+, m-, n+, n-) and the sign of the i in the off-diagonal
_PAIR = {
    Family.TWO1: ((0, 2), -1),
    Family.TWO2: ((1, 3), 1),
    Family.TWO3: ((0, 3), 1),
    Family.TWO4: ((1, 2), -1),
}


class PulseTarget(str, enum.Enum):
    PI = "PiPulse"
    HALF = "HalfPulse"


@dataclass(frozen=True)
class ResonanceSpec:
    family: Family
    alpha: int
    n: int
    omega_E: float
    residual: float
    m: int | None = None

    @property
    def key(self) -> tuple:
        return (self.family.value, self.alpha, self.m, self.n)


def _check_indices(family: Family, alpha: int, m: int | None, n: int) -> None:
    if n < 0:
        raise ValueError("level index n must be non-negative")
    if family is Family.ONE_QUBIT:
        if alpha == 0:
            raise ValueError("one-qubit resonance needs a nonzero integer alpha")
    else:
        if m is None or not 0 <= m < n:
            raise ValueError(f"two-qubit families need 0 <= m < n, got m={m}, n={n}")


def resonance_condition_value(
    family: Family,
    params: ModelParams,
    frame: DressedFrame,
    alpha: int,
    m: int | None,
    n: int,
    omega_E: float,
    mirrored: bool = False,
) -> float:
    """Left-hand side of a resonance condition at a trial drive frequency.

    ``mirrored=True`` evaluates the equivalent condition written with
    ``-alpha`` and the levels swapped; it equals minus the direct value.
    """
    family = Family(family)
    _check_indices(family, alpha, m, n)
    if not omega_E > 0:
        raise ValueError(f"trial omega_E must be positive, got {omega_E}")
    p = params.replace(omega_E=omega_E)
    if family is Family.ONE_QUBIT:
        if mirrored:
            return -alpha * omega_E - 2.0 * e_delta(frame, p, n, 1)
        return alpha * omega_E - 2.0 * e_delta(frame, p, n, -1)
    lm, ln = family.branches
    big = frame.omega_big
    if mirrored:
        return -alpha * omega_E + big * (n - m) + e_delta(frame, p, n, ln) - e_delta(frame, p, m, lm)
    return alpha * omega_E + big * (m - n) + e_delta(frame, p, m, lm) - e_delta(frame, p, n, ln)


def scan_window(params: ModelParams, window: tuple[float, float] | None) -> tuple[float, float]:
    """Default ``[1e-3 omega, 10 omega]``, raised where the Bessel argument would exceed its range."""
    lo, hi = window if window is not None else (1e-3 * params.omega, 10.0 * params.omega)
    if not 0 < lo < hi:
        raise ValueError(f"invalid scan window ({lo}, {hi})")
    floor = 2.0 * params.g2 / BESSEL_X_MAX
    if floor > lo:
        log.info("raising scan floor from %g to %g (drive index limit)", lo, floor)
        lo = floor * (1 + 1e-12)
    return lo, hi


def solve_resonance(
    family: Family,
    params: ModelParams,
    frame: DressedFrame,
    alpha: int,
    m: int | None,
    n: int,
    window: tuple[float, float] | None = None,
    grid_points: int = 10_000,
    spacing: str = "log",
    rtol: float = 1e-13,
) -> list[ResonanceSpec]:
    """All roots in ``omega_E`` of a resonance condition inside a window.

    A fixed grid (``spacing`` "log" or "linear") is scanned for sign
    changes and each bracket is refined with Brent's method. Roots are
    returned in ascending order; an empty list means no resonance in the
    window. Tangential roots without a sign change are not detected.
    """
    family = Family(family)
    _check_indices(family, alpha, m, n)
    lo, hi = scan_window(params, window)
    if hi <= lo:
        return []
    if spacing == "log":
        grid = np.geomspace(lo, hi, grid_points)
    elif spacing == "linear":
        grid = np.linspace(lo, hi, grid_points)
    else:
        raise ValueError(f"unknown grid spacing {spacing!r}")

    def f(w):
        return resonance_condition_value(family, params, frame, alpha, m, n, w)

    vals = np.array([f(w) for w in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0:
            roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-300, rtol=rtol, maxiter=500))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return [
        ResonanceSpec(family, alpha, n, w, abs(f(w)), m if family.is_two_qubit else None)
        for w in sorted(roots)
    ]


def default_alphas(family: Family, max_abs: int = 5) -> list[int]:
    rng = range(-max_abs, max_abs + 1)
    return [a for a in rng if not (Family(family) is Family.ONE_QUBIT and a == 0)]


def solve_all(
    family: Family,
    params: ModelParams,
    frame: DressedFrame,
    m: int | None,
    n: int,
    alphas=None,
    **kwargs,
) -> list[ResonanceSpec]:
    """Roots for several ``alpha`` (default ``|alpha| <= 5``), ordered by alpha then frequency."""
    alphas = default_alphas(family) if alphas is None else alphas
    out = []
    for a in alphas:
        out.extend(solve_resonance(family, params, frame, a, m, n, **kwargs))
    return out


def _elements(frame: DressedFrame, m: int, n: int) -> dict[int, float]:
    # <<m| exp(s x (L+ - L-)) |n>> for s = +-1; the -x table is the transpose
    return {1: frame.table.entry(m, n), -1: frame.table.entry(n, m)}


def _solved_params(params: ModelParams, spec: ResonanceSpec, tol: float = 1e-9) -> ModelParams:
    if not spec.residual <= tol:
        raise ValueError(f"resonance not solved: residual {spec.residual:.3e} > {tol}")
    return params.replace(omega_E=spec.omega_E)


def rabi_value(
    family: Family, params: ModelParams, frame: DressedFrame, alpha: int, m: int | None, n: int
) -> complex:
    """Rabi-frequency formula at the drive in ``params``, with no resonance check.

    Used by parameter sweeps; :func:`rabi_frequency` is the checked entry point.
    """
    family = Family(family)
    _check_indices(family, alpha, m, n)
    frame.check_compatible(params)
    j = bessel_j(alpha, params.gamma)
    parity = -1.0 if alpha % 2 else 1.0
    if family is Family.ONE_QUBIT:
        return complex(params.delta * frame.table.diagonal(n) * j * (1.0 - parity) / 2.0)
    el = _elements(frame, m, n)
    sign = 1.0 if family in (Family.TWO1, Family.TWO2) else -1.0
    return complex(params.delta * j * 0.5 * (el[1] + sign * parity * el[-1]))


def rabi_frequency(params: ModelParams, frame: DressedFrame, spec: ResonanceSpec) -> complex:
    """Rabi frequency of the pair selected by a solved resonance.

    Raises ``ValueError`` unless ``spec.residual <= 1e-9``.
    """
    p = _solved_params(params, spec)
    return rabi_value(spec.family, p, frame, spec.alpha, spec.m, spec.n)


def rabi_frequency_adjoint(params: ModelParams, frame: DressedFrame, spec: ResonanceSpec) -> complex:
    """``conj(R)`` from the coupling of the partner equation.

    Uses ``J_{-alpha}`` and the reversed matrix elements, so agreement with
    ``conj(rabi_frequency(...))`` checks the Bessel reflection identities.
    """
    p = _solved_params(params, spec)
    frame.check_compatible(p)
    a, g = spec.alpha, p.gamma
    if spec.family is Family.ONE_QUBIT:
        s = sum(sig * bessel_j(-a, sig * g) / 2.0 for sig in (1, -1))
        return complex(-p.delta * frame.table.diagonal(spec.n) * s)
    el = _elements(frame, spec.n, spec.m)
    if spec.family in (Family.TWO1, Family.TWO2):
        return complex(p.delta * sum(bessel_j(-a, sig * g) / 2.0 * el[sig] for sig in (1, -1)))
    return complex(-p.delta * sum(sig * bessel_j(-a, sig * g) / 2.0 * el[sig] for sig in (1, -1)))


def rwa_propagator(family: Family, r: complex, t: float) -> np.ndarray:
    """Closed-form rotating-wave propagator at time ``t``.

    One qubit: ``[[cos(Rt/2), i sin(Rt/2)], [i sin(Rt/2), cos(Rt/2)]]``,
    written with ``|R|`` and the phase ``R/|R|`` so it stays unitary for
    complex ``R``. Two qubits: identity outside the coupled pair.
    ``R == 0`` gives the identity.
    """
    family = Family(family)
    size = 2 if family is Family.ONE_QUBIT else 4
    u = np.eye(size, dtype=complex)
    mag = abs(r)
    if mag == 0.0:
        return u
    ph = r / mag
    c, s = math.cos(0.5 * mag * t), math.sin(0.5 * mag * t)
    if family is Family.ONE_QUBIT:
        u[0, 0] = u[1, 1] = c
        u[0, 1] = 1j * ph * s
        u[1, 0] = 1j * ph.conjugate() * s
        return u
    (i, k), sgn = _PAIR[family]
    u[i, i] = u[k, k] = c
    u[i, k] = sgn * 1j * ph * s
    u[k, i] = sgn * 1j * ph.conjugate() * s
    return u


def coupled_positions(family: Family) -> tuple[int, int]:
    """Positions of the coupled pair in the propagator's coefficient vector."""
    family = Family(family)
    if family is Family.ONE_QUBIT:
        return (0, 1)
    return _PAIR[family][0]


def coefficient_labels(spec: ResonanceSpec) -> list[tuple[int, int]]:
    """``(level, cat label)`` of each propagator row."""
    if spec.family is Family.ONE_QUBIT:
        return [(spec.n, 1), (spec.n, -1)]
    return [(spec.m, 1), (spec.m, -1), (spec.n, 1), (spec.n, -1)]


@dataclass(frozen=True)
class RabiSolution:
    """Rotating-wave solution for one resonance.

    ``duration`` is the synthesized pulse length (the pi-pulse time unless
    a different target was requested); ``subspace`` names the coupled
    ``(level, cat label)`` pair.
    """

    r: complex
    spec: ResonanceSpec
    target: PulseTarget = PulseTarget.PI
    labels: list = field(init=False)
    subspace: tuple = field(init=False)

    def __post_init__(self):
        labels = coefficient_labels(self.spec)
        i, k = coupled_positions(self.spec.family)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "subspace", (labels[i], labels[k]))

    @property
    def family(self) -> Family:
        return self.spec.family

    @property
    def pi_pulse_time(self) -> float:
        return math.pi / abs(self.r) if self.r != 0 else math.inf

    @property
    def rabi_period(self) -> float:
        return 2.0 * self.pi_pulse_time

    @property
    def duration(self) -> float:
        return self.pi_pulse_time / (2.0 if self.target is PulseTarget.HALF else 1.0)

    def propagator(self, t: float) -> np.ndarray:
        return rwa_propagator(self.family, self.r, t)

    @property
    def gate(self) -> np.ndarray:
        return self.propagator(self.duration)

    def describe(self) -> str:
        (a, sa), (b, sb) = self.subspace
        return (
            f"{self.family.value} alpha={self.spec.alpha}: couples |{{{sa:+d},psi_{a}}}> <-> "
            f"|{{{sb:+d},psi_{b}}}> at omega_E={self.spec.omega_E:.12g}, "
            f"R={self.r.real:.6g}{self.r.imag:+.6g}j, duration={self.duration:.6g}"
        )


def rabi_solution(
    params: ModelParams, frame: DressedFrame, spec: ResonanceSpec, target: PulseTarget = PulseTarget.PI
) -> RabiSolution:
    """Rabi frequency plus propagator bookkeeping; ``R`` may be zero."""
    return RabiSolution(rabi_frequency(params, frame, spec), spec, PulseTarget(target))


def synthesize_gate(
    params: ModelParams, frame: DressedFrame, spec: ResonanceSpec, target: PulseTarget = PulseTarget.PI
) -> RabiSolution:
    """Pulse of length ``pi/|R|`` (``PiPulse``) or ``pi/(2|R|)`` (``HalfPulse``).

    Raises ``ValueError`` when the selected resonance has zero Rabi frequency.
    """
    sol = rabi_solution(params, frame, spec, target)
    if sol.r == 0:
        raise ValueError(f"zero Rabi frequency for {spec.family.value} alpha={spec.alpha}; no gate")
    return sol
