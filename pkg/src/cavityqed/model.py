"""Unified atom-mode-drive Hamiltonian and its dressed frame.

The model on ``C^2 (x) C^D`` is::

    H(t) = omega 1 (x) L3 + g1 s1 (x) (L+ + L-) + (delta/2) s3 (x) 1
           + g2 cos(omega_E t + phi) s1 (x) 1

Without the ``delta`` term the Hamiltonian is diagonalized exactly by the
dressed states ``|{lam, n}> = |lam> (x) exp(-(lam x / 2)(L+ - L-)) |n>``,
where ``|lam>`` is the sigma_1 eigenvector with eigenvalue ``lam = +-1``.

Dressed-basis vectors are indexed by the flat index ``2 n + (0 if lam == 1
else 1)``, so each doublet ``(n, +1), (n, -1)`` is a contiguous pair.
"""
from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass

import numpy as np

from .algebra import (
    IDENTITY_2,
    SIGMA_1,
    SIGMA_3,
    SIGMA_MINUS,
    SIGMA_PLUS,
    WALSH_HADAMARD,
    AlgebraKind,
    Kind,
    ladder_ops,
    matrix_exp,
    sigma1_eigenvector,
    tensor,
)
from .errors import AdmissibilityError, ConvergenceError
from .specfun import MatrixElementTable, bessel_j, bessel_j_orders, displacement_elements

LAMBDAS = (1, -1)


def dressed_index(n: int, lam: int) -> int:
    """Flat dressed-basis index of ``(n, lam)``."""
    if lam not in LAMBDAS:
        raise ValueError(f"lam must be +1 or -1, got {lam}")
    return 2 * n + (0 if lam == 1 else 1)


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the model plus the truncation dimension.

    Frequencies are in units where the mode frequency is ``omega``
    (the command-line front end uses ``omega = 1``).
    """

    kind: AlgebraKind
    omega: float = 1.0
    g1: float = 0.0
    g2: float = 0.0
    omega_E: float = 1.0
    phi: float = 0.0
    delta: float = 0.0
    dim: int | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.omega_E > 0:
            raise ValueError(f"omega_E must be positive, got {self.omega_E}")
        if self.g1 < 0 or self.g2 < 0:
            raise ValueError("couplings g1, g2 must be non-negative")
        object.__setattr__(self, "dim", self.kind.default_dim(self.dim))
        # raises AdmissibilityError for the K algebra outside 2 g1 < omega
        omega_x(self.kind, self.omega, self.g1)

    @property
    def gamma(self) -> float:
        """Drive index ``2 g2 / omega_E``."""
        return 2.0 * self.g2 / self.omega_E

    @property
    def coupling_ratio(self) -> float:
        """``delta / g1``; small values mean strong coupling."""
        return self.delta / self.g1 if self.g1 > 0 else math.inf

    @property
    def strong_coupling(self) -> bool:
        return self.coupling_ratio < 0.1

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def frame_key(self) -> tuple:
        """Parameters the dressed frame depends on."""
        return (self.kind, self.omega, self.g1, self.dim)


def omega_x(kind: AlgebraKind, omega: float, g1: float) -> tuple[float, float]:
    """Dressed frequency ``Omega`` and displacement parameter ``x``."""
    r = 2.0 * g1 / omega
    if kind.kind is Kind.N:
        return omega, r
    if kind.kind is Kind.K:
        if r >= 1.0:
            raise AdmissibilityError(
                f"su(1,1) model needs 2*g1/omega < 1 (got {r:.6g}); otherwise "
                "Omega = omega*sqrt(1-(2*g1/omega)**2) is imaginary"
            )
        return omega * math.sqrt(1.0 - r * r), math.atanh(r)
    return omega * math.sqrt(1.0 + r * r), math.atan(r)


def static_energies(params: ModelParams) -> np.ndarray:
    """Dressed level energies ``E_n`` (no drive), ``n = 0 .. dim-1``."""
    big, _ = omega_x(params.kind, params.omega, params.g1)
    n = np.arange(params.dim, dtype=float)
    if params.kind.kind is Kind.N:
        return big * (n - params.g1**2 / params.omega**2)
    return big * (params.kind.ground_offset() + n)


@functools.lru_cache(maxsize=32)
def _operators(kind: AlgebraKind, omega: float, g1: float, dim: int):
    ops = ladder_ops(kind, dim)
    eye = ops.identity
    static0 = omega * tensor(IDENTITY_2, ops.l3) + g1 * tensor(SIGMA_1, ops.l_plus + ops.l_minus)
    s3 = tensor(SIGMA_3, eye)
    drive = tensor(SIGMA_1, eye)
    for m in (static0, s3, drive):
        m.setflags(write=False)
    return static0, s3, drive


def hamiltonian_parts(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """``(H_static, B)`` with ``H(t) = H_static + g2 cos(omega_E t + phi) B``."""
    static0, s3, drive = _operators(params.kind, params.omega, params.g1, params.dim)
    return static0 + 0.5 * params.delta * s3, drive


def drive_envelope(params: ModelParams, t) -> np.ndarray | float:
    return params.g2 * np.cos(params.omega_E * np.asarray(t) + params.phi)


def hamiltonian(params: ModelParams, t: float) -> np.ndarray:
    """Full time-dependent Hamiltonian on the ``2*dim`` joint space."""
    static, drive = hamiltonian_parts(params)
    return static + drive_envelope(params, t) * drive


def h0_tilde(params: ModelParams, t: float) -> np.ndarray:
    """The exactly solvable part (everything except the ``delta`` term)."""
    return hamiltonian(params.replace(delta=0.0), t)


def theta(params: ModelParams, t):
    """Integrated drive phase ``g2 sin(omega_E t + phi) / omega_E``."""
    return params.g2 * np.sin(params.omega_E * np.asarray(t) + params.phi) / params.omega_E


@dataclass(frozen=True, eq=False)
class DressedFrame:
    """Dressed eigenbasis of the drive-plus-mode Hamiltonian.

    Attributes
    ----------
    params : ModelParams
        Parameters the frame was built for.
    omega_big, x : float
        Dressed frequency and displacement parameter.
    basis : ndarray, shape (2D, 2D)
        Columns are the dressed states in flat-index order. The set is an
        orthonormal basis of the truncated space; only ``n < n_interior`` are
        free of truncation effects.
    energies : ndarray, shape (D,)
        Static energies ``E_n``.
    table : MatrixElementTable
        ``<<m| exp(x (L+ - L-)) |n>>``.
    n_interior : int
        Number of trustworthy levels per branch: at most ``D // 2`` (all
        ``2j+1`` for J), cut further where the dressed states stop solving
        the eigenproblem to ``1e-6``.
    gamma : float
        Drive index for ``params``.
    e_delta : ndarray, shape (n_interior, 2)
        ``E_{delta,n,lam}`` for ``lam = +1`` (column 0) and ``-1`` (column 1);
        NaN where the matrix element is not converged.
    """

    params: ModelParams
    omega_big: float
    x: float
    basis: np.ndarray
    energies: np.ndarray
    table: MatrixElementTable
    n_interior: int
    gamma: float
    e_delta: np.ndarray
    sigma3_dressed: np.ndarray

    @property
    def dim(self) -> int:
        return self.params.dim

    def state(self, n: int, lam: int) -> np.ndarray:
        return self.basis[:, dressed_index(n, lam)]

    def lam_of_index(self) -> np.ndarray:
        return np.tile([1, -1], self.dim)

    def n_of_index(self) -> np.ndarray:
        return np.repeat(np.arange(self.dim), 2)

    def check_compatible(self, params: ModelParams) -> None:
        if params.frame_key() != self.params.frame_key():
            raise ValueError(
                "frame/params mismatch: frame built for (kind, omega, g1, dim) = "
                f"{self.params.frame_key()}, got {params.frame_key()}"
            )

    def gram_defect(self) -> float:
        """``max |<i|j> - delta_ij|`` over interior dressed states."""
        k = 2 * self.n_interior
        v = self.basis[:, :k]
        return float(np.max(np.abs(v.conj().T @ v - np.eye(k))))

    def eigen_residuals(self, t: float = 0.0) -> np.ndarray:
        """``|| H0(t) v - E_n(t) v ||`` for each interior dressed state."""
        h0 = h0_tilde(self.params, t)
        k = 2 * self.n_interior
        v = self.basis[:, :k]
        drive = drive_envelope(self.params, t)
        e_t = self.energies[self.n_of_index()[:k]] + self.lam_of_index()[:k] * drive
        return np.linalg.norm(h0 @ v - v * e_t, axis=0)


EIGEN_RESIDUAL_TOL = 1e-6


def _interior_levels(params: ModelParams, basis: np.ndarray) -> int:
    # levels n < dim // 2 (all of them for J) whose dressed states solve the
    # undriven eigenproblem to EIGEN_RESIDUAL_TOL; the drive term is exact
    cap = params.dim if params.kind.is_finite else params.dim // 2
    static0, _, _ = _operators(params.kind, params.omega, params.g1, params.dim)
    e_n = static_energies(params)
    v = basis[:, : 2 * cap]
    res = np.linalg.norm(static0 @ v - v * np.repeat(e_n[:cap], 2), axis=0)
    bad = np.flatnonzero(res.reshape(cap, 2).max(axis=1) > EIGEN_RESIDUAL_TOL)
    return int(bad[0]) if bad.size else cap


def dressed_frame(params: ModelParams) -> DressedFrame:
    """Build the dressed frame for ``params``."""
    big, x = omega_x(params.kind, params.omega, params.g1)
    dim = params.dim
    ops = ladder_ops(params.kind, dim)
    gen = ops.l_plus - ops.l_minus
    basis = np.empty((2 * dim, 2 * dim), dtype=complex)
    for lam in LAMBDAS:
        field = matrix_exp(-(lam * x / 2.0) * gen)
        atom = sigma1_eigenvector(lam)
        cols = np.kron(atom[:, None], field)
        start = 0 if lam == 1 else 1
        basis[:, start::2] = cols
    n_int = _interior_levels(params, basis)
    table = displacement_elements(params.kind, x, dim)
    _, s3, _ = _operators(params.kind, params.omega, params.g1, dim)
    sigma3_dressed = basis.conj().T @ s3 @ basis
    e_d = np.full((n_int, 2), np.nan)
    j0 = bessel_j(0, params.gamma)
    for n in range(min(n_int, table.n_converged)):
        d = table.values[n, n]
        e_d[n] = 0.5 * params.delta * np.array([1.0, -1.0]) * d * j0
    for arr in (basis, e_d, sigma3_dressed):
        arr.setflags(write=False)
    energies = static_energies(params)
    energies.setflags(write=False)
    return DressedFrame(
        params=params,
        omega_big=big,
        x=x,
        basis=basis,
        energies=energies,
        table=table,
        n_interior=n_int,
        gamma=params.gamma,
        e_delta=e_d,
        sigma3_dressed=sigma3_dressed,
    )


def e_delta(frame: DressedFrame, params: ModelParams, n: int, lam: int) -> float:
    """First-order dressed splitting ``(delta/2) lam <<n|e^{x(L+-L-)}|n>> J0(Gamma)``.

    ``params`` may differ from the frame's own in ``delta``, ``g2`` and
    ``omega_E``; the frame supplies only the matrix element.
    """
    frame.check_compatible(params)
    if lam not in LAMBDAS:
        raise ValueError(f"lam must be +1 or -1, got {lam}")
    if params.delta == 0.0:
        return 0.0
    return 0.5 * params.delta * lam * frame.table.diagonal(n) * bessel_j(0, params.gamma)


def cat_transform(dim: int) -> np.ndarray:
    """Dressed-to-cat change of basis in flat-index coordinates.

    Column ``dressed_index(n, s)`` holds ``(|{1,n}> + s |{-1,n}>)/sqrt(2)``.
    """
    return np.kron(np.eye(dim), WALSH_HADAMARD)


def cat_basis(frame: DressedFrame) -> np.ndarray:
    """Schroedinger-cat vectors ``|{s, psi_n}>`` as columns (lab coordinates)."""
    return frame.basis @ cat_transform(frame.dim)


def u0_phases(params: ModelParams, frame: DressedFrame, t: float) -> np.ndarray:
    """Phases ``t E_n + lam Theta(t)`` of the exactly solvable propagator, flat index."""
    frame.check_compatible(params)
    return t * frame.energies[frame.n_of_index()] + frame.lam_of_index() * theta(params, t)


def u0(params: ModelParams, frame: DressedFrame, t: float) -> np.ndarray:
    """``U0(t) = sum exp(-i[t E_n + lam Theta(t)]) |{lam,n}><{lam,n}|`` (lab basis).

    ``U0(0)`` is not the identity when ``phi != 0``; the map from
    ``Psi(0)`` to ``Psi(t)`` is ``u0(t) @ u0(0).conj().T``.
    """
    ph = np.exp(-1j * u0_phases(params, frame, t))
    return (frame.basis * ph) @ frame.basis.conj().T


def u0_propagator(params: ModelParams, frame: DressedFrame, t: float) -> np.ndarray:
    """``U0(t) U0(0)^dagger``, the evolution map of the solvable part from time 0."""
    ph = np.exp(-1j * (u0_phases(params, frame, t) - u0_phases(params, frame, 0.0)))
    return (frame.basis * ph) @ frame.basis.conj().T


def dressed_generator(params: ModelParams, frame: DressedFrame, t: float) -> np.ndarray:
    """``(delta/2) U0(t)^dagger (s3 (x) 1) U0(t)`` in the dressed basis."""
    ph = np.exp(1j * u0_phases(params, frame, t))
    return 0.5 * params.delta * (ph[:, None] * frame.sigma3_dressed * ph.conj()[None, :])


@dataclass(frozen=True)
class GeneratorSplit:
    """Resonant/non-resonant split of the dressed-frame generator.

    ``h0f``: static doublet coupling (``J0`` term); ``h1f``: oscillating
    same-level terms (``alpha != 0``); ``hff``: inter-level terms. All are
    unscaled; ``total()`` multiplies their sum by ``scale = delta/2``.
    Matrices cover the dressed indices of levels ``n < n_levels``.
    """

    h0f: np.ndarray
    h1f: np.ndarray
    hff: np.ndarray
    scale: float
    n_levels: int
    bessel_tail: float

    def total(self) -> np.ndarray:
        return self.scale * (self.h0f + self.h1f + self.hff)


def drive_bessel_sum(gamma: float, wt: float, alpha_max: int = 40) -> dict[int, complex]:
    """Truncated Jacobi-Anger sums ``sum_alpha J_alpha(lam Gamma) e^{i alpha wt}``.

    Returns the sums for ``lam = +1, -1``; ``exp(i lam Gamma sin(wt))`` is the
    untruncated value.
    """
    j = bessel_j_orders(alpha_max, gamma)
    alphas = np.arange(-alpha_max, alpha_max + 1)
    phase = np.exp(1j * alphas * wt)
    sign = np.where(alphas % 2 == 0, 1.0, -1.0)
    return {1: complex(np.sum(j * phase)), -1: complex(np.sum(sign * j * phase))}


def generator_split(
    params: ModelParams,
    frame: DressedFrame,
    t: float,
    alpha_max: int = 40,
    n_levels: int | None = None,
) -> GeneratorSplit:
    """Analytic form of the dressed-frame generator from Bessel expansions.

    The drive phase ``exp(2 i lam Theta(t))`` is expanded as
    ``sum_alpha J_alpha(lam Gamma) exp(i alpha (omega_E t + phi))`` and
    truncated at ``|alpha| <= alpha_max``.
    """
    frame.check_compatible(params)
    limit = min(frame.n_interior, frame.table.n_converged)
    n_lev = limit if n_levels is None else n_levels
    if n_lev > limit:
        raise ConvergenceError(f"only {limit} levels are converged, requested {n_lev}")
    gamma = params.gamma
    jv = bessel_j_orders(alpha_max, gamma)
    tail = float(1.0 - np.sum(jv**2))
    if tail > 1e-12:
        raise ConvergenceError(
            f"Bessel sum truncated at |alpha| <= {alpha_max} misses {tail:.2e} of the norm"
        )
    j0 = float(jv[alpha_max])
    wt = params.omega_E * t + params.phi
    bsum = drive_bessel_sum(gamma, wt, alpha_max)
    m_plus = frame.table.values[:n_lev, :n_lev]
    m_by_lam = {1: m_plus, -1: m_plus.T}
    size = 2 * n_lev
    h0f = np.zeros((size, size), dtype=complex)
    h1f = np.zeros((size, size), dtype=complex)
    hff = np.zeros((size, size), dtype=complex)
    levels = np.arange(n_lev)
    level_phase = np.exp(1j * t * frame.omega_big * (levels[:, None] - levels[None, :]))
    off = ~np.eye(n_lev, dtype=bool)
    for lam in LAMBDAS:
        r = 0 if lam == 1 else 1
        c = 1 - r
        diag = np.diag(m_plus)
        idx = np.arange(n_lev)
        h0f[2 * idx + r, 2 * idx + c] = diag * j0
        h1f[2 * idx + r, 2 * idx + c] = diag * (bsum[lam] - j0)
        block = np.where(off, level_phase * bsum[lam] * m_by_lam[lam], 0.0)
        hff[r::2, c::2] = block
    return GeneratorSplit(h0f, h1f, hff, 0.5 * params.delta, n_lev, max(tail, 0.0))


# --- trapped-ion (NIST) Hamiltonian equivalence -------------------------------


def _heisenberg(dim: int):
    ops = ladder_ops(AlgebraKind.heisenberg(), dim)
    return ops.l_plus, ops.l_minus, ops.l3


def nist_hamiltonian(omega0: float, g: float, delta: float, eta: float, dim: int) -> np.ndarray:
    """``omega0 N + g (s+ e^{i eta X} + s- e^{-i eta X}) + (delta/2) s3``, ``X = a^dagger + a``."""
    ad, a, num = _heisenberg(dim)
    xq = ad + a
    eye = np.eye(dim)
    return (
        omega0 * tensor(IDENTITY_2, num)
        + g * (tensor(SIGMA_PLUS, matrix_exp(1j * eta * xq)) + tensor(SIGMA_MINUS, matrix_exp(-1j * eta * xq)))
        + 0.5 * delta * tensor(SIGMA_3, eye)
    )


def nist_transform(eta: float, dim: int) -> np.ndarray:
    """``T = (s+ e^A + s- e^{-A}) (W (x) e^{-i (pi/2) N})`` with ``A = i eta X / 2``."""
    ad, a, num = _heisenberg(dim)
    big_a = 0.5j * eta * (ad + a)
    left = tensor(SIGMA_PLUS, matrix_exp(big_a)) + tensor(SIGMA_MINUS, matrix_exp(-big_a))
    right = tensor(WALSH_HADAMARD, matrix_exp(-0.5j * np.pi * num))
    return left @ right


def nist_target(omega0: float, g: float, delta: float, eta: float, dim: int) -> np.ndarray:
    """Transformed Hamiltonian including the constant ``omega0 eta^2 / 4``."""
    ad, a, num = _heisenberg(dim)
    eye = np.eye(dim)
    return (
        nist_constant_offset(omega0, eta) * np.eye(2 * dim)
        + omega0 * tensor(IDENTITY_2, num)
        + 0.5 * omega0 * eta * tensor(SIGMA_1, ad + a)
        + g * tensor(SIGMA_3, eye)
        - 0.5 * delta * tensor(SIGMA_1, eye)
    )


def nist_constant_offset(omega0: float, eta: float) -> float:
    return omega0 * eta**2 / 4.0


def nist_default_block(dim: int) -> int:
    """Field levels kept when comparing truncated operators (edge buffer ``dim // 16``)."""
    return dim - dim // 16


def nist_equivalence(
    omega0: float, g: float, delta: float, eta: float, dim: int, block: int | None = None
) -> float:
    """Max-norm residual of ``T^dagger H T`` against the transformed form.

    Compared on field levels ``n < block`` in both atomic sectors; the
    default block drops an edge buffer of ``dim // 16`` levels where the
    truncated exponentials are inexact.
    """
    if eta > 0.5 or eta < 0:
        raise ValueError(f"eta must lie in [0, 0.5], got {eta}")
    if dim < 64:
        raise ValueError(f"dim must be >= 64, got {dim}")
    block = nist_default_block(dim) if block is None else block
    if not 0 < block <= dim:
        raise ValueError(f"block must lie in 1..{dim}, got {block}")
    tr = nist_transform(eta, dim)
    resid = tr.conj().T @ nist_hamiltonian(omega0, g, delta, eta, dim) @ tr - nist_target(
        omega0, g, delta, eta, dim
    )
    keep = np.r_[0:block, dim : dim + block]
    return float(np.max(np.abs(resid[np.ix_(keep, keep)])))
