"""Truncated matrix realizations of the ladder algebras.

Three realizations of ``{L+, L-, L3}`` are supported:

* ``N`` -- the Heisenberg algebra ``{a^dagger, a, a^dagger a}`` in the Fock basis,
* ``K`` -- su(1,1), positive discrete series with Bargmann index ``k``,
* ``J`` -- su(2), spin ``j`` (finite, ``2j+1`` levels, no truncation).

All matrices are dense ``numpy`` arrays in the number basis ``|n>``,
``n = 0 .. dim-1``. The atom factor always comes first in tensor
products, so operators on the joint space have the block form
``[[A00 L, A01 L], [A10 L, A11 L]]``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

# Pauli matrices and friends, atom basis (|0>, |1>) = (e1, e2)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = (SIGMA_1 + 1j * SIGMA_2) / 2
SIGMA_MINUS = (SIGMA_1 - 1j * SIGMA_2) / 2
IDENTITY_2 = np.eye(2, dtype=complex)
WALSH_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def sigma1_eigenvector(lam: int) -> np.ndarray:
    """Eigenvector ``(1, lam)/sqrt(2)`` of sigma_1 with eigenvalue ``lam``."""
    if lam not in (1, -1):
        raise ValueError(f"lam must be +1 or -1, got {lam}")
    return np.array([1.0, lam], dtype=complex) / np.sqrt(2)


class Kind(str, enum.Enum):
    N = "N"
    K = "K"
    J = "J"


@dataclass(frozen=True)
class AlgebraKind:
    """Which ladder algebra to realize, with its representation label.

    Use the constructors :meth:`heisenberg`, :meth:`su11` and :meth:`su2`
    rather than filling the fields by hand.
    """

    kind: Kind
    bargmann_k: float | None = None
    spin_j: float | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Kind.K:
            if self.bargmann_k is None or not self.bargmann_k > 0:
                raise ValueError(f"Bargmann index must be positive, got {self.bargmann_k}")
        if kind is Kind.J:
            if self.spin_j is None:
                raise ValueError("spin_j is required for the J algebra")
            twice = 2 * self.spin_j
            if round(twice) < 1 or abs(twice - round(twice)) > 1e-12:
                raise ValueError(f"spin_j must be a half-integer >= 1/2, got {self.spin_j}")

    @classmethod
    def heisenberg(cls) -> "AlgebraKind":
        return cls(Kind.N)

    @classmethod
    def su11(cls, k: float) -> "AlgebraKind":
        return cls(Kind.K, bargmann_k=float(k))

    @classmethod
    def su2(cls, j: float) -> "AlgebraKind":
        return cls(Kind.J, spin_j=float(j))

    @property
    def is_finite(self) -> bool:
        return self.kind is Kind.J

    @property
    def spin_dim(self) -> int:
        """Representation dimension ``2j+1`` (J only)."""
        if self.kind is not Kind.J:
            raise AttributeError("spin_dim is only defined for the J algebra")
        return int(round(2 * self.spin_j)) + 1

    def ground_offset(self) -> float:
        """Lowest L3 eigenvalue of the untruncated representation."""
        if self.kind is Kind.N:
            return 0.0
        if self.kind is Kind.K:
            return self.bargmann_k
        return -self.spin_j

    def default_dim(self, dim: int | None) -> int:
        """Resolve and validate a truncation dimension for this algebra."""
        if self.kind is Kind.J:
            if dim is not None and dim != self.spin_dim:
                raise ValueError(
                    f"J algebra with j={self.spin_j} has dimension {self.spin_dim}, got {dim}"
                )
            return self.spin_dim
        if dim is None or dim < 2:
            raise ValueError(f"truncation dimension must be >= 2, got {dim}")
        return int(dim)


@dataclass(frozen=True)
class LadderSet:
    """Matrices ``L+``, ``L-``, ``L3`` of one truncated representation."""

    l_plus: np.ndarray
    l_minus: np.ndarray
    l3: np.ndarray
    kind: AlgebraKind
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dim", self.l3.shape[0])
        for m in (self.l_plus, self.l_minus, self.l3):
            m.setflags(write=False)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def interior(self, m: np.ndarray) -> np.ndarray:
        """Drop the last row and column for truncated (N, K) algebras."""
        if self.kind.is_finite:
            return m
        return m[: self.dim - 1, : self.dim - 1]

    def commutator_residuals(self) -> dict[str, float]:
        """Max-norm residuals of the defining commutation relations.

        ``[L3, L+] = L+``, ``[L3, L-] = -L-`` and ``[L+, L-] = c``, with
        ``c = -1`` (N), ``-2 K3`` (K) or ``+2 J3`` (J). Evaluated on the
        interior block.
        """
        lp, lm, l3 = self.l_plus, self.l_minus, self.l3
        if self.kind.kind is Kind.N:
            expected = -self.identity
        elif self.kind.kind is Kind.K:
            expected = -2 * l3
        else:
            expected = 2 * l3

        def res(m):
            return float(np.max(np.abs(self.interior(m)), initial=0.0))

        return {
            "l3_lplus": res(commutator(l3, lp) - lp),
            "l3_lminus": res(commutator(l3, lm) + lm),
            "lplus_lminus": res(commutator(lp, lm) - expected),
        }


def ladder_ops(kind: AlgebraKind, dim: int | None = None) -> LadderSet:
    """Build ``L+``, ``L-``, ``L3`` in the number basis.

    Parameters
    ----------
    kind : AlgebraKind
        Algebra and representation label.
    dim : int, optional
        Truncation dimension (>= 2). For ``J`` it may be omitted; if given
        it must equal ``2j+1``.

    Returns
    -------
    LadderSet
    """
    dim = kind.default_dim(dim)
    n = np.arange(dim, dtype=float)
    if kind.kind is Kind.N:
        lower = np.sqrt(n[1:])
        l3 = n
    elif kind.kind is Kind.K:
        k = kind.bargmann_k
        lower = np.sqrt(n[1:] * (2 * k + n[1:] - 1))
        l3 = k + n
    else:
        j = kind.spin_j
        lower = np.sqrt(n[1:] * (2 * j - n[1:] + 1))
        l3 = -j + n
    l_minus = np.diag(lower, 1).astype(complex)
    return LadderSet(
        l_plus=l_minus.T.copy(),
        l_minus=l_minus,
        l3=np.diag(l3).astype(complex),
        kind=kind,
    )


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def matrix_exp(a: np.ndarray) -> np.ndarray:
    """Dense matrix exponential (scaling and squaring with Pade approximants).

    Raises ``ValueError`` for non-square input or non-finite entries.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix_exp needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix_exp input has non-finite entries")
    return scipy.linalg.expm(a)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor outermost (atom before field)."""
    return np.kron(a, b)


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def is_antihermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(a + a.conj().T), initial=0.0) <= tol)


def unitarity_defect(u: np.ndarray) -> float:
    """``max |U^dagger U - 1|``."""
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    return unitarity_defect(u) <= tol
