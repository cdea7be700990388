"""Special functions: integer-order Bessel functions, Laguerre polynomials,
and matrix elements of the displacement-type operator ``exp(x (L+ - L-))``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numba
import numpy as np

from .algebra import AlgebraKind, ladder_ops, matrix_exp
from .errors import ConvergenceError

BESSEL_X_MAX = 700.0
# below this |x| the power series is used, above it Miller's recurrence
_SERIES_MAX = 12.0
_BIG = 1e100


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or abs(x) > BESSEL_X_MAX:
        raise ValueError(f"Bessel argument |x| must be <= {BESSEL_X_MAX}, got {x}")
    return x


def _series_j(nu: int, x: float) -> float:
    # nu >= 0, x >= 0
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * x
    # log(x) - log(2) rather than log(x/2): x/2 underflows for subnormal x
    log_t0 = nu * (math.log(x) - math.log(2.0)) - math.lgamma(nu + 1)
    if log_t0 < -745.0:
        return 0.0
    term = math.exp(log_t0)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and k > half:
            break
    return total


def _miller_start(order: int, x: float) -> int:
    top = max(order, int(x))
    m = top + 20 + int(10.0 * top ** (1.0 / 3.0))
    return m + (m % 2)


@numba.njit(cache=True)
def _miller_core(m, top_order, x):
    vals = np.zeros(m + 2)
    vals[m] = 1e-30
    two_over_x = 2.0 / x
    for k in range(m, 0, -1):
        vals[k - 1] = k * two_over_x * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > _BIG:
            vals[k - 1 :] /= _BIG
    sq = vals[0] ** 2 + 2.0 * np.sum(vals[1:] ** 2)
    even = vals[0] + 2.0 * np.sum(vals[2::2])
    scale = 1.0 / math.sqrt(sq)
    if even < 0:
        scale = -scale
    return vals[: top_order + 1] * scale


def _miller_all(top_order: int, x: float) -> np.ndarray:
    """``J_0 .. J_top_order`` at ``x > 0`` by downward recurrence.

    The unnormalized sequence is scaled so that ``J_0^2 + 2 sum J_k^2 = 1``;
    the overall sign comes from ``J_0 + 2 sum J_{2k} = 1``.
    """
    return _miller_core(_miller_start(top_order, x), top_order, x)


def bessel_j(alpha: int, x: float) -> float:
    """Bessel function of the first kind ``J_alpha(x)`` for integer ``alpha``.

    Reflections ``J_{-a}(x) = (-1)^a J_a(x) = J_a(-x)`` are applied
    structurally, so they hold bit for bit. Supported for ``|x| <= 700``;
    absolute error is below ``1e-10`` there.
    """
    if int(alpha) != alpha:
        raise ValueError(f"integer order required, got {alpha}")
    alpha = int(alpha)
    x = _check_x(x)
    nu = abs(alpha)
    sign = -1.0 if (alpha < 0) != (x < 0) and nu % 2 == 1 else 1.0
    ax = abs(x)
    if ax < _SERIES_MAX:
        val = _series_j(nu, ax)
    else:
        val = float(_miller_all(nu, ax)[nu])
    return sign * val


def bessel_j_orders(max_order: int, x: float) -> np.ndarray:
    """Array of ``J_alpha(x)`` for ``alpha = -max_order .. max_order``.

    Index ``max_order + alpha`` holds ``J_alpha``.
    """
    x = _check_x(x)
    ax = abs(x)
    if ax < _SERIES_MAX:
        pos = np.array([_series_j(k, ax) for k in range(max_order + 1)])
    else:
        pos = _miller_all(max_order, ax)
    parity = np.where(np.arange(max_order + 1) % 2 == 1, -1.0, 1.0)
    if x < 0:
        pos = pos * parity
    neg = (pos * parity)[:0:-1]
    return np.concatenate([neg, pos])


def laguerre(n: int, y):
    """Laguerre polynomial ``L_n(y)`` by the three-term recurrence

    ``(k+1) L_{k+1} = (2k+1-y) L_k - k L_{k-1}``.

    ``y`` may be a scalar or an array.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    y = np.asarray(y, dtype=float)
    prev = np.ones_like(y)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - y
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - y) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class MatrixElementTable:
    """Table of ``<<m| exp(x (L+ - L-)) |n>>`` for ``m, n < dim``.

    ``values`` is real; ``n_converged`` is the size of the leading block whose
    entries moved by at most ``tol`` when the truncation was doubled (always
    ``dim`` for the finite J algebra).
    """

    kind: AlgebraKind
    x: float
    dim: int
    values: np.ndarray
    n_converged: int
    tol: float = 1e-8

    def entry(self, m: int, n: int) -> float:
        if max(m, n) >= self.n_converged:
            raise ConvergenceError(
                f"matrix element ({m},{n}) not converged: only indices < "
                f"{self.n_converged} are stable at dim={self.dim}, x={self.x}"
            )
        return float(self.values[m, n])

    def diagonal(self, n: int) -> float:
        return self.entry(n, n)

    def flipped(self) -> "MatrixElementTable":
        """Table for ``-x``: the exponential is orthogonal, so this is the transpose."""
        return MatrixElementTable(
            self.kind, -self.x, self.dim, self.values.T.copy(), self.n_converged, self.tol
        )


def _exp_table(kind: AlgebraKind, x: float, dim: int) -> np.ndarray:
    ops = ladder_ops(kind, dim)
    t = matrix_exp(x * (ops.l_plus - ops.l_minus))
    imag = np.max(np.abs(t.imag))
    if imag > 1e-10:
        raise ConvergenceError(f"displacement table has imaginary part {imag:.2e}")
    return t.real


@functools.lru_cache(maxsize=64)
def _cached_table(kind: AlgebraKind, x: float, dim: int, tol: float) -> MatrixElementTable:
    if kind.is_finite:
        vals = _exp_table(kind, x, dim)
        n_conv = dim
    else:
        small = _exp_table(kind, x, dim)
        big = _exp_table(kind, x, 2 * dim)[:dim, :dim]
        diff = np.abs(small - big) / np.maximum(1.0, np.abs(big))
        n_conv = 0
        while n_conv < dim and diff[: n_conv + 1, : n_conv + 1].max() <= tol:
            n_conv += 1
        vals = big
    vals.setflags(write=False)
    return MatrixElementTable(kind, x, dim, vals, n_conv, tol)


def displacement_elements(
    kind: AlgebraKind, x: float, dim: int | None = None, tol: float = 1e-8
) -> MatrixElementTable:
    """Matrix elements of ``exp(x (L+ - L-))`` in the number basis.

    For N and K the table is computed at ``dim`` and ``2*dim``; entries
    are only served from the leading block that agrees to ``tol``.

    Parameters
    ----------
    kind : AlgebraKind
    x : float
        Displacement parameter.
    dim : int, optional
        Truncation dimension; must be ``2j+1`` (or omitted) for J.
    tol : float
        Convergence tolerance for the dimension-doubling check.
    """
    dim = kind.default_dim(dim)
    return _cached_table(kind, float(x), dim, float(tol))


def bessel_zero_j0(lo: float = 2.0, hi: float = 3.0, rtol: float = 1e-15) -> float:
    """First zero of ``J_0`` in ``[lo, hi]`` by plain bisection."""
    flo = bessel_j(0, lo)
    if flo * bessel_j(0, hi) > 0:
        raise ValueError("J0 has no sign change in the bracket")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        fm = bessel_j(0, mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
