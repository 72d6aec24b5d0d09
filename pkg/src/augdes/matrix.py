"""Dense symmetric-matrix arithmetic for intrablock computations.

Matrix orders here are tiny (a few hundred at the very most), so plain
Gaussian elimination with partial pivoting is used everywhere; robustness
and predictable failure modes win over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, Disconnected, NotCentered, SingularMatrix

# Pivots below this magnitude signal a numerically singular matrix.
PIVOT_TOL = 1e-12
# Row sums of a centered matrix must vanish to within this tolerance.
CENTERED_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Real symmetric matrix, stored densely and exactly symmetric.

    Construction symmetrizes the input as 0.5 * (A + A^T) after rejecting
    anything whose asymmetry exceeds a small relative tolerance, so the
    stored entries always satisfy a[i, j] == a[j, i] exactly.
    """

    a: np.ndarray

    def __post_init__(self):
        arr = np.array(self.a, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise DimensionMismatch("matrix order must be at least 1")
        scale = max(1.0, float(np.max(np.abs(arr))))
        if float(np.max(np.abs(arr - arr.T))) > 1e-8 * scale:
            raise ValueError("matrix is not symmetric within tolerance")
        sym = 0.5 * (arr + arr.T)
        sym.setflags(write=False)
        object.__setattr__(self, "a", sym)

    @property
    def order(self) -> int:
        return self.a.shape[0]

    def allclose(self, other: "SymMatrix", tol: float = 1e-9) -> bool:
        return self.order == other.order and float(np.max(np.abs(self.a - other.a))) <= tol


def identity(order: int) -> SymMatrix:
    return SymMatrix(np.eye(order))


def invert(m: SymMatrix) -> SymMatrix:
    """Inverse by Gauss-Jordan elimination with partial pivoting.

    Raises SingularMatrix as soon as the best available pivot magnitude
    drops below PIVOT_TOL.
    """
    n = m.order
    aug = np.hstack([m.a.copy(), np.eye(n)])
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[pivot_row, col]) < PIVOT_TOL:
            raise SingularMatrix(
                f"pivot {aug[pivot_row, col]:.3e} below {PIVOT_TOL:g} in column {col}"
            )
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        aug[col] = aug[col] / aug[col, col]
        for row in range(n):
            if row != col and aug[row, col] != 0.0:
                aug[row] = aug[row] - aug[row, col] * aug[col]
    inv = aug[:, n:]
    return SymMatrix(0.5 * (inv + inv.T))


def mp_inverse_centered(m: SymMatrix, n: int) -> SymMatrix:
    """Moore-Penrose inverse of an order-n matrix with zero row sums and
    rank n - 1.

    Uses M+ = (M + J/n)^(-1) - J/n with J the all-ones matrix; the shifted
    matrix is invertible exactly when M has full rank on the contrast
    space, i.e. when the design behind M is connected.
    """
    if m.order != n:
        raise DimensionMismatch(f"expected order {n}, got {m.order}")
    worst = float(np.max(np.abs(m.a.sum(axis=1))))
    if worst > CENTERED_TOL:
        raise NotCentered(f"row sums reach {worst:.3e}; matrix is not centered")
    shift = np.full((n, n), 1.0 / n)
    try:
        shifted_inv = invert(SymMatrix(m.a + shift))
    except SingularMatrix as exc:
        raise Disconnected("shifted matrix is singular; the underlying design is disconnected") from exc
    return SymMatrix(shifted_inv.a - shift)


def trace(m: SymMatrix) -> float:
    return float(np.trace(m.a))


def quad_form(m: SymMatrix, x) -> float:
    """x^T M x for a vector x of matching length."""
    vec = np.asarray(x, dtype=float)
    if vec.shape != (m.order,):
        raise DimensionMismatch(f"vector of shape {vec.shape} against order {m.order}")
    return float(vec @ m.a @ vec)
