"""Dense complex-matrix substrate.

Hermitian structure checks, PSD certification with a norm-scaled threshold,
Schur-complement splitting, and block determinants.  Everything here is a
pure function of its inputs; matrices are validated and returned read-only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, SingularityError, StructureError

DEFAULT_TOL = 1e-10

# Leading blocks with a 2-norm condition estimate at or above this are treated
# as singular rather than regularized.
MAX_LEADING_CONDITION = 1e8


def as_complex_matrix(M) -> np.ndarray:
    """Validate and return a finite two-dimensional complex array (read-only copy)."""
    A = np.array(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of rank {A.ndim}")
    if A.size and not np.all(np.isfinite(A)):
        raise DomainError("matrix entries must be finite (no NaN/Inf)")
    A.setflags(write=False)
    return A


def _require_square(A: np.ndarray) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        raise DimensionError("empty matrix")


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of a positive-semidefiniteness check.

    ``is_psd`` holds exactly when ``min_eigenvalue >= -threshold``; the
    threshold scales with the matrix norm so truncation noise does not flip
    verdicts on large operators.
    """

    min_eigenvalue: float
    threshold: float
    is_psd: bool

    def __post_init__(self):
        if self.is_psd != (self.min_eigenvalue >= -self.threshold):
            raise ValueError("inconsistent PSD verdict")


def hermitian_check(M, tol: float = DEFAULT_TOL) -> bool:
    """True when ``max |M - M*|`` entrywise is at most ``tol``."""
    A = np.asarray(M, dtype=complex)
    _require_square(A)
    return bool(np.max(np.abs(A - A.conj().T)) <= tol)


def psd_check(M, tol: float = DEFAULT_TOL) -> PsdVerdict:
    """PSD verdict for a Hermitian matrix.

    Eigenvalues are taken on the Hermitian symmetrization ``(M + M*)/2`` to
    kill round-off asymmetry; the acceptance threshold is
    ``tol * max(1, spectral norm estimate)``.
    """
    A = np.asarray(M, dtype=complex)
    _require_square(A)
    if not hermitian_check(A, tol):
        raise StructureError(f"matrix is not Hermitian within tol={tol}")
    H = (A + A.conj().T) / 2.0
    eigs = np.linalg.eigvalsh(H)
    min_eig = float(eigs[0])
    scale = float(max(1.0, np.max(np.abs(eigs))))
    threshold = tol * scale
    return PsdVerdict(min_eig, threshold, min_eig >= -threshold)


def _leading_condition(A11: np.ndarray) -> float:
    try:
        c = np.linalg.cond(A11)
    except np.linalg.LinAlgError:
        return np.inf
    return float(c)


def schur_split_psd(A, split: int, tol: float = DEFAULT_TOL) -> tuple[PsdVerdict, PsdVerdict]:
    """PSD verdicts for the leading block and its Schur complement.

    For Hermitian ``A`` with invertible leading ``split x split`` block the
    pair is jointly positive exactly when ``A`` itself is; this congruence
    equivalence is exercised by the test suite against a direct eigenvalue
    oracle.
    """
    A = np.asarray(A, dtype=complex)
    _require_square(A)
    n = A.shape[0]
    if not 1 <= split < n:
        raise DimensionError(f"split {split} outside 1..{n - 1}")
    if not hermitian_check(A, tol):
        raise StructureError(f"matrix is not Hermitian within tol={tol}")
    A11 = A[:split, :split]
    cond = _leading_condition(A11)
    if not np.isfinite(cond) or cond >= MAX_LEADING_CONDITION:
        raise SingularityError(f"leading block condition estimate {cond:.3e} >= {MAX_LEADING_CONDITION:.0e}")
    A12 = A[:split, split:]
    A22 = A[split:, split:]
    S = A22 - A12.conj().T @ np.linalg.solve(A11, A12)
    # symmetrize: solving through an ill-conditioned block leaves round-off skew
    S = (S + S.conj().T) / 2.0
    return psd_check(A11, tol), psd_check(S, tol)


def block_determinant(A, split: int) -> complex:
    """Determinant via the block identity ``det(M1) * det(M4 - M3 M1^{-1} M2)``."""
    A = np.asarray(A, dtype=complex)
    _require_square(A)
    n = A.shape[0]
    if not 1 <= split < n:
        raise DimensionError(f"split {split} outside 1..{n - 1}")
    M1 = A[:split, :split]
    cond = _leading_condition(M1)
    if not np.isfinite(cond) or cond >= MAX_LEADING_CONDITION:
        raise SingularityError(f"leading block condition estimate {cond:.3e} >= {MAX_LEADING_CONDITION:.0e}")
    M2 = A[:split, split:]
    M3 = A[split:, :split]
    M4 = A[split:, split:]
    return complex(np.linalg.det(M1) * np.linalg.det(M4 - M3 @ np.linalg.solve(M1, M2)))


def hermitian_det(M) -> float:
    """Determinant of a Hermitian matrix.

    Uses a Cholesky factor when the matrix is positive definite (the stable
    path for gram-determinant ratios) and falls back to LU otherwise.
    """
    A = np.asarray(M, dtype=complex)
    _require_square(A)
    H = (A + A.conj().T) / 2.0
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        return float(np.linalg.det(H).real)
    d = np.diag(L).real
    return float(np.exp(2.0 * np.sum(np.log(d))))
