"""
Dense complex linear algebra kernel.

Spectra are always returned in ascending order with multiplicity, so that
``values[0]`` is the smallest eigenvalue / singular value.  Matrices are plain
``numpy.ndarray`` objects of dtype ``complex128``; :func:`as_matrix` is the
single gate through which inputs are validated.

The vectorization convention is column stacking::

    A = [[a, b],
         [c, d]]   ->   vec(A) = (a, c, b, d)^T

so that ``vec(A @ B @ C) == kron(C.T, A) @ vec(B)``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    KOutOfRangeError,
    LengthNotSquareError,
    NonFiniteError,
    NonSquareError,
    NotHermitianError,
)

__all__ = [
    "ComplexMatrix",
    "SpectrumAscending",
    "ZERO_SV_RTOL",
    "as_matrix",
    "as_square",
    "hermitian_eigenvalues_ascending",
    "singular_values_ascending",
    "matrix_exp",
    "kron",
    "vec",
    "unvec",
    "ky_fan_norm",
    "log_abs_det",
    "trotter_product",
]

ComplexMatrix = np.ndarray

# singular values below ZERO_SV_RTOL * s_max count as exact zeros
ZERO_SV_RTOL = 1e-12


@dataclass(frozen=True)
class SpectrumAscending:
    """Real spectrum sorted non-decreasingly.

    Behaves like a read-only 1-d array (``len``, indexing, iteration and
    ``np.asarray`` all work on ``values``).
    """

    values: np.ndarray
    tolerance_used: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("spectrum must be one-dimensional")
        if np.any(np.diff(v) < 0):
            raise ValueError("spectrum is not sorted ascending")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, item):
        return self.values[item]

    def __iter__(self):
        return iter(self.values)

    @property
    def descending(self) -> np.ndarray:
        return self.values[::-1]


def as_matrix(A) -> np.ndarray:
    """Return ``A`` as a 2-d complex array, rejecting NaN/Inf entries."""
    M = np.asarray(A, dtype=complex)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2 or M.size == 0:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteError("matrix has non-finite entries")
    return M


def as_square(A) -> np.ndarray:
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {M.shape}")
    return M


def hermitian_eigenvalues_ascending(A, hermiticity_tol: float = 1e-10) -> SpectrumAscending:
    """Eigenvalues of the Hermitian part of ``A``, ascending, with multiplicity.

    ``A`` must be Hermitian up to ``hermiticity_tol * max(1, ||A||_F)`` in
    Frobenius norm; the anti-Hermitian residue is discarded.
    """
    M = as_square(A)
    scale = max(1.0, np.linalg.norm(M))
    residual = np.linalg.norm(M - M.conj().T)
    if residual > hermiticity_tol * scale:
        raise NotHermitianError(
            f"||A - A*||_F = {residual:.3e} exceeds {hermiticity_tol:.1e} * {scale:.3e}"
        )
    w = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    return SpectrumAscending(np.sort(w), hermiticity_tol)


def singular_values_ascending(A) -> SpectrumAscending:
    """Singular values of a square matrix, ascending."""
    M = as_square(A)
    s = np.linalg.svd(M, compute_uv=False)
    return SpectrumAscending(np.sort(s), ZERO_SV_RTOL)


def matrix_exp(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Padé approximant."""
    return scipy.linalg.expm(as_square(A))


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def vec(A) -> np.ndarray:
    """Stack the columns of ``A`` into a single column vector."""
    M = as_matrix(A)
    return M.reshape(-1, 1, order="F")


def unvec(v, d: int = None) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    flat = np.asarray(v, dtype=complex).ravel()
    n = flat.size
    if d is None:
        d = int(round(np.sqrt(n)))
    if d * d != n:
        raise LengthNotSquareError(f"vector of length {n} is not a vectorized {d}x{d} matrix")
    return flat.reshape(d, d, order="F")


def ky_fan_norm(A, k: int) -> float:
    """Sum of the ``k`` largest singular values."""
    M = as_matrix(A)
    kmax = min(M.shape)
    if not 1 <= k <= kmax:
        raise KOutOfRangeError(f"k={k} outside [1, {kmax}]")
    s = np.linalg.svd(M, compute_uv=False)
    return float(np.sum(np.sort(s)[::-1][:k]))


def log_abs_det(A) -> float:
    """``sum(log s_i(A))``; ``-inf`` when a singular value is numerically zero."""
    s = singular_values_ascending(A).values
    if s[-1] == 0.0 or s[0] < ZERO_SV_RTOL * s[-1]:
        return float("-inf")
    return float(np.sum(np.log(s)))


def trotter_product(G1, G2, n: int) -> np.ndarray:
    """First-order Lie-Trotter approximant ``(e^{G1/n} e^{G2/n})^n``."""
    A, B = as_square(G1), as_square(G2)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"{A.shape} vs {B.shape}")
    if n < 1:
        raise ValueError("n must be a positive integer")
    step = matrix_exp(A / n) @ matrix_exp(B / n)
    return np.linalg.matrix_power(step, n)
