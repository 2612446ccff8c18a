"""
Superoperator representations of Lindblad generators and quantum channels.

A linear map ``T`` on d x d matrices is stored as its d^2 x d^2 matrix in the
column-stacking vec basis, ``vec(T(X)) = S @ vec(X)``.  Useful identities::

    X -> A X B          <->  kron(B.T, A)
    X -> K X K^dagger   <->  kron(K.conj(), K)

The generalized Gell-Mann basis used for real representations is ordered as
``1/sqrt(d)``, then the d-1 diagonal traceless elements, then the symmetric
off-diagonal elements, then the antisymmetric ones (pairs (j, k), j < k, in
lexicographic order).  All elements have unit Frobenius norm.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotAChannelError,
    NotHermiticityPreservingError,
    PreconditionError,
    TraceNotPreservedError,
)
from .matcore import as_matrix, as_square, log_abs_det, matrix_exp

__all__ = [
    "CP_TOL",
    "TP_TOL",
    "LindbladGenerator",
    "Superoperator",
    "QuantumChannel",
    "lindblad_superoperator",
    "symmetrized_generator",
    "symmetrize",
    "traceless_shift",
    "channel_from_generator",
    "kraus_superoperator",
    "choi_matrix",
    "superop_from_choi",
    "is_cptp",
    "gellmann_basis",
    "gellmann_unitary",
    "gellmann_representation",
    "channel_from_gellmann_diag",
    "channel_determinant",
    "identity_superop",
    "transpose_superop",
    "depolarizing_superop",
]

CP_TOL = 1e-9
TP_TOL = 1e-9
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class LindbladGenerator:
    """Hamiltonian ``H`` plus Lindbladians ``L_j`` of a GKLS generator

        L(rho) = i[rho, H] + sum_j L_j rho L_j^dagger - 1/2 {L_j^dagger L_j, rho}
    """

    hamiltonian: np.ndarray
    lindbladians: tuple = ()
    tol: float = HERMITIAN_TOL

    def __post_init__(self):
        H = as_square(self.hamiltonian)
        d = H.shape[0]
        scale = max(1.0, np.linalg.norm(H))
        if np.linalg.norm(H - H.conj().T) > self.tol * scale:
            raise PreconditionError("Hamiltonian is not self-adjoint")
        Ls = tuple(as_square(L) for L in self.lindbladians)
        for L in Ls:
            if L.shape != (d, d):
                raise DimensionMismatchError(f"Lindbladian of shape {L.shape} for d={d}")
        object.__setattr__(self, "hamiltonian", H)
        object.__setattr__(self, "lindbladians", Ls)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @classmethod
    def dissipative(cls, *lindbladians) -> "LindbladGenerator":
        """Purely dissipative generator (zero Hamiltonian)."""
        d = as_square(lindbladians[0]).shape[0]
        return cls(np.zeros((d, d), dtype=complex), tuple(lindbladians))

    def apply(self, rho) -> np.ndarray:
        """Evaluate the generator directly on a matrix, without vectorizing."""
        rho = as_square(rho)
        H = self.hamiltonian
        out = 1j * (rho @ H - H @ rho)
        for L in self.lindbladians:
            LdL = L.conj().T @ L
            out = out + L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
        return out


@dataclass(frozen=True)
class Superoperator:
    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        M = as_square(self.matrix)
        if M.shape[0] != self.dim * self.dim:
            raise DimensionMismatchError(f"matrix {M.shape} is not {self.dim**2}x{self.dim**2}")
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_matrix(cls, matrix) -> "Superoperator":
        M = as_square(matrix)
        d = int(round(np.sqrt(M.shape[0])))
        if d * d != M.shape[0]:
            raise DimensionMismatchError(f"{M.shape[0]} is not a perfect square")
        return cls(d, M)

    def apply(self, X) -> np.ndarray:
        X = as_square(X)
        d = self.dim
        return (self.matrix @ X.reshape(-1, order="F")).reshape(d, d, order="F")

    def adjoint(self) -> "Superoperator":
        """Hilbert-Schmidt adjoint."""
        return Superoperator(self.dim, self.matrix.conj().T)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        if other.dim != self.dim:
            raise DimensionMismatchError(f"d={self.dim} vs d={other.dim}")
        return Superoperator(self.dim, self.matrix @ other.matrix)


@dataclass(frozen=True)
class QuantumChannel:
    """A superoperator together with its CP/TP diagnostics.

    ``cp_margin`` is the smallest eigenvalue of the (unnormalized) Choi matrix
    and ``tp_residual`` the deviation from trace preservation.  Use
    :meth:`from_superop` with ``check=False`` to wrap maps that are not
    channels (e.g. the transpose map) for criterion evaluation.
    """

    superop: Superoperator
    cp_margin: float
    tp_residual: float
    cp_tol: float = field(default=CP_TOL, compare=False)
    tp_tol: float = field(default=TP_TOL, compare=False)

    @classmethod
    def from_superop(cls, S, *, check=True, cp_tol=CP_TOL, tp_tol=TP_TOL) -> "QuantumChannel":
        if not isinstance(S, Superoperator):
            S = Superoperator.from_matrix(S)
        cp, tp = is_cptp(S)
        if check and (cp < -cp_tol or tp > tp_tol):
            raise NotAChannelError(
                f"not CPTP within tolerance: cp_margin={cp:.3e}, tp_residual={tp:.3e}"
            )
        return cls(S, cp, tp, cp_tol, tp_tol)

    @property
    def dim(self) -> int:
        return self.superop.dim

    @property
    def matrix(self) -> np.ndarray:
        return self.superop.matrix

    @property
    def is_cptp(self) -> bool:
        return self.cp_margin >= -self.cp_tol and self.tp_residual <= self.tp_tol

    def __matmul__(self, other: "QuantumChannel") -> "QuantumChannel":
        return QuantumChannel.from_superop(self.superop @ other.superop, check=False)


def lindblad_superoperator(gen: LindbladGenerator) -> Superoperator:
    """Matrix of the generator in the vec basis."""
    d = gen.dim
    I = np.eye(d)
    H = gen.hamiltonian
    S = 1j * (np.kron(H.T, I) - np.kron(I, H))
    for L in gen.lindbladians:
        LdL = L.conj().T @ L
        S = S + np.kron(L.conj(), L) - 0.5 * np.kron(I, LdL) - 0.5 * np.kron(LdL.conj(), I)
    return Superoperator(d, S)


def symmetrize(S) -> np.ndarray:
    """``S + S^*`` for a superoperator or plain matrix."""
    M = S.matrix if isinstance(S, Superoperator) else as_square(S)
    return M + M.conj().T


def symmetrized_generator(gen: LindbladGenerator) -> Superoperator:
    """``L + L^*`` for a purely dissipative generator with one Lindbladian."""
    if len(gen.lindbladians) != 1:
        raise PreconditionError("exactly one Lindbladian is required")
    if np.any(gen.hamiltonian != 0):
        raise PreconditionError("the Hamiltonian must vanish")
    L = gen.lindbladians[0]
    d = gen.dim
    I = np.eye(d)
    Ld = L.conj().T
    LdL = Ld @ L
    M = np.kron(L.conj(), L) + np.kron(Ld.conj(), Ld) - np.kron(I, LdL) - np.kron(LdL.conj(), I)
    return Superoperator(d, M)


def traceless_shift(L) -> np.ndarray:
    """``L - Tr(L)/d * 1``; leaves ``L + L^*`` of the dissipator unchanged."""
    L = as_square(L)
    d = L.shape[0]
    return L - (np.trace(L) / d) * np.eye(d)


def channel_from_generator(gen: LindbladGenerator, **kwargs) -> QuantumChannel:
    """``e^L`` for a Lindblad generator, with CP/TP diagnostics attached."""
    S = lindblad_superoperator(gen)
    return QuantumChannel.from_superop(Superoperator(S.dim, matrix_exp(S.matrix)), **kwargs)


def kraus_superoperator(kraus: Sequence) -> Superoperator:
    ops = [as_matrix(K) for K in kraus]
    d_out, d_in = ops[0].shape
    if d_out != d_in:
        raise DimensionMismatchError("only square Kraus operators are supported")
    M = sum(np.kron(K.conj(), K) for K in ops)
    return Superoperator(d_in, M)


def _matrix_of(S) -> tuple:
    if isinstance(S, QuantumChannel):
        S = S.superop
    if isinstance(S, Superoperator):
        return S.dim, S.matrix
    S = Superoperator.from_matrix(S)
    return S.dim, S.matrix


def choi_matrix(S) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_ij S(E_ij) (x) E_ij``."""
    d, M = _matrix_of(S)
    # M[(b,a),(j,i)] with vec index = col*d + row  ->  tau[(a,i),(b,j)]
    return M.reshape(d, d, d, d).transpose(1, 3, 0, 2).reshape(d * d, d * d)


def superop_from_choi(tau, d: int = None) -> Superoperator:
    tau = as_square(tau)
    if d is None:
        d = int(round(np.sqrt(tau.shape[0])))
    if d * d != tau.shape[0]:
        raise DimensionMismatchError(f"Choi matrix of size {tau.shape[0]} for d={d}")
    M = tau.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d * d, d * d)
    return Superoperator(d, M)


def is_cptp(S, tol: float = None) -> tuple:
    """Return ``(cp_margin, tp_residual)``.

    ``cp_margin`` is the smallest eigenvalue of the Hermitian part of the
    Choi matrix; ``tp_residual = ||vec(1)^* S - vec(1)^*||_2``.  ``tol`` is
    accepted for interface symmetry and unused: callers compare the returned
    numbers against their own tolerances.
    """
    d, M = _matrix_of(S)
    tau = choi_matrix(M)
    cp_margin = float(np.linalg.eigvalsh(0.5 * (tau + tau.conj().T))[0])
    v = np.eye(d).reshape(-1, order="F")
    tp_residual = float(np.linalg.norm(v.conj() @ M - v.conj()))
    return cp_margin, tp_residual


@lru_cache(maxsize=32)
def _gellmann_cached(d: int) -> tuple:
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for l in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -l
        basis.append(m / np.sqrt(l * (l + 1)))
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1 / np.sqrt(2)
        basis.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j / np.sqrt(2)
        m[k, j] = 1j / np.sqrt(2)
        basis.append(m)
    U = np.column_stack([b.reshape(-1, order="F") for b in basis])
    for b in basis:
        b.setflags(write=False)
    U.setflags(write=False)
    return tuple(basis), U


def gellmann_basis(d: int) -> list:
    """Orthonormal Hermitian basis of d x d matrices, identity element first."""
    return list(_gellmann_cached(d)[0])


def gellmann_unitary(d: int) -> np.ndarray:
    """Unitary whose columns are vec of the Gell-Mann basis elements."""
    return _gellmann_cached(d)[1]


def gellmann_representation(S, tol: float = 1e-10) -> np.ndarray:
    """Real matrix of a Hermiticity-preserving map in the Gell-Mann basis.

    Entry ``(a, b)`` is ``Tr[B_a S(B_b)]``.  The result is unitarily similar
    to the vec-basis matrix.
    """
    d, M = _matrix_of(S)
    U = gellmann_unitary(d)
    R = U.conj().T @ M @ U
    scale = max(1.0, np.linalg.norm(R))
    if np.linalg.norm(R.imag) > tol * scale:
        raise NotHermiticityPreservingError(
            f"imaginary residue {np.linalg.norm(R.imag):.3e} in Gell-Mann representation"
        )
    return R.real.copy()


def channel_from_gellmann_diag(d: int, diagonal, *, cp_tol=CP_TOL, tp_tol=TP_TOL) -> QuantumChannel:
    """Map that is diagonal in the Gell-Mann basis.

    Trace preservation forces ``diagonal[0] == 1``; complete positivity is only
    reported (via ``cp_margin``), not enforced.
    """
    diagonal = np.asarray(diagonal, dtype=float)
    if diagonal.shape != (d * d,):
        raise DimensionMismatchError(f"need {d * d} diagonal entries, got {diagonal.shape}")
    if abs(diagonal[0] - 1.0) > tp_tol:
        raise TraceNotPreservedError(f"diagonal[0] = {diagonal[0]!r}, must be 1")
    U = gellmann_unitary(d)
    M = (U * diagonal) @ U.conj().T
    return QuantumChannel.from_superop(Superoperator(d, M), check=False, cp_tol=cp_tol, tp_tol=tp_tol)


def channel_determinant(S) -> tuple:
    """``(sign, log|det|)`` of a Hermiticity-preserving map.

    The sign comes from an LU factorization of the real Gell-Mann
    representation; the magnitude from the vec-basis singular values.
    """
    d, M = _matrix_of(S)
    log_mag = log_abs_det(M)
    if log_mag == float("-inf"):
        return 0.0, log_mag
    sign, _ = np.linalg.slogdet(gellmann_representation(M))
    return float(sign), log_mag


def identity_superop(d: int) -> Superoperator:
    return Superoperator(d, np.eye(d * d, dtype=complex))


def transpose_superop(d: int) -> Superoperator:
    """The transpose map X -> X^T (positive but not completely positive)."""
    P = np.zeros((d * d, d * d), dtype=complex)
    for r in range(d):
        for c in range(d):
            # vec index of (r, c) is c*d + r; it moves to (c, r)
            P[r * d + c, c * d + r] = 1.0
    return Superoperator(d, P)


def depolarizing_superop(d: int) -> Superoperator:
    """Completely depolarizing channel X -> Tr[X] 1/d."""
    v = np.eye(d).reshape(-1, order="F")
    return Superoperator(d, np.outer(v, v).astype(complex) / d)
