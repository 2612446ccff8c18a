"""
Explicit channel families and the search for product-criterion violations.

* ``NilpotentCorner``: one Lindbladian ``E_{1,d}``; its exponential is
  infinitesimal divisible and shows the exponent/factor counts are nearly tight.
* ``NormalDiag``: ``diag[1, -1, 0, ..., 0]``, attaining exponent ``d`` for
  normal Lindbladians.
* ``GellmannBoundary``: ``diag[1, eps, ..., eps, 0]`` in the Gell-Mann basis
  at the largest completely positive ``eps``.
* ``PerturbedIdentity``: ``(1 - eps) T0 + eps id`` for a rank-deficient ``T0``;
  violates the power criterion for small ``eps``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .criteria import (
    REPORT_TOL,
    channel_spectrum,
    full_report,
    power_criterion,
)
from .errors import BisectionFailure, DimTooSmallError, KOutOfRangeError, NoViolationFound
from .matcore import ZERO_SV_RTOL, SpectrumAscending, matrix_exp
from .superop import (
    LindbladGenerator,
    QuantumChannel,
    Superoperator,
    channel_from_gellmann_diag,
    channel_from_generator,
    lindblad_superoperator,
)

__all__ = [
    "WitnessFamily",
    "SearchResult",
    "corner_extreme_singular_values",
    "nilpotent_corner_generator",
    "nilpotent_corner_channel",
    "normal_diag_generator",
    "scaled_corner_exponent_bound",
    "gellmann_boundary_witness",
    "perturb_toward_identity",
    "perturbed_identity_witness",
    "stinespring_channel",
    "product_objective",
    "search_product_violation",
]

E = math.e

PERTURB_EPS0 = 0.25
PERTURB_RATIO = 0.5
PERTURB_MAX_STEPS = 60
BISECTION_TOL = 1e-10
PENALTY = 1e6


@dataclass(frozen=True)
class WitnessFamily:
    family_id: str
    dim: int
    parameters: tuple = ()

    def __post_init__(self):
        if self.family_id not in ("NilpotentCorner", "NormalDiag", "GellmannBoundary", "PerturbedIdentity"):
            raise ValueError(f"unknown family {self.family_id!r}")
        if self.dim < 2:
            raise DimTooSmallError("dim must be at least 2")


@dataclass
class SearchResult:
    best_objective: float
    best_channel: QuantumChannel
    iterations: int
    seed: int
    violated: bool
    k: int = 0
    restarts: int = 0
    env_dim: int = 0
    best_log_objective: float = math.inf
    restart_objectives: list = field(default_factory=list)


def _require_dim(d):
    if d < 2:
        raise DimTooSmallError(f"d={d} < 2")


def corner_extreme_singular_values() -> tuple:
    """Closed-form (largest, smallest) singular values of the corner block.

    Both the quantum nilpotent channel and the classical counterexample share
    the 2x2 block ``[[1/e, 1 - 1/e], [0, 1]]`` up to ordering.
    """
    root = math.sqrt(1 + E * E)
    big = math.sqrt(1 - E + E * E + (E - 1) * root) / E
    small = math.sqrt(1 - E + E * E - (E - 1) * root) / E
    return big, small


def nilpotent_corner_generator(d: int) -> LindbladGenerator:
    """Purely dissipative generator with the single Lindbladian ``E_{1,d}``."""
    _require_dim(d)
    L = np.zeros((d, d), dtype=complex)
    L[0, d - 1] = 1.0
    return LindbladGenerator.dissipative(L)


def nilpotent_corner_channel(d: int) -> tuple:
    """``(e^L, closed-form singular values)`` for the nilpotent corner generator."""
    T = channel_from_generator(nilpotent_corner_generator(d))
    big, small = corner_extreme_singular_values()
    expected = np.concatenate([
        [small],
        np.full(2 * (d - 1), math.exp(-0.5)),
        np.ones((d - 1) ** 2 - 1),
        [big],
    ])
    return T, SpectrumAscending(np.sort(expected))


def normal_diag_generator(d: int) -> LindbladGenerator:
    _require_dim(d)
    L = np.zeros((d, d), dtype=complex)
    L[0, 0], L[1, 1] = 1.0, -1.0
    return LindbladGenerator.dissipative(L)


def scaled_corner_exponent_bound(d: int, n: float) -> float:
    """Largest admissible power exponent read off from ``e^{L/n}``.

    ``ln det(e^{L/n}) = -d/n`` exactly; the smallest singular value is
    computed numerically.
    """
    _require_dim(d)
    if n < 1:
        raise ValueError("n must be >= 1")
    S = lindblad_superoperator(nilpotent_corner_generator(d)).matrix
    T = matrix_exp(S / n)
    s1 = np.linalg.svd(T, compute_uv=False).min()
    return (-d / n) / math.log(s1)


def gellmann_boundary_witness(d: int, *, tol: float = BISECTION_TOL) -> tuple:
    """Largest ``eps`` with ``diag[1, eps, ..., eps, 0]`` completely positive.

    The bracket ``[0, 1]`` is valid because the Choi matrix is affine in
    ``eps`` and positive definite at ``eps = 0``.
    """
    _require_dim(d)

    def diag(eps):
        v = np.full(d * d, eps)
        v[0], v[-1] = 1.0, 0.0
        return v

    def cp(eps):
        return channel_from_gellmann_diag(d, diag(eps)).cp_margin

    lo, hi = 0.0, 1.0
    if cp(lo) < 0 or cp(hi) >= 0:
        raise BisectionFailure(f"no sign change of the CP margin on [0, 1] for d={d}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cp(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return lo, channel_from_gellmann_diag(d, diag(lo))


def perturb_toward_identity(T0: QuantumChannel, eps: float) -> QuantumChannel:
    """``(1 - eps) T0 + eps id``."""
    d = T0.dim
    M = (1 - eps) * T0.matrix + eps * np.eye(d * d)
    return QuantumChannel.from_superop(Superoperator(d, M), check=False)


def perturbed_identity_witness(T0: QuantumChannel, zero_multiplicity: int = None, *,
                               eps0=PERTURB_EPS0, ratio=PERTURB_RATIO,
                               max_steps=PERTURB_MAX_STEPS, report_tol=REPORT_TOL) -> tuple:
    """Find ``eps`` such that ``(1 - eps) T0 + eps id`` violates the power criterion.

    Tries ``eps0 * ratio**j`` for ``j = 0 .. max_steps - 1`` and returns
    ``(eps, certificate)`` for the first violating one.
    """
    s = channel_spectrum(T0).singular_values
    zeros = int(np.sum(s < ZERO_SV_RTOL * s[-1]))
    if zero_multiplicity is not None and zero_multiplicity != zeros:
        raise ValueError(f"T0 has {zeros} zero singular values, not {zero_multiplicity}")
    if zeros == 0:
        raise NoViolationFound("T0 has no zero singular value", largest_epsilon=None)
    eps = eps0
    for _ in range(max_steps):
        T = perturb_toward_identity(T0, eps)
        if power_criterion(T, report_tol=report_tol).violated:
            return eps, full_report(T, report_tol=report_tol)
        eps *= ratio
    note = "" if 2 * zeros < T0.dim else f" (zero multiplicity {zeros} >= d/2)"
    raise NoViolationFound(f"no violation for eps down to {eps / ratio:.3e}{note}", largest_epsilon=eps0)


def stinespring_channel(params, d: int, env_dim: int) -> Superoperator:
    """CPTP map from real parameters via a QR-orthonormalized isometry.

    The isometry ``V: C^d -> C^env_dim (x) C^d`` is cut into ``env_dim``
    Kraus operators ``K_e``; the result is ``sum_e conj(K_e) (x) K_e``.
    """
    n = d * env_dim * d
    Z = (params[:n] + 1j * params[n:2 * n]).reshape(d * env_dim, d)
    V, _ = np.linalg.qr(Z)
    K = V.reshape(env_dim, d, d)
    M = np.einsum("eab,ecd->acbd", K.conj(), K).reshape(d * d, d * d)
    return Superoperator(d, M)


def product_objective(T, k: int) -> float:
    """``ln(prod_{i<=k} s_i(T) / det T)``; ``+inf`` when ``det T <= 0``.

    The product criterion with ``k`` factors is violated iff this is negative.
    """
    spec = channel_spectrum(T)
    if spec.degenerate or spec.det_sign <= 0:
        return math.inf
    return float(np.sum(np.log(spec.singular_values[:k])) - spec.log_abs_det)


def _fast_objective(M: np.ndarray, k: int) -> float:
    s = np.linalg.svd(M, compute_uv=False)
    s.sort()
    sign, _ = np.linalg.slogdet(M)
    det_real = sign.real
    if s[0] < ZERO_SV_RTOL * s[-1] or det_real <= 0:
        logdet = float(np.sum(np.log(np.maximum(s, 1e-300))))
        return PENALTY - det_real * math.exp(min(logdet, 0.0))
    return float(np.sum(np.log(s[:k])) - np.sum(np.log(s)))


def search_product_violation(d: int, k: int, restarts: int = 16, max_iters: int = 2000,
                             seed: int = 0, env_dim: int = None, tol: float = REPORT_TOL) -> SearchResult:
    """Minimize ``prod_{i<=k} s_i(T) / det T`` over channels ``T``.

    Channels are parameterized by Stinespring isometries; each restart runs a
    Nelder-Mead simplex from its own seeded starting point.  The best restart
    wins, ties going to the lowest restart index.  A negative result is not a
    proof that no violating channel exists.
    """
    _require_dim(d)
    if not 1 <= k <= d * d:
        raise KOutOfRangeError(f"k={k} outside [1, {d * d}]")
    env_dim = d if env_dim is None else env_dim
    if not 1 <= env_dim <= d * d:
        raise ValueError(f"env_dim={env_dim} outside [1, {d * d}]")
    n_params = 2 * d * env_dim * d
    streams = np.random.SeedSequence(seed).spawn(restarts)

    def objective(x):
        return _fast_objective(stinespring_channel(x, d, env_dim).matrix, k)

    best_val, best_x, total_iters = math.inf, None, 0
    per_restart = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        x0 = rng.standard_normal(n_params)
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": max_iters, "xatol": 1e-10, "fatol": 1e-12, "adaptive": True})
        total_iters += int(res.nit)
        per_restart.append(float(res.fun))
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x

    channel = QuantumChannel.from_superop(stinespring_channel(best_x, d, env_dim), check=False)
    log_obj = product_objective(channel, k)
    ratio = math.exp(log_obj) if log_obj < math.inf else math.inf
    det_positive = log_obj < math.inf
    violated = det_positive and ratio < 1 - tol
    return SearchResult(ratio, channel, total_iters, seed, violated, k=k, restarts=restarts,
                        env_dim=env_dim, best_log_objective=log_obj, restart_objectives=per_restart)
