"""
Necessary criteria for infinitesimal Markovian divisibility.

Every bound criterion has the shape

    |det T| <= (s_1(T) * ... * s_k(T)) ** p          (s ascending)

and is evaluated in the log domain: ``lhs_log = ln|det T|``,
``rhs_log = p * sum(ln s_i, i <= k)`` and ``margin = rhs_log - lhs_log``.
A criterion is *Violated* when ``margin < -report_tol`` (or, for the quantum
criteria, when the determinant is negative); a violation certifies that the
channel is not infinitesimal divisible.  Margins within ``report_tol`` of zero
are reported Satisfied with a ``boundary`` flag so that rounding can never
produce a false certificate.

The generator-level side is :func:`generator_spectral_condition`: if every
generator ``G`` in a (ray-closed) set satisfies

    Tr[G + G*] - p * sum(lambda_i(G + G*), i <= k) <= 0

then every product of their exponentials satisfies the (k, p) bound.
"""

import hashlib
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateSpectrumError, KOutOfRangeError
from .matcore import ZERO_SV_RTOL, as_square, hermitian_eigenvalues_ascending
from .superop import (
    QuantumChannel,
    Superoperator,
    channel_determinant,
    symmetrize,
)

__all__ = [
    "REPORT_TOL",
    "IMPROVED_GERSHGORIN_CONSTANT",
    "IMPROVED_POWER_FACTOR",
    "CriterionReport",
    "Certificate",
    "ChannelSpectrum",
    "channel_spectrum",
    "product_k",
    "interpolated_exponent",
    "bound_report",
    "det_nonneg_criterion",
    "power_criterion",
    "product_criterion",
    "interpolated_criterion",
    "full_report",
    "generator_spectral_condition",
    "max_valid_exponent",
    "appendix_g",
    "minimize_appendix_g",
]

REPORT_TOL = 1e-9

# lower bound on lambda_min(L + L*) in units of ||L||_F^2 for one Lindbladian
IMPROVED_GERSHGORIN_CONSTANT = 2.0 + math.sqrt(13.0 / 8.0)
# exponent per dimension obtained by comparing against Tr[L + L*] = -2d||L||_F^2
IMPROVED_POWER_FACTOR = 2.0 / IMPROVED_GERSHGORIN_CONSTANT

VIOLATED = "Violated"
SATISFIED = "Satisfied"


@dataclass
class CriterionReport:
    criterion_id: str
    k: int
    p: float
    lhs_log: float
    rhs_log: float
    margin: float
    verdict: str
    flags: list = field(default_factory=list)

    @property
    def violated(self) -> bool:
        return self.verdict == VIOLATED

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CriterionReport":
        return cls(**data)


@dataclass
class Certificate:
    channel_hash: str
    reports: list
    conclusion: str
    report_tol: float = REPORT_TOL

    @property
    def failing_criteria(self) -> list:
        return [r for r in self.reports if r.violated]

    def to_dict(self) -> dict:
        return {
            "channel_hash": self.channel_hash,
            "conclusion": self.conclusion,
            "report_tol": self.report_tol,
            "failing_criteria": [r.to_dict() for r in self.failing_criteria],
            "reports": [r.to_dict() for r in self.reports],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        reports = [CriterionReport.from_dict(r) for r in data["reports"]]
        return cls(data["channel_hash"], reports, data["conclusion"], data.get("report_tol", REPORT_TOL))


class ChannelSpectrum(NamedTuple):
    """Singular values (ascending), determinant sign and ln|det|."""

    dim: int
    singular_values: np.ndarray
    det_sign: float
    log_abs_det: float

    @property
    def degenerate(self) -> bool:
        return self.log_abs_det == -math.inf


def _matrix(T) -> tuple:
    if isinstance(T, QuantumChannel):
        return T.dim, T.matrix
    if isinstance(T, Superoperator):
        return T.dim, T.matrix
    S = Superoperator.from_matrix(T)
    return S.dim, S.matrix


def channel_spectrum(T) -> ChannelSpectrum:
    if isinstance(T, ChannelSpectrum):
        return T
    d, M = _matrix(T)
    s = np.sort(np.linalg.svd(M, compute_uv=False))
    sign, log_mag = channel_determinant(M)
    return ChannelSpectrum(d, s, sign, log_mag)


def channel_hash(T) -> str:
    d, M = _matrix(T)
    h = hashlib.sha256()
    h.update(str(d).encode())
    h.update(np.ascontiguousarray(M, dtype=np.complex128).tobytes())
    return h.hexdigest()


def product_k(d: int) -> int:
    """``floor(2d - 2 sqrt(2d) + 1)`` clamped to ``[1, d^2]``."""
    r = math.isqrt(2 * d)
    if r * r == 2 * d:
        k = (r - 1) ** 2
    else:
        k = math.floor(2 * d - 2 * math.sqrt(2 * d) + 1)
    return min(max(k, 1), d * d)


def interpolated_exponent(d: int, k: int) -> float:
    return 2 * d / (k + 2 * math.sqrt(k) + 1)


def _check_k(k: int, d: int):
    if not 1 <= k <= d * d:
        raise KOutOfRangeError(f"k={k} outside [1, {d * d}]")


def bound_report(T, criterion_id: str, k: int, p: float, *, report_tol=REPORT_TOL,
                 require_nonneg_det=True) -> CriterionReport:
    """Evaluate ``|det T| <= (prod_{i<=k} s_i)^p`` for a channel or its spectrum."""
    spec = channel_spectrum(T)
    _check_k(k, spec.dim)
    s = spec.singular_values
    flags = []
    if spec.degenerate:
        # a zero singular value makes every such bound hold trivially
        flags.append("degenerate")
        return CriterionReport(criterion_id, k, p, -math.inf, -math.inf, 0.0, SATISFIED, flags)
    lhs = spec.log_abs_det
    rhs = p * float(np.sum(np.log(s[:k])))
    margin = rhs - lhs
    verdict = SATISFIED
    if require_nonneg_det and spec.det_sign < 0 and math.exp(lhs) > report_tol:
        flags.append("negative_det")
        verdict = VIOLATED
    if margin < -report_tol:
        verdict = VIOLATED
    elif abs(margin) <= report_tol:
        flags.append("boundary")
    return CriterionReport(criterion_id, k, p, lhs, rhs, margin, verdict, flags)


def det_nonneg_criterion(T, *, report_tol=REPORT_TOL) -> CriterionReport:
    """``det T >= 0``.

    For this criterion ``margin`` is the signed determinant itself (so that
    Violated still means ``margin < -report_tol``); ``k = 0`` and ``p = 0``.
    """
    spec = channel_spectrum(T)
    lhs = spec.log_abs_det
    det = 0.0 if spec.degenerate else spec.det_sign * math.exp(lhs)
    flags = ["degenerate"] if spec.degenerate else []
    violated = spec.det_sign < 0 and abs(det) > report_tol
    if spec.det_sign < 0 and not violated:
        flags.append("boundary")
    return CriterionReport("DetNonNegative", 0, 0.0, lhs, lhs, det,
                           VIOLATED if violated else SATISFIED, flags)


def power_criterion(T, improved=False, *, report_tol=REPORT_TOL) -> CriterionReport:
    """``det T <= s_1(T)^p`` with ``p = d/2`` or the improved ``~0.610733 d``."""
    spec = channel_spectrum(T)
    d = spec.dim
    if improved:
        return bound_report(spec, "PowerSmallestSVImproved", 1, IMPROVED_POWER_FACTOR * d,
                            report_tol=report_tol)
    return bound_report(spec, "PowerSmallestSV", 1, d / 2, report_tol=report_tol)


def product_criterion(T, *, report_tol=REPORT_TOL) -> CriterionReport:
    """``0 <= det T <= s_1(T) ... s_k(T)`` with ``k = floor(2d - 2 sqrt(2d) + 1)``."""
    spec = channel_spectrum(T)
    return bound_report(spec, "ProductSmallestSV", product_k(spec.dim), 1.0, report_tol=report_tol)


def interpolated_criterion(T, k: int, *, report_tol=REPORT_TOL) -> CriterionReport:
    """``det T <= (s_1 ... s_k)^p`` with ``p = 2d / (k + 2 sqrt(k) + 1)``."""
    spec = channel_spectrum(T)
    _check_k(k, spec.dim)
    return bound_report(spec, f"Interpolated({k})", k, interpolated_exponent(spec.dim, k),
                        report_tol=report_tol)


def full_report(T, k_list: Sequence[int] = (), *, report_tol=REPORT_TOL) -> Certificate:
    """Run every quantum criterion; the order of ``reports`` is fixed."""
    spec = channel_spectrum(T)
    reports = [
        det_nonneg_criterion(spec, report_tol=report_tol),
        power_criterion(spec, report_tol=report_tol),
        power_criterion(spec, improved=True, report_tol=report_tol),
        product_criterion(spec, report_tol=report_tol),
    ]
    reports += [interpolated_criterion(spec, k, report_tol=report_tol) for k in sorted(set(k_list))]
    failing = any(r.violated for r in reports)
    conclusion = "NotInfinitesimalDivisible" if failing else "Inconclusive"
    digest = channel_hash(T) if not isinstance(T, ChannelSpectrum) else ""
    return Certificate(digest, reports, conclusion, report_tol)


def generator_spectral_condition(G, k: int, p: float) -> float:
    """Slack ``Tr[G + G*] - p * sum_{i<=k} lambda_i(G + G*)``; the condition holds iff <= 0."""
    M = G.matrix if isinstance(G, Superoperator) else as_square(G)
    n = M.shape[0]
    if not 1 <= k <= n:
        raise KOutOfRangeError(f"k={k} outside [1, {n}]")
    Hs = symmetrize(M)
    lam = hermitian_eigenvalues_ascending(Hs).values
    return float(np.trace(Hs).real - p * np.sum(lam[:k]))


def max_valid_exponent(T) -> float:
    """Largest ``p`` with ``det T <= s_1(T)^p``, i.e. ``ln det / ln s_1``.

    Returns ``inf`` when ``s_1 >= 1``; raises when ``det <= 0``.
    """
    spec = channel_spectrum(T)
    if spec.degenerate or spec.det_sign <= 0:
        raise DegenerateSpectrumError("determinant is not positive")
    s1 = spec.singular_values[0]
    if s1 >= 1.0:
        return math.inf
    return spec.log_abs_det / math.log(s1)


def appendix_g(x, y):
    """Row bound ``a_kk - r_k`` of the l2 Gershgorin estimate, ``||L||_F = 1``.

    ``x`` and ``y`` are moduli of two diagonal entries of the Lindbladian.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inner = (1 + np.minimum(x**2, y**2)) + 0.5 * (1 + x**2) * (1 + y**2) - 4 * x**2 * y**2
    return -2 * x * y - 1 - np.sqrt(inner)


def minimize_appendix_g(n_grid: int = 2001) -> tuple:
    """Minimize :func:`appendix_g` over the quarter unit disk.

    Returns ``(g_min, x, y)``.  A polar grid locates the basin; a bounded
    scalar search along the boundary and a Nelder-Mead polish in polar
    coordinates refine it.
    """
    from scipy.optimize import minimize, minimize_scalar

    r = np.linspace(0.0, 1.0, n_grid // 4 + 1)
    theta = np.linspace(0.0, np.pi / 2, n_grid)
    R, TH = np.meshgrid(r, theta, indexing="ij")
    vals = appendix_g(R * np.cos(TH), R * np.sin(TH))
    i, j = np.unravel_index(np.argmin(vals), vals.shape)

    def polar(z):
        rr = min(max(z[0], 0.0), 1.0)
        tt = min(max(z[1], 0.0), np.pi / 2)
        return float(appendix_g(rr * np.cos(tt), rr * np.sin(tt)))

    dt = theta[1] - theta[0]
    edge = minimize_scalar(lambda t: polar((1.0, t)), bounds=(max(theta[j] - dt, 0), min(theta[j] + dt, np.pi / 2)),
                           method="bounded", options={"xatol": 1e-12})
    best = min([(vals[i, j], (R[i, j], TH[i, j])), (edge.fun, (1.0, edge.x))], key=lambda t: t[0])
    res = minimize(polar, np.array(best[1]), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    if res.fun < best[0]:
        best = (res.fun, tuple(res.x))
    rr, tt = min(max(best[1][0], 0.0), 1.0), min(max(best[1][1], 0.0), np.pi / 2)
    return float(best[0]), float(rr * np.cos(tt)), float(rr * np.sin(tt))
