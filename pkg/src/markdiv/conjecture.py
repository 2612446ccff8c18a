"""
Numerical exploration of the top-k AM/GM matrix inequality.

For a probability vector ``p`` set ``a_ij = (p_i + p_j)/2`` and
``g_ij = sqrt(p_i p_j)``; ``A`` and ``G`` are the sums of the ``k`` largest
entries of the full d x d matrices (``(i, j)`` and ``(j, i)`` count
separately).  The question is the largest ``k`` with ``A + G <= d`` on the
whole simplex.  Everything here is a lower bound on the true maximum from a
finite search, so results are labeled EMPIRICAL.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DimTooSmallError, KOutOfRangeError

__all__ = [
    "SLACK_TOL",
    "AmGmInstance",
    "ConjectureTable",
    "project_simplex",
    "am_gm_value",
    "structured_candidates",
    "maximize_A_plus_G",
    "empirical_h",
]

SLACK_TOL = 1e-7
LABEL = "EMPIRICAL"
_MEANS = ("sum", "arithmetic", "geometric")


@dataclass
class AmGmInstance:
    d: int
    k: int
    A: float
    G: float
    argmax_p: np.ndarray
    objective: str = "sum"

    @property
    def value(self) -> float:
        return {"sum": self.A + self.G, "arithmetic": self.A, "geometric": self.G}[self.objective]


@dataclass
class ConjectureTable:
    d: int
    h_emp: int
    rows: list
    restarts: int
    seed: int
    max_iters: int
    slack_tol: float = SLACK_TOL
    label: str = LABEL
    inconclusive: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "max_A", "max_G", "max_A_plus_G", "argmax_p"])
        for r in self.rows:
            w.writerow([r.k, repr(r.A), repr(r.G), repr(r.A + r.G),
                        json.dumps([float(x) for x in r.argmax_p])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "d": self.d,
            "h_emp": self.h_emp,
            "slack_tol": self.slack_tol,
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "seed": self.seed,
            "inconclusive": self.inconclusive,
            "rows": [{"k": r.k, "max_A": r.A, "max_G": r.G, "max_A_plus_G": r.A + r.G,
                      "argmax_p": [float(x) for x in r.argmax_p]} for r in self.rows],
        }


def project_simplex(x) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    x = np.asarray(x, dtype=float)
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, x.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(x - theta, 0.0)


def _top_k_sum(M: np.ndarray, k: int) -> float:
    flat = M.ravel()
    if k >= flat.size:
        return float(flat.sum())
    return float(np.partition(flat, flat.size - k)[flat.size - k:].sum())


def am_gm_value(p, k: int) -> tuple:
    """``(A, G)``: sums of the ``k`` largest entries of the mean matrices."""
    p = np.asarray(p, dtype=float)
    d = p.size
    if not 1 <= k <= d * d:
        raise KOutOfRangeError(f"k={k} outside [1, {d * d}]")
    a = 0.5 * (p[:, None] + p[None, :])
    g = np.sqrt(np.outer(p, p))
    return _top_k_sum(a, k), _top_k_sum(g, k)


def _objective_value(p, k, mean):
    A, G = am_gm_value(p, k)
    return {"sum": A + G, "arithmetic": A, "geometric": G}[mean]


def structured_candidates(d: int) -> list:
    """Uniform distributions on ``m = 1 .. d`` atoms."""
    out = []
    for m in range(1, d + 1):
        p = np.zeros(d)
        p[:m] = 1.0 / m
        out.append(p)
    return out


def _local_search(x0, k, mean, max_iters):
    def f(x):
        return -_objective_value(project_simplex(x), k, mean)

    res = minimize(f, x0, method="Nelder-Mead",
                   options={"maxiter": max_iters, "xatol": 1e-11, "fatol": 1e-14, "adaptive": True})
    p = project_simplex(res.x)
    return _objective_value(p, k, mean), p


def maximize_A_plus_G(d: int, k: int, restarts: int = 64, seed: int = 0, *,
                      max_iters: int = 2000, mean: str = "sum",
                      warm_starts=()) -> AmGmInstance:
    """Maximize ``A + G`` (or ``A`` or ``G`` alone) over the simplex.

    Structured candidates are evaluated and refined first; then ``restarts``
    Dirichlet starting points (with random sparsity) are refined by a
    Nelder-Mead search on ``project_simplex(x)``.  Ties keep the earliest
    candidate, so the result is deterministic per seed.
    """
    if d < 1:
        raise DimTooSmallError("d must be positive")
    if not 1 <= k <= d * d:
        raise KOutOfRangeError(f"k={k} outside [1, {d * d}]")
    if mean not in _MEANS:
        raise ValueError(f"mean must be one of {_MEANS}")
    rng = np.random.default_rng(seed)

    best_val, best_p = -math.inf, None

    def consider(val, p):
        nonlocal best_val, best_p
        if val > best_val:
            best_val, best_p = val, p

    starts = [np.asarray(w, dtype=float) for w in warm_starts] + structured_candidates(d)
    for p in starts:
        consider(_objective_value(p, k, mean), p)
        consider(*_local_search(p, k, mean, max_iters))
    for _ in range(restarts):
        alpha = rng.choice([0.2, 0.5, 1.0, 3.0])
        p0 = rng.dirichlet(np.full(d, alpha))
        mask = rng.random(d) < rng.uniform(0.3, 1.0)
        if mask.any():
            p0 = p0 * mask
            p0 /= p0.sum()
        consider(*_local_search(p0, k, mean, max_iters))

    A, G = am_gm_value(best_p, k)
    return AmGmInstance(d, k, A, G, best_p, mean)


def empirical_h(d: int, restarts: int = 64, seed: int = 0, *, max_iters: int = 2000,
                slack_tol: float = SLACK_TOL, k_max: int = None) -> tuple:
    """Largest ``k`` with empirical ``max(A + G) <= d + slack_tol``.

    Every ``k`` from 1 to ``k_max`` (default ``2d - 2``) is searched, each
    warm-started from the maximizers of the previous ``k``.  Because the
    maximum is non-decreasing in ``k``, the first exceedance ends the count.
    Returns ``(h_emp, ConjectureTable)``.
    """
    if d < 3:
        raise DimTooSmallError("d must be at least 3")
    k_max = 2 * d - 2 if k_max is None else min(k_max, d * d)
    ss = np.random.SeedSequence(seed)
    rows, warm = [], []
    for k, child in zip(range(1, k_max + 1), ss.spawn(k_max)):
        inst = maximize_A_plus_G(d, k, restarts, int(child.generate_state(1)[0]),
                                 max_iters=max_iters, warm_starts=warm)
        if rows and rows[-1].A + rows[-1].G > inst.A + inst.G:
            # monotonicity in k: the previous maximizer is still feasible
            A, G = am_gm_value(rows[-1].argmax_p, k)
            if A + G > inst.A + inst.G:
                inst = AmGmInstance(d, k, A, G, rows[-1].argmax_p)
        rows.append(inst)
        warm = [r.argmax_p for r in rows[-3:]]
    h_emp = 0
    for r in rows:
        if r.A + r.G <= d + slack_tol:
            h_emp = r.k
        else:
            break
    inconclusive = [r.k for r in rows if abs(r.A + r.G - d) <= slack_tol]
    table = ConjectureTable(d, h_emp, rows, restarts, seed, max_iters, slack_tol, LABEL, inconclusive)
    return h_emp, table
