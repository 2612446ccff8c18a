import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from markdiv.conjecture import (
    am_gm_value,
    empirical_h,
    maximize_A_plus_G,
    project_simplex,
    structured_candidates,
)
from markdiv.errors import DimTooSmallError, KOutOfRangeError
from markdiv.matcore import ky_fan_norm
from markdiv.sampling import random_lindbladian

import oracles


def simplex_points(d):
    return st.lists(st.floats(0, 1), min_size=d, max_size=d).filter(lambda v: sum(v) > 1e-6).map(
        lambda v: np.array(v) / sum(v))


@given(st.integers(2, 6).flatmap(simplex_points), st.integers(1, 36))
def test_am_gm_matches_bruteforce(p, k):
    d = p.size
    k = min(k, d * d)
    a = np.array([[(pi + pj) / 2 for pj in p] for pi in p])
    g = np.array([[np.sqrt(pi * pj) for pj in p] for pi in p])
    A, G = am_gm_value(p, k)
    assert A == pytest.approx(oracles.top_k_bruteforce(a, k), abs=1e-12)
    assert G == pytest.approx(oracles.top_k_bruteforce(g, k), abs=1e-12)
    assert A >= G - 1e-12


def test_am_gm_examples():
    assert am_gm_value(np.full(4, 0.25), 5) == (pytest.approx(1.25), pytest.approx(1.25))
    assert am_gm_value(np.eye(3)[0], 1) == (1.0, 1.0)
    assert am_gm_value([0.5, 0.5, 0, 0], 3) == (pytest.approx(1.5), pytest.approx(1.5))


def test_am_gm_k_range():
    with pytest.raises(KOutOfRangeError):
        am_gm_value([0.5, 0.5], 5)
    with pytest.raises(KOutOfRangeError):
        am_gm_value([0.5, 0.5], 0)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8))
def test_projection_matches_bisection_oracle(x):
    p = project_simplex(x)
    assert p.min() >= 0 and p.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(p, oracles.project_simplex_bisection(x), atol=1e-9)


def test_projection_fixes_simplex_points():
    p = np.array([0.2, 0.3, 0.5])
    assert np.allclose(project_simplex(p), p)


def test_structured_candidates():
    c = structured_candidates(3)
    assert len(c) == 3 and all(v.sum() == pytest.approx(1) for v in c)


def test_k1_maximum_is_two():
    inst = maximize_A_plus_G(4, 1, restarts=4, seed=0)
    assert inst.A + inst.G == pytest.approx(2.0, abs=1e-9)


def test_arithmetic_anchor_value_at_2d_minus_2():
    # top-(2d-2) of the arithmetic matrix is maximized at a vertex; the value is d - 1/2
    for d in (4, 5):
        inst = maximize_A_plus_G(d, 2 * d - 2, restarts=8, seed=1, mean="arithmetic")
        assert inst.A == pytest.approx(d - 0.5, abs=1e-7)
        inst = maximize_A_plus_G(d, 2 * d - 1, restarts=8, seed=1, mean="arithmetic")
        assert inst.A == pytest.approx(d, abs=1e-7)


def test_geometric_anchor():
    inst = maximize_A_plus_G(4, 16, restarts=8, seed=0, mean="geometric")
    assert inst.G == pytest.approx(4.0, abs=1e-7)


def test_maximize_is_deterministic():
    a = maximize_A_plus_G(4, 3, restarts=6, seed=3)
    b = maximize_A_plus_G(4, 3, restarts=6, seed=3)
    assert np.array_equal(a.argmax_p, b.argmax_p) and a.A == b.A


def test_search_dominates_structured_candidates():
    d, k = 5, 6
    best_structured = max(sum(am_gm_value(p, k)) for p in structured_candidates(d))
    inst = maximize_A_plus_G(d, k, restarts=8, seed=0)
    assert inst.A + inst.G >= best_structured - 1e-12


def test_empirical_h_table_and_monotonicity():
    h, table = empirical_h(4, restarts=8, seed=0)
    values = [r.A + r.G for r in table.rows]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert table.label == "EMPIRICAL"
    assert h >= 3
    rows = list(csv.reader(io.StringIO(table.to_csv())))
    assert rows[0] == ["k", "max_A", "max_G", "max_A_plus_G", "argmax_p"]
    assert len(json.loads(rows[1][4])) == 4
    with pytest.raises(DimTooSmallError):
        empirical_h(2)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_connection_with_lindbladian_singular_values(d, rng):
    L = random_lindbladian(d, rng, frobenius=1.0)
    p = np.linalg.svd(L, compute_uv=False) ** 2
    LdL = L.conj().T @ L
    M = np.kron(np.eye(d), LdL) + np.kron(LdL.conj(), np.eye(d))
    for k in range(1, d * d + 1):
        A, _ = am_gm_value(p, k)
        assert ky_fan_norm(M, k) == pytest.approx(2 * A, abs=1e-10)
