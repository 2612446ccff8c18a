import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from markdiv.cli import main
from markdiv.errors import ParseError
from markdiv.io import (
    channel_document,
    document_to_stochastic,
    document_to_superop,
    load_document,
)
from markdiv.sampling import random_lindblad_generator, random_stinespring_channel
from markdiv.stochastic import counterexample_matrix
from markdiv.superop import (
    choi_matrix,
    identity_superop,
    kraus_superoperator,
    lindblad_superoperator,
    transpose_superop,
)
from markdiv.matcore import matrix_exp


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, doc):
    f = tmp_path / name
    f.write_text(json.dumps(doc))
    return str(f)


# --- documents ------------------------------------------------------------------

@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_superop_document_round_trip_is_exact(d, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
    text = json.dumps(channel_document(M))
    assert np.array_equal(document_to_superop(json.loads(text)).matrix, M)


def test_choi_document_round_trip(rng):
    T = random_stinespring_channel(2, rng)
    doc = json.loads(json.dumps(channel_document(T, kind="choi")))
    assert np.allclose(document_to_superop(doc).matrix, T.matrix, atol=1e-15, rtol=0)


def test_kraus_and_lindblad_documents(rng):
    K = [np.eye(2) / np.sqrt(2), np.array([[0, 1], [1, 0]]) / np.sqrt(2)]
    doc = {"dim": 2, "kind": "kraus", "data": [[[[x.real, x.imag] for x in row] for row in k] for k in K]}
    assert np.allclose(document_to_superop(doc).matrix, kraus_superoperator(K).matrix)
    gen = random_lindblad_generator(2, rng)
    enc = lambda M: [[[z.real, z.imag] for z in row] for row in np.asarray(M, dtype=complex)]
    doc = {"dim": 2, "kind": "lindblad",
           "data": {"hamiltonian": enc(gen.hamiltonian), "lindbladians": [enc(L) for L in gen.lindbladians]}}
    assert np.allclose(document_to_superop(doc).matrix, matrix_exp(lindblad_superoperator(gen).matrix))


def test_gellmann_and_plain_number_documents():
    doc = {"dim": 2, "kind": "gellmann_diag", "data": [1, 0.5, 0.5, 0.5]}
    M = document_to_superop(doc).matrix
    assert np.allclose(choi_matrix(M).trace(), 2)
    doc = {"dim": 1, "kind": "superop_vec", "data": [[1]]}
    assert document_to_superop(doc).matrix[0, 0] == 1


def test_classical_documents():
    Q = counterexample_matrix(3)
    S = document_to_stochastic({"dim": 3, "kind": "transition_rate", "data": Q.tolist()})
    assert np.allclose(S.sum(axis=1), 1)
    with pytest.raises(ParseError):
        document_to_stochastic({"dim": 2, "kind": "stochastic", "data": [[0.5, 0.6], [0, 1]]})


@pytest.mark.parametrize("doc", [
    {"dim": 2, "kind": "nope", "data": []},
    {"dim": 2, "data": []},
    {"dim": 2, "kind": "superop_vec", "data": [[1, 2], [3]]},
    {"dim": 2, "kind": "superop_vec", "data": [[1, 0], [0, 1]]},
    {"dim": 2, "kind": "superop_vec", "data": [[[1, 2, 3]] * 4] * 4},
    {"dim": 2, "kind": "gellmann_diag", "data": [0.5, 1, 1, 1]},
])
def test_bad_documents(doc):
    with pytest.raises(ParseError):
        document_to_superop(doc)


def test_load_document_unwraps_channel_key():
    inner = channel_document(identity_superop(2))
    assert load_document({"example": "x", "channel": inner}) == inner


# --- analyze ------------------------------------------------------------------------

def test_analyze_identity_exit_0(tmp_path, capsys):
    f = write(tmp_path, "id.json", channel_document(identity_superop(2)))
    code, out, _ = run(["analyze", "--input", f], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["conclusion"] == "Inconclusive" and data["seed"] == 0


def test_analyze_transpose_exit_3(tmp_path, capsys):
    f = write(tmp_path, "t.json", channel_document(transpose_superop(2)))
    code, out, err = run(["analyze", "--input", f, "--no-cptp-check"], capsys)
    assert code == 3
    failing = [r["criterion_id"] for r in json.loads(out)["failing_criteria"]]
    assert "DetNonNegative" in failing
    assert "not CPTP" in err


def test_analyze_rejects_non_channel_without_flag(tmp_path, capsys):
    f = write(tmp_path, "t.json", channel_document(transpose_superop(2)))
    code, _, err = run(["analyze", "--input", f], capsys)
    assert code == 1 and "CPTP" in err


def test_analyze_parse_errors(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    assert run(["analyze", "--input", str(f)], capsys)[0] == 1
    assert run(["analyze", "--input", str(tmp_path / "missing.json")], capsys)[0] == 1
    assert run(["analyze"], capsys)[0] == 1


def test_perturbed_boundary_example_reanalyzes_to_violation(tmp_path, capsys):
    out_file = tmp_path / "ex.json"
    code, _, _ = run(["examples", "perturbed-boundary", "--dim", "4", "--output", str(out_file)], capsys)
    assert code == 0
    code, out, _ = run(["analyze", "--input", str(out_file)], capsys)
    assert code == 3
    failing = [r["criterion_id"] for r in json.loads(out)["failing_criteria"]]
    assert "PowerSmallestSV" in failing


def test_analyze_k_list_and_csv(tmp_path, capsys):
    f = write(tmp_path, "id.json", channel_document(identity_superop(2)))
    code, out, _ = run(["analyze", "--input", f, "--k", "2,3", "--k", "4", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("criterion_id,k,p")
    assert [l.split(",")[0] for l in lines[-3:]] == ["Interpolated(2)", "Interpolated(3)", "Interpolated(4)"]


def test_analyze_classical_document(tmp_path, capsys):
    Q = counterexample_matrix(3)
    f = write(tmp_path, "q.json", {"dim": 3, "kind": "transition_rate", "data": Q.tolist()})
    code, out, _ = run(["analyze", "--input", f, "--c", "0.5"], capsys)
    assert code == 3
    assert json.loads(out)["reports"][0]["criterion_id"] == "ClassicalPower(0.5)"


# --- examples -------------------------------------------------------------------

def test_examples_nilpotent(capsys):
    code, out, _ = run(["examples", "nilpotent", "--dim", "3"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["checks"]["singular_values"]["max_deviation"] <= 1e-10
    assert data["checks"]["symmetrized_generator_eigenvalues"]["match"]


def test_examples_stochastic_counterexample(capsys):
    code, out, _ = run(["examples", "stochastic-counterexample", "--dim", "4"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["checks"]["det_exceeds_all_partial_products"]["computed"] is True
    assert set(data["partial_products"]) == {"1", "2", "3"}


def test_examples_gellmann_boundary(capsys):
    code, out, _ = run(["examples", "gellmann-boundary", "--dim", "2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["epsilon_max"] == pytest.approx(0.5, abs=1e-9)
    assert data["channel"]["kind"] == "superop_vec"


def test_examples_normal_diag(capsys):
    assert run(["examples", "normal-diag", "--dim", "3"], capsys)[0] == 0


def test_examples_usage_errors(capsys):
    assert run(["examples", "nope", "--dim", "3"], capsys)[0] == 1
    assert run(["examples", "nilpotent"], capsys)[0] == 1
    assert run(["examples", "nilpotent", "--dim", "1"], capsys)[0] == 1


def test_emitted_channel_round_trips(tmp_path, capsys):
    out_file = tmp_path / "ex.json"
    run(["examples", "nilpotent", "--dim", "2", "-o", str(out_file)], capsys)
    doc = json.loads(out_file.read_text())
    M = document_to_superop(doc).matrix
    again = document_to_superop(json.loads(json.dumps(channel_document(M)))).matrix
    assert np.max(np.abs(M - again)) <= 1e-15


# --- search / conjecture --------------------------------------------------------

def test_search_is_byte_identical_per_seed(capsys):
    argv = ["search", "--dim", "2", "--k", "2", "--restarts", "2", "--seed", "5"]
    code1, out1, _ = run(argv, capsys)
    code2, out2, _ = run(argv, capsys)
    assert code1 == code2 == 0 and out1 == out2
    data = json.loads(out1)
    assert data["violated"] is False and data["seed"] == 5


def test_seed_falls_back_to_environment(monkeypatch, capsys):
    monkeypatch.setenv("MARKDIV_SEED", "11")
    _, out, _ = run(["search", "--dim", "2", "--k", "1", "--restarts", "1"], capsys)
    assert json.loads(out)["seed"] == 11
    monkeypatch.setenv("MARKDIV_SEED", "x")
    assert run(["search", "--dim", "2", "--restarts", "1"], capsys)[0] == 1


def test_conjecture_csv(capsys):
    code, out, _ = run(["conjecture", "--dim", "3", "--restarts", "2", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# EMPIRICAL d=3") and "seed=0" in lines[0]
    assert lines[1] == "k,max_A,max_G,max_A_plus_G,argmax_p"
    assert len(lines) == 2 + 4


def test_conjecture_json(capsys):
    code, out, _ = run(["conjecture", "--dim", "3", "--restarts", "2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["label"] == "EMPIRICAL" and data["seed"] == 0
