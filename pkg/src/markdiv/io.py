"""
JSON matrix documents shared by the CLI, scripts and tests.

A document is ``{"dim": d, "kind": ..., "data": ...}`` with complex scalars
written as ``[re, im]`` pairs (plain numbers are accepted on input).  Kinds:

``superop_vec``     d^2 x d^2 matrix in the column-stacking vec basis
``choi``            d^2 x d^2 unnormalized Choi matrix
``kraus``           list of d x d Kraus operators
``lindblad``        ``{"hamiltonian": M, "lindbladians": [M, ...]}``; the
                    document describes the channel ``e^L``
``gellmann_diag``   d^2 real numbers, diagonal in the Gell-Mann basis
``stochastic``      real d x d row-stochastic matrix
``transition_rate`` real d x d rate matrix; describes ``e^Q``

Floats are written with ``repr`` so every value re-parses bit for bit.
"""

import json
import math

import numpy as np

from .errors import DimensionMismatchError, MarkdivError, ParseError
from .superop import (
    LindbladGenerator,
    QuantumChannel,
    Superoperator,
    channel_from_gellmann_diag,
    kraus_superoperator,
    lindblad_superoperator,
    superop_from_choi,
)
from .matcore import matrix_exp

__all__ = [
    "QUANTUM_KINDS",
    "CLASSICAL_KINDS",
    "encode_matrix",
    "decode_matrix",
    "channel_document",
    "stochastic_document",
    "load_document",
    "document_to_superop",
    "document_to_stochastic",
    "dumps",
]

QUANTUM_KINDS = ("kraus", "lindblad", "superop_vec", "choi", "gellmann_diag")
CLASSICAL_KINDS = ("stochastic", "transition_rate")


def _encode_scalar(z):
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[_encode_scalar(z) for z in row] for row in M]


def _decode_scalar(x):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ParseError(f"bad scalar {x!r}; expected a number or [re, im]")


def decode_matrix(rows, shape=None) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError("matrix must be a non-empty list of rows")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ParseError("ragged matrix rows")
    M = np.array([[_decode_scalar(x) for x in r] for r in rows], dtype=complex)
    if shape is not None and M.shape != tuple(shape):
        raise ParseError(f"matrix has shape {M.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(M)):
        raise ParseError("matrix has non-finite entries")
    return M


def channel_document(T, kind: str = "superop_vec", **extra) -> dict:
    """Serialize a superoperator/channel as ``superop_vec`` (default) or ``choi``."""
    from .superop import choi_matrix

    S = T.superop if isinstance(T, QuantumChannel) else T
    if not isinstance(S, Superoperator):
        S = Superoperator.from_matrix(S)
    if kind == "superop_vec":
        data = encode_matrix(S.matrix)
    elif kind == "choi":
        data = encode_matrix(choi_matrix(S))
    else:
        raise ValueError(f"cannot serialize a superoperator as {kind!r}")
    doc = {"dim": S.dim, "kind": kind, "data": data}
    doc.update(extra)
    return doc


def stochastic_document(S, kind: str = "stochastic", **extra) -> dict:
    S = np.asarray(S, dtype=float)
    doc = {"dim": S.shape[0], "kind": kind, "data": [[float(x) for x in row] for row in S]}
    doc.update(extra)
    return doc


def load_document(source) -> dict:
    """Parse a JSON document from a path, a JSON string or a dict.

    An object carrying a ``"channel"`` key (as written by ``examples``) is
    unwrapped to that entry.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = source
        if not str(source).lstrip().startswith("{"):
            try:
                with open(source) as fh:
                    text = fh.read()
            except OSError as exc:
                raise ParseError(f"cannot read {source}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if isinstance(doc, dict) and "channel" in doc and isinstance(doc["channel"], dict):
        doc = doc["channel"]
    if not isinstance(doc, dict) or not {"dim", "kind", "data"} <= doc.keys():
        raise ParseError('document needs "dim", "kind" and "data"')
    if not isinstance(doc["dim"], int) or doc["dim"] < 1:
        raise ParseError(f"bad dim {doc['dim']!r}")
    if doc["kind"] not in QUANTUM_KINDS + CLASSICAL_KINDS:
        raise ParseError(f"unknown kind {doc['kind']!r}")
    return doc


def document_to_superop(doc) -> Superoperator:
    """Superoperator described by a quantum document (no CPTP check)."""
    doc = load_document(doc)
    d, kind, data = doc["dim"], doc["kind"], doc["data"]
    n = d * d
    try:
        if kind == "superop_vec":
            return Superoperator(d, decode_matrix(data, (n, n)))
        if kind == "choi":
            return superop_from_choi(decode_matrix(data, (n, n)), d)
        if kind == "kraus":
            if not isinstance(data, list) or not data:
                raise ParseError("kraus data must be a non-empty list of matrices")
            return kraus_superoperator([decode_matrix(K, (d, d)) for K in data])
        if kind == "lindblad":
            if not isinstance(data, dict):
                raise ParseError('lindblad data must be {"hamiltonian", "lindbladians"}')
            H = decode_matrix(data["hamiltonian"], (d, d)) if "hamiltonian" in data else np.zeros((d, d))
            Ls = tuple(decode_matrix(L, (d, d)) for L in data.get("lindbladians", []))
            S = lindblad_superoperator(LindbladGenerator(H, Ls))
            return Superoperator(d, matrix_exp(S.matrix))
        if kind == "gellmann_diag":
            diag = np.array([_decode_scalar(x) for x in data])
            if diag.shape != (n,) or np.any(diag.imag != 0):
                raise ParseError(f"gellmann_diag needs {n} real numbers")
            return channel_from_gellmann_diag(d, diag.real).superop
    except ParseError:
        raise
    except (MarkdivError, DimensionMismatchError, KeyError, TypeError) as exc:
        raise ParseError(f"invalid {kind} document: {exc}") from exc
    raise ParseError(f"{kind!r} is not a quantum document")


def document_to_stochastic(doc) -> np.ndarray:
    """Real stochastic matrix from a classical document (``e^Q`` for rates)."""
    from .stochastic import as_rate_matrix, as_stochastic

    doc = load_document(doc)
    if doc["kind"] not in CLASSICAL_KINDS:
        raise ParseError(f"{doc['kind']!r} is not a classical document")
    M = decode_matrix(doc["data"], (doc["dim"], doc["dim"]))
    if np.any(M.imag != 0):
        raise ParseError("classical matrices must be real")
    try:
        if doc["kind"] == "transition_rate":
            return matrix_exp(as_rate_matrix(M.real)).real
        return as_stochastic(M.real)
    except MarkdivError as exc:
        raise ParseError(str(exc)) from exc


def _clean(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj, indent=2) -> str:
    """JSON text with non-finite floats spelled as strings."""
    return json.dumps(_clean(obj), indent=indent, allow_nan=False)
