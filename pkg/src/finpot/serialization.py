"""Operator file format: parse, validate, canonical serialization.

Schema (version "1"):

    {"schema_version": "1",
     "operator": {
        "ambient": "infinite" | {"finite": n},
        "cutoff": N,
        "block": [[ [re, im], ... ] ...],          # row-major, N x N
        "rank_one": [{"left": HV, "right": HV}, ...]}}

    HV   = {"finite": {"<index>": [re, im], ...}, "tails": [TAIL, ...]}
    TAIL = {"kind": "power", "coeff": [re, im], "exponent": p, "start": s}
         | {"kind": "geometric", "coeff": [re, im], "ratio": [re, im], "start": s}

Real numbers are accepted as binary64 or as decimal strings.  Serialization
is canonical: finite-support keys are sorted numerically, tail lists keep
their order, floats use ``repr``.  Parsing a written file reproduces the
operator exactly.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import MalformedFile
from .operators import RankOneTerm, StructuredOperator, validate
from .sequences import GeometricTail, PowerTail, TailSequence
from .vectors import HVector

__all__ = [
    "SCHEMA_VERSION",
    "operator_to_obj",
    "operator_from_obj",
    "canonical_json",
    "op_fingerprint",
    "save_operator",
    "load_operator",
]

SCHEMA_VERSION = "1"


# -- encoding ------------------------------------------------------------------


def _enc_c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _enc_tail(t: TailSequence) -> dict:
    if isinstance(t, PowerTail):
        return {"kind": "power", "coeff": _enc_c(t.coeff),
                "exponent": float(t.exponent), "start": t.start}
    return {"kind": "geometric", "coeff": _enc_c(t.coeff),
            "ratio": _enc_c(t.ratio), "start": t.start}


def _enc_hvec(v: HVector) -> dict:
    finite = {str(j): _enc_c(v.finite[j]) for j in sorted(v.finite)}
    return {"finite": finite, "tails": [_enc_tail(t) for t in v.tails]}


def operator_to_obj(op: StructuredOperator) -> dict:
    ambient = "infinite" if op.ambient is None else {"finite": op.ambient}
    block = [[_enc_c(op.block[i, j]) for j in range(op.cutoff)]
             for i in range(op.cutoff)]
    return {
        "schema_version": SCHEMA_VERSION,
        "operator": {
            "ambient": ambient,
            "cutoff": op.cutoff,
            "block": block,
            "rank_one": [{"left": _enc_hvec(t.left), "right": _enc_hvec(t.right)}
                         for t in op.terms],
        },
    }


def canonical_json(op: StructuredOperator) -> str:
    return json.dumps(operator_to_obj(op), sort_keys=True, separators=(",", ":"))


def op_fingerprint(op: StructuredOperator) -> str:
    return hashlib.sha256(canonical_json(op).encode()).hexdigest()[:16]


def save_operator(op: StructuredOperator, path) -> None:
    Path(path).write_text(json.dumps(operator_to_obj(op), indent=1) + "\n")


# -- decoding ------------------------------------------------------------------


def _real(obj, where: str) -> float:
    if isinstance(obj, bool):
        raise MalformedFile(where, "expected a real number")
    if isinstance(obj, (int, float)):
        return float(obj)
    if isinstance(obj, str):
        try:
            return float(obj)
        except ValueError:
            raise MalformedFile(where, f"not a decimal string: {obj!r}") from None
    raise MalformedFile(where, f"expected number or decimal string, got {type(obj).__name__}")


def _dec_c(obj, where: str) -> complex:
    if not isinstance(obj, list) or len(obj) != 2:
        raise MalformedFile(where, "complex values are [re, im] pairs")
    return complex(_real(obj[0], where + "[0]"), _real(obj[1], where + "[1]"))


def _int(obj, where: str, minimum: int = 1) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise MalformedFile(where, "expected an integer")
    if obj < minimum:
        raise MalformedFile(where, f"must be >= {minimum}")
    return obj


def _dec_tail(obj, where: str) -> TailSequence:
    if not isinstance(obj, dict):
        raise MalformedFile(where, "tail must be an object")
    kind = obj.get("kind")
    try:
        if kind == "power":
            return PowerTail(_dec_c(obj["coeff"], where + ".coeff"),
                             _real(obj["exponent"], where + ".exponent"),
                             _int(obj["start"], where + ".start"))
        if kind == "geometric":
            return GeometricTail(_dec_c(obj["coeff"], where + ".coeff"),
                                 _dec_c(obj["ratio"], where + ".ratio"),
                                 _int(obj["start"], where + ".start"))
    except KeyError as exc:
        raise MalformedFile(where, f"missing field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise MalformedFile(where, str(exc)) from None
    raise MalformedFile(where + ".kind", f"unknown tail kind {kind!r}")


def _dec_hvec(obj, where: str) -> HVector:
    if not isinstance(obj, dict):
        raise MalformedFile(where, "vector must be an object")
    finite = {}
    raw = obj.get("finite", {})
    if not isinstance(raw, dict):
        raise MalformedFile(where + ".finite", "must be an object")
    for key, val in raw.items():
        try:
            j = int(key)
        except ValueError:
            raise MalformedFile(where + f".finite[{key!r}]",
                                "keys are decimal indices") from None
        if j < 1:
            raise MalformedFile(where + f".finite[{key!r}]", "indices are 1-based")
        finite[j] = _dec_c(val, where + f".finite[{key!r}]")
    tails_raw = obj.get("tails", [])
    if not isinstance(tails_raw, list):
        raise MalformedFile(where + ".tails", "must be a list")
    tails = tuple(_dec_tail(t, where + f".tails[{i}]") for i, t in enumerate(tails_raw))
    try:
        return HVector(finite, tails)
    except ValueError as exc:
        raise MalformedFile(where, str(exc)) from None


def operator_from_obj(obj) -> StructuredOperator:
    """Decode and validate; raises MalformedFile or an OpValidationError."""
    if not isinstance(obj, dict):
        raise MalformedFile("$", "top level must be an object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise MalformedFile("$.schema_version", f"unsupported version {version!r}")
    spec = obj.get("operator")
    if not isinstance(spec, dict):
        raise MalformedFile("$.operator", "missing operator object")
    amb = spec.get("ambient", "infinite")
    if amb == "infinite":
        ambient = None
    elif isinstance(amb, dict) and set(amb) == {"finite"}:
        ambient = _int(amb["finite"], "$.operator.ambient.finite")
    else:
        raise MalformedFile("$.operator.ambient",
                            'expected "infinite" or {"finite": n}')
    cutoff = _int(spec.get("cutoff"), "$.operator.cutoff")
    block_raw = spec.get("block")
    if not isinstance(block_raw, list) or len(block_raw) != cutoff:
        raise MalformedFile("$.operator.block", f"expected {cutoff} rows")
    block = []
    for i, row in enumerate(block_raw):
        if not isinstance(row, list) or len(row) != cutoff:
            raise MalformedFile(f"$.operator.block[{i}]", f"expected {cutoff} entries")
        block.append([_dec_c(x, f"$.operator.block[{i}][{j}]")
                      for j, x in enumerate(row)])
    terms = []
    terms_raw = spec.get("rank_one", [])
    if not isinstance(terms_raw, list):
        raise MalformedFile("$.operator.rank_one", "must be a list")
    for i, t in enumerate(terms_raw):
        if not isinstance(t, dict):
            raise MalformedFile(f"$.operator.rank_one[{i}]", "term must be an object")
        terms.append(RankOneTerm(
            _dec_hvec(t.get("left"), f"$.operator.rank_one[{i}].left"),
            _dec_hvec(t.get("right"), f"$.operator.rank_one[{i}].right"),
        ))
    return validate(StructuredOperator(block, tuple(terms), ambient))


def load_operator(path) -> StructuredOperator:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return operator_from_obj(obj)
