"""JSON document format for states, observables, kernels, instruments and bases.

A document looks like::

    {"dim": 2,
     "entities": {
        "rho": {"type": "state", "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]},
        "Q":   {"type": "observable", "outcomes": ["0", "1"], "effects": [M0, M1]},
        "K":   {"type": "stochastic_matrix", "from": [...], "to": [...], "entries": [[...]]},
        "I":   {"type": "instrument", "outcomes": [...], "kraus": [[M, ...], ...]},
        "F":   {"type": "basis", "vectors": [v0, v1]},
        "sys": {"type": "dynamical_system", "hamiltonian": M, "initial": v, "times": [...]}}}

Complex numbers are ``[re, im]`` pairs, matrices are row-major nested lists.
A state may give ``"vector"`` instead of ``"matrix"`` for a pure state.
Floats are written with ``repr`` precision so a write/read cycle is exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import NameNotFound, ParseError, PovmError, ValidationError
from .instruments import Instrument, Operation
from .linalg import DEFAULT_TOL, Tolerance
from .measures import OutcomeSpace, StochasticMatrix
from .quantum import DynamicalSystem, Observable, State

ENTITY_TYPES = ("state", "observable", "stochastic_matrix", "instrument", "basis", "dynamical_system")


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).ravel()]


def encode_matrix(m) -> list:
    return [encode_vector(row) for row in np.asarray(m)]


def decode_vector(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParseError(f"expected a list of [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def decode_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError(f"expected rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_entity(obj) -> dict:
    """JSON-ready dict for any supported entity."""
    if isinstance(obj, State):
        return {"type": "state", "matrix": encode_matrix(obj.matrix)}
    if isinstance(obj, Observable):
        return {
            "type": "observable",
            "outcomes": list(obj.space.labels),
            "effects": [encode_matrix(e) for e in obj.effects],
        }
    if isinstance(obj, StochasticMatrix):
        return {
            "type": "stochastic_matrix",
            "from": list(obj.source.labels),
            "to": list(obj.target.labels),
            "entries": obj.entries.tolist(),
        }
    if isinstance(obj, Instrument):
        return {
            "type": "instrument",
            "outcomes": list(obj.space.labels),
            "kraus": [[encode_matrix(k) for k in op.kraus] for op in obj.ops],
        }
    if isinstance(obj, DynamicalSystem):
        return {
            "type": "dynamical_system",
            "hamiltonian": encode_matrix(obj.hamiltonian),
            "initial": encode_vector(obj.initial),
            "times": list(obj.times),
        }
    if isinstance(obj, np.ndarray) and obj.ndim == 2:
        return {"type": "basis", "vectors": [encode_vector(v) for v in obj]}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _require(entry: dict, key: str, name: str):
    if key not in entry:
        raise ParseError(f"entity {name!r} is missing field {key!r}")
    return entry[key]


def decode_entity(name: str, entry: dict, dim: int | None, tol: Tolerance = DEFAULT_TOL):
    """Construct the entity ``entry`` describes. Structural problems raise ParseError,
    failed invariants raise ValidationError naming the entity."""
    if not isinstance(entry, dict):
        raise ParseError(f"entity {name!r} must be an object")
    kind = _require(entry, "type", name)
    if kind not in ENTITY_TYPES:
        raise ParseError(f"entity {name!r} has unknown type {kind!r}")
    try:
        obj = _decode(kind, name, entry, tol)
    except PovmError as exc:
        raise ValidationError(f"{kind} {name!r}: {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise ParseError(f"entity {name!r}: {exc}") from exc
    d = _dim_of(obj)
    if dim is not None and d is not None and d != dim:
        raise ValidationError(f"{kind} {name!r} has dimension {d}, document declares {dim}")
    return obj


def _decode(kind: str, name: str, entry: dict, tol: Tolerance):
    if kind == "state":
        if "vector" in entry:
            return State.pure(decode_vector(entry["vector"]), tol)
        return State(decode_matrix(_require(entry, "matrix", name)), tol)
    if kind == "observable":
        space = OutcomeSpace(tuple(_require(entry, "outcomes", name)))
        effects = np.array([decode_matrix(m) for m in _require(entry, "effects", name)])
        return Observable(space, effects, tol)
    if kind == "stochastic_matrix":
        return StochasticMatrix(
            OutcomeSpace(tuple(_require(entry, "from", name))),
            OutcomeSpace(tuple(_require(entry, "to", name))),
            np.asarray(_require(entry, "entries", name), dtype=float),
        )
    if kind == "instrument":
        space = OutcomeSpace(tuple(_require(entry, "outcomes", name)))
        ops = tuple(Operation(tuple(decode_matrix(k) for k in ks), tol) for ks in _require(entry, "kraus", name))
        return Instrument(space, ops, tol)
    if kind == "basis":
        vs = np.array([decode_vector(v) for v in _require(entry, "vectors", name)])
        if vs.ndim != 2 or vs.shape[0] != vs.shape[1]:
            raise ValidationError(f"basis {name!r} must hold d vectors of length d")
        dev = np.abs(vs.conj() @ vs.T - np.eye(len(vs))).max()
        if dev > 1e-10:
            raise ValidationError(f"basis {name!r} is not orthonormal (Gram deviation {dev:.3e})")
        return vs
    return DynamicalSystem(
        decode_matrix(_require(entry, "hamiltonian", name)),
        decode_vector(_require(entry, "initial", name)),
        tuple(_require(entry, "times", name)),
        tol,
    )


def _dim_of(obj) -> int | None:
    if isinstance(obj, StochasticMatrix):
        return None
    if isinstance(obj, np.ndarray):
        return obj.shape[1]
    return obj.dim


@dataclass
class Document:
    dim: int | None
    entities: dict[str, dict] = field(default_factory=dict)
    tol: Tolerance = DEFAULT_TOL

    def names(self) -> list[str]:
        return list(self.entities)

    def kind(self, name: str) -> str:
        return self._entry(name)["type"]

    def _entry(self, name: str) -> dict:
        try:
            return self.entities[name]
        except KeyError:
            raise NameNotFound(f"no entity named {name!r}; have {sorted(self.entities)}") from None

    def get(self, name: str, kind: str | None = None):
        entry = self._entry(name)
        if kind is not None and entry.get("type") != kind:
            raise ValidationError(f"entity {name!r} is a {entry.get('type')}, not a {kind}")
        return decode_entity(name, entry, self.dim, self.tol)

    def put(self, name: str, obj) -> None:
        self.entities[name] = encode_entity(obj)
        if self.dim is None:
            self.dim = _dim_of(obj)

    def to_json(self) -> dict:
        return {"dim": self.dim, "entities": self.entities}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")


def parse_document(data: Any, tol: Tolerance = DEFAULT_TOL) -> Document:
    if not isinstance(data, dict):
        raise ParseError("a document must be a JSON object")
    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"document needs a positive integer 'dim', got {dim!r}")
    entities = data.get("entities", {})
    if not isinstance(entities, dict):
        raise ParseError("'entities' must be an object mapping names to entities")
    for name, entry in entities.items():
        if not isinstance(entry, dict) or entry.get("type") not in ENTITY_TYPES:
            raise ParseError(f"entity {name!r} needs a 'type' among {ENTITY_TYPES}")
    return Document(dim, dict(entities), tol)


def loads(text: str, tol: Tolerance = DEFAULT_TOL) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return parse_document(data, tol)


def load(path: str | Path, tol: Tolerance = DEFAULT_TOL) -> Document:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads(text, tol)


def validate(doc: Document) -> list[tuple[str, str, str | None]]:
    """``(name, type, error or None)`` for every entity, in document order."""
    out = []
    for name in doc.names():
        try:
            doc.get(name)
            out.append((name, doc.kind(name), None))
        except (PovmError, ParseError) as exc:
            out.append((name, doc.kind(name), str(exc)))
    return out


def document_of(dim: int, **entities) -> Document:
    doc = Document(dim)
    for name, obj in entities.items():
        doc.put(name, obj)
    return doc
