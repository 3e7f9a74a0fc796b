"""JSON serialization of relation instances.

Document layout::

    {"space_dim": n,
     "tol": {"rank_rel_tol": ..., "angle_tol": ...},
     "relations": {"T": {"basis": [[re, im, re, im, ...], ...]}, ...},
     "witness": {"a": ..., "b": ...}}            # optional

Each basis row is one graph vector of C^{2n} (x-part first) flattened into
4n reals.  Floats are written with Python's shortest round-trip repr, so a
dump followed by a load reproduces every stored bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InstanceFormatError
from .relation import Relation
from .subspace import ORTHONORMALITY_TOL, DEFAULT_TOL, Subspace, TolerancePolicy, compare, span_columns

__all__ = ["Instance", "dumps", "loads", "dump", "load"]


@dataclass
class Instance:
    space_dim: int
    relations: dict[str, Relation]
    tol: TolerancePolicy = DEFAULT_TOL
    witness: dict[str, float] | None = None
    extra: dict = field(default_factory=dict)

    def equals(self, other: "Instance") -> bool:
        """Same dims, tolerances, witness and relation names, with compare-equal graphs."""
        if (self.space_dim, self.tol, self.witness) != (other.space_dim, other.tol, other.witness):
            return False
        if self.relations.keys() != other.relations.keys():
            return False
        return all(
            compare(self.relations[k].graph, other.relations[k].graph).equal for k in self.relations
        )


def _encode_basis(graph: Subspace) -> list[list[float]]:
    rows = []
    for col in graph.basis.T:
        row = np.empty(2 * col.size)
        row[0::2], row[1::2] = col.real, col.imag
        rows.append([float(v) for v in row])
    return rows


def _decode_basis(rows, n: int, tol: TolerancePolicy, name: str) -> Subspace:
    if not isinstance(rows, list):
        raise InstanceFormatError(f"relation {name!r}: basis must be a list of rows")
    arr = np.zeros((len(rows), 4 * n))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 4 * n:
            raise InstanceFormatError(f"relation {name!r}: row {i} must hold {4 * n} reals")
        try:
            arr[i] = [float(v) for v in row]
        except (TypeError, ValueError) as exc:
            raise InstanceFormatError(f"relation {name!r}: row {i}: {exc}") from None
    if not np.all(np.isfinite(arr)):
        raise InstanceFormatError(f"relation {name!r}: non-finite entry")
    basis = (arr[:, 0::2] + 1j * arr[:, 1::2]).T
    d = basis.shape[1]
    if d and np.max(np.abs(basis.conj().T @ basis - np.eye(d))) < ORTHONORMALITY_TOL:
        return Subspace(basis, tol)
    # hand-written spanning sets are accepted and orthonormalized
    return span_columns(basis, tol)


def _to_doc(inst: Instance) -> dict:
    doc = {
        "space_dim": inst.space_dim,
        "tol": {"rank_rel_tol": inst.tol.rank_rel_tol, "angle_tol": inst.tol.angle_tol},
        "relations": {name: {"basis": _encode_basis(r.graph)} for name, r in inst.relations.items()},
    }
    if inst.witness is not None:
        doc["witness"] = dict(inst.witness)
    doc.update(inst.extra)
    return doc


def dumps(inst: Instance) -> str:
    for name, r in inst.relations.items():
        if r.space_dim != inst.space_dim:
            raise InstanceFormatError(f"relation {name!r} lives on C^{r.space_dim}, not C^{inst.space_dim}")
    return json.dumps(_to_doc(inst), indent=1) + "\n"


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be an object")
    n = doc.get("space_dim")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InstanceFormatError("space_dim must be a positive integer")
    tol_doc = doc.get("tol", {})
    try:
        tol = TolerancePolicy(**tol_doc)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"invalid tol: {exc}") from None
    rels = doc.get("relations")
    if not isinstance(rels, dict) or not rels:
        raise InstanceFormatError("relations must be a non-empty object")
    relations = {}
    for name, body in rels.items():
        if not isinstance(body, dict) or "basis" not in body:
            raise InstanceFormatError(f"relation {name!r} needs a basis")
        relations[name] = Relation(_decode_basis(body["basis"], n, tol, name))
    witness = doc.get("witness")
    if witness is not None:
        if not isinstance(witness, dict) or not all(
            isinstance(v, (int, float)) and math.isfinite(v) for v in witness.values()
        ):
            raise InstanceFormatError("witness must map names to finite numbers")
        witness = {k: float(v) for k, v in witness.items()}
    extra = {k: v for k, v in doc.items() if k not in ("space_dim", "tol", "relations", "witness")}
    return Instance(n, relations, tol, witness, extra)


def dump(inst: Instance, path) -> None:
    Path(path).write_text(dumps(inst))


def load(path) -> Instance:
    return loads(Path(path).read_text())
