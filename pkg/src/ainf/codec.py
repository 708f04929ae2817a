"""
JSON format for A∞ structures.

An algebra lists its basis and sparse operation tables, or names a ring
precision and window, in which case the basis is the monomials of R_p, μ₂ is
the product, and the listed entries are extended V-linearly::

    {"kind": "algebra", "ring": {"precision": 3},
     "operations": {"4": [{"inputs": ["Q2", "Q", "Q2", "Q"], "output": ["V"]}]}}

A module embeds its algebra and lists entries whose inputs include the module
element at ``module_position`` (defaults: first for right, last for left).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import structlog
from pydantic import BaseModel, Field, ValidationError

from ..exceptions import BadInputError, StructureFormatError
from ..ring_r import Monomial, ring_r
from .models import strict_ring_algebra, v_linear_extension
from .structures import AInfAlgebra, AInfModule, Basis, Chain, ModuleKey

logger = structlog.get_logger(__name__)


class BasisEntry(BaseModel):
    name: str
    degree: int


class OperationEntry(BaseModel):
    inputs: List[str]
    output: List[str] = Field(default_factory=list)
    module_position: Optional[int] = None


class RingSpec(BaseModel):
    precision: int = Field(ge=1)
    window: Optional[Tuple[int, int]] = None
    v_linear: bool = True


class AlgebraDocument(BaseModel):
    kind: Literal["algebra"] = "algebra"
    name: str = ""
    ring: Optional[RingSpec] = None
    basis: List[BasisEntry] = Field(default_factory=list)
    unit: Optional[str] = None
    operations: Dict[int, List[OperationEntry]] = Field(default_factory=dict)


class ModuleDocument(BaseModel):
    kind: Literal["module"] = "module"
    name: str = ""
    side: Literal["right", "left", "bimodule"] = "right"
    algebra: AlgebraDocument
    basis: List[BasisEntry]
    operations: List[OperationEntry] = Field(default_factory=list)


def _ids(basis: Basis, names: List[str]) -> Tuple[int, ...]:
    return tuple(basis.index(n) for n in names)


def _chain(basis: Basis, names: List[str]) -> Chain:
    acc: set = set()
    for n in names:
        acc ^= {basis.index(n)}
    return frozenset(acc)


def algebra_from_document(doc: AlgebraDocument) -> AInfAlgebra:
    if doc.ring is not None:
        ring = ring_r(doc.ring.precision)
        strict = strict_ring_algebra(ring, doc.ring.window, doc.name)
        ops = {2: dict(strict.ops[2])}
        for arity, entries in doc.operations.items():
            if arity == 2:
                raise StructureFormatError("ring-based structures take μ₂ from the ring")
            if doc.ring.v_linear:
                pairs = [([Monomial.parse(x) for x in e.inputs], [Monomial.parse(y) for y in e.output]) for e in entries]
                ops[arity] = v_linear_extension(ring, strict.basis, pairs)
            else:
                ops[arity] = {_ids(strict.basis, e.inputs): _chain(strict.basis, e.output) for e in entries}
        return strict.with_ops(ops, doc.name or strict.name)

    basis = Basis(tuple(b.name for b in doc.basis), tuple(b.degree for b in doc.basis))
    ops: Dict[int, Dict[Tuple[int, ...], Chain]] = {}
    for arity, entries in doc.operations.items():
        table = ops.setdefault(arity, {})
        for e in entries:
            if len(e.inputs) != arity:
                raise StructureFormatError(f"entry {e.inputs} listed under arity {arity}")
            key = _ids(basis, e.inputs)
            table[key] = frozenset(set(table.get(key, frozenset())) ^ set(_chain(basis, e.output)))
    unit = basis.index(doc.unit) if doc.unit else None
    return AInfAlgebra(basis, ops, unit, doc.name)


def module_from_document(doc: ModuleDocument) -> AInfModule:
    alg = algebra_from_document(doc.algebra)
    basis = Basis(tuple(b.name for b in doc.basis), tuple(b.degree for b in doc.basis))
    ops: Dict[ModuleKey, Chain] = {}
    for e in doc.operations:
        n = len(e.inputs)
        q = e.module_position
        if q is None:
            if doc.side == "bimodule":
                raise StructureFormatError(f"bimodule entry {e.inputs} needs module_position")
            q = 0 if doc.side == "right" else n - 1
        if not 0 <= q < n:
            raise StructureFormatError(f"module position {q} outside entry {e.inputs}")
        key = tuple(
            basis.index(name) if k == q else alg.basis.index(name)
            for k, name in enumerate(e.inputs)
        )
        ops[(q, key)] = frozenset(set(ops.get((q, key), frozenset())) ^ set(_chain(basis, e.output)))
    return AInfModule(doc.side, basis, ops, alg, doc.name)


def structure_from_dict(data: dict) -> Union[AInfAlgebra, AInfModule]:
    try:
        if data.get("kind", "algebra") == "module":
            return module_from_document(ModuleDocument.model_validate(data))
        return algebra_from_document(AlgebraDocument.model_validate(data))
    except ValidationError as exc:
        raise StructureFormatError(f"invalid structure document: {exc}") from exc


def load_structure(path) -> Union[AInfAlgebra, AInfModule]:
    path = Path(path)
    if not path.exists():
        raise BadInputError(f"structure file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise StructureFormatError(f"{path} is not valid JSON: {exc}") from exc
    structure = structure_from_dict(data)
    logger.info("structure loaded", path=str(path), kind=type(structure).__name__, basis=len(structure.basis))
    return structure


def algebra_to_document(alg: AInfAlgebra) -> AlgebraDocument:
    basis = alg.basis
    operations = {
        i: [
            OperationEntry(inputs=[basis.names[a] for a in key], output=[basis.names[b] for b in sorted(out)])
            for key, out in sorted(table.items())
            if out
        ]
        for i, table in sorted(alg.ops.items())
    }
    return AlgebraDocument(
        name=alg.name,
        basis=[BasisEntry(name=n, degree=d) for n, d in zip(basis.names, basis.degrees)],
        unit=basis.names[alg.unit] if alg.unit is not None else None,
        operations={i: ops for i, ops in operations.items() if ops},
    )
