"""
Relation checkers for A∞ structures.

Every relation is the sum over the (i, j, l) terms of ``polytope.relation_terms``:
the inner operation consumes a block of j consecutive arguments starting at
argument l, the outer one consumes the result together with the rest. When the
block contains the module element the inner operation is a module operation,
otherwise it is μ_j of the algebra.
"""

from __future__ import annotations

from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import structlog
from pydantic import BaseModel, Field

from ..exceptions import KindMismatch, RelationFailure
from ..polytope import relation_terms
from .structures import (
    ZERO,
    AInfAlgebra,
    AInfHomotopy,
    AInfModule,
    AInfMorphism,
    Chain,
    _compositions,
)

logger = structlog.get_logger(__name__)

Window = Optional[Tuple[int, int]]


class RelationFailureDetail(BaseModel):
    n: int
    inputs: List[str]
    value: List[str]
    module_position: Optional[int] = None


class RelationReport(BaseModel):
    """Outcome of a relation scan; ``failure`` is the first nonzero relation found."""

    structure: str = ""
    kind: str
    passed: bool
    n_max: int
    checked: int = 0
    failures: int = 0
    failure: Optional[RelationFailureDetail] = None
    notes: List[str] = Field(default_factory=list)


def require(report: RelationReport) -> RelationReport:
    if not report.passed:
        raise RelationFailure(f"{report.kind} relations fail for {report.structure or 'structure'}", report)
    return report


# ---------------------------------------------------------------------------
# tuple enumeration


def enumerate_tuples(slots: Sequence[Sequence[Tuple[int, int]]], targets: FrozenSet[int]) -> Iterator[Tuple[int, ...]]:
    """
    Tuples picking one (id, degree) from each slot whose degree sum lies in
    ``targets``. Partial sums outside the reachable range are pruned.
    """
    if not slots or not targets:
        return
    lo_t, hi_t = min(targets), max(targets)
    mins = [min((d for _, d in s), default=None) for s in slots]
    maxs = [max((d for _, d in s), default=None) for s in slots]
    if any(m is None for m in mins):
        return
    suffix_min = [0] * (len(slots) + 1)
    suffix_max = [0] * (len(slots) + 1)
    for k in range(len(slots) - 1, -1, -1):
        suffix_min[k] = suffix_min[k + 1] + mins[k]
        suffix_max[k] = suffix_max[k + 1] + maxs[k]

    prefix: List[int] = []

    def walk(k: int, total: int) -> Iterator[Tuple[int, ...]]:
        if k == len(slots):
            if total in targets:
                yield tuple(prefix)
            return
        for ident, deg in slots[k]:
            t = total + deg
            if t + suffix_min[k + 1] > hi_t or t + suffix_max[k + 1] < lo_t:
                continue
            prefix.append(ident)
            yield from walk(k + 1, t)
            prefix.pop()

    yield from walk(0, 0)


def _slot(basis, skip: Optional[int] = None) -> List[Tuple[int, int]]:
    return [(i, basis.degree(i)) for i in range(len(basis)) if i != skip]


def _targets(degrees, shift: int, window: Window) -> FrozenSet[int]:
    out = set()
    for d in degrees:
        if window is not None and not window[0] <= d <= window[1]:
            continue
        out.add(d - shift)
    return frozenset(out)


# ---------------------------------------------------------------------------
# relation values


def _singletons(args: Sequence[int]) -> List[Chain]:
    return [frozenset({a}) for a in args]


def relation_value(alg: AInfAlgebra, args: Tuple[int, ...], module: Optional[AInfModule] = None, x_pos: Optional[int] = None) -> Chain:
    """
    Value of the n-th relation on a basis tuple. Without a module this is
    Σ μ_i(…, μ_j(…), …); with one, ``args[x_pos]`` is the module element.
    """
    n = len(args)
    acc: set = set()
    for term in relation_terms(n):
        start = term.l - 1
        end = start + term.j
        block = args[start:end]
        if module is not None and start <= x_pos < end:
            inner = module.apply(x_pos - start, _singletons(block))
            outer_q = start
        else:
            inner = alg.apply(term.j, _singletons(block))
            if module is not None:
                outer_q = x_pos if x_pos < start else x_pos - term.j + 1
        if not inner:
            continue
        outer = _singletons(args[:start]) + [inner] + _singletons(args[end:])
        if module is None:
            acc ^= alg.apply(term.i, outer)
        else:
            acc ^= module.apply(outer_q, outer)
    return frozenset(acc)


def module_is_strictly_unital(mod: AInfModule) -> bool:
    alg = mod.algebra
    if not alg.is_strictly_unital():
        return False
    u = alg.unit
    for x in range(len(mod.basis)):
        if mod.side in ("right", "bimodule") and mod.op(0, (x, u)) != frozenset({x}):
            return False
        if mod.side in ("left", "bimodule") and mod.op(1, (u, x)) != frozenset({x}):
            return False
    for (q, args), out in mod.ops.items():
        if not out or len(args) == 2:
            continue
        if any(a == u for k, a in enumerate(args) if k != q):
            return False
    return True


def _name(basis, ident: int) -> str:
    return basis.names[ident]


def _args_names(alg: AInfAlgebra, args, module: Optional[AInfModule], x_pos: Optional[int]) -> List[str]:
    return [
        _name(module.basis, a) if module is not None and k == x_pos else _name(alg.basis, a)
        for k, a in enumerate(args)
    ]


def _scan(
    kind: str,
    name: str,
    n_max: int,
    cases: Callable[[int], Iterator[Tuple[Tuple[int, ...], Optional[int]]]],
    value: Callable[[Tuple[int, ...], Optional[int]], Chain],
    describe: Callable[[Tuple[int, ...], Optional[int], Chain], RelationFailureDetail],
    exhaustive: bool,
    notes: List[str],
) -> RelationReport:
    checked = 0
    failures = 0
    first: Optional[RelationFailureDetail] = None
    for n in range(1, n_max + 1):
        for args, x_pos in cases(n):
            checked += 1
            val = value(args, x_pos)
            if val:
                failures += 1
                if first is None:
                    first = describe(args, x_pos, val)
                    logger.debug("relation fails", kind=kind, n=n, inputs=first.inputs)
                if not exhaustive:
                    break
        if first is not None and not exhaustive:
            break
    report = RelationReport(
        structure=name, kind=kind, passed=first is None, n_max=n_max,
        checked=checked, failures=failures, failure=first, notes=notes,
    )
    logger.info("relations checked", kind=kind, structure=name, passed=report.passed, checked=checked)
    return report


# ---------------------------------------------------------------------------
# checkers


def check_algebra_relations(alg: AInfAlgebra, n_max: int = 4, window: Window = None, exhaustive: bool = False) -> RelationReport:
    notes = []
    skip = None
    if alg.is_strictly_unital():
        skip = alg.unit
        notes.append("strict unit verified; tuples containing the unit skipped")
    slot = _slot(alg.basis, skip)

    def cases(n: int):
        targets = _targets(alg.basis.degree_set(), n - 3, window)
        for args in enumerate_tuples([slot] * n, targets):
            yield args, None

    def value(args, _):
        return relation_value(alg, args)

    def describe(args, _, val):
        return RelationFailureDetail(
            n=len(args),
            inputs=_args_names(alg, args, None, None),
            value=[_name(alg.basis, b) for b in sorted(val)],
        )

    return _scan("algebra", alg.name, n_max, cases, value, describe, exhaustive, notes)


def _module_cases(mod: AInfModule, positions: Callable[[int], Sequence[int]], window: Window):
    alg = mod.algebra
    notes = []
    skip = None
    if module_is_strictly_unital(mod):
        skip = alg.unit
        notes.append("strict unit verified; tuples containing the unit skipped")
    alg_slot = _slot(alg.basis, skip)
    mod_slot = _slot(mod.basis)

    def cases(n: int):
        targets = _targets(mod.basis.degree_set(), n - 3, window)
        for q in positions(n):
            slots = [alg_slot] * q + [mod_slot] + [alg_slot] * (n - 1 - q)
            for args in enumerate_tuples(slots, targets):
                yield args, q

    return cases, notes


def check_module_relations(mod: AInfModule, n_max: int = 4, window: Window = None, exhaustive: bool = False) -> RelationReport:
    if mod.side == "bimodule":
        raise KindMismatch("check_module_relations expects a one-sided module")
    cases, notes = _module_cases(mod, mod.module_position, window)
    alg = mod.algebra

    def value(args, q):
        return relation_value(alg, args, mod, q)

    def describe(args, q, val):
        return RelationFailureDetail(
            n=len(args), inputs=_args_names(alg, args, mod, q),
            value=[_name(mod.basis, b) for b in sorted(val)], module_position=q,
        )

    return _scan(f"{mod.side} module", mod.name, n_max, cases, value, describe, exhaustive, notes)


def check_bimodule_relations(mod: AInfModule, n_max: int = 4, window: Window = None, exhaustive: bool = False) -> RelationReport:
    if mod.side != "bimodule":
        raise KindMismatch("check_bimodule_relations expects a bimodule")
    cases, notes = _module_cases(mod, lambda n: range(n), window)
    alg = mod.algebra

    def value(args, q):
        return relation_value(alg, args, mod, q)

    def describe(args, q, val):
        return RelationFailureDetail(
            n=len(args), inputs=_args_names(alg, args, mod, q),
            value=[_name(mod.basis, b) for b in sorted(val)], module_position=q,
        )

    return _scan("bimodule", mod.name, n_max, cases, value, describe, exhaustive, notes)


def check_structure(structure, n_max: int = 4, window: Window = None) -> RelationReport:
    """Dispatch on the structure kind."""
    if isinstance(structure, AInfAlgebra):
        return check_algebra_relations(structure, n_max, window)
    if isinstance(structure, AInfModule):
        if structure.side == "bimodule":
            return check_bimodule_relations(structure, n_max, window)
        return check_module_relations(structure, n_max, window)
    raise KindMismatch(f"cannot check relations of {type(structure).__name__}")


def _inner_terms(mod: AInfModule, args: Tuple[int, ...]) -> Iterator[Tuple[int, int, int, Chain]]:
    """(i, start, end, inner) for every relation term on a right-module tuple."""
    for term in relation_terms(len(args)):
        start = term.l - 1
        end = start + term.j
        block = _singletons(args[start:end])
        inner = mod.apply(0, block) if start == 0 else mod.algebra.apply(term.j, block)
        if inner:
            yield term.i, start, end, inner


def _module_morphism_value(f: AInfMorphism, args: Tuple[int, ...]) -> Chain:
    src: AInfModule = f.source
    tgt: AInfModule = f.target
    n = len(args)
    acc: set = set()
    for j in range(1, n + 1):
        head = f.apply(j, _singletons(args[:j]))
        if head:
            acc ^= tgt.apply(0, [head] + _singletons(args[j:]))
    for i, start, end, inner in _inner_terms(src, args):
        acc ^= f.apply(i, _singletons(args[:start]) + [inner] + _singletons(args[end:]))
    return frozenset(acc)


def _algebra_morphism_value(f: AInfMorphism, args: Tuple[int, ...]) -> Chain:
    src: AInfAlgebra = f.source
    tgt: AInfAlgebra = f.target
    n = len(args)
    acc: set = set()
    for term in relation_terms(n):
        start = term.l - 1
        end = start + term.j
        inner = src.apply(term.j, _singletons(args[start:end]))
        if inner:
            acc ^= f.apply(term.i, _singletons(args[:start]) + [inner] + _singletons(args[end:]))
    for parts in _compositions(n):
        chains = []
        pos = 0
        for p in parts:
            chains.append(f.apply(p, _singletons(args[pos:pos + p])))
            pos += p
        acc ^= tgt.apply(len(parts), chains)
    return frozenset(acc)


def check_morphism(f: AInfMorphism, n_max: int = 4, window: Window = None, exhaustive: bool = False) -> RelationReport:
    if f.kind == "module":
        src: AInfModule = f.source
        if src.side != "right" or f.target.side != "right":
            raise KindMismatch("module morphisms are checked between right modules")
        if src.algebra.basis != f.target.algebra.basis:
            raise KindMismatch("source and target modules live over different algebras")
        alg_slot = _slot(src.algebra.basis)
        mod_slot = _slot(src.basis)

        def cases(n: int):
            targets = _targets(f.target.basis.degree_set(), n - 2, window)
            for args in enumerate_tuples([mod_slot] + [alg_slot] * (n - 1), targets):
                yield args, 0

        def value(args, _):
            return _module_morphism_value(f, args)

        def describe(args, _, val):
            return RelationFailureDetail(
                n=len(args), inputs=_args_names(src.algebra, args, src, 0),
                value=[_name(f.target.basis, b) for b in sorted(val)], module_position=0,
            )
    else:
        src_alg: AInfAlgebra = f.source
        slot = _slot(src_alg.basis)

        def cases(n: int):
            targets = _targets(f.target.basis.degree_set(), n - 2, window)
            for args in enumerate_tuples([slot] * n, targets):
                yield args, None

        def value(args, _):
            return _algebra_morphism_value(f, args)

        def describe(args, _, val):
            return RelationFailureDetail(
                n=len(args), inputs=_args_names(src_alg, args, None, None),
                value=[_name(f.target.basis, b) for b in sorted(val)],
            )

    return _scan(f"{f.kind} morphism", f.name, n_max, cases, value, describe, exhaustive, [])


def check_homotopy(
    f: AInfMorphism,
    g: AInfMorphism,
    h: AInfHomotopy,
    n_max: int = 4,
    window: Window = None,
    exhaustive: bool = False,
) -> RelationReport:
    """f_n − g_n = Σ h(m) + Σ m'(h) + Σ h(…μ…) on every tuple."""
    if f.kind != "module" or g.kind != "module":
        raise KindMismatch("homotopies are checked between module morphisms")
    src: AInfModule = f.source
    tgt: AInfModule = f.target
    if g.source.basis != src.basis or g.target.basis != tgt.basis:
        raise KindMismatch("homotopic morphisms must share source and target")
    alg_slot = _slot(src.algebra.basis)
    mod_slot = _slot(src.basis)

    def cases(n: int):
        targets = _targets(tgt.basis.degree_set(), n - 1, window)
        for args in enumerate_tuples([mod_slot] + [alg_slot] * (n - 1), targets):
            yield args, 0

    def value(args, _):
        n = len(args)
        single = _singletons(args)
        acc = set(f.apply(n, single)) ^ set(g.apply(n, single))
        for j in range(1, n + 1):
            head = h.apply(j, _singletons(args[:j]))
            if head:
                acc ^= tgt.apply(0, [head] + _singletons(args[j:]))
        for i, start, end, inner in _inner_terms(src, args):
            acc ^= h.apply(i, _singletons(args[:start]) + [inner] + _singletons(args[end:]))
        return frozenset(acc)

    def describe(args, _, val):
        return RelationFailureDetail(
            n=len(args), inputs=_args_names(src.algebra, args, src, 0),
            value=[_name(tgt.basis, b) for b in sorted(val)], module_position=0,
        )

    return _scan("homotopy", f"{f.name}~{g.name}", n_max, cases, value, describe, exhaustive, [])


def zero_morphism(source: AInfModule, target: AInfModule) -> AInfMorphism:
    return AInfMorphism("module", source, target, {}, name="0")


__all__ = [
    "RelationFailureDetail",
    "RelationReport",
    "check_algebra_relations",
    "check_bimodule_relations",
    "check_homotopy",
    "check_module_relations",
    "check_morphism",
    "check_structure",
    "enumerate_tuples",
    "module_is_strictly_unital",
    "relation_value",
    "require",
    "zero_morphism",
    "ZERO",
]
