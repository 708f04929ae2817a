"""
A∞-algebras, modules, morphisms and homotopies over F₂.

Chains are frozensets of basis ids (a sum mod 2). Operation tables are sparse:
a missing key means the operation vanishes on that basis tuple.

Module operations of every kind share one key shape ``(q, args)``: ``args``
is the full argument tuple and ``q`` the position of the module element, so
q is the number of algebra arguments to its left. A right module only uses
q = 0, a left module only q = len(args) − 1, a bimodule any q; m_{i,j} is the
entry with q = i − 1 and len(args) = i + j − 1.

Degrees: |μ_i| = |m| = arity − 2, |f_n| = n − 1, |h_j| = j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import BadInputError, DegreeError, KindMismatch
from ..gf2core import GradedVectorSpace

Chain = FrozenSet[int]
OpTable = Mapping[Tuple[int, ...], Chain]
ModuleKey = Tuple[int, Tuple[int, ...]]

ZERO: Chain = frozenset()

SIDES = ("right", "left", "bimodule")


def chain_add(*chains: Iterable[int]) -> Chain:
    acc: set = set()
    for c in chains:
        acc ^= set(c)
    return frozenset(acc)


@dataclass(frozen=True)
class Basis:
    """Named, graded basis."""

    names: Tuple[str, ...]
    degrees: Tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise BadInputError("basis names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise BadInputError("basis names must be unique")

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as exc:
            raise BadInputError(f"unknown basis element {name!r}") from exc

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def in_degree(self, d: int) -> List[int]:
        return [i for i, deg in enumerate(self.degrees) if deg == d]

    def degree_set(self) -> FrozenSet[int]:
        return frozenset(self.degrees)

    def chain_degree(self, chain: Chain) -> Optional[int]:
        degrees = {self.degrees[i] for i in chain}
        if len(degrees) > 1:
            raise DegreeError("chain is not homogeneous")
        return degrees.pop() if degrees else None

    def vector(self, chain: Chain, d: int) -> np.ndarray:
        ids = self.in_degree(d)
        pos = {b: k for k, b in enumerate(ids)}
        vec = np.zeros(len(ids), dtype=np.uint8)
        for b in chain:
            vec[pos[b]] ^= 1
        return vec

    def chain(self, vec: np.ndarray, d: int) -> Chain:
        ids = self.in_degree(d)
        return frozenset(ids[k] for k in np.flatnonzero(vec))

    def format(self, chain: Chain) -> str:
        if not chain:
            return "0"
        return " + ".join(self.names[i] for i in sorted(chain))

    def parse(self, text: str) -> Chain:
        text = text.strip()
        if text == "0":
            return ZERO
        return chain_add(*({self.index(t.strip())} for t in text.split("+")))

    @property
    def space(self) -> GradedVectorSpace:
        dims: Dict[int, int] = {}
        labels: Dict[int, List[str]] = {}
        for name, d in zip(self.names, self.degrees):
            dims[d] = dims.get(d, 0) + 1
            labels.setdefault(d, []).append(name)
        window = (min(self.degrees), max(self.degrees)) if self.degrees else (0, 0)
        return GradedVectorSpace(window, dims, {d: tuple(v) for d, v in labels.items()})


def apply_table(table: Optional[OpTable], chains: Sequence[Chain]) -> Chain:
    """Multilinear extension of a sparse table to chain arguments."""
    if not table or any(not c for c in chains):
        return ZERO
    acc: set = set()
    for combo in product(*chains):
        out = table.get(combo)
        if out:
            acc ^= out
    return frozenset(acc)


@dataclass(frozen=True, eq=False)
class AInfAlgebra:
    """Operations μ_i given by sparse tables keyed by basis tuples."""

    basis: Basis
    ops: Mapping[int, OpTable]
    unit: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        for i, table in self.ops.items():
            if i < 1:
                raise DegreeError(f"operation arity {i} is not positive")
            for key, out in table.items():
                if len(key) != i:
                    raise DegreeError(f"μ_{i} entry {key} has the wrong arity")
                expected = sum(self.basis.degree(a) for a in key) + i - 2
                for b in out:
                    if self.basis.degree(b) != expected:
                        raise DegreeError(
                            f"μ_{i}({self.basis.format(frozenset(key))}) has output degree "
                            f"{self.basis.degree(b)}, expected {expected}"
                        )

    @property
    def space(self) -> GradedVectorSpace:
        return self.basis.space

    @property
    def i_max(self) -> int:
        return max((i for i, t in self.ops.items() if t), default=0)

    def op(self, i: int, args: Tuple[int, ...]) -> Chain:
        table = self.ops.get(i)
        return table.get(args, ZERO) if table else ZERO

    def apply(self, i: int, chains: Sequence[Chain]) -> Chain:
        return apply_table(self.ops.get(i), chains)

    def is_strictly_unital(self) -> bool:
        """μ₂(1, a) = a = μ₂(a, 1) and every other operation vanishes on the unit."""
        if self.unit is None:
            return False
        u = self.unit
        for a in range(len(self.basis)):
            if self.op(2, (u, a)) != frozenset({a}) or self.op(2, (a, u)) != frozenset({a}):
                return False
        for i, table in self.ops.items():
            if i == 2:
                continue
            if any(u in key and out for key, out in table.items()):
                return False
        return True

    def with_ops(self, ops: Mapping[int, OpTable], name: Optional[str] = None) -> "AInfAlgebra":
        return AInfAlgebra(self.basis, ops, self.unit, self.name if name is None else name)


@dataclass(frozen=True, eq=False)
class AInfModule:
    """One-sided or two-sided A∞-module; see the module docstring for key layout."""

    side: str
    basis: Basis
    ops: Mapping[ModuleKey, Chain]
    algebra: AInfAlgebra
    name: str = ""
    graded_source: object = None

    def __post_init__(self):
        if self.side not in SIDES:
            raise KindMismatch(f"unknown module side {self.side!r}")
        alg = self.algebra.basis
        for (q, args), out in self.ops.items():
            if not 0 <= q < len(args):
                raise DegreeError(f"module position {q} outside arguments {args}")
            if self.side == "right" and q != 0:
                raise KindMismatch("right module entries must have the module element first")
            if self.side == "left" and q != len(args) - 1:
                raise KindMismatch("left module entries must have the module element last")
            expected = self.basis.degree(args[q]) + len(args) - 2
            expected += sum(alg.degree(a) for k, a in enumerate(args) if k != q)
            for b in out:
                if self.basis.degree(b) != expected:
                    raise DegreeError(
                        f"module operation on {args} has output degree {self.basis.degree(b)}, expected {expected}"
                    )

    @property
    def space(self) -> GradedVectorSpace:
        return self.basis.space

    def op(self, q: int, args: Tuple[int, ...]) -> Chain:
        return self.ops.get((q, args), ZERO)

    def apply(self, q: int, chains: Sequence[Chain]) -> Chain:
        if any(not c for c in chains):
            return ZERO
        acc: set = set()
        for combo in product(*chains):
            out = self.ops.get((q, combo))
            if out:
                acc ^= out
        return frozenset(acc)

    def module_position(self, arity: int) -> Sequence[int]:
        """Positions the module element may take in an argument tuple of this arity."""
        if self.side == "right":
            return (0,)
        if self.side == "left":
            return (arity - 1,)
        return tuple(range(arity))

    def arities(self) -> FrozenSet[int]:
        return frozenset(len(args) for (_, args), out in self.ops.items() if out)

    def table(self) -> Dict[ModuleKey, Chain]:
        return {k: v for k, v in self.ops.items() if v}


@dataclass(frozen=True, eq=False)
class AInfMorphism:
    """
    Components f_n. For modules the keys follow the module key layout;
    for algebras they are plain basis tuples.
    """

    kind: str
    source: object
    target: object
    components: Mapping[int, Mapping]
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("algebra", "module"):
            raise KindMismatch(f"unknown morphism kind {self.kind!r}")
        if self.kind == "module" and (
            not isinstance(self.source, AInfModule) or not isinstance(self.target, AInfModule)
        ):
            raise KindMismatch("module morphisms need module source and target")
        if self.kind == "algebra" and (
            not isinstance(self.source, AInfAlgebra) or not isinstance(self.target, AInfAlgebra)
        ):
            raise KindMismatch("algebra morphisms need algebra source and target")
        _check_component_degrees(self, 1)

    def component(self, n: int, key) -> Chain:
        table = self.components.get(n)
        return table.get(key, ZERO) if table else ZERO

    def apply(self, n: int, chains: Sequence[Chain], q: int = 0) -> Chain:
        table = self.components.get(n)
        if not table or any(not c for c in chains):
            return ZERO
        acc: set = set()
        for combo in product(*chains):
            key = (q, combo) if self.kind == "module" else combo
            out = table.get(key)
            if out:
                acc ^= out
        return frozenset(acc)

    def n_max(self) -> int:
        return max((n for n, t in self.components.items() if t), default=1)


@dataclass(frozen=True, eq=False)
class AInfHomotopy:
    """Components h_j of a homotopy between module morphisms, |h_j| = j."""

    source: AInfModule
    target: AInfModule
    components: Mapping[int, Mapping[ModuleKey, Chain]] = field(default_factory=dict)

    def apply(self, n: int, chains: Sequence[Chain], q: int = 0) -> Chain:
        table = self.components.get(n)
        if not table or any(not c for c in chains):
            return ZERO
        acc: set = set()
        for combo in product(*chains):
            out = table.get((q, combo))
            if out:
                acc ^= out
        return frozenset(acc)


def _source_degree(obj, key, kind: str) -> int:
    if kind == "module":
        q, args = key
        alg = obj.algebra.basis
        return obj.basis.degree(args[q]) + sum(alg.degree(a) for k, a in enumerate(args) if k != q)
    return sum(obj.basis.degree(a) for a in key)


def _check_component_degrees(f: AInfMorphism, offset: int) -> None:
    for n, table in f.components.items():
        for key, out in table.items():
            expected = _source_degree(f.source, key, f.kind) + n - offset
            for b in out:
                if f.target.basis.degree(b) != expected:
                    raise DegreeError(f"f_{n} on {key} has output degree {f.target.basis.degree(b)}, expected {expected}")


def opposite_algebra(alg: AInfAlgebra) -> AInfAlgebra:
    """μ^op_i(a₁,…,a_i) = μ_i(a_i,…,a₁)."""
    ops = {i: {tuple(reversed(k)): v for k, v in t.items()} for i, t in alg.ops.items()}
    return AInfAlgebra(alg.basis, ops, alg.unit, f"{alg.name}^op" if alg.name else "")


def opposite(mod: AInfModule) -> AInfModule:
    """
    Reverse argument order: a right module over A becomes a left module over
    A^op and vice versa.
    """
    if mod.side == "bimodule":
        raise KindMismatch("opposite is defined for one-sided modules")
    ops = {}
    for (q, args), out in mod.ops.items():
        rev = tuple(reversed(args))
        ops[(len(args) - 1 - q, rev)] = out
    side = "left" if mod.side == "right" else "right"
    return AInfModule(side, mod.basis, ops, opposite_algebra(mod.algebra), f"{mod.name}^op" if mod.name else "", mod.graded_source)


def right_restriction(mod: AInfModule) -> AInfModule:
    """The right module underlying a bimodule (entries with the module element first)."""
    if mod.side == "right":
        return mod
    if mod.side != "bimodule":
        raise KindMismatch("a left module has no right restriction")
    ops = {(q, args): out for (q, args), out in mod.ops.items() if q == 0}
    return AInfModule("right", mod.basis, ops, mod.algebra, mod.name, mod.graded_source)


def identity(mod: AInfModule) -> AInfMorphism:
    """I₁ = id, higher components zero; the single-argument key is (0, (b,)) on every side."""
    table = {(0, (b,)): frozenset({b}) for b in range(len(mod.basis))}
    return AInfMorphism("module", mod, mod, {1: table}, name=f"id_{mod.name}")


def compose(f: AInfMorphism, g: AInfMorphism) -> AInfMorphism:
    """
    g ∘ f.

    Modules: (g∘f)_n(x, a…) = Σ_{i+j=n+1} g_j(f_i(x, a₁…a_{i−1}), a_i…).
    Algebras: (g∘f)_n = Σ over compositions n = i₁+…+i_r of g_r(f_{i₁}, …, f_{i_r}).
    """
    if f.kind != g.kind:
        raise KindMismatch("cannot compose morphisms of different kinds")
    if f.target is not g.source and f.target.basis != g.source.basis:
        raise KindMismatch("target of f is not the source of g")
    if f.kind == "module":
        return _compose_modules(f, g)
    return _compose_algebras(f, g)


def _compose_modules(f: AInfMorphism, g: AInfMorphism) -> AInfMorphism:
    by_first: Dict[int, List[Tuple[int, Tuple[int, ...], Chain]]] = {}
    for j, table in g.components.items():
        for (q, args), out in table.items():
            if out:
                by_first.setdefault(args[0], []).append((j, args[1:], out))
    comps: Dict[int, Dict[ModuleKey, set]] = {}
    for i, table in f.components.items():
        for (q, args), mid in table.items():
            for y in mid:
                for j, rest, out in by_first.get(y, ()):
                    n = i + j - 1
                    key = (0, args + rest)
                    acc = comps.setdefault(n, {}).setdefault(key, set())
                    acc ^= out
    final = {n: {k: frozenset(v) for k, v in t.items() if v} for n, t in comps.items()}
    return AInfMorphism("module", f.source, g.target, final, name=f"{g.name}∘{f.name}")


def _compositions(n: int) -> Iterable[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def _compose_algebras(f: AInfMorphism, g: AInfMorphism) -> AInfMorphism:
    comps: Dict[int, Dict[Tuple[int, ...], set]] = {}
    n_top = f.n_max() * g.n_max()
    keys_by_arity: Dict[int, List[Tuple[int, ...]]] = {}
    for i, table in f.components.items():
        keys_by_arity[i] = [k for k, v in table.items() if v]
    for n in range(1, n_top + 1):
        for parts in _compositions(n):
            r = len(parts)
            if r not in g.components or not g.components[r]:
                continue
            if any(p not in keys_by_arity for p in parts):
                continue
            for keys in product(*(keys_by_arity[p] for p in parts)):
                outs = [f.component(p, k) for p, k in zip(parts, keys)]
                val = g.apply(r, outs)
                if val:
                    key = tuple(a for k in keys for a in k)
                    acc = comps.setdefault(n, {}).setdefault(key, set())
                    acc ^= val
    final = {n: {k: frozenset(v) for k, v in t.items() if v} for n, t in comps.items()}
    return AInfMorphism("algebra", f.source, g.target, final, name=f"{g.name}∘{f.name}")


def tables_equal(a: Mapping, b: Mapping) -> bool:
    """Compare sparse tables ignoring explicit zero entries."""
    def clean(t):
        return {k: v for k, v in t.items() if v}
    if isinstance(next(iter(a.values()), None), Mapping) or isinstance(next(iter(b.values()), None), Mapping):
        keys = set(a) | set(b)
        return all(clean(a.get(k, {})) == clean(b.get(k, {})) for k in keys)
    return clean(a) == clean(b)
