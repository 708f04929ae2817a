"""
The A∞ tensor product M ⊠ N, its induced left module structure, and mapping
cones.

Words [x|a₁|…|a_n|y] have filtration level n, internal degree
deg x + Σ deg a_k + deg y and total degree internal + n. The differential is
the sum of three families: m_i of M absorbing x and a prefix, μ_j on
consecutive letters, and m_i of N absorbing a suffix and y. Over a strictly
unital algebra with strictly unital modules the unit never appears as a
letter (normalized words).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, Field

from .ainf.massey import ChainLevel, module_chains
from .ainf.relations import (
    check_bimodule_relations,
    check_homotopy,
    check_module_relations,
    check_morphism,
    enumerate_tuples,
    module_is_strictly_unital,
    require,
    zero_morphism,
)
from .ainf.structures import (
    AInfAlgebra,
    AInfHomotopy,
    AInfModule,
    AInfMorphism,
    Basis,
    Chain,
    ModuleKey,
    compose,
)
from .exceptions import ChainComplexError, KindMismatch
from .gf2core import is_zero, matmul, rank, zeros
from .resolve import BigradedTable

logger = structlog.get_logger(__name__)

Word = Tuple[int, Tuple[int, ...], int]
Window = Optional[Tuple[int, int]]


def _same_algebra(a: AInfAlgebra, b: AInfAlgebra) -> bool:
    if a is b:
        return True
    if a.basis != b.basis:
        return False
    keys = set(a.ops) | set(b.ops)
    return all(
        {k: v for k, v in a.ops.get(i, {}).items() if v} == {k: v for k, v in b.ops.get(i, {}).items() if v}
        for i in keys
    )


def _max_arity(*structures) -> int:
    top = 1
    for s in structures:
        if isinstance(s, AInfAlgebra):
            top = max(top, s.i_max)
        else:
            top = max(top, max(s.arities(), default=1))
    return top


def relevant_order(n_max: int, *structures) -> int:
    """Relations above arity 2k − 1 vanish when no operation has arity above k."""
    return min(n_max + 1, 2 * _max_arity(*structures) - 1)


def _check_inputs(left: AInfModule, right: AInfModule, n_max: int) -> None:
    order = relevant_order(n_max, left, right, left.algebra)
    if left.side == "bimodule":
        require(check_bimodule_relations(left, order))
    else:
        require(check_module_relations(left, order))
    require(check_module_relations(right, order))


class BoxHomology(BaseModel):
    """Total-degree homology at n_max with the degrees that survive n_max + 1 unchanged."""

    n_max: int
    dims: Dict[int, int]
    certified: List[int] = Field(default_factory=list)
    uncertified: List[int] = Field(default_factory=list)


@dataclass(frozen=True, eq=False)
class BoxTensorComplex:
    """Words of length ≤ n_max in the requested total-degree window."""

    left: AInfModule
    right: AInfModule
    algebra: AInfAlgebra
    n_max: int
    words: Tuple[Word, ...]
    index: Mapping[Word, int]
    boundary: Mapping[int, Chain]
    normalized: bool
    window: Window = None

    def degree(self, k: int) -> int:
        return self.internal(k) + len(self.words[k][1])

    def internal(self, k: int) -> int:
        x, letters, y = self.words[k]
        alg = self.algebra.basis
        return self.left.basis.degree(x) + sum(alg.degree(a) for a in letters) + self.right.basis.degree(y)

    def level(self, k: int) -> int:
        return len(self.words[k][1])

    def label(self, k: int) -> str:
        x, letters, y = self.words[k]
        inner = "|".join(self.algebra.basis.names[a] for a in letters)
        body = f"{self.left.basis.names[x]}|{inner}|{self.right.basis.names[y]}" if letters else (
            f"{self.left.basis.names[x]}|{self.right.basis.names[y]}"
        )
        return f"[{body}]"

    @property
    def basis(self) -> Basis:
        return Basis(tuple(self.label(k) for k in range(len(self.words))), tuple(self.degree(k) for k in range(len(self.words))))

    def total_degrees(self) -> List[int]:
        return sorted({self.degree(k) for k in range(len(self.words))}, reverse=True)

    def in_degree(self, t: int) -> List[int]:
        return [k for k in range(len(self.words)) if self.degree(k) == t]

    def matrix(self, t: int) -> np.ndarray:
        """∂: C_t → C_{t−1}."""
        cols = self.in_degree(t)
        rows = self.in_degree(t - 1)
        pos = {k: r for r, k in enumerate(rows)}
        mat = zeros(len(rows), len(cols))
        for c, k in enumerate(cols):
            for w in self.boundary.get(k, ()):
                mat[pos[w], c] ^= 1
        return mat

    def reported_degrees(self) -> List[int]:
        degrees = self.total_degrees()
        if self.window is None:
            return degrees
        lo, hi = self.window
        return [t for t in degrees if lo <= t <= hi]

    def check_square(self) -> None:
        for t in self.total_degrees():
            upper = self.matrix(t)
            lower = self.matrix(t - 1)
            if upper.size and lower.size and not is_zero(matmul(lower, upper)):
                raise ChainComplexError("box tensor differential squares to nonzero", degree=t)

    def homology(self) -> Dict[int, int]:
        """dim H_t by total degree over the reported window, without certification."""
        out = {}
        for t in self.reported_degrees():
            dim = len(self.in_degree(t))
            out_rank = rank(self.matrix(t)) if dim else 0
            in_mat = self.matrix(t + 1)
            in_rank = rank(in_mat) if in_mat.size else 0
            h = dim - out_rank - in_rank
            if h:
                out[t] = h
        return out

    def stable_homology(self) -> BoxHomology:
        """
        Homology certified degree by degree: a total degree counts only when
        the complex rebuilt at n_max + 1 has the same homology there.
        """
        now = self.homology()
        longer = box_tensor(self.left, self.right, self.n_max + 1, self.window, normalized=self.normalized).homology()
        degrees = sorted(set(self.reported_degrees()) | set(longer), reverse=True)
        certified = [t for t in degrees if now.get(t, 0) == longer.get(t, 0)]
        uncertified = [t for t in degrees if now.get(t, 0) != longer.get(t, 0)]
        if uncertified:
            logger.warning("box homology not stable in n_max", n_max=self.n_max, degrees=uncertified)
        return BoxHomology(n_max=self.n_max, dims=now, certified=certified, uncertified=uncertified)

    def preserves_internal_degree(self) -> bool:
        return all(self.internal(w) == self.internal(k) for k, ws in self.boundary.items() for w in ws)

    def bigraded_homology(self) -> BigradedTable:
        """
        Homology by (filtration n, internal j) for differentials that keep the
        internal degree; row n = n_max is uncertified.
        """
        if not self.preserves_internal_degree():
            raise KindMismatch("differential mixes internal degrees; use total-degree homology")
        cells: Dict[Tuple[int, int], List[int]] = {}
        for k in range(len(self.words)):
            cells.setdefault((self.level(k), self.internal(k)), []).append(k)

        def block(n: int, j: int) -> np.ndarray:
            cols = cells.get((n, j), [])
            rows = cells.get((n - 1, j), [])
            pos = {k: r for r, k in enumerate(rows)}
            mat = zeros(len(rows), len(cols))
            for c, k in enumerate(cols):
                for w in self.boundary.get(k, ()):
                    if w in pos:
                        mat[pos[w], c] ^= 1
            return mat

        entries = {}
        for (n, j), members in cells.items():
            if self.window is not None and not self.window[0] <= n + j <= self.window[1]:
                continue
            out = block(n, j)
            inc = block(n + 1, j)
            h = len(members) - (rank(out) if out.size else 0) - (rank(inc) if inc.size else 0)
            if h:
                entries[(n, j)] = h
        js = [j for (_, j) in cells] or [0]
        uncertified = frozenset((self.n_max, j) for j in range(min(js), max(js) + 1))
        return BigradedTable(entries, (0, self.n_max), (min(js), max(js)), "box", uncertified)

    def to_document(self) -> dict:
        return {
            "n_max": self.n_max,
            "stages": {
                str(n): sum(1 for k in range(len(self.words)) if self.level(k) == n)
                for n in range(self.n_max + 1)
            },
            "degrees": {str(t): len(self.in_degree(t)) for t in self.total_degrees()},
            "differential": {
                str(t): self.matrix(t).tolist() for t in self.total_degrees() if self.matrix(t).size
            },
        }


def _letters(alg: AInfAlgebra, normalized: bool) -> List[Tuple[int, int]]:
    return [(a, alg.basis.degree(a) + 1) for a in range(len(alg.basis)) if not (normalized and a == alg.unit)]


def _enumerate_words(
    left: AInfModule, right: AInfModule, alg: AInfAlgebra, n_max: int, normalized: bool, window: Window
) -> List[Word]:
    m_slot = [(x, left.basis.degree(x)) for x in range(len(left.basis))]
    n_slot = [(y, right.basis.degree(y)) for y in range(len(right.basis))]
    a_slot = _letters(alg, normalized)
    words: List[Word] = []
    for n in range(n_max + 1):
        slots = [m_slot] + [a_slot] * n + [n_slot]
        if window is None:
            lo = sum(min((d for _, d in s), default=0) for s in slots)
            hi = sum(max((d for _, d in s), default=0) for s in slots)
        else:
            lo, hi = window[0] - 1, window[1] + 1
        for tup in enumerate_tuples(slots, frozenset(range(lo, hi + 1))):
            words.append((tup[0], tuple(tup[1:-1]), tup[-1]))
    return words


def _word_boundary(word: Word, left: AInfModule, right: AInfModule, alg: AInfAlgebra, normalized: bool) -> set:
    x, letters, y = word
    n = len(letters)
    acc: set = set()
    for i in range(n + 1):
        for z in left.op(0, (x,) + letters[:i]):
            acc ^= {(z, letters[i:], y)}
    for j in range(1, n + 1):
        for l in range(n - j + 1):
            for b in alg.op(j, letters[l:l + j]):
                if normalized and b == alg.unit:
                    continue
                acc ^= {(x, letters[:l] + (b,) + letters[l + j:], y)}
    for i in range(n + 1):
        for z in right.op(i, letters[n - i:] + (y,)):
            acc ^= {(x, letters[:n - i], z)}
    return acc


def box_tensor(
    left: AInfModule,
    right: AInfModule,
    n_max: int,
    window: Window = None,
    check: bool = True,
    normalized: Optional[bool] = None,
) -> BoxTensorComplex:
    """
    M ⊠ N for a right module (or bimodule) M and a left module N over the
    same algebra. Inputs failing their relation checks are refused.
    """
    if left.side == "left" or right.side != "left":
        raise KindMismatch("box tensor takes a right module (or bimodule) and a left module")
    alg = left.algebra
    if not _same_algebra(alg, right.algebra):
        raise KindMismatch("box tensor factors live over different algebras")
    if check:
        _check_inputs(left, right, n_max)
    if normalized is None:
        normalized = module_is_strictly_unital(left) and module_is_strictly_unital(right)

    words = _enumerate_words(left, right, alg, n_max, normalized, window)
    index = {w: k for k, w in enumerate(words)}
    boundary: Dict[int, Chain] = {}
    for k, w in enumerate(words):
        out = frozenset(index[v] for v in _word_boundary(w, left, right, alg, normalized) if v in index)
        if out:
            boundary[k] = out
    box = BoxTensorComplex(left, right, alg, n_max, tuple(words), index, boundary, normalized, window)
    box.check_square()
    logger.info("box tensor built", words=len(words), n_max=n_max, normalized=normalized)
    return box


def left_module_on_box(
    bimodule: AInfModule,
    right: AInfModule,
    n_max: int,
    window: Window = None,
    check: bool = True,
) -> Tuple[BoxTensorComplex, AInfModule]:
    """
    The left A∞-module M ⊠ N of a bimodule M:
    m(c₁…c_k, [x|b₁|…|y]) = Σ_l [m(c₁…c_k, x, b₁…b_{l−1}) | b_l | … | y].
    """
    if bimodule.side != "bimodule":
        raise KindMismatch("left_module_on_box needs a bimodule")
    box = box_tensor(bimodule, right, n_max, window, check)
    by_x: Dict[int, List[Tuple[int, Tuple[int, ...], Tuple[int, ...], Chain]]] = {}
    for (q, args), out in bimodule.ops.items():
        if q >= 1 and out:
            by_x.setdefault(args[q], []).append((q, args[:q], args[q + 1:], out))

    ops: Dict[ModuleKey, set] = {}
    for k, out in box.boundary.items():
        ops[(0, (k,))] = set(out)
    for k, (x, letters, y) in enumerate(box.words):
        for q, lefts, rights, out in by_x.get(x, ()):
            if letters[: len(rights)] != rights:
                continue
            rest = letters[len(rights):]
            key = (q, lefts + (k,))
            for z in out:
                hit = box.index.get((z, rest, y))
                if hit is not None:
                    ops.setdefault(key, set()).symmetric_difference_update({hit})
    table = {key: frozenset(v) for key, v in ops.items() if v}
    module = AInfModule("left", box.basis, table, box.algebra, f"{bimodule.name} box {right.name}")
    logger.info("left module on box tensor", entries=len(table))
    return box, module


# ---------------------------------------------------------------------------
# mapping cones


class TriangleLine(BaseModel):
    degree: int
    cone: int
    coker: int
    ker: int


class TriangleReport(BaseModel):
    """dim H_d(cone) = dim coker f_* in degree d + dim ker f_* in degree d − 1."""

    exact: bool
    lines: List[TriangleLine] = Field(default_factory=list)


def _homology_dims(chains: ChainLevel) -> Dict[int, int]:
    out = {}
    for d in sorted(chains.basis.degree_set(), reverse=True):
        n = len(chains.basis.in_degree(d))
        m_out = chains.matrix(d)
        m_in = chains.matrix(d + 1)
        h = n - (rank(m_out) if m_out.size else 0) - (rank(m_in) if m_in.size else 0)
        if h:
            out[d] = h
    return out


def _induced_rank(f: AInfMorphism, d: int) -> int:
    """Rank of f_* : H_d(S) → H_d(T)."""
    src = module_chains(f.source)
    tgt = module_chains(f.target)
    cycles = src.cycles(d)
    bounds = tgt.boundary_columns(d)
    n_t = len(tgt.basis.in_degree(d))
    if not cycles or n_t == 0:
        return 0
    images = np.stack(
        [tgt.basis.vector(f.apply(1, [c], 0), d) for c in cycles], axis=1
    )
    base = rank(bounds) if bounds.size else 0
    stacked = np.concatenate([bounds, images], axis=1) if bounds.size else images
    return rank(stacked) - base


@dataclass(frozen=True, eq=False)
class MappingCone:
    """Cone of f: S → T with basis s·x (degree deg x + 1) and t·y."""

    morphism: Optional[AInfMorphism]
    module: AInfModule
    chains: ChainLevel = field(repr=False)

    def homology(self) -> Dict[int, int]:
        return _homology_dims(self.chains)

    def is_acyclic(self) -> bool:
        return not self.homology()

    def check_square(self) -> None:
        for d in sorted(self.chains.basis.degree_set(), reverse=True):
            upper = self.chains.matrix(d)
            lower = self.chains.matrix(d - 1)
            if upper.size and lower.size and not is_zero(matmul(lower, upper)):
                raise ChainComplexError("cone differential squares to nonzero", degree=d)

    def triangle(self) -> TriangleReport:
        if self.morphism is None:
            raise KindMismatch("triangle bookkeeping needs the underlying morphism")
        f = self.morphism
        h_s = _homology_dims(module_chains(f.source))
        h_t = _homology_dims(module_chains(f.target))
        h_c = self.homology()
        degrees = set(h_c) | set(h_t) | {d + 1 for d in h_s}
        lines = []
        for d in sorted(degrees, reverse=True):
            coker = h_t.get(d, 0) - _induced_rank(f, d)
            ker = h_s.get(d - 1, 0) - _induced_rank(f, d - 1)
            lines.append(TriangleLine(degree=d, cone=h_c.get(d, 0), coker=coker, ker=ker))
        return TriangleReport(exact=all(l.cone == l.coker + l.ker for l in lines), lines=lines)


def mapping_cone(f: AInfMorphism, n_max: int = 4, check: bool = True) -> MappingCone:
    """
    m_n((s,x), a…) = (s, m_n(x, a…)) + (t, f_n(x, a…));
    m_n((t,y), a…) = (t, m_n(y, a…)).
    """
    if f.kind != "module":
        raise KindMismatch("mapping cones are taken of module morphisms")
    src: AInfModule = f.source
    tgt: AInfModule = f.target
    if check:
        require(check_morphism(f, n_max))
    ns = len(src.basis)
    names = tuple(f"s.{n}" for n in src.basis.names) + tuple(f"t.{n}" for n in tgt.basis.names)
    degrees = tuple(d + 1 for d in src.basis.degrees) + tgt.basis.degrees
    basis = Basis(names, degrees)
    ops: Dict[ModuleKey, set] = {}
    for key, out in src.ops.items():
        ops.setdefault(key, set()).symmetric_difference_update(out)
    for table in f.components.values():
        for key, out in table.items():
            ops.setdefault(key, set()).symmetric_difference_update({ns + b for b in out})
    for (q, args), out in tgt.ops.items():
        key = (0, (ns + args[0],) + args[1:])
        ops.setdefault(key, set()).symmetric_difference_update({ns + b for b in out})
    table = {k: frozenset(v) for k, v in ops.items() if v}
    module = AInfModule("right", basis, table, src.algebra, f"cone({f.name})")
    cone = MappingCone(f, module, module_chains(module))
    cone.check_square()
    if check:
        require(check_module_relations(module, n_max))
    logger.info("mapping cone built", dim=len(basis), homology=cone.homology())
    return cone


def iterated_cone(
    f1: AInfMorphism,
    f2: AInfMorphism,
    h: AInfHomotopy,
    n_max: int = 1,
    check: bool = True,
) -> MappingCone:
    """
    C₁[2] ⊕ C₂[1] ⊕ C₃ with ∂(c₁) = ∂c₁ + f¹c₁ + h c₁, ∂(c₂) = ∂c₂ + f²c₂,
    ∂(c₃) = ∂c₃; a differential exactly when h is a nullhomotopy of f²∘f¹.
    """
    if f1.target.basis != f2.source.basis:
        raise KindMismatch("f1 and f2 are not composable")
    c1, c2, c3 = f1.source, f1.target, f2.target
    if check:
        composite = compose(f1, f2)
        require(check_homotopy(composite, zero_morphism(c1, c3), h, n_max))
    n1, n2 = len(c1.basis), len(c2.basis)
    names = (
        tuple(f"1.{n}" for n in c1.basis.names)
        + tuple(f"2.{n}" for n in c2.basis.names)
        + tuple(f"3.{n}" for n in c3.basis.names)
    )
    degrees = (
        tuple(d + 2 for d in c1.basis.degrees)
        + tuple(d + 1 for d in c2.basis.degrees)
        + c3.basis.degrees
    )
    basis = Basis(names, degrees)

    def d(b: int) -> Chain:
        if b < n1:
            single = [frozenset({b})]
            return frozenset(
                set(c1.op(0, (b,)))
                ^ {n1 + v for v in f1.apply(1, single, 0)}
                ^ {n1 + n2 + v for v in h.apply(1, single, 0)}
            )
        if b < n1 + n2:
            k = b - n1
            single = [frozenset({k})]
            return frozenset(
                {n1 + v for v in c2.op(0, (k,))} ^ {n1 + n2 + v for v in f2.apply(1, single, 0)}
            )
        k = b - n1 - n2
        return frozenset(n1 + n2 + v for v in c3.op(0, (k,)))

    table = {(0, (b,)): d(b) for b in range(len(basis)) if d(b)}
    module = AInfModule("right", basis, table, c1.algebra, "iterated cone")
    cone = MappingCone(None, module, module_chains(module))
    cone.check_square()
    return cone
