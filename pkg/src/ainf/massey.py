"""
Massey products and the homology algebra of an A∞-algebra.

Witnesses are found by solving μ₁ s = (product) degree by degree. A triple
product is returned as a coset: a normal-form representative modulo the
indeterminacy plus boundaries, so two runs with different pivoting agree
exactly. Fourfold products enumerate every defining system when the affine
witness spaces are small enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..exceptions import BadInputError, KindMismatch, MasseyUndefined
from ..gf2core import Quotient, image_basis, kernel_basis, quotient, rank, row_reduce, solve
from .structures import ZERO, AInfAlgebra, AInfModule, Basis, Chain, chain_add

logger = structlog.get_logger(__name__)

MAX_WITNESS_DIMENSION = 16


@dataclass(frozen=True, eq=False)
class ChainLevel:
    """A basis with its differential, degree by degree."""

    basis: Basis
    d: Callable[[int], Chain]

    def matrix(self, deg: int) -> np.ndarray:
        cols = self.basis.in_degree(deg)
        rows = self.basis.in_degree(deg - 1)
        pos = {b: k for k, b in enumerate(rows)}
        mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for c, b in enumerate(cols):
            for t in self.d(b):
                mat[pos[t], c] ^= 1
        return mat

    def cycles(self, deg: int) -> List[Chain]:
        mat = self.matrix(deg)
        n = len(self.basis.in_degree(deg))
        if n == 0:
            return []
        if mat.shape[0] == 0:
            ker = np.eye(n, dtype=np.uint8)
        else:
            ker = kernel_basis(mat)
        return [self.basis.chain(ker[:, k], deg) for k in range(ker.shape[1])]

    def boundary_columns(self, deg: int) -> np.ndarray:
        """Columns spanning the boundaries in degree ``deg``."""
        mat = self.matrix(deg + 1)
        if mat.size == 0:
            return np.zeros((len(self.basis.in_degree(deg)), 0), dtype=np.uint8)
        return image_basis(mat)

    def is_cycle(self, chain: Chain) -> bool:
        return not chain_add(*(self.d(b) for b in chain))

    def primitive(self, chain: Chain, deg: int, rng: Optional[np.random.Generator] = None) -> Optional[Chain]:
        """Some s with d s = chain, where ``chain`` sits in degree ``deg``."""
        if not chain:
            return ZERO
        mat = self.matrix(deg + 1)
        rhs = self.basis.vector(chain, deg)
        if mat.shape[1] == 0:
            return None
        sol = solve(mat, rhs, rng)
        return None if sol is None else self.basis.chain(sol, deg + 1)

    def reducer(self, deg: int, extra: Sequence[Chain] = ()) -> Quotient:
        n = len(self.basis.in_degree(deg))
        cols = [self.boundary_columns(deg)]
        if extra:
            cols.append(np.stack([self.basis.vector(c, deg) for c in extra], axis=1))
        return quotient(n, np.concatenate(cols, axis=1) if cols else np.zeros((n, 0), dtype=np.uint8))

    def normal_form(self, chain: Chain, deg: int, red: Quotient) -> Chain:
        if red.ambient == 0:
            return ZERO
        vec = self.basis.vector(chain, deg).reshape(-1, 1)
        return self.basis.chain(red.lift(red.project(vec))[:, 0], deg)


def algebra_chains(alg: AInfAlgebra) -> ChainLevel:
    return ChainLevel(alg.basis, lambda b: alg.op(1, (b,)))


def module_chains(mod: AInfModule) -> ChainLevel:
    # m₁ sits at key (0, (x,)) for every side
    return ChainLevel(mod.basis, lambda b: mod.op(0, (b,)))


@dataclass(frozen=True, eq=False)
class MasseyCoset:
    """A triple product: representative in normal form plus indeterminacy."""

    degree: int
    representative: Chain
    indeterminacy: Tuple[Chain, ...]
    witnesses: Dict[str, Chain]
    chains: ChainLevel = field(repr=False)
    reducer: Quotient = field(repr=False)

    @property
    def is_zero(self) -> bool:
        return not self.representative

    def contains(self, chain: Chain) -> bool:
        if chain and self.chains.basis.chain_degree(chain) != self.degree:
            return False
        return self.chains.normal_form(chain, self.degree, self.reducer) == self.representative

    def __eq__(self, other) -> bool:
        if not isinstance(other, MasseyCoset):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.representative == other.representative
            and self.reducer.pivots == other.reducer.pivots
        )

    def __hash__(self) -> int:
        return hash((self.degree, self.representative))

    def format(self) -> str:
        basis = self.chains.basis
        text = basis.format(self.representative)
        if self.indeterminacy:
            text += " + <" + ", ".join(basis.format(c) for c in self.indeterminacy) + ">"
        return text


def _degree(basis: Basis, chain: Chain, what: str) -> int:
    if not chain:
        raise BadInputError(f"{what} is zero")
    return basis.chain_degree(chain)


def _require_cycle(chains: ChainLevel, chain: Chain, what: str) -> None:
    if not chains.is_cycle(chain):
        raise BadInputError(f"{what} = {chains.basis.format(chain)} is not a cycle")


def _witness(chains: ChainLevel, target: Chain, deg: int, what: str, rng) -> Chain:
    s = chains.primitive(target, deg, rng)
    if s is None:
        raise MasseyUndefined(
            f"{what} = {chains.basis.format(target)} is not a boundary", obstruction=target
        )
    return s


def _independent_mod_boundaries(chains: ChainLevel, deg: int, candidates: Sequence[Chain]) -> Tuple[Chain, ...]:
    """Subset of ``candidates`` independent in homology."""
    bcols = chains.boundary_columns(deg)
    chosen: List[Chain] = []
    current = bcols
    base = rank(current) if current.size else 0
    for c in candidates:
        if not c:
            continue
        vec = chains.basis.vector(c, deg).reshape(-1, 1)
        trial = np.concatenate([current, vec], axis=1) if current.size else vec
        r = rank(trial)
        if r > base:
            chosen.append(c)
            current, base = trial, r
    return tuple(chosen)


def _coset(chains: ChainLevel, rep: Chain, deg: int, indet: Sequence[Chain], witnesses) -> MasseyCoset:
    red = chains.reducer(deg, [c for c in indet if c])
    independent = _independent_mod_boundaries(chains, deg, indet)
    normal = chains.normal_form(rep, deg, red)
    return MasseyCoset(deg, normal, independent, dict(witnesses), chains, red)


def massey3(
    alg: AInfAlgebra,
    a1: Chain,
    a2: Chain,
    a3: Chain,
    rng: Optional[np.random.Generator] = None,
) -> MasseyCoset:
    """⟨a₁, a₂, a₃⟩ = [μ₃(a₁,a₂,a₃) + μ₂(s₁,a₃) + μ₂(a₁,s₂)] with μ₁s₁ = μ₂(a₁,a₂), μ₁s₂ = μ₂(a₂,a₃)."""
    chains = algebra_chains(alg)
    basis = alg.basis
    d1, d2, d3 = (_degree(basis, a, f"a{k}") for k, a in enumerate((a1, a2, a3), 1))
    for k, a in enumerate((a1, a2, a3), 1):
        _require_cycle(chains, a, f"a{k}")
    s1 = _witness(chains, alg.apply(2, [a1, a2]), d1 + d2, "a1·a2", rng)
    s2 = _witness(chains, alg.apply(2, [a2, a3]), d2 + d3, "a2·a3", rng)
    rep = chain_add(alg.apply(3, [a1, a2, a3]), alg.apply(2, [s1, a3]), alg.apply(2, [a1, s2]))
    deg = d1 + d2 + d3 + 1
    indet = [alg.apply(2, [a1, z]) for z in chains.cycles(d2 + d3 + 1)]
    indet += [alg.apply(2, [z, a3]) for z in chains.cycles(d1 + d2 + 1)]
    coset = _coset(chains, rep, deg, indet, {"s1": s1, "s2": s2})
    logger.debug("triple product", degree=deg, zero=coset.is_zero, indeterminacy=len(coset.indeterminacy))
    return coset


def massey3_module(
    mod: AInfModule,
    x: Chain,
    a1: Chain,
    a2: Chain,
    rng: Optional[np.random.Generator] = None,
) -> MasseyCoset:
    """⟨x, a₁, a₂⟩ = [m₃(x,a₁,a₂) + m₂(s₁,a₂) + m₂(x,s₂)] for a right module."""
    if mod.side != "right":
        raise KindMismatch("module triple products are taken in right modules")
    alg = mod.algebra
    mchains = module_chains(mod)
    achains = algebra_chains(alg)
    dx = _degree(mod.basis, x, "x")
    d1 = _degree(alg.basis, a1, "a1")
    d2 = _degree(alg.basis, a2, "a2")
    _require_cycle(mchains, x, "x")
    _require_cycle(achains, a1, "a1")
    _require_cycle(achains, a2, "a2")
    s1 = _witness(mchains, mod.apply(0, [x, a1]), dx + d1, "x·a1", rng)
    s2 = _witness(achains, alg.apply(2, [a1, a2]), d1 + d2, "a1·a2", rng)
    rep = chain_add(mod.apply(0, [x, a1, a2]), mod.apply(0, [s1, a2]), mod.apply(0, [x, s2]))
    deg = dx + d1 + d2 + 1
    indet = [mod.apply(0, [x, z]) for z in achains.cycles(d1 + d2 + 1)]
    indet += [mod.apply(0, [z, a2]) for z in mchains.cycles(dx + d1 + 1)]
    return _coset(mchains, rep, deg, indet, {"s1": s1, "s2": s2})


@dataclass(frozen=True, eq=False)
class MasseySet:
    """Homology classes of ⟨a₁,a₂,a₃,a₄⟩ over the enumerated defining systems."""

    degree: int
    classes: FrozenSet[Chain]
    enumerated: bool
    witness_dimension: int
    systems: int
    chains: ChainLevel = field(repr=False)
    reducer: Quotient = field(repr=False)

    def contains(self, chain: Chain) -> bool:
        return self.chains.normal_form(chain, self.degree, self.reducer) in self.classes

    @property
    def contains_zero(self) -> bool:
        return ZERO in self.classes

    def format(self) -> List[str]:
        return sorted(self.chains.basis.format(c) for c in self.classes)


def _affine(particular: Chain, directions: Sequence[Chain], choice: Sequence[int]) -> Chain:
    return chain_add(particular, *(d for d, bit in zip(directions, choice) if bit))


def _fourfold(
    first: ChainLevel,
    first_apply: Callable[[int, Sequence[Chain]], Chain],
    alg: AInfAlgebra,
    a: Sequence[Chain],
    rng: Optional[np.random.Generator],
    max_dimension: int,
) -> MasseySet:
    """
    Shared enumeration for ⟨a₁,a₂,a₃,a₄⟩. ``first`` carries a₁ and every
    witness built on it; ``first_apply`` evaluates operations whose first
    argument lives there.
    """
    achains = algebra_chains(alg)
    a1, a2, a3, a4 = a
    d = [_degree(first.basis, a1, "a1")] + [_degree(alg.basis, c, f"a{k}") for k, c in enumerate(a[1:], 2)]
    _require_cycle(first, a1, "a1")
    for k, c in enumerate(a[1:], 2):
        _require_cycle(achains, c, f"a{k}")
    s_chains = (first, achains, achains)
    s_deg = [d[0] + d[1] + 1, d[1] + d[2] + 1, d[2] + d[3] + 1]
    s0 = [
        _witness(first, first_apply(2, [a1, a2]), s_deg[0] - 1, "a1·a2", rng),
        _witness(achains, alg.apply(2, [a2, a3]), s_deg[1] - 1, "a2·a3", rng),
        _witness(achains, alg.apply(2, [a3, a4]), s_deg[2] - 1, "a3·a4", rng),
    ]
    s_dirs = [c.cycles(sd) for c, sd in zip(s_chains, s_deg)]
    t_chains = (first, achains)
    t_deg = [d[0] + d[1] + d[2] + 2, d[1] + d[2] + d[3] + 2]
    t_dirs = [c.cycles(td) for c, td in zip(t_chains, t_deg)]
    dim = sum(len(x) for x in s_dirs) + sum(len(x) for x in t_dirs)
    deg = sum(d) + 2
    enumerated = dim <= max_dimension

    def t_targets(s):
        t1 = chain_add(first_apply(3, [a1, a2, a3]), first_apply(2, [s[0], a3]), first_apply(2, [a1, s[1]]))
        t2 = chain_add(alg.apply(3, [a2, a3, a4]), alg.apply(2, [s[1], a4]), alg.apply(2, [a2, s[2]]))
        return t1, t2

    def representative(s, t) -> Chain:
        return chain_add(
            first_apply(4, [a1, a2, a3, a4]),
            first_apply(3, [s[0], a3, a4]),
            first_apply(3, [a1, s[1], a4]),
            first_apply(3, [a1, a2, s[2]]),
            first_apply(2, [t[0], a4]),
            first_apply(2, [a1, t[1]]),
            first_apply(2, [s[0], s[2]]),
        )

    red = first.reducer(deg)
    classes = set()
    systems = 0
    obstruction: Optional[Chain] = None
    s_space = [range(2)] * sum(len(x) for x in s_dirs) if enumerated else []
    for s_bits in product(*s_space):
        offset = 0
        s = []
        for k in range(3):
            n = len(s_dirs[k]) if enumerated else 0
            s.append(_affine(s0[k], s_dirs[k], s_bits[offset:offset + n]))
            offset += n
        targets = t_targets(s)
        t_part = [t_chains[k].primitive(targets[k], t_deg[k] - 1, rng) for k in range(2)]
        if t_part[0] is None or t_part[1] is None:
            obstruction = targets[0] if t_part[0] is None else targets[1]
            continue
        t_space = [range(2)] * (len(t_dirs[0]) + len(t_dirs[1])) if enumerated else []
        for t_bits in product(*t_space):
            n0 = len(t_dirs[0]) if enumerated else 0
            t = (
                _affine(t_part[0], t_dirs[0], t_bits[:n0]),
                _affine(t_part[1], t_dirs[1], t_bits[n0:]),
            )
            systems += 1
            classes.add(first.normal_form(representative(s, t), deg, red))
    if systems == 0:
        raise MasseyUndefined("no defining system: a consecutive triple product does not vanish", obstruction=obstruction)
    if not enumerated:
        logger.warning("witness space too large, single defining system used", dimension=dim)
    logger.info("fourfold product", degree=deg, classes=len(classes), systems=systems)
    return MasseySet(deg, frozenset(classes), enumerated, dim, systems, first, red)


def massey4(
    alg: AInfAlgebra,
    a1: Chain,
    a2: Chain,
    a3: Chain,
    a4: Chain,
    rng: Optional[np.random.Generator] = None,
    max_dimension: int = MAX_WITNESS_DIMENSION,
) -> MasseySet:
    """
    Representative μ₄(a…) + μ₃(s₁,a₃,a₄) + μ₃(a₁,s₂,a₄) + μ₃(a₁,a₂,s₃)
    + μ₂(t₁,a₄) + μ₂(a₁,t₂) + μ₂(s₁,s₃), over all witnesses s_k, t_k.
    """
    return _fourfold(algebra_chains(alg), alg.apply, alg, (a1, a2, a3, a4), rng, max_dimension)


def massey4_module(
    mod: AInfModule,
    x: Chain,
    a1: Chain,
    a2: Chain,
    a3: Chain,
    rng: Optional[np.random.Generator] = None,
    max_dimension: int = MAX_WITNESS_DIMENSION,
) -> MasseySet:
    """⟨x, a₁, a₂, a₃⟩ in a right module: the fourfold formula with m in place of μ wherever x leads."""
    if mod.side != "right":
        raise KindMismatch("module fourfold products are taken in right modules")

    def first_apply(_n: int, chains: Sequence[Chain]) -> Chain:
        return mod.apply(0, chains)

    return _fourfold(module_chains(mod), first_apply, mod.algebra, (x, a1, a2, a3), rng, max_dimension)


@dataclass(frozen=True, eq=False)
class HomologyAlgebra:
    """H(A) with the product induced by μ₂, on a basis of class representatives."""

    classes: Tuple[Tuple[int, Chain], ...]
    products: Dict[Tuple[int, int], FrozenSet[int]]

    def product(self, i: int, j: int) -> FrozenSet[int]:
        return self.products.get((i, j), frozenset())

    def _mult(self, xs: FrozenSet[int], ys: FrozenSet[int]) -> FrozenSet[int]:
        return chain_add(*(self.product(x, y) for x in xs for y in ys))

    def is_associative(self) -> bool:
        n = len(self.classes)
        for i in range(n):
            for j in range(n):
                ij = self.product(i, j)
                for k in range(n):
                    left = self._mult(ij, frozenset({k}))
                    right = self._mult(frozenset({i}), self.product(j, k))
                    if left != right:
                        return False
        return True

    def dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for deg, _ in self.classes:
            out[deg] = out.get(deg, 0) + 1
        return out


def homology_algebra(alg: AInfAlgebra) -> HomologyAlgebra:
    chains = algebra_chains(alg)
    classes: List[Tuple[int, Chain]] = []
    coords: Dict[int, Tuple[Quotient, np.ndarray, List[int]]] = {}
    for deg in sorted(alg.basis.degree_set(), reverse=True):
        cycles = chains.cycles(deg)
        if not cycles:
            continue
        red = chains.reducer(deg)
        proj = red.project(np.stack([alg.basis.vector(c, deg) for c in cycles], axis=1))
        if proj.size == 0:
            continue
        pivots = list(row_reduce(proj).pivots)
        if not pivots:
            continue
        reps = proj[:, pivots]
        ids = []
        for k in pivots:
            ids.append(len(classes))
            classes.append((deg, cycles[k]))
        coords[deg] = (red, reps, ids)

    def express(chain: Chain, deg: int) -> FrozenSet[int]:
        if not chain or deg not in coords:
            return frozenset()
        red, reps, ids = coords[deg]
        vec = red.project(alg.basis.vector(chain, deg).reshape(-1, 1))[:, 0]
        sol = solve(reps, vec)
        if sol is None:
            raise KindMismatch("product of cycles is not a cycle")
        return frozenset(ids[k] for k in np.flatnonzero(sol))

    products: Dict[Tuple[int, int], FrozenSet[int]] = {}
    for i, (di, ci) in enumerate(classes):
        for j, (dj, cj) in enumerate(classes):
            val = express(alg.apply(2, [ci, cj]), di + dj)
            if val:
                products[(i, j)] = val
    return HomologyAlgebra(tuple(classes), products)
