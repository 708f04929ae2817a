"""
Concrete A∞ structures: strict models of R_p and of graded R-modules, the
DG model D = F[Q, T]/(T^{2p}) with dT = Q³, and the V-linear μ₄ candidate on
R_p read off from D.
"""

from __future__ import annotations

from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..exceptions import BadInputError, KindMismatch
from ..rmodule import GradedModule
from ..ring_r import GradedRing, Monomial, ring_r
from .structures import AInfAlgebra, AInfModule, Basis, Chain, ModuleKey

logger = structlog.get_logger(__name__)

# μ₄(Q^a, Q^b, Q^c, Q^d) = V·Q^{a+b+c+d−6} whenever a+b ≥ 3 and c+d ≥ 3.
CANDIDATE_MU4: Tuple[Tuple[Tuple[int, int, int, int], int], ...] = tuple(
    ((a, b, c, d), a + b + c + d - 6)
    for a, b, c, d in product((1, 2), repeat=4)
    if a + b >= 3 and c + d >= 3
)

# Only ⟨Q², Q, Q², Q⟩ and its mirror; fails the relation in arity five.
MINIMAL_MU4: Tuple[Tuple[Tuple[int, int, int, int], int], ...] = (((2, 1, 2, 1), 0), ((1, 2, 1, 2), 0))


def ring_basis(ring: GradedRing, window: Optional[Tuple[int, int]] = None) -> Tuple[Basis, List[Monomial]]:
    lo, hi = window or (ring.bottom_degree(), 0)
    monos = [m for m in ring.monomials() if lo <= ring.degree(m) <= hi]
    basis = Basis(tuple(m.short for m in monos), tuple(ring.degree(m) for m in monos))
    return basis, monos


def strict_ring_algebra(ring: GradedRing, window: Optional[Tuple[int, int]] = None, name: str = "") -> AInfAlgebra:
    """R_p with μ₂ the product and every other operation zero."""
    basis, monos = ring_basis(ring, window)
    index = {m: k for k, m in enumerate(monos)}
    mu2: Dict[Tuple[int, ...], Chain] = {}
    for (i, a), (j, b) in product(enumerate(monos), repeat=2):
        prod = ring.multiply(a, b)
        if prod is not None and prod in index:
            mu2[(i, j)] = frozenset({index[prod]})
    unit = index.get(Monomial(0, 0))
    return AInfAlgebra(basis, {2: mu2}, unit, name or f"R_{ring.p}")


def v_linear_extension(
    ring: GradedRing,
    basis: Basis,
    entries: Iterable[Tuple[Sequence[Monomial], Sequence[Monomial]]],
) -> Dict[Tuple[int, ...], Chain]:
    """
    Extend V-free table entries V-linearly:
    μ(V^{α₁}x₁, …, V^{α_n}x_n) = V^{Σα} μ(x₁, …, x_n), truncated to the basis.
    """
    names = {n: k for k, n in enumerate(basis.names)}
    table: Dict[Tuple[int, ...], set] = {}
    for inputs, outputs in entries:
        for alphas in product(range(ring.p), repeat=len(inputs)):
            shifted = [Monomial(m.v + a, m.q) for m, a in zip(inputs, alphas)]
            if any(s.short not in names for s in shifted):
                continue
            key = tuple(names[s.short] for s in shifted)
            acc = table.setdefault(key, set())
            for out in outputs:
                o = Monomial(out.v + sum(alphas), out.q)
                if ring.contains(o) and o.short in names:
                    acc ^= {names[o.short]}
    return {k: frozenset(v) for k, v in table.items() if v}


def candidate_algebra(
    precision: int,
    window: Optional[Tuple[int, int]] = None,
    minimal: bool = False,
) -> AInfAlgebra:
    """Strict R_p plus the V-linear μ₄ entries (μ₃ = 0)."""
    ring = ring_r(precision)
    strict = strict_ring_algebra(ring, window)
    rule = MINIMAL_MU4 if minimal else CANDIDATE_MU4
    entries = [
        ([Monomial(0, e) for e in exps], [Monomial(1, out)])
        for exps, out in rule
    ]
    mu4 = v_linear_extension(ring, strict.basis, entries)
    name = f"R_{precision} candidate" + (" (minimal)" if minimal else "")
    logger.debug("candidate structure built", entries=len(mu4), minimal=minimal)
    return strict.with_ops({2: strict.ops[2], 4: mu4}, name)


def algebra_as_module(alg: AInfAlgebra, side: str = "right") -> AInfModule:
    """A over itself with m_i = μ_i."""
    if side not in ("right", "left"):
        raise KindMismatch("algebra_as_module builds one-sided modules")
    ops: Dict[ModuleKey, Chain] = {}
    for i, table in alg.ops.items():
        for key, out in table.items():
            q = 0 if side == "right" else i - 1
            ops[(q, key)] = out
    return AInfModule(side, alg.basis, ops, alg, f"{alg.name} as {side} module")


def ring_bimodule(alg: AInfAlgebra) -> AInfModule:
    """A as a bimodule over itself: m_{1,2} and m_{2,1} are μ₂, nothing higher."""
    ops: Dict[ModuleKey, Chain] = {}
    for key, out in alg.ops.get(1, {}).items():
        ops[(0, key)] = out
    for (a, b), out in alg.ops.get(2, {}).items():
        ops[(0, (a, b))] = out
        ops[(1, (a, b))] = out
    return AInfModule("bimodule", alg.basis, ops, alg, f"{alg.name} bimodule")


def _module_basis(gm: GradedModule) -> Tuple[Basis, Dict[Tuple[int, int], int]]:
    names: List[str] = []
    degrees: List[int] = []
    index: Dict[Tuple[int, int], int] = {}
    seen = set()
    for d in gm.degrees():
        for k in range(gm.dim(d)):
            label = gm.label(d, k)
            if label in seen:
                label = f"{label}@{d}"
            seen.add(label)
            index[(d, k)] = len(names)
            names.append(label)
            degrees.append(d)
    return Basis(tuple(names), tuple(degrees)), index


def strict_module(gm: GradedModule, alg: AInfAlgebra, side: str = "right") -> AInfModule:
    """
    The strict A∞-module of a graded module over the strict model of its ring:
    m₂ is the ring action and everything else vanishes.
    """
    if side not in ("right", "left"):
        raise KindMismatch("strict_module builds one-sided modules")
    ring = gm.ring
    basis, index = _module_basis(gm)
    ops: Dict[ModuleKey, Chain] = {}
    for a, name in enumerate(alg.basis.names):
        mono = Monomial.parse(name)
        if not ring.contains(mono):
            raise BadInputError(f"algebra element {name} is not in the module's ring")
        shift = ring.degree(mono)
        for d in gm.degrees():
            target_dim = gm.dim(d + shift)
            if target_dim == 0:
                continue
            mat = gm.action(mono, d)
            for k in range(gm.dim(d)):
                hits = np.flatnonzero(mat[:, k])
                if not hits.size:
                    continue
                out = frozenset(index[(d + shift, int(r))] for r in hits)
                x = index[(d, k)]
                key = (0, (x, a)) if side == "right" else (1, (a, x))
                ops[key] = out
    name = gm.name or "module"
    return AInfModule(side, basis, ops, alg, name, graded_source=gm)


def dg_model(precision: int, window: Optional[Tuple[int, int]] = None) -> AInfAlgebra:
    """
    D = F[Q, T]/(T^{2p}) with deg T = −2 and dT = Q³, cut below the window.

    Its homology is R_p with V = [T²].
    """
    ring = ring_r(precision)
    lo, hi = window or (ring.bottom_degree(), 0)
    elems: List[Tuple[int, int]] = []
    for b in range(2 * precision):
        for a in range(0, -lo + 1):
            if lo <= -a - 2 * b <= hi:
                elems.append((a, b))
    elems.sort(key=lambda e: (e[0] + 2 * e[1], e))

    def label(a: int, b: int) -> str:
        if a == 0 and b == 0:
            return "1"
        q = "" if a == 0 else ("Q" if a == 1 else f"Q{a}")
        t = "" if b == 0 else ("T" if b == 1 else f"T{b}")
        return q + t

    basis = Basis(tuple(label(a, b) for a, b in elems), tuple(-a - 2 * b for a, b in elems))
    index = {e: k for k, e in enumerate(elems)}
    mu1: Dict[Tuple[int, ...], Chain] = {}
    for (a, b), k in index.items():
        if b % 2:
            hit = index.get((a + 3, b - 1))
            if hit is not None:
                mu1[(k,)] = frozenset({hit})
    mu2: Dict[Tuple[int, ...], Chain] = {}
    for ((a1, b1), i), ((a2, b2), j) in product(index.items(), repeat=2):
        hit = index.get((a1 + a2, b1 + b2))
        if hit is not None:
            mu2[(i, j)] = frozenset({hit})
    return AInfAlgebra(basis, {1: mu1, 2: mu2}, index.get((0, 0)), f"D_{precision}")


def flip_entry(table: Mapping, key, element: int) -> Dict:
    """Copy of ``table`` with ``element`` toggled in the output at ``key``."""
    out = dict(table)
    out[key] = frozenset(set(out.get(key, frozenset())) ^ {element})
    return out
