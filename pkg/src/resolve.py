"""
Free resolutions, bar complexes and bigraded Tor.

Tor is computed along two independent paths: a minimal free resolution of the
left module tensored with the right one (the main path), and the two-sided
bar complex B(M, R, N) (budget-limited, used as a cross-check).

Entries are indexed (i, j): homological degree i ≥ 0, internal degree j. An
entry is certified when j > top(M) + top(N) + p·deg V and both materialized
module windows reach the degrees the entry depends on; outside that range
truncation may change the answer, and such entries are flagged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, Field

from .exceptions import ModuleStructureError, PrecisionMismatch, StructureFormatError, WindowOverflow
from .gf2core import BitMatrix, GradedMap, identity, kernel_basis, matmul, rank, zeros
from .ring_r import GradedRing, Monomial, ring_u
from .rmodule import (
    FreeModule,
    GradedModule,
    ModuleMorphism,
    catalogue,
    free_module,
    tensor_over_F,
)

logger = structlog.get_logger(__name__)

Cell = Tuple[int, int]


# -- bigraded tables ----------------------------------------------------------------


@dataclass(frozen=True)
class BigradedTable:
    """Dimensions indexed by (homological degree i, internal degree j)."""

    entries: Mapping[Cell, int]
    i_range: Tuple[int, int]
    j_range: Tuple[int, int]
    provenance: str
    uncertified: FrozenSet[Cell] = frozenset()
    skipped: FrozenSet[Cell] = frozenset()

    def get(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def cells(self) -> Iterable[Cell]:
        for i in range(self.i_range[0], self.i_range[1] + 1):
            for j in range(self.j_range[1], self.j_range[0] - 1, -1):
                yield (i, j)

    def nonzero(self) -> Dict[Cell, int]:
        return {c: n for c, n in self.entries.items() if n}

    def in_range(self, i: int, j: int) -> bool:
        return self.i_range[0] <= i <= self.i_range[1] and self.j_range[0] <= j <= self.j_range[1]

    def is_certified(self, i: int, j: int) -> bool:
        """Cells outside the computed ranges are never certified."""
        if not self.in_range(i, j):
            return False
        return (i, j) not in self.uncertified and (i, j) not in self.skipped

    def certified_nonzero(self) -> Dict[Cell, int]:
        return {c: n for c, n in self.nonzero().items() if self.is_certified(*c)}

    def totals(self, certified_only: bool = False) -> Dict[int, int]:
        """Dimension per total degree i + j."""
        out: Dict[int, int] = {}
        for (i, j), n in self.nonzero().items():
            if certified_only and not self.is_certified(i, j):
                continue
            out[i + j] = out.get(i + j, 0) + n
        return out

    def column(self, i: int) -> Dict[int, int]:
        return {j: n for (a, j), n in self.nonzero().items() if a == i}

    def shifted(self, dj: int) -> "BigradedTable":
        """Shift every internal degree by dj."""
        return BigradedTable(
            {(i, j + dj): n for (i, j), n in self.entries.items()},
            self.i_range,
            (self.j_range[0] + dj, self.j_range[1] + dj),
            self.provenance,
            frozenset((i, j + dj) for i, j in self.uncertified),
            frozenset((i, j + dj) for i, j in self.skipped),
        )

    def to_document(self) -> dict:
        return {
            "provenance": self.provenance,
            "i_range": list(self.i_range),
            "j_range": list(self.j_range),
            "entries": [[i, j, n] for (i, j), n in sorted(self.nonzero().items())],
            "uncertified": sorted([list(c) for c in self.uncertified]),
            "skipped": sorted([list(c) for c in self.skipped]),
        }

    @classmethod
    def from_document(cls, doc: dict) -> "BigradedTable":
        try:
            return cls(
                {(int(i), int(j)): int(n) for i, j, n in doc["entries"]},
                tuple(doc["i_range"]),
                tuple(doc["j_range"]),
                doc.get("provenance", "golden"),
                frozenset(tuple(c) for c in doc.get("uncertified", [])),
                frozenset(tuple(c) for c in doc.get("skipped", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureFormatError(f"malformed table document: {exc}") from exc


def load_table(path: Path) -> BigradedTable:
    try:
        return BigradedTable.from_document(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError) as exc:
        raise StructureFormatError(f"cannot read table {path}: {exc}") from exc


class CrossCheckReport(BaseModel):
    agree: bool
    compared: int
    mismatches: List[Tuple[int, int, int, int]] = Field(default_factory=list)


def cross_check(a: BigradedTable, b: BigradedTable) -> CrossCheckReport:
    """Compare two tables on the cells both certify."""
    mismatches = []
    compared = 0
    for cell in set(a.cells()) & set(b.cells()):
        if not (a.is_certified(*cell) and b.is_certified(*cell)):
            continue
        compared += 1
        if a.get(*cell) != b.get(*cell):
            mismatches.append((cell[0], cell[1], a.get(*cell), b.get(*cell)))
    report = CrossCheckReport(agree=not mismatches, compared=compared, mismatches=sorted(mismatches))
    logger.info("tor cross-check", agree=report.agree, compared=compared, mismatches=len(mismatches))
    return report


# -- free resolutions ---------------------------------------------------------------


def free_map(source: FreeModule, target: GradedModule, images: Sequence[np.ndarray]) -> ModuleMorphism:
    """R-linear map determined by the images of the generators."""
    blocks: Dict[int, BitMatrix] = {}
    for d in source.module.degrees():
        mat = zeros(target.dim(d), source.module.dim(d))
        for col, (k, mono) in enumerate(source.basis(d)):
            g = source.generators[k]
            if target.dim(g) == 0 or not images[k].any():
                continue
            mat[:, col] = matmul(target.action(mono, g), images[k].reshape(-1, 1)).reshape(-1)
        blocks[d] = mat
    return ModuleMorphism(source.module, target, GradedMap(source.module.space, target.space, 0, blocks))


def minimal_generators(module: GradedModule, sub: Mapping[int, BitMatrix]) -> List[Tuple[int, np.ndarray]]:
    """
    Minimal generators of the submodule whose degree-d part is spanned by the
    columns of ``sub[d]``, chosen from the highest degree downward.
    """
    ring = module.ring
    chosen: List[Tuple[int, np.ndarray]] = []
    for d in sorted(sub, reverse=True):
        span = sub[d]
        if span.shape[1] == 0:
            continue
        pieces = []
        for gen in ring.generators():
            src = d - ring.degree(gen)
            if src in sub and sub[src].shape[1]:
                pieces.append(matmul(module.generator_action(gen, src), sub[src]))
        current = np.concatenate(pieces, axis=1) if pieces else zeros(module.dim(d), 0)
        current_rank = rank(current) if current.size else 0
        for c in range(span.shape[1]):
            candidate = np.concatenate([current, span[:, c: c + 1]], axis=1)
            new_rank = rank(candidate)
            if new_rank > current_rank:
                chosen.append((d, span[:, c].copy()))
                current, current_rank = candidate, new_rank
    return chosen


@dataclass(eq=False)
class FreeResolution:
    """
    P_k free with generator degrees ``terms[k].generators``.

    ``images[k][a]`` lists the terms (b, monomial) of δ_k(e_a) in P_{k−1}
    for k ≥ 1; ``augmentation`` is ε: P_0 → target.
    """

    target: GradedModule
    window: Tuple[int, int]
    terms: List[FreeModule]
    augmentation: ModuleMorphism
    diffs: List[ModuleMorphism] = field(default_factory=list)
    images: List[List[Tuple[Tuple[int, Monomial], ...]]] = field(default_factory=list)
    exhausted: bool = False

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def generator_degrees(self, k: int) -> Tuple[int, ...]:
        return self.terms[k].generators

    def check_squares(self) -> List[int]:
        """Stages k where δ_k ∘ δ_{k+1} (or ε ∘ δ_1) is nonzero."""
        bad = []
        maps = [self.augmentation] + self.diffs
        for k in range(1, len(maps)):
            if not maps[k - 1].map.compose(maps[k].map).is_zero():
                bad.append(k)
        return bad

    def exactness_defects(self) -> Dict[Tuple[int, int], int]:
        """(stage, degree) → dim H inside the window; empty when exact."""
        defects = {}
        maps = [self.augmentation] + self.diffs
        for k, term in enumerate(self.terms):
            incoming = self.diffs[k] if k < len(self.diffs) else None
            if incoming is None:
                continue
            for d in term.module.degrees():
                nullity = term.module.dim(d) - rank(maps[k].map.block(d))
                h = nullity - rank(incoming.map.block(d))
                if h:
                    defects[(k, d)] = h
        return defects

    def kernel_dims(self, k: int) -> Dict[int, int]:
        """Graded dimensions of ker δ_k (k = 0 means ker ε)."""
        phi = ([self.augmentation] + self.diffs)[k]
        term = self.terms[k].module
        out = {}
        for d in term.degrees():
            n = term.dim(d) - rank(phi.map.block(d))
            if n:
                out[d] = n
        return out


def _vector_terms(free: FreeModule, d: int, vec: np.ndarray) -> Tuple[Tuple[int, Monomial], ...]:
    basis = free.basis(d)
    return tuple(basis[i] for i in np.flatnonzero(vec))


def free_resolution(
    module: GradedModule,
    length: int,
    window: Optional[Tuple[int, int]] = None,
) -> FreeResolution:
    """
    Minimal free resolution by iterated kernels and minimal generators.

    Kernels are exact in every degree of the window. When a kernel is zero in
    the window but a free term is cut off by the window bottom, the true
    kernel may live below the window: the result is marked ``exhausted``.
    """
    window = window or module.window
    ring = module.ring
    lo = window[0]

    gens = minimal_generators(module, {d: identity(module.dim(d)) for d in module.degrees() if d >= lo})
    p0 = free_module([d for d, _ in gens], ring, window, name="P0")
    eps = free_map(p0, module, [v for _, v in gens])
    res = FreeResolution(module, window, [p0], eps)
    phi = eps

    for k in range(1, length + 1):
        previous = res.terms[-1]
        kernel = {d: kernel_basis(phi.map.block(d)) for d in previous.module.degrees()}
        gens = minimal_generators(previous.module, kernel)
        if not gens:
            truncated = any(g + ring.bottom_degree() < lo for g in previous.generators)
            if truncated:
                res.exhausted = True
                logger.warning("resolution window exhausted", stage=k, window=window)
            break
        term = free_module([d for d, _ in gens], ring, window, name=f"P{k}")
        delta = free_map(term, previous.module, [v for _, v in gens])
        res.terms.append(term)
        res.diffs.append(delta)
        res.images.append([_vector_terms(previous, d, v) for d, v in gens])
        phi = delta
        logger.debug("resolution stage", stage=k, generators=term.generators)

    logger.info("free resolution computed", module=module.name, length=res.length, exhausted=res.exhausted)
    return res


def periodic_resolution_2311(n_max: int, precision=6, window: Optional[Tuple[int, int]] = None) -> FreeResolution:
    """
    The two-periodic resolution of M_2311.

    P_{2n} = R⟨−3n⟩ ⊕ R⟨−3n−2⟩ and P_{2n+1} = R⟨−3n−1⟩ ⊕ R⟨−3n−4⟩, with
    δ_{2n}: e0 ↦ Q²e0, e1 ↦ Ve0 + Qe1 and δ_{2n+1}: e0 ↦ Qe0, e1 ↦ Ve0 + Q²e1.
    ε sends e0 to the top of the degree-0 tower and e1 to the top of the
    degree −2 tower.
    """
    m = catalogue("M_2311", precision, window).module
    ring = m.ring
    window = window or m.window
    V, Q, Q2 = Monomial(1, 0), Monomial(0, 1), Monomial(0, 2)

    def degrees(k: int) -> List[int]:
        n, odd = divmod(k, 2)
        return [-3 * n - 1, -3 * n - 4] if odd else [-3 * n, -3 * n - 2]

    p0 = free_module(degrees(0), ring, window, name="P0")
    # M's degree-0 part is the top of tower 3; degree −2 holds only the top of tower 1.
    eps_images = [np.ones(m.dim(0), dtype=np.uint8), np.ones(m.dim(-2), dtype=np.uint8)]
    eps = free_map(p0, m, eps_images)
    res = FreeResolution(m, window, [p0], eps)

    for k in range(1, n_max + 1):
        previous = res.terms[-1]
        term = free_module(degrees(k), ring, window, name=f"P{k}")
        if k % 2:
            pattern = (((0, Q),), ((0, V), (1, Q2)))
        else:
            pattern = (((0, Q2),), ((0, V), (1, Q)))
        vectors = [previous.vector(terms, g) for terms, g in zip(pattern, term.generators)]
        res.terms.append(term)
        res.diffs.append(free_map(term, previous.module, vectors))
        res.images.append([tuple(terms) for terms in pattern])
    logger.info("periodic resolution built", stages=n_max)
    return res


# -- bar complex ----------------------------------------------------------------------

Element = Tuple[int, int]  # (degree, index) in a module basis


@dataclass(frozen=True, order=True)
class BarWord:
    """x[γ₁|…|γₙ]y."""

    x: Element
    gammas: Tuple[Monomial, ...]
    y: Element

    @property
    def n(self) -> int:
        return len(self.gammas)

    def label(self, m: GradedModule, n: GradedModule) -> str:
        inner = "|".join(g.short for g in self.gammas)
        return f"{m.label(*self.x)}[{inner}]{n.label(*self.y)}"


def bar_differential(word: BarWord, m: GradedModule, n: GradedModule) -> FrozenSet[BarWord]:
    """
    δ(x[γ₁|…|γₙ]y) = (xγ₁)[γ₂|…]y + Σ x[…|γᵢγᵢ₊₁|…]y + x[…|γₙ₋₁](γₙy), mod 2.
    """
    ring = m.ring
    out: set = set()
    if not word.gammas:
        return frozenset()

    first = word.gammas[0]
    col = m.action(first, word.x[0])[:, word.x[1]]
    for k in np.flatnonzero(col):
        out ^= {BarWord((word.x[0] + ring.degree(first), int(k)), word.gammas[1:], word.y)}

    for i in range(len(word.gammas) - 1):
        prod = ring.multiply(word.gammas[i], word.gammas[i + 1])
        if prod is not None:
            out ^= {BarWord(word.x, word.gammas[:i] + (prod,) + word.gammas[i + 2:], word.y)}

    last = word.gammas[-1]
    col = n.action(last, word.y[0])[:, word.y[1]]
    for k in np.flatnonzero(col):
        out ^= {BarWord(word.x, word.gammas[:-1], (word.y[0] + ring.degree(last), int(k)))}
    return frozenset(out)


def _words_by_degree(ring: GradedRing, n_max: int, w_min: int) -> List[Dict[int, List[Tuple[Monomial, ...]]]]:
    table: List[Dict[int, List[Tuple[Monomial, ...]]]] = [{0: [()]}]
    letters = ring.nonunit_monomials()
    for _ in range(n_max):
        nxt: Dict[int, List[Tuple[Monomial, ...]]] = {}
        for w, words in table[-1].items():
            for g in letters:
                d = w + ring.degree(g)
                if d < w_min:
                    continue
                nxt.setdefault(d, []).extend(word + (g,) for word in words)
        table.append(nxt)
    return table


@dataclass(eq=False)
class BarComplex:
    """Stages B_n(M, R, N) in internal degrees of ``j_range``, n ≤ n_max."""

    left: GradedModule
    right: GradedModule
    n_max: int
    j_range: Tuple[int, int]
    basis: Dict[Cell, List[BarWord]]
    diffs: Dict[Cell, BitMatrix]
    skipped: FrozenSet[Cell] = frozenset()

    def dim(self, n: int, j: int) -> int:
        return len(self.basis.get((n, j), ()))

    def homology(self, n: int, j: int) -> Optional[int]:
        if {(n - 1, j), (n, j), (n + 1, j)} & self.skipped:
            return None
        out = self.diffs.get((n, j))
        inc = self.diffs.get((n + 1, j))
        return self.dim(n, j) - (rank(out) if out is not None and out.size else 0) - (
            rank(inc) if inc is not None and inc.size else 0
        )


def bar_complex(
    m: GradedModule,
    n: GradedModule,
    n_max: int,
    j_range: Tuple[int, int],
    max_dim: Optional[int] = None,
) -> BarComplex:
    """
    Build B(M, R̄, N) for stages 0…n_max; δ² = 0 is verified on every cell built.

    Cells whose dimension exceeds ``max_dim`` are skipped and recorded.
    """
    if m.ring != n.ring:
        raise PrecisionMismatch("bar complex factors live over different rings")
    if m.top is None or n.top is None:
        raise WindowOverflow("bar complex factor is zero")
    ring = m.ring
    j_lo, j_hi = j_range
    words = _words_by_degree(ring, n_max, j_lo - m.top - n.top)

    basis: Dict[Cell, List[BarWord]] = {}
    skipped = set()
    for stage in range(n_max + 1):
        for j in range(j_lo, j_hi + 1):
            count = sum(
                len(ws) * m.dim(a) * n.dim(j - w - a)
                for w, ws in words[stage].items()
                for a in m.degrees()
            )
            if max_dim is not None and count > max_dim:
                skipped.add((stage, j))
                continue
            cell: List[BarWord] = []
            for w, ws in sorted(words[stage].items(), reverse=True):
                for a in m.degrees():
                    c = j - w - a
                    if n.dim(c) == 0:
                        continue
                    for word in ws:
                        for xi in range(m.dim(a)):
                            for yi in range(n.dim(c)):
                                cell.append(BarWord((a, xi), word, (c, yi)))
            basis[(stage, j)] = cell

    diffs: Dict[Cell, BitMatrix] = {}
    for (stage, j), cell in basis.items():
        if stage == 0 or (stage - 1, j) not in basis:
            continue
        target = {w: k for k, w in enumerate(basis[(stage - 1, j)])}
        mat = zeros(len(target), len(cell))
        for col, word in enumerate(cell):
            for image in bar_differential(word, m, n):
                row = target.get(image)
                if row is not None:
                    mat[row, col] ^= 1
        diffs[(stage, j)] = mat

    for (stage, j), mat in diffs.items():
        lower = diffs.get((stage - 1, j))
        if lower is not None and mat.size and lower.size and matmul(lower, mat).any():
            raise ModuleStructureError(f"bar differential squares to nonzero at stage {stage}, degree {j}")

    if skipped:
        logger.warning("bar cells skipped over budget", cells=len(skipped), max_dim=max_dim)
    logger.debug("bar complex built", cells=len(basis))
    return BarComplex(m, n, n_max, j_range, basis, diffs, frozenset(skipped))


# -- Tor ------------------------------------------------------------------------------------


def default_j_range(m: GradedModule, n: GradedModule) -> Tuple[int, int]:
    hi = m.top + n.top
    lo = hi + m.ring.v_degree * m.ring.p
    if m.floor is not None:
        lo = max(lo, m.floor + n.top)
    if n.floor is not None:
        lo = max(lo, n.floor + m.top)
    return (min(lo, hi), hi)


def _uncertified(m: GradedModule, n: GradedModule, i_range, j_range) -> FrozenSet[Cell]:
    ring = m.ring
    cutoff = m.top + n.top + ring.v_degree * ring.p
    bad = set()
    for j in range(j_range[0], j_range[1] + 1):
        ok = j > cutoff
        ok = ok and (m.floor is None or j - n.top >= m.floor)
        ok = ok and (n.floor is None or j - m.top >= n.floor)
        if not ok:
            bad.update((i, j) for i in range(i_range[0], i_range[1] + 1))
    return frozenset(bad)


def tor_from_resolution(res: FreeResolution, n: GradedModule, i_max: int, j_range: Tuple[int, int]) -> Dict[Cell, int]:
    """dim H_i(P_• ⊗_R N) in internal degree j."""

    def chain_dim(k: int, j: int) -> int:
        if k >= len(res.terms):
            return 0
        return sum(n.dim(j - g) for g in res.terms[k].generators)

    def differential(k: int, j: int) -> Optional[BitMatrix]:
        # δ_k ⊗ 1 from P_k ⊗ N to P_{k−1} ⊗ N in degree j
        if k < 1 or k >= len(res.terms):
            return None
        src_gens = res.terms[k].generators
        tgt_gens = res.terms[k - 1].generators
        tgt_off = np.cumsum([0] + [n.dim(j - g) for g in tgt_gens])
        src_off = np.cumsum([0] + [n.dim(j - g) for g in src_gens])
        mat = zeros(int(tgt_off[-1]), int(src_off[-1]))
        if mat.size == 0:
            return mat
        for a, g in enumerate(src_gens):
            if n.dim(j - g) == 0:
                continue
            for b, mono in res.images[k - 1][a]:
                block = n.action(mono, j - g)
                if block.size:
                    mat[tgt_off[b]: tgt_off[b + 1], src_off[a]: src_off[a + 1]] ^= block
        return mat

    out: Dict[Cell, int] = {}
    for j in range(j_range[0], j_range[1] + 1):
        for i in range(0, i_max + 1):
            dim = chain_dim(i, j)
            if dim == 0:
                continue
            d_out = differential(i, j)
            d_in = differential(i + 1, j)
            h = dim - (rank(d_out) if d_out is not None and d_out.size else 0)
            h -= rank(d_in) if d_in is not None and d_in.size else 0
            if h:
                out[(i, j)] = h
    return out


def tor(
    m: GradedModule,
    n: GradedModule,
    method: str = "resolution",
    i_max: int = 6,
    j_range: Optional[Tuple[int, int]] = None,
    bar_max_dim: Optional[int] = 4000,
) -> BigradedTable:
    """Bigraded Tor_R(M, N) by the chosen method."""
    if m.ring != n.ring:
        raise PrecisionMismatch("Tor factors live over different rings")
    if m.top is None or n.top is None:
        return BigradedTable({}, (0, i_max), j_range or (0, 0), method)
    j_range = j_range or default_j_range(m, n)
    i_range = (0, i_max)

    if method == "resolution":
        # free terms must reach every degree P ⊗ N touches in the j-range
        window = (min(m.window[0], j_range[0] - n.top), max(m.window[1], m.top))
        res = free_resolution(m, i_max + 1, window)
        entries = tor_from_resolution(res, n, i_max, j_range)
        skipped: FrozenSet[Cell] = frozenset()
    elif method == "bar":
        bar = bar_complex(m, n, i_max + 1, j_range, bar_max_dim)
        entries = {}
        skipped_cells = set()
        for i in range(i_max + 1):
            for j in range(j_range[0], j_range[1] + 1):
                h = bar.homology(i, j)
                if h is None:
                    skipped_cells.add((i, j))
                elif h:
                    entries[(i, j)] = h
        skipped = frozenset(skipped_cells)
    else:
        raise ValueError(f"unknown Tor method {method!r}")

    table = BigradedTable(entries, i_range, j_range, method, _uncertified(m, n, i_range, j_range), skipped)
    logger.info(
        "tor computed",
        method=method,
        left=m.name,
        right=n.name,
        nonzero=len(table.nonzero()),
        uncertified=len(table.uncertified),
        skipped=len(skipped),
    )
    return table


# -- modules over a PID -----------------------------------------------------------------------


class PidDegreeLine(BaseModel):
    degree: int
    cone: int
    tor: int


class PidReport(BaseModel):
    """Cone of 1⊗U + U⊗1 versus Tor over F[[U]], per degree."""

    passed: bool
    shift: int
    lines: List[PidDegreeLine]


def _as_u_module(m: GradedModule) -> GradedModule:
    if any(b.any() for b in m.act_q.values()):
        raise ModuleStructureError(f"{m.name or 'module'} has a nonzero Q-action")
    if m.ring.q_order == 1:
        return m
    ring = ring_u(m.ring.precision, u_degree=m.ring.v_degree)
    return GradedModule(m.space, m.act_v, {}, ring, m.offset, m.name)


def tor_pid_cone_check(m: GradedModule, n: GradedModule, i_max: int = 2) -> PidReport:
    """
    Graded dims of the mapping cone of 1⊗U + U⊗1 on M ⊗_F N against Tor
    totals over F[[U]] computed by the resolution path.

    With u = deg U, H(cone)_d matches the Tor classes of total degree d + 1 + u.
    """
    m_u, n_u = _as_u_module(m), _as_u_module(n)
    ring = m_u.ring
    u = ring.v_degree
    u_gen = Monomial(1, 0)
    tensor = tensor_over_F(m_u, n_u)
    big = tensor.module

    def phi(d: int) -> BitMatrix:
        return big.generator_action(u_gen, d) ^ tensor.right_block(u_gen, d)

    table = tor(m_u, n_u, "resolution", i_max=i_max)
    totals = table.totals()
    lo, hi = big.window
    lines = []
    for d in range(hi, lo - 1, -1):
        if d + 1 + u < lo:
            continue
        kernel = big.dim(d) - (rank(phi(d)) if big.dim(d) else 0)
        coker = big.dim(d + 1 + u) - (rank(phi(d + 1)) if big.dim(d + 1) else 0)
        total = d + 1 + u
        cells = [(i, total - i) for i in range(i_max + 1)]
        if any(not table.is_certified(*c) for c in cells):
            continue
        lines.append(PidDegreeLine(degree=d, cone=kernel + coker, tor=totals.get(total, 0)))
    report = PidReport(passed=all(l.cone == l.tor for l in lines), shift=-(1 + u), lines=lines)
    logger.info("PID cone check", passed=report.passed, degrees=len(lines))
    return report
