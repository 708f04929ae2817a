"""
Finite-window graded R-modules.

A module is a graded F₂-space with V- and Q-action blocks keyed by source
degree. Towers F[[V]]⟨k⟩ (top in degree k) are materialized as F[V]/(V^p)
copies cut off at the bottom of the window; the cut is a quotient, so every
degree that is reported has its full set of V-multiples inside the window.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, Field, ValidationError

from .exceptions import (
    DimensionMismatch,
    ModuleStructureError,
    PrecisionMismatch,
    StructureFormatError,
    UnknownCatalogueEntry,
    WindowOverflow,
)
from .gf2core import (
    BitMatrix,
    GradedMap,
    GradedVectorSpace,
    identity,
    is_zero,
    matmul,
    quotient,
    rank,
    zeros,
)
from .ring_r import GradedRing, Monomial, Precision, ring_r, ring_u

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class GradedModule:
    """Graded module over a truncated ring, actions stored blockwise."""

    space: GradedVectorSpace
    act_v: Mapping[int, BitMatrix]
    act_q: Mapping[int, BitMatrix]
    ring: GradedRing
    offset: Fraction = Fraction(0)
    name: str = ""

    def __post_init__(self):
        for label, blocks, shift in (("V", self.act_v, self.ring.v_degree), ("Q", self.act_q, self.ring.q_degree)):
            for d, block in blocks.items():
                expected = (self.space.dim(d + shift), self.space.dim(d))
                if block.shape != expected:
                    raise DimensionMismatch(
                        f"{label}-action block at degree {d} has shape {block.shape}, expected {expected}"
                    )

    @property
    def precision(self) -> Precision:
        return self.ring.precision

    @property
    def window(self) -> Tuple[int, int]:
        return self.space.window

    def dim(self, d: int) -> int:
        return self.space.dim(d)

    def degrees(self) -> Tuple[int, ...]:
        return self.space.degrees()

    @property
    def top(self) -> Optional[int]:
        degrees = self.degrees()
        return degrees[0] if degrees else None

    def v_block(self, d: int) -> BitMatrix:
        found = self.act_v.get(d)
        return found if found is not None else zeros(self.dim(d + self.ring.v_degree), self.dim(d))

    def q_block(self, d: int) -> BitMatrix:
        found = self.act_q.get(d)
        return found if found is not None else zeros(self.dim(d + self.ring.q_degree), self.dim(d))

    def action(self, mono: Monomial, d: int) -> BitMatrix:
        """Matrix of multiplication by ``mono`` from degree d."""
        mat = identity(self.dim(d))
        cur = d
        for _ in range(mono.q):
            mat = matmul(self.q_block(cur), mat)
            cur += self.ring.q_degree
        for _ in range(mono.v):
            mat = matmul(self.v_block(cur), mat)
            cur += self.ring.v_degree
        return mat

    def generator_action(self, gen: Monomial, d: int) -> BitMatrix:
        return self.v_block(d) if gen == Monomial(1, 0) else self.q_block(d)

    @property
    def floor(self) -> Optional[int]:
        """
        Degree below which the materialized module may differ from the true
        one: the window bottom when V acts somewhere, None for modules killed
        by V (finite, never cut by the window).
        """
        if any(block.any() for block in self.act_v.values()):
            return self.window[0]
        return None

    def label(self, d: int, k: int) -> str:
        return self.space.label(d, k)

    def dims_map(self) -> Dict[int, int]:
        return {d: self.dim(d) for d in self.degrees()}

    def renamed(self, name: str) -> "GradedModule":
        return GradedModule(self.space, self.act_v, self.act_q, self.ring, self.offset, name)


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    """Degree-``map.shift`` R-linear map."""

    source: GradedModule
    target: GradedModule
    map: GradedMap

    def failures(self) -> List[int]:
        """Degrees where the map fails to commute with V or Q."""
        bad = []
        shift = self.map.shift
        for d in self.source.degrees():
            for gen in self.source.ring.generators():
                g_deg = self.source.ring.degree(gen)
                lhs = matmul(self.target.generator_action(gen, d + shift), self.map.block(d))
                rhs = matmul(self.map.block(d + g_deg), self.source.generator_action(gen, d))
                if lhs.size and not np.array_equal(lhs, rhs):
                    bad.append(d)
                    break
        return bad


class ModuleFailure(BaseModel):
    degree: int
    axiom: str


class ModuleReport(BaseModel):
    """Outcome of structural validation."""

    module: str = ""
    passed: bool = True
    failures: List[ModuleFailure] = Field(default_factory=list)


def validate(m: GradedModule) -> ModuleReport:
    """Check Q^order = 0, VQ = QV and V^p = 0 degree by degree."""
    report = ModuleReport(module=m.name)
    ring = m.ring
    for d in m.degrees():
        q_power = m.action(Monomial(0, ring.q_order), d)
        if not is_zero(q_power):
            report.failures.append(ModuleFailure(degree=d, axiom=f"Q^{ring.q_order} = 0"))
        vq = matmul(m.v_block(d + ring.q_degree), m.q_block(d))
        qv = matmul(m.q_block(d + ring.v_degree), m.v_block(d))
        if not np.array_equal(vq, qv):
            report.failures.append(ModuleFailure(degree=d, axiom="VQ = QV"))
        if not is_zero(m.action(Monomial(ring.p, 0), d)):
            report.failures.append(ModuleFailure(degree=d, axiom=f"V^{ring.p} = 0"))
    report.passed = not report.failures
    if not report.passed:
        logger.warning("module validation failed", module=m.name, failures=len(report.failures))
    return report


def require_valid(m: GradedModule) -> GradedModule:
    report = validate(m)
    if not report.passed:
        first = report.failures[0]
        raise ModuleStructureError(f"{m.name or 'module'}: {first.axiom} fails in degree {first.degree}")
    return m


# -- builders -----------------------------------------------------------------


@dataclass(frozen=True)
class Tower:
    """F[[V]]⟨top⟩, or a truncated tower of ``length`` elements (length 1 is F⟨top⟩)."""

    top: int
    length: Optional[int] = None


def tower_module(
    towers: Sequence[Tower],
    q_links: Sequence[Tuple[int, int]],
    ring: GradedRing,
    window: Optional[Tuple[int, int]] = None,
    name: str = "",
) -> GradedModule:
    """
    Direct sum of towers with Q mapping tower s into tower t.

    Q sends V^i g_s to V^{i+k} g_t, where k is fixed by degrees; elements that
    fall off the bottom of the target tower map to zero.
    """
    if not towers:
        raise DimensionMismatch("a tower module needs at least one tower")
    hi = max(t.top for t in towers)
    if window is None:
        window = (min(t.top for t in towers) + ring.v_degree * (ring.p - 1), hi)
    lo, w_hi = window
    if hi > w_hi:
        raise WindowOverflow(f"tower top {hi} above window {window}")

    members: Dict[int, List[Tuple[int, int]]] = {}
    for t, tower in enumerate(towers):
        limit = ring.p if tower.length is None else min(tower.length, ring.p)
        for i in range(limit):
            d = tower.top + ring.v_degree * i
            if d < lo:
                break
            members.setdefault(d, []).append((t, i))
    index = {elem: (d, k) for d, elems in members.items() for k, elem in enumerate(elems)}
    dims = {d: len(elems) for d, elems in members.items()}
    labels = {d: tuple(_tower_label(t, i) for t, i in elems) for d, elems in members.items()}
    space = GradedVectorSpace(window, dims, labels)

    act_v: Dict[int, BitMatrix] = {}
    act_q: Dict[int, BitMatrix] = {}
    for d, elems in members.items():
        v_mat = zeros(dims.get(d + ring.v_degree, 0), len(elems))
        for k, (t, i) in enumerate(elems):
            hit = index.get((t, i + 1))
            if hit is not None:
                v_mat[hit[1], k] = 1
        act_v[d] = v_mat
        act_q[d] = zeros(dims.get(d + ring.q_degree, 0), len(elems))

    for s, t in q_links:
        gap = towers[s].top + ring.q_degree - towers[t].top
        if gap % ring.v_degree or gap // ring.v_degree < 0:
            raise ModuleStructureError(f"Q cannot map tower {s} into tower {t}")
        step = gap // ring.v_degree
        for (src_t, i), (d, k) in index.items():
            if src_t != s:
                continue
            hit = index.get((t, i + step))
            if hit is not None:
                act_q[d][hit[1], k] ^= 1

    return GradedModule(space, act_v, act_q, ring, Fraction(0), name)


def _tower_label(t: int, i: int) -> str:
    return f"g{t}" if i == 0 else f"V{i}g{t}"


@dataclass(frozen=True, eq=False)
class FreeModule:
    """A free module ⊕ R⟨g_k⟩ with its monomial basis indexed."""

    generators: Tuple[int, ...]
    module: GradedModule
    index: Mapping[Tuple[int, Monomial], Tuple[int, int]]

    def basis(self, d: int) -> List[Tuple[int, Monomial]]:
        out = [None] * self.module.dim(d)
        for key, (deg, k) in self.index.items():
            if deg == d:
                out[k] = key
        return out

    def vector(self, terms: Iterable[Tuple[int, Monomial]], d: int) -> np.ndarray:
        """Coordinates in degree d of Σ mono·e_k; terms outside the window vanish."""
        vec = np.zeros(self.module.dim(d), dtype=np.uint8)
        for k, mono in terms:
            hit = self.index.get((k, mono))
            if hit is not None:
                if hit[0] != d:
                    raise DimensionMismatch(f"term e{k}·{mono.short} does not lie in degree {d}")
                vec[hit[1]] ^= 1
        return vec


def free_module(
    generators: Sequence[int],
    ring: GradedRing,
    window: Tuple[int, int],
    name: str = "",
) -> FreeModule:
    """⊕_k R⟨generators[k]⟩ cut to the window."""
    lo, hi = window
    members: Dict[int, List[Tuple[int, Monomial]]] = {}
    for k, g in enumerate(generators):
        if g > hi:
            raise WindowOverflow(f"generator degree {g} above window {window}")
        for mono in ring.monomials():
            d = g + ring.degree(mono)
            if d >= lo:
                members.setdefault(d, []).append((k, mono))
    index = {elem: (d, i) for d, elems in members.items() for i, elem in enumerate(elems)}
    dims = {d: len(elems) for d, elems in members.items()}
    labels = {d: tuple(f"{m.short}·e{k}" if not m.is_unit else f"e{k}" for k, m in elems) for d, elems in members.items()}
    space = GradedVectorSpace(window, dims, labels)

    blocks = {gen: {} for gen in ring.generators()}
    for gen, acc in blocks.items():
        shift = ring.degree(gen)
        for d, elems in members.items():
            mat = zeros(dims.get(d + shift, 0), len(elems))
            for i, (k, mono) in enumerate(elems):
                prod = ring.multiply(mono, gen)
                hit = index.get((k, prod)) if prod is not None else None
                if hit is not None:
                    mat[hit[1], i] = 1
            acc[d] = mat
    act_v = blocks.get(Monomial(1, 0), {})
    act_q = blocks.get(Monomial(0, 1), {})
    module = GradedModule(space, act_v, act_q, ring, Fraction(0), name)
    return FreeModule(tuple(generators), module, index)


def trivial_module(ring: GradedRing, degree: int = 0, window: Optional[Tuple[int, int]] = None) -> GradedModule:
    """F⟨degree⟩ with both actions zero."""
    return tower_module([Tower(degree, 1)], [], ring, window or (degree, degree), name=f"F<{degree}>")


def shift(m: GradedModule, k: int, limit: Optional[Tuple[int, int]] = None) -> GradedModule:
    """m⟨k⟩: dims(d) of the result equal dims(d − k) of m."""
    space = m.space.shifted(k)
    if limit is not None and (space.window[0] < limit[0] or space.window[1] > limit[1]):
        raise WindowOverflow(f"shifted window {space.window} leaves {limit}")
    name = f"{m.name}<{k}>" if m.name else ""
    return GradedModule(
        space,
        {d + k: b for d, b in m.act_v.items()},
        {d + k: b for d, b in m.act_q.items()},
        m.ring,
        m.offset,
        name,
    )


def direct_sum(m1: GradedModule, m2: GradedModule, name: str = "") -> GradedModule:
    _check_rings(m1, m2)
    lo = min(m1.window[0], m2.window[0])
    hi = max(m1.window[1], m2.window[1])
    degrees = set(m1.degrees()) | set(m2.degrees())
    dims = {d: m1.dim(d) + m2.dim(d) for d in degrees}
    labels = {
        d: tuple(m1.label(d, i) for i in range(m1.dim(d))) + tuple(m2.label(d, i) + "'" for i in range(m2.dim(d)))
        for d in degrees
    }
    space = GradedVectorSpace((lo, hi), dims, labels)

    def block_sum(b1: BitMatrix, b2: BitMatrix) -> BitMatrix:
        out = zeros(b1.shape[0] + b2.shape[0], b1.shape[1] + b2.shape[1])
        out[: b1.shape[0], : b1.shape[1]] = b1
        out[b1.shape[0]:, b1.shape[1]:] = b2
        return out

    act_v = {d: block_sum(m1.v_block(d), m2.v_block(d)) for d in degrees}
    act_q = {d: block_sum(m1.q_block(d), m2.q_block(d)) for d in degrees}
    return GradedModule(space, act_v, act_q, m1.ring, m1.offset, name)


def _check_rings(m1: GradedModule, m2: GradedModule) -> None:
    if m1.ring.precision != m2.ring.precision:
        raise PrecisionMismatch(f"precisions {m1.ring.p} and {m2.ring.p} differ")
    if m1.ring != m2.ring:
        raise PrecisionMismatch("modules live over different rings")


# -- tensor products ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FTensor:
    """
    m1 ⊗_F m2 with both actions.

    ``module`` carries the left action (a ⊗ 1); ``right_v``/``right_q`` hold
    1 ⊗ a. ``segments[d]`` lists (a, b, offset) blocks of degree-d basis.
    """

    left: GradedModule
    right: GradedModule
    module: GradedModule
    right_v: Mapping[int, BitMatrix]
    right_q: Mapping[int, BitMatrix]
    segments: Mapping[int, Tuple[Tuple[int, int, int], ...]]

    def right_block(self, gen: Monomial, d: int) -> BitMatrix:
        table = self.right_v if gen == Monomial(1, 0) else self.right_q
        shift = self.module.ring.degree(gen)
        found = table.get(d)
        return found if found is not None else zeros(self.module.dim(d + shift), self.module.dim(d))


def tensor_over_F(m1: GradedModule, m2: GradedModule) -> FTensor:
    """
    Tensor product over F, internal degrees additive.

    The result window keeps only degrees whose every factor pair lies inside
    the factor windows: lo = max(lo₁ + top₂, lo₂ + top₁).
    """
    _check_rings(m1, m2)
    if m1.top is None or m2.top is None:
        raise WindowOverflow("tensor factor is zero")
    hi = m1.top + m2.top
    lo = max(m1.window[0] + m2.top, m2.window[0] + m1.top)
    if lo > hi:
        raise WindowOverflow(f"tensor window [{lo}, {hi}] is empty")
    ring = m1.ring

    segments: Dict[int, Tuple[Tuple[int, int, int], ...]] = {}
    dims: Dict[int, int] = {}
    labels: Dict[int, Tuple[str, ...]] = {}
    for d in range(hi, lo - 1, -1):
        segs = []
        tags: List[str] = []
        offset = 0
        for a in m1.degrees():
            b = d - a
            size = m1.dim(a) * m2.dim(b)
            if size == 0:
                continue
            segs.append((a, b, offset))
            tags.extend(f"{m1.label(a, i)}⊗{m2.label(b, j)}" for i in range(m1.dim(a)) for j in range(m2.dim(b)))
            offset += size
        if offset:
            segments[d] = tuple(segs)
            dims[d] = offset
            labels[d] = tuple(tags)
    space = GradedVectorSpace((lo, hi), dims, labels)

    def assemble(gen: Monomial, on_left: bool) -> Dict[int, BitMatrix]:
        shift = ring.degree(gen)
        blocks = {}
        for d, segs in segments.items():
            target = {(a, b): off for a, b, off in segments.get(d + shift, ())}
            mat = zeros(dims.get(d + shift, 0), dims[d])
            for a, b, off in segs:
                if on_left:
                    key = (a + shift, b)
                    piece = np.kron(m1.generator_action(gen, a), identity(m2.dim(b)))
                else:
                    key = (a, b + shift)
                    piece = np.kron(identity(m1.dim(a)), m2.generator_action(gen, b))
                t_off = target.get(key)
                if t_off is None or piece.size == 0:
                    continue
                mat[t_off: t_off + piece.shape[0], off: off + piece.shape[1]] = piece
            blocks[d] = mat.astype(np.uint8)
        return blocks

    gens = ring.generators()
    v_gen, q_gen = Monomial(1, 0), Monomial(0, 1)
    left_v = assemble(v_gen, True) if v_gen in gens else {}
    left_q = assemble(q_gen, True) if q_gen in gens else {}
    right_v = assemble(v_gen, False) if v_gen in gens else {}
    right_q = assemble(q_gen, False) if q_gen in gens else {}
    module = GradedModule(space, left_v, left_q, ring, m1.offset + m2.offset, f"{m1.name}⊗{m2.name}")
    logger.debug("tensor over F built", window=space.window, total=space.total_dim)
    return FTensor(m1, m2, module, right_v, right_q, segments)


def tensor_over_R(m1: GradedModule, m2: GradedModule) -> GradedModule:
    """Coequalizer of a ⊗ 1 and 1 ⊗ a over the generators V, Q, with induced actions."""
    tensor = tensor_over_F(m1, m2)
    big = tensor.module
    ring = big.ring
    quotients = {}
    for d in big.degrees():
        columns = []
        for gen in ring.generators():
            src = d - ring.degree(gen)
            if big.dim(src) == 0:
                continue
            columns.append(big.generator_action(gen, src) ^ tensor.right_block(gen, src))
        rel = np.concatenate(columns, axis=1) if columns else zeros(big.dim(d), 0)
        quotients[d] = quotient(big.dim(d), rel)

    dims = {d: q.dim for d, q in quotients.items() if q.dim}
    labels = {
        d: tuple(big.label(d, k) for k in quotients[d].kept) for d in dims
    }
    space = GradedVectorSpace(big.window, dims, labels)
    induced = {}
    for gen in ring.generators():
        shift = ring.degree(gen)
        blocks = {}
        for d in dims:
            q_src = quotients[d]
            q_tgt = quotients.get(d + shift)
            if q_tgt is None or q_tgt.dim == 0:
                blocks[d] = zeros(0, q_src.dim)
                continue
            image = matmul(big.generator_action(gen, d), q_src.lift(identity(q_src.dim)))
            blocks[d] = q_tgt.project(image)
        induced[gen] = blocks
    result = GradedModule(
        space,
        induced.get(Monomial(1, 0), {}),
        induced.get(Monomial(0, 1), {}),
        ring,
        big.offset,
        f"{m1.name}⊗_R{m2.name}",
    )
    logger.info("tensor over R built", name=result.name, total=space.total_dim)
    return result


# -- catalogue ----------------------------------------------------------------


class CorrectionTerms(BaseModel):
    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    model_config = {"arbitrary_types_allowed": True}

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True, eq=False)
class CatalogueEntry:
    name: str
    module: GradedModule
    annotations: Optional[CorrectionTerms] = None


CATALOGUE_NAMES = (
    "trivial_F",
    "free_R",
    "M_2311",
    "N_2311",
    "HS_hat_Sigma2311",
    "HSbar_ring",
    "HM_hat_Sigma2311",
)

ALIASES = {
    "F": "trivial_F",
    "R": "free_R",
    "M2311": "M_2311",
    "M": "M_2311",
    "N2311": "N_2311",
    "N": "N_2311",
    "HS2311": "HS_hat_Sigma2311",
    "HSbar": "HSbar_ring",
    "HM2311": "HM_hat_Sigma2311",
}

# Rank data of ĤS(2Y), Y = Σ(2,3,11), in degrees 3, 2, 1.
RANK_PROFILES: Dict[str, Dict[int, int]] = {
    "HS_hat_2Y": {3: 2, 2: 1, 1: 1},
}


def rank_profile(name: str) -> Dict[int, int]:
    try:
        return dict(RANK_PROFILES[name])
    except KeyError as exc:
        raise UnknownCatalogueEntry(f"no rank profile named {name!r}") from exc


def _window_for(tops: Sequence[int], ring: GradedRing, window: Optional[Tuple[int, int]]) -> Tuple[int, int]:
    if window is not None:
        return window
    return (min(tops) + ring.v_degree * (ring.p - 1), max(tops))


def catalogue(name: str, precision=6, window: Optional[Tuple[int, int]] = None) -> CatalogueEntry:
    """
    Named modules, truncated to the given precision and window.

    ``name`` may be an alias and may carry a shift suffix, e.g. ``N2311<1>``.
    """
    base, k = _split_shift(name)
    base = ALIASES.get(base, base)
    p = precision if isinstance(precision, Precision) else Precision(precision)
    ring = ring_r(p)
    annotations = None

    if base == "trivial_F":
        module = tower_module([Tower(0, 1)], [], ring, _window_for([0], ring, window) if window else (0, 0), "F")
    elif base == "free_R":
        win = window or (ring.bottom_degree(), 0)
        module = free_module([0], ring, (win[0], max(win[1], 0)), "R").module
    elif base == "M_2311":
        tops = [-2, -3, 0]
        module = tower_module([Tower(t) for t in tops], [(0, 1), (1, 2)], ring, _window_for(tops, ring, window), "M")
    elif base in ("N_2311", "HS_hat_Sigma2311"):
        tops = [-4, -1, -2]
        inner = None if window is None else ((window[0] - 1, window[1] - 1) if base == "HS_hat_Sigma2311" else window)
        module = tower_module([Tower(t) for t in tops], [(0, 1), (1, 2)], ring, _window_for(tops, ring, inner), "N")
        if base == "HS_hat_Sigma2311":
            module = shift(module, 1).renamed("HS")
            annotations = CorrectionTerms(alpha=Fraction(2), beta=Fraction(0), gamma=Fraction(0))
    elif base == "HSbar_ring":
        hi = 0 if window is None else window[1]
        tops = [_top_congruent(hi, r) for r in (0, 3, 2)]
        module = tower_module(
            [Tower(t) for t in tops],
            [(0, 1), (1, 2)],
            ring,
            _window_for(tops, ring, window),
            "HSbar",
        )
    elif base == "HM_hat_Sigma2311":
        u_ring = ring_u(p)
        win = window or (1 + u_ring.v_degree * (p.p - 1), 1)
        module = tower_module([Tower(1), Tower(1, 1)], [], u_ring, win, "HM")
        annotations = None
    else:
        raise UnknownCatalogueEntry(f"unknown catalogue module {name!r}")

    if k:
        module = shift(module, k)
    logger.debug("catalogue module built", name=name, window=module.window, total=module.space.total_dim)
    return CatalogueEntry(name, module, annotations)


def _top_congruent(hi: int, residue: int) -> int:
    d = hi
    while d % 4 != residue:
        d -= 1
    return d


def _split_shift(name: str) -> Tuple[str, int]:
    text = name.strip()
    if text.endswith(">") and "<" in text:
        base, _, rest = text.partition("<")
        try:
            return base, int(rest[:-1])
        except ValueError as exc:
            raise UnknownCatalogueEntry(f"bad shift suffix in {name!r}") from exc
    return text, 0


# -- correction-term inequalities -----------------------------------------------


class InequalityLine(BaseModel):
    statement: str
    lhs: str
    rhs: str
    passed: bool


class InequalityReport(BaseModel):
    passed: bool
    lines: List[InequalityLine]


def check_sum_inequalities(t0: Sequence, t1: Sequence, tsum: Sequence) -> InequalityReport:
    """
    Six inequalities bounding (α, β, γ) of a connected sum by those of the
    summands, evaluated on the triples t0, t1 and tsum.
    """
    a0, b0, c0 = (Fraction(x) for x in t0)
    a1, b1, c1 = (Fraction(x) for x in t1)
    a, b, c = (Fraction(x) for x in tsum)
    checks = [
        ("α0+α1 ≥ α", a0 + a1, a),
        ("α ≥ max(α0+γ1, β0+β1)", a, max(a0 + c1, b0 + b1)),
        ("α0+β1 ≥ β", a0 + b1, b),
        ("β ≥ β0+γ1", b, b0 + c1),
        ("min(α0+γ1, β0+β1) ≥ γ", min(a0 + c1, b0 + b1), c),
        ("γ ≥ γ0+γ1", c, c0 + c1),
    ]
    lines = [
        InequalityLine(statement=s, lhs=str(lhs), rhs=str(rhs), passed=lhs >= rhs) for s, lhs, rhs in checks
    ]
    report = InequalityReport(passed=all(line.passed for line in lines), lines=lines)
    logger.info("correction-term inequalities checked", passed=report.passed)
    return report


# -- JSON format ------------------------------------------------------------------


class ModuleDocument(BaseModel):
    """On-disk module format; bit matrices are lists of 0/1 rows."""

    offset: str = "0"
    window: Tuple[int, int]
    dims: Dict[int, int]
    V: Dict[int, List[List[int]]] = Field(default_factory=dict)
    Q: Dict[int, List[List[int]]] = Field(default_factory=dict)
    precision: int
    name: str = ""


def module_to_document(m: GradedModule) -> ModuleDocument:
    return ModuleDocument(
        offset=str(m.offset),
        window=m.window,
        dims=m.dims_map(),
        V={d: b.tolist() for d, b in m.act_v.items() if b.size},
        Q={d: b.tolist() for d, b in m.act_q.items() if b.size},
        precision=m.ring.p,
        name=m.name,
    )


def module_from_document(doc: ModuleDocument) -> GradedModule:
    ring = ring_r(doc.precision)
    space = GradedVectorSpace(tuple(doc.window), {int(d): n for d, n in doc.dims.items() if n})

    def blocks(raw: Dict[int, List[List[int]]], shift: int) -> Dict[int, BitMatrix]:
        out = {}
        for d, rows in raw.items():
            d = int(d)
            shape = (space.dim(d + shift), space.dim(d))
            out[d] = np.array(rows, dtype=np.uint8).reshape(shape)
        return out

    try:
        return GradedModule(
            space,
            blocks(doc.V, ring.v_degree),
            blocks(doc.Q, ring.q_degree),
            ring,
            Fraction(doc.offset),
            doc.name,
        )
    except (ValueError, DimensionMismatch) as exc:
        raise StructureFormatError(f"malformed module document: {exc}") from exc


def load_module(path: Path) -> GradedModule:
    try:
        raw = json.loads(Path(path).read_text())
        doc = ModuleDocument(**raw)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise StructureFormatError(f"cannot read module file {path}: {exc}") from exc
    return require_valid(module_from_document(doc))


def save_module(m: GradedModule, path: Path) -> None:
    Path(path).write_text(module_to_document(m).model_dump_json(indent=2))
