"""
Spectral sequences of filtered F₂ chain complexes.

Pages are indexed by (filtration level p, complementary degree j = t − p),
where t is the total degree. For the ⊠ filtration j is the internal degree,
so E² lines up with bigraded Tor tables. d_r leaves (p, j) for
(p − r, j + r − 1) in the ``standard`` convention; the ``lagged`` convention
(p − r − 1, j + r) is accepted for hypothesized patterns.

Computed pages come from the approximate cycles
Z^r_p = {x ∈ F_p : ∂x ∈ F_{p−r}} with
E^r_p = Z^r_p / (Z^{r−1}_{p−1} + ∂Z^{r−1}_{p+r−1}).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
import yaml
from pydantic import BaseModel, Field, ValidationError

from .ainf.massey import massey3, massey3_module, massey4, massey4_module, module_chains
from .ainf.structures import AInfModule, Chain, chain_add, opposite, right_restriction
from .boxtensor import BoxTensorComplex, Window, box_tensor, left_module_on_box
from .exceptions import (
    BadInputError,
    BidegreeMismatch,
    ChainComplexError,
    FiltrationError,
    InfeasiblePattern,
    KindMismatch,
    MasseyUndefined,
    SpectralSequenceError,
    StructureFormatError,
)
from .gf2core import BitMatrix, in_span, is_zero, kernel_basis, matmul, rank, solve, zeros
from .resolve import BigradedTable, Cell, CrossCheckReport, cross_check, tor
from .rmodule import GradedModule

logger = structlog.get_logger(__name__)

Convention = Literal["standard", "lagged"]


def bidegree(r: int, convention: str) -> Cell:
    if convention == "standard":
        return (-r, r - 1)
    if convention == "lagged":
        return (-r - 1, r)
    raise BidegreeMismatch(f"unknown bidegree convention {convention!r}")


# -- filtered complexes -----------------------------------------------------------------


def _stack(blocks: Sequence[BitMatrix], rows: int) -> BitMatrix:
    present = [b for b in blocks if b.shape[1]]
    if not present:
        return zeros(rows, 0)
    return np.concatenate(present, axis=1)


def _rank(*blocks: BitMatrix) -> int:
    present = [b for b in blocks if b.shape[0] and b.shape[1]]
    if not present:
        return 0
    return rank(np.concatenate(present, axis=1))


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """
    A chain complex on a finite basis with an increasing filtration.

    ``level_cap`` marks a complex truncated above that level and ``window`` a
    complex cut to a total-degree window; pages flag the entries either cut
    can change.
    """

    degrees: Tuple[int, ...]
    levels: Tuple[int, ...]
    boundary: Mapping[int, Chain]
    labels: Tuple[str, ...] = ()
    level_cap: Optional[int] = None
    window: Window = None
    _cache: Dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.degrees) != len(self.levels):
            raise BadInputError("degrees and levels differ in length")
        for b, out in self.boundary.items():
            for w in out:
                if self.degrees[w] != self.degrees[b] - 1:
                    raise ChainComplexError(f"boundary of {self.label(b)} leaves degree", degree=self.degrees[b])
                if self.levels[w] > self.levels[b]:
                    raise FiltrationError(
                        f"differential raises filtration: {self.label(b)} (level {self.levels[b]}) "
                        f"hits {self.label(w)} (level {self.levels[w]})"
                    )
        for t in self.total_degrees():
            upper, lower = self.matrix(t), self.matrix(t - 1)
            if upper.size and lower.size and not is_zero(matmul(lower, upper)):
                raise ChainComplexError("filtered complex differential squares to nonzero", degree=t)

    @classmethod
    def from_box(cls, box: BoxTensorComplex) -> "FilteredComplex":
        n = len(box.words)
        return cls(
            tuple(box.degree(k) for k in range(n)),
            tuple(box.level(k) for k in range(n)),
            dict(box.boundary),
            tuple(box.label(k) for k in range(n)),
            box.n_max,
            box.window,
        )

    def label(self, b: int) -> str:
        return self.labels[b] if self.labels else f"e{b}"

    def total_degrees(self) -> List[int]:
        return sorted(set(self.degrees), reverse=True)

    def level_range(self) -> Tuple[int, int]:
        return (min(self.levels, default=0), max(self.levels, default=0))

    def members(self, t: int) -> List[int]:
        key = ("members", t)
        if key not in self._cache:
            self._cache[key] = [b for b, d in enumerate(self.degrees) if d == t]
        return self._cache[key]

    def matrix(self, t: int) -> BitMatrix:
        """∂: C_t → C_{t−1} in the ``members`` order."""
        key = ("matrix", t)
        if key not in self._cache:
            cols, rows = self.members(t), self.members(t - 1)
            pos = {b: k for k, b in enumerate(rows)}
            mat = zeros(len(rows), len(cols))
            for c, b in enumerate(cols):
                for w in self.boundary.get(b, ()):
                    mat[pos[w], c] ^= 1
            self._cache[key] = mat
        return self._cache[key]

    def vector(self, chain: Iterable[int], t: int) -> np.ndarray:
        pos = {b: k for k, b in enumerate(self.members(t))}
        vec = np.zeros(len(pos), dtype=np.uint8)
        for b in chain:
            if b not in pos:
                raise BadInputError(f"{self.label(b)} is not in total degree {t}")
            vec[pos[b]] ^= 1
        return vec

    def chain(self, vec: np.ndarray, t: int) -> Chain:
        members = self.members(t)
        return frozenset(members[k] for k in np.flatnonzero(vec))

    def cycles_at(self, r: int, p: int, t: int) -> BitMatrix:
        """Columns spanning Z^r_p in total degree t."""
        key = ("z", r, p, t)
        if key in self._cache:
            return self._cache[key]
        members = self.members(t)
        n = len(members)
        cols = [c for c, b in enumerate(members) if self.levels[b] <= p]
        out = zeros(n, 0)
        if cols:
            embed = zeros(n, len(cols))
            embed[cols, np.arange(len(cols))] = 1
            out = embed
            mat = self.matrix(t)
            rows = [k for k, b in enumerate(self.members(t - 1)) if self.levels[b] > p - r]
            if r > 0 and rows and mat.size:
                sub = mat[np.ix_(rows, cols)]
                ker = kernel_basis(sub)
                out = zeros(n, ker.shape[1])
                out[cols, :] = ker
        self._cache[key] = out
        return out

    def boundaries_at(self, r: int, p: int, t: int) -> BitMatrix:
        """∂Z^{r−1}_{p+r−1} from degree t + 1."""
        z = self.cycles_at(r - 1, p + r - 1, t + 1)
        mat = self.matrix(t + 1)
        if not z.shape[1] or not mat.size:
            return zeros(len(self.members(t)), 0)
        return matmul(mat, z)

    def e_dim(self, r: int, p: int, t: int) -> int:
        z = self.cycles_at(r, p, t)
        return _rank(z) - _rank(self.cycles_at(r - 1, p - 1, t), self.boundaries_at(r, p, t))

    def d_rank(self, r: int, p: int, t: int) -> int:
        """Rank of d_r out of E^r_p in total degree t."""
        z = self.cycles_at(r, p, t)
        return _rank(z) - _rank(self.cycles_at(r + 1, p, t), self.cycles_at(r - 1, p - 1, t))

    def lift(self, chain: Chain, r: int, p: int, t: int) -> Optional[Chain]:
        """Some x ∈ Z^r_p with x ≡ chain modulo F_{p−1}, or None."""
        members = self.members(t)
        mat = self.matrix(t)
        base = self.vector(chain, t)
        rows = [k for k, b in enumerate(self.members(t - 1)) if self.levels[b] > p - r]
        if not rows or not mat.size:
            return chain
        rhs = matmul(mat, base.reshape(-1, 1))[rows, 0]
        if not rhs.any():
            return chain
        cols = [c for c, b in enumerate(members) if self.levels[b] <= p - 1]
        if not cols:
            return None
        sol = solve(mat[np.ix_(rows, cols)], rhs)
        if sol is None:
            return None
        vec = base.copy()
        vec[cols] ^= sol.astype(np.uint8)
        return self.chain(vec, t)

    def same_class(self, a: Chain, b: Chain, r: int, p: int, t: int) -> bool:
        """Whether a and b agree in E^r_p (both assumed in Z^r_p)."""
        diff = self.vector(a, t) ^ self.vector(b, t)
        if not diff.any():
            return True
        denom = _stack([self.cycles_at(r - 1, p - 1, t), self.boundaries_at(r, p, t)], len(diff))
        return bool(denom.shape[1]) and in_span(denom, diff)

    def apply(self, chain: Chain) -> Chain:
        acc: set = set()
        for b in chain:
            acc ^= set(self.boundary.get(b, ()))
        return frozenset(acc)

    def homology(self) -> Dict[int, int]:
        out = {}
        for t in self.total_degrees():
            h = len(self.members(t)) - _rank(self.matrix(t)) - _rank(self.matrix(t + 1))
            if h:
                out[t] = h
        return out

    def certified(self, r: int, p: int, t: int) -> bool:
        if self.level_cap is not None and p + r - 1 > self.level_cap:
            return False
        if self.window is not None and not self.window[0] <= t <= self.window[1]:
            return False
        return True


# -- pages and patterns ------------------------------------------------------------------


class DifferentialEntry(BaseModel):
    source: Tuple[int, int]
    target: Tuple[int, int]
    rank: int = Field(ge=1)


class DifferentialPattern(BaseModel):
    """Hypothesized d_r ranks; every entry must move by the declared bidegree."""

    r: int = Field(ge=1)
    convention: Convention = "lagged"
    entries: List[DifferentialEntry] = Field(default_factory=list)

    def check(self) -> "DifferentialPattern":
        step = bidegree(self.r, self.convention)
        for e in self.entries:
            moved = (e.target[0] - e.source[0], e.target[1] - e.source[1])
            if moved != step:
                raise BidegreeMismatch(
                    f"d_{self.r} entry {e.source} -> {e.target} moves by {moved}, "
                    f"{self.convention} convention requires {step}"
                )
        return self


class PatternStage(BaseModel):
    r: int = Field(ge=1)
    entries: List[DifferentialEntry] = Field(default_factory=list)


class PatternFile(BaseModel):
    """Stages of hypothesized differentials, optionally with the E^r grid they start from."""

    name: str = ""
    convention: Convention = "lagged"
    start_page: int = Field(ge=1, default=2)
    start_table: Optional[str] = None
    stages: List[PatternStage] = Field(default_factory=list)

    def patterns(self) -> List[DifferentialPattern]:
        return [
            DifferentialPattern(r=s.r, convention=self.convention, entries=s.entries).check()
            for s in sorted(self.stages, key=lambda s: s.r)
        ]


def load_pattern(path) -> PatternFile:
    path = Path(path)
    if not path.exists():
        raise BadInputError(f"pattern file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text()) or {}
        pattern = PatternFile.model_validate(data)
    except (yaml.YAMLError, ValidationError) as exc:
        raise StructureFormatError(f"invalid pattern file {path}: {exc}") from exc
    pattern.patterns()
    logger.info("pattern loaded", path=str(path), stages=len(pattern.stages), convention=pattern.convention)
    return pattern


@dataclass(frozen=True)
class Page:
    """E^r with the d_r leaving it (computed or hypothesized)."""

    r: int
    table: BigradedTable
    differentials: Tuple[DifferentialEntry, ...] = ()
    provenance: str = "computed"
    convention: Optional[str] = "standard"

    def get(self, p: int, j: int) -> int:
        return self.table.get(p, j)

    def totals(self, certified_only: bool = True) -> Dict[int, int]:
        return self.table.totals(certified_only)

    def with_differentials(self, entries: Iterable[DifferentialEntry]) -> "Page":
        return Page(self.r, self.table, tuple(entries), self.provenance, self.convention)


def page_from_table(table: BigradedTable, r: int = 2, convention: Optional[str] = None) -> Page:
    """Start rank bookkeeping from a known E^r grid (e.g. a golden Tor table)."""
    return Page(r, table, (), "hypothesized", convention)


def _page_table(fc: FilteredComplex, r: int) -> BigradedTable:
    lo, hi = fc.level_range()
    entries: Dict[Cell, int] = {}
    uncertified = set()
    js = []
    for t in fc.total_degrees():
        for p in range(lo, hi + 1):
            j = t - p
            js.append(j)
            dim = fc.e_dim(r, p, t)
            if dim:
                entries[(p, j)] = dim
            if not fc.certified(r, p, t):
                uncertified.add((p, j))
    j_range = (min(js), max(js)) if js else (0, 0)
    return BigradedTable(entries, (lo, hi), j_range, f"E{r}", frozenset(uncertified))


def _page_differentials(fc: FilteredComplex, r: int) -> List[DifferentialEntry]:
    lo, hi = fc.level_range()
    step = bidegree(r, "standard")
    out = []
    for t in fc.total_degrees():
        for p in range(lo, hi + 1):
            k = fc.d_rank(r, p, t)
            if k:
                src = (p, t - p)
                out.append(DifferentialEntry(source=src, target=(src[0] + step[0], src[1] + step[1]), rank=k))
    return out


def _next_dims(table: BigradedTable, entries: Sequence[DifferentialEntry]) -> Dict[Cell, int]:
    dims = dict(table.nonzero())
    for e in entries:
        for cell in (e.source, e.target):
            dims[cell] = dims.get(cell, 0) - e.rank
    return {c: n for c, n in dims.items() if n}


def pages(fc: FilteredComplex, r_max: int) -> List[Page]:
    """E¹ … E^{r_max}; each page carries its computed d_r, and E^{r+1} = H(E^r, d_r) is asserted."""
    out: List[Page] = []
    for r in range(1, r_max + 1):
        table = _page_table(fc, r)
        diffs = _page_differentials(fc, r)
        if out:
            expected = _next_dims(out[-1].table, out[-1].differentials)
            if expected != table.nonzero():
                raise SpectralSequenceError(f"E{r} is not the homology of E{r - 1} under d_{r - 1}")
        out.append(Page(r, table, tuple(diffs), "computed", "standard"))
        logger.debug("page computed", r=r, nonzero=len(table.nonzero()), differentials=len(diffs))
    logger.info("spectral sequence pages computed", r_max=r_max, levels=fc.level_range())
    return out


def e_infinity(fc: FilteredComplex) -> Page:
    """The page past which every d_r is forced to vanish by the level range."""
    lo, hi = fc.level_range()
    r = hi - lo + 1
    return Page(r, _page_table(fc, r), (), "computed", "standard")


def apply_hypothesized(page: Page, pattern: DifferentialPattern) -> Page:
    """
    Rank bookkeeping: E^{r+1} dims are E^r dims minus the ranks in and out of
    every cell.
    """
    pattern.check()
    if pattern.r != page.r:
        raise BidegreeMismatch(f"pattern for d_{pattern.r} applied to page E{page.r}")
    if page.convention is not None and pattern.convention != page.convention:
        raise BidegreeMismatch(
            f"pattern uses the {pattern.convention} convention, page E{page.r} the {page.convention} one"
        )
    table = page.table
    used: Dict[Cell, int] = {}
    for e in pattern.entries:
        for cell in (e.source, e.target):
            avail = table.get(*cell)
            if e.rank > avail:
                raise InfeasiblePattern(f"d_{page.r} rank {e.rank} at {cell} exceeds dimension {avail}")
            used[cell] = used.get(cell, 0) + e.rank
    for cell, n in used.items():
        if n > table.get(*cell):
            raise InfeasiblePattern(f"d_{page.r} ranks into and out of {cell} total {n} > {table.get(*cell)}")

    dims = _next_dims(table, pattern.entries)
    nxt = BigradedTable(dims, table.i_range, table.j_range, f"E{page.r + 1}", table.uncertified, table.skipped)
    logger.info("hypothesized differential applied", r=page.r, entries=len(pattern.entries))
    return Page(page.r + 1, nxt, (), "hypothesized", page.convention or pattern.convention)


def run_patterns(page: Page, patterns: Sequence[DifferentialPattern]) -> List[Page]:
    """Apply successive patterns starting at ``page``; missing stages count as zero differentials."""
    out = [page]
    for pattern in sorted(patterns, key=lambda p: p.r):
        while out[-1].r < pattern.r:
            out.append(apply_hypothesized(out[-1], DifferentialPattern(r=out[-1].r, convention=pattern.convention)))
        if out[-1].r != pattern.r:
            raise BidegreeMismatch(f"pattern for d_{pattern.r} comes after page E{out[-1].r}")
        current = out[-1]
        out[-1] = current.with_differentials(pattern.entries)
        out.append(apply_hypothesized(current, pattern))
    return out


# -- reports -----------------------------------------------------------------------------


class TargetLine(BaseModel):
    degree: int
    e_infinity: int
    target: int


class TargetReport(BaseModel):
    """Σ_p E^∞_{p, q−p} against the target in degree q + shift."""

    agree: bool
    shift: int = 0
    lines: List[TargetLine] = Field(default_factory=list)
    skipped: List[int] = Field(default_factory=list)


def e_infty_vs_target(
    final: Union[Page, Sequence[Page]],
    target: Union[GradedModule, Mapping[int, int]],
    degrees: Optional[Iterable[int]] = None,
    shift: int = 0,
) -> TargetReport:
    if not isinstance(final, Page):
        final = final[-1]
    if isinstance(target, GradedModule):
        dims = {d: target.dim(d) for d in target.degrees()}
    else:
        dims = dict(target)
    table = final.table
    totals = table.totals()
    bad_totals = {i + j for (i, j) in table.uncertified | table.skipped}
    wanted = sorted(set(degrees) if degrees is not None else set(dims), reverse=True)
    lines, skipped = [], []
    for q in wanted:
        if q in bad_totals:
            skipped.append(q)
            continue
        lines.append(TargetLine(degree=q, e_infinity=totals.get(q, 0), target=dims.get(q + shift, 0)))
    report = TargetReport(agree=all(l.e_infinity == l.target for l in lines), shift=shift, lines=lines, skipped=skipped)
    if skipped:
        logger.warning("target comparison skipped uncertified degrees", degrees=skipped)
    logger.info("E-infinity vs target", agree=report.agree, degrees=len(lines))
    return report


# -- the Eilenberg-Moore instance -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EMSpectralSequence:
    box: BoxTensorComplex
    complex: FilteredComplex
    pages: List[Page]
    comparison: Optional[CrossCheckReport] = None

    def page(self, r: int) -> Page:
        for pg in self.pages:
            if pg.r == r:
                return pg
        raise KeyError(r)


def em_ss(
    left: AInfModule,
    right: AInfModule,
    n_max: int,
    r_max: int = 3,
    window: Window = None,
    check: bool = True,
) -> EMSpectralSequence:
    """
    Pages of the ⊠ filtration; when both modules are strict models of graded
    R-modules, E² is compared against Tor of those modules.
    """
    box = box_tensor(left, right, n_max, window, check)
    fc = FilteredComplex.from_box(box)
    computed = pages(fc, max(r_max, 2))
    comparison = None
    m_src, n_src = left.graded_source, right.graded_source
    if isinstance(m_src, GradedModule) and isinstance(n_src, GradedModule):
        e2 = next(pg for pg in computed if pg.r == 2).table
        truth = tor(m_src, n_src, "resolution", i_max=max(n_max - 1, 0), j_range=e2.j_range)
        # E² at the top level is cut off by the word length bound
        limited = BigradedTable(
            {c: n for c, n in e2.entries.items() if c[0] < n_max},
            (0, max(n_max - 1, 0)),
            e2.j_range,
            e2.provenance,
            e2.uncertified,
        )
        comparison = cross_check(limited, truth)
        if not comparison.agree:
            logger.warning("E2 disagrees with Tor", mismatches=comparison.mismatches)
    return EMSpectralSequence(box, fc, computed, comparison)


# -- Massey products against differentials ----------------------------------------------------


class MasseyDifferentialReport(BaseModel):
    word: str
    r: int
    applicable: bool
    agree: bool = False
    computed: str = ""
    formula: str = ""
    notes: List[str] = Field(default_factory=list)


def _word_id(box: BoxTensorComplex, names: Sequence[str]) -> int:
    if len(names) < 2:
        raise BadInputError("a box word needs a module element at each end")
    try:
        x = box.left.basis.index(names[0])
        y = box.right.basis.index(names[-1])
        letters = tuple(box.algebra.basis.index(a) for a in names[1:-1])
    except (KeyError, ValueError, BadInputError) as exc:
        raise BadInputError(f"unknown element in word {list(names)}: {exc}") from exc
    hit = box.index.get((x, letters, y))
    if hit is None:
        raise BadInputError(f"word {list(names)} is not in the materialized complex")
    return hit


def _words(box: BoxTensorComplex, pieces: Sequence[Tuple[Chain, Tuple[int, ...], Chain]]) -> Chain:
    """Expand (x-chain, letters, y-chain) combinations into a chain of word ids."""
    acc: set = set()
    for xs, letters, ys in pieces:
        if box.normalized and box.algebra.unit in letters:
            continue
        for x in xs:
            for y in ys:
                hit = box.index.get((x, letters, y))
                if hit is None:
                    raise BadInputError("formula term falls outside the materialized complex")
                acc ^= {hit}
    return frozenset(acc)


def _d2_formula(box: BoxTensorComplex, word_id: int) -> Chain:
    x, letters, y = box.words[word_id]
    n = len(letters)
    alg = box.algebra
    one = lambda b: frozenset({b})  # noqa: E731
    pieces: List[Tuple[Chain, Tuple[int, ...], Chain]] = []
    if n >= 2:
        right = right_restriction(box.left)
        cos = massey3_module(right, one(x), one(letters[0]), one(letters[1]))
        pieces.append((cos.representative, letters[2:], one(y)))
        mirrored = opposite(box.right)
        cos = massey3_module(mirrored, one(y), one(letters[-1]), one(letters[-2]))
        pieces.append((one(x), letters[:-2], cos.representative))
    terms = _words(box, pieces)
    for i in range(n - 2):
        cos = massey3(alg, one(letters[i]), one(letters[i + 1]), one(letters[i + 2]))
        for b in cos.representative:
            terms = terms ^ _words(box, [(one(x), letters[:i] + (b,) + letters[i + 3:], one(y))])
    return terms


def _d3_formulas(box: BoxTensorComplex, word_id: int) -> List[Chain]:
    """Every value of the fourfold-product formula over the class choices of each term."""
    x, letters, y = box.words[word_id]
    n = len(letters)
    alg = box.algebra
    one = lambda b: frozenset({b})  # noqa: E731
    options: List[List[Chain]] = []
    if n >= 3:
        right = right_restriction(box.left)
        ends = massey4_module(right, one(x), *(one(a) for a in letters[:3]))
        options.append([_words(box, [(c, letters[3:], one(y))]) for c in sorted(ends.classes, key=sorted)])
        mirrored = opposite(box.right)
        ends = massey4_module(mirrored, one(y), *(one(a) for a in reversed(letters[-3:])))
        options.append([_words(box, [(one(x), letters[:-3], c)]) for c in sorted(ends.classes, key=sorted)])
    for i in range(n - 3):
        inner = massey4(alg, *(one(a) for a in letters[i:i + 4]))
        choices = []
        for c in sorted(inner.classes, key=sorted):
            terms: Chain = frozenset()
            for b in c:
                terms = terms ^ _words(box, [(one(x), letters[:i] + (b,) + letters[i + 4:], one(y))])
            choices.append(terms)
        options.append(choices)
    return [chain_add(*combo) for combo in product(*options)]


def massey_differential_check(
    box: BoxTensorComplex,
    word: Sequence[str],
    r: int = 2,
    fc: Optional[FilteredComplex] = None,
) -> MasseyDifferentialReport:
    """
    Compare d_r[x|a₁|…|a_n|y] with the Massey-product formula: for d₂ the sum
    of triple products of consecutive entries, for d₃ (on words whose triple
    products vanish) the sum of fourfold ones; module products at the two ends.
    """
    fc = fc or FilteredComplex.from_box(box)
    k = _word_id(box, word)
    text = box.label(k)
    if r not in (2, 3):
        return MasseyDifferentialReport(
            word=text, r=r, applicable=False, notes=[f"no Massey formula wired for d_{r}"]
        )
    p, t = box.level(k), box.degree(k)
    rep = fc.lift(frozenset({k}), r, p, t)
    if rep is None:
        return MasseyDifferentialReport(word=text, r=r, applicable=False, notes=[f"word does not survive to E{r}"])
    try:
        formulas = [_d2_formula(box, k)] if r == 2 else _d3_formulas(box, k)
    except MasseyUndefined as exc:
        return MasseyDifferentialReport(word=text, r=r, applicable=False, notes=[f"formula not applicable: {exc}"])
    except BadInputError as exc:
        return MasseyDifferentialReport(word=text, r=r, applicable=False, notes=[str(exc)])
    computed = fc.apply(rep)
    matching = [f for f in formulas if fc.same_class(computed, f, r, p - r, t - 1)]
    agree = bool(matching)
    fmt = lambda c: " + ".join(sorted(fc.label(b) for b in c)) or "0"  # noqa: E731
    shown = matching[0] if matching else formulas[0]
    notes = [f"{len(formulas)} choices of defining systems"] if len(formulas) > 1 else []
    report = MasseyDifferentialReport(
        word=text, r=r, applicable=True, agree=agree, computed=fmt(computed), formula=fmt(shown), notes=notes
    )
    logger.info("Massey differential check", word=text, r=r, agree=agree)
    return report


def bimodule_triple(mod: AInfModule, a: int, x: int, b: int) -> Chain:
    """⟨a, x, b⟩ = m(a,x,b) + m(s₁, b) + m(a, s₂) with m₁s₁ = m(a,x), m₁s₂ = m(x,b)."""
    if mod.side != "bimodule":
        raise KindMismatch("two-sided triple products need a bimodule")
    chains = module_chains(mod)
    one = lambda e: frozenset({e})  # noqa: E731
    alg = mod.algebra.basis
    ax, xb = mod.apply(1, [one(a), one(x)]), mod.apply(0, [one(x), one(b)])
    s1 = chains.primitive(ax, alg.degree(a) + mod.basis.degree(x), None)
    s2 = chains.primitive(xb, mod.basis.degree(x) + alg.degree(b), None)
    if s1 is None or s2 is None:
        raise MasseyUndefined(f"⟨{alg.names[a]}, {mod.basis.names[x]}, {alg.names[b]}⟩ has no defining system")
    rep = set(mod.apply(1, [one(a), one(x), one(b)]))
    rep ^= set(mod.apply(0, [s1, one(b)]))
    rep ^= set(mod.apply(1, [one(a), s2]))
    return frozenset(rep)


def module_action_check(
    bimodule: AInfModule,
    right: AInfModule,
    element: str,
    word: Sequence[str],
    n_max: int,
    window: Window = None,
) -> MasseyDifferentialReport:
    """
    The left action of r on [x|r₁|…|y] in M ⊠ N against [⟨r, x, r₁⟩|…|y],
    compared in homology.
    """
    box, module = left_module_on_box(bimodule, right, n_max, window)
    k = _word_id(box, word)
    text = f"{element} . {box.label(k)}"
    x, letters, y = box.words[k]
    if not letters:
        return MasseyDifferentialReport(word=text, r=2, applicable=False, notes=["word has no algebra letter"])
    a = box.algebra.basis.index(element)
    try:
        triple = bimodule_triple(bimodule, a, x, letters[0])
    except MasseyUndefined as exc:
        return MasseyDifferentialReport(word=text, r=2, applicable=False, notes=[f"formula not applicable: {exc}"])
    formula = _words(box, [(triple, letters[1:], frozenset({y}))])
    acted = module.op(1, (a, k))
    chains = module_chains(module)
    diff = set(acted) ^ set(formula)
    agree = True
    if diff:
        deg = module.basis.chain_degree(frozenset(diff))
        bounds = chains.boundary_columns(deg)
        vec = module.basis.vector(frozenset(diff), deg)
        agree = bool(bounds.shape[1]) and in_span(bounds, vec)
    report = MasseyDifferentialReport(
        word=text, r=2, applicable=True, agree=agree,
        computed=module.basis.format(acted), formula=module.basis.format(formula),
    )
    logger.info("module action check", word=text, agree=agree)
    return report


__all__ = [
    "DifferentialEntry",
    "DifferentialPattern",
    "EMSpectralSequence",
    "FilteredComplex",
    "MasseyDifferentialReport",
    "Page",
    "PatternFile",
    "TargetReport",
    "apply_hypothesized",
    "bidegree",
    "bimodule_triple",
    "e_infinity",
    "e_infty_vs_target",
    "em_ss",
    "load_pattern",
    "massey_differential_check",
    "module_action_check",
    "page_from_table",
    "pages",
    "run_patterns",
]
