"""
Exact linear algebra over the two-element field.

Matrices are numpy uint8 arrays holding 0/1 entries. Elimination packs rows
into bytes with ``np.packbits`` and clears columns with whole-row XOR, so every
basis the engine produces is reproducible: pivots are chosen leftmost in the
requested column order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog

from .exceptions import ChainComplexError, DimensionMismatch

logger = structlog.get_logger(__name__)

# A bit matrix is a 2-D uint8 array with entries in {0, 1}.
BitMatrix = np.ndarray


def to_gf2(matrix, rows: Optional[int] = None, cols: Optional[int] = None) -> BitMatrix:
    """Coerce array-like data to a 2-D uint8 matrix reduced mod 2."""
    mat = np.array(matrix, dtype=np.int64) % 2
    if rows is not None and cols is not None:
        if mat.size != rows * cols:
            raise DimensionMismatch(
                f"expected {rows}x{cols} entries, got {mat.size}"
            )
        mat = mat.reshape(rows, cols)
    elif mat.ndim == 1:
        mat = mat.reshape(1, -1) if mat.size else mat.reshape(0, 0)
    return mat.astype(np.uint8)


def zeros(rows: int, cols: int) -> BitMatrix:
    return np.zeros((rows, cols), dtype=np.uint8)


def identity(n: int) -> BitMatrix:
    return np.eye(n, dtype=np.uint8)


def matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Product mod 2; shapes follow numpy matmul rules."""
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return (a.astype(np.uint8) @ b.astype(np.uint8)) & 1


def is_zero(m: BitMatrix) -> bool:
    return not np.any(m)


@dataclass(frozen=True, eq=False)
class RowReduceResult:
    """Reduced row echelon form of a matrix over GF(2)."""

    matrix: BitMatrix
    rank: int
    pivots: Tuple[int, ...]


def row_reduce(matrix: BitMatrix, column_order: Optional[Sequence[int]] = None) -> RowReduceResult:
    """
    Fully reduce ``matrix`` by row operations.

    Pivot columns are taken in ``column_order`` (default: left to right); the
    returned matrix is reduced with respect to that order.
    """
    mat = to_gf2(matrix)
    m, n = mat.shape
    if m == 0 or n == 0:
        return RowReduceResult(mat.copy(), 0, ())

    packed = np.packbits(mat, axis=1)
    order: Iterable[int] = range(n) if column_order is None else column_order
    pivots = []
    row = 0
    for col in order:
        if row == m:
            break
        byte, shift = col >> 3, 7 - (col & 7)
        column = (packed[:, byte] >> shift) & 1
        candidates = np.flatnonzero(column[row:])
        if candidates.size == 0:
            continue
        pivot = row + int(candidates[0])
        if pivot != row:
            packed[[row, pivot]] = packed[[pivot, row]]
            column[[row, pivot]] = column[[pivot, row]]
        hits = np.flatnonzero(column)
        hits = hits[hits != row]
        if hits.size:
            packed[hits] ^= packed[row]
        pivots.append(int(col))
        row += 1

    reduced = np.unpackbits(packed, axis=1, count=n)
    return RowReduceResult(reduced, len(pivots), tuple(pivots))


def rank(m: BitMatrix) -> int:
    """F₂ rank."""
    return row_reduce(m).rank


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Columns form a basis of {x : m·x = 0}."""
    mat = to_gf2(m)
    n = mat.shape[1] if mat.ndim == 2 else 0
    result = row_reduce(mat)
    pivot_set = set(result.pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = np.zeros((n, len(free)), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for r, pc in enumerate(result.pivots):
            basis[pc, k] = result.matrix[r, f]
    return basis


def image_basis(m: BitMatrix) -> BitMatrix:
    """Columns of ``m`` forming a basis of its column space."""
    mat = to_gf2(m)
    result = row_reduce(mat)
    return mat[:, list(result.pivots)] if result.pivots else np.zeros((mat.shape[0], 0), dtype=np.uint8)


def solve(m: BitMatrix, b, rng: Optional[np.random.Generator] = None) -> Optional[np.ndarray]:
    """
    Return x with m·x = b, or None when the system is inconsistent.

    With ``rng`` the unknowns are pivoted in a random order, which picks a
    different particular solution out of the same affine space.
    """
    mat = to_gf2(m)
    rhs = np.array(b, dtype=np.uint8).reshape(-1) & 1
    rows = mat.shape[0]
    n = mat.shape[1] if mat.ndim == 2 else 0
    if rhs.size != rows:
        raise DimensionMismatch(f"right-hand side has length {rhs.size}, expected {rows}")
    if rows == 0:
        return np.zeros(n, dtype=np.uint8)
    aug = np.concatenate([mat.reshape(rows, n), rhs.reshape(-1, 1)], axis=1)
    order = list(range(n))
    if rng is not None:
        order = [int(c) for c in rng.permutation(n)]
    result = row_reduce(aug, order + [n])
    if n in result.pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for r, pc in enumerate(result.pivots):
        x[pc] = result.matrix[r, n]
    return x


def in_span(columns: BitMatrix, v) -> bool:
    """True when v is a combination of the given columns."""
    vec = np.array(v, dtype=np.uint8).reshape(-1)
    if columns.size == 0:
        return not np.any(vec)
    return solve(columns, vec) is not None


@dataclass(frozen=True, eq=False)
class Quotient:
    """
    A quotient V / W presented in normal-form coordinates.

    ``relations`` holds W in reduced row form; the quotient basis is the set of
    standard vectors at non-pivot positions (``kept``).
    """

    ambient: int
    relations: BitMatrix
    pivots: Tuple[int, ...]
    kept: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.kept)

    def project(self, vectors: BitMatrix) -> BitMatrix:
        """Project columns of ``vectors`` (ambient coordinates) to quotient coordinates."""
        vecs = to_gf2(vectors).reshape(self.ambient, -1).copy()
        for r, pc in enumerate(self.pivots):
            hit = np.flatnonzero(vecs[pc])
            if hit.size:
                vecs[:, hit] ^= self.relations[r].reshape(-1, 1)
        return vecs[list(self.kept), :]

    def lift(self, coords: BitMatrix) -> BitMatrix:
        """Standard representatives of quotient coordinates."""
        coords = to_gf2(coords).reshape(self.dim, -1)
        out = np.zeros((self.ambient, coords.shape[1]), dtype=np.uint8)
        out[list(self.kept), :] = coords
        return out


def quotient(ambient: int, relation_columns: BitMatrix) -> Quotient:
    """Quotient of F^ambient by the span of the given columns."""
    if relation_columns.size == 0:
        return Quotient(ambient, np.zeros((0, ambient), dtype=np.uint8), (), tuple(range(ambient)))
    result = row_reduce(to_gf2(relation_columns).reshape(ambient, -1).T)
    rows = result.matrix[: result.rank]
    pivot_set = set(result.pivots)
    kept = tuple(c for c in range(ambient) if c not in pivot_set)
    return Quotient(ambient, rows, result.pivots, kept)


@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite-window graded F₂-vector space."""

    window: Tuple[int, int]
    dims: Mapping[int, int]
    labels: Mapping[int, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.window
        if lo > hi:
            raise DimensionMismatch(f"empty window {self.window}")
        for d, n in self.dims.items():
            if n < 0:
                raise DimensionMismatch(f"negative dimension in degree {d}")
            if n and not lo <= d <= hi:
                raise DimensionMismatch(f"degree {d} lies outside window {self.window}")
        for d, tags in self.labels.items():
            if len(tags) != self.dim(d):
                raise DimensionMismatch(f"label count mismatch in degree {d}")

    def dim(self, d: int) -> int:
        return self.dims.get(d, 0)

    def degrees(self) -> Tuple[int, ...]:
        return tuple(sorted((d for d, n in self.dims.items() if n), reverse=True))

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def label(self, d: int, k: int) -> str:
        tags = self.labels.get(d)
        return tags[k] if tags else f"e{d}_{k}"

    def shifted(self, k: int) -> "GradedVectorSpace":
        lo, hi = self.window
        return GradedVectorSpace(
            (lo + k, hi + k),
            {d + k: n for d, n in self.dims.items()},
            {d + k: tags for d, tags in self.labels.items()},
        )


@dataclass(frozen=True, eq=False)
class GradedMap:
    """Degree-``shift`` linear map stored as blocks per source degree."""

    source: GradedVectorSpace
    target: GradedVectorSpace
    shift: int
    blocks: Mapping[int, BitMatrix] = field(default_factory=dict)

    def __post_init__(self):
        for d, block in self.blocks.items():
            expected = (self.target.dim(d + self.shift), self.source.dim(d))
            if block.shape != expected:
                raise DimensionMismatch(
                    f"block at degree {d} has shape {block.shape}, expected {expected}"
                )

    def block(self, d: int) -> BitMatrix:
        found = self.blocks.get(d)
        if found is not None:
            return found
        return zeros(self.target.dim(d + self.shift), self.source.dim(d))

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """self ∘ inner."""
        blocks: Dict[int, BitMatrix] = {}
        for d in inner.source.degrees():
            blocks[d] = matmul(self.block(d + inner.shift), inner.block(d))
        return GradedMap(inner.source, self.target, self.shift + inner.shift, blocks)

    def is_zero(self) -> bool:
        return all(is_zero(b) for b in self.blocks.values())

    def rank(self) -> int:
        return sum(rank(b) for b in self.blocks.values())


def homology_dims(d_in: GradedMap, d_out: GradedMap) -> GradedVectorSpace:
    """
    Homology of C' → C → C'' at the middle term, degree by degree.

    Raises ChainComplexError naming the first degree where d_out ∘ d_in ≠ 0.
    """
    middle = d_out.source
    dims: Dict[int, int] = {}
    for d in middle.degrees():
        incoming = d_in.block(d - d_in.shift)
        outgoing = d_out.block(d)
        if incoming.size and outgoing.size and not is_zero(matmul(outgoing, incoming)):
            raise ChainComplexError("composite of differentials is nonzero", degree=d)
        nullity = middle.dim(d) - rank(outgoing)
        dims[d] = nullity - rank(incoming)
    logger.debug("homology computed", degrees=len(dims))
    return GradedVectorSpace(middle.window, {d: n for d, n in dims.items() if n})


def homology_dim(d_in: BitMatrix, d_out: BitMatrix, dim: int) -> int:
    """Ungraded version: dim ker(d_out) − rank(d_in) on a space of dimension ``dim``."""
    if d_in.size and d_out.size and not is_zero(matmul(d_out, d_in)):
        raise ChainComplexError("composite of differentials is nonzero")
    return dim - (rank(d_out) if d_out.size else 0) - (rank(d_in) if d_in.size else 0)
