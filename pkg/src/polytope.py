"""
Face data of associahedra K_n and multiplihedra J_n.

A face of K_n is a set of pairwise compatible proper intervals of the input
string {0, …, n−1}; each interval is one bracket, or one separating
hypersurface of the cobordism with n incoming ends. Vertices are the maximal
sets (full bracketings) and also index the cubes of the cubical decomposition.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, FrozenSet, List, Optional, Tuple

import structlog

from .exceptions import BadInputError

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, order=True)
class Interval:
    """Consecutive inputs {i, …, j}; tagged ``module`` when it contains input 0."""

    i: int
    j: int

    def __post_init__(self):
        if not 0 <= self.i < self.j:
            raise BadInputError(f"interval needs 0 <= i < j, got ({self.i}, {self.j})")

    @property
    def length(self) -> int:
        return self.j - self.i + 1

    @property
    def tag(self) -> str:
        return "module" if self.i == 0 else "algebra"

    def contains(self, other: "Interval") -> bool:
        return self.i <= other.i and other.j <= self.j

    def __str__(self) -> str:
        return f"{{{self.i}..{self.j}}}"


def compatible(a: Interval, b: Interval) -> bool:
    """Disjoint or nested."""
    if a.j < b.i or b.j < a.i:
        return True
    return a.contains(b) or b.contains(a)


@dataclass(frozen=True)
class Face:
    n: int
    intervals: FrozenSet[Interval]

    @property
    def codimension(self) -> int:
        return len(self.intervals)

    @property
    def dimension(self) -> int:
        return self.n - 2 - len(self.intervals)

    def sorted_intervals(self) -> List[Interval]:
        return sorted(self.intervals)

    def parenthesization(self) -> str:
        """Bracket string such as ``((01)2)3``."""
        opens: Dict[int, int] = {}
        closes: Dict[int, int] = {}
        for iv in self.intervals:
            opens[iv.i] = opens.get(iv.i, 0) + 1
            closes[iv.j] = closes.get(iv.j, 0) + 1
        return "".join("(" * opens.get(k, 0) + str(k) + ")" * closes.get(k, 0) for k in range(self.n))

    def to_dict(self) -> dict:
        return {"n": self.n, "intervals": [[iv.i, iv.j] for iv in self.sorted_intervals()]}


@dataclass(frozen=True)
class Facet:
    """Codimension-one face K_l × K_{n−l+1} obtained by bracketing ``interval``."""

    interval: Interval
    left: int
    right: int


def _check_n(n: int, minimum: int) -> None:
    if n < minimum:
        raise BadInputError(f"n must be at least {minimum}, got {n}")


def proper_intervals(n: int) -> List[Interval]:
    """Intervals of length 2 … n−1 in {0, …, n−1}, shortest first."""
    return [Interval(i, i + length - 1) for length in range(2, n) for i in range(n - length + 1)]


def facets_k(n: int) -> List[Facet]:
    _check_n(n, 2)
    return [Facet(iv, iv.length, n - iv.length + 1) for iv in proper_intervals(n)]


@lru_cache(maxsize=16)
def _faces(n: int) -> Tuple[Face, ...]:
    intervals = proper_intervals(n)
    found: List[Face] = []

    def grow(start: int, chosen: Tuple[Interval, ...]) -> None:
        found.append(Face(n, frozenset(chosen)))
        for k in range(start, len(intervals)):
            cand = intervals[k]
            if all(compatible(cand, c) for c in chosen):
                grow(k + 1, chosen + (cand,))

    grow(0, ())
    return tuple(found)


def face_lattice(n: int) -> List[Face]:
    """Every face of K_n, the whole polytope (empty interval set) included."""
    _check_n(n, 2)
    faces = list(_faces(n))
    logger.debug("face lattice enumerated", n=n, faces=len(faces))
    return faces


def f_vector(n: int) -> Tuple[int, ...]:
    """(f_0, …, f_{n−2}): number of faces of each dimension."""
    counts = [0] * (n - 1)
    for face in face_lattice(n):
        counts[face.dimension] += 1
    return tuple(counts)


def euler_characteristic(n: int) -> int:
    return sum((-1) ** d * f for d, f in enumerate(f_vector(n)))


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


def cube_decomposition(n: int) -> List[FrozenSet[Interval]]:
    """Maximal compatible families; each spans one cube [0, ∞]^{n−2}."""
    return [f.intervals for f in face_lattice(n) if f.dimension == 0]


def faces_above(face: Face) -> List[Face]:
    """Faces containing ``face`` (subsets of its intervals)."""
    ivs = face.sorted_intervals()
    return [Face(face.n, frozenset(sub)) for k in range(len(ivs) + 1) for sub in combinations(ivs, k)]


@dataclass(frozen=True)
class MultiplihedronFace:
    """
    type1: J_{i₁} × … × J_{i_j} × K_j, ``parts`` = (i₁, …, i_j), j ≥ 2.
    type2: J_{n−e+1} × K_e with the K_e block starting at ``start``.
    """

    n: int
    kind: str
    parts: Tuple[int, ...] = ()
    start: int = 0
    size: int = 0

    def describe(self) -> str:
        if self.kind == "type1":
            return " x ".join(f"J{i}" for i in self.parts) + f" x K{len(self.parts)}"
        return f"J{self.n - self.size + 1} x K{self.size} @ {self.start}"


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def facets_j(n: int) -> List[MultiplihedronFace]:
    _check_n(n, 1)
    type1 = [MultiplihedronFace(n, "type1", parts=c) for c in _compositions(n) if len(c) >= 2]
    type2 = [
        MultiplihedronFace(n, "type2", start=s, size=e)
        for e in range(2, n + 1)
        for s in range(n - e + 1)
    ]
    return type1 + type2


@dataclass(frozen=True)
class RelationTerm:
    """
    μ_i(…, μ_j(block), …) with the inner block starting at input l (1-based).

    Terms with i, j ≥ 2 are facet-type: their block is a proper interval.
    """

    i: int
    j: int
    l: int

    @property
    def interval(self) -> Optional[Interval]:
        if self.j < 2:
            return None
        return Interval(self.l - 1, self.l + self.j - 2)

    @property
    def kind(self) -> str:
        return "facet" if self.i >= 2 and self.j >= 2 else "differential"

    @property
    def tag(self) -> str:
        """``module`` when the inner block absorbs the first input."""
        return "module" if self.l == 1 else "algebra"


@lru_cache(maxsize=32)
def _relation_terms(n: int) -> Tuple[RelationTerm, ...]:
    return tuple(
        RelationTerm(n + 1 - j, j, l)
        for j in range(1, n + 1)
        for l in range(1, n - j + 2)
    )


def relation_terms(n: int) -> Tuple[RelationTerm, ...]:
    """All (i, j, l) with i + j = n + 1 and 1 ≤ l ≤ n − j + 1."""
    _check_n(n, 1)
    return _relation_terms(n)


def hypersurfaces(d: int) -> List[Interval]:
    """Separating hypersurfaces Σ_{i,j} of the cobordism with ends 0 … d−1."""
    return proper_intervals(d)


def cut_pieces(d: int, interval: Interval) -> Tuple[Tuple[str, int], Tuple[str, int]]:
    """
    Pieces of W_d after cutting along Σ_{i,j}.

    i = 0 gives W_{j+1} (ends 0…j) and W_{d−j}; i > 0 gives W_{d−(j−i)} and
    Z_{j−i+1}.
    """
    if interval not in hypersurfaces(d):
        raise BadInputError(f"{interval} is not a separating hypersurface of W_{d}")
    if interval.i == 0:
        return ("W", interval.j + 1), ("W", d - interval.j)
    return ("W", d - (interval.j - interval.i)), ("Z", interval.length)


def f_vector_csv(n_values) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "dimension", "faces"])
    for n in n_values:
        for d, count in enumerate(f_vector(n)):
            writer.writerow([n, d, count])
    return buf.getvalue()


def faces_json(n: int, dimension: Optional[int] = None) -> str:
    faces = [f for f in face_lattice(n) if dimension is None or f.dimension == dimension]
    return json.dumps([f.to_dict() | {"dimension": f.dimension} for f in faces], indent=2)
