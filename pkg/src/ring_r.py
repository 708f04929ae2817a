"""
The coefficient ring R = F[[V]][Q]/(Q³), truncated V-adically.

V has degree −4 and Q degree −1. ``GradedRing`` carries the generator degrees
and the nilpotency order of Q so that F[[U]] (deg U = −2, no Q) reuses the same
machinery; ``Precision`` is the truncation V^p = 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from .exceptions import BadInputError, PrecisionMismatch

V_DEGREE = -4
Q_DEGREE = -1
Q_ORDER = 3

_MONOMIAL_RE = re.compile(r"^(?:V(?:\^?(\d+))?)?\*?(?:Q(?:\^?(\d+))?)?$")


@dataclass(frozen=True)
class Precision:
    """V-adic truncation: V^p ≡ 0."""

    p: int

    def __post_init__(self):
        if self.p < 1:
            raise BadInputError(f"precision must be at least 1, got {self.p}")


@dataclass(frozen=True, order=True)
class Monomial:
    """V^v Q^q."""

    v: int = 0
    q: int = 0

    @property
    def is_unit(self) -> bool:
        return self.v == 0 and self.q == 0

    def degree(self, v_degree: int = V_DEGREE, q_degree: int = Q_DEGREE) -> int:
        return v_degree * self.v + q_degree * self.q

    def __str__(self) -> str:
        return f"V^{self.v}*Q^{self.q}"

    @property
    def short(self) -> str:
        if self.is_unit:
            return "1"
        v = "" if self.v == 0 else ("V" if self.v == 1 else f"V{self.v}")
        q = "" if self.q == 0 else ("Q" if self.q == 1 else f"Q{self.q}")
        return v + q

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        """Accepts "V^i*Q^j", "V2Q", "Q2", "VQ", "1"."""
        token = text.strip().replace(" ", "")
        if token == "1":
            return cls(0, 0)
        match = _MONOMIAL_RE.match(token)
        if not token or match is None:
            raise BadInputError(f"cannot parse monomial {text!r}")
        v_part = "V" in token
        q_part = "Q" in token
        v = int(match.group(1)) if match.group(1) is not None else (1 if v_part else 0)
        q = int(match.group(2)) if match.group(2) is not None else (1 if q_part else 0)
        return cls(v, q)


@dataclass(frozen=True)
class GradedRing:
    """F[V, Q]/(V^p, Q^q_order) with the given generator degrees."""

    precision: Precision
    v_degree: int = V_DEGREE
    q_degree: int = Q_DEGREE
    q_order: int = Q_ORDER

    @property
    def p(self) -> int:
        return self.precision.p

    def degree(self, mono: Monomial) -> int:
        return mono.degree(self.v_degree, self.q_degree)

    def contains(self, mono: Monomial) -> bool:
        return 0 <= mono.v < self.p and 0 <= mono.q < self.q_order

    def monomials(self) -> Tuple[Monomial, ...]:
        return _monomials(self)

    def basis_in_degree(self, d: int) -> List[Monomial]:
        return [m for m in self.monomials() if self.degree(m) == d]

    def augmentation_ideal_basis(self, d: int) -> List[Monomial]:
        if d == 0:
            raise BadInputError("the augmentation ideal has no degree-0 part")
        return [m for m in self.basis_in_degree(d) if not m.is_unit]

    def nonunit_monomials(self) -> Tuple[Monomial, ...]:
        return tuple(m for m in self.monomials() if not m.is_unit)

    def multiply(self, a: Monomial, b: Monomial) -> Optional[Monomial]:
        """Product of monomials, or None when it truncates to zero."""
        prod = Monomial(a.v + b.v, a.q + b.q)
        return prod if self.contains(prod) else None

    def generators(self) -> Tuple[Monomial, ...]:
        gens = [Monomial(1, 0)] if self.p > 1 else []
        if self.q_order > 1:
            gens.append(Monomial(0, 1))
        return tuple(gens)

    def bottom_degree(self) -> int:
        return min(self.degree(m) for m in self.monomials())


@lru_cache(maxsize=64)
def _monomials(ring: GradedRing) -> Tuple[Monomial, ...]:
    return tuple(
        sorted(
            (Monomial(i, j) for i in range(ring.p) for j in range(ring.q_order)),
            key=lambda m: (-ring.degree(m), m),
        )
    )


def ring_r(precision) -> GradedRing:
    """R_p = F[V, Q]/(V^p, Q³)."""
    if isinstance(precision, int):
        precision = Precision(precision)
    return GradedRing(precision)


def ring_u(precision, u_degree: int = -2) -> GradedRing:
    """F[U]/(U^p), used for modules over a PID."""
    if isinstance(precision, int):
        precision = Precision(precision)
    return GradedRing(precision, v_degree=u_degree, q_degree=Q_DEGREE, q_order=1)


@dataclass(frozen=True)
class RingElement:
    """A sum of monomials in a truncated ring."""

    terms: FrozenSet[Monomial]
    ring: GradedRing

    def __post_init__(self):
        for mono in self.terms:
            if not self.ring.contains(mono):
                raise BadInputError(f"monomial {mono} is not in the truncated ring")

    @classmethod
    def from_monomials(cls, monos: Iterable[Monomial], ring: GradedRing) -> "RingElement":
        acc: set = set()
        for mono in monos:
            acc ^= {mono}
        return cls(frozenset(acc), ring)

    @classmethod
    def parse(cls, text: str, ring: GradedRing) -> "RingElement":
        if text.strip() == "0":
            return cls(frozenset(), ring)
        return cls.from_monomials((Monomial.parse(t) for t in text.split("+")), ring)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> Optional[int]:
        degrees = {self.ring.degree(m) for m in self.terms}
        if len(degrees) > 1:
            raise BadInputError("element is not homogeneous")
        return degrees.pop() if degrees else None

    @property
    def coefficients(self) -> np.ndarray:
        """Bits c[i][j] of Σ c[i][j] V^i Q^j."""
        bits = np.zeros((self.ring.p, self.ring.q_order), dtype=np.uint8)
        for mono in self.terms:
            bits[mono.v, mono.q] = 1
        return bits

    def __add__(self, other: "RingElement") -> "RingElement":
        _check_same_ring(self, other)
        return RingElement(self.terms ^ other.terms, self.ring)

    def __mul__(self, other: "RingElement") -> "RingElement":
        return mul(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(m.short for m in sorted(self.terms, key=lambda m: (-self.ring.degree(m), m)))


def _check_same_ring(a: RingElement, b: RingElement) -> None:
    if a.ring.precision != b.ring.precision:
        raise PrecisionMismatch(f"precisions {a.ring.p} and {b.ring.p} differ")
    if a.ring != b.ring:
        raise PrecisionMismatch("elements belong to different rings")


def mul(a: RingElement, b: RingElement) -> RingElement:
    """Ring product with V^{≥p} and the Q-overflow truncated to zero."""
    _check_same_ring(a, b)
    products = []
    for x in a.terms:
        for y in b.terms:
            prod = a.ring.multiply(x, y)
            if prod is not None:
                products.append(prod)
    return RingElement.from_monomials(products, a.ring)


def basis_in_degree(d: int, p) -> List[Monomial]:
    return ring_r(p).basis_in_degree(d)


def augmentation_ideal_basis(d: int, p) -> List[Monomial]:
    return ring_r(p).augmentation_ideal_basis(d)
