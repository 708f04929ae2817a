"""
Test Suite for Box Tensor Products and Mapping Cones

Covers the bar model of F ⊠ F against the resolution path, the bridge
bimodule and its induced left action, and cones of module morphisms.
"""

from pathlib import Path

import pytest

from src.ainf import (
    AInfAlgebra,
    AInfHomotopy,
    AInfModule,
    AInfMorphism,
    Basis,
    check_module_relations,
    identity,
    load_structure,
    strict_module,
    strict_ring_algebra,
)
from src.boxtensor import box_tensor, iterated_cone, left_module_on_box, mapping_cone, relevant_order
from src.exceptions import KindMismatch, RelationFailure
from src.resolve import cross_check, tor
from src.ring_r import Monomial, ring_r
from src.rmodule import catalogue, shift

STRUCTURES = Path(__file__).resolve().parents[2] / "config" / "structures"


def q_multiplication(p: int) -> AInfMorphism:
    """Multiplication by Q from R⟨−1⟩ to R over the strict model of R_p."""
    alg = strict_ring_algebra(ring_r(p))
    r = catalogue("R", precision=p).module
    source = strict_module(shift(r, -1), alg)
    target = strict_module(r, alg)
    table = {}
    for x, name in enumerate(source.basis.names):
        mono = Monomial(0, 0) if name == "e0" else Monomial.parse(name.split("·")[0])
        prod = r.ring.multiply(mono, Monomial(0, 1))
        if prod is None:
            continue
        label = "e0" if prod.is_unit else f"{prod.short}·e0"
        table[(0, (x,))] = frozenset({target.basis.index(label)})
    return AInfMorphism("module", source, target, {1: table}, name="Q")


class TestBarModel:
    """F ⊠ F over the strict ring is the bar complex computing Tor."""

    def setup_method(self):
        self.alg = strict_ring_algebra(ring_r(3))
        f = catalogue("F", precision=3).module
        self.right = strict_module(f, self.alg)
        self.left = strict_module(f, self.alg, side="left")

    def test_agrees_with_resolution(self):
        box = box_tensor(self.right, self.left, n_max=3)
        assert box.normalized
        assert box.preserves_internal_degree()
        table = box.bigraded_homology()
        assert not table.is_certified(3, 0)
        report = cross_check(table, tor(catalogue("F", precision=3).module, catalogue("F", precision=3).module,
                                        "resolution", i_max=2, j_range=(-11, 0)))
        assert report.agree
        assert report.compared == 36

    def test_stable_homology_flags_degrees_that_move(self):
        alg = strict_ring_algebra(ring_r(2))
        f = catalogue("F", precision=2).module
        box = box_tensor(strict_module(f, alg), strict_module(f, alg, side="left"), n_max=2)
        report = box.stable_homology()
        assert report.dims == box.homology()
        # [x|y] and [x|Q|y]; longer Q-words are not cycles
        assert report.dims[0] == 2
        assert 0 in report.certified
        assert -1 in report.uncertified
        assert -2 in report.uncertified
        assert not set(report.certified) & set(report.uncertified)

    def test_low_degrees(self):
        table = box_tensor(self.right, self.left, n_max=2).bigraded_homology()
        assert table.get(0, 0) == 1
        assert table.get(1, -1) == 1
        assert table.get(1, -4) == 1

    def test_document(self):
        doc = box_tensor(self.right, self.left, n_max=1).to_document()
        assert doc["stages"] == {"0": 1, "1": 8}

    def test_sides_checked(self):
        with pytest.raises(KindMismatch):
            box_tensor(self.left, self.left, n_max=1)
        with pytest.raises(KindMismatch):
            box_tensor(self.right, self.right, n_max=1)

    def test_algebras_must_match(self):
        other = strict_module(catalogue("F", precision=2).module, strict_ring_algebra(ring_r(2)), side="left")
        with pytest.raises(KindMismatch):
            box_tensor(self.right, other, n_max=1)

    def test_broken_module_refused(self):
        q = self.alg.basis.index("Q")
        basis = Basis(("x", "y", "z"), (0, -1, -2))
        # (x·Q)·Q = z while x·Q² = 0
        broken = AInfModule("right", basis, {(0, (0, q)): frozenset({1}), (0, (1, q)): frozenset({2})}, self.alg)
        with pytest.raises(RelationFailure):
            box_tensor(broken, self.left, n_max=2)

    def test_relevant_order(self):
        assert relevant_order(3, self.right, self.left, self.alg) == 3
        assert relevant_order(1, self.right) == 2


class TestBridge:
    """The bimodule with m(x, r, r) = z and m(r, x, r) = w."""

    def setup_method(self):
        self.bimodule = load_structure(STRUCTURES / "bridge_bimodule.json")
        self.left = load_structure(STRUCTURES / "bridge_left.json")
        self.names = self.bimodule.basis
        self.r = self.bimodule.algebra.basis.index("r")

    def word(self, box, x, letters, y="y"):
        return box.index[(self.names.index(x), tuple(self.r for _ in range(letters)), self.left.basis.index(y))]

    def test_length_two_differential(self):
        box = box_tensor(self.bimodule, self.left, n_max=3)
        assert not box.normalized
        source = self.word(box, "x", 2)
        assert box.boundary[source] == frozenset({self.word(box, "z", 0)})
        assert box.degree(source) == 0
        assert box.label(source) == "[x|r|r|y]"

    def test_induced_left_action(self):
        box, module = left_module_on_box(self.bimodule, self.left, n_max=3)
        assert module.side == "left"
        hit = module.op(1, (self.r, self.word(box, "x", 1)))
        assert hit == frozenset({self.word(box, "w", 0)})
        assert module.op(0, (self.word(box, "x", 2),)) == frozenset({self.word(box, "z", 0)})

    def test_needs_bimodule(self):
        right = strict_module(catalogue("F", precision=2).module, strict_ring_algebra(ring_r(2)))
        with pytest.raises(KindMismatch):
            left_module_on_box(right, self.left, n_max=2)


class TestMappingCones:
    """Cones of module morphisms and their long exact sequences."""

    def test_multiplication_by_q(self):
        for p in (2, 3):
            cone = mapping_cone(q_multiplication(p), n_max=3)
            assert check_module_relations(cone.module, 3).passed
            assert sum(cone.homology().values()) == 2 * p
            assert not cone.is_acyclic()
            report = cone.triangle()
            assert report.exact
            assert report.lines

    def test_identity_cone_is_acyclic(self):
        alg = strict_ring_algebra(ring_r(2))
        target = strict_module(catalogue("R", precision=2).module, alg)
        cone = mapping_cone(identity(target), n_max=2)
        assert cone.is_acyclic()
        assert cone.triangle().exact

    def test_cone_on_broken_module_refused(self):
        alg = strict_ring_algebra(ring_r(3))
        q = alg.basis.index("Q")
        basis = Basis(("x", "y", "z"), (0, -1, -2))
        broken = AInfModule("right", basis, {(0, (0, q)): frozenset({1}), (0, (1, q)): frozenset({2})}, alg)
        # the identity is a morphism and the cone squares to zero; only the module relation fails
        with pytest.raises(RelationFailure):
            mapping_cone(identity(broken), n_max=2)

    def test_cone_of_non_morphism_refused(self):
        f = q_multiplication(2)
        alg = f.source.algebra
        v = alg.basis.index("V")
        e0 = f.source.basis.index("e0")
        # a non-zero f₂ on (e0, V) breaks the morphism relation
        extra = {(0, (e0, v)): frozenset({f.target.basis.index("V·e0")})}
        bad = AInfMorphism("module", f.source, f.target, {1: f.components[1], 2: extra})
        with pytest.raises(RelationFailure):
            mapping_cone(bad, n_max=3)


class TestIteratedCone:
    """Total complex of C₁ → C₂ → C₃ with a nullhomotopy of the composite."""

    def setup_method(self):
        alg = AInfAlgebra(Basis(("1",), (0,)), {})
        self.c1 = AInfModule("right", Basis(("x",), (0,)), {}, alg)
        self.c2 = AInfModule("right", Basis(("y",), (0,)), {}, alg)
        self.c3 = AInfModule("right", Basis(("z", "w"), (0, 1)), {(0, (1,)): frozenset({0})}, alg)
        self.f1 = AInfMorphism("module", self.c1, self.c2, {1: {(0, (0,)): frozenset({0})}})
        self.f2 = AInfMorphism("module", self.c2, self.c3, {1: {(0, (0,)): frozenset({0})}})

    def test_nullhomotopy_gives_acyclic_total_complex(self):
        h = AInfHomotopy(self.c1, self.c3, {1: {(0, (0,)): frozenset({1})}})
        cone = iterated_cone(self.f1, self.f2, h)
        b = cone.module.basis
        assert b.degree(b.index("1.x")) == 2
        assert cone.module.op(0, (b.index("1.x"),)) == frozenset({b.index("2.y"), b.index("3.w")})
        assert cone.is_acyclic()

    def test_missing_homotopy_refused(self):
        with pytest.raises(RelationFailure):
            iterated_cone(self.f1, self.f2, AInfHomotopy(self.c1, self.c3))

    def test_triangle_needs_morphism(self):
        h = AInfHomotopy(self.c1, self.c3, {1: {(0, (0,)): frozenset({1})}})
        with pytest.raises(KindMismatch):
            iterated_cone(self.f1, self.f2, h).triangle()
