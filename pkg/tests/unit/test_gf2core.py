"""
Test Suite for Exact GF(2) Linear Algebra

Covers elimination, kernels, solving, quotients and graded homology on small
hand-checked matrices, and graded homology against brute-force enumeration.
"""

from itertools import product

import numpy as np
import pytest

from src.exceptions import ChainComplexError, DimensionMismatch
from src.gf2core import (
    GradedMap,
    GradedVectorSpace,
    homology_dim,
    homology_dims,
    image_basis,
    in_span,
    kernel_basis,
    matmul,
    quotient,
    rank,
    row_reduce,
    solve,
    to_gf2,
)


def enumerated_homology(d_in, d_out) -> int:
    """log₂(|ker d_out| / |im d_in|) by listing every vector."""
    middle = d_out.shape[1]
    cycles = sum(
        1 for bits in product((0, 1), repeat=middle)
        if not matmul(d_out, np.array(bits, dtype=np.uint8)).any()
    )
    boundaries = {
        tuple(matmul(d_in, np.array(bits, dtype=np.uint8)))
        for bits in product((0, 1), repeat=d_in.shape[1])
    }
    return (cycles // len(boundaries)).bit_length() - 1


class TestRowReduction:
    """Rank, pivots and reduced forms."""

    def setup_method(self):
        self.m = to_gf2([[1, 1, 0, 1], [0, 1, 1, 0], [1, 0, 1, 1]])

    def test_entries_reduced_mod_two(self):
        m = to_gf2([[2, 3], [-1, 4]])
        assert m.tolist() == [[0, 1], [1, 0]]
        assert m.dtype == np.uint8

    def test_reshape_checks_size(self):
        with pytest.raises(DimensionMismatch):
            to_gf2([1, 0, 1], rows=2, cols=2)

    def test_rank_over_f2(self):
        # third row is the sum of the first two
        assert rank(self.m) == 2
        assert rank(to_gf2([[1, 1], [1, 1]])) == 1

    def test_pivots_follow_column_order(self):
        assert row_reduce(self.m).pivots == (0, 1)
        assert row_reduce(self.m, column_order=[3, 2, 1, 0]).pivots == (3, 2)

    def test_wide_matrix_packs_beyond_one_byte(self):
        m = np.zeros((2, 20), dtype=np.uint8)
        m[0, 17] = 1
        m[1, 17] = 1
        m[1, 19] = 1
        result = row_reduce(m)
        assert result.rank == 2
        assert result.pivots == (17, 19)

    def test_kernel_and_image(self):
        ker = kernel_basis(self.m)
        assert ker.shape == (4, 2)
        assert not matmul(self.m, ker).any()
        assert rank(ker) == 2
        assert image_basis(self.m).shape == (3, 2)

    def test_matmul_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            matmul(np.zeros((2, 3), dtype=np.uint8), np.zeros((2, 2), dtype=np.uint8))


class TestSolve:
    """Particular solutions and span membership."""

    def setup_method(self):
        self.m = to_gf2([[1, 1, 0], [0, 1, 1]])

    def test_consistent_system(self):
        x = solve(self.m, [1, 0])
        assert matmul(self.m, x.reshape(-1, 1)).reshape(-1).tolist() == [1, 0]

    def test_inconsistent_system(self):
        m = to_gf2([[1, 1], [1, 1]])
        assert solve(m, [1, 0]) is None

    def test_randomized_pivoting_stays_a_solution(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            x = solve(self.m, [1, 1], rng=rng)
            assert matmul(self.m, x.reshape(-1, 1)).reshape(-1).tolist() == [1, 1]

    def test_in_span(self):
        cols = to_gf2([[1, 0], [1, 1], [0, 1]])
        assert in_span(cols, [1, 0, 1])
        assert not in_span(cols, [1, 0, 0])
        assert in_span(np.zeros((3, 0), dtype=np.uint8), [0, 0, 0])


class TestQuotient:
    """Normal-form coordinates on V / W."""

    def test_projection_and_lift(self):
        q = quotient(3, to_gf2([[1], [1], [0]]))
        assert q.dim == 2
        assert q.kept == (1, 2)
        e0 = to_gf2([[1], [0], [0]])
        e1 = to_gf2([[0], [1], [0]])
        # e0 ≡ e1 modulo the relation
        assert np.array_equal(q.project(e0), q.project(e1))
        coords = q.project(to_gf2([[0], [0], [1]]))
        assert np.array_equal(q.project(q.lift(coords)), coords)

    def test_empty_relations(self):
        q = quotient(2, np.zeros((2, 0), dtype=np.uint8))
        assert q.dim == 2


class TestGradedHomology:
    """Degreewise homology of C' → C → C''."""

    def setup_method(self):
        # 1 → 2 → 1 in degree 0, composite zero
        self.middle = GradedVectorSpace((0, 0), {0: 2})
        self.ends = GradedVectorSpace((0, 0), {0: 1})

    def test_homology_dims(self):
        d_in = GradedMap(self.ends, self.middle, 0, {0: to_gf2([[1], [1]])})
        d_out = GradedMap(self.middle, self.ends, 0, {0: to_gf2([[1, 1]])})
        h = homology_dims(d_in, d_out)
        assert h.total_dim == 0

    def test_nonzero_composite_names_degree(self):
        d_in = GradedMap(self.ends, self.middle, 0, {0: to_gf2([[1], [0]])})
        d_out = GradedMap(self.middle, self.ends, 0, {0: to_gf2([[1, 0]])})
        with pytest.raises(ChainComplexError) as info:
            homology_dims(d_in, d_out)
        assert info.value.degree == 0

    def test_block_shape_checked(self):
        with pytest.raises(DimensionMismatch):
            GradedMap(self.ends, self.middle, 0, {0: to_gf2([[1, 1]])})

    def test_ungraded_homology(self):
        assert homology_dim(np.zeros((3, 0), dtype=np.uint8), to_gf2([[1, 0, 0]]), 3) == 2

    def test_window_rejects_outside_degrees(self):
        with pytest.raises(DimensionMismatch):
            GradedVectorSpace((0, 1), {3: 1})

    def test_shifted_space(self):
        s = GradedVectorSpace((-2, 0), {0: 1, -2: 3}).shifted(5)
        assert s.window == (3, 5)
        assert s.dim(3) == 3

    def test_agrees_with_subspace_enumeration(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            a, b, c = (int(x) for x in rng.integers(1, 5, size=3))
            d_out = rng.integers(0, 2, size=(c, b), dtype=np.uint8)
            ker = kernel_basis(d_out)
            coeffs = rng.integers(0, 2, size=(ker.shape[1], a), dtype=np.uint8)
            d_in = matmul(ker, coeffs) if ker.shape[1] else np.zeros((b, a), dtype=np.uint8)
            top = GradedVectorSpace((-1, 1), {1: a})
            middle = GradedVectorSpace((-1, 1), {0: b})
            bottom = GradedVectorSpace((-1, 1), {-1: c})
            h = homology_dims(GradedMap(top, middle, -1, {1: d_in}), GradedMap(middle, bottom, -1, {0: d_out}))
            assert h.dim(0) == enumerated_homology(d_in, d_out), (a, b, c)
