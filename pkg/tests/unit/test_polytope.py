"""
Test Suite for Associahedron and Multiplihedron Face Data
"""

import csv
import io
import json

import pytest

from src.exceptions import BadInputError
from src.polytope import (
    Face,
    Interval,
    catalan,
    compatible,
    cube_decomposition,
    cut_pieces,
    euler_characteristic,
    f_vector,
    f_vector_csv,
    faces_above,
    faces_json,
    facets_j,
    facets_k,
    relation_terms,
)


class TestAssociahedra:
    """Face lattices of K_n."""

    def test_f_vectors(self):
        assert f_vector(3) == (2, 1)
        assert f_vector(4) == (5, 5, 1)
        assert f_vector(5) == (14, 21, 9, 1)

    def test_euler_characteristic_is_one(self):
        for n in range(3, 7):
            assert euler_characteristic(n) == 1

    def test_facet_counts(self):
        for n in range(3, 7):
            assert len(facets_k(n)) == n * (n - 1) // 2 - 1
        sizes = {(f.left, f.right) for f in facets_k(4)}
        assert sizes == {(2, 3), (3, 2)}

    def test_cubes_are_indexed_by_vertices(self):
        for n in range(3, 7):
            cubes = cube_decomposition(n)
            assert len(cubes) == catalan(n - 1)
            assert all(len(c) == n - 2 for c in cubes)

    def test_compatibility(self):
        assert compatible(Interval(0, 1), Interval(2, 3))
        assert compatible(Interval(0, 2), Interval(1, 2))
        assert not compatible(Interval(0, 1), Interval(1, 2))

    def test_parenthesization(self):
        face = Face(4, frozenset({Interval(0, 1), Interval(0, 2)}))
        assert face.parenthesization() == "((01)2)3"
        assert face.dimension == 0
        assert len(faces_above(face)) == 4

    def test_interval_tags(self):
        assert Interval(0, 2).tag == "module"
        assert Interval(1, 2).tag == "algebra"
        with pytest.raises(BadInputError):
            Interval(2, 2)


class TestMultiplihedra:
    """Facets of J_n."""

    def test_facet_counts(self):
        assert len(facets_j(2)) == 2
        assert len(facets_j(3)) == 6
        assert len(facets_j(4)) == 13

    def test_descriptions(self):
        kinds = {f.describe() for f in facets_j(2)}
        assert kinds == {"J1 x J1 x K2", "J1 x K2 @ 0"}


class TestRelationTerms:
    """Terms of the A∞ relation and their facet matching."""

    def test_small_cases(self):
        assert {(t.i, t.j, t.l) for t in relation_terms(2)} == {(1, 2, 1), (2, 1, 1), (2, 1, 2)}

    def test_facet_terms_match_k_facets(self):
        for n in range(3, 7):
            facet_intervals = {t.interval for t in relation_terms(n) if t.kind == "facet"}
            assert facet_intervals == {f.interval for f in facets_k(n)}

    def test_module_tag(self):
        term = [t for t in relation_terms(3) if (t.i, t.j, t.l) == (2, 2, 1)][0]
        assert term.tag == "module"

    def test_rejects_small_n(self):
        with pytest.raises(BadInputError):
            relation_terms(0)


class TestCobordismCuts:
    """Pieces of W_d after cutting along a separating hypersurface."""

    def test_module_cut(self):
        assert cut_pieces(4, Interval(0, 1)) == (("W", 2), ("W", 3))

    def test_algebra_cut(self):
        assert cut_pieces(4, Interval(1, 2)) == (("W", 3), ("Z", 2))

    def test_not_a_hypersurface(self):
        with pytest.raises(BadInputError):
            cut_pieces(4, Interval(0, 3))


class TestExports:
    """CSV and JSON renderings."""

    def test_csv(self):
        rows = list(csv.DictReader(io.StringIO(f_vector_csv([4]))))
        assert [int(r["faces"]) for r in rows] == [5, 5, 1]

    def test_json_vertices(self):
        data = json.loads(faces_json(4, dimension=0))
        assert len(data) == 5
        assert all(len(entry["intervals"]) == 2 for entry in data)
