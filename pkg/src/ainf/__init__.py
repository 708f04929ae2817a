"""A∞-algebras, modules and bimodules over F₂."""

from .codec import load_structure, structure_from_dict
from .massey import (
    HomologyAlgebra,
    MasseyCoset,
    MasseySet,
    homology_algebra,
    massey3,
    massey3_module,
    massey4,
    massey4_module,
)
from .models import (
    algebra_as_module,
    candidate_algebra,
    dg_model,
    ring_bimodule,
    strict_module,
    strict_ring_algebra,
)
from .relations import (
    RelationReport,
    check_algebra_relations,
    check_bimodule_relations,
    check_homotopy,
    check_module_relations,
    check_morphism,
    check_structure,
)
from .structures import (
    AInfAlgebra,
    AInfHomotopy,
    AInfModule,
    AInfMorphism,
    Basis,
    compose,
    identity,
    opposite,
    opposite_algebra,
    right_restriction,
)

__all__ = [
    "AInfAlgebra",
    "AInfHomotopy",
    "AInfModule",
    "AInfMorphism",
    "Basis",
    "HomologyAlgebra",
    "MasseyCoset",
    "MasseySet",
    "RelationReport",
    "algebra_as_module",
    "candidate_algebra",
    "check_algebra_relations",
    "check_bimodule_relations",
    "check_homotopy",
    "check_module_relations",
    "check_morphism",
    "check_structure",
    "compose",
    "dg_model",
    "homology_algebra",
    "identity",
    "load_structure",
    "massey3",
    "massey3_module",
    "massey4",
    "massey4_module",
    "opposite",
    "opposite_algebra",
    "right_restriction",
    "ring_bimodule",
    "strict_module",
    "strict_ring_algebra",
    "structure_from_dict",
]
