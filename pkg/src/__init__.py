"""
pin2homalg
Exact F₂ homological algebra over R = F[[V]][Q]/(Q³)

This package provides:
- Bigraded Tor over R through free resolutions and bar complexes
- A∞-algebras, modules and bimodules with relation checkers and Massey products
- The A∞ tensor product ⊠ and its spectral sequence
- Associahedron and multiplihedron face data
"""

__version__ = "0.1.0"
__description__ = "Exact F2 engine for Tor over F[[V]][Q]/(Q^3), A-infinity structures and spectral sequences"
