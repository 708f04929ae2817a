"""
Exception hierarchy for the pin2homalg engine.

Every error raised by the engine derives from EngineError so the command-line
layer can map failures to exit codes in one place.
"""

from typing import Any, Optional


class EngineError(Exception):
    """Base class for all engine errors."""

    exit_code = 2


class BadInputError(EngineError):
    """Input that cannot be interpreted (files, names, flags)."""

    exit_code = 3


class DimensionMismatch(EngineError):
    """Matrix or vector shapes do not agree with the graded dimensions."""


class ChainComplexError(EngineError):
    """A composite of differentials is nonzero."""

    def __init__(self, message: str, degree: Optional[int] = None):
        super().__init__(message if degree is None else f"{message} (degree {degree})")
        self.degree = degree


class PrecisionMismatch(EngineError):
    """Operands were truncated at different V-adic precisions."""


class WindowOverflow(EngineError):
    """A construction would leave the materialized degree window."""


class ModuleStructureError(EngineError):
    """Module actions violate Q³ = 0, VQ = QV or V^p = 0."""


class DegreeError(EngineError):
    """A structure table entry has the wrong output degree."""


class KindMismatch(EngineError):
    """Operands are of incompatible kinds (algebra vs module, left vs right)."""


class RelationFailure(EngineError):
    """An A∞ relation check failed where it was required to pass."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class MasseyUndefined(EngineError):
    """A Massey product has no defining system."""

    def __init__(self, message: str, obstruction: Any = None):
        super().__init__(message)
        self.obstruction = obstruction


class FiltrationError(EngineError):
    """A differential raises filtration level."""


class SpectralSequenceError(EngineError):
    """Internal consistency of spectral-sequence pages failed."""


class BidegreeMismatch(SpectralSequenceError):
    """A differential pattern entry disagrees with the declared bidegree."""


class InfeasiblePattern(SpectralSequenceError):
    """A hypothesized differential rank exceeds the available dimensions."""


class UnknownCatalogueEntry(BadInputError):
    """Requested catalogue module does not exist."""


class StructureFormatError(BadInputError):
    """A JSON or YAML structure file is malformed."""
