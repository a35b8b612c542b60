"""C_lambda-extended oscillator algebras.

Parameters, unirrep classification, truncated Fock matrices, SUSY-type
realizations and deformed variants, each with residual-based checks.
"""

from .algebra import AlgebraParams, new_algebra, structure_function
from .errors import (ClextError, InvalidParameters, NotApplicable, RejectedFamily, TruncationTooSmall,
                     UnitarityViolation)
from .fock import FockRep, build_fock, h0_spectrum, verify_defining_relations
from .report import Check, RelationReport
from .reps import NoUnirrep, Unirrep, classify_gdoa, classify_oracle, normalization

__version__ = "0.1.0"

__all__ = [
    "AlgebraParams", "new_algebra", "structure_function",
    "ClextError", "InvalidParameters", "NotApplicable", "RejectedFamily", "TruncationTooSmall",
    "UnitarityViolation",
    "FockRep", "build_fock", "h0_spectrum", "verify_defining_relations",
    "Check", "RelationReport",
    "Unirrep", "NoUnirrep", "classify_gdoa", "classify_oracle", "normalization",
]
