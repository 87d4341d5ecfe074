"""The Gross module of supersingular curves mod p and exact modular degrees."""

from .basis import (
    CM_J,
    BasisEntry,
    EnumerationError,
    SpCount,
    SupersingularBasis,
    cm_support_index,
    enumerate_supersingular,
    frobenius_perm,
    genus_x0,
    sp_count,
    verify_hasse,
)
from .brandt import BrandtError, BrandtMatrix, brandt_matrix, compute_brandt
from .eigen import (
    DegreeMismatchError,
    EigenvectorRecord,
    InconsistentEigenvalueError,
    InvariantError,
    NeedsMoreHeckeError,
    gross_pairing,
    hecke_eigenvector,
    modular_degree_prime,
)
from .modpoly import ModularPolynomial, load_modular_polynomial

__all__ = [
    "CM_J",
    "BasisEntry",
    "BrandtError",
    "BrandtMatrix",
    "DegreeMismatchError",
    "EigenvectorRecord",
    "EnumerationError",
    "InconsistentEigenvalueError",
    "InvariantError",
    "ModularPolynomial",
    "NeedsMoreHeckeError",
    "SpCount",
    "SupersingularBasis",
    "brandt_matrix",
    "cm_support_index",
    "compute_brandt",
    "enumerate_supersingular",
    "frobenius_perm",
    "genus_x0",
    "gross_pairing",
    "hecke_eigenvector",
    "load_modular_polynomial",
    "modular_degree_prime",
    "sp_count",
    "verify_hasse",
]
