"""Poisson-Lie structures on the nine real three-dimensional Lie groups.

Structure constants and representations live in :mod:`plgroups.algebra`,
charts and products in :mod:`plgroups.group`, bracket families and Casimirs
in :mod:`plgroups.families`, the Poisson checks in :mod:`plgroups.poisson`,
bialgebras and r-matrices in :mod:`plgroups.bialgebra`, the numerical Ansatz
solver in :mod:`plgroups.derive` and the classification tables in
:mod:`plgroups.classify`.
"""

__version__ = "0.1.0"

from .algebra import GROUP_IDS, StructureConstants, check_rep, lie_algebra, matrix_exp
from .bialgebra import (
    coboundary_match,
    cocycle_check,
    co_jacobi_check,
    linearize,
    mcybe_check,
    r_matrix,
    sklyanin_bracket,
)
from .classify import ClassEntry, VerificationReport, full_suite, instantiate, verify_entry
from .families import CASIMIRS, FAMILIES, BracketFamily, CasimirBranch, get_family
from .group import GroupPoint, coproduct_eval, get_group, make_point, multiply
from .jet import Jet
from .poisson import bivector_eval, casimir_residual, jacobiator, multiplicativity_residual

__all__ = [
    "BracketFamily",
    "CASIMIRS",
    "CasimirBranch",
    "ClassEntry",
    "FAMILIES",
    "GROUP_IDS",
    "GroupPoint",
    "Jet",
    "StructureConstants",
    "VerificationReport",
    "bivector_eval",
    "casimir_residual",
    "check_rep",
    "co_jacobi_check",
    "coboundary_match",
    "cocycle_check",
    "coproduct_eval",
    "full_suite",
    "get_family",
    "get_group",
    "instantiate",
    "jacobiator",
    "lie_algebra",
    "linearize",
    "make_point",
    "matrix_exp",
    "mcybe_check",
    "multiplicativity_residual",
    "multiply",
    "r_matrix",
    "sklyanin_bracket",
    "verify_entry",
]
