"""Exact computations with higher level Zhu algebras of vertex operator algebras.

The package works with the Heisenberg and Virasoro vertex operator
algebras truncated at a weight cutoff, the matrix algebra of states with
its product ``<>``, canonical forms modulo the O-span, the classical Zhu
product at the corner, and the graded action on ``Gr(W)`` for Fock and
Verma modules.  All arithmetic is over the rationals.
"""

__version__ = "0.1.0"

from .formal import LaurentPoly, gen_binomial, to_scalar
from .matrix import UMatrix, diamond, unit_matrix
from .modules import GrStructure, LowerBoundedModule, build_gr, theta_apply
from .reduction import canonical_reduce, cn_quotient_dimension, quotient_dimension_table, reduced_basis
from .report import Report
from .voa import State, TruncationExceeded, VertexAlgebra
from .zhu import dlm_product, zhu_product

__all__ = [
    "GrStructure",
    "LaurentPoly",
    "LowerBoundedModule",
    "Report",
    "State",
    "TruncationExceeded",
    "UMatrix",
    "VertexAlgebra",
    "build_gr",
    "canonical_reduce",
    "cn_quotient_dimension",
    "diamond",
    "dlm_product",
    "gen_binomial",
    "quotient_dimension_table",
    "reduced_basis",
    "theta_apply",
    "to_scalar",
    "unit_matrix",
    "zhu_product",
]
