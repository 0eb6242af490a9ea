"""Exact computations with walls, flats and buildings of Coxeter groups."""

from __future__ import annotations

from .buildings import BuildingModel, check_axioms, extend_apartment, flat_projection_set, project
from .cayley import CoxeterGroup, Element, enumerate_ball, normal_form
from .diagram import (
    CoxeterMatrix, classify, dihedral, direct_sum, flat_rank, is_hyperbolic, named, parse_matrix, triangle,
)
from .errors import (
    ContractViolation, CoxflatError, MatrixValidationError, NotFoundError, PreconditionError,
    ResourceCapError, UncertifiedError, VerificationError,
)
from .flats import StandardFlat, dichotomy, extract_free_abelian, flat_walls, m_eucl, rank_witness
from .subgroups import chain_kind, is_euclidean_triangle, parabolic_closure, reflection_subgroup
from .walls import Wall, convex_hull, gallery_distance, separating_walls, split_convex

__version__ = "0.1.0"
