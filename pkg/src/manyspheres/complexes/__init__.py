"""Cellulations, simplicial complexes and their invariants."""
from .canonical import canonical_form, canonical_labelling, isomorphism
from .cellulation import Cellulation, coherent_signs, is_orientable_surface, is_strongly_regular
from .homology import HomologyProfile, homology, smith_diagonal
from .simplicial import (
    FVector,
    SimplicialComplex,
    boundary_of_simplex,
    f_vector,
    is_closed_pseudomanifold,
    is_manifold_3,
    is_surface,
    link,
)

__all__ = [
    "Cellulation", "FVector", "HomologyProfile", "SimplicialComplex",
    "boundary_of_simplex", "canonical_form", "canonical_labelling", "coherent_signs",
    "f_vector", "homology", "is_closed_pseudomanifold", "is_manifold_3",
    "is_orientable_surface", "is_strongly_regular", "is_surface", "isomorphism", "link",
    "smith_diagonal",
]
