"""Many triangulated 3-spheres from Heffter surfaces and octahedron choices."""
from .assembly import SphereCellulation, assemble_sphere, triangulate_sphere
from .finite_field import Field, FieldElement, make_field
from .heffter import HeffterSpec, heffter_cellulation, heffter_triangulation, make_spec
from .verify import count_distinct_sample, verify_sphere

__version__ = "0.1.0"

__all__ = [
    "Field", "FieldElement", "HeffterSpec", "SphereCellulation", "assemble_sphere",
    "count_distinct_sample", "heffter_cellulation", "heffter_triangulation", "make_field",
    "make_spec", "triangulate_sphere", "verify_sphere",
]
