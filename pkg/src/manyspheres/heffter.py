"""Heffter's neighbourly cellulations of closed orientable surfaces.

For a prime power q = 4k + 1 and a generator a of GF(q)^*, the polygon
attached to s in GF(q) visits

    v(s, k) = s + (a^k - 1) / (a - 1),   k = 0, ..., q - 2,

in this cyclic order.  The q polygons have q - 1 sides each, every pair of
field elements is an edge, and every edge lies on exactly two polygons.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .complexes.canonical import canonical_form
from .complexes.cellulation import Cellulation, coherent_signs
from .complexes.simplicial import SimplicialComplex
from .errors import BadResidue, NotPrimitive
from .finite_field import Field, FieldElement, field_of_order, primitive_elements


@dataclass(frozen=True)
class HeffterSpec:
    q: int
    alpha: FieldElement
    field: Field

    def __post_init__(self):
        if self.q != self.field.q:
            raise ValueError(f"q={self.q} does not match {self.field!r}")
        if self.q % 4 != 1:
            raise BadResidue(f"q={self.q} is not 1 mod 4")
        if self.alpha.field != self.field or not self.alpha or self.alpha.order() != self.q - 1:
            raise NotPrimitive(f"{self.alpha} does not generate GF({self.q})^*")

    @property
    def genus(self) -> int:
        return self.q * (self.q - 5) // 4 + 1

    def elements(self) -> list[FieldElement]:
        return self.field.elements()

    def vertex(self, s: FieldElement, k: int) -> FieldElement:
        a = self.alpha
        return s + (a ** k - 1) / (a - 1)

    def polygon(self, s: FieldElement) -> tuple[FieldElement, ...]:
        return tuple(self.vertex(s, k) for k in range(self.q - 1))


def make_spec(q: int, alpha=None, modulus=None) -> HeffterSpec:
    """Spec from an order, an optional generator token and an optional modulus.

    ``alpha`` may be None or "auto" (first primitive element), an int, a
    coefficient sequence or a text token such as "2,2".
    """
    if q % 4 != 1:
        raise BadResidue(f"q={q} is not 1 mod 4")
    f = field_of_order(q, modulus)
    if alpha is None or alpha == "auto":
        a = primitive_elements(f)[0]
    else:
        a = f(alpha)
    return HeffterSpec(q, a, f)


def center(s) -> str:
    return f"c({s})"


def heffter_cellulation(spec: HeffterSpec) -> Cellulation:
    """The cellulation with one (q-1)-gon per field element, polygon id = element index."""
    els = spec.elements()
    polys = [tuple(str(v) for v in spec.polygon(s)) for s in els]
    cel = Cellulation.from_polygons(polys, vertices=[str(s) for s in els])
    for i in cel.cells[2]:
        cel.tags[(2, i)] = "polygon"
    return cel


def heffter_genus(spec: HeffterSpec, cel: Cellulation | None = None) -> int:
    g = spec.genus
    cel = cel or heffter_cellulation(spec)
    if cel.euler_characteristic != 2 - 2 * g:
        raise AssertionError(f"Euler characteristic {cel.euler_characteristic} disagrees with genus {g}")
    return g


def heffter_triangulation(spec: HeffterSpec) -> SimplicialComplex:
    """Cone each polygon from a new centre vertex ``c(s)``."""
    facets = []
    for s in spec.elements():
        poly = [str(v) for v in spec.polygon(s)]
        c = center(s)
        for a, b in zip(poly, poly[1:] + poly[:1]):
            facets.append((c, a, b))
    return SimplicialComplex(facets)


# -- structural checks -------------------------------------------------------

@dataclass(frozen=True)
class HeffterReport:
    f_vector: tuple[int, ...]
    regular: bool
    neighborly: bool
    closed: bool
    orientable: bool
    genus: int
    shared_vertices: frozenset  # sizes of pairwise polygon intersections


def heffter_report(spec: HeffterSpec, cel: Cellulation | None = None) -> HeffterReport:
    cel = cel or heffter_cellulation(spec)
    q = spec.q
    pairs = cel.edge_between()
    neighborly = len(pairs) == comb(q, 2) and all(len(v) == 1 for v in pairs.values())
    cof = cel.cofaces(2)
    closed = all(len(cof[e]) == 2 for e in cel.cells[1])
    vsets = [set(c) for _, c in sorted(cel.cycles.items())]
    shared = frozenset(len(a & b) for i, a in enumerate(vsets) for b in vsets[i + 1:])
    return HeffterReport(
        f_vector=cel.f_vector.counts,
        regular=cel.is_regular_polygons(),
        neighborly=neighborly,
        closed=closed,
        orientable=coherent_signs(cel, 2, cel.cells[2]) is not None,
        genus=heffter_genus(spec, cel),
        shared_vertices=shared,
    )


# -- symmetries ----------------------------------------------------------------

def _polygon_keys(cycles) -> set:
    """Dihedral-invariant keys: the set of undirected boundary edges of each polygon."""
    return {frozenset(frozenset(e) for e in zip(c, c[1:] + c[:1])) for c in cycles}


def _is_automorphism(vmap: dict, keys: set, cycles) -> bool:
    return _polygon_keys([tuple(vmap[v] for v in c) for c in cycles]) == keys


@dataclass(frozen=True)
class AutomorphismReport:
    order: int
    affine_maps: tuple  # (a, b) pairs, all verified
    generators: tuple  # (a, b) pairs generating the affine group
    brute_force_order: int | None


def affine_automorphisms(spec: HeffterSpec) -> list[tuple[FieldElement, FieldElement]]:
    """All affine maps x -> a x + b that permute the polygons; raises if one fails."""
    cel = heffter_cellulation(spec)
    cycles = list(cel.cycles.values())
    keys = _polygon_keys(cycles)
    els = spec.elements()
    out = []
    for a in spec.field.nonzero():
        for b in els:
            vmap = {str(x): str(a * x + b) for x in els}
            if not _is_automorphism(vmap, keys, cycles):
                raise AssertionError(f"x -> {a} x + {b} is not an automorphism")
            out.append((a, b))
    return out


def brute_force_automorphisms(cel: Cellulation) -> list[dict]:
    """All face-poset automorphisms of a closed neighbourly polygon surface.

    Every automorphism carries the first polygon onto some polygon with some
    rotation and direction; each such alignment fixes the map on all but one
    vertex, so trying them all is exhaustive.
    """
    cycles = [cel.cycles[i] for i in sorted(cel.cycles)]
    keys = _polygon_keys(cycles)
    verts = list(cel.vertices)
    first = cycles[0]
    rest_src = [v for v in verts if v not in first]
    found = []
    seen = set()
    for target in cycles:
        rest_dst = [v for v in verts if v not in target]
        if len(rest_src) != len(rest_dst) or len(rest_src) > 1:
            continue
        n = len(target)
        for direction in (1, -1):
            for r in range(n):
                img = [target[(r + direction * i) % n] for i in range(n)]
                vmap = dict(zip(first, img))
                vmap.update(zip(rest_src, rest_dst))
                key = tuple(vmap[v] for v in verts)
                if key in seen:
                    continue
                if _is_automorphism(vmap, keys, cycles):
                    seen.add(key)
                    found.append(vmap)
    return found


def heffter_automorphisms(spec: HeffterSpec, brute_force_limit: int = 9) -> AutomorphismReport:
    maps = affine_automorphisms(spec)
    f = spec.field
    prim = primitive_elements(f)[0]
    gens = ((prim, f.zero), (f.one, f.one)) + tuple((f.one, g) for g in _additive_basis(f)[1:])
    brute = None
    if spec.q <= brute_force_limit:
        brute = len(brute_force_automorphisms(heffter_cellulation(spec)))
    return AutomorphismReport(len(maps), tuple(maps), gens, brute)


def _additive_basis(f: Field) -> list[FieldElement]:
    return [f(tuple(1 if i == j else 0 for i in range(f.e))) for j in range(f.e)]


# -- distinctness ----------------------------------------------------------------

@dataclass(frozen=True)
class DistinctClasses:
    q: int
    classes: tuple[tuple[FieldElement, ...], ...]
    certified: bool
    inverse_pairs: tuple[tuple[FieldElement, ...], ...]  # the {a, 1/a} pairing alone


def frobenius_map(spec: HeffterSpec) -> dict:
    """Vertex map x -> x^p carrying C^a onto C^(a^p) (identity when q is prime)."""
    p = spec.field.p
    return {str(x): str(x ** p) for x in spec.elements()}


def _orbits(prims, moves) -> list[tuple]:
    out = []
    seen = set()
    for a in prims:
        if a in seen:
            continue
        orbit = {a}
        todo = [a]
        while todo:
            x = todo.pop()
            for mv in moves:
                y = mv(x)
                if y not in orbit:
                    orbit.add(y)
                    todo.append(y)
        seen |= orbit
        out.append(tuple(sorted(orbit, key=lambda x: x.coeffs)))
    return out


def heffter_distinct_classes(q: int, modulus=None, certify_limit: int = 9) -> DistinctClasses:
    """Isomorphism classes of C^a over the primitive elements a of GF(q).

    Affine relabellings identify a with 1/a (reflection) and, for q = p^e
    with e > 1, field automorphisms identify a with a^p.  For q <= certify_limit
    the partition is computed from canonical forms of the triangulations and
    checked against those orbits; above it the orbits are returned unverified.
    """
    if q % 4 != 1:
        raise BadResidue(f"q={q} is not 1 mod 4")
    f = field_of_order(q, modulus)
    prims = primitive_elements(f)
    pairs = _orbits(prims, [lambda x: x.inverse()])
    orbits = _orbits(prims, [lambda x: x.inverse(), lambda x: x ** f.p])
    if q > certify_limit:
        return DistinctClasses(q, tuple(orbits), False, tuple(pairs))
    by_form: dict = {}
    for a in prims:
        form = canonical_form(heffter_triangulation(HeffterSpec(q, a, f)))
        by_form.setdefault(form, []).append(a)
    classes = sorted(tuple(sorted(v, key=lambda x: x.coeffs)) for v in by_form.values())
    if sorted(classes) != sorted(orbits):
        raise AssertionError("canonical forms disagree with the semi-affine orbits")
    return DistinctClasses(q, tuple(classes), True, tuple(pairs))
