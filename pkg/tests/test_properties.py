from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from manyspheres.assembly import e_construction, prism_stack, refine_boundary, triangulate_sphere
from manyspheres.complexes.canonical import canonical_form
from manyspheres.complexes.cellulation import Cellulation, is_orientable_surface
from manyspheres.complexes.homology import homology
from manyspheres.complexes.simplicial import boundary_of_simplex
from manyspheres.finite_field import field_of_order, primitive_elements
from manyspheres.heffter import heffter_cellulation, heffter_triangulation, make_spec
from manyspheres.surface_ops import SurfaceBuilder
from manyspheres.verify import bistellar_reduce, lower_bound_estimate

from conftest import torus7

ORDERS = [4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49]


@st.composite
def field_elements(draw, k=3):
    f = field_of_order(draw(st.sampled_from(ORDERS)))
    els = f.elements()
    return f, [draw(st.sampled_from(els)) for _ in range(k)]


@given(field_elements())
def test_field_identities(fe):
    f, (a, b, c) = fe
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a
    if a:
        assert a ** (f.q - 1) == f.one
        assert a * a.inverse() == f.one
        assert (a ** -3) * (a ** 3) == f.one


@given(st.sampled_from([5, 9, 13, 17, 25]))
def test_primitives_closed_under_inverse(q):
    prims = primitive_elements(field_of_order(q))
    assert {a.inverse() for a in prims} == set(prims)


@given(st.sampled_from([5, 9, 13]), st.data())
def test_polygons_are_translates(q, data):
    f = field_of_order(q)
    spec = make_spec(q, data.draw(st.sampled_from(primitive_elements(f))))
    s = data.draw(st.sampled_from(f.elements()))
    assert spec.polygon(s) == tuple(s + x for x in spec.polygon(f.zero))


def relabelled(c, perm):
    return c.relabel(dict(zip(c.vertices, perm)))


@given(st.permutations(range(7)))
def test_canonical_form_ignores_labels_torus(perm):
    t = torus7()
    assert canonical_form(relabelled(t, perm)) == canonical_form(t)


@settings(max_examples=20, deadline=None)
@given(st.permutations(range(10)))
def test_canonical_form_ignores_labels_heffter(perm):
    t = heffter_triangulation(make_spec(5))
    assert canonical_form(relabelled(t, [f"v{p}" for p in perm])) == canonical_form(t)


@given(st.permutations(range(5)))
def test_canonical_form_idempotent(perm):
    c = relabelled(boundary_of_simplex(range(5)), perm)
    f = canonical_form(c)
    assert canonical_form(c.relabel({v: v for v in c.vertices})) == f


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=6))
def test_subdivision_keeps_surface_type(picks):
    b = SurfaceBuilder(torus7(), "s")
    for k in picks:
        edges = sorted(tuple(sorted(map(str, e))) for e in b.edge_tris)
        u, v = edges[k % len(edges)]
        u = int(u) if u.isdigit() else u
        v = int(v) if v.isdigit() else v
        b.split_edge(u, v)
    c = b.complex()
    assert c.euler_characteristic == 0
    assert is_orientable_surface(Cellulation.from_simplicial(c))
    assert homology(c).betti == (1, 2, 1)


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([5, 9]), st.integers(1, 3), st.booleans())
def test_e_construction_counting(q, m, refined):
    spec = make_spec(q)
    ps = prism_stack(heffter_cellulation(spec), m)
    c = refine_boundary(ps, heffter_triangulation(spec)) if refined else ps.cel
    out = e_construction(c)
    cof = c.cofaces(3)
    ridges = c.cells[2]
    inner = sum(1 for r in ridges if len(cof[r]) == 2)
    tags = [t for (d, _), t in out.tags.items() if d == 3]
    bip = sum(t.startswith("bipyramid") for t in tags)
    pyr = sum(t.startswith("pyramid") for t in tags)
    assert bip == inner
    assert bip + pyr == len(ridges)
    assert len(out.vertices) - len(c.vertices) == len(c.cells[3])


@settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.integers(0, 2), min_size=20, max_size=20), st.integers(0, 19), st.integers(1, 2))
def test_single_swap_locality(sphere5, choices, k, shift):
    other = list(choices)
    other[k] = (other[k] + shift) % 3
    a = triangulate_sphere(sphere5, choices)
    b = triangulate_sphere(sphere5, other)
    assert len(a.facet_sets ^ b.facet_sets) == 8
    assert a.vertices == b.vertices
    assert len(a.facets) == len(sphere5.tets) + 4 * 20


@settings(max_examples=8, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(0, 2 ** 32), st.integers(1, 60))
def test_bistellar_moves_keep_homology(zeros5, seed, budget):
    r = bistellar_reduce(zeros5, budget=budget, seed=seed)
    h = homology(r.final)
    assert h.betti == (1, 0, 0, 1) and h.is_torsion_free


@given(st.integers(1, 10 ** 5), st.integers(0, 10 ** 6), st.integers(1, 1000))
def test_estimate_monotone_in_octahedra(n, N, extra):
    assert lower_bound_estimate(n, N + extra, 2) > lower_bound_estimate(n, N, 2)
    assert lower_bound_estimate(n, N, 3) >= lower_bound_estimate(n, N, 2)


@given(st.permutations(range(6)), st.integers(0, 2))
def test_octahedron_choice_is_a_ball(perm, choice):
    from manyspheres.assembly import octahedron_triangulations
    from manyspheres.complexes.simplicial import SimplicialComplex
    tets = octahedron_triangulations(tuple(perm), choice)
    ball = SimplicialComplex(tets)
    assert homology(ball).betti == (1, 0, 0, 0)
    rim = ball.boundary()
    pairs = [frozenset(perm[i:i + 2]) for i in (0, 2, 4)]
    assert all(not any(p <= set(f) for p in pairs) for f in rim.facets)
    assert len(rim.facets) == 8
