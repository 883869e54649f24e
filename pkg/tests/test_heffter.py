import itertools
from math import comb

import pytest

from manyspheres.complexes.cellulation import Cellulation, is_strongly_regular
from manyspheres.complexes.homology import homology
from manyspheres.complexes.simplicial import link
from manyspheres.errors import BadResidue, NotPrimitive
from manyspheres.finite_field import field_of_order, primitive_elements
from manyspheres.heffter import (HeffterSpec, brute_force_automorphisms, frobenius_map, heffter_automorphisms,
                                 heffter_cellulation, heffter_distinct_classes, heffter_genus, heffter_report,
                                 heffter_triangulation, make_spec)


def all_specs(q):
    f = field_of_order(q)
    return [HeffterSpec(q, a, f) for a in primitive_elements(f)]


def test_q5_polygons(spec5):
    cel = heffter_cellulation(spec5)
    assert cel.f_vector.counts == (5, 10, 5)
    assert all(len(c) == 4 for c in cel.cycles.values())


@pytest.mark.parametrize("q", [5, 9, 13])
def test_series_start(q):
    for spec in all_specs(q):
        for s in spec.elements():
            assert spec.vertex(s, 0) == s
            assert spec.vertex(s, 1) == s + 1


def test_q9_polygons_share_seven_vertices(spec9):
    assert heffter_report(spec9).shared_vertices == {7}


@pytest.mark.parametrize("q,g", [(5, 1), (9, 10), (13, 27)])
def test_genus(q, g):
    spec = make_spec(q)
    assert heffter_genus(spec) == g
    assert heffter_cellulation(spec).euler_characteristic == 2 - 2 * g


@pytest.mark.parametrize("q", [5, 9, 13])
def test_structure_every_alpha(q):
    for spec in all_specs(q):
        r = heffter_report(spec)
        assert r.f_vector == (q, comb(q, 2), q)
        assert r.regular and r.neighborly and r.closed and r.orientable
        cel = heffter_cellulation(spec)
        for s, cyc in cel.cycles.items():
            assert len(set(cyc)) == q - 1
        # the vertex missing from each polygon identifies it
        missing = [set(map(str, spec.elements())) - set(c) for c in cel.cycles.values()]
        assert all(len(m) == 1 for m in missing)
        assert len(set.union(*missing)) == q


@pytest.mark.parametrize("q", [5, 9])
def test_triangulation(q):
    spec = make_spec(q)
    t = heffter_triangulation(spec)
    assert t.f_vector.counts == (2 * q, comb(q, 2) + q * (q - 1), q * (q - 1))
    assert t.euler_characteristic == 2 - 2 * spec.genus
    for v in t.vertices:
        lk = link(t, [v])
        # a single cycle
        assert all(len(n) == 2 for n in lk.graph().values()) and lk.connected()
    assert is_strongly_regular(Cellulation.from_simplicial(t))
    assert any(str(v).startswith("c(") for v in t.vertices)


def test_c_not_strongly_regular():
    for q in (5, 9, 13):
        assert not is_strongly_regular(heffter_cellulation(make_spec(q)))


def test_bad_specs():
    with pytest.raises(BadResidue):
        make_spec(7)
    f = field_of_order(9)
    with pytest.raises(NotPrimitive):
        HeffterSpec(9, f(1), f)
    with pytest.raises(NotPrimitive):
        HeffterSpec(9, f(2), f)  # -1 has order 2


def test_automorphisms_q5(spec5):
    r = heffter_automorphisms(spec5)
    assert r.order == 20 and r.brute_force_order == 20
    f = spec5.field
    assert (f.one, f.zero) in r.affine_maps


def test_automorphisms_q9(spec9):
    r = heffter_automorphisms(spec9)
    assert r.order == 72
    assert r.brute_force_order == 72


def test_brute_force_finds_identity(spec5):
    cel = heffter_cellulation(spec5)
    maps = brute_force_automorphisms(cel)
    assert any(all(k == v for k, v in m.items()) for m in maps)


def test_classes_q5():
    d = heffter_distinct_classes(5)
    assert d.certified
    assert [[str(a) for a in c] for c in d.classes] == [["2", "3"]]


def test_inverse_pairs_q9_q13():
    for q in (9, 13):
        d = heffter_distinct_classes(q)
        assert len(d.inverse_pairs) == 2
        assert all(len(p) == 2 and p[0] * p[1] == p[0].field.one for p in d.inverse_pairs)


def test_q9_frobenius_merges_pairs():
    # canonical forms see one class: x -> x^3 carries C^a onto C^(a^3)
    d = heffter_distinct_classes(9, "2,1,1")
    assert d.certified
    assert len(d.classes) == 1 and len(d.classes[0]) == 4


def test_frobenius_witness(spec9):
    a = spec9.alpha
    b = a ** 3
    assert b not in (a, a.inverse())
    phi = frobenius_map(spec9)
    src = heffter_cellulation(spec9)
    dst = heffter_cellulation(HeffterSpec(9, b, spec9.field))

    def keys(cycles):
        out = set()
        for c in cycles:
            n = len(c)
            rots = [tuple(c[(i + k) % n] for k in range(n)) for i in range(n)]
            rots += [tuple(reversed(r)) for r in rots]
            out.add(min(rots))
        return out

    image = keys([tuple(phi[v] for v in c) for c in src.cycles.values()])
    assert image == keys(dst.cycles.values())


def test_q13_classes_uncertified():
    d = heffter_distinct_classes(13)
    assert not d.certified and len(d.classes) == 2


def test_q9_surface_homology(spec9):
    assert homology(heffter_triangulation(spec9)).betti == (1, 20, 1)


def test_affine_maps_permute_polygons_directly(spec9):
    # independent of the module's helper: compare vertex sets of polygons
    polys = {frozenset(spec9.polygon(s)) for s in spec9.elements()}
    f = spec9.field
    for a, b in itertools.product(f.nonzero(), f.elements()):
        assert {frozenset(a * x + b for x in p) for p in polys} == polys
