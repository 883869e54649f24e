import pytest

from manyspheres.complexes.cellulation import Cellulation, is_orientable_surface
from manyspheres.complexes.simplicial import SimplicialComplex, boundary_of_simplex
from manyspheres.errors import DegeneratePairing, NotASurface, NotOrientable
from manyspheres.heffter import heffter_triangulation
from manyspheres.surface_ops import (CurveSystem, double_curves, curve_system_for, geometric_defects,
                                     homology_basis, is_annulus_between, pairing_matrix, reroute_disjoint,
                                     standard_form, symplectic_basis, symplectic_reduction)


def grid_torus(n=3):
    facets = []
    for i in range(n):
        for j in range(n):
            a, b = (i, j), ((i + 1) % n, j)
            c, d = ((i + 1) % n, (j + 1) % n), (i, (j + 1) % n)
            facets += [(a, b, c), (a, c, d)]
    return SimplicialComplex(facets)


ROW = ((0, 0), (1, 0), (2, 0))
COLUMN = ((0, 0), (0, 1), (0, 2))


def system(s, a, b):
    # orient b so that a.b = +1
    if pairing_matrix(s, [a, b])[0][1] < 0:
        b = (b[0],) + tuple(reversed(b[1:]))
    return CurveSystem(s, a[0], (a, b), ("a1", "b1"), pairing_matrix(s, [a, b]))


def test_torus_basis(torus):
    cs = homology_basis(torus)
    assert len(cs.curves) == 2
    assert abs(cs.pairing[0][1]) == 1
    assert cs.pairing[0][1] == -cs.pairing[1][0]


def test_sphere_has_no_curves():
    assert homology_basis(boundary_of_simplex(range(4))).curves == ()


def test_t9_basis_size(spec9):
    cs = homology_basis(heffter_triangulation(spec9))
    assert len(cs.curves) == 20


def test_basis_rejects_bad_input():
    with pytest.raises(NotASurface):
        homology_basis(SimplicialComplex([(0, 1, 2), (0, 1, 3)]))
    rp2 = SimplicialComplex([(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
                             (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)])
    with pytest.raises(NotOrientable):
        homology_basis(rp2)


def test_symplectic_swap_only(torus):
    cs = symplectic_basis(homology_basis(torus))
    assert cs.pairing == standard_form(1)


def test_symplectic_rescale():
    g = grid_torus()
    cs = CurveSystem(g, (0, 0), (ROW, COLUMN + COLUMN), ("a1", "b1"), pairing_matrix(g, [ROW, COLUMN + COLUMN]))
    assert {abs(cs.pairing[0][1])} == {2}
    assert symplectic_basis(cs).pairing == standard_form(1)


def test_symplectic_reduction_blocks():
    rows, blocks = symplectic_reduction(((0, 2), (-2, 0)))
    assert blocks == [2]
    with pytest.raises(DegeneratePairing):
        symplectic_reduction(((0, 0), (0, 0)))
    with pytest.raises(DegeneratePairing):
        symplectic_reduction(((0, 1), (1, 0)))


def test_symplectic_reduction_verifies():
    m = ((0, 1, 1, 0), (-1, 0, 0, 2), (-1, 0, 0, 1), (0, -2, -1, 0))
    rows, blocks = symplectic_reduction(m)
    for i, x in enumerate(rows):
        for j, y in enumerate(rows):
            v = sum(x[a] * m[a][b] * y[b] for a in range(4) for b in range(4))
            want = 0
            if i // 2 == j // 2 and i != j:
                want = blocks[i // 2] * (1 if i < j else -1)
            assert v == want


def test_t9_symplectic(spec9):
    cs = symplectic_basis(homology_basis(heffter_triangulation(spec9)))
    assert cs.pairing == standard_form(10)
    # recomputed from scratch
    assert pairing_matrix(cs.surface, cs.curves) == standard_form(10)


def test_reroute_identity_when_meeting_once():
    g = grid_torus()
    cs = system(g, ROW, COLUMN)
    assert geometric_defects(cs) == []
    t, out = reroute_disjoint(cs)
    assert t is g and out is cs


def test_reroute_shared_edge():
    g = grid_torus()
    bent = ((0, 0), (1, 0), (1, 1), (1, 2), (0, 2))
    cs = system(g, ROW, bent)
    assert any("meet in" in d for d in geometric_defects(cs))
    t, out = reroute_disjoint(cs)
    assert geometric_defects(out) == []
    a, b = map(set, out.curves)
    assert a & b == {out.basepoint}
    assert out.pairing == standard_form(1)
    assert t.euler_characteristic == 0


@pytest.mark.parametrize("q", [5, 9])
def test_reroute_heffter(q):
    from manyspheres.heffter import make_spec
    s = heffter_triangulation(make_spec(q))
    cs = curve_system_for(s)
    g = (q * (q - 5)) // 4 + 1
    assert geometric_defects(cs) == []
    assert pairing_matrix(cs.surface, cs.curves) == standard_form(g)
    assert cs.surface.euler_characteristic == s.euler_characteristic
    assert is_orientable_surface(Cellulation.from_simplicial(cs.surface))
    for i, c in enumerate(cs.curves):
        for j, d in enumerate(cs.curves):
            common = set(c) & set(d)
            if i != j:
                assert len(common) == (1 if i // 2 == j // 2 else 0)


def annuli_ok(t, dbl):
    return all(is_annulus_between(t, core, list(dbl.curves[2 * k]), list(dbl.curves[2 * k + 1]))
               for k, core in enumerate(dbl.cores))


@pytest.mark.parametrize("family", ["a", "b"])
def test_double_torus(family):
    g = grid_torus()
    cs = system(g, ROW, COLUMN)
    t, dbl = double_curves(g, cs, [family + "1"])
    assert len(dbl.curves) == 2
    assert t.euler_characteristic == 0
    assert t.f_vector.counts[0] > g.f_vector.counts[0]
    assert annuli_ok(t, dbl)


def test_double_all_curves(torus):
    cs = curve_system_for(torus)
    t, dbl = double_curves(cs.surface, cs)
    assert len(dbl.curves) == 4
    assert t.euler_characteristic == 0
    # copies of one curve are disjoint and pair like the original
    p = dbl.pairing
    assert p[0][1] == 0 and p[2][3] == 0
    assert abs(p[0][2]) == 1


@pytest.mark.parametrize("q", [5, 9])
def test_double_heffter(q):
    from manyspheres.heffter import make_spec
    cs = curve_system_for(heffter_triangulation(make_spec(q)))
    for fam in "ab":
        t, dbl = double_curves(cs.surface, cs, [x for x in cs.labels if x[0] == fam])
        assert t.euler_characteristic == cs.surface.euler_characteristic
        assert annuli_ok(t, dbl)
        for i, c in enumerate(dbl.curves):
            for d in dbl.curves[i + 1:]:
                assert not set(c) & set(d)
