"""Acceptance criteria, one PASS/FAIL line each.

The lines are collected and printed in the pytest terminal summary, so they
show up in ``pytest -v`` output without ``-s``.
"""
import filecmp
import os
import sys
import tempfile
import time
from math import comb

import pytest

from manyspheres.assembly import (assemble_sphere, e_construction, octahedron_triangulations, prism_stack,
                                  triangulate_sphere)
from manyspheres.cli import RunConfig, run_pipeline
from manyspheres.complexes.cellulation import Cellulation, is_strongly_regular
from manyspheres.complexes.homology import homology
from manyspheres.complexes.simplicial import link
from manyspheres.finite_field import field_of_order, make_field, primitive_elements
from manyspheres.heffter import (HeffterSpec, heffter_automorphisms, heffter_cellulation, heffter_distinct_classes,
                                 heffter_report, heffter_triangulation, make_spec)
from manyspheres.verify import REDUCED, count_distinct_sample, scaling_report, verify_sphere

from test_assembly import brute_triangulations

LINES = []
Q5 = []  # criterion 5 at q=5, reported together with q=9


def report(n, ok, detail, seconds=None, limit=None):
    timing = "" if seconds is None else f" [{seconds:.2f}s" + (f" / limit {limit}s]" if limit else "]")
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}{timing}"
    LINES.append(line)
    print(line)
    return ok


def specs(q):
    f = field_of_order(q)
    return [HeffterSpec(q, a, f) for a in primitive_elements(f)]


def test_criterion_01_heffter_exactness():
    worst, bad = 0.0, []
    for q in (5, 9, 13):
        for spec in specs(q):
            t0 = time.perf_counter()
            r = heffter_report(spec)
            ok = (r.f_vector == (q, comb(q, 2), q) and r.regular and r.closed and r.neighborly
                  and r.orientable and r.genus == q * (q - 5) // 4 + 1 and r.shared_vertices == {q - 2}
                  and not is_strongly_regular(heffter_cellulation(spec)))
            worst = max(worst, time.perf_counter() - t0)
            if not ok:
                bad.append((q, str(spec.alpha)))
    ok = not bad and worst < 1
    report(1, ok, f"C_q for q in 5, 9, 13 and all primitive alpha; failures: {bad or 'none'}", worst, 1)
    assert ok


def test_criterion_02_refinement_exactness():
    worst, bad = 0.0, []
    for q in (5, 9, 13):
        for spec in specs(q):
            t0 = time.perf_counter()
            t = heffter_triangulation(spec)
            cycles = all(all(len(nb) == 2 for nb in link(t, [v]).graph().values()) and link(t, [v]).connected()
                         for v in t.vertices)
            ok = (t.f_vector.counts == (2 * q, comb(q, 2) + q * (q - 1), q * (q - 1)) and cycles
                  and is_strongly_regular(Cellulation.from_simplicial(t)))
            worst = max(worst, time.perf_counter() - t0)
            if not ok:
                bad.append((q, str(spec.alpha)))
    ok = not bad and worst < 1
    report(2, ok, f"T_q f-vector, strong regularity, cyclic links; failures: {bad or 'none'}", worst, 1)
    assert ok


def test_criterion_03_gf9_genus_ten():
    t0 = time.perf_counter()
    f = make_field(3, 2, "2,1,1")
    spec = HeffterSpec(9, f("2,2"), f)
    betti = homology(heffter_triangulation(spec)).betti
    dt = time.perf_counter() - t0
    ok = spec.genus == 10 and betti == (1, 20, 1) and dt < 5
    report(3, ok, f"GF(9) mod x^2+x+2, alpha=2x+2: genus {spec.genus}, Betti {betti}", dt, 5)
    assert ok


def test_criterion_04_e_construction():
    t0 = time.perf_counter()
    got = {}
    for q in (5, 9):
        out = e_construction(prism_stack(heffter_cellulation(make_spec(q)), 1).cel)
        tags = [(t, len(out.vertex_set(3, cid))) for (d, cid), t in out.tags.items() if d == 3]
        octa = sum(1 for t, n in tags if t.startswith("bipyramid") and n == 6)
        pyr = sum(1 for t, n in tags if t.startswith("pyramid") and n == q)
        got[q] = (len(out.vertices), octa, pyr)
    dt = time.perf_counter() - t0
    ok = got == {5: (15, 10, 10), 9: (27, 36, 18)} and dt < 1
    report(4, ok, f"(vertices, octahedra, pyramids) = {got}", dt, 1)
    assert ok


def test_criterion_05_distinct_classes_q5():
    t0 = time.perf_counter()
    d = heffter_distinct_classes(5)
    dt = time.perf_counter() - t0
    ok = d.certified and len(d.classes) == 1 and dt < 60
    Q5.append((ok, len(d.classes), dt))
    assert ok


@pytest.mark.xfail(strict=True, reason="x -> x^3 is an isomorphism C^a -> C^(a^3) at q=9, so the four "
                                       "primitive elements form one class, not two")
def test_criterion_05_distinct_classes_q9():
    t0 = time.perf_counter()
    d = heffter_distinct_classes(9, "2,1,1")
    dt = time.perf_counter() - t0
    ok = len(d.classes) == 2 and dt < 60
    sizes = [len(c) for c in d.classes]
    ok5, n5, dt5 = Q5[0] if Q5 else (False, None, 0.0)
    report(5, ok and ok5, f"q=5: {n5} class (expected 1); q=9: {len(d.classes)} class of size {sizes} "
                          "(expected 2), since x -> x^3 identifies a with a^3", max(dt, dt5), 60)
    assert ok


def test_criterion_06_automorphisms():
    t0 = time.perf_counter()
    r5 = heffter_automorphisms(make_spec(5))
    r9 = heffter_automorphisms(make_spec(9, "2,2", "2,1,1"))
    dt = time.perf_counter() - t0
    ok = r5.brute_force_order == 20 and r5.order == 20 and r9.order == 72 and dt < 60
    report(6, ok, f"q=5 brute force {r5.brute_force_order}, affine maps verified: q=5 {r5.order}, q=9 {r9.order}",
           dt, 60)
    assert ok


def test_criterion_07_octahedron_oracle():
    t0 = time.perf_counter()
    brute = set(brute_triangulations())
    ours = {frozenset(frozenset(t) for t in octahedron_triangulations(tuple(range(6)), k)) for k in range(3)}
    dt = time.perf_counter() - t0
    ok = len(brute) == 3 and brute == ours and dt < 1
    report(7, ok, f"brute force finds {len(brute)} triangulations, equal to ours: {brute == ours}", dt, 1)
    assert ok


@pytest.fixture(scope="module")
def sphere():
    return assemble_sphere(make_spec(5), 2)


def test_criterion_08_end_to_end(sphere):
    t0 = time.perf_counter()
    closed = sphere.is_closed_pseudomanifold()
    k = triangulate_sphere(sphere, [0] * sphere.registry_size)
    r = verify_sphere(k, flip_budget=10 ** 6, seed=0)
    dt = time.perf_counter() - t0
    ok = (closed and r.manifold and r.homology.betti == (1, 0, 0, 1) and r.homology.is_torsion_free
          and r.bistellar == REDUCED and dt < 600)
    report(8, ok, f"q=5 m=2: closed {closed}, manifold {r.manifold}, {r.homology}, "
                  f"{r.bistellar} after {r.flips} flips", dt, 600)
    assert ok


def test_criterion_09_distinct_sampling(sphere):
    t0 = time.perf_counter()
    est = count_distinct_sample(sphere, 10, seed=1)
    dt = time.perf_counter() - t0
    ok = est.distinct == 10 and not est.collisions and dt < 600
    report(9, ok, f"k=10 seed=1: {est.distinct} pairwise non-isomorphic, {len(est.collisions)} collisions", dt, 600)
    assert ok


def test_criterion_10_scaling():
    t0 = time.perf_counter()
    rows = scaling_report([5, 9, 13, 17], "cubed")
    exact = all(r.N == comb(r.q, 2) * r.q ** 3 for r in rows)
    ratios = [r.ratio for r in rows]
    spread = max(ratios) / min(ratios)
    dt = time.perf_counter() - t0
    ok = exact and spread <= 4 and dt < 1
    report(10, ok, f"N exact: {exact}; N/n^(5/4) = {', '.join(f'{x:.3f}' for x in ratios)} (spread {spread:.2f})",
           dt, 1)
    assert ok


def test_criterion_11_determinism():
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        dirs = [os.path.join(tmp, d) for d in ("a", "b")]
        for d in dirs:
            run_pipeline(RunConfig(q=5, m=2, choices="seed:11", verify=True, out_dir=d))
        names = sorted(os.listdir(dirs[0]))
        same_names = names == sorted(os.listdir(dirs[1]))
        match, mismatch, errors = filecmp.cmpfiles(dirs[0], dirs[1], names, shallow=False)
    dt = time.perf_counter() - t0
    ok = same_names and not mismatch and not errors and len(match) == len(names)
    report(11, ok, f"{len(match)} of {len(names)} artifacts byte-identical", dt, None)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main(["-q", __file__]))
