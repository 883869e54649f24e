import math
import random

import pytest

from manyspheres.assembly import triangulate_sphere
from manyspheres.complexes.canonical import canonical_form
from manyspheres.complexes.homology import homology
from manyspheres.complexes.simplicial import SimplicialComplex, boundary_of_simplex, suspension
from manyspheres.errors import NotPure
from manyspheres.verify import (INCONCLUSIVE, REDUCED, bistellar_reduce, count_distinct_sample,
                                lower_bound_estimate, m_for, random_choices, scaling_report, scaling_table,
                                stack_counts, verify_sphere)

from conftest import torus7


def starred_simplex():
    # 1-to-4 move on one facet of the boundary of the 4-simplex
    d4 = boundary_of_simplex(range(5))
    facet = d4.facets[0]
    rest = [f for f in d4.facets if f != facet]
    new = [tuple(v for v in facet if v != x) + ("w",) for x in facet]
    return SimplicialComplex(rest + new)


def test_simplex_boundary_passes():
    r = verify_sphere(boundary_of_simplex(range(5)))
    assert r.passed and r.bistellar == REDUCED and r.flips == 0
    assert r.f_vector == (5, 10, 10, 5)


def test_starred_simplex_one_move():
    r = bistellar_reduce(starred_simplex(), keep_trace=True)
    assert r.outcome == REDUCED and r.moves == 1
    assert r.trace[0][0] == "4-1"


def test_suspended_torus_is_not_a_manifold():
    r = verify_sphere(suspension(torus7()), flip_budget=2000)
    assert r.closed_pseudomanifold and not r.manifold and not r.passed
    assert r.bistellar == INCONCLUSIVE


def test_not_closed():
    with pytest.raises(NotPure):
        bistellar_reduce(SimplicialComplex([(0, 1, 2, 3)]))
    r = verify_sphere(SimplicialComplex([(0, 1, 2, 3)]))
    assert not r.closed_pseudomanifold and not r.passed


def test_pipeline_output(zeros5):
    r = verify_sphere(zeros5)
    assert r.passed and r.manifold and r.homology.betti == (1, 0, 0, 1)
    assert r.bistellar == REDUCED and r.flips <= 10 ** 6
    text = r.to_text()
    assert "status: pass" in text and "seconds" not in text


def test_budget_exhaustion(zeros5):
    r = bistellar_reduce(zeros5, budget=5)
    assert r.outcome == INCONCLUSIVE and r.moves == 5


def test_reduce_is_seeded(zeros5):
    a = bistellar_reduce(zeros5, seed=4, keep_trace=True)
    b = bistellar_reduce(zeros5, seed=4, keep_trace=True)
    assert a.trace == b.trace


def test_count_sample(sphere5):
    est = count_distinct_sample(sphere5, 10, seed=1)
    assert est.distinct == 10 and est.collisions == ()
    assert count_distinct_sample(sphere5, 10, seed=1) == est


def test_identical_vectors_collide(sphere5):
    # k=2 with the same vector twice: force it through an rng whose draws repeat
    class Same(random.Random):
        def randrange(self, n):
            return 0

    a = triangulate_sphere(sphere5, random_choices(20, Same()))
    b = triangulate_sphere(sphere5, random_choices(20, Same()))
    assert canonical_form(a) == canonical_form(b)


def test_sample_needs_two(sphere5):
    with pytest.raises(ValueError):
        count_distinct_sample(sphere5, 1)


def test_lower_bound_examples():
    assert lower_bound_estimate(16, 64, 2) == 0
    assert lower_bound_estimate(7, 0) == pytest.approx(-7 * math.log2(7))
    assert lower_bound_estimate(10, 10, 3) == pytest.approx(10 * math.log2(3) - 10 * math.log2(10))
    with pytest.raises(ValueError):
        lower_bound_estimate(0, 3)


def test_stack_counts_match_assembly(sphere5):
    # the dry-run counts agree with a real build apart from curve refinement vertices
    n, N = stack_counts(5, 2)
    assert N == sphere5.registry_size
    named = {"H1:cyl0", "H1:ball", "H2:cyl0", "H2:ball"}
    extra = [v for v in sphere5.vertices if ":" in str(v) and v not in named]
    assert n == sphere5.n - len(extra)


def test_scaling_report():
    rows = scaling_report([5, 9, 13, 17])
    assert [r.N for r in rows] == [math.comb(q, 2) * q ** 3 for q in (5, 9, 13, 17)]
    ratios = [r.ratio for r in rows]
    assert max(ratios) / min(ratios) <= 4
    assert all(b.n / b.q ** 4 < a.n / a.q ** 4 * 2 for a, b in zip(rows, rows[1:]))
    # n log n still wins at q=13; N only overtakes it much later
    assert lower_bound_estimate(rows[2].n, rows[2].N, 2) < 0
    assert scaling_table(rows).splitlines()[0] == "q m n N N/n^(5/4)"
    assert m_for(5, "3") == 3 and m_for(5, lambda q: 2 * q) == 10
    with pytest.raises(ValueError):
        scaling_report([7])


def test_homology_survives_moves(zeros5):
    for budget in (1, 10, 40):
        r = bistellar_reduce(zeros5, budget=budget, seed=2)
        h = homology(r.final)
        assert h.betti == (1, 0, 0, 1) and h.is_torsion_free


def crossover(base):
    q = 5
    while lower_bound_estimate(*stack_counts(q, q ** 3), base) <= 0:
        q += 4
    return q


def test_estimate_turns_positive():
    assert crossover(2) == 117
    assert crossover(3) == 65
    vals = [lower_bound_estimate(*stack_counts(q, q ** 3), 2) for q in range(117, 300, 4)]
    assert all(b > a > 0 for a, b in zip(vals, vals[1:]))
