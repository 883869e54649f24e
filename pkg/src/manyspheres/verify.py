"""Certifying spheres, sampling distinct triangulations, counting estimates."""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from math import comb

from .assembly import SphereCellulation, triangulate_sphere
from .complexes.canonical import DEFAULT_NODE_BUDGET, canonical_form, isomorphism
from .complexes.homology import HomologyProfile, homology
from .complexes.simplicial import SimplicialComplex, is_closed_pseudomanifold, is_manifold_3, sorted_face
from .errors import NotPure

REDUCED = "ReducedToBoundaryOfSimplex"
INCONCLUSIVE = "Inconclusive"
SPHERE_BETTI = (1, 0, 0, 1)


# -- bistellar flips ------------------------------------------------------------------

@dataclass(frozen=True)
class BistellarResult:
    outcome: str
    moves: int
    trace: tuple  # (kind, removed facets, added facets) per applied move
    final: SimplicialComplex


class _Flipper:
    """A closed 3-pseudomanifold under bistellar moves, on integer vertices."""

    def __init__(self, c: SimplicialComplex):
        self.labels = list(c.vertices)
        index = {v: i for i, v in enumerate(self.labels)}
        self.fresh = len(self.labels)
        self.tets: list[frozenset] = []
        self.pos: dict = {}
        self.by_vertex: dict = {}
        self.by_edge: dict = {}
        self.by_tri: dict = {}
        for f in c.facets:
            self.add(frozenset(index[v] for v in f))

    def add(self, t: frozenset):
        self.pos[t] = len(self.tets)
        self.tets.append(t)
        for v in t:
            self.by_vertex.setdefault(v, set()).add(t)
        for e in _subsets(t, 2):
            self.by_edge.setdefault(e, set()).add(t)
        for f in _subsets(t, 3):
            self.by_tri.setdefault(f, set()).add(t)

    def remove(self, t: frozenset):
        i = self.pos.pop(t)
        last = self.tets.pop()
        if last != t:
            self.tets[i] = last
            self.pos[last] = i
        for table, faces in ((self.by_vertex, [frozenset([v]) for v in t]),
                             (self.by_edge, _subsets(t, 2)), (self.by_tri, _subsets(t, 3))):
            for f in faces:
                key = next(iter(f)) if table is self.by_vertex else f
                table[key].discard(t)
                if not table[key]:
                    del table[key]

    def replace(self, old, new):
        for t in old:
            self.remove(t)
        for t in new:
            self.add(t)

    # moves return (removed, added) or None when not applicable
    def collapse_vertex(self, v):
        star = self.by_vertex.get(v, ())
        if len(star) != 4:
            return None
        rest = frozenset().union(*star) - {v}
        if len(rest) != 4 or rest in self.pos:
            return None
        old = sorted(star, key=sorted)
        self.replace(old, [rest])
        return old, [rest]

    def edge_to_triangle(self, e):
        star = self.by_edge.get(e, ())
        if len(star) != 3:
            return None
        tri = frozenset().union(*star) - e
        if len(tri) != 3 or tri in self.by_tri:
            return None
        old = sorted(star, key=sorted)
        new = [tri | {x} for x in sorted(e)]
        self.replace(old, new)
        return old, new

    def triangle_to_edge(self, f):
        star = self.by_tri.get(f, ())
        if len(star) != 2:
            return None
        e = frozenset().union(*star) - f
        if len(e) != 2 or e in self.by_edge:
            return None
        old = sorted(star, key=sorted)
        new = [e | g for g in sorted(_subsets(f, 2), key=sorted)]
        self.replace(old, new)
        return old, new

    def complex(self) -> SimplicialComplex:
        return SimplicialComplex(tuple(self.labels[v] for v in t) for t in self.tets)

    def size(self) -> int:
        return len(self.by_vertex) + len(self.tets)


def _subsets(t, k) -> list[frozenset]:
    s = sorted(t)
    if k == 2:
        return [frozenset((s[i], s[j])) for i in range(len(s)) for j in range(i + 1, len(s))]
    return [frozenset(s[:i] + s[i + 1:]) for i in range(len(s))]


def bistellar_reduce(c: SimplicialComplex, budget: int = 1_000_000, seed: int = 0,
                     plateau: int = 100, uphill: float = 0.1, keep_trace: bool = False) -> BistellarResult:
    """Try to flip a closed 3-pseudomanifold down to the boundary of the 4-simplex.

    Moves that lower f_0 + f_3 (4->1 before 3->2) are preferred; when none
    applies, or with probability ``uphill`` once no progress was made for
    ``plateau`` moves, a random 2->3 move is made instead.
    """
    if not is_closed_pseudomanifold(c, 3):
        raise NotPure("bistellar reduction needs a closed 3-pseudomanifold")
    rng = random.Random(seed)
    fl = _Flipper(c)
    trace = []
    best = fl.size()
    stale = 0
    last_new_edge = None
    moves = 0
    while moves < budget:
        if len(fl.tets) == 5 and len(fl.by_vertex) == 5:
            return BistellarResult(REDUCED, moves, tuple(trace), fl.complex())
        done = None
        if not (stale >= plateau and rng.random() < uphill):
            verts = sorted(v for v, s in fl.by_vertex.items() if len(s) == 4)
            rng.shuffle(verts)
            for v in verts:
                done = fl.collapse_vertex(v)
                if done:
                    done = ("4-1",) + done
                    break
            if not done:
                edges = sorted((sorted(e) for e, s in fl.by_edge.items() if len(s) == 3 and e != last_new_edge))
                rng.shuffle(edges)
                for e in edges:
                    done = fl.edge_to_triangle(frozenset(e))
                    if done:
                        done = ("3-2",) + done
                        break
        last_new_edge = None
        if not done:
            for _ in range(100):
                t = fl.tets[rng.randrange(len(fl.tets))]
                f = _subsets(t, 3)[rng.randrange(4)]
                done = fl.triangle_to_edge(f)
                if done:
                    last_new_edge = frozenset().union(*done[1]) - f
                    done = ("2-3",) + done
                    break
            if not done:
                break
        moves += 1
        if keep_trace:
            trace.append(tuple((done[0], *(tuple(sorted_face(fl.labels[v] for v in t) for t in part)
                                            for part in done[1:]))))
        size = fl.size()
        if size < best:
            best, stale = size, 0
        else:
            stale += 1
    if len(fl.tets) == 5 and len(fl.by_vertex) == 5:
        return BistellarResult(REDUCED, moves, tuple(trace), fl.complex())
    return BistellarResult(INCONCLUSIVE, moves, tuple(trace), fl.complex())


# -- verification -----------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    f_vector: tuple
    closed_pseudomanifold: bool
    manifold: bool
    homology: HomologyProfile | None
    bistellar: str
    flips: int
    seconds: float

    @property
    def homology_sphere(self) -> bool:
        return self.homology is not None and self.homology.betti == SPHERE_BETTI and self.homology.is_torsion_free

    @property
    def passed(self) -> bool:
        return self.manifold and self.homology_sphere

    def to_text(self) -> str:
        lines = [
            f"f_vector: {' '.join(map(str, self.f_vector))}",
            f"closed_pseudomanifold: {str(self.closed_pseudomanifold).lower()}",
            f"manifold: {str(self.manifold).lower()}",
            f"homology: {self.homology if self.homology is not None else 'n/a'}",
            f"bistellar: {self.bistellar}",
            f"flips: {self.flips}",
            f"status: {'pass' if self.passed else 'fail'}",
        ]
        return "\n".join(lines) + "\n"


def verify_sphere(c: SimplicialComplex, flip_budget: int = 1_000_000, seed: int = 0) -> VerificationReport:
    t0 = time.perf_counter()
    pure3 = c.is_pure and c.dim == 3
    closed = pure3 and is_closed_pseudomanifold(c, 3)
    manifold = closed and is_manifold_3(c)
    h = homology(c) if pure3 else None
    outcome, flips = INCONCLUSIVE, 0
    if closed and flip_budget > 0:
        r = bistellar_reduce(c, flip_budget, seed)
        outcome, flips = r.outcome, r.moves
    if outcome == REDUCED and (h is None or h.betti != SPHERE_BETTI or not h.is_torsion_free):
        raise AssertionError("flipped to a simplex boundary but the homology is not that of a sphere")
    return VerificationReport(tuple(c.f_vector), closed, manifold, h, outcome, flips,
                              time.perf_counter() - t0)


# -- distinctness and counting ---------------------------------------------------------------

@dataclass(frozen=True)
class DistinctnessEstimate:
    k: int
    seed: int
    distinct: int
    collisions: tuple  # (i, j, vertex map from sample i to sample j)
    log2_lower_bound: float

    def __post_init__(self):
        assert self.distinct <= self.k


def random_choices(n: int, rng: random.Random) -> list[int]:
    return [rng.randrange(3) for _ in range(n)]


def count_distinct_sample(s: SphereCellulation, k: int, seed: int = 0, base: int = 3,
                          budget: int = DEFAULT_NODE_BUDGET) -> DistinctnessEstimate:
    """Triangulate k random choice vectors and compare canonical forms."""
    if k < 2:
        raise ValueError("need at least two samples")
    rng = random.Random(seed)
    samples = [triangulate_sphere(s, random_choices(len(s.octahedra), rng)) for _ in range(k)]
    forms = [canonical_form(x, budget) for x in samples]
    first: dict = {}
    collisions = []
    for i, f in enumerate(forms):
        if f in first:
            j = first[f]
            collisions.append((j, i, isomorphism(samples[j], samples[i], budget)))
        else:
            first[f] = i
    est = lower_bound_estimate(s.n, len(s.octahedra), base)
    return DistinctnessEstimate(k, seed, len(first), tuple(collisions), est)


def lower_bound_estimate(n: int, N: int, base: int = 2) -> float:
    """log2 of base^N / n!, bounded below through n! < n^n."""
    if n < 1 or N < 0:
        raise ValueError("need n >= 1 and N >= 0")
    return N * math.log2(base) - n * math.log2(n)


# -- scaling ---------------------------------------------------------------------------------

def m_for(q: int, rule) -> int:
    if callable(rule):
        return rule(q)
    if rule in ("cubed", "q3", None):
        return q ** 3
    return int(rule)


@dataclass(frozen=True)
class ScalingRow:
    q: int
    m: int
    n: int
    N: int

    @property
    def ratio(self) -> float:
        return self.N / self.n ** 1.25


def stack_counts(q: int, m: int) -> tuple[int, int]:
    """Vertices and octahedra of the assembled sphere, without curve refinement.

    Layers hold q(m+1) base vertices; the two refined ends add q centres;
    each of the qm prisms adds an apex; the two handlebodies add g + 1 cone
    apexes each.  Vertices created while rerouting and doubling curves are
    not counted.
    """
    g = q * (q - 5) // 4 + 1
    n = q * (m + 1) + 2 * q + q * m + 2 * g + 2
    return n, comb(q, 2) * m


def scaling_report(q_list, m_rule="cubed") -> list[ScalingRow]:
    rows = []
    for q in q_list:
        if q % 4 != 1:
            raise ValueError(f"q={q} is not 1 mod 4")
        m = m_for(q, m_rule)
        n, N = stack_counts(q, m)
        rows.append(ScalingRow(q, m, n, N))
    return rows


def scaling_table(rows) -> str:
    out = ["q m n N N/n^(5/4)"]
    out += [f"{r.q} {r.m} {r.n} {r.N} {r.ratio:.6f}" for r in rows]
    return "\n".join(out) + "\n"


__all__ = [
    "BistellarResult", "DistinctnessEstimate", "INCONCLUSIVE", "REDUCED", "ScalingRow",
    "VerificationReport", "bistellar_reduce", "count_distinct_sample",
    "lower_bound_estimate", "m_for", "random_choices", "scaling_report", "scaling_table",
    "stack_counts", "verify_sphere",
]
