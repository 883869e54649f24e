"""Canonical labelling of simplicial complexes.

Individualisation-refinement search: vertex colours are refined against the
vertex-facet incidence structure until stable, the first non-singleton
colour class is split by individualising each of its vertices in turn, and
every discrete leaf yields a relabelled facet list.  The canonical form is
the lexicographically least such list.  Automorphisms discovered at equal
leaves prune sibling branches lying in the same orbit.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import BudgetExceeded
from .simplicial import SimplicialComplex

DEFAULT_NODE_BUDGET = 200_000

Form = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class CanonicalLabelling:
    form: Form
    labelling: dict  # original vertex -> canonical index
    nodes: int
    automorphisms_found: int


class _Search:
    def __init__(self, c: SimplicialComplex, budget: int):
        self.verts = list(c.vertices)
        self.index = {v: i for i, v in enumerate(self.verts)}
        self.facets = [tuple(self.index[v] for v in f) for f in c.facets]
        self.n = len(self.verts)
        self.incident = [[] for _ in range(self.n)]
        for k, f in enumerate(self.facets):
            for v in f:
                self.incident[v].append(k)
        self.budget = budget
        self.nodes = 0
        self.best: Form | None = None
        self.best_colors: list[int] | None = None
        self.autos: list[list[int]] = []

    # colours are always 0..k-1 and assigned by rank of an invariant signature
    def refine(self, colors: list[int]) -> list[int]:
        ncol = len(set(colors))
        while True:
            fsig = [tuple(sorted(colors[v] for v in f)) for f in self.facets]
            sigs = [(colors[v], tuple(sorted(fsig[k] for k in self.incident[v])))
                    for v in range(self.n)]
            rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
            new = [rank[s] for s in sigs]
            if len(rank) == ncol:
                return new
            colors, ncol = new, len(rank)

    def leaf_form(self, colors: list[int]) -> Form:
        return tuple(sorted(tuple(sorted(colors[v] for v in f)) for f in self.facets))

    def run(self) -> None:
        self.visit(self.refine([0] * self.n), [])

    def visit(self, colors: list[int], fixed: list[int]) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"canonical form search exceeded {self.budget} nodes")
        cells: dict[int, list[int]] = {}
        for v, col in enumerate(colors):
            cells.setdefault(col, []).append(v)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            form = self.leaf_form(colors)
            if self.best is None or form < self.best:
                self.best, self.best_colors = form, colors
            elif form == self.best:
                # best^-1 o current is an automorphism
                inv = [0] * self.n
                for v, col in enumerate(self.best_colors):
                    inv[col] = v
                self.autos.append([inv[colors[v]] for v in range(self.n)])
            return
        tcol = colors[target[0]]
        explored: list[int] = []
        for v in target:
            if explored and self._same_orbit(v, explored, fixed):
                continue
            explored.append(v)
            split = [2 * c + (0 if (u == v or c != tcol) else 1) for u, c in enumerate(colors)]
            self.visit(self.refine(_compress(split)), fixed + [v])

    def _same_orbit(self, v: int, explored: list[int], fixed: list[int]) -> bool:
        gens = [g for g in self.autos if all(g[x] == x for x in fixed)]
        if not gens:
            return False
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in gens:
            for x in range(self.n):
                a, b = find(x), find(g[x])
                if a != b:
                    parent[a] = b
        rv = find(v)
        return any(find(w) == rv for w in explored)


def _compress(colors: list[int]) -> list[int]:
    rank = {c: i for i, c in enumerate(sorted(set(colors)))}
    return [rank[c] for c in colors]


def canonical_labelling(c: SimplicialComplex, budget: int = DEFAULT_NODE_BUDGET) -> CanonicalLabelling:
    s = _Search(c, budget)
    if s.n == 0:
        return CanonicalLabelling((), {}, 0, 0)
    s.run()
    lab = {s.verts[v]: s.best_colors[v] for v in range(s.n)}
    return CanonicalLabelling(s.best, lab, s.nodes, len(s.autos))


def canonical_form(c: SimplicialComplex, budget: int = DEFAULT_NODE_BUDGET) -> Form:
    """Facet list of a canonical relabelling onto 0..n-1.

    Two complexes are combinatorially isomorphic iff their canonical forms
    are equal.  Raises BudgetExceeded if the search tree grows beyond
    ``budget`` nodes.
    """
    return canonical_labelling(c, budget).form


def form_to_complex(form: Form) -> SimplicialComplex:
    return SimplicialComplex(form)


def isomorphism(a: SimplicialComplex, b: SimplicialComplex, budget: int = DEFAULT_NODE_BUDGET):
    """A vertex map a -> b carrying facets onto facets, or None."""
    la = canonical_labelling(a, budget)
    lb = canonical_labelling(b, budget)
    if la.form != lb.form:
        return None
    back = {i: v for v, i in lb.labelling.items()}
    return {v: back[i] for v, i in la.labelling.items()}
