"""Finite abstract simplicial complexes given by their facets."""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable

from ..errors import FaceNotPresent, MalformedComplex, NotPure

Label = Hashable


def label_key(v):
    # ints, then strings, then anything else by repr: mixed labels still sort
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    return (2, repr(v))


def face_key(face) -> tuple:
    return tuple(label_key(v) for v in face)


def sorted_face(face: Iterable) -> tuple:
    return tuple(sorted(face, key=label_key))


@dataclass(frozen=True, eq=False)
class FVector:
    counts: tuple[int, ...]

    def __getitem__(self, i):
        return self.counts[i]

    def __len__(self):
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __eq__(self, other):
        if isinstance(other, FVector):
            return self.counts == other.counts
        return self.counts == tuple(other)

    def __hash__(self):
        return hash(self.counts)

    def __repr__(self):
        return f"FVector{self.counts}"

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** i * f for i, f in enumerate(self.counts))


class SimplicialComplex:
    """Immutable complex stored as an antichain of facets.

    Facets contained in other facets are dropped on construction.
    Vertex labels may be any hashable, mutually comparable tokens; the
    pipeline uses strings.
    """

    def __init__(self, facets: Iterable[Iterable[Label]]):
        fs = {frozenset(f) for f in facets}
        fs.discard(frozenset())
        by_size = sorted(fs, key=len, reverse=True)
        keep: list[frozenset] = []
        if len({len(f) for f in fs}) > 1:
            for f in by_size:
                if not any(f < g for g in keep if len(g) > len(f)):
                    keep.append(f)
        else:
            keep = by_size
        self.facets: tuple[tuple, ...] = tuple(sorted((sorted_face(f) for f in keep), key=face_key))

    # -- basic structure ----------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.facets == other.facets

    def __hash__(self):
        return hash(self.facets)

    def __repr__(self):
        return f"SimplicialComplex(dim={self.dim}, f={self.f_vector.counts})"

    def __len__(self):
        return len(self.facets)

    @cached_property
    def facet_sets(self) -> frozenset:
        return frozenset(frozenset(f) for f in self.facets)

    @cached_property
    def vertices(self) -> tuple:
        return sorted_face({v for f in self.facets for v in f})

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    @property
    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1

    def faces(self, k: int) -> tuple[tuple, ...]:
        """All k-dimensional faces as sorted tuples, in sorted order."""
        return self._faces[k] if k < len(self._faces) else ()

    @cached_property
    def _faces(self) -> list[tuple[tuple, ...]]:
        out = []
        for k in range(self.dim + 1):
            fs = set()
            for f in self.facets:
                if len(f) > k:
                    fs.update(itertools.combinations(f, k + 1))
            out.append(tuple(sorted(fs, key=lambda t: tuple(label_key(v) for v in t))))
        return out

    @cached_property
    def face_set(self) -> frozenset:
        return frozenset(frozenset(f) for k in range(self.dim + 1) for f in self.faces(k))

    def has_face(self, face) -> bool:
        return frozenset(face) in self.face_set or not face

    @cached_property
    def f_vector(self) -> FVector:
        return FVector(tuple(len(self.faces(k)) for k in range(self.dim + 1)))

    @property
    def euler_characteristic(self) -> int:
        return self.f_vector.euler_characteristic

    @cached_property
    def vertex_facets(self) -> dict:
        out = defaultdict(list)
        for f in self.facets:
            for v in f:
                out[v].append(f)
        return dict(out)

    def ridge_incidence(self) -> dict[frozenset, list[tuple]]:
        """Map each codimension-one face of a facet to the facets containing it."""
        out = defaultdict(list)
        for f in self.facets:
            for r in itertools.combinations(f, len(f) - 1):
                out[frozenset(r)].append(f)
        return out

    # -- constructions --------------------------------------------------------
    def relabel(self, mapping) -> SimplicialComplex:
        get = mapping.__getitem__ if hasattr(mapping, "__getitem__") else mapping
        return SimplicialComplex([get(v) for v in f] for f in self.facets)

    def link(self, face) -> SimplicialComplex:
        return link(self, face)

    def star(self, face) -> SimplicialComplex:
        face = frozenset(face)
        return SimplicialComplex(f for f in self.facets if face <= set(f))

    def union(self, other: SimplicialComplex) -> SimplicialComplex:
        return SimplicialComplex(self.facets + other.facets)

    def boundary(self) -> SimplicialComplex:
        """Codimension-one faces lying in exactly one facet (pure complexes)."""
        return SimplicialComplex(r for r, fs in self.ridge_incidence().items() if len(fs) == 1)

    def strongly_connected(self) -> bool:
        if not self.facets:
            return True
        adj = defaultdict(list)
        for fs in self.ridge_incidence().values():
            for a, b in itertools.combinations(fs, 2):
                adj[a].append(b)
                adj[b].append(a)
        seen = {self.facets[0]}
        todo = deque(seen)
        while todo:
            f = todo.popleft()
            for g in adj[f]:
                if g not in seen:
                    seen.add(g)
                    todo.append(g)
        return len(seen) == len(self.facets)

    def connected(self) -> bool:
        verts = self.vertices
        if not verts:
            return True
        adj = defaultdict(set)
        for f in self.facets:
            for v in f:
                adj[v].update(f)
        seen = {verts[0]}
        todo = [verts[0]]
        while todo:
            v = todo.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(verts)

    def graph(self) -> dict:
        """1-skeleton adjacency (vertex -> set of neighbours)."""
        adj = {v: set() for v in self.vertices}
        for f in self.facets:
            for a, b in itertools.combinations(f, 2):
                adj[a].add(b)
                adj[b].add(a)
        return adj

    # -- text format ------------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"{self.dim} {len(self.vertices)} {len(self.facets)}"]
        lines += [" ".join(str(v) for v in f) for f in self.facets]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> SimplicialComplex:
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows:
            raise MalformedComplex("empty facet list")
        try:
            dim, nv, nf = (int(x) for x in rows[0])
        except ValueError as exc:
            raise MalformedComplex(f"bad header {rows[0]}") from exc
        facets = rows[1:]
        if len(facets) != nf:
            raise MalformedComplex(f"header announces {nf} facets, found {len(facets)}")
        out = cls(facets)
        if len(out.vertices) != nv or (facets and out.dim != dim):
            raise MalformedComplex("header does not match the facet list")
        return out


def boundary_of_simplex(vertices: Iterable) -> SimplicialComplex:
    vs = list(vertices)
    return SimplicialComplex(itertools.combinations(vs, len(vs) - 1))


def f_vector(c) -> FVector:
    """f-vector of a simplicial complex or a cellulation."""
    return c.f_vector


def link(c: SimplicialComplex, face) -> SimplicialComplex:
    face = frozenset(face)
    if not face:
        return SimplicialComplex(c.facets)
    pool = c.vertex_facets.get(next(iter(face)), ())
    around = [f for f in pool if face <= set(f)]
    if not around:
        raise FaceNotPresent(f"{sorted_face(face)} is not a face")
    return SimplicialComplex(set(f) - face for f in around)


def _require_pure(c: SimplicialComplex, d: int | None = None):
    if not c.is_pure or (d is not None and c.facets and c.dim != d):
        raise NotPure(f"expected a pure {d}-dimensional complex")


def is_closed_pseudomanifold(c: SimplicialComplex, d: int | None = None) -> bool:
    _require_pure(c, d)
    if not c.facets:
        return False
    if any(len(fs) != 2 for fs in c.ridge_incidence().values()):
        return False
    return c.strongly_connected()


def is_two_sphere(c: SimplicialComplex) -> bool:
    return (
        c.is_pure and c.dim == 2
        and is_closed_pseudomanifold(c, 2)
        and c.euler_characteristic == 2
    )


def is_manifold_3(c: SimplicialComplex) -> bool:
    _require_pure(c, 3)
    if not is_closed_pseudomanifold(c, 3):
        return False
    return all(is_two_sphere(c.link([v])) for v in c.vertices)


def is_surface(c: SimplicialComplex) -> bool:
    """Closed connected 2-manifold: every vertex link is a single cycle."""
    if not c.facets or not c.is_pure or c.dim != 2:
        return False
    if not is_closed_pseudomanifold(c, 2):
        return False
    for v in c.vertices:
        lk = c.link([v])
        if any(len(fs) != 2 for fs in lk.ridge_incidence().values()) or not lk.connected():
            return False
    return True


def orient_pure(c: SimplicialComplex) -> dict | None:
    """Coherent orientation of a pure pseudomanifold, or None.

    Returns a map facet -> +1/-1 relative to the sorted vertex order.
    """
    def induced(f, r):
        # sign with which facet f (sorted) induces ridge r (sorted)
        missing = next(i for i, v in enumerate(f) if v not in r)
        return -1 if missing % 2 else 1

    inc = c.ridge_incidence()
    sign = {}
    for start in c.facets:
        if start in sign:
            continue
        sign[start] = 1
        todo = [start]
        while todo:
            f = todo.pop()
            for r in itertools.combinations(f, len(f) - 1):
                rs = frozenset(r)
                for g in inc[rs]:
                    if g == f:
                        continue
                    want = -sign[f] * induced(f, rs) * induced(g, rs)
                    if g in sign:
                        if sign[g] != want:
                            return None
                    else:
                        sign[g] = want
                        todo.append(g)
    return sign


def suspension(c: SimplicialComplex, north="N", south="S") -> SimplicialComplex:
    return SimplicialComplex([(north, *f) for f in c.facets] + [(south, *f) for f in c.facets])


def disjoint_union(*cs: SimplicialComplex) -> SimplicialComplex:
    return SimplicialComplex(
        tuple((i, v) for v in f) for i, c in enumerate(cs) for f in c.facets
    )
