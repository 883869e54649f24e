"""Three-dimensional pieces of the sphere and how they are glued.

The middle of the sphere is a stack of prisms over the Heffter polygons.
Each prism gets an apex; prisms meeting along a vertical square merge into
an octahedron, and every other ridge gives a pyramid or a bipyramid that is
cut into tetrahedra.  Two handlebodies close the stack off from below and
above.  Each is built on a refinement of the Heffter triangulation in which
one family of curves has been doubled, and a collar replays the refinement
so the handlebody boundary matches the stack boundary.

Vertex labels carry provenance: ``v|l`` is base vertex v on layer l,
``e<p>|l`` the apex of the prism over polygon p between layers l and l+1,
and ``H1:`` / ``H2:`` prefix vertices that exist only inside a handlebody.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from math import comb

from .complexes.cellulation import Cellulation, _parse_cellulation
from .complexes.simplicial import SimplicialComplex, is_two_sphere, label_key, sorted_face
from .errors import (BadChoice, BoundaryMismatch, ChoiceLengthMismatch, MalformedComplex,
                     NonDiskCurve, NotARefinement, UnclassifiableRidge)
from .heffter import HeffterSpec, heffter_cellulation, heffter_triangulation
from .surface_ops import CurveSystem, curve_system_for, double_curves


def layer(v, l: int) -> str:
    return f"{v}|{l}"


def _key(face) -> tuple:
    return tuple(label_key(v) for v in face)


# -- building face posets ------------------------------------------------------------

class _Builder:
    """Accumulates a regular cellulation whose cells are determined by vertex sets."""

    def __init__(self):
        self.vertices: dict = {}
        self.edges: dict = {}
        self.polys: dict = {}
        self.cells = {1: {}, 2: {}, 3: {}}
        self.cycles: dict = {}
        self.tags: dict = {}

    def vertex(self, v, tag=None):
        self.vertices.setdefault(v, None)
        if tag:
            self.tags[(0, v)] = tag

    def edge(self, u, v) -> tuple[int, int]:
        """Edge id and the sign of traversing it from u to v."""
        k = frozenset((u, v))
        a, b = sorted_face((u, v))
        if k not in self.edges:
            self.vertex(a)
            self.vertex(b)
            eid = len(self.cells[1])
            self.cells[1][eid] = ((a, -1), (b, 1))
            self.edges[k] = eid
        return self.edges[k], 1 if u == a else -1

    def polygon(self, cycle, tag=None) -> int:
        k = frozenset(cycle)
        if k in self.polys:
            return self.polys[k]
        bd = []
        for i, u in enumerate(cycle):
            bd.append(self.edge(u, cycle[(i + 1) % len(cycle)]))
        pid = len(self.cells[2])
        self.cells[2][pid] = tuple(bd)
        self.cycles[pid] = tuple(cycle)
        self.polys[k] = pid
        if tag:
            self.tags[(2, pid)] = tag
        return pid

    def triangle(self, tri, tag=None) -> int:
        return self.polygon(sorted_face(tri), tag)

    def solid(self, faces, tag=None) -> int:
        """A 3-cell bounded by the given 2-cells, with coherent signs."""
        by_edge = defaultdict(list)
        for f in faces:
            for e, s in self.cells[2][f]:
                by_edge[e].append((f, s))
        if any(len(v) != 2 for v in by_edge.values()):
            raise MalformedComplex("faces of a solid do not close up")
        sign = {faces[0]: 1}
        todo = [faces[0]]
        while todo:
            f = todo.pop()
            for e, s in self.cells[2][f]:
                for g, t in by_edge[e]:
                    if g == f:
                        continue
                    want = -sign[f] * s * t
                    if g not in sign:
                        sign[g] = want
                        todo.append(g)
                    elif sign[g] != want:
                        raise MalformedComplex("faces of a solid are not coherently orientable")
        cid = len(self.cells[3])
        self.cells[3][cid] = tuple((f, sign[f]) for f in faces)
        if tag:
            self.tags[(3, cid)] = tag
        return cid

    def tetrahedron(self, tet, tag=None) -> int:
        t = sorted_face(tet)
        faces = [self.triangle(t[:i] + t[i + 1:]) for i in range(4)]
        return self.solid(faces, tag)

    def octahedron(self, octa, tag="octahedron") -> int:
        faces = [self.triangle((x, y, z)) for x in octa[0:2] for y in octa[2:4] for z in octa[4:6]]
        return self.solid(faces, tag)

    def build(self, dim: int) -> Cellulation:
        cells = {d: self.cells[d] for d in range(1, dim + 1)}
        return Cellulation(dim, tuple(self.vertices), cells, dict(self.cycles), dict(self.tags))


# -- prism stacks ---------------------------------------------------------------------

@dataclass
class PrismStack:
    base: Cellulation
    m: int
    cel: Cellulation
    prisms: dict  # 3-cell id -> (polygon id, layer)
    bottom: int = 0

    @property
    def top(self) -> int:
        return self.m


def _fill_regions(base: Cellulation, t: SimplicialComplex) -> dict:
    """Polygon id -> triangles of t filling it, or NotARefinement."""
    edges = {frozenset(v for v, _ in bd) for bd in base.cells[1].values()}
    tri_edges = {frozenset(e) for e in t.faces(1)}
    missing = edges - tri_edges
    if missing:
        raise NotARefinement(f"base edge {sorted_face(next(iter(missing)))} is not an edge of the refinement")
    by_edge = defaultdict(list)
    for f in t.facets:
        for i in range(3):
            by_edge[frozenset(f[:i] + f[i + 1:])].append(f)
    seen = set()
    comps = []
    for f in t.facets:
        if f in seen:
            continue
        comp = [f]
        seen.add(f)
        todo = [f]
        while todo:
            x = todo.pop()
            for i in range(3):
                e = frozenset(x[:i] + x[i + 1:])
                if e in edges:
                    continue
                for y in by_edge[e]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        todo.append(y)
        comps.append(comp)
    want = {}
    for pid, cyc in base.cycles.items():
        want[frozenset(frozenset((cyc[i - 1], cyc[i])) for i in range(len(cyc)))] = pid
    out = {}
    for comp in comps:
        count = defaultdict(int)
        for f in comp:
            for i in range(3):
                count[frozenset(f[:i] + f[i + 1:])] += 1
        rim = frozenset(e for e, k in count.items() if k == 1)
        pid = want.get(rim)
        if pid is None or pid in out:
            raise NotARefinement(f"a region of the refinement with {len(comp)} triangles fits no polygon")
        out[pid] = sorted(comp)
    if len(out) != len(want):
        raise NotARefinement("some polygon is not covered by the refinement")
    return out


def _stack(base: Cellulation, m: int, fills: dict | None = None) -> PrismStack:
    if m < 1:
        raise ValueError(f"need at least one layer, got m={m}")
    b = _Builder()
    for l in range(m + 1):
        for v in base.vertices:
            b.vertex(layer(v, l))
    pids = sorted(base.cycles)
    edges = sorted({sorted_face(v for v, _ in bd) for bd in base.cells[1].values()}, key=_key)

    horizontal = {}
    for l in range(m + 1):
        refined = fills is not None and l in fills
        for pid in pids:
            if refined:
                horizontal[(pid, l)] = [b.triangle([layer(v, l) for v in f], "boundary")
                                        for f in fills[l][pid]]
            else:
                tag = "boundary" if l in (0, m) else "horizontal"
                horizontal[(pid, l)] = [b.polygon([layer(v, l) for v in base.cycles[pid]], tag)]
    vertical = {}
    for l in range(m):
        for u, v in edges:
            cyc = (layer(u, l), layer(v, l), layer(v, l + 1), layer(u, l + 1))
            vertical[(frozenset((u, v)), l)] = b.polygon(cyc, "vertical")
    prisms = {}
    for l in range(m):
        for pid in pids:
            cyc = base.cycles[pid]
            faces = horizontal[(pid, l)] + horizontal[(pid, l + 1)]
            faces += [vertical[(frozenset((cyc[i - 1], cyc[i])), l)] for i in range(len(cyc))]
            prisms[b.solid(faces, "prism")] = (pid, l)
    return PrismStack(base, m, b.build(3), prisms)


def prism_stack(base: Cellulation, m: int) -> PrismStack:
    """base x [0, m] with one prism per polygon and unit interval."""
    return _stack(base, m)


def refine_boundary(ps: PrismStack, top: SimplicialComplex, bottom: SimplicialComplex | None = None) -> Cellulation:
    """Replace the outer polygons of the stack by their triangulations.

    ``top`` and ``bottom`` are triangulations of the base surface (labels of
    base vertices unchanged) in which every base edge is still an edge.
    """
    bottom = top if bottom is None else bottom
    fills = {ps.bottom: _fill_regions(ps.base, bottom), ps.top: _fill_regions(ps.base, top)}
    # cells are created in the same order as in ``ps``, so prism ids agree
    return _stack(ps.base, ps.m, fills).cel


# -- E-construction --------------------------------------------------------------------

def e_construction(c: Cellulation, apex: dict | None = None) -> Cellulation:
    """Cone an apex into every top cell and merge cones across interior ridges.

    The result has f_0 + f_d vertices, one bipyramid per interior ridge and
    one pyramid per boundary ridge.  ``apex`` maps top-cell ids to vertex
    labels (default ``e<id>``).  Apexes are tagged "apex"; bipyramids are
    tagged "bipyramid" and pyramids "pyramid", followed by "/<ridge tag>"
    when the ridge had one.
    """
    d = c.dim
    apex = apex or {}
    names = {cid: apex.get(cid, f"e{cid}") for cid in c.cells[d]}
    cof = c.cofaces(d)
    interior, boundary = [], []
    for r in sorted(c.cells[d - 1]):
        n = len(cof.get(r, ()))
        if n == 2:
            interior.append(r)
        elif n == 1:
            boundary.append(r)
        else:
            raise UnclassifiableRidge(f"ridge {r} lies in {n} top cells")

    vertices = list(c.vertices) + [names[cid] for cid in sorted(c.cells[d])]
    cells = {k: {} for k in range(1, d + 1)}
    cycles = {}
    tags = {(0, names[cid]): "apex" for cid in c.cells[d]}
    ids = {}  # (k, original id) or (k, top cell, face) -> new id

    for k in range(1, d - 1):
        for cid in sorted(c.cells[k]):
            ids[(k, cid)] = len(cells[k])
            cells[k][ids[(k, cid)]] = tuple((f if k == 1 else ids[(k - 1, f)], s) for f, s in c.cells[k][cid])
            if k == 2 and cid in c.cycles:
                cycles[ids[(k, cid)]] = c.cycles[cid]
            if (k, cid) in c.tags:
                tags[(k, ids[(k, cid)])] = c.tags[(k, cid)]
    for r in boundary:
        ids[(d - 1, r)] = len(cells[d - 1])
        cells[d - 1][ids[(d - 1, r)]] = tuple((f if d == 2 else ids[(d - 2, f)], s) for f, s in c.cells[d - 1][r])
        if d - 1 == 2 and r in c.cycles:
            cycles[ids[(d - 1, r)]] = c.cycles[r]
        if (d - 1, r) in c.tags:
            tags[(d - 1, ids[(d - 1, r)])] = c.tags[(d - 1, r)]

    def cone(top, k, f):
        """Id of the (k+1)-cell apex(top) * f, creating it on first use."""
        key = ("cone", top, k, f)
        if key in ids:
            return ids[key]
        a = names[top]
        if k == 0:
            bd = ((a, -1), (f, 1))
        else:
            # d(a * f) = f - a * df
            bd = ((ids[(k, f)], 1),) + tuple((cone(top, k - 1, g), -s) for g, s in c.cells[k][f])
        new = len(cells[k + 1])
        cells[k + 1][new] = bd
        if k == 1:
            (u, su), (v, _) = c.cells[1][f]
            tail, head = (u, v) if su < 0 else (v, u)
            cycles[new] = (tail, head, a)
        ids[key] = new
        return new

    for top in sorted(c.cells[d]):
        for k in range(d - 1):
            for _, f in sorted((x for x in c.closure(d, top) if x[0] == k), key=lambda x: label_key(x[1])):
                cone(top, k, f)

    for r in interior:
        (t1, t2) = sorted(cof[r])
        bd = []
        for g, s in c.cells[d - 1][r]:
            bd.append((cone(t1, d - 2, g), -s))
            bd.append((cone(t2, d - 2, g), s))
        new = len(cells[d])
        cells[d][new] = tuple(bd)
        rt = c.tags.get((d - 1, r))
        tags[(d, new)] = "bipyramid" + (f"/{rt}" if rt else "")
    for r in boundary:
        (t1,) = cof[r]
        bd = [(ids[(d - 1, r)], 1)] + [(cone(t1, d - 2, g), -s) for g, s in c.cells[d - 1][r]]
        new = len(cells[d])
        cells[d][new] = tuple(bd)
        rt = c.tags.get((d - 1, r))
        tags[(d, new)] = "pyramid" + (f"/{rt}" if rt else "")
    return Cellulation(d, tuple(vertices), cells, cycles, tags)


# -- octahedra and bipyramids -------------------------------------------------------------

def octahedron_triangulations(octa, choice: int) -> list[tuple]:
    """The four tetrahedra around one of the three diagonals.

    ``octa`` lists the six vertices as three antipodal pairs
    (p0, p0', p1, p1', p2, p2'); ``choice`` picks the diagonal p_choice p_choice'.
    """
    if choice not in (0, 1, 2):
        raise BadChoice(f"octahedron choice must be 0, 1 or 2, got {choice!r}")
    pairs = [tuple(octa[0:2]), tuple(octa[2:4]), tuple(octa[4:6])]
    d, d2 = pairs[choice]
    (x, x2), (y, y2) = [p for i, p in enumerate(pairs) if i != choice]
    ring = (x, y, x2, y2)
    return [sorted_face((d, d2, ring[i], ring[(i + 1) % 4])) for i in range(4)]


def antipodal_order(vertices, edges, apexes=()) -> tuple:
    """Order six octahedron vertices as antipodal pairs.

    Pairs are the non-adjacent vertex pairs.  The pair of ``apexes`` (if
    both given) comes first; the equator then starts at its smallest vertex
    and moves towards the smaller neighbour.
    """
    vs = sorted_face(vertices)
    adj = {v: set() for v in vs}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    opp = {}
    for v in vs:
        rest = [w for w in vs if w != v and w not in adj[v]]
        if len(rest) != 1:
            raise MalformedComplex(f"{vs} is not an octahedron")
        opp[v] = rest[0]
    first = sorted_face(apexes) if len(apexes) == 2 else None
    if first is None or opp[first[0]] != first[1]:
        first = min((sorted_face((v, opp[v])) for v in vs), key=_key)
    ring = [v for v in vs if v not in first]
    u1 = ring[0]
    u2 = min((w for w in ring if w in adj[u1]), key=label_key)
    return (first[0], first[1], u1, opp[u1], u2, opp[u2])


def _fan(cycle) -> list[tuple]:
    """Triangles of the fan from the smallest vertex of a polygon."""
    i = min(range(len(cycle)), key=lambda k: label_key(cycle[k]))
    c = list(cycle[i:]) + list(cycle[:i])
    return [(c[0], c[k], c[k + 1]) for k in range(1, len(c) - 1)]


def _equator(c: Cellulation, cid, apexes) -> list:
    """Cyclic order of the non-apex vertices of a (bi)pyramid."""
    adj = defaultdict(set)
    for f, _ in c.cells[3][cid]:
        cyc = c.cycles[f]
        for i, u in enumerate(cyc):
            v = cyc[(i + 1) % len(cyc)]
            if u not in apexes and v not in apexes:
                adj[u].add(v)
                adj[v].add(u)
    start = min(adj, key=label_key)
    ring = [start]
    prev = None
    while True:
        nxt = min((w for w in adj[ring[-1]] if w != prev), key=label_key) if prev is None else \
            next(w for w in adj[ring[-1]] if w != prev)
        if nxt == start:
            return ring
        prev = ring[-1]
        ring.append(nxt)


@dataclass
class SolidPieces:
    """Tetrahedra and octahedra in construction order, with provenance tags."""
    tets: list = field(default_factory=list)  # (sorted 4-tuple, tag)
    octahedra: list = field(default_factory=list)  # antipodal-ordered 6-tuples
    apexes: set = field(default_factory=set)

    def to_cellulation(self) -> Cellulation:
        b = _Builder()
        for v in sorted(self.apexes, key=label_key):
            b.vertex(v, "apex")
        for t, tag in self.tets:
            b.tetrahedron(t, tag)
        for o in self.octahedra:
            b.octahedron(o)
        return b.build(3)


def bipyramid_pieces(c: Cellulation) -> SolidPieces:
    """Cut every (bi)pyramid of an E-construction output into simplices.

    Bipyramids over squares are octahedra and are kept whole unless their
    ridge was a horizontal copy of a base polygon; all other bipyramids are
    fanned around their apex-apex diagonal.  Pyramids over triangles are
    already tetrahedra; pyramids over larger polygons are coned over a fan
    of their base.
    """
    apexes = {v for (d, v), t in c.tags.items() if d == 0 and t == "apex"}
    out = SolidPieces(apexes=set(apexes))
    for cid in sorted(c.cells[3]):
        tag = c.tags.get((3, cid), "")
        vs = c.vertex_set(3, cid)
        tips = sorted_face(vs & apexes)
        kind, _, ridge = tag.partition("/")
        if kind == "bipyramid" and len(tips) == 2:
            ring = _equator(c, cid, set(tips))
            if len(ring) == 4 and ridge != "horizontal":
                edges = [(t, u) for t in tips for u in ring] + [(ring[i - 1], ring[i]) for i in range(4)]
                out.octahedra.append(antipodal_order(vs, edges, tips))
                continue
            for i in range(len(ring)):
                out.tets.append((sorted_face((*tips, ring[i - 1], ring[i])), "bipyramid"))
        elif kind == "pyramid" and len(tips) == 1:
            ring = _equator(c, cid, set(tips))
            for tri in _fan(ring):
                out.tets.append((sorted_face((tips[0], *tri)), "pyramid"))
        elif len(vs) == 4:
            out.tets.append((sorted_face(vs), tag or "simplex"))
        else:
            raise MalformedComplex(f"3-cell {cid} ({tag or 'untagged'}) is neither a simplex nor a (bi)pyramid")
    return out


def triangulate_bipyramids(c: Cellulation) -> Cellulation:
    """Simplices plus registered octahedra (tagged "octahedron")."""
    return bipyramid_pieces(c).to_cellulation()


# -- handlebodies -----------------------------------------------------------------------

def _side_indices(cs: CurveSystem, side: str) -> list[int]:
    fam = {"H1": "a", "H2": "b"}.get(side)
    if fam is None:
        raise ValueError(f"side must be H1 or H2, got {side!r}")
    return [i for i in range(len(cs.cores)) if cs.labels[2 * i].startswith(fam)]


def handlebody_triangulation(t_prime: SimplicialComplex, cs: CurveSystem, side: str = "H1") -> SimplicialComplex:
    """Fill the doubled curves of one family and cone off what is left.

    Each copy bounds a fan disk (no new vertices).  The two disks of a curve
    and the strip between them bound a solid cylinder, coned to ``cyl<i>``;
    the rest of the surface together with all disks bounds a ball, coned to
    ``ball``.  Raises NonDiskCurve when a disk collides with the surface or a
    coned boundary is not a 2-sphere.
    """
    surface = {frozenset(f) for f in t_prime.facets}
    idx = _side_indices(cs, side)
    if not idx:
        raise NonDiskCurve(f"no {side} curves in the curve system")
    tets = []
    strips = set()
    disks = []
    for n, i in enumerate(idx):
        core = set(cs.cores[i])
        strip = [f for f in t_prime.facets if core & set(f)]
        strips.update(frozenset(f) for f in strip)
        pair = []
        for copy in cs.curves[2 * i:2 * i + 2]:
            fan = _fan(copy)
            if any(frozenset(t) in surface for t in fan):
                raise NonDiskCurve(f"a disk on {cs.labels[2 * i]} runs along the surface")
            pair += fan
        disks += pair
        cyl = SimplicialComplex(strip + pair)
        if not is_two_sphere(cyl):
            raise NonDiskCurve(f"cylinder of {cs.labels[2 * i]} is not bounded by a sphere")
        tets += [(f"cyl{n}", *f) for f in cyl.facets]
    rest = [f for f in t_prime.facets if frozenset(f) not in strips]
    ball = SimplicialComplex(rest + disks)
    if not is_two_sphere(ball):
        raise NonDiskCurve("the cut-open surface with its disks is not a sphere")
    tets += [("ball", *f) for f in ball.facets]
    return SimplicialComplex(tets)


def collar(surface: SimplicialComplex, moves) -> tuple[list[tuple], SimplicialComplex]:
    """Tetrahedra realising a sequence of stellar moves as a layer of cones.

    For a move (sigma, w) every triangle tau containing sigma contributes the
    tetrahedron w * tau; the union runs from ``surface`` to the refined
    surface, which is returned alongside.
    """
    tris = {frozenset(f) for f in surface.facets}
    by_edge = defaultdict(set)
    for t in tris:
        for e in _edges(t):
            by_edge[e].add(t)
    tets = []
    for sigma, w in moves:
        s = frozenset(sigma)
        star = sorted((t for t in (by_edge[s] if len(s) == 2 else {s}) if t in tris), key=lambda t: _key(sorted_face(t)))
        if not star:
            raise BoundaryMismatch(f"move on {sorted_face(s)} does not apply")
        for t in star:
            tets.append(sorted_face(t | {w}))
            tris.discard(t)
            for e in _edges(t):
                by_edge[e].discard(t)
            for new in _stellar(t, s, w):
                tris.add(new)
                for e in _edges(new):
                    by_edge[e].add(new)
    return tets, SimplicialComplex(tris)


def _edges(t: frozenset):
    a, b, c = t
    return frozenset((a, b)), frozenset((b, c)), frozenset((a, c))


def _stellar(t: frozenset, s: frozenset, w) -> list[frozenset]:
    if len(s) == 3:
        return [frozenset(e | {w}) for e in _edges(t)]
    (x,) = t - s
    return [frozenset((u, x, w)) for u in s]


# -- the sphere ---------------------------------------------------------------------------

@dataclass
class SphereCellulation:
    tets: tuple  # sorted 4-tuples
    octahedra: tuple  # registry order, antipodal-pair order
    tags: dict  # tet -> provenance

    @property
    def vertices(self) -> tuple:
        return sorted_face({v for t in self.tets for v in t} | {v for o in self.octahedra for v in o})

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def registry_size(self) -> int:
        return len(self.octahedra)

    def ridges(self) -> dict:
        """Triangle -> number of 3-cells containing it."""
        count = defaultdict(int)
        for t in self.tets:
            for i in range(4):
                count[frozenset(t[:i] + t[i + 1:])] += 1
        for o in self.octahedra:
            for x in o[0:2]:
                for y in o[2:4]:
                    for z in o[4:6]:
                        count[frozenset((x, y, z))] += 1
        return count

    def is_closed_pseudomanifold(self) -> bool:
        if any(k != 2 for k in self.ridges().values()):
            return False
        return triangulate_sphere(self, [0] * len(self.octahedra)).strongly_connected()

    def to_cellulation(self) -> Cellulation:
        b = _Builder()
        for t in self.tets:
            b.tetrahedron(t, self.tags.get(t))
        for o in self.octahedra:
            b.octahedron(o)
        return b.build(3)

    def to_text(self) -> str:
        cel = self.to_cellulation()
        first = len(self.tets)
        lines = [f"REGISTRY {len(self.octahedra)}"]
        for k, o in enumerate(self.octahedra):
            lines.append(f"{first + k}: " + " ".join(str(v) for v in o))
        return cel.to_text() + "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> SphereCellulation:
        lines = iter(text.splitlines())
        cel, lines = _parse_cellulation(lines)
        try:
            head = next(lines).split()
            if head[0] != "REGISTRY":
                raise MalformedComplex(f"expected REGISTRY, got {head}")
            registry = []
            for _ in range(int(head[1])):
                cid, rest = next(lines).split(":", 1)
                registry.append((int(cid), tuple(rest.split())))
        except (StopIteration, IndexError, ValueError) as exc:
            raise MalformedComplex(f"bad registry section: {exc}") from exc
        octs = {cid for cid, _ in registry}
        tets, tags = [], {}
        for cid in sorted(cel.cells[3]):
            if cid in octs:
                if set(cel.vertex_set(3, cid)) != set(dict(registry)[cid]):
                    raise MalformedComplex(f"registry entry {cid} does not match its cell")
                continue
            t = sorted_face(cel.vertex_set(3, cid))
            if len(t) != 4:
                raise MalformedComplex(f"unregistered 3-cell {cid} is not a tetrahedron")
            tets.append(t)
            if (3, cid) in cel.tags:
                tags[t] = cel.tags[(3, cid)]
        return cls(tuple(tets), tuple(o for _, o in registry), tags)


def triangulate_sphere(s: SphereCellulation, choices) -> SimplicialComplex:
    choices = list(choices)
    if len(choices) != len(s.octahedra):
        raise ChoiceLengthMismatch(f"{len(choices)} choices for {len(s.octahedra)} octahedra")
    facets = list(s.tets)
    for o, c in zip(s.octahedra, choices):
        facets += octahedron_triangulations(o, c)
    return SimplicialComplex(facets)


@dataclass
class AssemblyOptions:
    curves: CurveSystem | None = None  # geometric system on a refinement of T_q
    check: bool = True


def _relabel(tets, keep: set, l: int, prefix: str) -> list[tuple]:
    f = lambda v: layer(v, l) if v in keep else f"{prefix}:{v}"
    return [sorted_face(f(v) for v in t) for t in tets]


def _boundary(tets) -> set:
    count = defaultdict(int)
    for t in tets:
        for i in range(4):
            count[frozenset(t[:i] + t[i + 1:])] += 1
    return {f for f, k in count.items() if k == 1}


def handlebody_side(t: SimplicialComplex, cs: CurveSystem, side: str, l: int) -> list[tuple]:
    """Handlebody plus collar for one side, relabelled to sit on layer l."""
    fam = "a" if side == "H1" else "b"
    t_prime, doubled = double_curves(cs.surface, cs, [x for x in cs.labels if x[0] == fam], prefix=fam)
    h = handlebody_triangulation(t_prime, doubled, side)
    rim, top = collar(t, doubled.moves)
    if top != t_prime:
        raise BoundaryMismatch(f"{side} collar does not end on the doubled surface")
    tets = list(h.facets) + rim
    out = _relabel(tets, set(t.vertices), l, side)
    want = {frozenset(layer(v, l) for v in f) for f in t.facets}
    if _boundary(out) != want:
        raise BoundaryMismatch(f"{side} boundary is not layer {l} of the base triangulation")
    return out


def assemble_sphere(spec: HeffterSpec, m: int, opts: AssemblyOptions | None = None) -> SphereCellulation:
    """Glue the handlebodies to the two ends of the E-constructed prism stack."""
    opts = opts or AssemblyOptions()
    t = heffter_triangulation(spec)
    base = heffter_cellulation(spec)
    ps = prism_stack(base, m)
    cel = refine_boundary(ps, t)
    apex = {cid: f"e{pid}|{l}" for cid, (pid, l) in ps.prisms.items()}
    pieces = bipyramid_pieces(e_construction(cel, apex))
    cs = opts.curves if opts.curves is not None else curve_system_for(t)

    h1 = handlebody_side(t, cs, "H1", 0)
    h2 = handlebody_side(t, cs, "H2", m)
    mid_bd = _boundary([tt for tt, _ in pieces.tets])
    for o in pieces.octahedra:
        for x in o[0:2]:
            for y in o[2:4]:
                for z in o[4:6]:
                    tri = frozenset((x, y, z))
                    mid_bd ^= {tri}
    ends = _boundary(h1) | _boundary(h2)
    if mid_bd != ends:
        raise BoundaryMismatch(f"stack boundary has {len(mid_bd)} triangles, handlebodies {len(ends)}")

    tets = [*h1, *(tt for tt, _ in pieces.tets), *h2]
    tags = {tt: "handlebody" for tt in h1 + h2}
    tags.update({tt: tag for tt, tag in pieces.tets})
    s = SphereCellulation(tuple(tets), tuple(pieces.octahedra), tags)
    if len(s.octahedra) != comb(spec.q, 2) * m:
        raise AssertionError(f"registry holds {len(s.octahedra)} octahedra, expected {comb(spec.q, 2) * m}")
    if opts.check and not s.is_closed_pseudomanifold():
        raise BoundaryMismatch("assembled complex is not a closed pseudomanifold")
    return s
