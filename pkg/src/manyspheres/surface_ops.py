"""Curves on triangulated closed orientable surfaces.

A curve is a closed edge-walk stored as a vertex tuple whose last vertex is
adjacent to its first.  Algebraic intersection numbers are read off a
rotation system: the right-hand push-off of a walk ``a`` crosses exactly the
edges leaving ``a`` to its right, so ``a . b`` counts how often ``b`` runs
along such an edge, inward minus outward.
"""
from __future__ import annotations

import heapq
from collections import Counter, deque
from dataclasses import dataclass, field

from .complexes.homology import integer_matrix_smith
from .complexes.simplicial import SimplicialComplex, is_surface, label_key, orient_pure, sorted_face
from .errors import DegeneratePairing, NonDiskCurve, NotASurface, NotOrientable, ReroutingFailed

Walk = tuple
Move = tuple  # (subdivided simplex as a sorted tuple, new vertex)


@dataclass(frozen=True)
class CurveSystem:
    surface: SimplicialComplex
    basepoint: object
    curves: tuple[Walk, ...]
    labels: tuple[str, ...]
    pairing: tuple[tuple[int, ...], ...]
    # stellar moves leading from the original surface to ``surface``
    moves: tuple[Move, ...] = ()
    # for doubled systems: the curve each pair of copies runs alongside
    cores: tuple[Walk, ...] = field(default=())

    @property
    def genus(self) -> int:
        return (2 - self.surface.euler_characteristic) // 2

    def curve(self, label: str) -> Walk:
        return self.curves[self.labels.index(label)]

    def to_text(self) -> str:
        lines = [f"basepoint {self.basepoint}"]
        lines += [f"{lab}: " + " ".join(str(v) for v in c) for lab, c in zip(self.labels, self.curves)]
        return "\n".join(lines) + "\n"


# -- orientation and intersection numbers -------------------------------------------

def rotation(s: SimplicialComplex) -> dict:
    """v -> {x: y} where (v, x, y) is a positively oriented triangle."""
    signs = orient_pure(s)
    if signs is None:
        raise NotOrientable("surface admits no coherent orientation")
    rot: dict = {v: {} for v in s.vertices}
    for f, sg in signs.items():
        a, b, c = f if sg > 0 else (f[0], f[2], f[1])
        rot[a][b] = c
        rot[b][c] = a
        rot[c][a] = b
    return rot


def _sides(succ: dict, prev, nxt) -> tuple[list, list]:
    """Neighbours strictly left and strictly right of the path prev -> v -> nxt."""
    left, right = [], []
    x = succ[nxt]
    while x != prev:
        left.append(x)
        x = succ[x]
    x = succ[prev]
    while x != nxt:
        right.append(x)
        x = succ[x]
    return left, right


def intersection_number(rot: dict, a: Walk, b: Walk) -> int:
    right = Counter()
    n = len(a)
    for i, v in enumerate(a):
        u, w = a[i - 1], a[(i + 1) % n]
        succ = rot[v]
        x = succ[u]
        while x != w:
            right[(v, x)] += 1
            x = succ[x]
    total = 0
    for j, s in enumerate(b):
        t = b[(j + 1) % len(b)]
        total += right[(t, s)] - right[(s, t)]
    return total


def pairing_matrix(s: SimplicialComplex, curves, rot: dict | None = None) -> tuple[tuple[int, ...], ...]:
    rot = rot or rotation(s)
    return tuple(tuple(intersection_number(rot, a, b) for b in curves) for a in curves)


def standard_form(g: int) -> tuple[tuple[int, ...], ...]:
    """Pairing of a1, b1, ..., ag, bg with a_i . b_i = 1."""
    out = [[0] * (2 * g) for _ in range(2 * g)]
    for i in range(g):
        out[2 * i][2 * i + 1] = 1
        out[2 * i + 1][2 * i] = -1
    return tuple(tuple(r) for r in out)


def choose_basepoint(s: SimplicialComplex):
    """Vertex of maximal degree, ties broken by label order."""
    deg = {v: len(nb) for v, nb in s.graph().items()}
    return min(s.vertices, key=lambda v: (-deg[v], label_key(v)))


def ab_labels(g: int) -> tuple[str, ...]:
    return tuple(f"{c}{i}" for i in range(1, g + 1) for c in "ab")


# -- walks ----------------------------------------------------------------------------

def _tree(adj: dict, root) -> dict:
    parent = {root: None}
    todo = deque([root])
    while todo:
        v = todo.popleft()
        for w in sorted(adj[v], key=label_key):
            if w not in parent:
                parent[w] = v
                todo.append(w)
    return parent


def _path_to_root(parent: dict, v) -> list:
    out = [v]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return out


def reduce_walk(walk) -> Walk:
    """Cancel backtracks u, v, u (cyclically) in a closed walk."""
    st: list = []
    for x in list(walk) + [walk[0]]:
        if len(st) >= 2 and st[-2] == x:
            st.pop()
        elif not st or st[-1] != x:
            st.append(x)
    # st is a closed path st[0] == st[-1]; strip spikes through the seam
    while len(st) >= 3 and st[1] == st[-2]:
        st = st[1:-1]
    return tuple(st[:-1])


def combine_walks(s: SimplicialComplex, base, walks, coeffs) -> Walk:
    """A closed walk through ``base`` in the class sum(c * w)."""
    parent = _tree(s.graph(), base)
    out: list = [base]
    for w, c in zip(walks, coeffs):
        if not c:
            continue
        w = tuple(w)
        if c < 0:
            w = (w[0],) + tuple(reversed(w[1:]))
        there = list(reversed(_path_to_root(parent, w[0])))
        out += there[1:]
        for _ in range(abs(c)):
            out += list(w[1:]) + [w[0]]
        out += list(reversed(there))[1:]
    return reduce_walk(out[:-1]) if len(out) > 1 else (base,)


# -- homology basis -------------------------------------------------------------------

def _require_surface(s: SimplicialComplex):
    if not is_surface(s):
        raise NotASurface("input is not a closed connected surface")


def homology_basis(s: SimplicialComplex) -> CurveSystem:
    """2g fundamental cycles from a spanning tree and a dual spanning cotree."""
    _require_surface(s)
    rot = rotation(s)
    g = (2 - s.euler_characteristic) // 2
    base = choose_basepoint(s)
    adj = s.graph()
    parent = _tree(adj, base)
    tree = {frozenset((v, p)) for v, p in parent.items() if p is not None}
    # dual tree over the edges not used by the primal tree
    by_edge: dict = {}
    for f in s.facets:
        for e in ((f[0], f[1]), (f[0], f[2]), (f[1], f[2])):
            by_edge.setdefault(frozenset(e), []).append(f)
    seen = {s.facets[0]}
    todo = deque(seen)
    cotree = set()
    while todo:
        f = todo.popleft()
        for e in ((f[0], f[1]), (f[0], f[2]), (f[1], f[2])):
            e = frozenset(e)
            if e in tree:
                continue
            for h in by_edge[e]:
                if h not in seen:
                    seen.add(h)
                    cotree.add(e)
                    todo.append(h)
    leftover = sorted((sorted_face(e) for e in by_edge if e not in tree and e not in cotree),
                      key=lambda e: tuple(label_key(v) for v in e))
    if len(leftover) != 2 * g:
        raise NotASurface(f"tree-cotree left {len(leftover)} edges, expected {2 * g}")
    curves = []
    for u, v in leftover:
        pu, pv = _path_to_root(parent, u), _path_to_root(parent, v)
        on_v = set(pv)
        k = next(i for i, x in enumerate(pu) if x in on_v)
        j = pv.index(pu[k])
        curves.append(tuple(reversed(pu[:k + 1])) + tuple(pv[:j]))
    labels = tuple(f"c{i}" for i in range(1, 2 * g + 1))
    return CurveSystem(s, base, tuple(curves), labels, pairing_matrix(s, curves, rot))


# -- symplectic normalisation ---------------------------------------------------------------

def _form(m, x, y) -> int:
    return sum(xi * m[i][j] * yj for i, xi in enumerate(x) if xi for j, yj in enumerate(y) if yj)


def symplectic_reduction(m) -> tuple[list[tuple[int, ...]], list[int]]:
    """Rows P and block sizes d with P m P^T = diag(d_i [[0,1],[-1,0]]).

    Works for any nonsingular antisymmetric integer matrix; raises
    DegeneratePairing otherwise.
    """
    n = len(m)
    if any(m[i][j] != -m[j][i] for i in range(n) for j in range(n)):
        raise DegeneratePairing("pairing is not antisymmetric")
    if n % 2 or (n and len(integer_matrix_smith([list(r) for r in m])) < n):
        raise DegeneratePairing("intersection form is singular")
    rest = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    rows, blocks = [], []
    while rest:
        while True:
            best = None
            for i, x in enumerate(rest):
                for j in range(i + 1, len(rest)):
                    v = _form(m, x, rest[j])
                    if v and (best is None or abs(v) < abs(best[2])):
                        best = (i, j, v)
            if best is None:
                raise DegeneratePairing("intersection form is singular")
            i, j, d = best
            e, f = rest[i], rest[j]
            if d < 0:
                f, d = tuple(-c for c in f), -d
            changed = False
            new_rest = []
            for k, r in enumerate(rest):
                if k in (i, j):
                    continue
                y = _form(m, r, e) // d
                x = -(_form(m, r, f) // d)
                r = tuple(rc + x * ec + y * fc for rc, ec, fc in zip(r, e, f))
                if _form(m, r, e) or _form(m, r, f):
                    changed = True
                new_rest.append(r)
            if not changed:
                rows += [e, f]
                blocks.append(d)
                rest = new_rest
                break
            rest = [e, f] + new_rest
    return rows, blocks


def symplectic_basis(cs: CurveSystem) -> CurveSystem:
    """Curves a1, b1, ... representing a symplectic basis built from ``cs``."""
    s = cs.surface
    rows, blocks = symplectic_reduction(cs.pairing)
    g = len(blocks)
    signed_perm = all(sum(abs(c) for c in r) == 1 for r in rows)
    if all(d == 1 for d in blocks):
        walks = []
        for r in rows:
            if signed_perm:
                k = next(i for i, c in enumerate(r) if c)
                w = cs.curves[k]
                walks.append(w if r[k] > 0 else (w[0],) + tuple(reversed(w[1:])))
            else:
                walks.append(combine_walks(s, cs.basepoint, cs.curves, r))
    else:
        # rescale: express classes in a unimodular reference basis and divide
        ref = homology_basis(s)
        rot = rotation(s)
        gram = ref.pairing
        inv = _unimodular_inverse(gram)
        coords = []
        for w in cs.curves:
            dots = [intersection_number(rot, w, r) for r in ref.curves]
            coords.append([sum(dots[k] * inv[k][j] for k in range(len(dots))) for j in range(len(dots))])
        walks = []
        for idx, r in enumerate(rows):
            d = blocks[idx // 2] if idx % 2 else 1
            vec = [sum(c * coords[k][j] for k, c in enumerate(r)) for j in range(len(ref.curves))]
            if any(x % d for x in vec):
                raise DegeneratePairing(f"class {idx} is not divisible by its block size {d}")
            walks.append(combine_walks(s, cs.basepoint, ref.curves, [x // d for x in vec]))
    out = CurveSystem(s, cs.basepoint, tuple(walks), ab_labels(g), pairing_matrix(s, walks), cs.moves)
    if out.pairing != standard_form(g):
        raise DegeneratePairing("symplectic normalisation did not verify")
    return out


def _unimodular_inverse(m) -> list[list[int]]:
    """Exact inverse of an integer matrix with determinant +-1."""
    from fractions import Fraction

    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c])
        a[c], a[p] = a[p], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    out = [[x for x in row[n:]] for row in a]
    if any(x.denominator != 1 for row in out for x in row):
        raise DegeneratePairing("reference pairing is not unimodular")
    return [[int(x) for x in row] for row in out]


# -- mutable surface with stellar moves ----------------------------------------------------

class SurfaceBuilder:
    """Oriented triangulated surface that logs every stellar edge subdivision.

    Walks registered in ``walks`` are kept valid: when one of their edges is
    split, the new vertex is inserted.
    """

    def __init__(self, s: SimplicialComplex, prefix: str = "r"):
        rot = rotation(s)
        self.tri: dict[frozenset, tuple] = {}
        for v, succ in rot.items():
            for x, y in succ.items():
                key = frozenset((v, x, y))
                if key not in self.tri:
                    self.tri[key] = (v, x, y)
        self.edge_tris: dict[frozenset, set] = {}
        self.nbrs: dict = {v: set() for v in s.vertices}
        for t in self.tri:
            self._add_incidence(t)
        self.prefix = prefix
        self.counter = 0
        self.moves: list[Move] = []
        self.walks: list[list] = []

    def _add_incidence(self, t: frozenset):
        a, b, c = self.tri[t]
        for u, v in ((a, b), (b, c), (c, a)):
            self.edge_tris.setdefault(frozenset((u, v)), set()).add(t)
            self.nbrs.setdefault(u, set()).add(v)
            self.nbrs.setdefault(v, set()).add(u)

    def _remove(self, t: frozenset):
        a, b, c = self.tri.pop(t)
        for u, v in ((a, b), (b, c), (c, a)):
            e = frozenset((u, v))
            self.edge_tris[e].discard(t)
            if not self.edge_tris[e]:
                del self.edge_tris[e]
                self.nbrs[u].discard(v)
                self.nbrs[v].discard(u)

    def fresh(self) -> str:
        while True:
            name = f"{self.prefix}{self.counter}"
            self.counter += 1
            if name not in self.nbrs:
                return name

    def split_edge(self, u, v, name=None):
        e = frozenset((u, v))
        if e not in self.edge_tris:
            raise KeyError(f"no edge {u}-{v}")
        w = name if name is not None else self.fresh()
        for t in sorted(self.edge_tris[e], key=lambda t: tuple(map(label_key, sorted_face(t)))):
            o = self.tri[t]
            (x,) = t - e
            while o[2] != x:
                o = o[1:] + o[:1]
            self._remove(t)
            for new in ((o[0], w, x), (w, o[1], x)):
                k = frozenset(new)
                self.tri[k] = new
                self._add_incidence(k)
        self.moves.append((sorted_face((u, v)), w))
        for walk in self.walks:
            if u not in walk or v not in walk:
                continue
            n = len(walk)
            i = 0
            while i < n:
                a, b = walk[i], walk[(i + 1) % n]
                if frozenset((a, b)) == e:
                    walk.insert(i + 1, w)
                    n += 1
                    i += 1
                i += 1
        return w

    def succ(self, v) -> dict:
        out = {}
        for x in self.nbrs[v]:
            for t in self.edge_tris[frozenset((v, x))]:
                o = self.tri[t]
                while o[0] != v:
                    o = o[1:] + o[:1]
                out[o[1]] = o[2]
        return out

    def sides(self, walk, i) -> tuple[list, list]:
        n = len(walk)
        return _sides(self.succ(walk[i]), walk[i - 1], walk[(i + 1) % n])

    def complex(self) -> SimplicialComplex:
        return SimplicialComplex(self.tri.keys())

    def split_face(self, t, name=None):
        t = frozenset(t)
        o = self.tri[t]
        w = name if name is not None else self.fresh()
        self._remove(t)
        for new in ((o[0], o[1], w), (o[1], o[2], w), (o[2], o[0], w)):
            k = frozenset(new)
            self.tri[k] = new
            self._add_incidence(k)
        self.moves.append((sorted_face(t), w))
        return w

    def refine_all(self):
        """Barycentric subdivision as a sequence of stellar moves."""
        key = lambda f: tuple(label_key(v) for v in f)
        edges = sorted((sorted_face(e) for e in self.edge_tris), key=key)
        for t in sorted((sorted_face(t) for t in self.tri), key=key):
            self.split_face(t)
        for e in edges:
            self.split_edge(*e)

    def chords(self, walk) -> list[tuple]:
        on = {v: i for i, v in enumerate(walk)}
        n = len(walk)
        out = []
        for i, v in enumerate(walk):
            for x in self.nbrs[v]:
                j = on.get(x)
                if j is not None and i < j and (j - i) % n not in (1, n - 1):
                    out.append((v, x))
        return sorted(out, key=lambda e: tuple(label_key(v) for v in e))


# -- rerouting to a geometric symplectic system ------------------------------------------------

class _Detector:
    """Z/2 pairings with a reference homology basis, as per-edge bit vectors.

    The pairing of a closed walk with a reference curve is a sum over the
    walk's edges, so every edge carries a bit mask and the class of a cycle
    is the xor of the masks along it.
    """

    def __init__(self, s: SimplicialComplex):
        rot = rotation(s)
        self.mask: dict = {}
        for k, ref in enumerate(homology_basis(s).curves):
            n = len(ref)
            for i, v in enumerate(ref):
                u, w = ref[i - 1], ref[(i + 1) % n]
                x = rot[v][u]
                while x != w:
                    e = frozenset((v, x))
                    self.mask[e] = self.mask.get(e, 0) ^ (1 << k)
                    x = rot[v][x]

    def vector(self, walk) -> int:
        out = 0
        for j, v in enumerate(walk):
            out ^= self.mask.get(frozenset((v, walk[j - 1])), 0)
        return out

    def nontrivial(self, walk) -> bool:
        return bool(self.vector(walk))

    def split_edge(self, b: "SurfaceBuilder", u, v):
        """Split u-v in ``b`` and extend the masks to the new edges.

        The masks form a cocycle (zero around every triangle), which fixes
        the value on each new edge w-x as mask(u-w) + mask(x-u).
        """
        e = frozenset((u, v))
        opposite = [x for t in b.edge_tris[e] for x in t - e]
        m = self.mask.pop(e, 0)
        w = b.split_edge(u, v)
        if m:
            self.mask[frozenset((u, w))] = m
        for x in opposite:
            mx = m ^ self.mask.get(frozenset((x, u)), 0)
            if mx:
                self.mask[frozenset((w, x))] = mx
        return w

    def rank(self, nbrs, region: set) -> int:
        """Dimension of the image of H1(region graph) in H1(surface; Z/2)."""
        pot = {}
        basis: dict = {}
        for root in sorted(region, key=label_key):
            if root in pot:
                continue
            pot[root] = 0
            todo = [root]
            while todo:
                v = todo.pop()
                for w in nbrs[v] & region:
                    m = pot[v] ^ self.mask.get(frozenset((v, w)), 0)
                    if w not in pot:
                        pot[w] = m
                        todo.append(w)
                    elif m != pot[w]:
                        _gf2_add(basis, m ^ pot[w])
        return len(basis)


def _depths(nbrs, region: set) -> dict:
    """Graph distance from each region vertex to the nearest vertex outside it."""
    depth = {v: 1 for v in region if nbrs[v] - region}
    todo = deque(sorted(depth, key=label_key))
    while todo:
        v = todo.popleft()
        for w in sorted(nbrs[v] & region, key=label_key):
            if w not in depth:
                depth[w] = depth[v] + 1
                todo.append(w)
    return depth


def _candidate_cycles(nbrs, allowed: set, root, mask=None, wall: int = 0) -> list[list]:
    """Fundamental cycles of a shortest-path tree, cheapest first.

    Entering a vertex costs 1, plus ``wall`` if it touches a vertex outside
    ``allowed``.  With ``mask`` (edge -> Z/2 class bits) only homologically
    nontrivial cycles are returned.
    """
    def cost(w):
        return 1 + (wall if wall and nbrs[w] - allowed else 0)

    parent = {root: None}
    dist = {root: 0}
    pot = {root: 0}
    heap = [(0, 0, root)]
    tick = 0
    done = set()
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for w in sorted(nbrs[v] & allowed, key=label_key):
            nd = d + cost(w)
            if w not in done and nd < dist.get(w, nd + 1):
                dist[w] = nd
                parent[w] = v
                tick += 1
                heapq.heappush(heap, (nd, tick, w))
    for v in sorted(dist, key=lambda v: dist[v]):
        if parent[v] is not None:
            pot[v] = pot[parent[v]] ^ (mask.get(frozenset((v, parent[v])), 0) if mask else 0)
    found = []
    for u in sorted(dist, key=label_key):
        for v in sorted(nbrs[u] & allowed, key=label_key):
            if parent[u] == v or parent[v] == u or label_key(u) > label_key(v):
                continue
            if mask is not None and pot[u] == pot[v] ^ mask.get(frozenset((u, v)), 0):
                continue
            pu, pv = _path_to_root(parent, u), _path_to_root(parent, v)
            on_v = set(pv)
            k = next(i for i, x in enumerate(pu) if x in on_v)
            j = pv.index(pu[k])
            found.append((dist[u] + dist[v] - 2 * dist[pu[k]], list(reversed(pu[:k + 1])) + pv[:j]))
    found.sort(key=lambda t: t[0])
    return [c for _, c in found]


def _shortcut(b: SurfaceBuilder, cyc: list, nontrivial, keep=None):
    """Remove chords, keeping a homologically nontrivial piece (containing ``keep``)."""
    while True:
        chords = b.chords(cyc)
        if not chords:
            return cyc
        u, v = chords[0]
        i, j = sorted((cyc.index(u), cyc.index(v)))
        pieces = [cyc[i:j + 1], cyc[j:] + cyc[:i + 1]]
        pieces = [p for p in pieces if nontrivial(p) and (keep is None or keep in p)]
        if not pieces:
            return None
        cyc = min(pieces, key=len)


def _dual_path(b: SurfaceBuilder, allowed: set, a: list, i: int, wall: int = 8):
    p = a[i]
    left, right = b.sides(a, i)
    sources = [x for x in left if x in allowed]
    targets = {y for y in right if y in allowed}
    if not sources or not targets:
        return None
    blocked = set(a) | b.nbrs[p]
    # stepping next to a blocked vertex is expensive, so paths keep to the
    # middle of corridors instead of walling them off
    def cost(w):
        return 1 + wall * any(x not in allowed for x in b.nbrs[w])

    dist = {x: 0 for x in sources}
    parent = {x: None for x in sources}
    heap = [(0, k, x) for k, x in enumerate(sources)]
    tick = len(heap)
    while heap:
        d, _, z = heapq.heappop(heap)
        if d > dist[z]:
            continue
        if z in targets:
            path = []
            while z is not None:
                path.append(z)
                z = parent[z]
            return list(reversed(path))
        for w in sorted(b.nbrs[z], key=label_key):
            if w in targets:
                nd = d + 1
            elif w in allowed and w not in blocked:
                nd = d + cost(w)
            else:
                continue
            if nd < dist.get(w, nd + 1):
                dist[w] = nd
                parent[w] = z
                tick += 1
                heapq.heappush(heap, (nd, tick, w))
    return None


def _components(nbrs, allowed: set) -> list[set]:
    """Components of the allowed subgraph, largest first."""
    seen = set()
    comps = []
    for v in sorted(allowed, key=label_key):
        if v in seen:
            continue
        comp = {v}
        seen.add(v)
        todo = [v]
        while todo:
            x = todo.pop()
            for w in nbrs[x] & allowed:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    todo.append(w)
        comps.append((-len(comp), label_key(v), v, comp))
    return [c for *_, c in sorted(comps, key=lambda t: t[:2])]


def _gf2_add(basis: dict, vec: int) -> bool:
    """Insert a bit vector into an echelon basis {pivot: row}; False if dependent."""
    while vec:
        top = vec.bit_length() - 1
        if top not in basis:
            basis[top] = vec
            return True
        vec ^= basis[top]
    return False


def _flanks(b: SurfaceBuilder, a: list) -> tuple[set, set]:
    left, right = set(), set()
    for i in range(len(a)):
        lt, rt = b.sides(a, i)
        left.update(lt)
        right.update(rt)
    return left, right


def _extend_pairs(b: SurfaceBuilder, g: int, acurves: list, bcurves: list, tries: int = 200, wall: int = 8) -> bool:
    """Add pairs (a_k, b_k) one at a time inside what the earlier pairs leave.

    The working region is the component of the unused vertices that still
    carries the homology of the remaining genus; every candidate curve must
    leave a component of the expected Z/2 rank (pockets cut off elsewhere are
    dropped).  a_k is rotated so that it starts where b_k crosses it.
    """
    det = _Detector(b.complex())

    def keep(region, need, flank=None):
        for comp in _components(b.nbrs, region):
            if flank and not (comp & flank[0] and comp & flank[1]):
                continue
            if det.rank(b.nbrs, comp) == need:
                return comp
        return None

    used = {v for c in acurves + bcurves for v in c}
    region = keep(set(b.nbrs) - used, 2 * (g - len(bcurves)))
    while region is not None and len(bcurves) < g:
        k = len(bcurves)
        depth = _depths(b.nbrs, region)
        root = max(sorted(region, key=label_key), key=lambda v: depth.get(v, 0))
        found = None
        for cyc in _candidate_cycles(b.nbrs, region, root, det.mask, wall)[:tries]:
            if not det.nontrivial(cyc):
                continue
            a = _shortcut(b, cyc, det.nontrivial)
            if a is None or len(a) < 3:
                continue
            inner = keep(region - set(a), 2 * (g - k) - 1, _flanks(b, a))
            if inner is None:
                continue
            for i in range(len(a)):
                path = _dual_path(b, inner, a, i, wall)
                if path is None:
                    continue
                rest = keep(inner - set(path), 2 * (g - k - 1))
                if rest is not None:
                    a = a[i:] + a[:i]
                    found = (a, [a[0]] + path[::-1], rest)  # enter from the right: a.b = +1
                    break
            if found:
                break
        if found is None:
            return False
        a, bb, region = found
        b.walks += [a, bb]
        acurves.append(a)
        bcurves.append(bb)
        # a collar of fresh vertices keeps later curves from crowding these
        on = set(a) | set(bb)
        own = {frozenset((c[i - 1], c[i])) for c in (a, bb) for i in range(len(c))}
        key = lambda f: tuple(label_key(v) for v in f)
        spokes = {sorted_face((v, x)) for v in on for x in b.nbrs[v] if frozenset((v, x)) not in own}
        for u, v in sorted(spokes, key=key):
            det.split_edge(b, u, v)
        used |= set(a) | set(bb)
        region = keep(set(b.nbrs) - used, 2 * (g - k - 1))
    return region is not None


def geometric_defects(cs: CurveSystem) -> list[str]:
    """Why ``cs`` is not a geometric symplectic system, or [] if it is.

    Required: simple chordless curves, a_i and b_i meeting in exactly one
    vertex, every other pair vertex-disjoint, and the standard pairing.
    """
    s = cs.surface
    g = len(cs.curves) // 2
    adj = s.graph()
    out = []
    sets = [set(c) for c in cs.curves]
    for lab, c, vs in zip(cs.labels, cs.curves, sets):
        if len(vs) != len(c) or len(c) < 3:
            out.append(f"{lab} is not a simple cycle")
            continue
        n = len(c)
        for i in range(n):
            if c[(i + 1) % n] not in adj[c[i]]:
                out.append(f"{lab} is not an edge-walk")
        pos = {v: i for i, v in enumerate(c)}
        for v in c:
            for x in adj[v] & vs:
                if (pos[v] - pos[x]) % n not in (1, n - 1):
                    out.append(f"{lab} has chord {v}-{x}")
    for i in range(2 * g):
        for j in range(i + 1, 2 * g):
            common = sets[i] & sets[j]
            partner = j == i + 1 and i % 2 == 0
            if partner and len(common) != 1:
                out.append(f"{cs.labels[i]} and {cs.labels[j]} meet in {len(common)} vertices")
            if not partner and common:
                out.append(f"{cs.labels[i]} and {cs.labels[j]} intersect")
    if cs.pairing != standard_form(g):
        out.append("pairing is not standard")
    return out


def reroute_disjoint(cs: CurveSystem, max_refinements: int = 4, prefix: str = "r") -> tuple[SimplicialComplex, CurveSystem]:
    """Refine the surface and return a geometric symplectic curve system.

    a_i meets b_i in a single vertex where the curves cross, all other pairs
    of curves are disjoint, and the crossing of a_1 and b_1 becomes the new
    basepoint.  The new
    system has the same (standard) pairing as ``cs`` but need not represent
    the same classes.  Already geometric input is returned unchanged.
    """
    s = cs.surface
    _require_surface(s)
    g = (2 - s.euler_characteristic) // 2
    if len(cs.curves) == 2 * g and cs.pairing == standard_form(g) and not geometric_defects(cs):
        return s, cs
    b = SurfaceBuilder(s, prefix)
    acurves: list = []
    bcurves: list = []
    for attempt in range(max_refinements + 1):
        if _extend_pairs(b, g, acurves, bcurves):
            break
        if attempt == max_refinements:
            raise ReroutingFailed(
                f"found {len(bcurves)} of {g} curve pairs after "
                f"{max_refinements} global refinements ({len(b.nbrs)} vertices)")
        b.refine_all()
    pairs = list(zip(acurves, bcurves))
    base = acurves[0][0]
    t = b.complex()
    curves = tuple(tuple(c) for pair in pairs for c in pair)
    pairing = pairing_matrix(t, curves)
    if pairing == tuple(tuple(-x for x in row) for row in standard_form(g)):
        # the refined surface was oriented the other way round; flip the b's
        curves = tuple(c if k % 2 == 0 else (c[0],) + tuple(reversed(c[1:])) for k, c in enumerate(curves))
        pairing = pairing_matrix(t, curves)
    out = CurveSystem(t, base, curves, ab_labels(g), pairing, cs.moves + tuple(b.moves))
    bad = geometric_defects(out)
    if bad:
        raise ReroutingFailed("; ".join(bad))
    return t, out


def curve_system_for(s: SimplicialComplex, prefix: str = "r") -> CurveSystem:
    """Homology basis, symplectic normalisation and rerouting in one go."""
    cs = homology_basis(s)
    if cs.curves:
        cs = symplectic_basis(cs)
    _, out = reroute_disjoint(cs, prefix=prefix)
    return out


# -- doubling ---------------------------------------------------------------------------------

def double_curves(surface: SimplicialComplex, cs: CurveSystem, select=None, prefix: str = "d") -> tuple[SimplicialComplex, CurveSystem]:
    """Replace each selected curve by two parallel copies bounding an annulus.

    Every spoke leaving the curve to the left is subdivided, then every spoke
    leaving it to the right; the new midpoints, in order, are the two copies
    and the triangles around the curve form the annulus between them.
    ``select`` is an iterable of labels (default: all curves).
    """
    labels = list(cs.labels) if select is None else list(select)
    b = SurfaceBuilder(surface, prefix)
    tracked = {lab: list(cs.curve(lab)) for lab in cs.labels}
    b.walks = list(tracked.values())
    copies = []
    cores = []
    for lab in labels:
        walk = tracked[lab]
        for u, v in b.chords(walk):
            if frozenset((u, v)) in b.edge_tris:
                b.split_edge(u, v)
        core = tuple(walk)
        n = len(core)
        spokes = {"left": [], "right": []}
        for i in range(n):
            left, right = b.sides(list(core), i)
            if not left or not right:
                raise NonDiskCurve(f"{lab} bounds a triangle at {core[i]}")
            # spokes ordered from the previous vertex's side to the next one's
            spokes["left"] += [(core[i], x) for x in reversed(left)]
            spokes["right"] += [(core[i], x) for x in right]
        made = {}
        for side in ("left", "right"):
            mids = []
            for v, x in spokes[side]:
                mids.append(b.split_edge(v, x))
            made[side] = mids
        left_copy, right_copy = made["left"], made["right"]
        b.walks += [left_copy, right_copy]
        copies.append((lab, left_copy, right_copy))
        cores.append(core)
    t = b.complex()
    curves, out_labels = [], []
    for lab, lc, rc in copies:
        curves += [tuple(lc), tuple(rc)]
        out_labels += [f"{lab}'", f"{lab}''"]
    pairing = pairing_matrix(t, curves) if curves else ()
    base = cs.basepoint
    out = CurveSystem(t, base, tuple(curves), tuple(out_labels), pairing,
                      cs.moves + tuple(b.moves), tuple(tuple(tracked[lab]) for lab in labels))
    return t, out


def strip(t: SimplicialComplex, core) -> SimplicialComplex:
    """Triangles touching the core curve: the annulus between its two copies."""
    on = set(core)
    return SimplicialComplex(f for f in t.facets if on & set(f))


def is_annulus_between(t: SimplicialComplex, core, c1, c2) -> bool:
    a = strip(t, core)
    bd = a.boundary()
    want = {frozenset(e) for c in (c1, c2) for e in zip(c, c[1:] + c[:1])}
    got = {frozenset(e) for e in bd.facets}
    return a.euler_characteristic == 0 and a.strongly_connected() and got == want and not set(c1) & set(c2)
