"""Regular cellulations as explicit face posets.

Cells are addressed by ``(dim, id)``.  0-cells are the vertex labels
themselves; a k-cell (k >= 1) has an integer id and a boundary list of
``(face_id, sign)`` pairs pointing at (k-1)-cells.  2-cells additionally
carry their cyclic vertex sequence.  Cells are never identified by vertex
sets: in a regular but not strongly regular cellulation two different
cells may span the same vertices.
"""
from __future__ import annotations

import itertools
import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from ..errors import MalformedComplex
from .simplicial import FVector, SimplicialComplex, label_key, sorted_face

Boundary = tuple[tuple[object, int], ...]


@dataclass(eq=False)
class Cellulation:
    dim: int
    vertices: tuple
    cells: dict[int, dict[int, Boundary]]  # d -> id -> boundary, for d >= 1
    cycles: dict[int, tuple] = field(default_factory=dict)  # 2-cell id -> vertex cycle
    tags: dict[tuple[int, object], str] = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = sorted_face(self.vertices)
        for d in range(1, self.dim + 1):
            self.cells.setdefault(d, {})

    def __repr__(self):
        return f"Cellulation(dim={self.dim}, f={self.f_vector.counts})"

    # -- counting ---------------------------------------------------------------
    @property
    def f_vector(self) -> FVector:
        return FVector((len(self.vertices),) + tuple(len(self.cells[d]) for d in range(1, self.dim + 1)))

    @property
    def euler_characteristic(self) -> int:
        return self.f_vector.euler_characteristic

    def cell_ids(self, d: int):
        return list(self.vertices) if d == 0 else sorted(self.cells[d])

    def boundary(self, d: int, cid) -> Boundary:
        return self.cells[d][cid]

    def cofaces(self, d: int) -> dict:
        """Map each (d-1)-cell to the list of d-cells having it in their boundary."""
        out = defaultdict(list)
        for cid, bd in self.cells[d].items():
            for f, _ in bd:
                out[f].append(cid)
        return out

    @cached_property
    def _vertex_sets(self) -> dict:
        vs = {(0, v): frozenset([v]) for v in self.vertices}
        for d in range(1, self.dim + 1):
            for cid, bd in self.cells[d].items():
                vs[(d, cid)] = frozenset().union(*(vs[(d - 1, f)] for f, _ in bd))
        return vs

    def vertex_set(self, d: int, cid) -> frozenset:
        return self._vertex_sets[(d, cid)]

    @cached_property
    def _closures(self) -> dict:
        cl = {(0, v): frozenset([(0, v)]) for v in self.vertices}
        for d in range(1, self.dim + 1):
            for cid, bd in self.cells[d].items():
                cl[(d, cid)] = frozenset([(d, cid)]).union(*(cl[(d - 1, f)] for f, _ in bd))
        return cl

    def closure(self, d: int, cid) -> frozenset:
        """All faces of the closed cell, itself included, as (dim, id) pairs."""
        return self._closures[(d, cid)]

    # -- checks -------------------------------------------------------------
    def check(self) -> None:
        """Raise MalformedComplex unless references resolve and d∂∂ = 0."""
        for d in range(1, self.dim + 1):
            lower = set(self.vertices) if d == 1 else set(self.cells[d - 1])
            for cid, bd in self.cells[d].items():
                for f, s in bd:
                    if f not in lower or s not in (1, -1):
                        raise MalformedComplex(f"cell {(d, cid)} has a bad boundary entry {(f, s)}")
                if d == 1 and (len(bd) != 2 or bd[0][0] == bd[1][0]):
                    raise MalformedComplex(f"edge {cid} needs two distinct endpoints")
                if self.boundary_of_boundary(d, cid):
                    raise MalformedComplex(f"boundary of the boundary of {(d, cid)} is nonzero")

    def boundary_of_boundary(self, d: int, cid) -> dict:
        acc = defaultdict(int)
        if d < 2:
            if d == 1:
                total = sum(s for _, s in self.cells[1][cid])
                return {} if total == 0 else {"augmentation": total}
            return {}
        for f, s in self.cells[d][cid]:
            for g, t in self.cells[d - 1][f]:
                acc[g] += s * t
        return {g: v for g, v in acc.items() if v}

    def is_regular_polygons(self) -> bool:
        """Every 2-cell's cycle visits pairwise distinct vertices."""
        return all(len(set(c)) == len(c) for c in self.cycles.values())

    # -- conversion ---------------------------------------------------------------
    @classmethod
    def from_polygons(cls, polygons, vertices=None, tags=None) -> Cellulation:
        """2-dimensional cellulation from vertex cycles.

        Edges are created once per unordered vertex pair, oriented from the
        smaller to the larger label; only valid when no two edges share both
        endpoints.
        """
        polygons = [tuple(p) for p in polygons]
        if vertices is None:
            vertices = {v for p in polygons for v in p}
        edge_id = {}
        edges = {}
        faces = {}
        cycles = {}
        for fid, poly in enumerate(polygons):
            bd = []
            for a, b in zip(poly, poly[1:] + poly[:1]):
                key = frozenset((a, b))
                if key not in edge_id:
                    lo, hi = sorted_face(key)
                    edge_id[key] = len(edges)
                    edges[edge_id[key]] = ((lo, -1), (hi, 1))
                eid = edge_id[key]
                bd.append((eid, 1 if edges[eid][1][0] == b else -1))
            faces[fid] = tuple(bd)
            cycles[fid] = poly
        tagmap = {(2, i): t for i, t in (tags or {}).items()}
        return cls(2, tuple(vertices), {1: edges, 2: faces}, cycles, tagmap)

    @classmethod
    def from_simplicial(cls, c: SimplicialComplex) -> Cellulation:
        ids = {}
        cells = {}
        cycles = {}
        for k in range(1, c.dim + 1):
            cells[k] = {}
            for i, f in enumerate(c.faces(k)):
                ids[f] = i
                bd = []
                for j in range(len(f)):
                    sub = f[:j] + f[j + 1:]
                    bd.append((sub[0] if k == 1 else ids[sub], -1 if j % 2 else 1))
                if k == 1:
                    bd = [(f[0], -1), (f[1], 1)]
                cells[k][i] = tuple(bd)
                if k == 2:
                    cycles[i] = f
        return cls(c.dim, c.vertices, cells, cycles)

    def edge_between(self) -> dict:
        """Map frozenset of endpoints -> list of edge ids."""
        out = defaultdict(list)
        for eid, bd in self.cells[1].items():
            out[frozenset(v for v, _ in bd)].append(eid)
        return out

    # -- text interchange ---------------------------------------------------------
    def to_text(self) -> str:
        out = [f"CELLULATION {self.dim}", f"VERTICES {len(self.vertices)}"]
        out += [str(v) for v in self.vertices]
        for d in range(1, self.dim + 1):
            out.append(f"CELLS {d} {len(self.cells[d])}")
            for cid in sorted(self.cells[d]):
                bd = " ".join(f"{'+' if s > 0 else '-'}{f}" for f, s in self.cells[d][cid])
                line = f"{cid}: [{bd}]"
                if d == 2 and cid in self.cycles:
                    line += " cycle: [" + " ".join(str(v) for v in self.cycles[cid]) + "]"
                out.append(line)
        tags = sorted(self.tags.items(), key=lambda kv: (kv[0][0], label_key(kv[0][1])))
        out.append(f"TAGS {len(tags)}")
        out += [f"{d} {cid} {t}" for (d, cid), t in tags]
        out.append("END")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Cellulation:
        lines = iter(text.splitlines())
        c, _ = _parse_cellulation(lines)
        return c


_CELL_RE = re.compile(r"^(\d+): \[([^\]]*)\](?: cycle: \[([^\]]*)\])?$")


def _parse_cellulation(lines):
    """Parse one CELLULATION block; return it and the line iterator."""
    try:
        head = next(lines).split()
        if head[0] != "CELLULATION":
            raise MalformedComplex(f"expected CELLULATION header, got {head}")
        dim = int(head[1])
        nv = int(next(lines).split()[1])
        vertices = [next(lines).strip() for _ in range(nv)]
        cells = {}
        cycles = {}
        for d in range(1, dim + 1):
            h = next(lines).split()
            if h[0] != "CELLS" or int(h[1]) != d:
                raise MalformedComplex(f"expected CELLS {d}, got {h}")
            cells[d] = {}
            for _ in range(int(h[2])):
                m = _CELL_RE.match(next(lines).strip())
                if not m:
                    raise MalformedComplex("bad cell line")
                cid = int(m.group(1))
                bd = []
                for tok in m.group(2).split():
                    s = 1 if tok[0] == "+" else -1
                    f = tok[1:] if d == 1 else int(tok[1:])
                    bd.append((f, s))
                cells[d][cid] = tuple(bd)
                if m.group(3) is not None:
                    cycles[cid] = tuple(m.group(3).split())
        h = next(lines).split()
        tags = {}
        for _ in range(int(h[1])):
            d, cid, t = next(lines).split(maxsplit=2)
            d = int(d)
            tags[(d, int(cid) if d else cid)] = t
        if next(lines).strip() != "END":
            raise MalformedComplex("missing END")
    except (StopIteration, IndexError, ValueError) as exc:
        raise MalformedComplex(f"truncated or malformed cellulation: {exc}") from exc
    return Cellulation(dim, tuple(vertices), cells, cycles, tags), lines


def coherent_signs(cel: Cellulation, d: int, cell_ids) -> dict | None:
    """Orient a collection of d-cells forming a closed pseudomanifold.

    Returns cell id -> +1/-1 so that the signed sum of boundaries cancels,
    or None when no coherent choice exists.
    """
    cell_ids = list(cell_ids)
    by_face = defaultdict(list)
    for cid in cell_ids:
        for f, s in cel.cells[d][cid]:
            by_face[f].append((cid, s))
    sign = {}
    for start in cell_ids:
        if start in sign:
            continue
        sign[start] = 1
        todo = [start]
        while todo:
            cid = todo.pop()
            for f, s in cel.cells[d][cid]:
                for other, t in by_face[f]:
                    if other == cid:
                        continue
                    want = -sign[cid] * s * t
                    if other in sign:
                        if sign[other] != want:
                            return None
                    else:
                        sign[other] = want
                        todo.append(other)
    return sign


def is_orientable_surface(cel: Cellulation) -> bool:
    return coherent_signs(cel, 2, cel.cells[2]) is not None


def is_strongly_regular(cel: Cellulation) -> bool:
    """Every two closed cells meet in a single common face (or not at all)."""
    all_cells = [(0, v) for v in cel.vertices] + [
        (d, cid) for d in range(1, cel.dim + 1) for cid in sorted(cel.cells[d])
    ]
    by_vset = defaultdict(list)
    for key in all_cells:
        by_vset[cel.vertex_set(*key)].append(key)
    # a cell determined only up to its vertex set is already a violation
    if any(len(v) > 1 for v in by_vset.values()):
        return False
    for a, b in itertools.combinations(all_cells, 2):
        common = cel.vertex_set(*a) & cel.vertex_set(*b)
        if not common:
            continue
        cands = by_vset.get(common)
        if not cands:
            return False
        (face,) = cands
        if face not in cel.closure(*a) or face not in cel.closure(*b):
            return False
    return True


def cube_boundary_cells() -> list[tuple]:
    """The six square faces of the 3-cube on vertices 0..7 (bit patterns)."""
    faces = []
    for axis in range(3):
        for bit in (0, 1):
            others = [a for a in range(3) if a != axis]
            cyc = []
            for x, y in ((0, 0), (1, 0), (1, 1), (0, 1)):
                v = bit << axis | x << others[0] | y << others[1]
                cyc.append(v)
            faces.append(tuple(cyc))
    return faces


def cube_cellulation(solid: bool = False) -> Cellulation:
    """Boundary of the 3-cube as a 2-cellulation, or the solid cube."""
    cel = Cellulation.from_polygons(cube_boundary_cells(), vertices=range(8))
    if not solid:
        return cel
    signs = coherent_signs(cel, 2, cel.cells[2])
    cel.cells[3] = {0: tuple((f, signs[f]) for f in sorted(cel.cells[2]))}
    cel.dim = 3
    return cel
