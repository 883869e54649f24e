"""Integral homology through Smith normal form of boundary matrices.

Boundary matrices of simplicial complexes are very sparse and almost every
pivot is a unit, so elimination runs on dict-of-rows matrices: unit pivots
are removed first (cheapest column first, to limit fill-in), and whatever
is left is reduced densely with minimal-absolute-value pivoting.  All
arithmetic is exact Python integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .simplicial import SimplicialComplex


@dataclass(frozen=True)
class HomologyProfile:
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        assert all(b >= 0 for b in self.betti)
        assert all(t > 1 for ts in self.torsion for t in ts)

    @property
    def is_torsion_free(self) -> bool:
        return not any(self.torsion)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * b for i, b in enumerate(self.betti))

    def __str__(self):
        parts = []
        for i, (b, ts) in enumerate(zip(self.betti, self.torsion)):
            terms = ([f"Z^{b}"] if b else []) + [f"Z/{t}" for t in ts]
            parts.append(f"H{i}={' + '.join(terms) or '0'}")
        return ", ".join(parts)


def smith_diagonal(rows: list[dict[int, int]]) -> list[int]:
    """Nonzero invariant factors of a sparse integer matrix.

    ``rows`` is a list of {column: value} dicts; it is consumed.  The result
    is sorted so that each entry divides the next.
    """
    rows = {i: {c: v for c, v in r.items() if v} for i, r in enumerate(rows)}
    rows = {i: r for i, r in rows.items() if r}
    cols: dict[int, set[int]] = {}
    for i, r in rows.items():
        for c in r:
            cols.setdefault(c, set()).add(i)
    diag = []

    # unit pivots, swept column by column (sparsest first) until none remain
    progress = True
    while progress:
        progress = False
        for c in sorted(cols, key=lambda c: (len(cols[c]), c)):
            if c not in cols:
                continue
            unit = [i for i in cols[c] if abs(rows[i][c]) == 1]
            if not unit:
                continue
            i = min(unit, key=lambda i: (len(rows[i]), i))
            _eliminate(rows, cols, i, c)
            diag.append(1)
            progress = True

    # dense remainder
    if rows:
        ridx = sorted(rows)
        cidx = sorted(cols)
        cpos = {c: k for k, c in enumerate(cidx)}
        dense = [[0] * len(cidx) for _ in ridx]
        for a, i in enumerate(ridx):
            for c, v in rows[i].items():
                dense[a][cpos[c]] = v
        diag.extend(_dense_smith(dense))
    return _normalize(diag)


def _eliminate(rows, cols, i, c):
    piv = rows[i][c]
    prow = rows.pop(i)
    for cc in prow:
        cols[cc].discard(i)
    for k in sorted(cols[c]):
        r = rows[k]
        f = r[c] * piv  # piv is +-1, so r[c]/piv == r[c]*piv
        for cc, v in prow.items():
            nv = r.get(cc, 0) - f * v
            if nv:
                if cc not in r:
                    cols[cc].add(k)
                r[cc] = nv
            elif cc in r:
                del r[cc]
                cols[cc].discard(k)
        if not r:
            del rows[k]
    for cc in prow:
        if not cols[cc]:
            del cols[cc]
    cols.pop(c, None)


def _dense_smith(a: list[list[int]]) -> list[int]:
    m = len(a)
    n = len(a[0]) if m else 0
    out = []
    t = 0
    while t < min(m, n):
        # pivot on the entry of minimal absolute value in the remaining block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    f = a[i][t] // p
                    if f:
                        a[i] = [x - f * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    f = a[t][j] // p
                    if f:
                        for row in a:
                            row[j] -= f * row[t]
                    if a[t][j]:
                        done = False
            if done:
                # the pivot must divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # a smaller remainder appeared; move it into the pivot position
            best = None
            for i in range(t, m):
                if a[i][t] and (best is None or abs(a[i][t]) < abs(best[2])):
                    best = (i, t, a[i][t])
            for j in range(t, n):
                if a[t][j] and (best is None or abs(a[t][j]) < abs(best[2])):
                    best = (t, j, a[t][j])
            i, j, _ = best
            if i != t:
                a[t], a[i] = a[i], a[t]
            if j != t:
                for row in a:
                    row[t], row[j] = row[j], row[t]
        out.append(abs(a[t][t]))
        t += 1
    return out


def _normalize(diag: list[int]) -> list[int]:
    """Turn any diagonal into the divisibility chain with the same quotient."""
    d = sorted(abs(x) for x in diag if x)
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i]:
                    g = gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] * d[j] // g
                    changed = True
        d.sort()
    return d


def boundary_rows(c: SimplicialComplex, k: int) -> list[dict[int, int]]:
    """Rows of the k-th boundary matrix, one row per k-face (k >= 1).

    Row r holds the (k-1)-faces of the r-th k-face with alternating signs.
    Using faces as rows computes the transpose, which has the same Smith form.
    """
    lower = {f: i for i, f in enumerate(c.faces(k - 1))}
    rows = []
    for f in c.faces(k):
        r = {}
        for i in range(len(f)):
            r[lower[f[:i] + f[i + 1:]]] = -1 if i % 2 else 1
        rows.append(r)
    return rows


def homology(c: SimplicialComplex) -> HomologyProfile:
    """Integral simplicial homology H_0..H_dim (unreduced)."""
    d = c.dim
    if d < 0:
        return HomologyProfile((), ())
    fv = c.f_vector
    invariants = {0: [], d + 1: []}
    for k in range(1, d + 1):
        invariants[k] = smith_diagonal(boundary_rows(c, k))
    betti = []
    torsion = []
    for k in range(d + 1):
        rank_out = len(invariants[k])
        rank_in = len(invariants[k + 1])
        betti.append(fv[k] - rank_out - rank_in)
        torsion.append(tuple(x for x in invariants[k + 1] if x > 1))
    return HomologyProfile(tuple(betti), tuple(torsion))


def integer_matrix_smith(matrix: list[list[int]]) -> list[int]:
    """Invariant factors of a dense integer matrix (convenience wrapper)."""
    return smith_diagonal([{j: v for j, v in enumerate(row) if v} for row in matrix])
