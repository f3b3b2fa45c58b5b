"""Straight-line and polyline drawings, exact segment crossing tests, planarization."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Optional

import numpy as np

from ..errors import DomainError, StructureError
from ..graph import WeightedGraph
from ._plan import Plan

_CHUNK = 4_000_000


@dataclass
class GeometricDrawing:
    """Vertex points plus, optionally, a polyline per edge (straight segments if None)."""

    graph: WeightedGraph
    points: np.ndarray
    polylines: Optional[dict] = None

    def __post_init__(self):
        self.points = np.asarray(self.points)
        if self.points.shape != (self.graph.n, 2):
            raise DomainError("need one point per vertex")
        if self.polylines is not None:
            for (u, v), pl in self.polylines.items():
                if tuple(pl[0]) != tuple(self.points[u]) or tuple(pl[-1]) != tuple(self.points[v]):
                    raise StructureError(f"polyline of ({u}, {v}) does not end at its vertices")

    def segments(self):
        """(edge index, a, b) for every straight piece."""
        out = []
        for i, (u, v) in enumerate(self.graph.edges()):
            pl = self.polylines[(u, v)] if self.polylines is not None else [self.points[u], self.points[v]]
            for a, b in zip(pl, pl[1:]):
                out.append((i, tuple(a), tuple(b)))
        return out


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def orientation(a, b, c):
    """Sign of the signed area of (a, b, c): +1 left turn, -1 right turn, 0 collinear."""
    return int(np.sign(_cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1])))


def in_general_position(points) -> bool:
    P = np.asarray(points, dtype=float)
    n = len(P)
    if n != len({tuple(p) for p in P.tolist()}):
        return False
    if n < 3:
        return True
    scale = max(1.0, float(np.abs(P).max()))
    tol = 1e-12 * scale * scale
    for i in range(n - 2):
        d1 = P[i + 1:] - P[i]
        c = d1[:, None, 0] * d1[None, :, 1] - d1[:, None, 1] * d1[None, :, 0]
        iu = np.triu_indices(len(d1), 1)
        if np.any(np.abs(c[iu]) <= tol):
            return False
    return True


def general_position(points, seed: int = 0, scale: float = 1e-9, tries: int = 10) -> np.ndarray:
    """Return ``points`` unchanged if in general position, else a seeded tiny jitter of them."""
    P = np.asarray(points, dtype=float)
    if in_general_position(P):
        return P
    rng = np.random.default_rng(seed)
    span = max(1.0, float(np.ptp(P))) if len(P) else 1.0
    for _ in range(tries):
        Q = P + rng.normal(scale=scale * span, size=P.shape)
        if in_general_position(Q):
            return Q
        scale *= 10
    raise DomainError("could not perturb points into general position")


def _pair_chunks(m):
    """Yield (i, j) index arrays over all pairs i < j, chunked."""
    rows = max(1, _CHUNK // max(m, 1))
    for s in range(0, m, rows):
        i = np.arange(s, min(m, s + rows))
        I, J = np.meshgrid(i, np.arange(m), indexing="ij")
        mask = J > I
        yield I[mask], J[mask]


def segment_cross_pairs(A, B, skip=None):
    """Index pairs (i, j), i < j, of segments A[i]B[i] and A[j]B[j] that cross properly.

    Works on float or int64 coordinates; only the signs of orientation
    tests are used.  ``skip(i, j)`` is a vectorised mask of pairs to ignore.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    out_i, out_j = [], []
    D = B - A
    for I, J in _pair_chunks(len(A)):
        if skip is not None:
            keep = ~skip(I, J)
            I, J = I[keep], J[keep]
        o1 = np.sign(_cross(D[I, 0], D[I, 1], A[J, 0] - A[I, 0], A[J, 1] - A[I, 1]))
        o2 = np.sign(_cross(D[I, 0], D[I, 1], B[J, 0] - A[I, 0], B[J, 1] - A[I, 1]))
        o3 = np.sign(_cross(D[J, 0], D[J, 1], A[I, 0] - A[J, 0], A[I, 1] - A[J, 1]))
        o4 = np.sign(_cross(D[J, 0], D[J, 1], B[I, 0] - A[J, 0], B[I, 1] - A[J, 1]))
        hit = (o1 * o2 < 0) & (o3 * o4 < 0)
        out_i.append(I[hit])
        out_j.append(J[hit])
    if not out_i:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(out_i), np.concatenate(out_j)


def _weight_sum(G: WeightedGraph, I, J) -> Fraction:
    """Exact sum of w(edge I) * w(edge J) over index arrays into G.edges()."""
    ws = list(G.weights.values())
    if not len(I):
        return Fraction(0)
    L = 1
    for w in ws:
        L = L * w.denominator // math.gcd(L, w.denominator)
    iw = np.array([int(w * L) for w in ws], dtype=object if L > 2 ** 20 else np.int64)
    prod = iw[I] * iw[J]
    total = int(prod.sum()) if prod.dtype != object else sum(prod)
    return Fraction(total, L * L)


def straight_line_crossing_pairs(points, G: WeightedGraph):
    """Index pairs into G.edges() of independent edges whose segments cross."""
    edges = np.array(G.edges(), dtype=np.int64).reshape(-1, 2)
    P = np.asarray(points)
    A, B = P[edges[:, 0]], P[edges[:, 1]]

    def adjacent(I, J):
        return ((edges[I, 0] == edges[J, 0]) | (edges[I, 0] == edges[J, 1])
                | (edges[I, 1] == edges[J, 0]) | (edges[I, 1] == edges[J, 1]))

    return segment_cross_pairs(A, B, adjacent)


def straight_line_crossings(points, G: WeightedGraph, seed: int = 0) -> Fraction:
    """Weighted crossing count of the straight-line drawing on ``points``.

    Points are perturbed first if three are collinear or two coincide.
    """
    P = general_position(points, seed)
    I, J = straight_line_crossing_pairs(P, G)
    return _weight_sum(G, I, J)


def geometric_crossing_weight(D: GeometricDrawing, graph: Optional[WeightedGraph] = None) -> Fraction:
    G = D.graph
    W = graph if graph is not None else G
    if D.polylines is None:
        I, J = straight_line_crossing_pairs(D.points, G)
    else:
        segs = D.segments()
        A = np.array([s[1] for s in segs])
        B = np.array([s[2] for s in segs])
        eid = np.array([s[0] for s in segs])
        si, sj = segment_cross_pairs(A, B, lambda I, J: eid[I] == eid[J])
        I, J = eid[si], eid[sj]
    if graph is None:
        return _weight_sum(G, I, J)
    edges = G.edges()
    return sum((W.weight(*edges[i]) * W.weight(*edges[j]) for i, j in zip(I.tolist(), J.tolist())), Fraction(0))


# -- exact planarization of integer polylines --------------------------------


def _half(v):
    x, y = v
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def _angle_cmp(a, b):
    ha, hb = _half(a[0]), _half(b[0])
    if ha != hb:
        return ha - hb
    c = a[0][0] * b[0][1] - a[0][1] * b[0][0]
    if c == 0:
        raise StructureError("two curves leave a node in the same direction")
    return -1 if c > 0 else 1


def planarize(G: WeightedGraph, points, polylines: Optional[dict] = None) -> Plan:
    """Exact planarization of a drawing with integer coordinates.

    Raises StructureError on degeneracies (three curves through one point,
    a curve through a vertex, overlapping pieces) so callers can perturb and
    retry.
    """
    pts = [tuple(int(c) for c in p) for p in np.asarray(points).tolist()]
    if len(set(pts)) != len(pts):
        raise StructureError("two vertices share a point")
    edges = G.edges()
    segs = []  # (eid, k, a, b)
    for eid, (u, v) in enumerate(edges):
        pl = polylines[(u, v)] if polylines is not None else [pts[u], pts[v]]
        pl = [tuple(int(c) for c in p) for p in pl]
        if pl[0] != pts[u] or pl[-1] != pts[v]:
            raise StructureError(f"polyline of ({u}, {v}) does not end at its vertices")
        for k, (a, b) in enumerate(zip(pl, pl[1:])):
            if a == b:
                raise StructureError("zero-length polyline piece")
            segs.append((eid, k, a, b))
    S = len(segs)
    big = max([abs(c) for s in segs for p in (s[2], s[3]) for c in p] + [1])
    dt = np.int64 if big < 2 ** 30 else object
    A = np.array([s[2] for s in segs], dtype=dt).reshape(-1, 2)
    B = np.array([s[3] for s in segs], dtype=dt).reshape(-1, 2)
    eid_of = np.array([s[0] for s in segs], dtype=np.int64)
    k_of = np.array([s[1] for s in segs], dtype=np.int64)

    # degeneracy screen: a polyline point lying on another segment
    vpts = set(pts)
    bends = {}
    for s in segs:
        for p in (s[2], s[3]):
            bends.setdefault(p, set()).add(s[0])
    for p, es in bends.items():
        if p not in vpts and len(es) > 1:
            raise StructureError("two polylines share a bend point")
    _check_points_on_segments(A, B, segs, bends)

    same_or_next = lambda I, J: (eid_of[I] == eid_of[J]) & (np.abs(k_of[I] - k_of[J]) <= 1)
    I, J = segment_cross_pairs(A, B, same_or_next)
    cross_on = {s: [] for s in range(S)}
    node_pos = {}
    nid = G.n
    dir_at = {}
    for i, j in zip(I.tolist(), J.tolist()):
        if eid_of[i] == eid_of[j]:
            raise StructureError("a curve crosses itself")
        ai, bi, aj, bj = segs[i][2], segs[i][3], segs[j][2], segs[j][3]
        di = (bi[0] - ai[0], bi[1] - ai[1])
        dj = (bj[0] - aj[0], bj[1] - aj[1])
        den = di[0] * dj[1] - di[1] * dj[0]
        ti = Fraction((aj[0] - ai[0]) * dj[1] - (aj[1] - ai[1]) * dj[0], den)
        tj = Fraction((aj[0] - ai[0]) * di[1] - (aj[1] - ai[1]) * di[0], den)
        x = nid
        nid += 1
        p = (ai[0] + ti * di[0], ai[1] + ti * di[1])
        if p in node_pos:
            raise StructureError("three curves through one point")
        node_pos[p] = x
        cross_on[i].append((ti, x))
        cross_on[j].append((tj, x))
    # walk each edge and cut it at its crossings
    segments = []
    rotation = {v: [] for v in range(nid)}
    seg_idx = 0
    by_edge = {}
    for s, (e, k, a, b) in enumerate(segs):
        by_edge.setdefault(e, []).append(s)
    for e, (u, v) in enumerate(edges):
        seq = [(u, None)]
        for s in by_edge[e]:
            a, b = segs[s][2], segs[s][3]
            d = (b[0] - a[0], b[1] - a[1])
            for t, x in sorted(cross_on[s]):
                seq.append((x, d))
        seq.append((v, None))
        first = by_edge[e][0]
        last = by_edge[e][-1]
        d0 = (segs[first][3][0] - segs[first][2][0], segs[first][3][1] - segs[first][2][1])
        d1 = (segs[last][3][0] - segs[last][2][0], segs[last][3][1] - segs[last][2][1])
        for (x, dx), (y, dy) in zip(seq, seq[1:]):
            out_dir = dx if dx is not None else d0
            in_dir = dy if dy is not None else d1
            segments.append((x, y, e))
            rotation[x].append(((out_dir[0], out_dir[1]), seg_idx))
            rotation[y].append(((-in_dir[0], -in_dir[1]), seg_idx))
            seg_idx += 1
    rot = {}
    for x, items in rotation.items():
        items.sort(key=cmp_to_key(_angle_cmp))
        rot[x] = [s for _, s in reversed(items)]
    table = [(u, v, w) for (u, v), w in G.weights.items()]
    return Plan.from_segments(G.n, table, segments, rot)


def _check_points_on_segments(A, B, segs, bends):
    """Reject any polyline point lying in the relative interior of a foreign segment."""
    P = np.array(list(bends.keys()), dtype=A.dtype).reshape(-1, 2)
    if not len(P) or not len(A):
        return
    D = B - A
    for s in range(len(A)):
        c = _cross(D[s, 0], D[s, 1], P[:, 0] - A[s, 0], P[:, 1] - A[s, 1])
        on = np.nonzero(c == 0)[0]
        for q in on.tolist():
            p = tuple(int(x) for x in P[q])
            a, b = segs[s][2], segs[s][3]
            if p == a or p == b:
                continue
            if min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]):
                raise StructureError("a polyline passes through a vertex or bend")
