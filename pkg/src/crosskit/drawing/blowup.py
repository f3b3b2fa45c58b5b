"""Blow-up drawings G[m] from drawings of G, and random projection back to G.

The blow-up is built geometrically: the planarization of D gets straight-line
grid coordinates, every vertex becomes a tiny cluster of m points and every
edge a bundle of m^2 parallel strands following the original curve.  The
result is planarized exactly (integer coordinates) and checked: each original
crossing of independent edges must turn into exactly m^4 crossings between
strands with four distinct clusters.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import networkx as nx
import numpy as np
from networkx.algorithms.planar_drawing import combinatorial_embedding_to_pos

from ..errors import DomainError, StructureError
from ..graph import WeightedGraph, blow_up, induced_subgraph
from ._plan import Plan
from .drawing import CombinatorialDrawing
from .geometry import planarize


def plan_coordinates(P: Plan):
    """Integer straight-line coordinates for a subdivided copy of the planarization.

    Every segment gets a bend node in its middle so that parallel segments
    are harmless.  Returns (pos, bend) where bend maps a half-edge pair key
    (the smaller half-edge id) to its bend node.
    """
    bend = {}
    nxt = max(P.rot) + 1 if P.rot else 0
    for h in P.half_edges():
        k = min(h, P.twin[h])
        if k not in bend:
            bend[k] = nxt + k
    data = {}
    for x, r in P.rot.items():
        data[x] = [bend[min(h, P.twin[h])] for h in r]
    for k, b in bend.items():
        data[b] = [P.origin[k], P.dest(k)]
    emb = nx.PlanarEmbedding()
    emb.set_data(data)
    if len(data) < 3 or not bend:
        pos = {x: (2 * i, i * i % 3) for i, x in enumerate(sorted(data, key=str))}
    else:
        pos = combinatorial_embedding_to_pos(emb)
    return pos, bend


def _route_points(P: Plan, eid: int, pos, bend, r: float = 0.0):
    """Node positions along the curve of ``eid`` (vertex, bends, dummies, vertex).

    With r > 0 every crossing node is replaced by the two points at distance r
    on its incoming and outgoing pieces, so the curve passes the crossing on
    a straight chord.  Chords of two crossing curves have alternating ends on
    a circle around the crossing and therefore cross exactly once.
    """
    nodes = []
    for h in P.chain(eid):
        nodes.append(P.origin[h])
        nodes.append(bend[min(h, P.twin[h])])
    nodes.append(P.dest(P.chain(eid)[-1]))
    pts = []
    for t, x in enumerate(nodes):
        p = np.asarray(pos[x], dtype=float)
        if r > 0 and 0 < t < len(nodes) - 1 and x >= P.n and x in P.rot:
            for y in (nodes[t - 1], nodes[t + 1]):
                d = np.asarray(pos[y], dtype=float) - p
                pts.append(p + r * d / np.linalg.norm(d))
        else:
            pts.append(p)
    return np.array(pts, dtype=float)


def _miter_normals(pts):
    d = np.diff(pts, axis=0)
    d /= np.linalg.norm(d, axis=1)[:, None]
    perp = np.c_[-d[:, 1], d[:, 0]]
    out = np.zeros_like(pts)
    for t in range(1, len(pts) - 1):
        s = perp[t - 1] + perp[t]
        c = 1.0 + float(d[t - 1] @ d[t])
        out[t] = s / max(c, 0.2)
    return out


def good_crossings(D: CombinatorialDrawing, m: int) -> int:
    """Crossings between edges whose four endpoints lie in four distinct clusters."""
    cnt = 0
    for (a, b), (c, d) in D.crossing_pairs():
        if len({a // m, b // m, c // m, d // m}) == 4:
            cnt += 1
    return cnt


def independent_crossings(D: CombinatorialDrawing) -> int:
    return sum(1 for a, b in D.crossing_pairs() if not (set(a) & set(b)))


def blow_up_drawing(D: CombinatorialDrawing, m: int, tries: int = 8) -> CombinatorialDrawing:
    """Drawing of blow_up(G, m) with exactly m^4 good crossings per independent crossing of D."""
    if m < 1:
        raise DomainError("blow-up factor must be positive")
    G = D.graph
    Gm = blow_up(G, m)
    if m == 1:
        return CombinatorialDrawing(Gm, D.plan(), D.log + ("blow-up 1",))
    if not D.is_complete():
        raise DomainError("blow-up needs a complete drawing")
    P = D._plan
    pos, bend = plan_coordinates(P)
    want = m ** 4 * independent_crossings(D)
    rng = np.random.default_rng(12345)
    strands = m * m
    grid = max(max(abs(c) for p in pos.values() for c in p), 1)
    scale = (1 << 29) // (grid + 1)
    # a generic linear map keeps grid-aligned pieces away from exact collinearity
    A = np.array([[1.0, 0.3183098], [0.2718281, 1.0]])
    pos = {x: tuple(A @ np.asarray(p, dtype=float)) for x, p in pos.items()}
    # chords pass crossings at distance `near`; bundle half-width eps is well below it
    near = 1.0 / (8.0 * (grid + 2))
    eps = scale * near / 16.0
    last = None
    for attempt in range(tries):
        points = {}
        jitter = rng.integers(0, 3, size=(G.n, 2))
        for v in range(G.n):
            base = np.array(pos[v], dtype=float) * scale
            for i in range(m):
                c = (2 * i - m + 1) / m
                off = np.array([c, c * c + (i % 2) / (4.0 * m)]) * eps * 0.25
                points[v * m + i] = tuple(int(round(x)) for x in base + off + jitter[v])
        polylines = {}
        for eid, (u, v) in enumerate(P.ends):
            route = _route_points(P, eid, pos, bend, near) * scale
            nrm = _miter_normals(route / scale)
            for i in range(m):
                for j in range(m):
                    s = i * m + j
                    o = (2 * s - strands + 1.37) * eps / strands
                    wob = rng.integers(-2, 3, size=(len(route), 2))
                    mid = [tuple(int(round(x)) for x in route[t] + o * nrm[t] + wob[t]) for t in range(1, len(route) - 1)]
                    a, b = u * m + i, v * m + j
                    polylines[(a, b)] = [points[a], *mid, points[b]]
        pts = np.array([points[x] for x in range(Gm.n)], dtype=np.int64)
        try:
            Q = planarize(Gm, pts, polylines)
        except StructureError as exc:
            last = exc
            eps *= 0.71
            continue
        out = CombinatorialDrawing(Gm, Q, D.log + (f"blow-up {m}",))
        if good_crossings(out, m) == want:
            return out
        last = StructureError(f"good crossings {good_crossings(out, m)} != {want}")
        eps *= 0.5
    raise StructureError(f"blow-up construction failed: {last}")


# -- projection --------------------------------------------------------------


def induced_subdrawing(D: CombinatorialDrawing, X) -> CombinatorialDrawing:
    """Restrict D to the vertex set X, relabelled to 0..|X|-1 in increasing order."""
    X = sorted(set(X))
    G = D.graph
    pos = {v: i for i, v in enumerate(X)}
    H = induced_subgraph(G, X)
    P = D.plan()
    for eid, (u, v) in enumerate(P.ends):
        if P.edge_alive[eid] and (u not in pos or v not in pos):
            P.remove_edge(eid)
    n0, n1 = G.n, len(X)

    def remap(x):
        return pos[x] if x < n0 else x - n0 + n1

    new_eid = {e: i for i, e in enumerate(H.edges())}
    eid_map = {}
    for eid, (u, v) in enumerate(P.ends):
        if u in pos and v in pos:
            eid_map[eid] = new_eid[(pos[u], pos[v])]
    Q = Plan(n1)
    Q.rot = {}
    for x, r in P.rot.items():
        if x < n0 and x not in pos:
            continue
        Q.rot[remap(x)] = r[:]
    for v in range(n1):
        Q.rot.setdefault(v, [])
    Q.origin = [remap(x) if (x >= n0 or x in pos) else -1 for x in P.origin]
    Q.twin = P.twin[:]
    Q.alive = P.alive[:]
    Q.edge_of = [eid_map.get(e, -1) for e in P.edge_of]
    Q.next_node = remap(P.next_node) if P.next_node >= n0 else n1
    for (u, v), w in H.weights.items():
        Q.add_edge_record(u, v, w)
    for eid, ne in eid_map.items():
        Q.edge_alive[ne] = P.edge_alive[eid]
    return CombinatorialDrawing(H, Q, D.log + ("induced",))


def _cluster_check(Gm: WeightedGraph, m: int) -> int:
    if m < 1 or Gm.n % m:
        raise DomainError("vertex count is not a multiple of the blow-up factor")
    n = Gm.n // m
    seen = {}
    for (a, b), w in Gm.weights.items():
        u, v = a // m, b // m
        if u == v:
            raise DomainError("edge inside a cluster: not a blow-up")
        seen.setdefault((u, v), set()).add(w)
    for k, ws in seen.items():
        if len(ws) != 1:
            raise DomainError(f"cluster pair {k} carries unequal weights")
    counts = {}
    for (a, b) in Gm.weights:
        counts[(a // m, b // m)] = counts.get((a // m, b // m), 0) + 1
    if any(c != m * m for c in counts.values()):
        raise DomainError("cluster pairs are not complete bipartite")
    return n


def project(D: CombinatorialDrawing, m: int, reps) -> CombinatorialDrawing:
    """Sub-drawing on the representatives ``v*m + reps[v]``."""
    n = _cluster_check(D.graph, m)
    if len(reps) != n:
        raise DomainError("need one representative per cluster")
    return induced_subdrawing(D, [v * m + int(r) for v, r in enumerate(reps)])


def project_random(D: CombinatorialDrawing, m: int, seed: int = 0) -> CombinatorialDrawing:
    """Pick one uniformly random representative per cluster (seeded)."""
    n = _cluster_check(D.graph, m)
    reps = np.random.default_rng(seed).integers(0, m, size=n)
    return project(D, m, reps)


def projection_mean_exhaustive(D: CombinatorialDrawing, m: int) -> Fraction:
    """Mean crossing weight of project(D, m, reps) over all m^n representative choices."""
    from .drawing import crossing_weight
    n = _cluster_check(D.graph, m)
    total = Fraction(0)
    count = 0
    for reps in product(range(m), repeat=n):
        total += crossing_weight(project(D, m, reps))
        count += 1
    return total / count
