"""Region subdivision of drawings and transfer of a drawing between close graphs.

Regions are unions of triangles of a refined triangulation of the
planarization.  Around every graph vertex the triangulation is refined so
that the triangles touching that vertex (its *star*) touch no other graph
vertex; stars are never split between regions, which keeps every vertex in
the interior of its region.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cutnorm import cut_distance
from .drawing._plan import Plan
from .drawing.drawing import CombinatorialDrawing, refine_plan
from .errors import DomainError, StructureError
from .graph import VertexPartition, WeightedGraph, edge_mass


# -- triangulation -------------------------------------------------------------


@dataclass
class Triangulation:
    """A triangulated copy of a planarization.

    ``plan`` holds real pieces (edge ids < ``m_real``) and virtual zero-weight
    edges.  Nodes below ``n`` are graph vertices.
    """

    plan: Plan
    n: int
    m_real: int
    faces: list = field(default_factory=list)
    face_of: dict = field(default_factory=dict)

    def refresh(self):
        self.faces, self.face_of = self.plan.faces()
        return self

    def face_nodes(self, f):
        return [self.plan.origin[h] for h in self.faces[f]]

    def node_faces(self):
        out = {x: [] for x in self.plan.rot}
        for f, hs in enumerate(self.faces):
            for h in hs:
                out[self.plan.origin[h]].append(f)
        return out

    def is_triangulated(self) -> bool:
        return all(len(f) == 3 for f in self.faces)

    def euler_ok(self) -> bool:
        V = len(self.plan.rot)
        E = len(self.plan.half_edges()) // 2
        return V - E + len(self.faces) == 2


def _virtual(P: Plan, a: int, b: int) -> int:
    eid = P.add_edge_record(a, b, 0)
    P.edge_alive[eid] = True
    return eid


def _connect_components(P: Plan):
    comp = P.components()
    reps = {}
    for x in sorted(P.rot):
        reps.setdefault(comp[x], x)
    roots = sorted(reps.values())
    for r in roots[1:]:
        a = roots[0]
        pa = P.rot[a][0] if P.rot[a] else None
        pb = P.rot[r][0] if P.rot[r] else None
        P.chord(pa, a, pb, r, _virtual(P, a, r))


def _fan(P: Plan, face):
    """Triangulate a face without repeated nodes by chords from its first node."""
    x0 = P.origin[face[0]]
    pa = face[0]
    for i in range(2, len(face) - 1):
        xi = P.origin[face[i]]
        g, _ = P.chord(pa, x0, face[i], xi, _virtual(P, x0, xi))
        pa = g


def _star(P: Plan, face):
    """Triangulate a face by a new centre node joined to every corner."""
    c = P.new_node()
    pa = None
    for h in face:
        x = P.origin[h]
        g, _ = P.chord(pa, c, h, x, _virtual(P, c, x))
        pa = g


def _triangulate_faces(P: Plan):
    faces, _ = P.faces()
    for f in faces:
        if len(f) == 3:
            continue
        nodes = [P.origin[h] for h in f]
        if len(set(nodes)) == len(nodes):
            _fan(P, f)
        else:
            _star(P, f)


def triangulate_planarization(D: CombinatorialDrawing) -> Triangulation:
    """Triangulate every face of D's planarization with zero-weight virtual edges.

    Components are first joined by virtual edges.  Faces whose boundary walk
    repeats a node get a new centre node, others a fan of chords.
    """
    P = D.plan()
    m_real = len(P.ends)
    if len(P.rot) <= 1:
        return Triangulation(P, D.n, m_real).refresh()
    _connect_components(P)
    _triangulate_faces(P)
    return Triangulation(P, D.n, m_real).refresh()


def refine_triangulation(T: Triangulation) -> Triangulation:
    """Cut a small ring around each graph vertex so that stars are pairwise disjoint."""
    P = T.plan.copy()
    n = T.n
    # subdivide every piece next to each graph-vertex endpoint
    for v in range(n):
        for h in list(P.rot[v]):
            P.subdivide(h)
    faces, _ = P.faces()
    for f in faces:
        L = len(f)
        if L <= 3:
            continue
        # cut off the corner of every graph vertex in the walk
        for i, h in enumerate(f):
            x = P.origin[h]
            if x >= n:
                continue
            h_in = f[i - 1]            # r_p -> x
            h_out = h                  # x -> r_n
            rp, rn = P.origin[h_in], P.dest(h_out)
            if rp == rn:
                continue
            nxt_h = f[(i + 1) % L]     # r_n -> ...
            P.chord(h_in, rp, nxt_h, rn, _virtual(P, rp, rn))
    _triangulate_faces(P)
    return Triangulation(P, n, T.m_real).refresh()


# -- separator -----------------------------------------------------------------


@dataclass
class CycleSeparator:
    nodes: list
    half_edges: list
    inside_faces: set
    inside_weight: float
    outside_weight: float
    cycle_weight: float

    @property
    def balance(self) -> float:
        return max(self.inside_weight, self.outside_weight)


def cycle_separator(T: Triangulation, weights: dict, root=None) -> CycleSeparator:
    """Best balanced fundamental cycle of a BFS tree.

    ``weights`` maps nodes to nonnegative weights summing to 1.  Every
    non-tree edge closes a cycle; the faces on one side of it form a subtree
    of the dual co-tree, which gives all side weights in one pass.
    """
    P = T.plan
    tot = sum(weights.values())
    if abs(tot - 1) > 1e-9:
        raise DomainError("separator weights must sum to 1")
    faces, face_of = T.faces, T.face_of
    nodes = sorted(P.rot)
    if root is None:
        root = max(nodes, key=lambda x: (weights.get(x, 0), -x))
    parent = {root: None}
    depth = {root: 0}
    tree = set()
    dq = deque([root])
    while dq:
        x = dq.popleft()
        for h in P.rot[x]:
            y = P.dest(h)
            if y not in parent:
                parent[y] = h
                depth[y] = depth[x] + 1
                tree.add(min(h, P.twin[h]))
                dq.append(y)
    # co-tree over faces
    adj = {f: [] for f in range(len(faces))}
    nontree = []
    for h in P.half_edges():
        k = min(h, P.twin[h])
        if h != k or k in tree:
            continue
        f1, f2 = face_of[h], face_of[P.twin[h]]
        adj[f1].append((f2, k))
        adj[f2].append((f1, k))
        nontree.append(k)
    # designated face per node
    fw = np.zeros(len(faces))
    home = {}
    for f, hs in enumerate(faces):
        for h in hs:
            x = P.origin[h]
            if x not in home:
                home[x] = f
                fw[f] += weights.get(x, 0.0)
    # DFS over co-tree from face 0 (iterative) with Euler intervals
    tin, tout, fparent = {}, {}, {0: None}
    order = []
    stack = [(0, iter(adj[0]))]
    clock = 0
    tin[0] = clock
    order.append(0)
    while stack:
        f, it = stack[-1]
        for g, k in it:
            if g not in tin:
                clock += 1
                tin[g] = clock
                fparent[g] = (f, k)
                order.append(g)
                stack.append((g, iter(adj[g])))
                break
        else:
            tout[f] = clock
            stack.pop()
    sub = dict(zip(order, fw[order]))
    for f in reversed(order):
        p = fparent[f]
        if p is not None:
            sub[p[0]] += sub[f]
    child_of = {}
    for f, p in fparent.items():
        if p is not None:
            child_of[p[1]] = f

    def path_nodes(a, b):
        pa, pb = [], []
        while depth[a] > depth[b]:
            pa.append(a)
            a = P.origin[parent[a]]
        while depth[b] > depth[a]:
            pb.append(b)
            b = P.origin[parent[b]]
        while a != b:
            pa.append(a)
            pb.append(b)
            a = P.origin[parent[a]]
            b = P.origin[parent[b]]
        return pa + [a] + pb[::-1]

    best = None
    for k in nontree:
        c = child_of.get(k)
        if c is None:
            continue
        a, b = P.origin[k], P.dest(k)
        cyc = path_nodes(a, b)
        wc = sum(weights.get(x, 0.0) for x in cyc)
        inside = sub[c] - sum(weights.get(x, 0.0) for x in cyc
                              if tin[c] <= tin[home[x]] <= tout[c])
        outside = 1.0 - inside - wc
        key = (max(inside, outside), len(cyc), k)
        if best is None or key < best[0]:
            best = (key, k, c, cyc, inside, outside, wc)
    if best is None:
        # a tree with no cycles at all (single face): everything is "outside"
        return CycleSeparator([root], [], set(), 0.0, 1.0 - weights.get(root, 0.0), weights.get(root, 0.0))
    _, k, c, cyc, inside, outside, wc = best
    inside_faces = {f for f in order if tin[c] <= tin[f] <= tout[c]}
    return CycleSeparator(cyc, [k], inside_faces, inside, outside, wc)


# -- regions --------------------------------------------------------------------


@dataclass
class RegionSubdivision:
    regions: list            # list of sets of triangle ids
    vertex_assignment: dict  # graph vertex -> region index
    epsilon: float
    boundary_incidences: int
    triangulation: Triangulation
    cap: int
    trivial: bool = False

    @property
    def region_count(self) -> int:
        return len(self.regions)

    def region_vertices(self):
        out = [[] for _ in self.regions]
        for v, r in self.vertex_assignment.items():
            out[r].append(v)
        return out

    def to_dict(self):
        return {"epsilon": self.epsilon, "region_count": self.region_count, "cap": self.cap,
                "boundary_incidences": self.boundary_incidences,
                "vertices": [sorted(x) for x in self.region_vertices()]}


def _stars(T: Triangulation):
    nf = T.node_faces()
    return {v: set(nf.get(v, [])) for v in range(T.n)}


def _face_adjacency(T: Triangulation):
    adj = {f: set() for f in range(len(T.faces))}
    P = T.plan
    for f, hs in enumerate(T.faces):
        for h in hs:
            g = T.face_of[P.twin[h]]
            if g != f:
                adj[f].add(g)
    return adj


def _components(faces_set, adj):
    left = set(faces_set)
    out = []
    while left:
        f = min(left)
        comp = {f}
        stack = [f]
        left.discard(f)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in left:
                    left.discard(y)
                    comp.add(y)
                    stack.append(y)
        out.append(comp)
    return out


def subdivide_regions(D: CombinatorialDrawing, epsilon: float) -> RegionSubdivision:
    """Split the plane into connected regions with at most ceil(eps^2 n) vertices each.

    Regions never cut through a vertex star.  For eps <= n^-1/2 the n stars
    plus their complement are returned directly.
    """
    if not 0 < epsilon:
        raise DomainError("epsilon must be positive")
    n = D.n
    T = refine_triangulation(triangulate_planarization(D))
    cap = max(1, math.ceil(epsilon * epsilon * n - 1e-12))
    all_faces = set(range(len(T.faces)))
    stars = _stars(T)
    if n == 0:
        return RegionSubdivision([all_faces], {}, epsilon, 0, T, cap)
    if epsilon <= n ** -0.5:
        regions = [set(stars[v]) for v in range(n)]
        rest = all_faces - set().union(*regions)
        if rest:
            regions.append(rest)
        assign = {v: v for v in range(n)}
        return RegionSubdivision(regions, assign, epsilon, _incidences(T, regions), T, cap, True)

    adj = _face_adjacency(T)
    owner = {}
    for v, st in stars.items():
        for f in st:
            owner[f] = v
    done = []
    todo = [all_faces]
    while todo:
        R = todo.pop()
        verts = sorted(v for v in range(n) if stars[v] and next(iter(stars[v])) in R)
        if len(verts) <= cap:
            done.append(R)
            continue
        w = {v: 1.0 / len(verts) for v in verts}
        sep = cycle_separator(T, w)
        A = R & sep.inside_faces
        B = R - A
        sa = sum(1 for v in verts if stars[v] <= A)
        sb = sum(1 for v in verts if stars[v] <= B)
        limit = 2 * len(verts) / 3
        for v in verts:
            st = stars[v]
            if st <= A or st <= B:
                continue
            # star cut by the cycle: move it whole, interior side on ties
            to_a = sa + 1 <= limit or sa <= sb
            if to_a:
                A |= st
                B -= st
                sa += 1
            else:
                B |= st
                A -= st
                sb += 1
        parts = [p for p in _components(A, adj) + _components(B, adj)]
        if max(sum(1 for v in verts if stars[v] <= p) for p in parts) >= len(verts):
            # no progress: peel one vertex star off
            v = verts[0]
            parts = [set(stars[v])] + _components(R - stars[v], adj)
        todo.extend(parts)
    regions = _merge_empty(done, stars, adj, n)
    assign = {}
    for i, R in enumerate(regions):
        for v in range(n):
            if stars[v] and next(iter(stars[v])) in R:
                assign[v] = i
    return RegionSubdivision(regions, assign, epsilon, _incidences(T, regions), T, cap)


def _merge_empty(regions, stars, adj, n):
    """Fold regions without vertices into a neighbouring region."""
    regions = [set(r) for r in regions]
    where = {}
    for i, R in enumerate(regions):
        for f in R:
            where[f] = i
    has_v = [any(stars[v] and next(iter(stars[v])) in R for v in range(n)) for R in regions]
    changed = True
    while changed:
        changed = False
        for i, R in enumerate(regions):
            if not R or has_v[i]:
                continue
            nb = sorted({where[g] for f in R for g in adj[f]} - {i})
            if not nb:
                continue
            j = nb[0]
            regions[j] |= R
            for f in R:
                where[f] = j
            regions[i] = set()
            changed = True
    out = [R for R in regions if R]
    return out


def _incidences(T: Triangulation, regions) -> int:
    """Real edge pieces whose two sides lie in different regions."""
    where = {}
    for i, R in enumerate(regions):
        for f in R:
            where[f] = i
    P = T.plan
    cnt = 0
    for h in P.half_edges():
        if h < P.twin[h] and P.edge_of[h] < T.m_real:
            if where.get(T.face_of[h]) != where.get(T.face_of[P.twin[h]]):
                cnt += 1
    return cnt


def check_regions(S: RegionSubdivision) -> dict:
    """Evaluate the invariants: no vertex on a boundary, size cap, cover, connectivity."""
    T = S.triangulation
    stars = _stars(T)
    where = {}
    cover_ok = True
    for i, R in enumerate(S.regions):
        for f in R:
            if f in where:
                cover_ok = False
            where[f] = i
    cover_ok = cover_ok and len(where) == len(T.faces)
    interior = all(len({where[f] for f in stars[v]}) == 1 for v in range(T.n) if stars[v])
    sizes = [len(x) for x in S.region_vertices()]
    adj = _face_adjacency(T)
    connected = all(len(_components(R, adj)) == 1 for R in S.regions)
    return {"interior": interior, "cap": max(sizes, default=0) <= S.cap, "cover": cover_ok,
            "connected": connected, "max_size": max(sizes, default=0)}


# -- drawing transfer -------------------------------------------------------------


@dataclass
class TransferTrace:
    d: Fraction
    d_exact: bool
    lonely_edges: list
    long_edges: list
    short_edges: list
    representatives: dict
    breakdown: dict

    def to_dict(self):
        return {"d": float(self.d), "d_exact": self.d_exact,
                "lonely_edges": [list(e) for e in self.lonely_edges],
                "long_edges": len(self.long_edges), "short_edges": len(self.short_edges),
                "representatives": {f"{u}-{v}": list(r) for (u, v), r in self.representatives.items()},
                "breakdown": self.breakdown}


def _loop_free(faces_walk, crossed):
    """Drop loops from a face walk so that every face is visited once."""
    fw, cr = list(faces_walk), list(crossed)
    i = 0
    while i < len(fw):
        last = max(j for j, f in enumerate(fw) if f == fw[i])
        if last > i:
            del fw[i + 1:last + 1]
            del cr[i:last]
        i += 1
    return fw, cr


def _follow_route(P: Plan, eid: int, u: int, v: int, rep_chain: list):
    """Face walk from u to v running alongside ``rep_chain`` on its face side."""
    faces, face_of = P.faces()
    comp = P.components()
    F0 = face_of[rep_chain[0]]
    Fk = face_of[rep_chain[-1]]
    # first extremal section: u to the face beside the start of the representative
    if P.rot[u] and comp[u] == comp[P.origin[rep_chain[0]]]:
        src = P.corners_at(u, face_of)
        _, fs, c1, _ = P.dual_search(faces, face_of, src, {F0})
        start = (u, src[fs])
    else:
        fs, c1 = F0, []
        start = (u, P.rot[u][0] if P.rot[u] else None)
    middle = [P.nxt(h) for h in rep_chain[:-1]]
    if P.rot[v] and comp[v] == comp[P.dest(rep_chain[-1])]:
        dst = P.corners_at(v, face_of)
        _, _, c2, fe = P.dual_search(faces, face_of, {Fk}, dst)
        end = (v, dst[fe])
    else:
        c2, fe = [], Fk
        end = (v, P.rot[v][0] if P.rot[v] else None)
    crossed = c1 + middle + c2
    walk = [fs]
    for h in crossed:
        walk.append(face_of[P.twin[h]])
    if not start[1] is None and face_of[start[1]] != walk[0]:
        raise DomainError("inconsistent start corner")
    walk, crossed = _loop_free(walk, crossed)
    # corners must sit in the first and last faces of the loop-free walk
    if start[1] is not None and face_of[start[1]] != walk[0]:
        start = (u, P.corners_at(u, face_of)[walk[0]])
    if end[1] is not None and face_of[end[1]] != walk[-1]:
        cs = P.corners_at(v, face_of)
        if walk[-1] in cs:
            end = (v, cs[walk[-1]])
        else:
            return None
    return start, crossed, end


def _oriented_chain(P: Plan, eid: int, first: int):
    ch = P.chain(eid)
    if P.origin[ch[0]] == first:
        return ch
    return [P.twin[h] for h in reversed(ch)]


def transfer_drawing(G1: WeightedGraph, D1: CombinatorialDrawing, G2: WeightedGraph,
                     clusters: VertexPartition, seed: int = 0, d=None, refine: bool = True,
                     tol: float = 1e-9, lonely_factor=1):
    """Draw G2 by following the curves of a drawing of a cut-close graph G1.

    Each long edge of G2 (between different clusters) whose cluster pair is
    not lonely picks a G1 edge of that pair with probability proportional to
    its weight and runs next to it; the ends are joined to u and v by
    cheapest dual paths.  Short edges are routed optimally.  The G1 curves
    are then erased, the drawing refined, and lonely edges inserted last.

    A class pair is lonely when its G1 mass is at most lonely_factor * d n^2.
    """
    if G1.n != G2.n or D1.graph is not G1 and D1.graph.weights != G1.weights:
        raise DomainError("G1, D1 and G2 must share the vertex set")
    n = G2.n
    try:
        clusters.validate(n)
    except StructureError as exc:
        raise DomainError(f"clusters do not match the graphs: {exc}") from exc
    lab = clusters.labels(n)
    d_exact = True
    if d is None:
        wit = cut_distance(G1, G2)
        d, d_exact = wit.value, wit.exact
    d = Fraction(d)
    # class-pair masses of G1
    k = clusters.k
    mass = {}
    cands = {}
    for (x, y), w in G1.weights.items():
        i, j = int(lab[x]), int(lab[y])
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        mass[key] = mass.get(key, Fraction(0)) + w
        if w > 0:
            cands.setdefault(key, []).append(((x, y), w))
    rng = np.random.default_rng(seed)
    lonely, long_e, short_e = [], [], []
    reps = {}
    for (u, v) in G2.edges():
        i, j = int(lab[u]), int(lab[v])
        if i == j:
            short_e.append((u, v))
            continue
        key = (min(i, j), max(i, j))
        if mass.get(key, 0) <= lonely_factor * d * n * n or key not in cands:
            lonely.append((u, v))
            continue
        long_e.append((u, v))
        cs = cands[key]
        p = np.array([float(w) for _, w in cs])
        reps[(u, v)] = cs[int(rng.choice(len(cs), p=p / p.sum()))][0]

    # working plan: G1 scaffold edges first, then the G2 edges
    P = D1.plan()
    m1 = len(P.ends)
    g2_id = {}
    for (u, v), w in G2.weights.items():
        g2_id[(u, v)] = P.add_edge_record(u, v, w)
    g1_id = {e: i for i, e in enumerate(G1.edges())}
    for (u, v) in long_e:
        x, y = reps[(u, v)]
        first = x if lab[x] == lab[u] else y
        ch = _oriented_chain(P, g1_id[(x, y)], first)
        r = _follow_route(P, g2_id[(u, v)], u, v, ch)
        if r is None:
            P.insert_optimally(g2_id[(u, v)])
        else:
            P.route_edge(g2_id[(u, v)], *r)
    for e in short_e:
        P.insert_optimally(g2_id[e])
    for eid in range(m1):
        if P.edge_alive[eid]:
            P.remove_edge(eid)
    P = _drop_prefix(P, m1)
    if refine:
        P = refine_plan(P, tol=tol)
    for e in lonely:
        P.insert_optimally(G2.edges().index(e))
    if refine and lonely:
        P = refine_plan(P, tol=tol)
    D2 = CombinatorialDrawing(G2, P, D1.log + ("transfer",))
    trace = TransferTrace(d, d_exact, lonely, long_e, short_e, reps, _breakdown(D2, lab, set(lonely)))
    return D2, trace


def _drop_prefix(P: Plan, m1: int) -> Plan:
    """Forget the first m1 (erased) edge records and shift ids down."""
    Q = P.copy()
    Q.edge_of = [e - m1 if e >= m1 else -1 for e in P.edge_of]
    Q.ends, Q.wt, Q.fw, Q.edge_alive = P.ends[m1:], P.wt[m1:], P.fw[m1:], P.edge_alive[m1:]
    return Q


def _breakdown(D: CombinatorialDrawing, lab, lonely: set) -> dict:
    out = {"good": 0, "bad": 0, "lonely": 0, "short": 0}
    for a, b in D.crossing_pairs():
        if a in lonely or b in lonely:
            out["lonely"] += 1
            continue
        cl = [int(lab[x]) for x in (*a, *b)]
        if cl[0] == cl[1] or cl[2] == cl[3]:
            out["short"] += 1
        elif len(set(cl)) == 4:
            out["good"] += 1
        else:
            out["bad"] += 1
    return out
