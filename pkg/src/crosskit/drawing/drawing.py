"""Combinatorial drawings: evaluation, realizability, optimal insertion, refinement."""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional

import networkx as nx

from ..errors import DomainError, StructureError
from ..graph import WeightedGraph
from ._plan import Plan


def _key(u, v):
    return (u, v) if u < v else (v, u)


class CombinatorialDrawing:
    """Immutable view of a planarized drawing of ``graph``.

    Edge ids follow ``graph.edges()`` order.  Edges not yet drawn (during
    incremental construction) are simply absent from the planarization.
    """

    __slots__ = ("graph", "_plan", "_eid", "log")

    def __init__(self, graph: WeightedGraph, plan: Plan, log=()):
        self.graph = graph
        self._plan = plan
        self._eid = {e: i for i, e in enumerate(graph.edges())}
        self.log = tuple(log)

    # basic queries
    @property
    def n(self) -> int:
        return self.graph.n

    def edge_id(self, u, v) -> int:
        try:
            return self._eid[_key(u, v)]
        except KeyError:
            raise DomainError(f"({u}, {v}) is not an edge of the graph") from None

    def edge(self, eid: int):
        return self._plan.ends[eid]

    def drawn_edges(self) -> list:
        return [self._plan.ends[e] for e in self._plan.drawn_edges()]

    def is_complete(self) -> bool:
        return all(self._plan.edge_alive)

    def crossing_pairs(self) -> list:
        """Crossing multiset as pairs of graph edges."""
        P = self._plan
        return sorted((P.ends[a], P.ends[b]) for a, b in P.crossing_pairs())

    def crossing_count(self) -> int:
        return len(self._plan.dummy_nodes())

    def crossings(self, u, v) -> list:
        """Edges crossed by (u, v), in order from its lower endpoint."""
        P = self._plan
        eid = self.edge_id(u, v)
        out = []
        for h in P.chain(eid)[:-1]:
            x = P.dest(h)
            r = P.rot[x]
            other = [P.edge_of[g] for g in r if P.edge_of[g] != eid][0]
            out.append(P.ends[other])
        return out

    def rotations(self) -> dict:
        """Clockwise neighbour order of every planarization node."""
        P = self._plan
        return {x: [P.dest(h) for h in r] for x, r in P.rot.items()}

    def is_simple(self) -> bool:
        pairs = self.crossing_pairs()
        if len(set(pairs)) != len(pairs):
            return False
        return all(not (set(a) & set(b)) for a, b in pairs)

    def validate(self) -> None:
        self._plan.validate()
        if len(self._plan.ends) != self.graph.m:
            raise StructureError("edge table does not match the graph")

    def plan(self) -> Plan:
        """A private mutable copy of the planarization."""
        return self._plan.copy()

    def with_log(self, entry) -> "CombinatorialDrawing":
        return CombinatorialDrawing(self.graph, self._plan, self.log + (entry,))

    def to_dict(self) -> dict:
        P = self._plan
        return {
            "n": self.n,
            "edges": [[u, v, str(w)] for (u, v), w in self.graph.weights.items()],
            "drawn": [list(P.ends[e]) for e in P.drawn_edges()],
            "rotations": {str(x): [[P.dest(h), P.edge_of[h]] for h in r] for x, r in sorted(P.rot.items())},
            "crossings": [[list(a), list(b)] for a, b in self.crossing_pairs()],
            "crossing_weight": str(crossing_weight(self)),
            "log": [str(x) for x in self.log],
        }

    def __repr__(self):
        return f"CombinatorialDrawing(n={self.n}, drawn={len(self._plan.drawn_edges())}, crossings={self.crossing_count()})"


def crossing_weight(D, graph: Optional[WeightedGraph] = None) -> Fraction:
    """Sum of w(e1) w(e2) over the crossing multiset.

    With ``graph`` given, the same drawing is evaluated under that graph's
    weights (edges missing from ``graph`` count 0).
    """
    from .geometry import GeometricDrawing, geometric_crossing_weight
    if isinstance(D, GeometricDrawing):
        return geometric_crossing_weight(D, graph)
    P = D._plan
    if graph is None:
        return P.crossing_weight()
    if graph.n != D.n:
        raise DomainError("graph and drawing have different vertex sets")
    total = Fraction(0)
    for a, b in P.crossing_pairs():
        total += graph.weight(*P.ends[a]) * graph.weight(*P.ends[b])
    return total


def empty_plan(G: WeightedGraph) -> Plan:
    P = Plan(G.n)
    for (u, v), w in G.weights.items():
        P.add_edge_record(u, v, w)
    return P


def plan_from_embedding(G: WeightedGraph, emb: nx.PlanarEmbedding, seg_edge: dict) -> Plan:
    """Turn a networkx embedding of a planarization into a Plan.

    ``seg_edge`` maps frozenset({a, b}) of every planarization edge to the
    graph edge id it belongs to.
    """
    table = [(u, v, w) for (u, v), w in G.weights.items()]
    segments = []
    index = {}
    for key, eid in seg_edge.items():
        a, b = sorted(key)
        index[key] = len(segments)
        segments.append((a, b, eid))
    rotation = {}
    for x in emb.nodes:
        nbrs = list(emb.neighbors_cw_order(x)) if emb.degree(x) else []
        rotation[x] = [index[frozenset((x, y))] for y in nbrs]
    for v in range(G.n):
        rotation.setdefault(v, [])
    return Plan.from_segments(G.n, table, segments, rotation)


def planar_drawing(G: WeightedGraph, edges: Optional[Iterable] = None) -> Optional[CombinatorialDrawing]:
    """Crossing-free drawing of the given edge subset (default all), or None if non-planar."""
    eids = {e: i for i, e in enumerate(G.edges())}
    sel = list(G.edges()) if edges is None else [_key(*e) for e in edges]
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(sel)
    ok, emb = nx.check_planarity(H)
    if not ok:
        return None
    P = plan_from_embedding(G, emb, {frozenset(e): eids[e] for e in sel})
    return CombinatorialDrawing(G, P, ("planar",))


def realize(G: WeightedGraph, C: Iterable, max_orders: int = 200000) -> Optional[CombinatorialDrawing]:
    """Find a drawing whose crossings are a subset of the pair set C, or None.

    Tries every combination of crossing orders along the edges; each
    candidate planarization goes through a planarity test.  Touchings in the
    returned embedding are split, so fewer crossings than C may remain.
    """
    eids = {e: i for i, e in enumerate(G.edges())}
    pairs = []
    seen = set()
    for a, b in C:
        a, b = _key(*a), _key(*b)
        if a not in eids or b not in eids:
            raise DomainError(f"pair ({a}, {b}) uses a non-edge")
        if set(a) & set(b):
            raise DomainError(f"pair ({a}, {b}) is not independent")
        k = (a, b) if a < b else (b, a)
        if k in seen:
            raise DomainError(f"pair {k} repeated")
        seen.add(k)
        pairs.append(k)
    n = G.n
    through = {e: [] for e in eids}
    for i, (a, b) in enumerate(pairs):
        through[a].append(n + i)
        through[b].append(n + i)
    multi = [e for e in eids if len(through[e]) > 1]
    choices = [list(itertools.permutations(through[e])) for e in multi]
    tried = 0
    for combo in itertools.product(*choices):
        tried += 1
        if tried > max_orders:
            break
        order = dict(zip(multi, combo))
        H = nx.Graph()
        H.add_nodes_from(range(n + len(pairs)))
        seg_edge = {}
        for e, eid in eids.items():
            path = [e[0], *order.get(e, through[e]), e[1]]
            for a, b in zip(path, path[1:]):
                H.add_edge(a, b)
                seg_edge[frozenset((a, b))] = eid
        ok, emb = nx.check_planarity(H)
        if ok:
            P = plan_from_embedding(G, emb, seg_edge)
            P.dissolve_touchings()
            return CombinatorialDrawing(G, P, ("realize",))
    return None


def insert_edge_optimally(D: CombinatorialDrawing, e, return_cost: bool = False):
    """Route the missing edge ``e`` along a cheapest path in the dual of D."""
    u, v = e
    if not (0 <= u < D.n and 0 <= v < D.n):
        raise DomainError(f"endpoint of {e} not in the drawing")
    eid = D.edge_id(u, v)
    P = D.plan()
    if P.edge_alive[eid]:
        raise DomainError(f"edge {e} is already drawn")
    cost = P.insert_optimally(eid)
    out = CombinatorialDrawing(D.graph, P, D.log + (f"insert {e}",))
    if return_cost:
        return out, cost * P.fw[eid]
    return out


def edge_cost(P: Plan, eid: int) -> float:
    """Float sum of crossing weights on edge eid (weight of e included)."""
    s = 0.0
    for h in P.chain(eid)[:-1]:
        x = P.dest(h)
        for g in P.rot[x]:
            if P.edge_of[g] != eid:
                s += P.fw[P.edge_of[g]]
                break
    return s * P.fw[eid]


def reroute(P: Plan, eid: int, tol: float = 1e-9) -> Optional[Plan]:
    """Return an improved copy with ``eid`` redrawn, or None if no strict gain."""
    old = edge_cost(P, eid)
    if old <= tol:
        return None
    Q = P.copy()
    Q.remove_edge(eid)
    u, v = Q.ends[eid]
    cost, sc, crossed, ec = Q.dual_route(u, v)
    if old - cost * Q.fw[eid] > tol:
        Q.route_edge(eid, sc, crossed, ec)
        return Q
    return None


def refine_plan(P: Plan, tol: float = 1e-9, max_sweeps: int = 50, trace=None) -> Plan:
    for _ in range(max_sweeps):
        improved = False
        for eid in P.drawn_edges():
            Q = reroute(P, eid, tol)
            if Q is not None:
                if trace is not None:
                    trace.append((eid, P.crossing_weight_float(), Q.crossing_weight_float()))
                P = Q
                improved = True
        if not improved:
            break
    return P


def refine_locally_optimal(D: CombinatorialDrawing, tol: float = 1e-9, max_sweeps: int = 50,
                           trace: Optional[list] = None) -> CombinatorialDrawing:
    """Redraw single edges optimally until no edge gains more than ``tol``.

    ``trace`` (a list) receives (edge id, weight before, weight after) per
    accepted step.
    """
    P = refine_plan(D._plan, tol, max_sweeps, trace)
    if P is D._plan:
        return D
    return CombinatorialDrawing(D.graph, P, D.log + ("refine",))


def is_locally_optimal(D: CombinatorialDrawing, tol: float = 1e-9) -> bool:
    return all(reroute(D._plan, e, tol) is None for e in D._plan.drawn_edges())


def drawing_by_insertion(G: WeightedGraph, base: CombinatorialDrawing, order: Iterable) -> CombinatorialDrawing:
    """Insert the listed edges one by one into ``base``."""
    P = base.plan()
    for e in order:
        P.insert_optimally(base.edge_id(*e))
    return CombinatorialDrawing(G, P, base.log + ("insert-all",))


def edgeless_drawing(G: WeightedGraph) -> CombinatorialDrawing:
    return CombinatorialDrawing(G, empty_plan(G), ("empty",))


def drawing_from_plan(G: WeightedGraph, P: Plan, log=()) -> CombinatorialDrawing:
    return CombinatorialDrawing(G, P, log)


def lift_drawing(D: CombinatorialDrawing, G: WeightedGraph) -> CombinatorialDrawing:
    """Re-index D as a (partial) drawing of the supergraph G on the same vertices.

    Edges of G missing from D.graph start undrawn; weights are taken from G.
    """
    if G.n != D.n:
        raise DomainError("supergraph must have the same vertex set")
    new_id = {e: i for i, e in enumerate(G.edges())}
    old = D._plan
    P = old.copy()
    remap = []
    for e in old.ends:
        if e not in new_id:
            raise DomainError(f"edge {e} is not in the supergraph")
        remap.append(new_id[e])
    P.edge_of = [remap[e] for e in old.edge_of]
    P.ends, P.wt, P.fw, P.edge_alive = [], [], [], []
    for (u, v), w in G.weights.items():
        P.add_edge_record(u, v, w)
    for e, alive in enumerate(old.edge_alive):
        P.edge_alive[remap[e]] = alive
    return CombinatorialDrawing(G, P, D.log + ("lift",))


def complete_drawing(D: CombinatorialDrawing, order=None) -> CombinatorialDrawing:
    """Insert every undrawn edge optimally (in ``order`` or id order)."""
    P = D.plan()
    missing = [e for e, a in enumerate(P.edge_alive) if not a]
    if order is not None:
        missing = [D.edge_id(*e) for e in order if not P.edge_alive[D.edge_id(*e)]]
    for e in missing:
        P.insert_optimally(e)
    return CombinatorialDrawing(D.graph, P, D.log + ("complete",))


def relabel_drawing(D: CombinatorialDrawing, perm, G: WeightedGraph) -> CombinatorialDrawing:
    """Move D onto the vertex set of G: old vertex v becomes perm[v].

    G may have more vertices (they start isolated) and more edges (they
    start undrawn); every drawn edge of D must map to an edge of G, whose
    weight it then carries.
    """
    n0, n1 = D.n, G.n
    perm = [int(x) for x in perm]
    if len(perm) != n0 or len(set(perm)) != n0 or any(not 0 <= x < n1 for x in perm):
        raise DomainError("perm must map the vertices injectively into G")
    old = D._plan
    shift = n1 - n0

    def node(x):
        return perm[x] if x < n0 else x + shift

    new_id = {e: i for i, e in enumerate(G.edges())}
    remap = []
    for eid, (u, v) in enumerate(old.ends):
        a, b = sorted((perm[u], perm[v]))
        if old.edge_alive[eid] and (a, b) not in new_id:
            raise DomainError(f"edge {(a, b)} is not in the target graph")
        remap.append(new_id.get((a, b), -1))
    P = Plan(n1)
    P.rot = {node(x): r[:] for x, r in old.rot.items()}
    for v in range(n1):
        P.rot.setdefault(v, [])
    P.origin = [node(x) if x >= 0 else -1 for x in old.origin]
    P.twin = old.twin[:]
    P.alive = old.alive[:]
    P.edge_of = [remap[e] if e >= 0 else -1 for e in old.edge_of]
    P.next_node = max(old.next_node + shift, n1)
    for (u, v), w in G.weights.items():
        P.add_edge_record(u, v, w)
    for eid, alive in enumerate(old.edge_alive):
        if alive and remap[eid] >= 0:
            P.edge_alive[remap[eid]] = True
    return CombinatorialDrawing(G, P, D.log + ("relabel",))
