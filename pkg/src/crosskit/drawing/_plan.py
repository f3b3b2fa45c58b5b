"""Mutable half-edge planarization used internally by all drawing operations.

Nodes ``0..n-1`` are graph vertices, larger ids are crossing dummies of
degree 4.  ``rot[x]`` lists the half-edges leaving ``x`` in clockwise order.
Faces are traced with ``nxt(h) = rot[dest][pos(twin h) - 1]`` which matches
networkx's face traversal of a PlanarEmbedding.

A *corner* is given by an outgoing half-edge ``p``; inserting "at p" puts the
new half-edge right after ``p`` in the rotation, i.e. into the face that
contains ``p``.  Origins never change, so corners survive subdivisions.
"""
from __future__ import annotations

import heapq
from fractions import Fraction

from ..errors import DomainError, StructureError


class Plan:
    __slots__ = ("n", "origin", "twin", "edge_of", "alive", "rot", "next_node",
                 "ends", "wt", "fw", "edge_alive")

    def __init__(self, n: int):
        self.n = n
        self.origin: list[int] = []
        self.twin: list[int] = []
        self.edge_of: list[int] = []
        self.alive: list[bool] = []
        self.rot: dict[int, list[int]] = {v: [] for v in range(n)}
        self.next_node = n
        self.ends: list[tuple[int, int]] = []
        self.wt: list[Fraction] = []
        self.fw: list[float] = []
        self.edge_alive: list[bool] = []

    # -- construction ----------------------------------------------------
    def add_edge_record(self, u: int, v: int, w) -> int:
        self.ends.append((u, v) if u < v else (v, u))
        w = Fraction(w)
        self.wt.append(w)
        self.fw.append(float(w))
        self.edge_alive.append(False)
        return len(self.ends) - 1

    def new_node(self) -> int:
        x = self.next_node
        self.next_node += 1
        self.rot[x] = []
        return x

    def _new_half(self, a: int, eid: int) -> int:
        self.origin.append(a)
        self.twin.append(-1)
        self.edge_of.append(eid)
        self.alive.append(True)
        return len(self.origin) - 1

    def new_pair(self, a: int, b: int, eid: int) -> tuple[int, int]:
        h = self._new_half(a, eid)
        t = self._new_half(b, eid)
        self.twin[h] = t
        self.twin[t] = h
        return h, t

    @classmethod
    def from_segments(cls, n, edge_table, segments, rotation, extra_nodes=()):
        """Build from planarization segments.

        ``edge_table``: list of (u, v, w) giving edge ids by position.
        ``segments``: list of (a, b, eid).  ``rotation[x]``: clockwise list of
        segment indices at node x.  Nodes >= n must be listed in
        ``extra_nodes`` or appear in ``rotation``.
        """
        P = cls(n)
        for u, v, w in edge_table:
            P.add_edge_record(u, v, w)
        for a, b, eid in segments:
            P.new_pair(a, b, eid)
            P.edge_alive[eid] = True
        nodes = set(rotation) | set(extra_nodes)
        for x in sorted(nodes):
            if x >= n:
                P.rot[x] = []
                P.next_node = max(P.next_node, x + 1)
        for x, segs in rotation.items():
            hs = []
            for s in segs:
                a, b, _ = segments[s]
                hs.append(2 * s if a == x else 2 * s + 1)
            P.rot[x] = hs
        return P

    def copy(self) -> "Plan":
        Q = Plan.__new__(Plan)
        Q.n = self.n
        Q.origin = self.origin[:]
        Q.twin = self.twin[:]
        Q.edge_of = self.edge_of[:]
        Q.alive = self.alive[:]
        Q.rot = {x: r[:] for x, r in self.rot.items()}
        Q.next_node = self.next_node
        Q.ends = self.ends[:]
        Q.wt = self.wt[:]
        Q.fw = self.fw[:]
        Q.edge_alive = self.edge_alive[:]
        return Q

    # -- navigation ------------------------------------------------------
    def dest(self, h: int) -> int:
        return self.origin[self.twin[h]]

    def nxt(self, h: int) -> int:
        t = self.twin[h]
        r = self.rot[self.origin[t]]
        return r[r.index(t) - 1]

    def is_dummy(self, x: int) -> bool:
        return x >= self.n

    def half_edges(self):
        return [h for h, a in enumerate(self.alive) if a]

    def faces(self):
        """Return (faces, face_of) with faces as lists of half-edges."""
        face_of = {}
        faces = []
        for h0 in self.half_edges():
            if h0 in face_of:
                continue
            fid = len(faces)
            f = []
            h = h0
            while h not in face_of:
                face_of[h] = fid
                f.append(h)
                h = self.nxt(h)
            faces.append(f)
        return faces, face_of

    def components(self) -> dict[int, int]:
        parent = {x: x for x in self.rot}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for h in self.half_edges():
            a, b = find(self.origin[h]), find(self.dest(h))
            if a != b:
                parent[max(a, b)] = min(a, b)
        return {x: find(x) for x in self.rot}

    def chain(self, eid: int) -> list[int]:
        """Half-edges of edge ``eid`` in order from its lower endpoint."""
        u, v = self.ends[eid]
        start = [h for h in self.rot[u] if self.edge_of[h] == eid]
        if len(start) != 1:
            raise StructureError(f"edge {eid} leaves its endpoint {len(start)} times")
        out = [start[0]]
        x = self.dest(start[0])
        guard = 0
        while x != v:
            r = self.rot[x]
            if len(r) != 4:
                raise StructureError(f"node {x} on edge {eid} has degree {len(r)}")
            h = r[(r.index(self.twin[out[-1]]) + 2) % 4]
            if self.edge_of[h] != eid:
                raise StructureError(f"edge {eid} does not pass straight through node {x}")
            out.append(h)
            x = self.dest(h)
            guard += 1
            if guard > len(self.origin):
                raise StructureError(f"edge {eid} chain does not terminate")
        return out

    def drawn_edges(self) -> list[int]:
        return [e for e, a in enumerate(self.edge_alive) if a]

    def dummy_nodes(self) -> list[int]:
        return [x for x in self.rot if x >= self.n]

    def crossing_pairs(self) -> list[tuple[int, int]]:
        """One (e, f) per dummy node, e < f (equal for a self-crossing)."""
        out = []
        for x in self.dummy_nodes():
            r = self.rot[x]
            a, b = self.edge_of[r[0]], self.edge_of[r[1]]
            out.append((a, b) if a <= b else (b, a))
        return out

    def crossing_weight(self) -> Fraction:
        s = Fraction(0)
        for a, b in self.crossing_pairs():
            s += self.wt[a] * self.wt[b]
        return s

    def crossing_weight_float(self) -> float:
        return sum(self.fw[a] * self.fw[b] for a, b in self.crossing_pairs())

    # -- local surgery ---------------------------------------------------
    def insert_after(self, node: int, ref, h: int) -> None:
        r = self.rot[node]
        if ref is None:
            if r:
                raise StructureError("corner reference required at a non-isolated node")
            r.append(h)
        else:
            r.insert(r.index(ref) + 1, h)

    def subdivide(self, h: int):
        """Put a new node x on the segment of h (a -> b).

        Returns (x, h2, t2) where afterwards h: a->x, h2: x->b, t: b->x and
        t2: x->a.  The face of h continues through h2 and the face of t
        through t2, so corners at x are ``h2`` (h's side) and ``t2``.
        """
        t = self.twin[h]
        a, b = self.origin[h], self.origin[t]
        eid = self.edge_of[h]
        x = self.new_node()
        h2 = self._new_half(x, eid)
        t2 = self._new_half(x, eid)
        self.twin[h] = t2
        self.twin[t2] = h
        self.twin[t] = h2
        self.twin[h2] = t
        self.rot[x] = [t2, h2]
        return x, h2, t2

    def chord(self, pa: int | None, a: int, pb: int | None, b: int, eid: int):
        """Connect corner (a, pa) to corner (b, pb) with a new segment."""
        g, g2 = self.new_pair(a, b, eid)
        self.insert_after(a, pa, g)
        self.insert_after(b, pb, g2)
        return g, g2

    def route_edge(self, eid: int, start_corner, crossed: list[int], end_corner) -> None:
        """Draw ``eid`` from corner (u, p) across the given half-edges to corner (v, q).

        ``crossed[i]`` must lie in the current face and its twin in the next.
        """
        u, v = self.ends[eid]
        cur_node, cur = start_corner
        for s in crossed:
            x, h2, t2 = self.subdivide(s)
            self.chord(cur, cur_node, h2, x, eid)
            cur_node, cur = x, t2
        self.chord(cur, cur_node, end_corner[1], end_corner[0], eid)
        self.edge_alive[eid] = True

    def _merge_through(self, x: int, o1: int, o2: int) -> None:
        """Dissolve the pass of one edge through node x given its two outgoing half-edges."""
        a1, a2 = self.twin[o1], self.twin[o2]
        self.twin[a1] = a2
        self.twin[a2] = a1
        self.alive[o1] = self.alive[o2] = False

    def remove_edge(self, eid: int) -> None:
        """Erase the curve of ``eid`` and dissolve the crossings it leaves."""
        hs = self.chain(eid)
        touched = []
        for h in hs:
            t = self.twin[h]
            for g in (h, t):
                x = self.origin[g]
                self.rot[x].remove(g)
                self.alive[g] = False
                if x >= self.n:
                    touched.append(x)
        for x in dict.fromkeys(touched):
            r = self.rot[x]
            if len(r) == 0:
                del self.rot[x]
            elif len(r) == 2:
                self._merge_through(x, r[0], r[1])
                del self.rot[x]
            else:
                raise StructureError(f"dummy {x} left with degree {len(r)}")
        self.edge_alive[eid] = False

    def dissolve_touchings(self) -> int:
        """Split every dummy whose rotation does not alternate between its two edges."""
        count = 0
        for x in list(self.dummy_nodes()):
            r = self.rot[x]
            es = [self.edge_of[h] for h in r]
            if es[0] == es[2] and es[1] == es[3]:
                continue
            # non-alternating: pair up rotation neighbours with equal edges
            if es[0] == es[1]:
                pairs = ((r[0], r[1]), (r[2], r[3]))
            else:
                pairs = ((r[1], r[2]), (r[3], r[0]))
            for o1, o2 in pairs:
                self._merge_through(x, o1, o2)
            del self.rot[x]
            count += 1
        return count

    def remove_self_crossings(self) -> int:
        """Dissolve dummies where an edge crosses itself (cannot arise here, kept for safety)."""
        return 0

    # -- validation ------------------------------------------------------
    def validate(self) -> None:
        for x, r in self.rot.items():
            for h in r:
                if not self.alive[h] or self.origin[h] != x:
                    raise StructureError(f"rotation at {x} lists a foreign half-edge {h}")
            if len(set(r)) != len(r):
                raise StructureError(f"rotation at {x} repeats a half-edge")
            if x >= self.n:
                if len(r) != 4:
                    raise StructureError(f"dummy {x} has degree {len(r)}")
                es = [self.edge_of[h] for h in r]
                if not (es[0] == es[2] and es[1] == es[3] and es[0] != es[1]):
                    raise StructureError(f"dummy {x} is not a proper crossing")
        listed = {h for r in self.rot.values() for h in r}
        for h in self.half_edges():
            if h not in listed:
                raise StructureError(f"half-edge {h} missing from its rotation")
            t = self.twin[h]
            if not self.alive[t] or self.twin[t] != h or t == h:
                raise StructureError(f"twin pointers broken at {h}")
            if self.edge_of[t] != self.edge_of[h]:
                raise StructureError(f"twins of {h} belong to different edges")
        for e in self.drawn_edges():
            self.chain(e)
        # Euler per component: V - E + F = 2
        comp = self.components()
        faces, _ = self.faces()
        V, E, F = {}, {}, {}
        for x, c in comp.items():
            V[c] = V.get(c, 0) + 1
        for h in self.half_edges():
            c = comp[self.origin[h]]
            E[c] = E.get(c, 0) + 1
        for f in faces:
            c = comp[self.origin[f[0]]]
            F[c] = F.get(c, 0) + 1
        for c in V:
            e = E.get(c, 0) // 2
            f = F.get(c, 0) if e else 1
            if V[c] - e + f != 2:
                raise StructureError(f"Euler check fails on a component: V={V[c]} E={e} F={f}")

    # -- optimal routing -------------------------------------------------
    def corners_at(self, x: int, faces_of) -> dict[int, int]:
        """Map face id -> a corner half-edge at x (first in rotation order)."""
        out = {}
        for h in self.rot[x]:
            out.setdefault(faces_of[h], h)
        return out

    def dual_search(self, faces, face_of, sources, targets, cost_of=None):
        """Dijkstra over faces from ``sources`` to any face in ``targets``.

        Returns (cost, start face, crossed half-edges, end face).  Ties go to
        the fewest arcs, then to the smaller face id.
        """
        if cost_of is None:
            cost_of = self.fw
        targets = set(targets)
        best = {}
        parent = {}
        heap = []
        for f in sorted(set(sources)):
            best[f] = (0.0, 0)
            heap.append((0.0, 0, f))
        heapq.heapify(heap)
        done = set()
        hit = None
        while heap:
            c, k, f = heapq.heappop(heap)
            if f in done:
                continue
            done.add(f)
            if f in targets:
                hit = f
                break
            for h in faces[f]:
                g = face_of[self.twin[h]]
                if g == f or g in done:
                    continue
                nc = c + cost_of[self.edge_of[h]]
                old = best.get(g)
                if old is None or nc < old[0] - 1e-12 or (abs(nc - old[0]) <= 1e-12 and k + 1 < old[1]):
                    best[g] = (nc, k + 1)
                    parent[g] = (f, h)
                    heapq.heappush(heap, (nc, k + 1, g))
        if hit is None:
            raise DomainError("target faces unreachable in the dual")
        crossed = []
        f = hit
        while f in parent:
            pf, h = parent[f]
            crossed.append(h)
            f = pf
        crossed.reverse()
        return best[hit][0], f, crossed, hit

    def dual_route(self, u: int, v: int, cost_of=None):
        """Cheapest face path from a face at u to a face at v.

        Returns (cost, start_corner, crossed, end_corner) with corners as
        (node, half-edge or None).
        """
        if not self.rot[u] or not self.rot[v]:
            return 0.0, (u, self.rot[u][0] if self.rot[u] else None), [], (v, self.rot[v][0] if self.rot[v] else None)
        comp = self.components()
        if comp[u] != comp[v]:
            return 0.0, (u, self.rot[u][0]), [], (v, self.rot[v][0])
        faces, face_of = self.faces()
        src = self.corners_at(u, face_of)
        dst = self.corners_at(v, face_of)
        cost, f0, crossed, f1 = self.dual_search(faces, face_of, src, dst, cost_of)
        return cost, (u, src[f0]), crossed, (v, dst[f1])

    def insert_optimally(self, eid: int, cost_of=None) -> float:
        u, v = self.ends[eid]
        cost, sc, crossed, ec = self.dual_route(u, v, cost_of=cost_of)
        self.route_edge(eid, sc, crossed, ec)
        return cost
