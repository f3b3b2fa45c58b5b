"""Exact weighted crossing numbers of small graphs and a heuristic upper bound.

The exact solver is a branch and bound over sets of independent edge pairs.
A set is tested by :func:`realize`; since realize may drop touchings, the
cheapest realizable set found by an exhaustive search below the incumbent is
the optimum.  Counting arguments give necessary conditions used for pruning:
every vertex set X must contain at least m_X - 3|X| + 6 crossing pairs
(m_X - 2|X| + 4 if G[X] is bipartite).
"""
from __future__ import annotations

import math
import time
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Union

import networkx as nx
import numpy as np

from .drawing.drawing import (CombinatorialDrawing, complete_drawing, crossing_weight,
                              lift_drawing, planar_drawing, realize, refine_plan)
from .drawing.geometry import GeometricDrawing, straight_line_crossings
from .errors import DomainError
from .graph import QuotientGraph, WeightedGraph, crossing_lower_bound


@dataclass
class CrSolution:
    value: Fraction
    drawing: Union[CombinatorialDrawing, GeometricDrawing]
    exact: bool
    nodes_explored: int = 0
    budget: dict = field(default_factory=dict)
    method: str = ""

    def to_dict(self):
        return {"value": float(self.value), "value_exact": str(self.value), "exact": self.exact,
                "nodes_explored": self.nodes_explored, "budget": self.budget, "method": self.method}


def _lcm(xs):
    L = 1
    for x in xs:
        L = L * x // math.gcd(L, x)
    return L


def _is_bipartite(edges, X):
    H = nx.Graph()
    H.add_nodes_from(X)
    H.add_edges_from(edges)
    return nx.is_bipartite(H)


def _subset_constraints(G: WeightedGraph, pairs, max_full: int = 12):
    """(need, member pair indices) for vertex sets that force crossings."""
    n = G.n
    edges = G.edges()
    active = sorted({v for e in edges for v in e})
    if len(active) <= max_full:
        sets = [X for k in range(5, len(active) + 1) for X in combinations(active, k)]
    else:
        sets = [tuple(active)] + [tuple(v for v in active if v != x) for x in active]
    cons = []
    for X in sets:
        Xs = set(X)
        inside = [e for e in edges if e[0] in Xs and e[1] in Xs]
        mX, k = len(inside), len(X)
        need = mX - 3 * k + 6
        if k >= 3 and _is_bipartite(inside, X):
            need = max(need, mX - 2 * k + 4)
        if need <= 0:
            continue
        members = [i for i, (a, b) in enumerate(pairs) if set(a) <= Xs and set(b) <= Xs]
        cons.append((need, members))
    # keep only the strongest few hundred constraints
    cons.sort(key=lambda c: (-c[0], len(c[1])))
    return cons[:400]


def crossing_number_exact(G: WeightedGraph, max_nodes: int = 2_000_000, time_limit: float = 600.0,
                          restarts: int = 10, seed: int = 0, upper: Optional["CrSolution"] = None,
                          max_orders: int = 50_000, use_incumbent: bool = True) -> CrSolution:
    """Weighted crossing number by exhaustive search over crossing sets.

    ``max_nodes`` bounds the search tree, ``time_limit`` (seconds) the wall
    clock.  When either runs out the best drawing found is returned with
    ``exact=False``.  With ``use_incumbent=False`` the search starts without
    a heuristic upper bound, which is slower but independent of it.
    """
    if max_nodes <= 0 or time_limit <= 0:
        raise DomainError("budget must be positive")
    budget = {"max_nodes": max_nodes, "time_limit": time_limit}
    H = G.without_zero_edges()
    base = planar_drawing(H)
    if base is not None:
        D = complete_drawing(lift_drawing(base, G))
        return CrSolution(crossing_weight(D), D, True, 0, budget, "planar")

    edges = H.edges()
    L = _lcm([w.denominator for w in H.weights.values()])
    iw = {e: int(w * L) for e, w in H.weights.items()}
    pairs = [(a, b) for a, b in combinations(edges, 2) if not (set(a) & set(b))]
    pairs.sort(key=lambda p: (iw[p[0]] * iw[p[1]], p))
    cost = [iw[a] * iw[b] for a, b in pairs]
    cons = _subset_constraints(H, pairs)
    pos_in = [dict() for _ in cons]
    prefix = []
    for ci, (need, mem) in enumerate(cons):
        acc = [0]
        for i in mem:
            acc.append(acc[-1] + cost[i])
        prefix.append(acc)
    member_of = [[] for _ in pairs]
    for ci, (need, mem) in enumerate(cons):
        for i in mem:
            member_of[i].append(ci)
    e_index = {e: i for i, e in enumerate(edges)}
    cap = len(edges) - 1

    best_draw, best = None, 0
    if use_incumbent:
        if upper is None:
            upper = crossing_number_upper(H, restarts=restarts, seed=seed)
        best_draw = upper.drawing
        best = int(upper.value * L * L)

    def lower_extra(i, counts):
        lb = 0
        for ci, (need, mem) in enumerate(cons):
            d = need - counts[ci]
            if d <= 0:
                continue
            acc = prefix[ci]
            s = bisect_left(mem, i)
            if s + d > len(mem):
                return None
            lb = max(lb, acc[s + d] - acc[s])
        return lb

    counts = [0] * len(cons)
    per_edge = [0] * len(edges)
    chosen = []
    nodes = 0
    t0 = time.monotonic()
    state = {"stopped": False, "truncated": False}

    def dfs(i, c):
        nonlocal nodes, best, best_draw
        if state["stopped"]:
            return
        nodes += 1
        if nodes > max_nodes or (nodes % 256 == 0 and time.monotonic() - t0 > time_limit):
            state["stopped"] = True
            return
        extra = lower_extra(i, counts)
        if extra is None or c + extra >= best:
            return
        if extra == 0:
            D = realize(H, [pairs[j] for j in chosen], max_orders=max_orders)
            if D is not None:
                w = int(crossing_weight(D) * L * L)
                if w < best:
                    best, best_draw = w, D
                return
            if _orders(chosen, pairs) > max_orders:
                state["truncated"] = True
        for j in range(i, len(pairs)):
            if c + cost[j] >= best:
                break
            a, b = pairs[j]
            ia, ib = e_index[a], e_index[b]
            if per_edge[ia] >= cap or per_edge[ib] >= cap:
                continue
            chosen.append(j)
            per_edge[ia] += 1
            per_edge[ib] += 1
            for ci in member_of[j]:
                counts[ci] += 1
            dfs(j + 1, c + cost[j])
            for ci in member_of[j]:
                counts[ci] -= 1
            per_edge[ia] -= 1
            per_edge[ib] -= 1
            chosen.pop()
            if state["stopped"]:
                return

    if use_incumbent:
        dfs(0, 0)
    else:
        # iterative deepening on the cost ceiling, doubling the slack each round
        root = lower_extra(0, counts) or 0
        step = max(cost[0], 1)
        while best_draw is None and not state["stopped"]:
            best = root + step
            dfs(0, 0)
            step *= 2
    if best_draw is None:
        best_draw = crossing_number_upper(H, restarts=restarts, seed=seed).drawing
        state["stopped"] = True
    if isinstance(best_draw, CombinatorialDrawing):
        D = complete_drawing(lift_drawing(best_draw, G))
        value = crossing_weight(D)
    else:
        D, value = best_draw, Fraction(best, L * L)
    exact = not state["stopped"] and not state["truncated"]
    return CrSolution(value, D, exact, nodes, budget, "branch-and-bound")


def _orders(chosen, pairs):
    per = {}
    for j in chosen:
        for e in pairs[j]:
            per[e] = per.get(e, 0) + 1
    total = 1
    for k in per.values():
        total *= math.factorial(k)
    return total


# -- heuristic upper bound ---------------------------------------------------


def _greedy_planar(G: WeightedGraph, order):
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    kept, rest = [], []
    limit = max(3 * G.n - 6, 1)
    for e in order:
        if len(kept) >= limit:
            rest.append(e)
            continue
        H.add_edge(*e)
        ok, _ = nx.check_planarity(H)
        if ok:
            kept.append(e)
        else:
            H.remove_edge(*e)
            rest.append(e)
    return kept, rest


def _straight_line_upper(G: WeightedGraph, restarts: int, seed: int) -> CrSolution:
    n = G.n
    best = None
    rng = np.random.default_rng(seed)
    layouts = []
    ang = 2 * np.pi * np.arange(n) / max(n, 1)
    layouts.append(np.c_[np.cos(ang), np.sin(ang)])
    for _ in range(max(restarts, 1)):
        r = np.sqrt(rng.random(n))
        t = 2 * np.pi * rng.random(n)
        layouts.append(np.c_[r * np.cos(t), r * np.sin(t)])
    for pts in layouts:
        v = straight_line_crossings(pts, G, seed)
        if best is None or v < best[0]:
            best = (v, pts)
    v, pts = best
    from .drawing.geometry import general_position
    return CrSolution(v, GeometricDrawing(G, general_position(pts, seed)), False, len(layouts),
                      {"restarts": restarts}, "straight-line")


def crossing_number_upper(G: WeightedGraph, restarts: int = 20, seed: int = 0, sweeps: int = 3,
                          size_limit: int = 400) -> CrSolution:
    """Planar subgraph + optimal edge insertion + local refinement, best of ``restarts``.

    Above ``size_limit`` edges the combinatorial route gets too slow and the
    best of several straight-line layouts is returned instead.
    """
    if G.m > size_limit:
        return _straight_line_upper(G, restarts, seed)
    edges = G.edges()
    ws = np.array([float(G.weights[e]) for e in edges])
    best = None
    for r in range(max(restarts, 1)):
        rng = np.random.default_rng([seed, r])
        prio = (ws + 1e-3) * rng.random(len(edges))
        order = [edges[i] for i in np.argsort(-prio, kind="stable")]
        kept, rest = _greedy_planar(G, order)
        D = planar_drawing(G, kept)
        rest = [rest[i] for i in rng.permutation(len(rest))]
        D = complete_drawing(D, rest)
        P = refine_plan(D._plan, max_sweeps=sweeps)
        val = P.crossing_weight()
        if best is None or val < best[0]:
            best = (val, CombinatorialDrawing(G, P, ("upper", r)))
        if val == 0:
            break
    return CrSolution(best[0], best[1], False, restarts, {"restarts": restarts}, "planarization")


def crossing_number_quotient(Q: QuotientGraph, max_nodes: int = 500_000, time_limit: float = 120.0,
                             restarts: int = 20, seed: int = 0) -> CrSolution:
    """cr of the quotient's base graph; the diagonal never contributes."""
    G = Q.base
    if G.n <= 7 or G.m <= 16:
        return crossing_number_exact(G, max_nodes=max_nodes, time_limit=time_limit,
                                     restarts=restarts, seed=seed)
    return crossing_number_upper(G, restarts=restarts, seed=seed)


def lower_bound(G: WeightedGraph) -> Fraction:
    return crossing_lower_bound(G)
