"""Crossing number estimation through a regular partition, and drawings that realize it."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cutnorm import RegularityReport, fk_partition, rebalance, verify_regularity
from .drawing.blowup import blow_up_drawing
from .drawing.drawing import (CombinatorialDrawing, complete_drawing, crossing_weight,
                              edgeless_drawing, refine_plan, relabel_drawing)
from .drawing.geometry import GeometricDrawing, planarize
from .errors import DomainError, StructureError
from .exact import CrSolution, crossing_number_quotient
from .graph import (QuotientGraph, VertexPartition, WeightedGraph, averaged, induced_subgraph,
                    quotient)
from .transfer import TransferTrace, transfer_drawing


@dataclass
class EstimateReport:
    estimate: Fraction
    n: int
    epsilon: float
    k: int
    partition: VertexPartition
    quotient: QuotientGraph
    quotient_cr: CrSolution
    defect: float
    defect_status: str
    error_terms: dict
    regularity: Optional[RegularityReport] = None
    drawing_weight: Optional[Fraction] = None
    trace: Optional[TransferTrace] = None
    extra: dict = field(default_factory=dict)

    @property
    def normalized(self) -> float:
        return float(self.estimate) / self.n ** 4 if self.n else 0.0

    @property
    def exact_quotient(self) -> bool:
        return self.quotient_cr.exact

    def to_dict(self):
        out = {
            "estimate": float(self.estimate),
            "estimate_exact": str(self.estimate),
            "normalized": self.normalized,
            "n": self.n,
            "epsilon": self.epsilon,
            "k": self.k,
            "classes": [list(c) for c in self.partition.classes],
            "quotient_cr": self.quotient_cr.to_dict(),
            "exact_quotient": self.exact_quotient,
            "defect": self.defect,
            "defect_status": self.defect_status,
            "error_terms": self.error_terms,
        }
        if self.drawing_weight is not None:
            out["drawing_weight"] = float(self.drawing_weight)
            out["drawing_weight_exact"] = str(self.drawing_weight)
        if self.trace is not None:
            out["trace"] = self.trace.to_dict()
        out.update(self.extra)
        return out


def _split_to(P: VertexPartition, n: int, target: int) -> VertexPartition:
    """Halve the largest classes (in sorted vertex order) until there are ``target``, then rebalance."""
    classes = [sorted(c) for c in P.classes]
    while len(classes) < target:
        i = max(range(len(classes)), key=lambda j: (len(classes[j]), -j))
        c = classes[i]
        if len(c) < 2:
            break
        h = len(c) // 2
        classes[i:i + 1] = [c[:h], c[h:]]
    return rebalance(VertexPartition(tuple(tuple(c) for c in classes)), n)


def estimate_cr(G: WeightedGraph, epsilon: float = 0.25, max_classes: int = 256, min_classes: int = 6,
                max_nodes: int = 500_000, time_limit: float = 120.0, seed: int = 0, restarts: int = 20,
                closeness_constant: float = 1.0) -> EstimateReport:
    """cr(G/P) (n/k)^4 for a regular partition P of G.

    FK partitions of quasi-random graphs often have a single class; the
    partition is then split to at least ``min_classes`` classes (capped at n)
    so that the quotient carries crossing structure.  The error terms are
    the blow-up slack k n^3 and ``closeness_constant * defect^(1/4) n^4``.
    """
    if not 0 < epsilon <= 1:
        raise DomainError("epsilon must lie in (0, 1]")
    n = G.n
    if n == 0:
        P = VertexPartition(())
        Q = QuotientGraph(WeightedGraph(0, {}), (), ())
        sol = CrSolution(Fraction(0), None, True, 0, {}, "empty")
        return EstimateReport(Fraction(0), 0, epsilon, 0, P, Q, sol, 0.0, "certified",
                              {"blow_up": 0.0, "closeness": 0.0, "total": 0.0})
    reg = fk_partition(G, epsilon, max_classes=max_classes, seed=seed, restarts=restarts)
    P = reg.partition
    defect, status = float(reg.defect), reg.status
    want = min(min_classes, n, max_classes)
    if P.k < want:
        P = _split_to(P, n, want)
        wit = verify_regularity(G, P, restarts=restarts, seed=seed)
        defect = float(wit.value)
        status = "certified" if wit.exact else "heuristic"
    P = P.canonical()
    Q = quotient(G, P)
    sol = crossing_number_quotient(Q, max_nodes=max_nodes, time_limit=time_limit,
                                   restarts=restarts, seed=seed)
    k = P.k
    est = sol.value * Fraction(n, k) ** 4
    blow = float(k * n ** 3)
    close = closeness_constant * defect ** 0.25 * n ** 4
    terms = {"blow_up": blow, "closeness": close, "total": blow + close,
             "closeness_constant": closeness_constant}
    return EstimateReport(est, n, epsilon, k, P, Q, sol, defect, status, terms, reg)


def round_weights(G: WeightedGraph, q: int) -> WeightedGraph:
    """Nearest multiple of 1/q for every weight, exact halves rounded toward zero."""
    if int(q) != q or q < 1:
        raise DomainError("q must be a positive integer")
    q = int(q)
    ws = {}
    for e, w in G.weights.items():
        x = w * q
        f = math.floor(x)
        r = f + 1 if x - f > Fraction(1, 2) else f
        if r:
            ws[e] = Fraction(r, q)
    return WeightedGraph(G.n, ws)


def _combinatorial(sol: CrSolution, H: WeightedGraph, seed: int) -> CombinatorialDrawing:
    D = sol.drawing
    if isinstance(D, CombinatorialDrawing):
        return D
    rng = np.random.default_rng(seed)
    pts = np.asarray(D.points, dtype=float)
    pts = (pts - pts.min(axis=0)) / max(np.ptp(pts), 1e-12)
    for _ in range(16):
        ip = np.round(pts * (1 << 24)).astype(np.int64) + rng.integers(-3, 4, size=pts.shape)
        try:
            return CombinatorialDrawing(H, planarize(H, ip), ("straight-line",))
        except StructureError:
            continue
    raise StructureError("could not planarize the straight-line quotient drawing")


def _scaffold(G: WeightedGraph, P: VertexPartition, Q: QuotientGraph, Dq: CombinatorialDrawing):
    """Blow the quotient drawing up onto the first floor(n/k) members of each class.

    Returns the cross-class part of the averaged graph and a drawing of it in
    which the leftover vertices' edges have been inserted optimally.
    """
    n, k = G.n, P.k
    m = n // k
    avg = averaged(G, P)
    lab = P.labels(n)
    G1 = WeightedGraph(n, {e: w for e, w in avg.weights.items() if lab[e[0]] != lab[e[1]]})
    Dm = blow_up_drawing(Dq, m) if m > 1 else Dq
    perm = [sorted(P.classes[c])[i] for c in range(k) for i in range(m)]
    D1 = relabel_drawing(Dm, perm, G1)
    return G1, complete_drawing(D1)


def draw_cr(G: WeightedGraph, epsilon: float = 0.25, q: int = 10, max_classes: int = 256,
            min_classes: int = 6, max_nodes: int = 500_000, time_limit: float = 120.0, seed: int = 0,
            restarts: int = 20, refine: bool = True, lonely_factor=1):
    """Drawing of G built from the quotient drawing; returns (drawing, report).

    The quotient drawing is blown up, its weights are rounded to multiples of
    1/q, it is refined until no redraw gains 1/q^2, and it is transferred
    onto G through the partition classes.
    """
    rep = estimate_cr(G, epsilon, max_classes=max_classes, min_classes=min_classes,
                      max_nodes=max_nodes, time_limit=time_limit, seed=seed, restarts=restarts)
    n = G.n
    if n == 0:
        D = edgeless_drawing(G)
        rep.drawing_weight = Fraction(0)
        return D, rep
    Hq = rep.quotient.base
    Dq = _combinatorial(rep.quotient_cr, Hq, seed)
    G1, D1 = _scaffold(G, rep.partition, rep.quotient, Dq)
    G1r = round_weights(G1, q)
    D1r = relabel_drawing(D1, range(n), G1r) if G1r.m == G1.m else _restrict(D1, G1r)
    if refine:
        tol = 1.0 / (2 * q * q)
        D1r = CombinatorialDrawing(G1r, refine_plan(D1r._plan, tol=tol), D1r.log + ("refined",))
    D, trace = transfer_drawing(G1r, D1r, G, rep.partition, seed=seed, refine=refine,
                                lonely_factor=lonely_factor)
    rep.drawing_weight = crossing_weight(D)
    rep.trace = trace
    rep.extra["q"] = q
    return D, rep


def _restrict(D: CombinatorialDrawing, H: WeightedGraph) -> CombinatorialDrawing:
    """Drop the curves of edges that are absent from H and re-index onto H."""
    P = D.plan()
    keep = set(H.weights)
    for eid, e in enumerate(P.ends):
        if P.edge_alive[eid] and e not in keep:
            P.remove_edge(eid)
    return relabel_drawing(CombinatorialDrawing(D.graph, P, D.log), range(D.n), H)


def estimability_probe(G: WeightedGraph, k: int, trials: int = 20, seed: int = 0, epsilon: float = 0.25,
                       min_classes: int = 6, restarts: int = 10, **kw) -> dict:
    """Normalized estimates on random induced k-vertex subgraphs.

    With k = n there is only one subgraph and a single trial is run.
    """
    n = G.n
    if not 1 <= k <= n:
        raise DomainError("sample size must lie in [1, n]")
    rng = np.random.default_rng(seed)
    if k == n:
        trials = 1
    vals = []
    for t in range(trials):
        X = sorted(rng.choice(n, size=k, replace=False).tolist()) if k < n else list(range(n))
        H = induced_subgraph(G, X)
        r = estimate_cr(H, epsilon, min_classes=min_classes, seed=seed + t, restarts=restarts, **kw)
        vals.append(r.normalized)
    a = np.array(vals)
    mean = float(a.mean())
    std = float(a.std())
    return {"k": k, "trials": trials, "values": vals, "mean": mean, "std": std,
            "relative_std": std / mean if mean > 0 else 0.0}
