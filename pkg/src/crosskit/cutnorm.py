"""Labelled cut distance and Frieze-Kannan style weak regularity partitions.

Convention: e(S, T) = 1_S^T W 1_T, so an edge with both ends in S & T is
counted twice.  The cut distance of two graphs on the same vertex set is
max_{S,T} |e1(S,T) - e2(S,T)| / n^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import BudgetError, DomainError
from .graph import VertexPartition, WeightedGraph, averaged, edge_mass

EXACT_LIMIT = 24
_INT_SAFE = 2 ** 62


@dataclass(frozen=True)
class CutWitness:
    S: tuple[int, ...]
    T: tuple[int, ...]
    value: Fraction
    exact: bool = True

    def to_dict(self):
        return {"S": list(self.S), "T": list(self.T), "value": float(self.value),
                "value_exact": str(self.value), "exact": self.exact}


def witness_value(G1: WeightedGraph, G2: WeightedGraph, S, T) -> Fraction:
    """|e1(S,T) - e2(S,T)| / n^2, exactly."""
    n = G1.n
    if n == 0:
        return Fraction(0)
    return abs(edge_mass(G1, S, T) - edge_mass(G2, S, T)) / (n * n)


def _check_pair(G1, G2):
    if G1.n != G2.n:
        raise DomainError(f"graphs live on different vertex sets ({G1.n} vs {G2.n})")


def _difference(G1, G2):
    """Difference matrix, as exact int64 times a common scale when that is safe.

    Returns (D, scale) with D = scale * (W1 - W2); scale is None for a float D.
    """
    n = G1.n
    ws = list(G1.weights.values()) + list(G2.weights.values())
    L = 1
    for w in ws:
        L = L * w.denominator // math.gcd(L, w.denominator)
    if L * max(n, 1) ** 2 < _INT_SAFE:
        D = np.zeros((n, n), dtype=np.int64)
        sign = 1
        for G in (G1, G2):
            for (u, v), w in G.weights.items():
                x = sign * int(w * L)
                D[u, v] += x
                D[v, u] += x
            sign = -1
        return D, L
    D = G1.matrix(float) - G2.matrix(float)
    return D, None


def _subset_sums(D, idx):
    """Row sums of D over every subset of the rows ``idx``, in bitmask order."""
    k = len(idx)
    R = np.zeros((1 << k, D.shape[1]), dtype=D.dtype)
    for b, r in enumerate(idx):
        R[1 << b: 1 << (b + 1)] = R[: 1 << b] + D[r]
    return R


def cut_distance_exact(G1: WeightedGraph, G2: WeightedGraph, limit: int = EXACT_LIMIT) -> CutWitness:
    """True maximiser of |e1(S,T) - e2(S,T)| / n^2 by enumerating all S.

    For a fixed S with row sums r = 1_S^T D the best T is {r > 0} (or {r < 0}
    for the other sign).  Ties go to the smallest bitmask S, then the
    positive side.
    """
    _check_pair(G1, G2)
    n = G1.n
    if n > limit:
        raise BudgetError(f"n={n} exceeds the exact cut-distance limit {limit}; use cut_distance_heuristic")
    if n == 0:
        return CutWitness((), (), Fraction(0))
    D, scale = _difference(G1, G2)
    nlo = n // 2
    lo = _subset_sums(D, list(range(nlo)))
    hi = _subset_sums(D, list(range(nlo, n)))
    best, best_mask, best_sign = -1, 0, 1
    for h in range(hi.shape[0]):
        R = lo + hi[h]
        pos = np.where(R > 0, R, 0).sum(axis=1)
        neg = -np.where(R < 0, R, 0).sum(axis=1)
        ip, ineg = int(np.argmax(pos)), int(np.argmax(neg))
        # choose within this block; earlier mask wins ties, positive side first
        if pos[ip] >= neg[ineg]:
            cand, i, sgn = pos[ip], ip, 1
            if neg[ineg] == cand and ineg < ip:
                i, sgn = ineg, -1
        else:
            cand, i, sgn = neg[ineg], ineg, -1
        if cand > best:
            best, best_mask, best_sign = cand, (h << nlo) | i, sgn
    S = tuple(v for v in range(n) if best_mask >> v & 1)
    r = D[list(S)].sum(axis=0) if S else np.zeros(n, dtype=D.dtype)
    T = tuple(int(t) for t in np.nonzero(r > 0 if best_sign > 0 else r < 0)[0])
    if scale is not None:
        value = Fraction(int(best), scale * n * n)
    else:
        value = witness_value(G1, G2, S, T)
    return CutWitness(S, T, value, True)


def _alternate(D, S, sign, max_iter=200):
    """Alternating maximisation of sign * 1_S^T D 1_T from a start set S."""
    A = sign * D
    val = -np.inf
    for _ in range(max_iter):
        r = A[S].sum(axis=0)
        T = r > 0
        c = A[:, T].sum(axis=1)
        S_new = c > 0
        new = c[S_new].sum()
        if new <= val + 1e-12:
            break
        val, S = new, S_new
    T = A[S].sum(axis=0) > 0
    return S, T, float(A[np.ix_(S, T)].sum())


def cut_distance_heuristic(G1: WeightedGraph, G2: WeightedGraph, restarts: int = 20, seed: int = 0) -> CutWitness:
    """Lower-bound witness by alternating maximisation; the first start is S = V."""
    _check_pair(G1, G2)
    n = G1.n
    if n == 0:
        return CutWitness((), (), Fraction(0), False)
    D = G1.matrix(float) - G2.matrix(float)
    rng = np.random.default_rng(seed)
    starts = [np.ones(n, dtype=bool)] + [rng.random(n) < 0.5 for _ in range(max(restarts, 0))]
    best = None
    for S0 in starts:
        for sign in (1, -1):
            S, T, val = _alternate(D, S0.copy(), sign)
            if best is None or val > best[0] + 1e-12:
                best = (val, S, T)
    _, S, T = best
    S = tuple(int(v) for v in np.nonzero(S)[0])
    T = tuple(int(v) for v in np.nonzero(T)[0])
    return CutWitness(S, T, witness_value(G1, G2, S, T), False)


def cut_distance(G1, G2, limit: int = EXACT_LIMIT, restarts: int = 20, seed: int = 0) -> CutWitness:
    """Exact when n <= limit, heuristic lower bound otherwise."""
    if G1.n <= limit:
        return cut_distance_exact(G1, G2, limit)
    return cut_distance_heuristic(G1, G2, restarts, seed)


# -- regularity ------------------------------------------------------------


def partition_index(G: WeightedGraph, P: VertexPartition) -> float:
    """Mean-square density sum_ij d_ij^2 |V_i||V_j| / n^2."""
    n = G.n
    if n == 0:
        return 0.0
    lab = P.labels(n)
    B = np.zeros((n, P.k))
    B[np.arange(n), lab] = 1.0
    W = G.matrix(float)
    M = B.T @ W @ B
    sz = np.asarray(P.sizes, dtype=float)
    dens = M / np.outer(sz, sz)
    return float((dens ** 2 * np.outer(sz, sz)).sum() / n ** 2)


def refine(P: VertexPartition, S, T) -> VertexPartition:
    """Split every class into C&S&T, C&S-T, C&T-S and the rest (empties dropped)."""
    S, T = set(S), set(T)
    out = []
    for c in P.classes:
        parts = ([], [], [], [])
        for v in c:
            parts[(0 if v in T else 1) if v in S else (2 if v in T else 3)].append(v)
        out.extend(tuple(p) for p in parts if p)
    return VertexPartition(tuple(out))


def rebalance(P: VertexPartition, n: int) -> VertexPartition:
    """Make P equitable with a minimal number of moves.

    The largest classes get the ceiling size.  Surplus vertices leave their
    class lowest index first and fill the short classes in class order.
    """
    k = P.k
    if k == 0:
        return P
    q, r = divmod(n, k)
    order = sorted(range(k), key=lambda i: (-len(P.classes[i]), i))
    target = [0] * k
    for rank, i in enumerate(order):
        target[i] = q + 1 if rank < r else q
    classes = [list(c) for c in P.classes]
    pool = []
    for i, c in enumerate(classes):
        extra = len(c) - target[i]
        if extra > 0:
            pool.extend(c[:extra])
            classes[i] = c[extra:]
    pool.sort()
    for i, c in enumerate(classes):
        need = target[i] - len(c)
        if need > 0:
            c.extend(pool[:need])
            del pool[:need]
    return VertexPartition(tuple(tuple(c) for c in classes))


@dataclass
class RegularityReport:
    partition: VertexPartition
    epsilon: float
    defect: Fraction
    class_count: int
    iterations: int
    status: str
    witness: Optional[CutWitness] = None
    index_history: list = field(default_factory=list)
    refined_index_history: list = field(default_factory=list)

    def to_dict(self):
        return {
            "classes": [list(c) for c in self.partition.classes],
            "epsilon": self.epsilon,
            "defect": float(self.defect),
            "class_count": self.class_count,
            "iterations": self.iterations,
            "status": self.status,
            "witness": self.witness.to_dict() if self.witness else None,
            "index_history": self.index_history,
        }


def verify_regularity(G: WeightedGraph, P: VertexPartition, epsilon=None, limit: int = EXACT_LIMIT,
                      restarts: int = 20, seed: int = 0) -> CutWitness:
    """Best witness for d(G, G_P); exact when n <= limit."""
    P.validate(G.n)
    return cut_distance(G, averaged(G, P), limit, restarts, seed)


def fk_partition(G: WeightedGraph, epsilon: float, max_classes: int = 256, seed: int = 0,
                 limit: int = EXACT_LIMIT, restarts: int = 20) -> RegularityReport:
    """Witness refinement towards an equitable partition with d(G, G_P) <= epsilon.

    ``index_history`` holds the index after each rebalanced step and
    ``refined_index_history`` the index of the raw 4-way refinement, which
    never drops below the previous partition's index.
    """
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    n = G.n
    exact = n <= limit
    P = VertexPartition.trivial(n)
    idx = partition_index(G, P)
    hist, rhist = [idx], []
    it = 0
    while True:
        wit = verify_regularity(G, P, limit=limit, restarts=restarts, seed=seed + it)
        if wit.value <= epsilon:
            status = "certified" if exact else "heuristic"
            break
        Q = refine(P, wit.S, wit.T)
        if Q.k > max_classes or Q.k == P.k:
            status = "budget"
            break
        ridx = partition_index(G, Q)
        assert ridx >= idx - 1e-9, "refinement lowered the index"
        rhist.append(ridx)
        P = rebalance(Q, n)
        idx = partition_index(G, P)
        hist.append(idx)
        it += 1
    return RegularityReport(P, epsilon, wit.value, P.k, it, status, wit, hist, rhist)
