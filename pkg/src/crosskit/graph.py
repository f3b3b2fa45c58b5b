"""Weighted graphs on {0, ..., n-1}, structural operators and analytic bounds.

Weights are stored as :class:`fractions.Fraction` so that quotient densities,
averaging and crossing sums stay exact.  Anything that is a terminating
decimal on input (``"0.55"``, ``0.25``, ``1``) round-trips bit-exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ParseError, StructureError

Edge = tuple[int, int]


def as_weight(x) -> Fraction:
    """Convert ``x`` to an exact Fraction.

    Floats are read through their shortest repr, i.e. as the decimal the user
    typed, not as the binary value.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise DomainError(f"weight {x!r} is not finite")
        return Fraction(repr(float(x)))
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot read weight {x!r}") from exc
    raise DomainError(f"unsupported weight type {type(x).__name__}")


def format_weight(w: Fraction) -> str:
    """Shortest exact text for ``w``: a plain decimal if it terminates, else ``p/q``."""
    w = Fraction(w)
    q = w.denominator
    for p in (2, 5):
        while q % p == 0:
            q //= p
    if q != 1:
        return f"{w.numerator}/{w.denominator}"
    if w.denominator == 1:
        return str(w.numerator)
    with localcontext() as ctx:
        ctx.prec = 4 * len(str(w.denominator)) + len(str(w.numerator)) + 8
        d = Decimal(w.numerator) / Decimal(w.denominator)
    s = format(d.normalize(), "f")
    return s


def _key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=True)
class WeightedGraph:
    """Simple undirected graph with edge weights in [0, 1].

    ``weights`` maps ordered keys ``(u, v)`` with ``u < v`` to Fractions.  A
    stored weight may be 0 (an edge that is drawn but never costs anything);
    pairs that are not stored have weight 0 and are not drawn.
    """

    n: int
    weights: Mapping[Edge, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("vertex count must be nonnegative")
        clean = {}
        for (u, v), w in self.weights.items():
            u, v = int(u), int(v)
            if u == v:
                raise DomainError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"edge ({u}, {v}) outside vertex range 0..{self.n - 1}")
            k = _key(u, v)
            if k in clean:
                raise DomainError(f"edge {k} given twice")
            w = as_weight(w)
            if w < 0 or w > 1:
                raise DomainError(f"weight {w} of edge {k} outside [0, 1]")
            clean[k] = w
        object.__setattr__(self, "weights", dict(sorted(clean.items())))

    __hash__ = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "WeightedGraph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples (default weight 1)."""
        ws = {}
        for e in edges:
            if len(e) == 2:
                u, v, w = e[0], e[1], 1
            else:
                u, v, w = e
            k = _key(int(u), int(v))
            if k in ws:
                raise DomainError(f"edge {k} given twice")
            ws[k] = w
        return cls(n, ws)

    @classmethod
    def from_matrix(cls, a, keep_zeros: bool = False) -> "WeightedGraph":
        a = np.asarray(a, dtype=object)
        n = a.shape[0]
        ws = {}
        for u, v in combinations(range(n), 2):
            w = as_weight(a[u, v])
            if w != as_weight(a[v, u]):
                raise DomainError(f"matrix not symmetric at ({u}, {v})")
            if w != 0 or keep_zeros:
                ws[(u, v)] = w
        return cls(n, ws)

    # -- queries ---------------------------------------------------------
    def weight(self, u: int, v: int) -> Fraction:
        if u == v:
            return Fraction(0)
        return self.weights.get(_key(u, v), Fraction(0))

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and _key(u, v) in self.weights

    def edges(self) -> list[Edge]:
        return list(self.weights)

    @property
    def m(self) -> int:
        return len(self.weights)

    def total_weight(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def is_unweighted(self) -> bool:
        return all(w == 1 for w in self.weights.values())

    def degree(self, v: int) -> int:
        return sum(1 for (a, b) in self.weights if a == v or b == v)

    def neighbors(self) -> list[list[int]]:
        nb = [[] for _ in range(self.n)]
        for u, v in self.weights:
            nb[u].append(v)
            nb[v].append(u)
        return nb

    def matrix(self, dtype=float) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for (u, v), w in self.weights.items():
            a[u, v] = a[v, u] = dtype(w) if dtype is not object else w
        return a

    def scaled(self, alpha) -> "WeightedGraph":
        alpha = as_weight(alpha)
        return WeightedGraph(self.n, {e: w * alpha for e, w in self.weights.items()})

    def without_zero_edges(self) -> "WeightedGraph":
        return WeightedGraph(self.n, {e: w for e, w in self.weights.items() if w != 0})

    def with_edges(self, extra: Mapping[Edge, Fraction]) -> "WeightedGraph":
        ws = dict(self.weights)
        for (u, v), w in extra.items():
            ws[_key(u, v)] = as_weight(w)
        return WeightedGraph(self.n, ws)

    def without_edge(self, u: int, v: int) -> "WeightedGraph":
        ws = dict(self.weights)
        ws.pop(_key(u, v), None)
        return WeightedGraph(self.n, ws)

    def relabel(self, perm: Sequence[int]) -> "WeightedGraph":
        """Vertex ``v`` becomes ``perm[v]``."""
        return WeightedGraph(self.n, {_key(perm[u], perm[v]): w for (u, v), w in self.weights.items()})

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={self.m})"


# -- partitions ------------------------------------------------------------


@dataclass(frozen=True)
class VertexPartition:
    """Ordered list of disjoint, nonempty vertex classes."""

    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(tuple(sorted(int(v) for v in c)) for c in self.classes))

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    @property
    def equitable(self) -> bool:
        s = self.sizes
        return not s or max(s) - min(s) <= 1

    def validate(self, n: int) -> None:
        seen = set()
        for c in self.classes:
            if not c:
                raise StructureError("empty class in partition")
            for v in c:
                if v in seen:
                    raise StructureError(f"vertex {v} in two classes")
                if not 0 <= v < n:
                    raise StructureError(f"vertex {v} outside 0..{n - 1}")
                seen.add(v)
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            raise StructureError(f"partition misses vertices {missing[:10]}")

    def labels(self, n: int) -> np.ndarray:
        lab = np.full(n, -1, dtype=np.int64)
        for i, c in enumerate(self.classes):
            lab[list(c)] = i
        return lab

    def canonical(self) -> "VertexPartition":
        """Classes sorted by their smallest vertex."""
        return VertexPartition(tuple(sorted(self.classes, key=lambda c: c[0] if c else -1)))

    @classmethod
    def singletons(cls, n: int) -> "VertexPartition":
        return cls(tuple((v,) for v in range(n)))

    @classmethod
    def trivial(cls, n: int) -> "VertexPartition":
        return cls((tuple(range(n)),)) if n else cls(())

    @classmethod
    def blocks(cls, n: int, m: int) -> "VertexPartition":
        """The canonical partition of a blow-up ``G[m]`` into its clusters."""
        return cls(tuple(tuple(range(v * m, v * m + m)) for v in range(n)))


@dataclass(frozen=True)
class QuotientGraph:
    base: WeightedGraph
    diagonal: tuple[Fraction, ...]
    class_sizes: tuple[int, ...]

    __hash__ = None


def edge_mass(G: WeightedGraph, S: Iterable[int], T: Iterable[int]) -> Fraction:
    """e_G(S, T): total weight of S-T edges, edges inside S & T counted twice."""
    S, T = set(S), set(T)
    total = Fraction(0)
    for (u, v), w in G.weights.items():
        c = (u in S and v in T) + (v in S and u in T)
        if c:
            total += c * w
    return total


def _class_masses(G: WeightedGraph, P: VertexPartition):
    P.validate(G.n)
    lab = P.labels(G.n)
    k = P.k
    mass = [[Fraction(0)] * k for _ in range(k)]
    for (u, v), w in G.weights.items():
        i, j = int(lab[u]), int(lab[v])
        if i == j:
            mass[i][i] += 2 * w
        else:
            mass[i][j] += w
            mass[j][i] += w
    return lab, mass


def blow_up(G: WeightedGraph, m: int) -> WeightedGraph:
    """Replace every vertex ``v`` by the independent set ``{v*m, ..., v*m+m-1}``."""
    if m < 1:
        raise DomainError("blow-up factor must be a positive integer")
    ws = {}
    for (u, v), w in G.weights.items():
        for i in range(m):
            for j in range(m):
                ws[_key(u * m + i, v * m + j)] = w
    return WeightedGraph(G.n * m, ws)


def quotient(G: WeightedGraph, P: VertexPartition) -> QuotientGraph:
    _, mass = _class_masses(G, P)
    sizes = P.sizes
    k = P.k
    ws = {}
    for i, j in combinations(range(k), 2):
        d = mass[i][j] / (sizes[i] * sizes[j])
        if d:
            ws[(i, j)] = d
    diag = tuple(mass[i][i] / (sizes[i] * sizes[i]) for i in range(k))
    return QuotientGraph(WeightedGraph(k, ws), diag, tuple(sizes))


def averaged(G: WeightedGraph, P: VertexPartition) -> WeightedGraph:
    """G_P: every pair gets the density of its class pair; self-pairs dropped."""
    lab, mass = _class_masses(G, P)
    sizes = P.sizes
    dens = [[mass[i][j] / (sizes[i] * sizes[j]) for j in range(P.k)] for i in range(P.k)]
    ws = {}
    for u, v in combinations(range(G.n), 2):
        d = dens[lab[u]][lab[v]]
        if d:
            ws[(u, v)] = d
    return WeightedGraph(G.n, ws)


def induced_subgraph(G: WeightedGraph, X: Iterable[int]) -> WeightedGraph:
    """G[X] relabelled to 0..|X|-1 in increasing vertex order."""
    X = sorted(set(X))
    if X and (X[0] < 0 or X[-1] >= G.n):
        raise DomainError("subset contains vertices outside the graph")
    pos = {v: i for i, v in enumerate(X)}
    ws = {(pos[u], pos[v]): w for (u, v), w in G.weights.items() if u in pos and v in pos}
    return WeightedGraph(len(X), ws)


# -- generators ------------------------------------------------------------


def complete_graph(n: int, weight=1) -> WeightedGraph:
    w = as_weight(weight)
    return WeightedGraph(n, {e: w for e in combinations(range(n), 2)})


def complete_bipartite(a: int, b: int, weight=1) -> WeightedGraph:
    w = as_weight(weight)
    return WeightedGraph(a + b, {(i, a + j): w for i in range(a) for j in range(b)})


def grid_graph(rows: int, cols: int) -> WeightedGraph:
    ws = {}
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                ws[(v, v + 1)] = Fraction(1)
            if r + 1 < rows:
                ws[(v, v + cols)] = Fraction(1)
    return WeightedGraph(rows * cols, ws)


def random_graph(n: int, p: float, seed: int = 0) -> WeightedGraph:
    """Erdos-Renyi G(n, p) with unit weights; pairs drawn in lexicographic order."""
    if not 0 <= p <= 1:
        raise DomainError("edge probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(n), 2))
    keep = rng.random(len(pairs)) < p
    return WeightedGraph(n, {e: Fraction(1) for e, k in zip(pairs, keep) if k})


def random_weighted_graph(n: int, p: float, seed: int = 0, resolution: int = 100) -> WeightedGraph:
    """Random support as in :func:`random_graph`, weights uniform on {1/q, ..., 1}."""
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(n), 2))
    keep = rng.random(len(pairs)) < p
    ws = rng.integers(1, resolution + 1, size=len(pairs))
    return WeightedGraph(n, {e: Fraction(int(w), resolution) for e, k, w in zip(pairs, keep, ws) if k})


# -- bounds ----------------------------------------------------------------


def crossing_lower_bound(G: WeightedGraph) -> Fraction:
    """max(0, m - 3n + 6, m^3 / (64 n^2) when m >= 4n) with m the total weight.

    A valid lower bound on cr(G) for unit weights.  For weighted graphs it is
    only a heuristic sanity band.
    """
    n = G.n
    m = G.total_weight()
    best = Fraction(0)
    if n >= 3:
        best = max(best, m - 3 * n + 6)
    if n > 0 and m >= 4 * n:
        best = max(best, m ** 3 / (64 * n * n))
    return best


def zarankiewicz_kn(n: int) -> int:
    """Guy's formula for cr(K_n) (a known upper bound, exact for n <= 12)."""
    return (n // 2) * ((n - 1) // 2) * ((n - 2) // 2) * ((n - 3) // 2) // 4


def zarankiewicz_kmn(a: int, b: int) -> int:
    return (a // 2) * ((a - 1) // 2) * (b // 2) * ((b - 1) // 2)


# -- text / JSON formats ---------------------------------------------------


def parse_graph(text: str) -> WeightedGraph:
    """Read the edge-list format (``n`` then ``u v [w]`` lines) or the JSON form."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return _parse_json(stripped)
    lines = text.splitlines()
    n = None
    ws = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise ParseError("first line must hold the vertex count", lineno)
            try:
                n = int(parts[0])
            except ValueError:
                raise ParseError(f"bad vertex count {parts[0]!r}", lineno) from None
            if n < 0:
                raise ParseError("negative vertex count", lineno)
            continue
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'u v [w]', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"bad vertex index in {line!r}", lineno) from None
        if len(parts) == 3:
            try:
                w = Fraction(parts[2])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad weight {parts[2]!r}", lineno) from None
        else:
            w = Fraction(1)
        if w < 0 or w > 1:
            raise DomainError(f"line {lineno}: weight {parts[2]} outside [0, 1]")
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"invalid edge ({u}, {v}) for n={n}", lineno)
        k = _key(u, v)
        if k in ws:
            raise ParseError(f"edge {k} listed twice", lineno)
        ws[k] = w
    if n is None:
        raise ParseError("empty input", 1)
    return WeightedGraph(n, ws)


def _parse_json(text: str) -> WeightedGraph:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or "n" not in doc:
        raise ParseError("JSON graph needs an 'n' field", 1)
    ws = {}
    for e in doc.get("edges", []):
        if not isinstance(e, list) or len(e) not in (2, 3):
            raise ParseError(f"bad edge entry {e!r}", 1)
        w = as_weight(e[2]) if len(e) == 3 else Fraction(1)
        if w < 0 or w > 1:
            raise DomainError(f"weight {w} outside [0, 1]")
        k = _key(int(e[0]), int(e[1]))
        if k in ws:
            raise ParseError(f"edge {k} listed twice", 1)
        ws[k] = w
    return WeightedGraph(int(doc["n"]), ws)


def serialize_graph(G: WeightedGraph, fmt: str = "text") -> str:
    if fmt == "text":
        out = [str(G.n)]
        out += [f"{u} {v} {format_weight(w)}" for (u, v), w in G.weights.items()]
        return "\n".join(out) + "\n"
    if fmt == "json":
        edges = []
        for (u, v), w in G.weights.items():
            s = format_weight(w)
            edges.append(f"[{u}, {v}, {s if '/' not in s else json.dumps(s)}]")
        return '{"n": %d, "edges": [%s]}\n' % (G.n, ", ".join(edges))
    raise DomainError(f"unknown graph format {fmt!r}")
