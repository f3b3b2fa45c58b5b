"""Step graphons, crossing-density sandwiches, and Monte Carlo probes in planar regions."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import beta

from .errors import DomainError, RegionError, StructureError
from .exact import crossing_number_exact
from .graph import WeightedGraph, as_weight


# -- step graphons ----------------------------------------------------------


@dataclass(frozen=True)
class StepGraphon:
    """Blockwise constant graphon; ``values`` and ``lengths`` hold Fractions."""

    values: tuple
    lengths: tuple

    def __post_init__(self):
        k = len(self.lengths)
        vals = tuple(tuple(as_weight(x) for x in row) for row in self.values)
        lens = tuple(Fraction(x) if not isinstance(x, float) else as_weight_len(x) for x in self.lengths)
        if len(vals) != k or any(len(r) != k for r in vals):
            raise StructureError("values must be a k x k matrix")
        for i in range(k):
            for j in range(k):
                if vals[i][j] != vals[j][i]:
                    raise StructureError("values must be symmetric")
        if any(x <= 0 for x in lens):
            raise StructureError("block lengths must be positive")
        if k and abs(float(sum(lens)) - 1.0) > 1e-12:
            raise StructureError("block lengths must sum to 1")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "lengths", lens)

    @property
    def k(self) -> int:
        return len(self.lengths)

    def matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.values]).reshape(self.k, self.k)

    def mass(self) -> Fraction:
        """Integral of W over the unit square."""
        L = self.lengths
        return sum((self.values[i][j] * L[i] * L[j] for i in range(self.k) for j in range(self.k)),
                   Fraction(0))

    def scaled(self, alpha) -> "StepGraphon":
        a = as_weight(alpha)
        return StepGraphon(tuple(tuple(a * x for x in r) for r in self.values), self.lengths)

    def to_dict(self):
        return {"k": self.k, "values": [[str(x) for x in r] for r in self.values],
                "lengths": [str(x) for x in self.lengths]}


def as_weight_len(x: float) -> Fraction:
    return Fraction(repr(float(x)))


def constant_graphon(p) -> StepGraphon:
    return StepGraphon(((as_weight(p),),), (Fraction(1),))


def step_from_graph(G: WeightedGraph) -> StepGraphon:
    """W_G: n equal blocks, block values equal to the edge weights, zero diagonal."""
    n = G.n
    vals = [[Fraction(0)] * n for _ in range(n)]
    for (u, v), w in G.weights.items():
        vals[u][v] = vals[v][u] = w
    return StepGraphon(tuple(map(tuple, vals)), tuple(Fraction(1, n) for _ in range(n)))


def average_step(W: StepGraphon, merge: Sequence[Sequence[int]]) -> StepGraphon:
    """Average W over the coarser partition whose parts are the groups of ``merge``."""
    groups = [list(g) for g in merge]
    flat = sorted(x for g in groups for x in g)
    if flat != list(range(W.k)) or any(not g for g in groups):
        raise StructureError("merge must partition the block indices into nonempty groups")
    L = W.lengths
    GL = [sum((L[a] for a in g), Fraction(0)) for g in groups]
    vals = []
    for I, gi in enumerate(groups):
        row = []
        for J, gj in enumerate(groups):
            s = sum((W.values[a][b] * L[a] * L[b] for a in gi for b in gj), Fraction(0))
            row.append(s / (GL[I] * GL[J]))
        vals.append(tuple(row))
    return StepGraphon(tuple(vals), tuple(GL))


def _overlaps(lengths, N: int):
    """N x k matrix of overlaps between the N equal intervals and the blocks."""
    cuts = [Fraction(0)]
    for x in lengths:
        cuts.append(cuts[-1] + x)
    M = [[Fraction(0)] * len(lengths) for _ in range(N)]
    for a in range(N):
        lo, hi = Fraction(a, N), Fraction(a + 1, N)
        for b in range(len(lengths)):
            ov = min(hi, cuts[b + 1]) - max(lo, cuts[b])
            if ov > 0:
                M[a][b] = ov
    return M


def diagonal_graph(W: StepGraphon, N: int) -> WeightedGraph:
    """The graph G_N on N vertices whose step graphon is W averaged on N equal parts, diagonal cells zeroed."""
    if N < 1:
        raise DomainError("N must be positive")
    M = _overlaps(W.lengths, N)
    ws = {}
    for a, b in combinations(range(N), 2):
        s = Fraction(0)
        for i, x in enumerate(M[a]):
            if not x:
                continue
            for j, y in enumerate(M[b]):
                if y:
                    s += W.values[i][j] * x * y
        s *= N * N
        if s:
            ws[(a, b)] = s
    return WeightedGraph(N, ws)


@dataclass
class Sandwich:
    lower: Fraction
    upper: Fraction
    N: int
    exact: bool
    cr: Fraction

    def to_dict(self):
        return {"lower": float(self.lower), "upper": float(self.upper), "lower_exact": str(self.lower),
                "N": self.N, "cr": str(self.cr), "exact": self.exact,
                "note": "sandwich holds for the refined step graphon; convergence in the refinement is not certified"}


def cd_sandwich(W: StepGraphon, refinement: int = 1, max_nodes: int = 500_000, time_limit: float = 120.0,
                seed: int = 0) -> Sandwich:
    """(cd(G_N), cd(G_N) + 1/N) with N = refinement * k.

    G_N is the graph whose step graphon is the N-part average of W with
    zeroed diagonal cells.  If the crossing number solver runs out of budget
    the bounds come from its best drawing and ``exact`` is False.
    """
    if refinement < 1:
        raise DomainError("refinement must be positive")
    N = refinement * W.k
    G = diagonal_graph(W, N)
    sol = crossing_number_exact(G, max_nodes=max_nodes, time_limit=time_limit, seed=seed)
    lo = sol.value / N ** 4
    return Sandwich(lo, lo + Fraction(1, N), N, sol.exact, sol.value)


# -- planar regions -------------------------------------------------------------


@dataclass(frozen=True)
class PlanarRegion:
    name: str
    contains: Callable[[np.ndarray], np.ndarray]
    bbox: tuple

    def area(self, grid: int = 400) -> float:
        """Midpoint-rule area estimate."""
        x0, y0, x1, y1 = self.bbox
        xs = x0 + (np.arange(grid) + 0.5) * (x1 - x0) / grid
        ys = y0 + (np.arange(grid) + 0.5) * (y1 - y0) / grid
        X, Y = np.meshgrid(xs, ys)
        inside = self.contains(np.c_[X.ravel(), Y.ravel()])
        return float(inside.mean()) * (x1 - x0) * (y1 - y0)

    def transformed(self, A, b=(0.0, 0.0)) -> "PlanarRegion":
        """Image of the region under p -> A p + b."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if abs(np.linalg.det(A)) < 1e-12:
            raise DomainError("affine map must be invertible")
        Ai = np.linalg.inv(A)
        base = self.contains
        x0, y0, x1, y1 = self.bbox
        c = np.array([[x0, y0], [x1, y0], [x0, y1], [x1, y1]]) @ A.T + b
        return PlanarRegion(f"affine({self.name})", lambda p: base((np.asarray(p) - b) @ Ai.T),
                            (*c.min(axis=0), *c.max(axis=0)))


def square(side: float = 1.0) -> PlanarRegion:
    return PlanarRegion("square", lambda p: np.ones(len(p), dtype=bool), (0.0, 0.0, side, side))


def disk(radius: float = 1.0) -> PlanarRegion:
    return PlanarRegion("disk", lambda p: (p ** 2).sum(axis=1) <= radius * radius,
                        (-radius, -radius, radius, radius))


def triangle(vertices=((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))) -> PlanarRegion:
    V = np.asarray(vertices, dtype=float)
    a, b, c = V
    s = np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    if s == 0:
        raise RegionError("degenerate triangle")

    def inside(p):
        ok = np.ones(len(p), dtype=bool)
        for u, v in ((a, b), (b, c), (c, a)):
            ok &= s * ((v[0] - u[0]) * (p[:, 1] - u[1]) - (v[1] - u[1]) * (p[:, 0] - u[0])) >= 0
        return ok

    return PlanarRegion("triangle", inside, (*V.min(axis=0), *V.max(axis=0)))


def annulus(inner: float = 0.5, outer: float = 1.0) -> PlanarRegion:
    if not 0 <= inner < outer:
        raise RegionError("need 0 <= inner < outer")

    def inside(p):
        r2 = (p ** 2).sum(axis=1)
        return (r2 >= inner * inner) & (r2 <= outer * outer)

    return PlanarRegion("annulus", inside, (-outer, -outer, outer, outer))


def boxes(rects) -> PlanarRegion:
    """Union of axis-parallel boxes given as (x0, y0, x1, y1)."""
    R = np.asarray(rects, dtype=float).reshape(-1, 4)
    if not len(R) or np.any(R[:, 2] <= R[:, 0]) or np.any(R[:, 3] <= R[:, 1]):
        raise RegionError("boxes need positive width and height")

    def inside(p):
        ok = np.zeros(len(p), dtype=bool)
        for x0, y0, x1, y1 in R:
            ok |= (p[:, 0] >= x0) & (p[:, 0] <= x1) & (p[:, 1] >= y0) & (p[:, 1] <= y1)
        return ok

    return PlanarRegion("boxes", inside, (R[:, 0].min(), R[:, 1].min(), R[:, 2].max(), R[:, 3].max()))


REGIONS = {"square": square, "disk": disk, "triangle": triangle, "annulus": annulus, "boxes": boxes}


def region_by_name(name: str, params: Optional[Sequence[float]] = None) -> PlanarRegion:
    if name not in REGIONS:
        raise DomainError(f"unknown region {name!r}; choose from {sorted(REGIONS)}")
    params = list(params or [])
    if name == "triangle" and params:
        return triangle(np.asarray(params, dtype=float).reshape(3, 2))
    if name == "boxes":
        return boxes(params if params else [(0, 0, 1, 1)])
    return REGIONS[name](*params)


# -- sampling ------------------------------------------------------------------


def _sign(x):
    # zero orientations are broken the same way every time (symbolic perturbation)
    return np.where(x >= 0, 1, -1)


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _cross(p, q, r, s):
    return (_sign(_orient(p, q, r)) != _sign(_orient(p, q, s))) & \
           (_sign(_orient(r, s, p)) != _sign(_orient(r, s, q)))


def convex_position(a, b, c, d) -> np.ndarray:
    """True where the four points admit a labelling whose two diagonals cross."""
    return _cross(a, b, c, d) | _cross(a, c, b, d) | _cross(a, d, b, c)


def sample_region(R: PlanarRegion, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` uniform points of R by rejection from its bounding box."""
    x0, y0, x1, y1 = R.bbox
    out = []
    have = 0
    tried = 0
    while have < count:
        want = max(1024, int(1.3 * (count - have) / max(have / tried, 1e-4))) if tried else max(1024, count)
        want = min(want, 1 << 22)
        p = np.c_[rng.uniform(x0, x1, want), rng.uniform(y0, y1, want)]
        ok = p[R.contains(p)]
        tried += want
        have += len(ok)
        out.append(ok)
        if tried >= 100_000 and have / tried < 1e-4:
            raise RegionError(f"acceptance rate {have / tried:.2e} is below 1e-4")
    return np.concatenate(out)[:count]


def clopper_pearson_radius(hits: int, trials: int, level: float = 0.99) -> float:
    """Largest distance from hits/trials to the ends of the exact binomial interval."""
    a = (1 - level) / 2
    p = hits / trials
    lo = beta.ppf(a, hits, trials - hits + 1) if hits > 0 else 0.0
    hi = beta.ppf(1 - a, hits + 1, trials - hits) if hits < trials else 1.0
    return float(max(p - lo, hi - p))


def sylvester_convex_probability(R: PlanarRegion, samples: int = 1_000_000, seed: int = 0,
                                 threads: int = 1, chunk: int = 1 << 16):
    """Fraction of uniform 4-point samples of R in convex position, with a 99% radius.

    Chunks draw from fixed child streams of the seed, so the result does not
    depend on ``threads``.
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    sizes = [chunk] * (samples // chunk) + ([samples % chunk] if samples % chunk else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def work(i):
        rng = np.random.default_rng(streams[i])
        p = sample_region(R, 4 * sizes[i], rng).reshape(sizes[i], 4, 2)
        return int(convex_position(p[:, 0], p[:, 1], p[:, 2], p[:, 3]).sum())

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            hits = sum(ex.map(work, range(len(sizes))))
    else:
        hits = sum(work(i) for i in range(len(sizes)))
    return hits / samples, clopper_pearson_radius(hits, samples)


def _convex_counts(P: np.ndarray) -> np.ndarray:
    """Number of convex 4-subsets for each point set in the batch P (B, n, 2)."""
    n = P.shape[1]
    idx = np.array(list(combinations(range(n), 4)))
    a, b, c, d = (P[:, idx[:, t]] for t in range(4))
    return convex_position(a, b, c, d).sum(axis=1)


def rectilinear_density_upper(n: int, samples: int = 100_000, seed: int = 0,
                              region: Optional[PlanarRegion] = None, batch: int = 4096):
    """Fewest straight-line crossings of K_n over random point sets in the region.

    A straight-line drawing of K_n has one crossing per 4-subset in convex
    position.  Returns (best value, best points, history) where history lists
    (samples seen, running minimum) after each batch.
    """
    if n < 4:
        raise DomainError("n must be at least 4")
    R = region or square()
    rng = np.random.default_rng(seed)
    best, best_pts = None, None
    hist = []
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        P = sample_region(R, b * n, rng).reshape(b, n, 2)
        if comb(n, 4) * b <= 4_000_000:
            cnt = _convex_counts(P)
        else:
            cnt = np.concatenate([_convex_counts(P[i:i + 1]) for i in range(b)])
        i = int(np.argmin(cnt))
        if best is None or cnt[i] < best:
            best, best_pts = int(cnt[i]), P[i].copy()
        done += b
        hist.append((done, best))
        if best == 0:
            break
    return best, best_pts, hist
