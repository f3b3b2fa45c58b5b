import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crosskit.errors import DomainError, RegionError, StructureError
from crosskit.graph import WeightedGraph, blow_up, complete_graph, random_weighted_graph
from crosskit.graphon import (StepGraphon, average_step, boxes, cd_sandwich, clopper_pearson_radius,
                              constant_graphon, convex_position, diagonal_graph, disk, rectilinear_density_upper,
                              region_by_name, sample_region, square, step_from_graph,
                              sylvester_convex_probability, triangle)

from oracles import convex_by_hull, sylvester_by_quadrature

SQUARE_P = 25 / 36
TRIANGLE_P = 2 / 3
DISK_P = 1 - 35 / (12 * math.pi ** 2)
INF_LOWER = 0.379972


# -- step graphons -------------------------------------------------------------------

def test_step_of_k2():
    W = step_from_graph(complete_graph(2))
    assert W.values == ((0, 1), (1, 0)) and W.lengths == (Fraction(1, 2), Fraction(1, 2))


def test_step_of_edgeless():
    W = step_from_graph(WeightedGraph(3, {}))
    assert not W.matrix().any()


def test_step_of_blow_up_merges_back():
    G = random_weighted_graph(4, 0.8, 2, 5)
    m = 3
    Wb = step_from_graph(blow_up(G, m))
    W = step_from_graph(G)
    merged = average_step(Wb, [list(range(m * v, m * v + m)) for v in range(G.n)])
    assert merged.lengths == W.lengths
    assert merged.values == W.values


def test_average_step_examples():
    W = step_from_graph(complete_graph(2))
    assert average_step(W, [[0], [1]]) == W
    assert average_step(W, [[0, 1]]).values == ((Fraction(1, 2),),)
    C = constant_graphon(Fraction(3, 10))
    assert average_step(C, [[0]]) == C


def test_average_step_bad_grouping():
    W = step_from_graph(complete_graph(3))
    for bad in ([[0, 1]], [[0, 1], [1, 2]], [[0, 1, 2], []]):
        with pytest.raises(StructureError):
            average_step(W, bad)


def test_invalid_step_graphons():
    with pytest.raises(StructureError):
        StepGraphon(((0, 1), (Fraction(1, 2), 0)), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(StructureError):
        StepGraphon(((0,),), (Fraction(1, 2),))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5))
def test_average_step_mass_and_idempotence(seed, parts):
    rng = np.random.default_rng(seed)
    G = random_weighted_graph(6, 0.7, seed, 7)
    W = step_from_graph(G)
    lab = rng.integers(0, parts, size=W.k)
    groups = [[i for i in range(W.k) if lab[i] == g] for g in range(parts)]
    groups = [g for g in groups if g]
    A = average_step(W, groups)
    assert A.mass() == W.mass()
    assert average_step(A, [[i] for i in range(A.k)]) == A


# -- crossing density sandwich --------------------------------------------------------

def test_sandwich_zero_graphon():
    s = cd_sandwich(constant_graphon(0), refinement=3)
    assert (s.lower, s.upper, s.N) == (0, Fraction(1, 3), 3)


def test_sandwich_k5():
    s = cd_sandwich(step_from_graph(complete_graph(5)))
    assert s.exact and s.lower == Fraction(1, 625) and s.upper == Fraction(1, 625) + Fraction(1, 5)


def test_diagonal_graph_of_constant():
    assert diagonal_graph(constant_graphon(1), 7) == complete_graph(7)


def test_constant_one_budget_limited():
    s = cd_sandwich(constant_graphon(1), refinement=7, max_nodes=2000, time_limit=30)
    assert s.cr >= 9 and s.lower >= Fraction(9, 2401)
    assert s.exact or s.cr == 9
    assert 24 * float(Fraction(9, 2401)) <= 3 / 8


@pytest.mark.slow
def test_constant_one_k7_exact():
    s = cd_sandwich(constant_graphon(1), refinement=7, max_nodes=10 ** 9, time_limit=3600)
    assert s.exact and s.lower == Fraction(9, 2401)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6), st.fractions(Fraction(1, 5), 1, max_denominator=5))
def test_sandwich_scaling(seed, a):
    W = step_from_graph(random_weighted_graph(6, 0.9, seed, 3))
    x, y = cd_sandwich(W), cd_sandwich(W.scaled(a))
    assert x.exact and y.exact
    assert y.lower == a * a * x.lower
    assert x.lower <= x.upper


# -- convex position ---------------------------------------------------------------------

def test_convex_position_matches_hull():
    rng = np.random.default_rng(0)
    P = rng.random((2000, 4, 2))
    got = convex_position(P[:, 0], P[:, 1], P[:, 2], P[:, 3])
    want = np.array([convex_by_hull(p) for p in P])
    assert (got == want).all()


def test_convex_position_examples():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    inner = np.array([[0, 0], [4, 0], [0, 4], [1, 1]], dtype=float)
    assert convex_position(*sq).item()
    assert not convex_position(*inner).item()


# -- sylvester ------------------------------------------------------------------------------

@pytest.mark.parametrize("R", [square(), triangle(), disk()], ids=["square", "triangle", "disk"])
def test_quadrature_oracle_agrees_with_analytic(R):
    want = {"square": SQUARE_P, "triangle": TRIANGLE_P, "disk": DISK_P}[R.name]
    assert abs(sylvester_by_quadrature(R.contains, R.bbox) - want) < 5e-3


def test_sylvester_square_small():
    p, rad = sylvester_convex_probability(square(), 200_000, seed=1)
    assert abs(p - SQUARE_P) <= rad and rad < 0.004


def test_sylvester_thread_invariance():
    a = sylvester_convex_probability(disk(), 150_000, seed=5, threads=1, chunk=20_000)
    b = sylvester_convex_probability(disk(), 150_000, seed=5, threads=3, chunk=20_000)
    assert a == b


def test_affine_invariance():
    n = 200_000
    p1, r1 = sylvester_convex_probability(square(), n, seed=2)
    para = square().transformed(np.array([[2.0, 1.3], [0.0, 0.7]]), (5.0, -1.0))
    p2, r2 = sylvester_convex_probability(para, n, seed=3)
    assert abs(p1 - p2) <= r1 + r2


def test_region_lower_bound_on_odd_regions():
    for R in (region_by_name("annulus", [0.8, 1.0]), boxes([(0, 0, 1, 1), (3, 0, 4, 1)])):
        p, rad = sylvester_convex_probability(R, 100_000, seed=4)
        assert p >= INF_LOWER - rad


def test_degenerate_region():
    with pytest.raises(RegionError):
        sample_region(region_by_name("annulus", [0.99999999, 1.0]), 10, np.random.default_rng(0))
    with pytest.raises((DomainError, RegionError, ValueError)):
        region_by_name("nonsense")


def test_clopper_pearson():
    r = clopper_pearson_radius(694_444, 1_000_000)
    assert 0.0011 < r < 0.0013
    assert clopper_pearson_radius(0, 100) > 0


# -- rectilinear upper bounds ------------------------------------------------------------------

@pytest.mark.parametrize("n,want", [(4, 0), (5, 1), (6, 3)])
def test_rectilinear_small(n, want):
    best, pts, hist = rectilinear_density_upper(n, 100_000, seed=0)
    assert best == want and pts.shape == (n, 2)


def test_rectilinear_history_monotone():
    best, pts, hist = rectilinear_density_upper(9, 20_000, seed=1, batch=1000)
    mins = [h[1] for h in hist]
    assert all(a >= b for a, b in zip(mins, mins[1:]))
    assert mins[-1] == best and best >= 36


def test_rectilinear_domain():
    with pytest.raises(DomainError):
        rectilinear_density_upper(3)
