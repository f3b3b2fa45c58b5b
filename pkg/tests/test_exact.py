import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from crosskit.drawing import crossing_weight
from crosskit.errors import DomainError
from crosskit.exact import crossing_number_exact, crossing_number_quotient, crossing_number_upper, lower_bound
from crosskit.graph import (VertexPartition, WeightedGraph, blow_up, complete_bipartite, complete_graph,
                            quotient, random_graph, random_weighted_graph)


@pytest.mark.parametrize("G,want", [
    (complete_graph(4), 0),
    (complete_graph(5), 1),
    (complete_graph(6), 3),
    (complete_bipartite(3, 3), 1),
    (complete_bipartite(4, 4), 4),
])
def test_known_values(G, want):
    s = crossing_number_exact(G)
    assert s.exact and s.value == want
    s.drawing.validate()
    assert crossing_weight(s.drawing) == want


def test_half_weight_k5():
    s = crossing_number_exact(complete_graph(5, Fraction(1, 2)))
    assert s.exact and s.value == Fraction(1, 4)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.fractions(Fraction(1, 10), 1, max_denominator=10))
def test_scaling(seed, a):
    G = random_weighted_graph(6, 0.8, seed, 4)
    x = crossing_number_exact(G)
    y = crossing_number_exact(G.scaled(a))
    assert x.exact and y.exact
    assert y.value == a * a * x.value


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_monotone_and_sandwiched(seed):
    G = random_graph(7, 0.6, seed)
    s = crossing_number_exact(G)
    assert s.exact
    assert lower_bound(G) <= s.value <= crossing_number_upper(G, restarts=5, seed=seed).value
    if G.m:
        e = G.edges()[seed % G.m]
        H = WeightedGraph(G.n, {f: w for f, w in G.weights.items() if f != e})
        assert crossing_number_exact(H).value <= s.value


def test_upper_bounds():
    assert crossing_number_upper(complete_graph(6)).value == 3
    assert crossing_number_upper(complete_graph(8), restarts=100).value <= 18


def test_quotient_of_blow_up():
    G = blow_up(complete_graph(5), 3)
    P = VertexPartition(tuple(tuple(range(3 * i, 3 * i + 3)) for i in range(5)))
    s = crossing_number_quotient(quotient(G, P))
    assert s.exact and s.value == 1


def test_budget_errors():
    with pytest.raises(DomainError):
        crossing_number_exact(complete_graph(5), max_nodes=0)
    with pytest.raises(DomainError):
        crossing_number_exact(complete_graph(5), time_limit=0)


def test_budget_exhaustion_is_flagged():
    s = crossing_number_exact(complete_graph(7), max_nodes=10)
    assert not s.exact and s.value >= 9


def test_without_incumbent_agrees():
    for seed in range(3):
        G = random_weighted_graph(6, 0.8, seed, 3)
        a = crossing_number_exact(G)
        b = crossing_number_exact(G, use_incumbent=False, time_limit=60)
        if b.exact:
            assert a.value == b.value


@pytest.mark.slow
def test_k7_certified():
    t = time.time()
    s = crossing_number_exact(complete_graph(7), max_nodes=10 ** 9, time_limit=3600)
    assert s.value == 9 and s.exact, (s.nodes_explored, time.time() - t)
