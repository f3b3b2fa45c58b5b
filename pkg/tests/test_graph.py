from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crosskit.errors import DomainError, ParseError, StructureError
from crosskit.graph import (VertexPartition, WeightedGraph, averaged, blow_up, complete_bipartite,
                            complete_graph, crossing_lower_bound, edge_mass, grid_graph,
                            induced_subgraph, parse_graph, quotient, random_graph,
                            random_weighted_graph, serialize_graph, zarankiewicz_kn)


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    ws = {}
    for e in pairs:
        k = draw(st.integers(0, 4))
        if k:
            ws[e] = Fraction(k, 4)
    return WeightedGraph(n, ws)


@st.composite
def partitions(draw, n):
    labels = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    groups = {}
    for v, c in enumerate(labels):
        groups.setdefault(c, []).append(v)
    return VertexPartition(tuple(tuple(g) for _, g in sorted(groups.items())))


# -- parsing --------------------------------------------------------------

def test_parse_text_example():
    G = parse_graph("3\n0 1 1.0\n0 2 0.5")
    assert G.n == 3
    assert G.weight(0, 1) == 1 and G.weight(0, 2) == Fraction(1, 2) and G.weight(1, 2) == 0


def test_parse_edgeless():
    G = parse_graph("2\n")
    assert G.n == 2 and G.m == 0


def test_parse_weight_out_of_range():
    with pytest.raises(DomainError):
        parse_graph("2\n0 1 1.5")


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as exc:
        parse_graph("3\n0 1\n# comment\n0 x 1\n")
    assert exc.value.line == 4


def test_parse_default_weight_and_comments():
    G = parse_graph("# header\n3  # count\n0 1\n1 2 0.25\n")
    assert G.weights == {(0, 1): 1, (1, 2): Fraction(1, 4)}


def test_parse_json():
    G = parse_graph('{"n": 3, "edges": [[0, 1, 0.1], [1, 2]]}')
    assert G.weight(0, 1) == Fraction(1, 10) and G.weight(1, 2) == 1


def test_invalid_weight_in_constructor():
    with pytest.raises(DomainError):
        WeightedGraph(2, {(0, 1): Fraction(3, 2)})


@given(graphs())
def test_roundtrip_text_and_json(G):
    for fmt in ("text", "json"):
        H = parse_graph(serialize_graph(G, fmt))
        assert H.n == G.n and H.weights == G.weights


def test_roundtrip_non_terminating_weight():
    G = WeightedGraph(2, {(0, 1): Fraction(1, 3)})
    for fmt in ("text", "json"):
        assert parse_graph(serialize_graph(G, fmt)).weights == G.weights


# -- operators --------------------------------------------------------------

def test_blow_up_single_edge():
    G = blow_up(WeightedGraph(2, {(0, 1): 1}), 2)
    assert G.n == 4
    assert set(G.weights) == {(0, 2), (0, 3), (1, 2), (1, 3)}


def test_blow_up_half_edge_m3():
    G = blow_up(WeightedGraph(2, {(0, 1): Fraction(1, 2)}), 3)
    assert G.m == 9 and set(G.weights.values()) == {Fraction(1, 2)}


def test_blow_up_zero_factor():
    with pytest.raises(DomainError):
        blow_up(complete_graph(3), 0)


@given(graphs(5))
def test_blow_up_identity_and_composition(G):
    assert blow_up(G, 1).weights == G.weights
    # vertex (v*a + i)*b + j of blow_up(blow_up(G,a),b) is v*(a*b) + (i*b + j) of blow_up(G,a*b)
    assert blow_up(blow_up(G, 2), 3).weights == blow_up(G, 6).weights


@given(graphs(5), st.integers(1, 3))
def test_quotient_of_blow_up_is_original(G, m):
    Q = quotient(blow_up(G, m), VertexPartition.blocks(G.n, m))
    assert Q.base.weights == G.weights
    assert all(d == 0 for d in Q.diagonal)


def test_quotient_k4_two_pairs():
    Q = quotient(complete_graph(4), VertexPartition(((0, 1), (2, 3))))
    assert Q.base.weights == {(0, 1): 1}
    assert Q.diagonal == (Fraction(1, 2), Fraction(1, 2))


def test_quotient_singletons_and_edgeless():
    G = complete_graph(4)
    Q = quotient(G, VertexPartition.singletons(4))
    assert Q.base.weights == G.weights and set(Q.diagonal) == {0}
    assert quotient(WeightedGraph(4, {}), VertexPartition.trivial(4)).base.m == 0


def test_quotient_rejects_non_partition():
    with pytest.raises(StructureError):
        quotient(complete_graph(4), VertexPartition(((0, 1), (1, 2, 3))))
    with pytest.raises(StructureError):
        quotient(complete_graph(4), VertexPartition(((0, 1),)))


def test_averaged_k4_two_pairs():
    A = averaged(complete_graph(4), VertexPartition(((0, 1), (2, 3))))
    assert A.weight(0, 2) == 1 and A.weight(0, 1) == Fraction(1, 2) and A.weight(2, 3) == Fraction(1, 2)


@given(st.data())
def test_averaged_properties(data):
    G = data.draw(graphs(6))
    P = data.draw(partitions(G.n))
    A = averaged(G, P)
    lab = P.labels(G.n)
    AA = averaged(A, P)
    cross = {e: w for e, w in A.weights.items() if lab[e[0]] != lab[e[1]]}
    assert {e: w for e, w in AA.weights.items() if lab[e[0]] != lab[e[1]]} == cross
    # self-pairs are dropped, so a class of size s keeps (s-1)/s of its inner density
    for (u, v), w in A.weights.items():
        if lab[u] == lab[v]:
            s = P.sizes[lab[u]]
            assert AA.weight(u, v) == w * Fraction(s - 1, s)
    assert quotient(A, P).base.weights == quotient(G, P).base.weights
    assert averaged(G, VertexPartition.singletons(G.n)).weights == G.weights


def test_induced_subgraph_examples():
    K5 = complete_graph(5)
    assert induced_subgraph(K5, [0, 2, 4]).weights == complete_graph(3).weights
    assert induced_subgraph(K5, range(5)).weights == K5.weights
    assert induced_subgraph(K5, []).n == 0
    with pytest.raises(DomainError):
        induced_subgraph(K5, [0, 7])


def test_edge_mass_counts_inner_edges_twice():
    G = complete_graph(3)
    assert edge_mass(G, [0, 1, 2], [0, 1, 2]) == 6
    assert edge_mass(G, [0], [1, 2]) == 2


# -- generators ---------------------------------------------------------------

def test_random_graph_extremes_and_determinism():
    assert random_graph(6, 1, 3).weights == complete_graph(6).weights
    assert random_graph(6, 0, 3).m == 0
    assert random_graph(20, 0.3, 5).weights == random_graph(20, 0.3, 5).weights


def test_random_graph_edge_count_concentration():
    m = random_graph(100, 0.5, 11).m
    sd = (4950 * 0.25) ** 0.5
    assert abs(m - 2475) <= 4 * sd


def test_random_weighted_graph_weights_on_grid():
    G = random_weighted_graph(10, 0.5, 2, resolution=8)
    assert all(w.denominator in (1, 2, 4, 8) and 0 < w <= 1 for w in G.weights.values())


def test_partition_validation_and_equitable():
    P = VertexPartition(((0, 2), (1, 3, 4)))
    P.validate(5)
    assert P.equitable and P.k == 2
    assert not VertexPartition(((0,), (1, 2, 3))).equitable


# -- bounds -------------------------------------------------------------------

def test_lower_bound_examples():
    assert crossing_lower_bound(grid_graph(5, 5)) == 0
    assert crossing_lower_bound(complete_graph(10)) == 21
    assert crossing_lower_bound(WeightedGraph(6, {})) == 0
    assert zarankiewicz_kn(10) == 60


def test_lower_bound_cubic_term():
    # K_12: m = 66 >= 48 = 4n, cubic term 66^3 / (64*144) ~ 31.2 < 36 = m - 3n + 6
    assert crossing_lower_bound(complete_graph(12)) == 36
    G = complete_bipartite(10, 10)
    assert crossing_lower_bound(G) == max(100 - 54, Fraction(100 ** 3, 64 * 400))
