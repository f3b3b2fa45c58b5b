from fractions import Fraction

import pytest

from crosskit.drawing import crossing_weight, planar_drawing
from crosskit.drawing.blowup import (blow_up_drawing, good_crossings, independent_crossings,
                                     project, project_random, projection_mean_exhaustive)
from crosskit.errors import DomainError
from crosskit.exact import crossing_number_exact, crossing_number_upper
from crosskit.graph import WeightedGraph, blow_up, complete_graph, random_graph


def opt_k5():
    return crossing_number_exact(complete_graph(5)).drawing


def test_factor_one_is_identity():
    D = opt_k5()
    B = blow_up_drawing(D, 1)
    assert B.crossing_pairs() == D.crossing_pairs()
    assert crossing_weight(B) == crossing_weight(D)


@pytest.mark.parametrize("m", [2, 3])
def test_k5_good_crossings(m):
    D = opt_k5()
    B = blow_up_drawing(D, m)
    B.validate()
    assert B.graph == blow_up(complete_graph(5), m)
    assert good_crossings(B, m) == m ** 4
    total = crossing_weight(B)
    # other crossings involve shared clusters; they stay within the naive bound
    assert m ** 4 <= total <= m ** 4 + 5 * m ** 3 * 10


def test_plane_drawing_has_no_good_crossings():
    D = planar_drawing(complete_graph(4))
    B = blow_up_drawing(D, 2)
    B.validate()
    assert good_crossings(B, 2) == 0


def test_blow_up_of_weighted_drawing():
    G = WeightedGraph(4, {(0, 2): Fraction(1, 2), (1, 3): Fraction(1, 3), (0, 1): 1})
    D = crossing_number_upper(G, restarts=2).drawing
    B = blow_up_drawing(D, 2)
    assert good_crossings(B, 2) == 16 * independent_crossings(D)


@pytest.mark.parametrize("G", [complete_graph(5), random_graph(6, 0.7, 4)])
def test_exhaustive_projection_mean(G):
    D = crossing_number_upper(G, restarts=3).drawing
    m = 2
    B = blow_up_drawing(D, m)
    mean = projection_mean_exhaustive(B, m)
    assert mean <= crossing_weight(B) / m ** 4
    assert mean >= crossing_number_exact(G).value


def test_random_projection_monte_carlo():
    D = opt_k5()
    m = 2
    B = blow_up_drawing(D, m)
    total = crossing_weight(B)
    vals = [crossing_weight(project_random(B, m, seed=s)) for s in range(500)]
    assert min(vals) >= 1
    assert sum(vals) / len(vals) <= total / m ** 4 + 0.5


def test_projection_is_a_drawing_of_g():
    B = blow_up_drawing(opt_k5(), 2)
    P = project(B, 2, [0, 1, 0, 1, 1])
    P.validate()
    assert P.graph == complete_graph(5)


def test_project_rejects_non_blow_ups():
    D = opt_k5()
    with pytest.raises(DomainError):
        project_random(D, 2)
    B = blow_up_drawing(D, 2)
    with pytest.raises(DomainError):
        project(B, 2, [0, 1])
    with pytest.raises(DomainError):
        blow_up_drawing(D, 0)
