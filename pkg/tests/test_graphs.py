import math

import numpy as np
import pytest

from snowflake_ot.errors import DegreeLTTwo, Disconnected, InputError, KZero, NotRegular
from snowflake_ot.graphs import (
    Graph,
    complete_graph,
    cycle_graph,
    lambda2,
    poincare_defect,
    poincare_sharp_rhs,
    random_regular_graph,
    shortest_path_metric,
    subdivide,
    subdivision_lower_bound,
)


def test_subdivide_edge_and_identity():
    P = subdivide(Graph(2, [(0, 1)]), 4)
    assert P.n == 5 and len(P.edges) == 4
    assert shortest_path_metric(P).d[0, 1] == 4
    C = cycle_graph(5)
    assert subdivide(C, 1).edges == C.edges
    with pytest.raises(KZero):
        subdivide(C, 0)


def test_subdivide_triangle_is_hexagon():
    H = subdivide(cycle_graph(3), 2)
    assert H.n == 6 and len(H.edges) == 6 and H.is_connected() and H.degree == 2
    assert H.labels[3:] == [(0, 1), (1, 1), (2, 1)]


def test_shortest_paths():
    assert np.array_equal(shortest_path_metric(complete_graph(5)).d, np.ones((5, 5)) - np.eye(5))
    assert shortest_path_metric(cycle_graph(4)).d[0, 2] == 2
    with pytest.raises(Disconnected):
        shortest_path_metric(Graph(4, [(0, 1), (2, 3)]))


def test_rescaling_is_exact(rng):
    for _ in range(5):
        G = random_regular_graph(10, 3, rng)
        D = shortest_path_metric(G).d
        for k in (2, 3, 5):
            assert np.array_equal(shortest_path_metric(subdivide(G, k)).d[:10, :10], k * D)


def test_lambda2_known_spectra():
    assert lambda2(complete_graph(4)) == pytest.approx(-1 / 3, abs=1e-12)
    assert lambda2(cycle_graph(4)) == pytest.approx(0, abs=1e-12)
    for n in range(3, 13):
        assert lambda2(cycle_graph(n)) == pytest.approx(math.cos(2 * math.pi / n), abs=1e-9)
    with pytest.raises(NotRegular):
        lambda2(Graph(3, [(0, 1), (1, 2)]))


def test_lanczos_branch_agrees_with_dense(monkeypatch):
    import snowflake_ot.graphs as g

    G = cycle_graph(40)
    dense = lambda2(G)
    monkeypatch.setattr(g, "DENSE_EIG_LIMIT", 10)
    assert lambda2(G) == pytest.approx(dense, abs=1e-9)


def test_poincare(rng):
    G = random_regular_graph(12, 3, rng)
    lhs, rhs = poincare_defect(G, np.ones(12))
    assert lhs == pytest.approx(0, abs=1e-24) and rhs == 0
    for _ in range(20):
        lhs, rhs = poincare_defect(G, rng.normal(size=(12, 3)))
        assert lhs <= rhs + 1e-12


def test_poincare_eigenvector_is_tight_for_the_sharp_constant():
    for G in (cycle_graph(10), complete_graph(5)):
        lam, v = lambda2(G, return_vector=True)
        lhs, rhs = poincare_defect(G, v, lam)
        assert lhs == pytest.approx(poincare_sharp_rhs(G, v, lam), rel=1e-10)
        assert rhs == pytest.approx(2 * lhs, rel=1e-10)


def test_subdivision_bound():
    b = subdivision_lower_bound(cycle_graph(4), 1)
    assert b.lambda2 == pytest.approx(0, abs=1e-12)
    assert b.term_a == pytest.approx(math.sqrt(2))
    assert b.term_b == pytest.approx(2)
    with pytest.raises(DegreeLTTwo):
        subdivision_lower_bound(Graph(2, [(0, 1)]), 2)


def test_random_regular(rng):
    G = random_regular_graph(20, 3, rng)
    assert G.degree == 3 and G.is_connected()
    with pytest.raises(InputError):
        random_regular_graph(5, 3, rng)
