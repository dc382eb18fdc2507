import math

import numpy as np
import pytest

from snowflake_ot.errors import (
    ConstraintViolated,
    DegenerateWeights,
    MissingVertex,
    NegativeEntry,
    NotAPermutation,
    ShapeMismatch,
    ZeroDistance,
)
from snowflake_ot.graphs import cycle_graph, shortest_path_metric
from snowflake_ot.inequalities import (
    QuadraticInequality,
    aggregate_inequality,
    alexandrov_midpoint_defects,
    cube_vertices,
    enflo_defect,
    evaluate_quadratic,
    harmonic_inequality,
    lebedeva_petrunin_defect,
    no_squares_defect,
    permutation_inequality,
    ptolemy_defect,
    quadruple_inequality,
    random_harmonic_data,
    reshetnyak_defect,
    roundness2_inequality,
    sturm_quadruple_inequality,
)
from snowflake_ot.metric import euclidean_metric, path_metric, random_graph_metric, random_tree_metric

LINE4 = euclidean_metric([[0.0], [1.0], [2.0], [3.0]])
SQUARE = euclidean_metric([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def test_zero_inequality():
    rep = evaluate_quadratic(QuadraticInequality(np.zeros((3, 3)), np.zeros((3, 3))), path_metric(3).d)
    assert rep.lhs == rep.rhs == 0 and rep.min_D == 1


def test_roundness2_line_and_four_cycle():
    rep = evaluate_quadratic(roundness2_inequality(), LINE4)
    assert (rep.lhs, rep.rhs, rep.min_D) == (8, 12, 1)
    rep = evaluate_quadratic(roundness2_inequality(), shortest_path_metric(cycle_graph(4)).d)
    assert (rep.lhs, rep.rhs) == (8, 4)
    assert rep.min_D == pytest.approx(math.sqrt(2), abs=1e-12)


def test_harmonic_two_points_is_equality():
    A = np.array([[0, 0.5], [0.5, 0]])
    ineq = harmonic_inequality([0.5, 0.5], [0.5, 0.5], A, A)
    rep = evaluate_quadratic(ineq, np.array([[0, 3.0], [3.0, 0]]))
    assert rep.lhs == pytest.approx(4.5) and rep.rhs == pytest.approx(4.5)


def test_harmonic_zero_cells_and_errors():
    p = q = np.ones(2) / 2
    A = np.array([[0.5, 0.0], [0.0, 0.5]])
    ineq = harmonic_inequality(p, q, A, A)
    assert ineq.A[0, 1] == ineq.A[1, 0] == 0
    assert ineq.A[0, 0] == pytest.approx(0.25)
    with pytest.raises(ConstraintViolated):
        harmonic_inequality(p, q, A, np.zeros((2, 2)))
    with pytest.raises(NegativeEntry):
        harmonic_inequality(p, q, -A, A)


def test_harmonic_random_on_euclidean(rng):
    for _ in range(100):
        p, q, A, B = random_harmonic_data(4, rng)
        ineq = harmonic_inequality(p, q, A, B)
        D = euclidean_metric(rng.normal(size=(4, 3)))
        assert evaluate_quadratic(ineq, D).defect >= -1e-9


def test_permutation_inequality():
    p = np.ones(4) / 4
    ident = evaluate_quadratic(permutation_inequality(p, np.arange(4)), LINE4)
    assert ident.lhs == 0
    swap = permutation_inequality([0.5, 0.5], [1, 0])
    rep = evaluate_quadratic(swap, np.array([[0, 2.0], [2.0, 0]]))
    assert rep.lhs == pytest.approx(rep.rhs)
    # (1 3)(2 4) with uniform weights folds to roundness-2 divided by 8
    perm = permutation_inequality(p, [2, 3, 0, 1])
    agg = aggregate_inequality([(8.0, perm)])
    assert agg.same_as(roundness2_inequality())
    with pytest.raises(NotAPermutation):
        permutation_inequality(p, [0, 0, 1, 2])


def test_quadruple_specialisations():
    for s, t in [(0.3, 0.8), (0.5, 0.5), (0.1, 0.9)]:
        ineq = sturm_quadruple_inequality(s, t)
        assert ineq.A[0, 2] == pytest.approx(s * (1 - s))
        assert ineq.A[1, 3] == pytest.approx(t * (1 - t))
        assert ineq.B[1, 2] == pytest.approx((1 - s) * t)
    half = sturm_quadruple_inequality(0.5, 0.5)
    assert aggregate_inequality([(4.0, half)]).same_as(roundness2_inequality())
    with pytest.raises(DegenerateWeights):
        quadruple_inequality(0, 1, 0, 1)


def test_quadruple_on_euclidean(rng):
    for _ in range(200):
        ineq = quadruple_inequality(*rng.random(4) + 1e-3)
        D = euclidean_metric(rng.normal(size=(4, 3)))
        assert evaluate_quadratic(ineq, D).defect >= -1e-9


def test_ptolemy():
    sq = ptolemy_defect(SQUARE)
    assert sq.slack == pytest.approx(0, abs=1e-12) and sq.defect_lower == pytest.approx(0, abs=1e-12)
    line = ptolemy_defect(LINE4)
    assert line.slack == 0 and line.defect_lower == 0
    with pytest.raises(ZeroDistance):
        ptolemy_defect(np.zeros((4, 4)))


def test_ptolemy_chain_random(rng):
    for _ in range(200):
        r = ptolemy_defect(euclidean_metric(rng.normal(size=(4, 3))))
        assert r.slack >= r.defect_lower - 1e-12 >= -2e-12
        assert r.reproduced_gap <= 1e-9 * max(1.0, abs(r.slack))


def test_reshetnyak():
    assert reshetnyak_defect(LINE4) == 0
    assert reshetnyak_defect(np.zeros((4, 4))) == 0


def test_reshetnyak_random(rng):
    for _ in range(500):
        assert reshetnyak_defect(euclidean_metric(rng.normal(size=(4, 3)))) >= -1e-9
        T = random_tree_metric(8, rng)
        idx = rng.choice(8, size=4, replace=False)
        assert reshetnyak_defect(T[np.ix_(idx, idx)]) >= -1e-9 * T.max() ** 2


def test_reshetnyak_variant_with_d23_squared_is_false():
    # x4 = x1, x2 and x3 close together, x1 far away
    X = np.array([[0.0], [10.0], [11.0], [0.0]])
    D = euclidean_metric(X)
    printed = D[0, 1] ** 2 + D[1, 2] ** 2 + 2 * D[2, 3] * D[3, 0] - D[0, 2] ** 2 - D[1, 3] ** 2
    assert printed < 0
    assert reshetnyak_defect(D) >= 0


def test_enflo():
    lhs, rhs = enflo_defect(1, [np.array([0.0, 0.0]), np.array([3.0, 4.0])])
    assert lhs == rhs == 50
    lhs, rhs = enflo_defect(3, [np.zeros(2)] * 8)
    assert lhs == rhs == 0
    with pytest.raises(MissingVertex):
        enflo_defect(2, {(1, 1): 0})


def test_enflo_linear_maps_are_equalities(rng):
    for dim in (1, 2, 3, 4):
        V = np.array(cube_vertices(dim), dtype=float)
        L = rng.normal(size=(dim, 3))
        lhs, rhs = enflo_defect(dim, V @ L + rng.normal(size=3))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_aggregation():
    r2 = roundness2_inequality()
    doubled = aggregate_inequality([(2.0, r2)])
    assert np.allclose(doubled.A.sum(), 4) and np.allclose(doubled.B.sum(), 8)
    assert aggregate_inequality([(0.5, r2), (0.5, r2)]).same_as(r2)
    swapped = QuadraticInequality(r2.B, r2.A)
    zero = aggregate_inequality([(1.0, r2), (1.0, swapped)])
    assert not zero.A.any() and not zero.B.any()
    with pytest.raises(ShapeMismatch):
        QuadraticInequality(np.zeros((2, 2)), np.zeros((3, 3)))


def test_no_squares(rng):
    rep = no_squares_defect(roundness2_inequality(), np.ones((4, 4)) - np.eye(4)).report
    assert (rep.lhs, rep.rhs) == (2, 4)
    for _ in range(200):
        D = random_graph_metric(4, rng)
        ineq = quadruple_inequality(*rng.random(4) + 1e-3)
        assert no_squares_defect(ineq, D).report.defect >= -1e-9
        k = int(rng.integers(2, 6))
        p, q, A, B = random_harmonic_data(k, rng)
        assert no_squares_defect(harmonic_inequality(p, q, A, B), random_graph_metric(k, rng)).factor3_ok


def test_alexandrov_and_lebedeva_petrunin(rng):
    nonneg, nonpos = alexandrov_midpoint_defects(2.0, math.sqrt(2), 1.0, math.sqrt(5))
    assert nonneg == pytest.approx(0) and nonpos == pytest.approx(0)
    assert alexandrov_midpoint_defects(2.0, 0.0, 1.0, 1.0)[0] == 0
    for _ in range(50):
        x, y, z = rng.normal(size=(3, 3))
        w = (x + y) / 2
        d = lambda a, b: float(np.linalg.norm(a - b))
        nn, _ = alexandrov_midpoint_defects(d(x, y), d(z, w), d(x, z), d(y, z))
        assert abs(nn) <= 1e-10 * max(1, d(x, y) ** 2)
    tri = euclidean_metric([[1, 0], [-0.5, math.sqrt(3) / 2], [-0.5, -math.sqrt(3) / 2], [0, 0]]) / math.sqrt(3)
    assert lebedeva_petrunin_defect(tri) == pytest.approx(0, abs=1e-12)
    assert lebedeva_petrunin_defect(np.zeros((4, 4))) == 0
    for _ in range(50):
        P = rng.normal(size=(3, 2))
        D = euclidean_metric(np.vstack([P, P.mean(0)]))
        assert lebedeva_petrunin_defect(D) >= -1e-10
