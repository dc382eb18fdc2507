import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from snowflake_ot.errors import (
    AlphaOutOfRange,
    Asymmetric,
    NegativeOrZeroOffDiagonal,
    NonzeroDiagonal,
    SinglePoint,
    TriangleViolation,
)
from snowflake_ot.metric import (
    aspect_distortion_bound,
    aspect_ratio,
    euclidean_metric,
    hamming_cube,
    path_metric,
    random_graph_metric,
    random_tree_metric,
    random_uniform_metric,
    snowflake,
    symmetrize_matrix,
    validate_metric,
)


def test_two_point_space():
    X = validate_metric([[0, 1], [1, 0]])
    assert X.n == 2 and X.diameter == 1 and X.min_distance == 1


def test_triangle_violation_names_the_triple():
    with pytest.raises(TriangleViolation) as exc:
        validate_metric([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert (exc.value.i, exc.value.j, exc.value.k) == (0, 2, 1)


def test_asymmetric():
    with pytest.raises(Asymmetric) as exc:
        validate_metric([[0, 1], [2, 0]])
    assert (exc.value.i, exc.value.j) == (0, 1)


def test_diagonal_and_positivity():
    with pytest.raises(NonzeroDiagonal):
        validate_metric([[0, 1], [1, 0.5]])
    with pytest.raises(NegativeOrZeroOffDiagonal):
        validate_metric([[0, 0], [0, 0]])


def test_triangle_tolerance_scales_with_diameter():
    d = np.array([[0, 1, 2 + 1e-12], [1, 0, 1], [2 + 1e-12, 1, 0]])
    validate_metric(d)
    with pytest.raises(TriangleViolation):
        validate_metric(d, exact=True)


def test_validated_matrix_is_read_only():
    X = validate_metric([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        X.d[0, 1] = 5


def test_symmetrize_reports_deviation():
    sym, dev = symmetrize_matrix([[0, 1], [1.2, 0]])
    assert dev == pytest.approx(0.1)
    assert np.array_equal(sym, sym.T)


def test_snowflake_examples():
    X = validate_metric([[0, 4], [4, 0]])
    assert np.array_equal(snowflake(X, 0.5).d, [[0, 2], [2, 0]])
    L = path_metric(3)
    assert np.array_equal(snowflake(L, 1.0).d, L.d)
    S = snowflake(L, 0.5)
    assert sorted(S.d[np.triu_indices(3, 1)]) == pytest.approx([1, 1, math.sqrt(2)])
    for bad in (0.0, 1.5, -1):
        with pytest.raises(AlphaOutOfRange):
            snowflake(L, bad)


def test_aspect_ratio():
    assert aspect_ratio(validate_metric(np.ones((4, 4)) - np.eye(4))) == 1
    assert aspect_ratio(path_metric(3)) == 2
    X = validate_metric([[0, 1, 4], [1, 0, 4], [4, 4, 0]])
    assert aspect_ratio(X) == 4 and aspect_distortion_bound(X) == 2
    with pytest.raises(SinglePoint):
        aspect_ratio(validate_metric([[0]]))


def test_hamming_cube():
    assert np.array_equal(hamming_cube(1).d, [[0, 1], [1, 0]])
    H2 = hamming_cube(2)
    assert H2.d[H2.labels.index("00"), H2.labels.index("11")] == 2
    for k in range(1, 6):
        assert hamming_cube(k).diameter == k


def test_path_metric():
    assert np.array_equal(path_metric(3).d, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert np.array_equal(path_metric(2).d, [[0, 1], [1, 0]])


def test_random_samplers_produce_metrics(rng):
    for _ in range(20):
        validate_metric(random_graph_metric(7, rng))
        validate_metric(random_tree_metric(9, rng))
        X = random_uniform_metric(5, rng)
        assert aspect_ratio(X) <= 2


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=2, max_size=8, unique=True))
def test_euclidean_configurations_validate(pts):
    D = euclidean_metric(np.array(pts))
    if (D + np.eye(len(pts)) > 0).all():
        X = validate_metric(D)
        for a in (0.25, 0.5, 1.0):
            validate_metric(snowflake(X, a).d)
