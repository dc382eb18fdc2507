import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from snowflake_ot.errors import DimensionMismatch, EndpointInShared, InputError, ShapeMismatch
from snowflake_ot.transport import (
    Coupling,
    DiscreteMeasure,
    coupling_cost,
    validate_coupling,
    wasserstein,
    wasserstein_line,
    wasserstein_one_atom_swap,
)


def brute_force_uniform(x, y, p):
    """W_p between uniform measures of equal size by enumerating permutations."""
    n = len(x)
    best = min(
        sum(np.linalg.norm(x[i] - y[s[i]]) ** p for i in range(n)) for s in itertools.permutations(range(n))
    )
    return (best / n) ** (1 / p)


def test_diracs():
    a, b = np.array([0.0, 1.0, 2.0]), np.array([3.0, -1.0, 2.0])
    for p in (1, 1.5, 2, 3):
        cost, _ = wasserstein(DiscreteMeasure.dirac(a), DiscreteMeasure.dirac(b), p)
        assert cost == pytest.approx(np.linalg.norm(a - b), rel=1e-12)


def test_two_point_example():
    mu = DiscreteMeasure.uniform([[0.0], [1.0]])
    nu = DiscreteMeasure.uniform([[0.0], [3.0]])
    cost, plan = wasserstein(mu, nu, 2)
    assert cost == pytest.approx(math.sqrt(2), rel=1e-12)
    assert plan.to_dense()[0, 0] == pytest.approx(0.5)


def test_identity_plan():
    mu = DiscreteMeasure([[0, 0], [1, 2], [3, 1]], [0.2, 0.3, 0.5])
    cost, plan = wasserstein(mu, mu, 2)
    assert cost == pytest.approx(0, abs=1e-12)
    assert np.allclose(plan.to_dense(), np.diag(mu.weights))


def test_line_examples(rng):
    mu = DiscreteMeasure.uniform([[0.0], [1.0]])
    nu = DiscreteMeasure.uniform([[2.0], [5.0]])
    assert wasserstein_line(mu, nu, 1) == pytest.approx(3)
    assert wasserstein_line(mu, mu, 2) == 0
    for _ in range(50):
        k, l = rng.integers(1, 7, size=2)
        a = DiscreteMeasure(rng.normal(size=(k, 1)), rng.dirichlet(np.ones(k)))
        b = DiscreteMeasure(rng.normal(size=(l, 1)), rng.dirichlet(np.ones(l)))
        p = rng.choice([1.0, 1.5, 2.0, 3.0])
        assert wasserstein_line(a, b, p) == pytest.approx(wasserstein(a, b, p)[0], rel=1e-10, abs=1e-12)
    with pytest.raises(DimensionMismatch):
        wasserstein_line(DiscreteMeasure.uniform([[0.0, 1.0]]), mu, 2)


def test_generic_solver_matches_brute_force(rng):
    for _ in range(40):
        n = int(rng.integers(1, 6))
        x, y = rng.normal(size=(2, n, 2))
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        got, _ = wasserstein(DiscreteMeasure.uniform(x), DiscreteMeasure.uniform(y), p)
        assert got == pytest.approx(brute_force_uniform(x, y, p), rel=1e-10)


def test_non_uniform_goes_through_lp(rng):
    # two atoms against one: every coupling is forced
    mu = DiscreteMeasure([[0.0], [2.0]], [0.25, 0.75])
    nu = DiscreteMeasure.dirac([1.0])
    assert wasserstein(mu, nu, 2)[0] == pytest.approx(1.0)


def test_one_atom_swap_examples():
    cost, path = wasserstein_one_atom_swap(np.empty((0, 2)), np.array([0.0, 0.0]), np.array([3.0, 4.0]), 2, N=1)
    assert cost == pytest.approx(5)
    cost, path = wasserstein_one_atom_swap(np.array([[1.0]]), np.array([0.0]), np.array([2.0]), 2, N=2)
    assert cost == pytest.approx(1.0)
    assert len(path) == 3


def test_one_atom_swap_errors():
    with pytest.raises(EndpointInShared):
        wasserstein_one_atom_swap(np.array([[1.0]]), np.array([1.0]), np.array([2.0]), 2)
    with pytest.raises(InputError):
        wasserstein_one_atom_swap(np.array([[1.0]]), np.array([0.0]), np.array([2.0]), 2, N=5)


def test_one_atom_swap_matches_brute_force(rng):
    for _ in range(40):
        k = int(rng.integers(0, 5))
        shared = rng.normal(size=(k, 2))
        a, b = rng.normal(size=(2, 2))
        p = float(rng.choice([1.5, 2.0, 3.0]))
        got, _ = wasserstein_one_atom_swap(shared, a, b, p)
        ref = brute_force_uniform(np.vstack([shared, a]), np.vstack([shared, b]), p)
        assert got == pytest.approx(ref, rel=1e-10)


def test_coupling_validation():
    mu = DiscreteMeasure.uniform([[0.0], [1.0]])
    prod = Coupling.product(mu, mu)
    assert validate_coupling(prod, mu, mu).max == pytest.approx(0, abs=1e-15)
    assert validate_coupling(Coupling.diagonal(mu), mu, mu).max == 0
    off = Coupling.from_dense(np.array([[0.6, 0.0], [0.0, 0.5]]))
    assert validate_coupling(off, mu, mu).max == pytest.approx(0.1)
    with pytest.raises(ShapeMismatch):
        validate_coupling(Coupling.from_dense(np.eye(3) / 3), mu, mu)


def test_coupling_cost():
    mu = DiscreteMeasure.uniform([[0.0], [1.0]])
    assert coupling_cost(Coupling.diagonal(mu), mu, mu, 2) == 0
    assert coupling_cost(Coupling.product(mu, mu), mu, mu, 2) == pytest.approx(math.sqrt(0.5))
    nu = DiscreteMeasure.uniform([[0.0], [3.0]])
    cost, plan = wasserstein(mu, nu, 2)
    assert coupling_cost(plan, mu, nu, 2) == pytest.approx(cost, rel=1e-12)


def test_measure_merges_duplicates():
    mu = DiscreteMeasure([[1.0], [0.0], [1.0]], [0.25, 0.5, 0.25])
    assert len(mu) == 2
    assert mu.points[0, 0] == 1.0 and mu.weights[0] == 0.5
    with pytest.raises(InputError):
        DiscreteMeasure([[0.0]], [0.5])


measures = st.integers(1, 4).flatmap(
    lambda k: st.tuples(
        st.lists(st.lists(st.floats(-5, 5), min_size=2, max_size=2), min_size=k, max_size=k),
        st.lists(st.floats(0.05, 1), min_size=k, max_size=k),
    )
)


def _measure(data):
    pts, w = data
    w = np.array(w) / np.sum(w)
    return DiscreteMeasure(pts, w)


@settings(max_examples=40, deadline=None)
@given(measures, measures, measures, st.sampled_from([1.0, 2.0, 3.0]))
def test_metric_properties(a, b, c, p):
    mu, nu, rho = _measure(a), _measure(b), _measure(c)
    ab = wasserstein(mu, nu, p)[0]
    assert ab == pytest.approx(wasserstein(nu, mu, p)[0], rel=1e-9, abs=1e-9)
    assert ab <= wasserstein(mu, rho, p)[0] + wasserstein(rho, nu, p)[0] + 1e-8
