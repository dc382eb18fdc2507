"""The acceptance battery.

Each ``criterion_N(seed)`` returns a :class:`CriterionResult`. All sampling
goes through ``numpy.random.default_rng((seed, N))`` so a seed pins down
every configuration; runtimes are kept out of the JSON form so that reports
are byte-identical across runs.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from .embedding import (
    audit_distortion,
    build_snowflake_embedding,
    embed_l2_line,
    lower_bound_certificate,
)
from .graphs import (
    complete_graph,
    cycle_graph,
    lambda2,
    poincare_defect,
    random_regular_graph,
    shortest_path_metric,
    subdivide,
    subdivision_lower_bound,
)
from .inequalities import (
    cube_vertices,
    enflo_defect,
    evaluate_quadratic,
    harmonic_inequality,
    permutation_inequality,
    ptolemy_defect,
    quadruple_inequality,
    random_harmonic_data,
    reshetnyak_defect,
    roundness2_inequality,
    sturm_quadruple_inequality,
)
from .markov import (
    c_theta,
    markov_ratio,
    moment_inequality,
    random_reversible_chain,
    snowflake_lower_bound,
    sturm_transfer_check,
    two_point_identity_check,
)
from .metric import (
    euclidean_metric,
    random_tree_metric,
    random_uniform_metric,
    validate_metric,
)
from .transport import DiscreteMeasure, wasserstein, wasserstein_line, wasserstein_one_atom_swap

__all__ = ["CriterionResult", "CRITERIA", "run_suite"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict
    budget: float
    seconds: float = field(default=0.0, compare=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.name} ({self.seconds:.2f} s, budget {self.budget:g} s)"

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "details": self.details}


def _rng(seed, number):
    return np.random.default_rng((int(seed), number))


def equilateral(n=3):
    return validate_metric(np.ones((n, n)) - np.eye(n))


# embeddings shared by criteria 1, 2 and 4

C1_K = 810
C2_KS = (5, 25, 125)
C2_SPACES_PER_N = 3


def _c2_spaces(seed):
    rng = _rng(seed, 2)
    return [random_uniform_metric(n, rng, 1.0, 2.0) for n in (2, 3, 4) for _ in range(C2_SPACES_PER_N)]


def criterion_1(seed=0):
    X = equilateral(3)
    emb = build_snowflake_embedding(X, 2.0, C1_K)
    rep = audit_distortion(emb, 0.5)
    ok = all(1 - 1e-9 <= r <= 1.5 + 1e-9 for r in rep.ratios)
    return CriterionResult(1, "embedding upper bound, equilateral triangle", ok, {
        "K": C1_K, "N": emb.N, "ratios": rep.ratios.tolist(), "band": [1 - 1e-9, 1.5 + 1e-9],
    }, 60)


def criterion_2(seed=0):
    rows = []
    ok = True
    for s, X in enumerate(_c2_spaces(seed)):
        maxima = []
        for K in C2_KS:
            rep = audit_distortion(build_snowflake_embedding(X, 2.0, K), 1.0)
            maxima.append(rep.max_ratio)
            if rep.min_ratio < 1 - 1e-9:
                ok = False
            rows.append({"space": s, "n": X.n, "K": K, "min_ratio": rep.min_ratio, "max_ratio": rep.max_ratio})
        # K = 5, 25, 125 give nested point sets, so the maxima can only drop;
        # the 1e-12 allowance absorbs rounding on exactly equal values
        if any(b > a * (1 + 1e-12) for a, b in zip(maxima, maxima[1:])):
            ok = False
    return CriterionResult(2, "embedding lower band and monotonicity in K", ok, {"runs": rows}, 120)


def criterion_3(seed=0):
    rng = _rng(seed, 3)
    worst = 0.0
    for _ in range(200):
        dim = int(rng.integers(1, 4))
        k = int(rng.integers(0, 11))
        p = float(rng.choice([1.5, 2.0, 3.0]))
        shared = rng.normal(size=(k, dim))
        a, b = rng.normal(size=(2, dim))
        fast, _ = wasserstein_one_atom_swap(shared, a, b, p)
        mu = DiscreteMeasure(np.vstack([shared, a]))
        nu = DiscreteMeasure(np.vstack([shared, b]))
        ref, _ = wasserstein(mu, nu, p)
        worst = max(worst, abs(fast - ref) / ref)
    return CriterionResult(3, "one-atom-swap solver against the generic solver", worst <= 1e-10,
                           {"instances": 200, "max_relative_error": worst}, 30)


def criterion_4(seed=0):
    embs = [build_snowflake_embedding(equilateral(3), 2.0, C1_K)]
    embs += [build_snowflake_embedding(X, 2.0, K) for X in _c2_spaces(seed) for K in C2_KS]
    rows = []
    for e in embs:
        cert = lower_bound_certificate(e)
        rows.append({"n": e.n, "K": e.K, "passed": cert.passed, "worst_ratio": cert.worst_ratio})
    return CriterionResult(4, "partition certificate", all(r["passed"] for r in rows), {"embeddings": rows}, 60)


def criterion_5(seed=0):
    res = c_theta(0.5)
    ok = res.residual <= 1e-10 and res.monotone
    return CriterionResult(5, "c(theta) fixed point at theta = 1/2", ok, res.to_json(), 1)


def criterion_6(seed=0):
    rng = _rng(seed, 6)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 7))
        chain = random_reversible_chain(n, rng)
        R = rng.normal(size=(n, n))
        psi = R + R.T
        for t in (1, 2, 3):
            lhs, rhs = two_point_identity_check(chain, psi, t)
            worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs)))
    return CriterionResult(6, "two-point identity", worst <= 1e-12, {"chains": 100, "max_scaled_gap": worst}, 5)


def criterion_7(seed=0):
    rng = _rng(seed, 7)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        chain = random_reversible_chain(n, rng)
        D = euclidean_metric(rng.normal(size=(n, 3)))
        for m in (1, 2, 4, 8):
            worst = max(worst, markov_ratio(chain, D, 2.0, m))
    bounds = {str(m): snowflake_lower_bound(1.0, 2.0, 0.5, m, 1.0) for m in range(1, 9)}
    return CriterionResult(7, "Markov type 2 witnesses in R^3", worst <= 1 + 1e-9, {
        "chains": 100, "max_ratio": worst, "snowflake_lower_bound_K1_p2_theta_half_alpha1": bounds,
    }, 10)


def criterion_8(seed=0):
    rng = _rng(seed, 8)
    worst = -math.inf
    for _ in range(200):
        k = int(rng.integers(1, 9))
        z = rng.normal(size=k)
        w = rng.dirichlet(np.ones(k))
        for p in (1.25, 2.0, 3.0):
            for a in np.linspace(z.min() - 1, z.max() + 1, 21):
                lhs, rhs = moment_inequality(z, w, a, p)
                worst = max(worst, lhs - rhs)
    return CriterionResult(8, "theta_p moment inequality", worst <= 1e-9, {"distributions": 200, "max_excess": worst}, 5)


def _random_measure(rng, dim=3, max_atoms=4):
    k = int(rng.integers(1, max_atoms + 1))
    return DiscreteMeasure(rng.normal(size=(k, dim)), rng.dirichlet(np.ones(k)))


def criterion_9(seed=0):
    rng = _rng(seed, 9)
    worst = -math.inf
    for _ in range(50):
        k = int(rng.integers(1, 5))
        ms = [_random_measure(rng) for _ in range(k)]
        mu = _random_measure(rng)
        q = rng.dirichlet(np.ones(k))
        lhs, rhs = sturm_transfer_check(ms, q, mu, 2.0, 0.5)
        worst = max(worst, lhs - rhs)
    return CriterionResult(9, "variance inequality transferred to W_2", worst <= 1e-9, {"families": 50, "max_excess": worst}, 20)


def _hadamard_defects(D, rng, images_for_cube):
    """Scaled defects of every family on one configuration with distance matrix D."""
    n = D.shape[0]
    out = {}

    def quad_idx():
        return rng.choice(n, size=4, replace=n < 4)

    sub = lambda idx: D[np.ix_(idx, idx)]
    out["roundness2"] = evaluate_quadratic(roundness2_inequality(), sub(quad_idx())).defect
    out["reshetnyak"] = reshetnyak_defect(sub(quad_idx()))
    s, t = rng.random(2)
    out["sturm"] = evaluate_quadratic(sturm_quadruple_inequality(s, t), sub(quad_idx())).defect
    out["quadruple"] = evaluate_quadratic(quadruple_inequality(*rng.random(4) + 1e-3), sub(quad_idx())).defect
    k = int(rng.integers(2, min(n, 6) + 1))
    idx = rng.choice(n, size=k, replace=False)
    p, q, A, B = random_harmonic_data(k, rng)
    out["harmonic"] = evaluate_quadratic(harmonic_inequality(p, q, A, B), sub(idx)).defect
    out["permutation"] = evaluate_quadratic(
        permutation_inequality(rng.dirichlet(np.ones(k)), rng.permutation(k)), sub(idx)
    ).defect
    dim = int(rng.integers(1, 5))
    for label, images in images_for_cube(dim).items():
        lhs, rhs = enflo_defect(dim, images[0], metric=images[1])
        out[label] = rhs - lhs
    return out


def criterion_10(seed=0):
    rng = _rng(seed, 10)
    worst = {}
    ptolemy_worst = math.inf

    def note(defects, scale2):
        for k, v in defects.items():
            worst[k] = min(worst.get(k, math.inf), v / scale2)

    for _ in range(500):
        n = int(rng.integers(4, 9))
        k = int(rng.integers(1, 5))
        X = rng.normal(size=(n, k))
        D = euclidean_metric(X)

        def euclid_cubes(dim):
            V = np.array(cube_vertices(dim), dtype=float)
            L = rng.normal(size=(dim, k))
            linear = V @ L + rng.normal(size=k)
            lipschitz = X[rng.integers(n, size=len(V))]
            return {"enflo_linear": (linear, None), "enflo_lipschitz": (lipschitz, None)}

        note(_hadamard_defects(D, rng, euclid_cubes), float((D**2).max()))
        quad = rng.normal(size=(4, int(rng.integers(1, 5))))
        pr = ptolemy_defect(euclidean_metric(quad))
        ptolemy_worst = min(ptolemy_worst, pr.slack - pr.defect_lower, pr.defect_lower)

    for _ in range(200):
        T = random_tree_metric(int(rng.integers(4, 13)), rng)
        nv = T.shape[0]

        def tree_cubes(dim):
            ids = rng.integers(nv, size=2**dim).tolist()
            # any vertex assignment is Lipschitz on a finite cube
            return {"enflo_lipschitz": (ids, T)}

        note(_hadamard_defects(T, rng, tree_cubes), float((T**2).max()))

    overall = min(worst.values())
    ok = overall >= -1e-9 and ptolemy_worst >= -1e-12
    return CriterionResult(10, "Hadamard inequalities on Euclidean and tree configurations", ok, {
        "euclidean_configurations": 500, "tree_configurations": 200,
        "min_scaled_defect": overall, "per_family": worst, "ptolemy_min_margin": ptolemy_worst,
    }, 60)


def criterion_11(seed=0):
    D = shortest_path_metric(cycle_graph(4)).d
    rep = evaluate_quadratic(roundness2_inequality(), D)
    ok = abs(rep.min_D - math.sqrt(2.0)) <= 1e-12
    return CriterionResult(11, "4-cycle negative control", ok, rep.to_json(), 1)


def criterion_12(seed=0):
    rng = _rng(seed, 12)
    cyc = max(abs(lambda2(cycle_graph(n)) - math.cos(2 * math.pi / n)) for n in range(3, 13))
    comp = max(abs(lambda2(complete_graph(n)) + 1 / (n - 1)) for n in range(3, 11))
    rescale_ok = True
    for _ in range(20):
        n = int(rng.integers(6, 17))
        d = int(rng.choice([3, 4] if n % 2 == 0 else [4]))
        G = random_regular_graph(n, d, rng)
        DG = shortest_path_metric(G).d
        for k in (2, 3, 5):
            Dk = shortest_path_metric(subdivide(G, k)).d[:n, :n]
            rescale_ok &= bool(np.array_equal(Dk, k * DG))
    poincare_min = math.inf
    counting = []
    for t in range(100):
        n = int(rng.integers(4, 21))
        d = int(rng.choice([x for x in (2, 3, 4) if x < n and (n * x) % 2 == 0]))
        G = random_regular_graph(n, d, rng)
        g = rng.normal(size=(n, int(rng.integers(1, 4))))
        lhs, rhs = poincare_defect(G, g)
        poincare_min = min(poincare_min, (rhs - lhs) / max(1.0, rhs))
        if t < 10 and d >= 3:
            counting.append(subdivision_lower_bound(G, 2).counting_ratio)
    ok = cyc <= 1e-9 and comp <= 1e-9 and rescale_ok and poincare_min >= -1e-12
    return CriterionResult(12, "spectral suite", ok, {
        "cycle_max_error": cyc, "complete_max_error": comp, "rescaling_exact": rescale_ok,
        "poincare_min_scaled_defect": poincare_min, "counting_ratios": counting,
    }, 30)


def criterion_13(seed=0):
    rng = _rng(seed, 13)
    worst = 0.0
    for _ in range(50):
        dim = int(rng.integers(1, 7))
        k = int(rng.integers(2, 9))
        X = rng.normal(size=(k, dim))
        ms = embed_l2_line(X)
        for i in range(k):
            for j in range(i + 1, k):
                target = float(np.linalg.norm(X[i] - X[j]))
                for w in (wasserstein_line(ms[i], ms[j], 2.0), wasserstein(ms[i], ms[j], 2.0)[0]):
                    worst = max(worst, abs(w - target))
    return CriterionResult(13, "l2 into W_2 of the line", worst <= 1e-10, {"subsets": 50, "max_error": worst}, 10)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 14)}


def run_suite(seed=0, only=None, on_result=None):
    """Run the selected criteria in order; ``on_result`` sees each result as it lands."""
    results = []
    for num in sorted(only or CRITERIA):
        t0 = time.perf_counter()
        res = CRITERIA[num](seed)
        res.seconds = time.perf_counter() - t0
        results.append(res)
        if on_result is not None:
            on_result(res)
    return results
