"""Markov type of W_2(R^3): the constant c(1/2), random witnesses, and the hypercube bound."""

import numpy as np

from snowflake_ot import c_theta, markov_ratio, snowflake_lower_bound
from snowflake_ot.markov import random_reversible_chain
from snowflake_ot.metric import euclidean_metric

res = c_theta(0.5)
print(f"c(1/2) root            {res.root:.12f}  (|h - 1| = {res.residual:.1e})")
print(f"closed-form expression {res.closed_form_half:.12f}")
print("root starts with 2.08:", res.root_matches_printed)
for th in (0.3, 0.9, 0.99):
    print(f"c({th}) = {c_theta(th).root:.6f}")

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    n = int(rng.integers(2, 9))
    chain = random_reversible_chain(n, rng)
    D = euclidean_metric(rng.normal(size=(n, 3)))
    worst = max(worst, max(markov_ratio(chain, D, 2.0, m) for m in (1, 2, 4, 8)))
print(f"\nlargest Markov type-2 ratio over 200 chains in R^3: {worst:.6f}")

print("\nhypercube lower bound on the snowflake Markov constant (K=1, p=2, theta=1/2, alpha=1):")
for m in range(1, 9):
    print(f"  m={m}: {snowflake_lower_bound(1.0, 2.0, 0.5, m, 1.0):.6f}")
