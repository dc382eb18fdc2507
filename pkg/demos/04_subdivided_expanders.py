"""Spectral gaps of random regular graphs and the two branches of the subdivision bound."""

import numpy as np

from snowflake_ot import lambda2, random_regular_graph, subdivision_lower_bound

rng = np.random.default_rng(5)
print(f"{'n':>5} {'lambda2':>9} {'k':>3} {'term_a':>8} {'term_b':>8} {'counting':>9}")
for n in (16, 64, 256):
    G = random_regular_graph(n, 3, rng)
    for k in (1, 4, 16):
        b = subdivision_lower_bound(G, k)
        print(f"{n:5d} {b.lambda2:9.4f} {k:3d} {b.term_a:8.3f} {b.term_b:8.3f} {b.counting_ratio:9.4f}")
print("\nlambda2 of a 3-regular graph on 512 vertices:", round(lambda2(random_regular_graph(512, 3, rng)), 4))
