"""Embed a small metric space into W_2 over R^3 and watch the distortion shrink with K."""

import numpy as np

from snowflake_ot import (
    audit_distortion,
    build_snowflake_embedding,
    lower_bound_certificate,
    min_k_for_epsilon,
    validate_metric,
)

# an equilateral triangle: the sufficient K for distortion 1.5 is 405
X = validate_metric(np.ones((3, 3)) - np.eye(3))
print("sufficient K for eps = 0.5:", min_k_for_epsilon(X, 2.0, 0.5))

for K in (5, 50, 405, 810):
    emb = build_snowflake_embedding(X, 2.0, K)
    rep = audit_distortion(emb, 0.5)
    cert = lower_bound_certificate(emb)
    print(f"K={K:4d}  N={emb.N:6d}  ratios={np.round(rep.ratios, 5)}  certificate={cert.passed}")

# a random space with aspect ratio at most 2
rng = np.random.default_rng(1)
d = rng.uniform(1, 2, size=(4, 4))
d = np.triu(d, 1)
Y = validate_metric(d + d.T)
emb = build_snowflake_embedding(Y, 2.0, 125)
print()
print(audit_distortion(emb, 0.5).to_csv())
