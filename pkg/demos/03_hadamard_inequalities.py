"""Quadratic metric inequalities: which finite spaces could sit inside a Hadamard space."""

import numpy as np

from snowflake_ot import (
    evaluate_quadratic,
    ptolemy_defect,
    reshetnyak_defect,
    roundness2_inequality,
    shortest_path_metric,
)
from snowflake_ot.graphs import cycle_graph
from snowflake_ot.metric import euclidean_metric, random_tree_metric

C4 = shortest_path_metric(cycle_graph(4)).d
rep = evaluate_quadratic(roundness2_inequality(), C4)
print(f"4-cycle: lhs {rep.lhs}, rhs {rep.rhs}, needs distortion >= {rep.min_D:.6f}")

rng = np.random.default_rng(3)
worst_r, worst_t = np.inf, np.inf
for _ in range(2000):
    worst_r = min(worst_r, reshetnyak_defect(euclidean_metric(rng.normal(size=(4, 3)))))
    T = random_tree_metric(10, rng)
    idx = rng.choice(10, 4, replace=False)
    worst_t = min(worst_t, reshetnyak_defect(T[np.ix_(idx, idx)]))
print(f"Reshetnyak minimum defect: Euclidean {worst_r:.2e}, trees {worst_t:.2e}")

pt = ptolemy_defect(euclidean_metric(rng.normal(size=(4, 2))))
print(f"Ptolemy slack {pt.slack:.6f} >= quadruple lower bound {pt.defect_lower:.6f}")
print(f"  weights {np.round(pt.weights, 4)}, gap to the quadruple evaluation {pt.reproduced_gap:.1e}")
