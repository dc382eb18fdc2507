"""Snowflake embeddings of finite metric spaces into Wasserstein space over R^3,
with certifiers for the metric inequalities that bound them."""

from . import errors
from .config import RunConfig
from .embedding import (
    CertificateResult,
    DistortionReport,
    SnowflakeEmbedding,
    audit_distortion,
    build_snowflake_embedding,
    embed_l2_line,
    explicit_coupling,
    explicit_coupling_cost,
    lower_bound_certificate,
    min_k_for_epsilon,
)
from .graphs import (
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
from .inequalities import (
    DefectReport,
    QuadraticInequality,
    aggregate_inequality,
    enflo_defect,
    evaluate_quadratic,
    harmonic_inequality,
    lebedeva_petrunin_defect,
    no_squares_defect,
    permutation_inequality,
    ptolemy_defect,
    quadruple_inequality,
    reshetnyak_defect,
    roundness2_inequality,
    sturm_quadruple_inequality,
)
from .markov import (
    CThetaResult,
    ReversibleChain,
    c_theta,
    h_theta,
    markov_ratio,
    moment_inequality,
    snowflake_lower_bound,
    sturm_transfer_check,
    theta_p,
    two_point_identity_check,
    validate_chain,
)
from .metric import (
    FiniteMetricSpace,
    aspect_distortion_bound,
    aspect_ratio,
    hamming_cube,
    path_metric,
    snowflake,
    validate_metric,
)
from .transport import (
    Coupling,
    DiscreteMeasure,
    coupling_cost,
    validate_coupling,
    wasserstein,
    wasserstein_line,
    wasserstein_one_atom_swap,
)

__version__ = "0.1.0"
