"""Constrained spectral clustering with soft must-link / cannot-link beliefs."""
from .constraints import (
    BetaPolicy,
    ConstraintList,
    ConstraintMatrix,
    from_labels,
    from_matrix,
    from_source_graph,
    materialize,
    resolve_beta,
    sample_constraints,
)
from .errors import *  # noqa: F401,F403
from .evaluation import ari, beta_sweep, convergence_experiment, satisfaction_ratio, spectral_learning_baseline
from .graph import AffinityGraph, PointCloud, build_laplacian, cosine_affinity, rbf_affinity, two_moons
from .linalg import EigenPair, KMeansResult, kmeans, solve_pencil, sym_eig
from .solver import (
    FeasibleCut,
    Partition,
    csp_k_way,
    csp_two_way,
    feasible_set,
    jnr_samples,
    transfer_cut,
    unconstrained_ncut,
)

__version__ = "0.1.0"
