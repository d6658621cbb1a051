"""Numerical tolerances shared by every module."""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    eig_residual: float = 1e-8
    pencil_residual: float = 1e-6
    # |Im lambda| <= reality * (1 + |Re lambda|)
    reality: float = 1e-8
    # smallest eigenvalue of b above which the Cholesky route is taken
    definite: float = 1e-10
    jitter: tuple = (1e-12, 1e-10, 1e-8)
    positive_lambda: float = 1e-8
    # |cos(v, D^1/2 1)| >= 1 - trivial_cos marks the trivial vector
    trivial_cos: float = 1e-6
    beta_slack: float = 1e-12
    kmeans_shift: float = 1e-6
    kmeans_max_iter: int = 100
    symmetry: float = 1e-8
    degree_rel: float = 1e-10


DEFAULT = Tolerances()
