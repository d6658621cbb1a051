"""Constrained spectral cuts.

For a threshold ``beta`` the candidate cuts are the generalized eigenvectors
of ``Lbar v = lam (Qbar - beta/vol I) v`` with ``lam > 0``. Each is rescaled to
``v.v = vol``; its cost is ``v' Lbar v`` and its purity ``v' Qbar v``. The
Lagrange multiplier of the norm constraint is ``-lam * beta / vol`` and is not
kept.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import DEFAULT
from .constraints import BetaPolicy, from_matrix, from_source_graph, resolve_beta
from .errors import InvalidInput, NoFeasibleCut, SingularWeighting
from .linalg import kmeans, solve_pencil


@dataclass(frozen=True)
class FeasibleCut:
    lam: float
    v: np.ndarray
    u: np.ndarray
    cost: float
    purity: float
    index: int = 0


@dataclass(frozen=True)
class FeasibleSet:
    cuts: tuple
    beta: float
    n_complex: int = 0
    n_nonpositive: int = 0
    n_trivial: int = 0

    def __iter__(self):
        return iter(self.cuts)

    def __len__(self):
        return len(self.cuts)

    def __getitem__(self, i):
        return self.cuts[i]


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray
    k: int
    beta: Optional[float]
    source: str
    cuts: tuple = ()
    feasible: Optional[FeasibleSet] = field(default=None, repr=False)

    @property
    def n(self):
        return len(self.labels)

    @property
    def cut(self):
        return self.cuts[0] if self.cuts else None


def _ranking_key(c):
    return (c.cost, -c.purity, c.index)


def feasible_set(graph, cm, beta, tol=DEFAULT):
    """All non-trivial positive-eigenvalue cuts, ascending by cost."""
    vol = graph.vol
    b = cm.qbar - (beta / vol) * np.eye(graph.n)
    spectrum = solve_pencil(graph.lbar, b, tol, a_factor=graph.lbar_factor)
    trivial = graph.trivial
    inv_sqrt_d = 1.0 / graph.sqrt_degrees
    cuts = []
    n_nonpos = spectrum.n_nonfinite
    n_trivial = 0
    for idx, pair in enumerate(spectrum.pairs):
        if not pair.value > tol.positive_lambda:
            n_nonpos += 1
            continue
        v = pair.vector * (np.sqrt(vol) / np.linalg.norm(pair.vector))
        if abs(np.dot(pair.vector, trivial)) / np.linalg.norm(pair.vector) >= 1.0 - tol.trivial_cos:
            n_trivial += 1
            continue
        v.setflags(write=False)
        u = inv_sqrt_d * v
        u.setflags(write=False)
        cuts.append(
            FeasibleCut(pair.value, v, u, float(v @ graph.lbar @ v), float(v @ cm.qbar @ v), idx)
        )
    cuts.sort(key=_ranking_key)
    fs = FeasibleSet(tuple(cuts), float(beta), spectrum.n_complex, n_nonpos, n_trivial)
    if not cuts:
        raise NoFeasibleCut(
            f"no feasible cut at beta={beta:.6g}",
            fs.n_complex,
            fs.n_nonpositive,
            fs.n_trivial,
        )
    return fs


def sign_labels(u):
    """Label 0 for entries >= 0, 1 for negative entries."""
    return (np.asarray(u) < 0).astype(int)


def two_means_labels(u, seed=0):
    """Split a 1-D indicator into the two groups its values cluster into.

    Labels are oriented so that the group holding the largest entry is 0.
    """
    u = np.asarray(u, dtype=float)
    labels = kmeans(u[:, None], 2, seed=seed, restarts=5).labels
    if labels[int(np.argmax(u))] != 0:
        labels = 1 - labels
    return labels


def _discretize(u, how, seed):
    if how == "sign":
        return sign_labels(u)
    if how == "two-means":
        return two_means_labels(u, seed)
    raise InvalidInput(f"unknown discretization {how!r}")


def csp_two_way(graph, cm, policy=None, n_constraints=0, discretize="sign", seed=0, tol=DEFAULT):
    """Two-way constrained cut: the cheapest feasible cut, split by sign of u*."""
    policy = policy or BetaPolicy.fraction(0.5)
    beta = resolve_beta(policy, cm, graph, 2, n_constraints, tol)
    fs = feasible_set(graph, cm, beta, tol)
    best = fs.cuts[0]
    return Partition(_discretize(best.u, discretize, seed), 2, beta, "two_way", (best,), fs)


_KWAY_MODES = {"embed": "embed_kmeans", "sign": "sign_kmeans", "wsign": "weighted_sign_kmeans"}


def csp_k_way(graph, cm, policy=None, k=2, mode="embed_kmeans", seed=0, n_constraints=0, tol=DEFAULT):
    """K-way constrained partition from the K-1 cheapest feasible cuts."""
    mode = _KWAY_MODES.get(mode, mode)
    if mode not in _KWAY_MODES.values():
        raise InvalidInput(f"unknown k-way mode {mode!r}")
    if k < 2:
        raise InvalidInput(f"k must be >= 2, got {k}")
    policy = policy or BetaPolicy.fraction(0.5)
    beta = resolve_beta(policy, cm, graph, k, n_constraints, tol)
    fs = feasible_set(graph, cm, beta, tol)
    if len(fs) < k - 1:
        raise NoFeasibleCut(
            f"need {k - 1} feasible cuts, found {len(fs)}", fs.n_complex, fs.n_nonpositive, fs.n_trivial
        )
    chosen = fs.cuts[: k - 1]
    rows = kway_embedding(np.column_stack([c.v for c in chosen]), graph, mode)
    labels = kmeans(rows, k, seed=seed).labels
    return Partition(labels, k, beta, f"k_way({mode})", tuple(chosen), fs)


def kway_embedding(V, graph, mode="embed_kmeans"):
    """Rows handed to K-means for the columns ``V`` of volume-scaled cuts."""
    U = V / graph.sqrt_degrees[:, None]
    if mode == "embed_kmeans":
        return U
    if mode == "sign_kmeans":
        return np.sign(U)
    gram = V.T @ graph.lbar @ V
    if np.min(np.abs(np.diag(gram))) <= 1e-12 * graph.vol or np.linalg.cond(gram) > 1e12:
        raise SingularWeighting("V' Lbar V is singular")
    return np.sign(U @ np.linalg.inv(gram))


def transfer_cut(target, source, policy=None, tol=DEFAULT):
    """Cut the target graph with the source affinities as soft must-links.

    Returns the partition and the cost of the selected cut, which measures how
    much the source structure has to be bent to fit the target.
    """
    cm = from_source_graph(source, target)
    part = csp_two_way(target, cm, policy, tol=tol)
    part = Partition(part.labels, 2, part.beta, "transfer", part.cuts, part.feasible)
    return part, part.cut.cost


def unconstrained_ncut(graph, k=2, seed=0):
    """Normalized-cut spectral clustering, the ``Qbar = I`` special case."""
    w, V = np.linalg.eigh(graph.lbar)
    vol = graph.vol
    cuts = []
    for i in range(1, min(k, graph.n)):
        v = V[:, i]
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            v = -v
        v = v * np.sqrt(vol)
        v.setflags(write=False)
        u = v / graph.sqrt_degrees
        u.setflags(write=False)
        cuts.append(FeasibleCut(float(w[i]), v, u, float(v @ graph.lbar @ v), float(v @ v), i))
    if k == 2:
        labels = sign_labels(cuts[0].u)
    else:
        labels = kmeans(np.column_stack([c.u for c in cuts]), k, seed=seed).labels
    return Partition(labels, k, None, "unconstrained", tuple(cuts))


@dataclass(frozen=True)
class JNRSample:
    cost_coord: float
    purity_coord: float
    origin: str


def jnr_samples(graph, cm, cuts=(), include_unconstrained=True):
    """Points of the joint numerical range (v' Lbar v, v' Qbar v) with |v| = 1."""
    out = []
    if include_unconstrained:
        _, V = np.linalg.eigh(graph.lbar)
        for i in range(graph.n):
            v = V[:, i]
            out.append(JNRSample(float(v @ graph.lbar @ v), float(v @ cm.qbar @ v), "unconstrained_eigvec"))
    for c in cuts:
        v = c.v / np.linalg.norm(c.v)
        out.append(JNRSample(float(v @ graph.lbar @ v), float(v @ cm.qbar @ v), "feasible_cut"))
    return out


def no_information(graph):
    """Constraint matrix Q = D, whose normalized form is the identity."""
    return from_matrix(np.diag(graph.degrees), graph)
