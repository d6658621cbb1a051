"""Constraint matrices and the beta threshold policy.

A positive entry ``Q[i, j]`` is a must-link belief, a negative one a
cannot-link belief; the magnitude is the strength of the belief.
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .config import DEFAULT
from .errors import (
    BetaOutOfRange,
    InsufficientLabels,
    InsufficientPairs,
    InvalidConstraint,
    InvalidInput,
)
from .linalg import as_symmetric

UNKNOWN = -1


@dataclass(frozen=True)
class ConstraintList:
    """Pairwise ``(i, j, w)`` triples over ``n`` nodes.

    ``diagonal`` optionally carries explicit self-beliefs ``Q[i, i]``; the
    default leaves the diagonal at zero.
    """

    n: int
    triples: tuple = ()
    diagonal: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple((int(i), int(j), float(w)) for i, j, w in self.triples))
        if self.diagonal is not None:
            object.__setattr__(self, "diagonal", tuple(float(x) for x in self.diagonal))

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)


@dataclass(frozen=True)
class ConstraintMatrix:
    q: np.ndarray
    qbar: np.ndarray
    qbar_eigs: np.ndarray
    # "pairwise" or "transfer"; selects the beta upper bound
    kind: str = "pairwise"

    @property
    def n(self):
        return self.q.shape[0]

    @property
    def lambda_max(self):
        return float(self.qbar_eigs[-1])

    @property
    def lambda_min(self):
        return float(self.qbar_eigs[0])


def from_matrix(q, graph, kind="pairwise"):
    """Wrap a dense symmetric Q, normalizing it by the graph's degrees."""
    q = as_symmetric(q, "constraint matrix")
    if q.shape[0] != graph.n:
        raise InvalidConstraint(f"constraint matrix is {q.shape[0]}x{q.shape[0]}, graph has {graph.n} nodes")
    qbar = graph.normalize(q)
    eigs = np.linalg.eigvalsh(qbar)
    eigs.setflags(write=False)
    return ConstraintMatrix(q, qbar, eigs, kind)


def materialize(clist, graph):
    if clist.n != graph.n:
        raise InvalidConstraint(f"constraint list is over {clist.n} nodes, graph has {graph.n}")
    n = clist.n
    q = np.zeros((n, n))
    for i, j, w in clist.triples:
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidConstraint(f"index out of range: ({i}, {j}) with n={n}")
        if i == j:
            raise InvalidConstraint(f"self-constraint ({i}, {i}); use the diagonal field")
        q[i, j] += w
        q[j, i] += w
    if clist.diagonal is not None:
        if len(clist.diagonal) != n:
            raise InvalidConstraint("diagonal length does not match n")
        q[np.diag_indices(n)] = clist.diagonal
    return from_matrix(q, graph)


def labels_to_list(labels):
    """+1 for every labelled pair with equal labels, -1 otherwise."""
    labels = np.asarray(labels, dtype=int)
    known = np.flatnonzero(labels != UNKNOWN)
    if len(known) < 2:
        raise InsufficientLabels(f"need at least two labelled nodes, got {len(known)}")
    triples = [(i, j, 1.0 if labels[i] == labels[j] else -1.0) for i, j in combinations(known, 2)]
    return ConstraintList(len(labels), triples)


def from_labels(labels, graph):
    return materialize(labels_to_list(labels), graph)


def from_source_graph(source, target):
    """Use the source affinity as a must-link-only constraint matrix on the target."""
    if source.n != target.n:
        raise InvalidConstraint(f"source has {source.n} nodes, target has {target.n}")
    return from_matrix(source.a, target, kind="transfer")


def _pairs_by_relation(truth, baseline, strategy, among=None):
    truth = np.asarray(truth)
    same_truth = truth[:, None] == truth[None, :]
    iu, ju = np.triu_indices(len(truth), 1)
    if among is None:
        eligible = np.ones(len(iu), dtype=bool)
    else:
        ok = np.zeros(len(truth), dtype=bool)
        ok[np.asarray(among, dtype=int)] = True
        eligible = ok[iu] & ok[ju]
    if strategy == "uniform":
        mask = eligible
    elif strategy == "misclustered":
        if baseline is None:
            raise InvalidInput("misclustered sampling needs a baseline partition")
        base = np.asarray(getattr(baseline, "labels", baseline))
        same_base = base[:, None] == base[None, :]
        mask = eligible & (same_truth != same_base)[iu, ju]
    else:
        raise InvalidInput(f"unknown sampling strategy {strategy!r}")
    return iu[mask], ju[mask], same_truth[iu[mask], ju[mask]]


def sample_constraints(truth, baseline=None, m=1, seed=0, strategy="uniform", among=None):
    """Draw ``m`` distinct node pairs and label them with their true relation.

    ``misclustered`` only draws pairs whose relation the baseline partition
    gets wrong. ``among`` restricts both endpoints to the given nodes.
    """
    if m < 1:
        raise InvalidInput("m must be at least 1")
    iu, ju, same = _pairs_by_relation(truth, baseline, strategy, among)
    if m > len(iu):
        raise InsufficientPairs(f"requested {m} pairs, only {len(iu)} available ({strategy})")
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(len(iu), size=m, replace=False))
    triples = [(int(iu[p]), int(ju[p]), 1.0 if same[p] else -1.0) for p in pick]
    return ConstraintList(len(truth), triples)


@dataclass(frozen=True)
class BetaPolicy:
    """How beta is chosen: ``explicit``, ``fraction`` of the admissible range,
    or ``heuristic`` (grows with the number of constraints)."""

    mode: str = "fraction"
    value: float = 0.5

    @classmethod
    def explicit(cls, beta):
        return cls("explicit", float(beta))

    @classmethod
    def fraction(cls, t):
        if not 0.0 < t < 1.0:
            raise InvalidInput(f"fraction must lie in (0, 1), got {t}")
        return cls("fraction", float(t))

    @classmethod
    def heuristic(cls):
        return cls("heuristic", 0.0)

    @classmethod
    def parse(cls, text):
        """``<real>``, ``auto`` or ``frac:<t>``."""
        text = str(text).strip()
        if text == "auto":
            return cls.heuristic()
        if text.startswith("frac:"):
            return cls.fraction(float(text[5:]))
        try:
            return cls.explicit(float(text))
        except ValueError:
            raise InvalidInput(f"cannot parse beta {text!r}; expected a number, 'auto' or 'frac:t'") from None


def upper_eigenvalue(cm, k=2):
    """The Q-bar eigenvalue whose multiple of vol bounds beta from above."""
    eigs = cm.qbar_eigs
    if cm.kind == "transfer":
        return float(eigs[-2]) if len(eigs) > 1 else float(eigs[-1])
    if k <= 2:
        return float(eigs[-1])
    if k - 1 > len(eigs):
        raise InvalidInput(f"k={k} exceeds the number of nodes")
    return float(eigs[-(k - 1)])


def beta_bound(cm, graph, k=2):
    lam = upper_eigenvalue(cm, k)
    return lam * graph.vol, lam


def check_beta(beta, cm, graph, k=2, tol=DEFAULT):
    bound, lam = beta_bound(cm, graph, k)
    if not beta < bound - tol.beta_slack * graph.vol:
        raise BetaOutOfRange(beta, bound, lam, graph.vol)
    return beta


def resolve_beta(policy, cm, graph, k=2, n_constraints=0, tol=DEFAULT):
    vol = graph.vol
    lam_hi = upper_eigenvalue(cm, k)
    lam_lo = cm.lambda_min
    hi, lo = lam_hi * vol, lam_lo * vol
    # flat spectrum (no information or Q-bar = c I): the range has no width,
    # so fractions slide a unit of vol below the bound instead
    flat = lam_hi - lam_lo <= 1e-9 * max(1.0, abs(lam_hi))
    if policy.mode == "explicit":
        beta = policy.value
    elif policy.mode == "fraction":
        t = policy.value
        beta = hi - (1.0 - t) * vol if flat else lo + t * (hi - lo)
    elif flat and policy.mode == "heuristic":
        beta = hi - 0.5 * vol
    elif policy.mode == "heuristic":
        n = graph.n
        beta = cm.lambda_max * vol * (0.5 + 0.4 * n_constraints / n**2)
        if beta >= hi - tol.beta_slack * vol:
            beta = lo + 0.99 * (hi - lo)
    else:
        raise InvalidInput(f"unknown beta mode {policy.mode!r}")
    return check_beta(float(beta), cm, graph, k, tol)
