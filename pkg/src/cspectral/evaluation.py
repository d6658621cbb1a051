"""Metrics, the Spectral Learning baseline and experiment sweeps."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import comb

from .constraints import BetaPolicy, ConstraintList, materialize, resolve_beta, sample_constraints
from .errors import CSPError, InvalidInput
from .graph import build_laplacian, rbf_affinity
from .solver import csp_k_way, csp_two_way, unconstrained_ncut


def ari(pred, truth):
    """Hubert-Arabie adjusted Rand index."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise InvalidInput(f"label vectors differ in shape: {pred.shape} vs {truth.shape}")
    n = len(pred)
    if n < 2:
        raise InvalidInput("need at least two labels")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    sum_cells = comb(table, 2).sum()
    sum_rows = comb(table.sum(axis=1), 2).sum()
    sum_cols = comb(table.sum(axis=0), 2).sum()
    total = comb(n, 2)
    expected = sum_rows * sum_cols / total
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        # both partitions trivial (all-in-one or all singletons)
        return 1.0 if sum_rows == sum_cols else 0.0
    return float((sum_cells - expected) / (max_index - expected))


def satisfaction_ratio(partition, clist):
    """Fraction of constraints honoured, ignoring weight magnitudes."""
    labels = np.asarray(getattr(partition, "labels", partition))
    triples = [t for t in clist if t[2] != 0]
    if not triples:
        raise InvalidInput("no non-zero constraints to evaluate")
    ok = 0
    for i, j, w in triples:
        same = labels[i] == labels[j]
        ok += (w > 0 and same) or (w < 0 and not same)
    return ok / len(triples)


def spectral_learning_baseline(graph, clist, k=2, seed=0):
    """Overwrite A with 1 on must-links and 0 on cannot-links, then Ncut."""
    a = np.array(graph.a)
    for i, j, w in clist:
        if w > 0:
            a[i, j] = a[j, i] = 1.0
        elif w < 0:
            a[i, j] = a[j, i] = 0.0
    return unconstrained_ncut(build_laplacian(a), k, seed)


@dataclass(frozen=True)
class MetricsReport:
    ari: Optional[float]
    satisfied_ratio: Optional[float]
    cost: float
    purity: float
    beta: float
    n_constraints: int


def metrics_report(partition, clist=None, truth=None):
    cut = partition.cut
    return MetricsReport(
        ari(partition.labels, truth) if truth is not None else None,
        satisfaction_ratio(partition, clist) if clist else None,
        cut.cost,
        cut.purity,
        partition.beta,
        len(clist) if clist else 0,
    )


@dataclass(frozen=True)
class SweepRow:
    x: float
    mean: float
    min: float
    max: float
    failures: int
    values: tuple = ()


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    seeds: tuple = ()
    metric: str = "ari"
    details: tuple = field(default=(), repr=False)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


def _summarize(x, values, failures):
    vals = [v for v in values if v is not None]
    if vals:
        return SweepRow(float(x), float(np.mean(vals)), float(np.min(vals)), float(np.max(vals)), failures, tuple(vals))
    return SweepRow(float(x), float("nan"), float("nan"), float("nan"), failures, ())


def trial_seed(seed, m, trial):
    """Seed for one (grid value, trial) cell, independent of grid order."""
    return int(np.random.SeedSequence([int(seed), int(m), int(trial)]).generate_state(1)[0])


def _convergence_trial(graph, truth, m, cell_seed, policy, strategy, baseline_labels):
    if m == 0:
        return ari(baseline_labels, truth)
    try:
        clist = sample_constraints(truth, baseline_labels, m, cell_seed, strategy)
        cm = materialize(clist, graph)
        part = csp_two_way(graph, cm, policy, n_constraints=len(clist))
    except CSPError:
        return None
    return ari(part.labels, truth)


def convergence_experiment(points, constraint_counts, trials=10, seed=0, sigma="auto",
                           policy=None, strategy="uniform", jobs=1, graph=None):
    """Mean/min/max ARI of the two-way constrained cut per number of constraints."""
    if points.labels is None:
        raise InvalidInput("convergence experiment needs ground-truth labels")
    graph = graph or rbf_affinity(points, sigma)
    policy = policy or BetaPolicy.fraction(0.9)
    truth = points.labels
    baseline = unconstrained_ncut(graph, 2).labels
    cells = [(m, t, trial_seed(seed, m, t)) for m in constraint_counts for t in range(trials)]
    args = [(graph, truth, m, s, policy, strategy, baseline) for m, _, s in cells]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_convergence_trial, *zip(*args)))
    else:
        results = [_convergence_trial(*a) for a in args]
    rows = []
    for gi, m in enumerate(constraint_counts):
        vals = results[gi * trials:(gi + 1) * trials]
        rows.append(_summarize(m, vals, sum(v is None for v in vals)))
    return SweepResult(tuple(rows), tuple(s for _, _, s in cells), "ari")


def beta_sweep(graph, cm, t_grid, k=2, clist=None, metric="purity", seed=0):
    """Solve once per fraction ``t`` of the admissible beta range."""
    if len(t_grid) == 0:
        raise InvalidInput("empty t grid")
    rows, details = [], []
    for t in t_grid:
        try:
            policy = BetaPolicy.fraction(t)
            if k == 2:
                part = csp_two_way(graph, cm, policy)
            else:
                part = csp_k_way(graph, cm, policy, k, seed=seed)
        except CSPError as exc:
            rows.append(_summarize(t, [None], 1))
            details.append({"t": float(t), "error": type(exc).__name__})
            continue
        cut = part.cut
        sat = satisfaction_ratio(part, clist) if clist else None
        d = {"t": float(t), "beta": part.beta, "cost": cut.cost, "purity": cut.purity,
             "satisfied_ratio": sat, "n_feasible": len(part.feasible)}
        details.append(d)
        rows.append(_summarize(t, [d[metric]], 0))
    return SweepResult(tuple(rows), (seed,), metric, tuple(details))
