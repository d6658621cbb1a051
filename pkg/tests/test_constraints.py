import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cspectral.constraints import (
    UNKNOWN,
    BetaPolicy,
    ConstraintList,
    beta_bound,
    from_labels,
    from_source_graph,
    labels_to_list,
    materialize,
    resolve_beta,
    sample_constraints,
)
from cspectral.errors import (
    BetaOutOfRange,
    InsufficientLabels,
    InsufficientPairs,
    InvalidConstraint,
    InvalidInput,
)
from cspectral.graph import build_laplacian, rbf_affinity, two_moons
from cspectral.solver import unconstrained_ncut
from conftest import TOY_A, TOY_Q, random_connected, toy_clist

PATH3 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0.0]])


def test_toy_qbar_spectrum(toy_cm):
    vals = np.round(toy_cm.qbar_eigs, 4)
    assert np.sum(vals == 0) == 5 and vals[-1] == 2.6667


def test_empty_list_is_zero(toy_graph):
    cm = materialize(ConstraintList(6), toy_graph)
    assert not cm.q.any() and not cm.qbar.any() and not cm.qbar_eigs.any()


def test_single_must_link():
    g = build_laplacian(PATH3)
    cm = materialize(ConstraintList(3, [(0, 1, 1.0)]), g)
    assert np.count_nonzero(cm.q) == 2 and cm.q[0, 1] == cm.q[1, 0] == 1.0


def test_duplicates_sum():
    g = build_laplacian(PATH3)
    cm = materialize(ConstraintList(3, [(0, 2, 0.5), (2, 0, 0.25)]), g)
    assert cm.q[0, 2] == cm.q[2, 0] == 0.75


@pytest.mark.parametrize("triple", [(0, 3, 1.0), (1, 1, 1.0), (-1, 0, 1.0)])
def test_bad_triples(triple):
    with pytest.raises(InvalidConstraint):
        materialize(ConstraintList(3, [triple]), build_laplacian(PATH3))


def test_size_mismatch(toy_graph):
    with pytest.raises(InvalidConstraint):
        materialize(ConstraintList(3), toy_graph)


def test_from_labels_partial():
    g = build_laplacian(np.ones((4, 4)))
    cm = from_labels([0, 0, 1, UNKNOWN], g)
    assert cm.q[0, 1] == 1 and cm.q[0, 2] == cm.q[1, 2] == -1
    assert not cm.q[3].any() and not cm.q[:, 3].any()


def test_from_labels_all_same():
    g = build_laplacian(np.ones((3, 3)))
    cm = from_labels([2, 2, 2], g)
    assert np.array_equal(cm.q, np.ones((3, 3)) - np.eye(3))


def test_from_labels_toy_coloring(toy_graph):
    cm = from_labels([0, 0, 0, 0, 1, 1], toy_graph)
    assert np.array_equal(cm.q, TOY_Q - np.diag(np.diag(TOY_Q)))


def test_from_labels_needs_two():
    g = build_laplacian(PATH3)
    with pytest.raises(InsufficientLabels):
        from_labels([0, UNKNOWN, UNKNOWN], g)


@settings(max_examples=40, deadline=None)
@given(labels=st.lists(st.integers(-1, 3), min_size=2, max_size=12))
def test_labels_list_consistent(labels):
    if sum(x != UNKNOWN for x in labels) < 2:
        return
    seen = {}
    for i, j, w in labels_to_list(labels):
        assert seen.setdefault((i, j), np.sign(w)) == np.sign(w)
        assert (w > 0) == (labels[i] == labels[j])


def test_source_equals_target(toy_graph):
    cm = from_source_graph(toy_graph, toy_graph)
    assert np.allclose(cm.qbar, np.eye(6) - toy_graph.lbar)
    assert cm.kind == "transfer"


def test_source_random_pair_spectrum(rng):
    s, t = random_connected(rng, 20), random_connected(rng, 20)
    cm = from_source_graph(s, t)
    oracle = np.linalg.eigvals(cm.qbar)
    assert np.allclose(oracle.imag, 0)
    assert np.allclose(np.sort(oracle.real), cm.qbar_eigs, atol=1e-10)
    ratio = np.max(s.degrees) / np.min(t.degrees)
    assert np.all(np.abs(cm.qbar_eigs) <= ratio + 1e-12)


def test_source_size_mismatch(toy_graph):
    with pytest.raises(InvalidConstraint):
        from_source_graph(build_laplacian(PATH3), toy_graph)


def test_misclustered_needs_errors():
    truth = np.array([0, 0, 1, 1])
    with pytest.raises(InsufficientPairs):
        sample_constraints(truth, truth, 1, strategy="misclustered")


def test_single_pair_uniform():
    assert sample_constraints([0, 1], m=1).triples == ((0, 1, -1.0),)
    assert sample_constraints([3, 3], m=1).triples == ((0, 1, 1.0),)


def test_moons_sample_consistent():
    pc = two_moons(100, 0.1, seed=2)
    clist = sample_constraints(pc.labels, None, 500, seed=4)
    pairs = [(i, j) for i, j, _ in clist]
    assert len(set(pairs)) == 500 and all(i < j for i, j in pairs)
    for i, j, w in clist:
        assert (w > 0) == (pc.labels[i] == pc.labels[j])


def test_misclustered_only_wrong_pairs():
    pc = two_moons(100, 0.1, seed=2)
    base = unconstrained_ncut(rbf_affinity(pc, 0.2)).labels
    for i, j, w in sample_constraints(pc.labels, base, 30, seed=1, strategy="misclustered"):
        assert (base[i] == base[j]) != (pc.labels[i] == pc.labels[j])
        assert (w > 0) == (pc.labels[i] == pc.labels[j])


def test_sampling_deterministic():
    truth = np.arange(20) % 3
    assert sample_constraints(truth, m=10, seed=5) == sample_constraints(truth, m=10, seed=5)


def test_toy_explicit_beta(toy_graph, toy_cm):
    assert resolve_beta(BetaPolicy.explicit(14), toy_cm, toy_graph) == 14
    with pytest.raises(BetaOutOfRange, match=r"2\.6667\*vol"):
        resolve_beta(BetaPolicy.explicit(42), toy_cm, toy_graph)


def test_bound_is_strict(toy_graph, toy_cm):
    bound, _ = beta_bound(toy_cm, toy_graph)
    with pytest.raises(BetaOutOfRange):
        resolve_beta(BetaPolicy.explicit(bound), toy_cm, toy_graph)


def test_heuristic_without_constraints(toy_graph, toy_cm):
    beta = resolve_beta(BetaPolicy.heuristic(), toy_cm, toy_graph, n_constraints=0)
    assert beta == pytest.approx(0.5 * toy_cm.lambda_max * toy_graph.vol)


def test_heuristic_is_clamped(toy_graph, toy_cm):
    beta = resolve_beta(BetaPolicy.heuristic(), toy_cm, toy_graph, n_constraints=10 * 36)
    assert beta < toy_cm.lambda_max * toy_graph.vol


def test_kway_bound_uses_k_minus_1(rng):
    g = random_connected(rng, 10)
    q = rng.normal(size=(10, 10))
    cm = materialize(ConstraintList(10, [(i, j, q[i, j]) for i in range(10) for j in range(i + 1, 10)]), g)
    assert beta_bound(cm, g, 4)[1] == cm.qbar_eigs[-3]


def test_transfer_bound_second_largest(toy_graph):
    cm = from_source_graph(toy_graph, toy_graph)
    assert beta_bound(cm, toy_graph)[1] == cm.qbar_eigs[-2]


def test_beta_parse():
    assert BetaPolicy.parse("auto").mode == "heuristic"
    assert BetaPolicy.parse("frac:0.25") == BetaPolicy.fraction(0.25)
    assert BetaPolicy.parse("3.5") == BetaPolicy.explicit(3.5)
    for bad in ("frac:1.0", "x"):
        with pytest.raises(InvalidInput):
            BetaPolicy.parse(bad)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), t=st.lists(st.floats(0.01, 0.99), min_size=2, max_size=6, unique=True))
def test_fraction_strictly_increasing(seed, t):
    rng = np.random.default_rng(seed)
    g = random_connected(rng, 8)
    trip = [(i, j, rng.normal()) for i in range(8) for j in range(i + 1, 8) if rng.random() < 0.5]
    cm = materialize(ConstraintList(8, trip), g)
    betas = [resolve_beta(BetaPolicy.fraction(x), cm, g) for x in sorted(t)]
    assert all(b2 > b1 for b1, b2 in zip(betas, betas[1:]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 15))
def test_normalization_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    g = random_connected(rng, n)
    trip = [(i, j, rng.normal()) for i in range(n) for j in range(i + 1, n)]
    cm = materialize(ConstraintList(n, trip), g)
    s = np.sqrt(g.degrees)
    assert np.allclose(s[:, None] * cm.qbar * s[None, :], cm.q, atol=1e-10)
    assert np.allclose(np.linalg.eigvalsh(cm.qbar), cm.qbar_eigs, atol=1e-10)


def _pair_oracle(u, q):
    """Satisfied minus violated over ordered nonzero off-diagonal entries."""
    n = len(u)
    score = 0
    for i, j in itertools.permutations(range(n), 2):
        if q[i, j] == 0:
            continue
        same = u[i] == u[j]
        score += 1 if (q[i, j] > 0) == same else -1
    return score


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 8), seed=st.integers(0, 10_000))
def test_purity_counts_constraints(n, seed):
    rng = np.random.default_rng(seed)
    q = np.triu(rng.integers(-1, 2, (n, n)), 1)
    q = q + q.T
    for bits in itertools.product((-1, 1), repeat=n):
        u = np.array(bits)
        assert u @ q @ u == _pair_oracle(u, q)
