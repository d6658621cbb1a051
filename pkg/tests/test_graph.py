import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cspectral import io
from cspectral.errors import DegenerateData, DisconnectedGraph, FormatError, InvalidMatrix, IsolatedNode
from cspectral.evaluation import ari
from cspectral.graph import (
    PointCloud,
    build_laplacian,
    cosine_affinity,
    gaussian_blobs,
    is_connected,
    rbf_affinity,
    two_moons,
)
from cspectral.linalg import sym_eigvals
from cspectral.solver import unconstrained_ncut
from conftest import TOY_A, random_connected


def bfs_oracle(a):
    n = len(a)
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if a[i][j] > 0 and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


def test_rbf_kernel_value():
    g = rbf_affinity(PointCloud(np.array([[0.0, 0.0], [1.0, 1.0]])), sigma=1.0)
    assert g.a[0, 1] == pytest.approx(np.exp(-1.0))
    assert g.a[0, 0] == 0.0


def test_rbf_identical_points():
    with pytest.raises(DegenerateData):
        rbf_affinity(PointCloud(np.zeros((3, 2))))


def test_rbf_auto_sigma_is_median():
    pts = np.array([[0.0], [1.0], [3.0]])
    g = rbf_affinity(PointCloud(pts))
    # pairwise distances 1, 2, 3 -> median 2
    assert g.a[0, 1] == pytest.approx(np.exp(-1.0 / 8.0))


def test_rbf_moons_connected():
    g = rbf_affinity(two_moons(100, 0.1, seed=3))
    assert bfs_oracle(g.a)
    assert g.vol > 0


def test_rbf_permutation_equivariant(rng):
    pts = rng.normal(size=(15, 3))
    perm = rng.permutation(15)
    a = rbf_affinity(PointCloud(pts), 0.7).a
    b = rbf_affinity(PointCloud(pts[perm]), 0.7).a
    assert np.allclose(a[np.ix_(perm, perm)], b, rtol=0, atol=1e-15)


def test_cosine_orthogonal_rows_disconnected():
    with pytest.raises(DisconnectedGraph):
        cosine_affinity(np.eye(3))


def test_cosine_identical_rows():
    g = cosine_affinity(np.array([[1.0, 2.0], [1.0, 2.0]]))
    assert g.a[0, 1] == pytest.approx(1.0)


def test_cosine_hand_computed():
    docs = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0]])
    g = cosine_affinity(docs)
    assert g.a[0, 1] == pytest.approx(0.5)
    assert g.a[0, 2] == pytest.approx(2.0 / np.sqrt(6.0))
    assert g.a[1, 2] == pytest.approx(2.0 / np.sqrt(6.0))


def test_cosine_zero_row():
    with pytest.raises(DegenerateData):
        cosine_affinity(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_two_moons_geometry_noise_free():
    pc = two_moons(100, 0.0, 0, seed=1)
    assert pc.n == 100 and np.bincount(pc.labels).tolist() == [50, 50]
    up = pc.coords[pc.labels == 0]
    lo = pc.coords[pc.labels == 1]
    assert np.allclose(np.hypot(up[:, 0], up[:, 1]), 1.0)
    assert np.all(up[:, 1] >= -1e-12)
    assert np.allclose(np.hypot(lo[:, 0] - 1.0, lo[:, 1] - 0.5), 1.0)
    assert np.all(lo[:, 1] <= 0.5 + 1e-12)


def test_two_moons_with_background():
    pc = two_moons(500, 0.1, 100, seed=0)
    assert pc.n == 600
    lo, hi = pc.coords[:500].min(axis=0), pc.coords[:500].max(axis=0)
    assert np.all(pc.coords[500:] >= lo) and np.all(pc.coords[500:] <= hi)


def test_two_moons_deterministic():
    a, b = two_moons(100, 0.1, 10, seed=9), two_moons(100, 0.1, 10, seed=9)
    assert np.array_equal(a.coords, b.coords) and np.array_equal(a.labels, b.labels)


def test_two_moons_rejects_odd():
    with pytest.raises(DegenerateData):
        two_moons(7)


def test_dense_moons_recovered_by_ncut():
    pc = two_moons(600, 0.0, seed=0)
    part = unconstrained_ncut(rbf_affinity(pc, 0.1))
    assert ari(part.labels, pc.labels) == 1.0


def test_toy_edge_list_volume(tmp_path):
    p = tmp_path / "toy.txt"
    iu, ju = np.nonzero(np.triu(TOY_A))
    p.write_text("".join(f"{i} {j} 1\n" for i, j in zip(iu, ju)))
    assert len(iu) == 7
    assert io.load_graph(p, "edge-list").vol == 14


def test_toy_dense_degrees(tmp_path):
    p = tmp_path / "toy.csv"
    io.write_dense(p, TOY_A)
    g = io.load_graph(p, "dense-csv")
    assert g.degrees.tolist() == [2, 2, 3, 3, 2, 2]


def test_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    for fmt in io.FORMATS:
        with pytest.raises(FormatError):
            io.load_graph(p, fmt)


def test_toy_laplacian_null():
    g = build_laplacian(TOY_A)
    assert abs(sym_eigvals(g.lbar)[0]) < 1e-12


def test_path_graph_volume():
    assert build_laplacian(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0.0]])).vol == 4


def test_disjoint_edges():
    a = np.zeros((4, 4))
    a[0, 1] = a[1, 0] = a[2, 3] = a[3, 2] = 1
    with pytest.raises(DisconnectedGraph):
        build_laplacian(a)


def test_isolated_node():
    a = np.zeros((3, 3))
    a[0, 1] = a[1, 0] = 1
    with pytest.raises(IsolatedNode):
        build_laplacian(a)


def test_negative_affinity():
    with pytest.raises(InvalidMatrix):
        build_laplacian(np.array([[0, -1], [-1, 0.0]]))


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 10_000))
def test_graph_invariants(n, seed):
    g = random_connected(np.random.default_rng(seed), n)
    assert np.allclose(g.degrees, g.a.sum(axis=1), rtol=1e-10)
    assert g.vol == pytest.approx(g.degrees.sum(), rel=1e-12)
    s = 1 / np.sqrt(g.degrees)
    assert np.allclose(g.lbar, np.eye(n) - s[:, None] * g.a * s[None, :], atol=1e-10)
    assert np.max(np.abs(g.lbar @ np.sqrt(g.degrees))) <= 1e-8
    vals = sym_eigvals(g.lbar)
    assert vals[0] >= -1e-8 and np.sum(vals < 1e-8) == 1


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 12), seed=st.integers(0, 10_000), p=st.floats(0.0, 0.6))
def test_is_connected_matches_bfs_oracle(n, seed, p):
    rng = np.random.default_rng(seed)
    a = np.triu(rng.random((n, n)) < p, 1).astype(float)
    a = a + a.T
    assert is_connected(a) == bfs_oracle(a)


def test_gaussian_blobs_shape():
    pc = gaussian_blobs([[0, 0], [3, 3], [6, 0]], 10, 0.2, seed=0)
    assert pc.n == 30 and np.bincount(pc.labels).tolist() == [10, 10, 10]
