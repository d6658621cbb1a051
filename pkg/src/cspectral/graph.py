"""Affinity graphs, normalized Laplacians and synthetic point clouds."""
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .config import DEFAULT
from .errors import DegenerateData, DisconnectedGraph, InvalidMatrix, IsolatedNode
from .linalg import as_symmetric, psd_factor


@dataclass(frozen=True)
class AffinityGraph:
    """Affinity matrix ``a`` with degrees, volume and normalized Laplacian.

    Build with :func:`build_laplacian`; the constructor does not validate.
    """

    a: np.ndarray
    degrees: np.ndarray
    vol: float
    lbar: np.ndarray

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def sqrt_degrees(self):
        return np.sqrt(self.degrees)

    @property
    def trivial(self):
        """Unit-length null vector of the normalized Laplacian."""
        s = self.sqrt_degrees
        return s / np.linalg.norm(s)

    @cached_property
    def lbar_factor(self):
        """``R`` with ``lbar = R R'``, reused by every pencil solve on this graph."""
        return psd_factor(self.lbar)

    def normalize(self, m):
        """``D^-1/2 m D^-1/2``."""
        s = 1.0 / self.sqrt_degrees
        return as_symmetric(s[:, None] * np.asarray(m, dtype=float) * s[None, :])


@dataclass(frozen=True)
class PointCloud:
    coords: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if not np.all(np.isfinite(c)):
            raise DegenerateData("point coordinates must be finite")
        object.__setattr__(self, "coords", c)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=int)
            if lab.shape != (c.shape[0],):
                raise DegenerateData("labels must have one entry per point")
            object.__setattr__(self, "labels", lab)

    @property
    def n(self):
        return self.coords.shape[0]

    @property
    def d(self):
        return self.coords.shape[1]


def is_connected(a):
    """Breadth-first reachability over non-zero affinities."""
    a = np.asarray(a)
    n = a.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(a[i] != 0):
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())


def build_laplacian(a):
    """Validate an affinity matrix and derive D, vol and I - D^-1/2 A D^-1/2."""
    a = np.array(as_symmetric(a, "affinity"))
    if np.any(a < 0):
        raise InvalidMatrix("affinity matrix has negative entries")
    np.fill_diagonal(a, 0.0)
    degrees = a.sum(axis=1)
    if np.any(degrees <= 0):
        raise IsolatedNode(f"nodes with zero degree: {np.flatnonzero(degrees <= 0).tolist()}")
    if not is_connected(a):
        raise DisconnectedGraph("affinity graph is not connected")
    s = 1.0 / np.sqrt(degrees)
    lbar = np.eye(a.shape[0]) - s[:, None] * a * s[None, :]
    a.setflags(write=False)
    degrees.setflags(write=False)
    return AffinityGraph(a, degrees, float(degrees.sum()), as_symmetric(lbar))


def median_distance(coords):
    return float(np.median(pdist(coords)))


def rbf_affinity(points, sigma="auto"):
    """Gaussian kernel ``exp(-|xi - xj|^2 / (2 sigma^2))`` with zero diagonal.

    ``sigma="auto"`` uses the median pairwise distance.
    """
    coords = points.coords if isinstance(points, PointCloud) else np.asarray(points, dtype=float)
    if coords.ndim == 1:
        coords = coords[:, None]
    if coords.shape[0] < 2:
        raise DegenerateData("need at least two points")
    d = pdist(coords)
    if sigma is None or sigma == "auto":
        sigma = float(np.median(d))
        if sigma == 0.0:
            raise DegenerateData("median pairwise distance is zero")
    sigma = float(sigma)
    if not sigma > 0:
        raise DegenerateData(f"sigma must be positive, got {sigma}")
    a = squareform(np.exp(-(d**2) / (2.0 * sigma**2)))
    return build_laplacian(a)


def cosine_affinity(vectors):
    x = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0):
        raise DegenerateData(f"zero rows: {np.flatnonzero(norms == 0).tolist()}")
    xn = x / norms[:, None]
    a = np.clip(xn @ xn.T, 0.0, None)
    np.fill_diagonal(a, 0.0)
    return build_laplacian(a)


def two_moons(n, noise_std=0.0, background_n=0, seed=0):
    """Two interleaving unit half-circles, ``n/2`` points each.

    The upper moon is ``(cos t, sin t)``; the lower one is ``(1 - cos t,
    1 - sin t - 0.5)``. Angles are drawn uniformly on ``[0, pi]``. Background
    points are uniform over the bounding box of the moons and take the label
    of the nearest moon point.
    """
    if n < 4 or n % 2:
        raise DegenerateData(f"n must be even and >= 4, got {n}")
    rng = np.random.default_rng(seed)
    half = n // 2
    t1 = rng.uniform(0.0, np.pi, half)
    t2 = rng.uniform(0.0, np.pi, half)
    upper = np.column_stack([np.cos(t1), np.sin(t1)])
    lower = np.column_stack([1.0 - np.cos(t2), 1.0 - np.sin(t2) - 0.5])
    coords = np.vstack([upper, lower])
    labels = np.repeat([0, 1], half)
    if noise_std > 0:
        coords = coords + rng.normal(0.0, noise_std, coords.shape)
    if background_n > 0:
        lo, hi = coords.min(axis=0), coords.max(axis=0)
        bg = rng.uniform(lo, hi, (background_n, 2))
        nearest = np.argmin(((bg[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2), axis=1)
        coords = np.vstack([coords, bg])
        labels = np.concatenate([labels, labels[nearest]])
    return PointCloud(coords, labels)


def gaussian_blobs(centers, per_class, std, seed=0):
    """Isotropic Gaussian classes, used as small labelled benchmarks."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    coords = np.vstack([c + rng.normal(0.0, std, (per_class, centers.shape[1])) for c in centers])
    labels = np.repeat(np.arange(len(centers)), per_class)
    return PointCloud(coords, labels)
