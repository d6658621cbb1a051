"""Dense eigen-solvers and K-means.

Matrices are plain ``numpy`` arrays. :func:`as_symmetric` is the single entry
point that validates and symmetrizes them; everything downstream assumes its
output.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import DEFAULT, Tolerances
from .errors import InvalidK, InvalidMatrix, SingularPencil


def as_symmetric(m, name="matrix"):
    """Return ``(m + m.T) / 2`` as a read-only float array.

    Raises InvalidMatrix for non-square or non-finite input.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidMatrix(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    s = (m + m.T) / 2.0
    s.setflags(write=False)
    return s


def _orient(v):
    # largest |entry| positive; argmax breaks ties by lowest index
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    return v


def _frozen(v):
    v = np.array(v, dtype=float)
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray
    imag_residual: float = 0.0


@dataclass(frozen=True)
class PencilSpectrum:
    """Real eigenpairs of a pencil plus the bookkeeping of what was dropped."""

    pairs: tuple
    n_complex: int = 0
    n_nonfinite: int = 0
    jitter: float = 0.0
    method: str = "cholesky"

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @property
    def values(self):
        return np.array([p.value for p in self.pairs])


def sym_eig(m):
    """All eigenpairs of a symmetric matrix, ascending by value."""
    m = as_symmetric(m)
    w, V = np.linalg.eigh(m)
    return [EigenPair(float(w[i]), _frozen(_orient(V[:, i])), 0.0) for i in range(len(w))]


def sym_eigvals(m):
    return np.linalg.eigvalsh(as_symmetric(m))


def _residuals_ok(a, b, lams, V, tol):
    """Column-wise check of |a v - lam b v|_inf <= tol (1 + |lam|) |v|_inf."""
    R = a @ V - (b @ V) * lams[None, :]
    return np.max(np.abs(R), axis=0) <= tol * (1.0 + np.abs(lams)) * np.max(np.abs(V), axis=0)


@dataclass(frozen=True)
class PSDFactor:
    r: np.ndarray
    null: np.ndarray


def psd_factor(a, tol: Tolerances = DEFAULT):
    """``R`` with ``a = R R'`` plus a basis of the null space of a PSD ``a``.

    Returns None when ``a`` has a clearly negative eigenvalue.
    """
    w, V = np.linalg.eigh(as_symmetric(a))
    floor = tol.eig_residual * max(1.0, float(np.max(np.abs(w))))
    if w[0] < -floor:
        return None
    keep = w > floor
    return PSDFactor(V[:, keep] * np.sqrt(w[keep]), V[:, ~keep])


def _jittered(b, b_eigs, tol):
    n = b.shape[0]
    scale = max(1.0, float(np.max(np.abs(b_eigs))))
    for eps in tol.jitter:
        if np.min(np.abs(b_eigs + eps)) > n * np.finfo(float).eps * scale:
            return b + eps * np.eye(n), eps
    raise SingularPencil(f"b stays singular after ridge {tol.jitter[-1]:g}")


def solve_pencil(a, b, tol: Tolerances = DEFAULT, a_factor=None):
    """Solve ``a v = lambda b v`` for symmetric ``a`` (PSD) and symmetric ``b``.

    Definite ``b`` goes through a Cholesky reduction. Otherwise a small ridge
    is added to ``b`` until it is invertible. With ``a = R R'`` the non-zero
    eigenvalues of ``b^-1 a`` are those of the symmetric ``R' b^-1 R``, so the
    spectrum is real; ``v = b^-1 R w`` recovers the vectors. If ``a`` is not
    PSD the general problem is solved with QZ and pairs with a non-negligible
    imaginary part are filtered out and counted.

    ``a_factor`` may pass a precomputed ``R``.
    """
    a = as_symmetric(a, "a")
    b = as_symmetric(b, "b")
    if a.shape != b.shape:
        raise InvalidMatrix(f"dimension mismatch: {a.shape} vs {b.shape}")
    n = a.shape[0]

    b_eigs = np.linalg.eigvalsh(b)
    if b_eigs[0] > tol.definite:
        w, V = scipy.linalg.eigh(a, b)
        pairs = tuple(
            EigenPair(float(w[i]), _frozen(_orient(V[:, i] / np.linalg.norm(V[:, i]))), 0.0) for i in range(n)
        )
        return PencilSpectrum(pairs, method="cholesky")

    bj, eps = _jittered(b, b_eigs, tol)
    factor = psd_factor(a, tol) if a_factor is None else a_factor
    if factor is not None:
        spec = _solve_factored(a, b, bj, factor, eps, tol)
    else:
        spec = _solve_qz(a, b, bj, eps, tol)
    return _drop_ridge_infinities(spec, a, eps)


def _drop_ridge_infinities(spec, a, eps):
    """Eigenvalues of order 1/eps are the infinite eigenvalues of a singular b
    made finite by the ridge; count them as non-finite."""
    if eps == 0.0:
        return spec
    cap = 1e-2 * max(1.0, float(np.max(np.abs(a)))) / eps
    keep = tuple(p for p in spec.pairs if abs(p.value) < cap)
    dropped = len(spec.pairs) - len(keep)
    if not dropped:
        return spec
    return PencilSpectrum(keep, spec.n_complex, spec.n_nonfinite + dropped, spec.jitter, spec.method)


def _solve_factored(a, b, bj, factor, eps, tol):
    R = factor.r
    BR = scipy.linalg.lu_solve(scipy.linalg.lu_factor(bj), R)
    mu, W = np.linalg.eigh(as_symmetric(R.T @ BR))
    V = BR @ W
    V /= np.linalg.norm(V, axis=0)
    ok = _residuals_ok(a, b, mu, V, tol.pencil_residual)
    if not ok.all():
        # a nearly singular b inflates R' b^-1 R and costs the small eigenvalues
        # their accuracy; QZ is backward stable on the jittered pencil
        return _solve_qz(a, b, bj, eps, tol)
    pairs = [EigenPair(float(mu[i]), _frozen(_orient(V[:, i])), 0.0) for i in np.flatnonzero(ok)]
    # null space of a solves the pencil with eigenvalue 0 for any b
    pairs += [EigenPair(0.0, _frozen(_orient(z)), 0.0) for z in factor.null.T]
    pairs.sort(key=lambda p: p.value)
    return PencilSpectrum(tuple(pairs), int((~ok).sum()), 0, eps, "factored")


def _solve_qz(a, b, bj, eps, tol):
    n = a.shape[0]
    w, V = scipy.linalg.eig(a, bj)
    pairs = []
    n_complex = n_nonfinite = 0
    for i in range(n):
        lam = w[i]
        if not np.isfinite(lam):
            n_nonfinite += 1
            continue
        if abs(lam.imag) > tol.reality * (1.0 + abs(lam.real)):
            n_complex += 1
            continue
        v = V[:, i]
        # rotate the phase so the dominant entry is real before discarding Im
        j = int(np.argmax(np.abs(v)))
        v = v * (abs(v[j]) / v[j])
        imag = max(abs(lam.imag), float(np.max(np.abs(v.imag))))
        v = v.real / np.linalg.norm(v.real)
        lam = float(lam.real)
        if not _residuals_ok(a, b, np.array([lam]), v[:, None], tol.pencil_residual)[0]:
            n_complex += 1
            continue
        pairs.append(EigenPair(lam, _frozen(_orient(v)), imag))
    pairs.sort(key=lambda p: p.value)
    return PencilSpectrum(tuple(pairs), n_complex, n_nonfinite, eps, "qz")


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    iterations: int
    repaired: bool = False
    inertia_trace: tuple = field(default=(), repr=False)


def _sq_dists(x, centers):
    return ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def _seed_centers(x, k, rng):
    n = x.shape[0]
    centers = [x[rng.integers(n)]]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers.append(x[idx])
        d2 = np.minimum(d2, ((x - x[idx]) ** 2).sum(axis=1))
    return np.array(centers, dtype=float)


def _repair_empty(x, labels, d2, k):
    repaired = False
    for j in range(k):
        if np.any(labels == j):
            continue
        counts = np.bincount(labels, minlength=k)
        own = d2[np.arange(len(labels)), labels]
        movable = counts[labels] > 1
        own = np.where(movable, own, -1.0)
        far = int(np.argmax(own))
        labels[far] = j
        repaired = True
    return repaired


def _lloyd(x, k, rng, tol):
    centers = _seed_centers(x, k, rng)
    trace = []
    repaired = False
    it = 0
    for it in range(1, tol.kmeans_max_iter + 1):
        d2 = _sq_dists(x, centers)
        labels = np.argmin(d2, axis=1)
        repaired |= _repair_empty(x, labels, d2, k)
        trace.append(float(d2[np.arange(len(labels)), labels].sum()))
        new = np.array([x[labels == j].mean(axis=0) for j in range(k)])
        shift = float(np.max(np.sqrt(((new - centers) ** 2).sum(axis=1))))
        centers = new
        if shift < tol.kmeans_shift:
            break
    d2 = _sq_dists(x, centers)
    labels = np.argmin(d2, axis=1)
    repaired |= _repair_empty(x, labels, d2, k)
    inertia = float(d2[np.arange(len(labels)), labels].sum())
    trace.append(inertia)
    return labels, centers, inertia, it, repaired, tuple(trace)


def kmeans(rows, k, seed=0, restarts=10, tol: Tolerances = DEFAULT):
    """Lloyd's K-means with distance-weighted seeding, best of ``restarts``."""
    x = np.asarray(rows, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if k < 1 or k > n:
        raise InvalidK(f"k={k} must be in [1, {n}]")
    if not np.all(np.isfinite(x)):
        raise InvalidMatrix("kmeans rows have non-finite entries")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        run = _lloyd(x, k, rng, tol)
        if best is None or run[2] < best[2]:
            best = run
    labels, centers, inertia, it, repaired, trace = best
    return KMeansResult(labels.astype(int), centers, inertia, it, repaired, trace)
