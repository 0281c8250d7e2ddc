"""Lloyd's k-means with k-means++ seeding, silhouette model selection, 2D PCA."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from newsimpact.embed import EmbeddingMatrix
from newsimpact.errors import InputError

DEFAULT_N_INIT = 10
DEFAULT_MAX_ITER = 300
DEFAULT_SAMPLE_CAP = 5000


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, d)
    labels: np.ndarray  # (n,) int
    inertia: float
    seed: int
    n_iter: int


@dataclass
class SilhouetteReport:
    """Mean silhouette per candidate K and the argmax (ties -> smallest K)."""

    scores: dict[int, float]
    chosen_k: int
    sampled: bool = False


@dataclass
class Projection2D:
    points: np.ndarray  # (n, 2)
    explained: tuple[float, float]


def _as_array(matrix) -> np.ndarray:
    if isinstance(matrix, EmbeddingMatrix):
        return matrix.data
    return np.asarray(matrix, dtype=np.float64)


def _pairwise_sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # (n, k) squared Euclidean distances; clip the cancellation noise.
    d2 = (
        np.sum(x * x, axis=1)[:, None]
        - 2.0 * x @ centers.T
        + np.sum(centers * centers, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = np.sum((x - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # All remaining mass at existing centers; pick uniformly.
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centers[j] = x[idx]
        closest = np.minimum(closest, np.sum((x - centers[j]) ** 2, axis=1))
    return centers


def _lloyd(
    x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int
) -> tuple[np.ndarray, np.ndarray, float, int]:
    n = x.shape[0]
    centers = _kmeanspp_init(x, k, rng)
    labels = np.full(n, -1, dtype=np.int64)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = _pairwise_sq_dists(x, centers)
        new_labels = np.argmin(d2, axis=1)  # argmin breaks ties toward lowest index
        # Repair empty clusters with the point farthest from its centroid.
        for j in range(k):
            if not np.any(new_labels == j):
                assigned = d2[np.arange(n), new_labels]
                donor = int(np.argmax(assigned))
                new_labels[donor] = j
                d2[donor, :] = -1.0  # exclude donor from later repairs
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            centers[j] = x[labels == j].mean(axis=0)
    labels, centers = _refine_moves(x, labels, centers, k)
    inertia = float(np.sum((x - centers[labels]) ** 2))
    return centers, labels, inertia, n_iter


def _refine_moves(
    x: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Escape single-point-move local minima left by the assignment loop.

    Moving point i from its cluster s (size m_s >= 2) to cluster t changes the
    objective by m_t/(m_t+1)*||x_i - c_t||^2 - m_s/(m_s-1)*||x_i - c_s||^2,
    accounting for the centroid shifts. Repeatedly apply the best strictly
    improving move until none exists; every fixed point of this rule is also a
    fixed point of nearest-centroid assignment.
    """
    n = x.shape[0]
    sizes = np.bincount(labels, minlength=k).astype(np.float64)
    while True:
        d2 = _pairwise_sq_dists(x, centers)
        own = d2[np.arange(n), labels]
        remove_gain = sizes[labels] / np.maximum(sizes[labels] - 1.0, 1.0) * own
        add_cost = (sizes / (sizes + 1.0))[None, :] * d2
        delta = add_cost - remove_gain[:, None]
        delta[np.arange(n), labels] = 0.0
        delta[sizes[labels] <= 1, :] = 0.0  # moving a singleton empties a cluster
        flat = int(np.argmin(delta))
        i, t = divmod(flat, k)
        if delta[i, t] >= -1e-12:
            return labels, centers
        s = int(labels[i])
        centers[s] = (centers[s] * sizes[s] - x[i]) / (sizes[s] - 1.0)
        centers[t] = (centers[t] * sizes[t] + x[i]) / (sizes[t] + 1.0)
        sizes[s] -= 1.0
        sizes[t] += 1.0
        labels[i] = t


def kmeans_fit(
    matrix,
    k: int,
    seed: int = 42,
    n_init: int = DEFAULT_N_INIT,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClusterModel:
    """Best-of-n_init k-means; deterministic for a fixed seed."""
    x = _as_array(matrix)
    n = x.shape[0]
    if k <= 0:
        raise InputError(f"k must be positive, got {k}")
    if k > n:
        raise InputError(f"k={k} exceeds number of points n={n}")
    if n_init < 1 or max_iter < 1:
        raise InputError("n_init and max_iter must be positive")
    best = None
    for restart in range(n_init):
        rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, restart]))
        centers, labels, inertia, n_iter = _lloyd(x, k, rng, max_iter)
        if best is None or inertia < best[2]:
            best = (centers, labels, inertia, n_iter)
    centers, labels, inertia, n_iter = best
    return ClusterModel(k, centers, labels, inertia, seed, n_iter)


def silhouette_score(
    matrix,
    labels,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
    seed: int = 42,
) -> float:
    """Mean silhouette over points (exact when n <= sample_cap, else sampled)."""
    x = _as_array(matrix)
    labels = np.asarray(labels, dtype=np.int64)
    n = x.shape[0]
    if n < 3:
        raise InputError(f"silhouette needs n >= 3, got {n}")
    uniq, counts = np.unique(labels, return_counts=True)
    if uniq.size < 2:
        raise InputError("silhouette needs at least 2 distinct labels")
    if sample_cap < 1:
        raise InputError("sample_cap must be positive")
    sizes = dict(zip(uniq.tolist(), counts.tolist()))
    if n <= sample_cap:
        eval_idx = np.arange(n)
    else:
        rng = np.random.default_rng(seed)
        eval_idx = np.sort(rng.choice(n, size=sample_cap, replace=False))
    total = 0.0
    for i in eval_idx:
        dist = np.sqrt(np.maximum(np.sum((x - x[i]) ** 2, axis=1), 0.0))
        own = labels[i]
        own_size = sizes[int(own)]
        if own_size == 1:
            continue  # singleton: s(i) = 0 by convention
        a = float(dist[labels == own].sum()) / (own_size - 1)
        b = min(
            float(dist[labels == c].mean()) for c in sizes if c != own
        )
        denom = max(a, b)
        if denom > 0.0:
            total += (b - a) / denom
    return total / len(eval_idx)


def select_k(
    matrix,
    k_min: int = 2,
    k_max: int = 10,
    seed: int = 42,
    n_init: int = DEFAULT_N_INIT,
    max_iter: int = DEFAULT_MAX_ITER,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
) -> SilhouetteReport:
    """Fit each K in [k_min, k_max], score it, pick the silhouette argmax."""
    x = _as_array(matrix)
    n = x.shape[0]
    if not (2 <= k_min <= k_max):
        raise InputError(f"invalid K range [{k_min}, {k_max}]")
    if k_max > n - 1:
        raise InputError(f"k_max={k_max} must be <= n-1={n - 1}")
    scores: dict[int, float] = {}
    for k in range(k_min, k_max + 1):
        model = kmeans_fit(x, k, seed=seed, n_init=n_init, max_iter=max_iter)
        scores[k] = silhouette_score(x, model.labels, sample_cap=sample_cap, seed=seed)
    chosen = max(sorted(scores), key=lambda k: scores[k])  # ties -> smallest K
    return SilhouetteReport(scores, chosen, sampled=n > sample_cap)


def pca_project(matrix) -> Projection2D:
    """Project onto the top-2 principal directions of the sample covariance.

    Sign convention: within each direction the entry of largest absolute
    value is made positive.
    """
    x = _as_array(matrix)
    n, d = x.shape
    if n < 3:
        raise InputError(f"PCA projection needs n >= 3, got {n}")
    if d < 2:
        raise InputError(f"PCA projection needs d >= 2, got {d}")
    centered = x - x.mean(axis=0)
    total_var = float(np.sum(centered * centered)) / (n - 1)
    if total_var <= 0.0:
        raise InputError("all points identical: zero total variance")
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    dirs = vt[:2].copy()
    for row in dirs:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    eig = (svals[:2] ** 2) / (n - 1)
    explained = (float(eig[0] / total_var), float(eig[1] / total_var) if eig.size > 1 else 0.0)
    points = centered @ dirs.T
    return Projection2D(points, explained)
