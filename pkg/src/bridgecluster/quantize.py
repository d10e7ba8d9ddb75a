"""Vector quantisation: k-means++ seeding and Lloyd iterations.

The result of :func:`kmeans` defines the Voronoi regions used by the rest of
the pipeline, so a few guarantees are kept that plain Lloyd does not give:

* no region is left empty (an empty centroid is moved onto the point that is
  farthest from its own centroid);
* the returned assignment is recomputed after the last centroid update, so it
  is an exact nearest-centroid partition of the data;
* distance ties go to the lowest centroid index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidM
from .numerics import as_data_matrix, as_rng, substreams

DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-6
DEFAULT_RESTARTS = 10


@dataclass(frozen=True)
class QuantizationResult:
    centroids: np.ndarray
    assignment: np.ndarray
    counts: np.ndarray
    wcss: float
    n_iter: int = 0
    history: tuple = field(default=(), repr=False)

    @property
    def m(self) -> int:
        return self.centroids.shape[0]


def _check_m(m: int, n: int) -> None:
    if not 1 <= m <= n:
        raise InvalidM(f"number of regions must satisfy 1 <= m <= n={n}, got m={m}")


def _sq_dist_to(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    diff = x - c
    return np.einsum("ij,ij->i", diff, diff)


def kmeans_plus_plus(x, m: int, rng=None, return_indices: bool = False):
    """k-means++ seeding.

    The first centre is a uniformly drawn row of ``x``; each further centre is
    drawn with probability proportional to its squared distance to the
    nearest centre chosen so far.  When every remaining weight is zero
    (duplicated points) the draw falls back to a uniform pick among rows not
    yet chosen.
    """
    x = as_data_matrix(x)
    n = x.shape[0]
    _check_m(m, n)
    rng = as_rng(rng)

    chosen = np.empty(m, dtype=np.intp)
    taken = np.zeros(n, dtype=bool)
    chosen[0] = rng.integers(n)
    taken[chosen[0]] = True
    d2 = _sq_dist_to(x, x[chosen[0]])
    for j in range(1, m):
        total = d2.sum()
        if total > 0:
            cum = np.cumsum(d2)
            idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            idx = min(idx, n - 1)
            while d2[idx] == 0 and idx > 0:
                idx -= 1
        else:
            free = np.flatnonzero(~taken)
            idx = int(free[rng.integers(free.size)])
        chosen[j] = idx
        taken[idx] = True
        d2 = np.minimum(d2, _sq_dist_to(x, x[idx]))

    centroids = x[chosen].copy()
    return (centroids, chosen) if return_indices else centroids


def assign(x: np.ndarray, centroids: np.ndarray):
    """Nearest-centroid labels (lowest index on ties) and the full squared-distance table."""
    d2 = cdist(x, centroids, "sqeuclidean")
    return np.argmin(d2, axis=1), d2


def _repair_empty(x, centroids, labels, d2) -> bool:
    m = centroids.shape[0]
    counts = np.bincount(labels, minlength=m)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return False
    own = d2[np.arange(x.shape[0]), labels].copy()
    for e in empty:
        movable = counts[labels] >= 2
        if not movable.any():
            break
        i = int(np.argmax(np.where(movable, own, -1.0)))
        counts[labels[i]] -= 1
        labels[i] = e
        counts[e] += 1
        centroids[e] = x[i]
        own[i] = 0.0
    return True


def _means(x, labels, m, fallback):
    counts = np.bincount(labels, minlength=m)
    sums = np.column_stack([np.bincount(labels, weights=x[:, j], minlength=m) for j in range(x.shape[1])])
    out = fallback.copy()
    nz = counts > 0
    out[nz] = sums[nz] / counts[nz, None]
    return out


def _voronoi(x, centroids, max_rounds):
    # Assign, repairing empty regions until the assignment is a clean partition.
    labels, d2 = assign(x, centroids)
    for _ in range(max_rounds):
        if not _repair_empty(x, centroids, labels, d2):
            break
        labels, d2 = assign(x, centroids)
    return labels, d2


def lloyd(x, centroids, max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL) -> QuantizationResult:
    """Alternate assignment and mean updates from the given initial centroids.

    Stops when the largest centroid displacement is at most ``tol`` or after
    ``max_iter`` updates.  ``history`` records the WCSS after each assignment.
    """
    x = as_data_matrix(x)
    centroids = np.array(centroids, dtype=np.float64)
    if centroids.ndim != 2 or centroids.shape[1] != x.shape[1]:
        raise ValueError(f"centroids must have shape (m, {x.shape[1]}), got {centroids.shape}")
    if not np.all(np.isfinite(centroids)):
        raise ValueError("centroids contain NaN or infinite entries")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    m = centroids.shape[0]
    _check_m(m, x.shape[0])
    rows = np.arange(x.shape[0])
    history = []

    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels, d2 = _voronoi(x, centroids, m + 1)
        history.append(float(d2[rows, labels].sum()))
        updated = _means(x, labels, m, centroids)
        shift = np.sqrt(np.max(_row_sq_norm(updated - centroids)))
        centroids = updated
        if shift <= tol:
            break

    labels, d2 = _voronoi(x, centroids, m + 1)
    wcss = float(d2[rows, labels].sum())
    history.append(wcss)
    return QuantizationResult(
        centroids=centroids,
        assignment=labels,
        counts=np.bincount(labels, minlength=m),
        wcss=wcss,
        n_iter=n_iter,
        history=tuple(history),
    )


def _row_sq_norm(a):
    return np.einsum("ij,ij->i", a, a)


def kmeans(
    x,
    m: int,
    rng=None,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> QuantizationResult:
    """Best-of-``restarts`` k-means++ / Lloyd run (lowest WCSS, earliest restart on ties)."""
    x = as_data_matrix(x)
    _check_m(m, x.shape[0])
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    for stream in substreams(as_rng(rng), restarts):
        result = lloyd(x, kmeans_plus_plus(x, m, stream), max_iter=max_iter, tol=tol)
        if best is None or result.wcss < best.wcss:
            best = result
    return best


def _extend_seeds(x, centroids, extra, rng):
    # Continue k-means++ sampling from an existing set of centres.
    d2 = cdist(x, centroids, "sqeuclidean").min(axis=1)
    added = []
    for _ in range(extra):
        total = d2.sum()
        if total > 0:
            cum = np.cumsum(d2)
            idx = min(int(np.searchsorted(cum, rng.random() * cum[-1], side="right")), x.shape[0] - 1)
            while d2[idx] == 0 and idx > 0:
                idx -= 1
        else:
            idx = int(rng.integers(x.shape[0]))
        added.append(x[idx])
        d2 = np.minimum(d2, _sq_dist_to(x, x[idx]))
    return np.vstack([centroids, np.array(added)])


def wcss_curve(x, m_values, restarts: int = DEFAULT_RESTARTS, rng=None, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL):
    """Best-of-restarts WCSS for each region count, as ``[(m, wcss), ...]`` sorted by m.

    The best solution at the previous (smaller) m, extended by k-means++
    continuation, competes as one more candidate.  That keeps the curve
    non-increasing in m.
    """
    x = as_data_matrix(x)
    ms = sorted({int(m) for m in m_values})
    if not ms:
        raise InvalidM("no region counts given")
    for m in ms:
        _check_m(m, x.shape[0])
    streams = substreams(as_rng(rng), len(ms))
    curve = []
    prev = None
    for m, stream in zip(ms, streams):
        run_rng, extend_rng = substreams(stream, 2)
        best = kmeans(x, m, run_rng, restarts=restarts, max_iter=max_iter, tol=tol)
        if prev is not None:
            seeds = _extend_seeds(x, prev.centroids, m - prev.m, extend_rng)
            candidate = lloyd(x, seeds, max_iter=max_iter, tol=tol)
            if candidate.wcss < best.wcss:
                best = candidate
        curve.append((m, best.wcss))
        prev = best
    return curve
