"""Spectral clustering of the region graph.

Ng-Jordan-Weiss flavour: symmetric normalised Laplacian
``L = I - D^-1/2 W D^-1/2``, eigenvectors of its ``K`` smallest eigenvalues,
rows scaled to unit length, then k-means++ on the rows.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, IsolatedRegion, KFeasibility
from .numerics import as_rng, sym_eigen
from .quantize import kmeans

EMBEDDING_RESTARTS = 10


def _weights(affinity) -> np.ndarray:
    w = np.array(affinity, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionError(f"affinity must be square, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise DimensionError("affinity must be finite and nonnegative")
    np.fill_diagonal(w, 0.0)
    return w


def normalized_laplacian(affinity) -> np.ndarray:
    w = _weights(affinity)
    degree = w.sum(axis=1)
    if np.any(degree <= 0):
        k = int(np.flatnonzero(degree <= 0)[0])
        raise IsolatedRegion(f"region {k} has zero degree in the affinity graph")
    inv_sqrt = 1.0 / np.sqrt(degree)
    lap = -(inv_sqrt[:, None] * w * inv_sqrt[None, :])
    lap[np.diag_indices_from(lap)] += 1.0
    return 0.5 * (lap + lap.T)


def laplacian_embedding(affinity, n_clusters: int, return_eigenvalues: bool = False):
    """Row-normalised ``m x K`` spectral embedding (zero rows stay zero)."""
    m = np.shape(affinity)[0]
    if not 1 <= n_clusters <= m:
        raise KFeasibility(f"need 1 <= K <= m={m}, got K={n_clusters}")
    values, vectors = sym_eigen(normalized_laplacian(affinity))
    emb = vectors[:, :n_clusters].copy()
    norms = np.linalg.norm(emb, axis=1)
    nz = norms > 0
    emb[nz] /= norms[nz, None]
    return (emb, values) if return_eigenvalues else emb


def canonical_labels(labels) -> np.ndarray:
    """Relabel so clusters are numbered in order of first appearance."""
    labels = np.asarray(labels)
    _, first = np.unique(labels, return_index=True)
    ranks = np.empty(first.size, dtype=np.intp)
    ranks[np.argsort(first, kind="stable")] = np.arange(first.size)
    return ranks[np.unique(labels, return_inverse=True)[1]]


def spectral_cluster(affinity, n_clusters: int, rng=None, restarts: int = EMBEDDING_RESTARTS) -> np.ndarray:
    """Cluster labels for each node of the affinity graph, canonically numbered."""
    m = np.shape(affinity)[0]
    if not 1 <= n_clusters <= m:
        raise KFeasibility(f"need 1 <= K <= m={m}, got K={n_clusters}")
    if n_clusters == 1:
        return np.zeros(m, dtype=np.intp)
    emb = laplacian_embedding(affinity, n_clusters)
    result = kmeans(emb, n_clusters, as_rng(rng), restarts=restarts)
    labels = canonical_labels(result.assignment)
    if labels.max() + 1 < n_clusters:
        raise KFeasibility(f"embedding supports only {labels.max() + 1} distinct clusters, K={n_clusters} requested")
    return labels
