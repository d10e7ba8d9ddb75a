"""Bridge affinity between Voronoi regions.

For two centroids ``mu_k`` and ``mu_l`` every point of either region is
projected onto the segment ``[mu_k, mu_l]``.  Its clamped relative position
``t`` is folded around one half into a margin coordinate ``alpha`` in
``[0, 1/2]``; the affinity ``a_kl`` is the mean of ``alpha**2`` over the two
regions.  Large values mean many points sit near the hyperplane separating
the two regions, i.e. the regions are joined by a dense corridor.

The raw matrix is turned into graph weights by ``exp(gamma * sqrt(a))`` with
``gamma`` chosen so that the 90th percentile weight is ``M`` times the 10th.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CoincidentCentroids, InvalidM
from .numerics import as_data_matrix, quantile
from .quantize import QuantizationResult

DEFAULT_M = 1e4
# Below this quantile spread the exponential map is flattened to gamma = 0.
SPREAD_EPS = 1e-12


class ProjectionCoeffs(NamedTuple):
    t: np.ndarray
    alpha: np.ndarray


def projection_coeffs(points, mu_k, mu_l) -> ProjectionCoeffs:
    """Clamped segment positions ``t`` and folded margins ``alpha`` of ``points``."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    mu_k = np.asarray(mu_k, dtype=np.float64)
    seg = np.asarray(mu_l, dtype=np.float64) - mu_k
    length2 = float(seg @ seg)
    if length2 == 0.0:
        raise CoincidentCentroids("centroids coincide; the bridge segment has zero length")
    t = np.clip((points - mu_k) @ seg / length2, 0.0, 1.0)
    return ProjectionCoeffs(t, np.minimum(t, 1.0 - t))


def _regions(x: np.ndarray, q: QuantizationResult) -> list[np.ndarray]:
    order = np.argsort(q.assignment, kind="stable")
    bounds = np.cumsum(np.bincount(q.assignment, minlength=q.m))[:-1]
    return np.split(x[order], bounds)


def _segments(centroids: np.ndarray):
    seg = centroids[None, :, :] - centroids[:, None, :]
    length2 = np.einsum("ijk,ijk->ij", seg, seg)
    off = ~np.eye(len(centroids), dtype=bool)
    if np.any(length2[off] == 0.0):
        k, l = np.argwhere((length2 == 0.0) & off)[0]
        raise CoincidentCentroids(f"centroids {k} and {l} coincide")
    np.fill_diagonal(length2, 1.0)
    return seg, length2


def _check(x, q):
    x = as_data_matrix(x)
    if q.assignment.shape[0] != x.shape[0] or q.centroids.shape[1] != x.shape[1]:
        raise ValueError("quantization result does not match the data")
    return x


def raw_affinity(x, q: QuantizationResult) -> np.ndarray:
    """Raw bridge affinity matrix ``a_kl`` (zero diagonal, exactly symmetric).

    One matrix product per region: the centred points of region ``k`` are
    projected onto all ``m`` segments leaving ``mu_k`` at once, which yields
    row ``k`` of the per-region sums of ``alpha**2``.  The affinity is then
    ``(S + S.T) / (n_k + n_l)``.
    """
    x = _check(x, q)
    centroids = q.centroids
    m = q.m
    seg, length2 = _segments(centroids)
    sums = np.zeros((m, m))
    for k, pts in enumerate(_regions(x, q)):
        if len(pts) == 0:
            continue
        t = np.clip((pts - centroids[k]) @ seg[k].T / length2[k], 0.0, 1.0)
        alpha = np.minimum(t, 1.0 - t)
        sums[k] = np.einsum("ij,ij->j", alpha, alpha)
    counts = np.bincount(q.assignment, minlength=m)
    total = counts[:, None] + counts[None, :]
    affinity = (sums + sums.T) / np.maximum(total, 1)
    np.fill_diagonal(affinity, 0.0)
    return affinity


def raw_affinity_naive(x, q: QuantizationResult) -> np.ndarray:
    """Pair-by-pair reference for :func:`raw_affinity` (slow; used for checking)."""
    x = _check(x, q)
    m = q.m
    members = [np.flatnonzero(q.assignment == k) for k in range(m)]
    out = np.zeros((m, m))
    for k in range(m):
        for l in range(k + 1, m):
            idx = np.concatenate([members[k], members[l]])
            if idx.size == 0:
                continue
            alpha = projection_coeffs(x[idx], q.centroids[k], q.centroids[l]).alpha
            out[k, l] = out[l, k] = np.sum(alpha * alpha) / idx.size
    return out


def bridge_inertia_gap(x, q: QuantizationResult, k: int, l: int) -> float:
    """``|I_kl - B_kl| / ((n_k + n_l) ||mu_k - mu_l||^2)`` from first principles.

    ``I_kl`` is the inertia of the two regions about their own centroids and
    ``B_kl`` the inertia about each point's clamped projection onto the
    segment.  For a nearest-centroid partition this equals ``a_kl``.
    """
    x = _check(x, q)
    mu_k, mu_l = q.centroids[k], q.centroids[l]
    seg = mu_l - mu_k
    length2 = float(seg @ seg)
    if length2 == 0.0:
        raise CoincidentCentroids(f"centroids {k} and {l} coincide")
    in_k = x[q.assignment == k]
    in_l = x[q.assignment == l]
    ball = np.sum((in_k - mu_k) ** 2) + np.sum((in_l - mu_l) ** 2)
    both = np.vstack([in_k, in_l])
    t = np.array([min(1.0, max(0.0, float((p - mu_k) @ seg) / length2)) for p in both])
    proj = mu_k + t[:, None] * seg
    bridge = np.sum((both - proj) ** 2)
    return abs(ball - bridge) / (len(both) * length2)


class Transformed(NamedTuple):
    matrix: np.ndarray
    gamma: float
    degenerate: bool
    offset: float


def transform_affinity(raw, m_factor: float = DEFAULT_M, stabilize: bool = True) -> Transformed:
    """Exponential rescaling of a raw affinity matrix into graph weights.

    ``s = sqrt(raw)`` is shifted by ``-max(s) / 2`` when ``stabilize`` is set
    (a global rescaling of the output, so partitions are unaffected); the
    10th and 90th percentiles over all ``m * m`` entries give
    ``gamma = log(M) / (q90 - q10)`` and the weights are
    ``exp(gamma * s_shifted)``.  The returned matrix has a zero diagonal.
    A quantile spread below ``SPREAD_EPS`` yields ``gamma = 0`` (uniform
    weights) and ``degenerate=True``.
    """
    if not m_factor > 1:
        raise InvalidM(f"M must be > 1, got {m_factor}")
    s = np.sqrt(np.asarray(raw, dtype=np.float64))
    offset = 0.5 * float(s.max()) if stabilize else 0.0
    shifted = s - offset
    q10, q90 = quantile(shifted, [0.1, 0.9])
    spread = q90 - q10
    degenerate = spread < SPREAD_EPS
    gamma = 0.0 if degenerate else float(np.log(m_factor) / spread)
    exponent = gamma * shifted
    top = exponent.max()
    if top > 700.0:
        # Overflow guard: another global rescaling, folded into the offset.
        offset += top / gamma
        exponent = gamma * (s - offset)
    weights = np.exp(exponent)
    np.fill_diagonal(weights, 0.0)
    return Transformed(weights, gamma, bool(degenerate), offset)


@dataclass(frozen=True)
class AffinityMatrix:
    raw: np.ndarray
    transformed: np.ndarray
    gamma: float
    m_factor: float
    offset: float = 0.0
    degenerate: bool = False

    @property
    def order(self) -> int:
        return self.raw.shape[0]

    def weight_of(self, raw_value):
        """Transformed weight of a raw affinity value (before diagonal zeroing)."""
        return np.exp(self.gamma * (np.sqrt(raw_value) - self.offset))


def affinity_matrix(x, q: QuantizationResult, m_factor: float = DEFAULT_M, stabilize: bool = True) -> AffinityMatrix:
    raw = raw_affinity(x, q)
    tr = transform_affinity(raw, m_factor, stabilize=stabilize)
    return AffinityMatrix(raw, tr.matrix, tr.gamma, float(m_factor), tr.offset, tr.degenerate)
