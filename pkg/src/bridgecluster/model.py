"""Bridge-affinity clustering estimator.

``fit`` runs the whole pipeline:

1. quantise the data into ``m`` Voronoi regions (k-means++, best of restarts);
2. build the bridge affinity between regions and rescale it;
3. cluster the region graph spectrally into ``K`` groups;
4. give every point the cluster of its region.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .bridge import DEFAULT_M, AffinityMatrix, affinity_matrix
from .errors import BridgeClusterError, DimensionError, InvalidM, KFeasibility
from .numerics import as_data_matrix, substreams
from .quantize import DEFAULT_MAX_ITER, DEFAULT_RESTARTS, DEFAULT_TOL, QuantizationResult, assign, kmeans, wcss_curve
from .spectral import canonical_labels, spectral_cluster

FORMAT_NAME = "bridgecluster-model"
FORMAT_VERSION = 1
ELBOW_THRESHOLD = 0.05


@dataclass(frozen=True)
class SBConfig:
    n_clusters: int
    n_regions: int
    m_factor: float = DEFAULT_M
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL

    def validate(self, n: Optional[int] = None) -> None:
        if self.n_clusters < 1:
            raise KFeasibility(f"number of clusters must be >= 1, got {self.n_clusters}")
        if self.n_regions < self.n_clusters:
            raise KFeasibility(
                f"number of regions m={self.n_regions} must be >= number of clusters K={self.n_clusters}"
            )
        if n is not None and self.n_regions > n:
            raise InvalidM(f"number of regions m={self.n_regions} exceeds the number of points n={n}")
        if not self.m_factor > 1:
            raise InvalidM(f"M must be > 1, got {self.m_factor}")
        if self.restarts < 1 or self.max_iter < 1:
            raise InvalidM("restarts and max_iter must be >= 1")


@dataclass(frozen=True)
class ClusterModel:
    config: SBConfig
    centroids: np.ndarray
    region_labels: np.ndarray
    gamma: float
    point_labels: Optional[np.ndarray] = None
    assignment: Optional[np.ndarray] = None
    affinity: Optional[AffinityMatrix] = field(default=None, repr=False)
    wcss: Optional[float] = None

    def predict(self, x_new) -> np.ndarray:
        return predict(self, x_new)

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "config": asdict(self.config),
            "centroids": self.centroids.tolist(),
            "region_labels": [int(v) for v in self.region_labels],
            "gamma": float(self.gamma),
            "M": float(self.config.m_factor),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "ClusterModel":
        if doc.get("format") != FORMAT_NAME:
            raise DimensionError(f"not a {FORMAT_NAME} document")
        if doc.get("version") != FORMAT_VERSION:
            raise DimensionError(f"unsupported model version {doc.get('version')!r}")
        config = SBConfig(**doc["config"])
        centroids = np.array(doc["centroids"], dtype=np.float64)
        region_labels = np.array(doc["region_labels"], dtype=np.intp)
        if centroids.ndim != 2 or centroids.shape[0] != region_labels.shape[0]:
            raise DimensionError("centroids and region labels disagree in length")
        return cls(config=config, centroids=centroids, region_labels=region_labels, gamma=float(doc["gamma"]))

    @classmethod
    def from_json(cls, text: str) -> "ClusterModel":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ClusterModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def stage_streams(seed):
    """Random streams for the quantisation and spectral stages of ``fit``."""
    return substreams(seed, 2)


def quantize_stage(x, config: SBConfig) -> QuantizationResult:
    quant_rng, _ = stage_streams(config.seed)
    return kmeans(x, config.n_regions, quant_rng, restarts=config.restarts, max_iter=config.max_iter, tol=config.tol)


def kmeans_baseline(x, n_clusters: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> np.ndarray:
    """Plain k-means++ labels, drawn from the same stream ``fit`` uses for quantisation."""
    cfg = SBConfig(n_clusters=n_clusters, n_regions=n_clusters, seed=seed, restarts=restarts)
    return canonical_labels(quantize_stage(as_data_matrix(x), cfg).assignment)


def propagate(region_labels, assignment) -> np.ndarray:
    region_labels = np.asarray(region_labels)
    assignment = np.asarray(assignment, dtype=np.intp)
    if assignment.size and (assignment.min() < 0 or assignment.max() >= region_labels.shape[0]):
        raise IndexError(f"region index out of range [0, {region_labels.shape[0]})")
    return region_labels[assignment]


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except BridgeClusterError as exc:
        try:
            wrapped = type(exc)(f"{name}: {exc}")
        except TypeError:
            raise exc
        raise wrapped from exc


def fit(x, config: SBConfig, stabilize: bool = True) -> ClusterModel:
    """Fit a bridge-affinity clustering model; deterministic for a fixed ``config.seed``."""
    x = as_data_matrix(x)
    config.validate(x.shape[0])
    quant_rng, spectral_rng = stage_streams(config.seed)
    q = _stage(
        "quantization",
        kmeans,
        x,
        config.n_regions,
        quant_rng,
        restarts=config.restarts,
        max_iter=config.max_iter,
        tol=config.tol,
    )
    aff = _stage("affinity", affinity_matrix, x, q, config.m_factor, stabilize=stabilize)
    region_labels = _stage("spectral", spectral_cluster, aff.transformed, config.n_clusters, spectral_rng)
    return ClusterModel(
        config=config,
        centroids=q.centroids,
        region_labels=region_labels,
        gamma=aff.gamma,
        point_labels=propagate(region_labels, q.assignment),
        assignment=q.assignment,
        affinity=aff,
        wcss=q.wcss,
    )


def predict(model: ClusterModel, x_new) -> np.ndarray:
    """Cluster of the nearest centroid (lowest index on ties) for each new point."""
    x_new = as_data_matrix(x_new, "x_new")
    if x_new.shape[1] != model.centroids.shape[1]:
        raise DimensionError(f"expected {model.centroids.shape[1]} columns, got {x_new.shape[1]}")
    nearest, _ = assign(x_new, model.centroids)
    return model.region_labels[nearest]


def suggest_m(x, n_clusters: int, candidates, rng=None, restarts: int = DEFAULT_RESTARTS):
    """Elbow-style suggestion for the number of regions.

    The WCSS curve is computed at ``K`` and at every candidate.  Writing
    ``W_j`` for the WCSS of the j-th sorted candidate, the suggestion is the
    smallest ``c_j`` from which the curve looks linear, i.e. where
    ``|(W_j - W_{j+1}) - (W_{j+1} - W_{j+2})|`` is at most 5% of the initial
    drop ``W(K) - W_0``.  With fewer than three candidates (or no initial
    drop) the smallest candidate is returned; if no candidate qualifies, the
    largest one is.  This is a heuristic: inspect the returned curve.

    Returns ``(m, curve)`` where ``curve`` is ``[(m, wcss), ...]`` including ``K``.
    """
    cands = sorted({int(c) for c in candidates})
    if not cands:
        raise InvalidM("no candidate region counts given")
    if cands[0] <= n_clusters:
        raise InvalidM(f"candidates must all exceed K={n_clusters}, got {cands[0]}")
    curve = wcss_curve(x, [n_clusters] + cands, restarts=restarts, rng=rng)
    w = [v for _, v in curve]
    initial = w[0] - w[1]
    choice = cands[-1]
    if len(cands) < 3 or initial <= 0:
        choice = cands[0]
    else:
        for j in range(len(cands) - 2):
            a, b, c = w[j + 1], w[j + 2], w[j + 3]
            if abs((a - b) - (b - c)) <= ELBOW_THRESHOLD * initial:
                choice = cands[j]
                break
    return choice, curve


class BridgeCluster:
    """Estimator-style wrapper around :func:`fit`."""

    def __init__(self, n_clusters, n_regions, m_factor=DEFAULT_M, seed=0, restarts=DEFAULT_RESTARTS):
        self.config = SBConfig(n_clusters, n_regions, m_factor, seed, restarts)
        self.model_ = None

    def fit(self, x):
        self.model_ = fit(x, self.config)
        return self

    def fit_predict(self, x):
        return self.fit(x).model_.point_labels

    def predict(self, x):
        if self.model_ is None:
            raise RuntimeError("call fit before predict")
        return self.model_.predict(x)

