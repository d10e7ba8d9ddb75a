"""Clustering by vector quantisation, bridge affinities between regions and spectral partitioning."""
from .bridge import AffinityMatrix, affinity_matrix, bridge_inertia_gap, raw_affinity, raw_affinity_naive, transform_affinity
from .data import (
    LabeledDataset,
    add_gaussian_noise,
    add_uniform_noise,
    generate,
    load_csv,
    make_blobs,
    make_circles,
    make_impossible,
    make_moons,
    make_smile,
    save_csv,
)
from .errors import BridgeClusterError, ConfigError, DataError, NumericalError
from .evaluation import ari, evaluate, m_sweep, nmi, noise_experiment, time_fit
from .model import BridgeCluster, ClusterModel, SBConfig, fit, kmeans_baseline, predict, suggest_m
from .quantize import QuantizationResult, kmeans, kmeans_plus_plus, lloyd, wcss_curve
from .spectral import normalized_laplacian, spectral_cluster

__version__ = "0.1.0"

__all__ = [
    "AffinityMatrix",
    "BridgeCluster",
    "BridgeClusterError",
    "ClusterModel",
    "ConfigError",
    "DataError",
    "LabeledDataset",
    "NumericalError",
    "QuantizationResult",
    "SBConfig",
    "add_gaussian_noise",
    "add_uniform_noise",
    "affinity_matrix",
    "ari",
    "bridge_inertia_gap",
    "evaluate",
    "fit",
    "generate",
    "kmeans",
    "kmeans_baseline",
    "kmeans_plus_plus",
    "lloyd",
    "load_csv",
    "m_sweep",
    "make_blobs",
    "make_circles",
    "make_impossible",
    "make_moons",
    "make_smile",
    "nmi",
    "noise_experiment",
    "normalized_laplacian",
    "predict",
    "raw_affinity",
    "raw_affinity_naive",
    "save_csv",
    "spectral_cluster",
    "suggest_m",
    "time_fit",
    "transform_affinity",
    "wcss_curve",
]
