"""External clustering metrics and the experiment runners built on them."""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .data import LabeledDataset, add_gaussian_noise, add_uniform_noise, make_blobs, make_impossible
from .errors import InvalidM, LengthMismatch
from .model import SBConfig, fit, kmeans_baseline
from .numerics import substreams

REPORT_COLUMNS = ("dataset", "method", "seed", "m", "K", "ari", "nmi", "fit_millis")


def contingency(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"label vectors differ in shape: {a.shape} vs {b.shape}")
    ua, ia = np.unique(a, return_inverse=True)
    ub, ib = np.unique(b, return_inverse=True)
    flat = np.bincount(ia * ub.size + ib, minlength=ua.size * ub.size)
    return flat.reshape(ua.size, ub.size).astype(np.int64)


def _pairs(v):
    v = np.asarray(v, dtype=np.float64)
    return np.sum(v * (v - 1) / 2)


def ari(a, b) -> float:
    """Adjusted Rand index, ``(index - expected) / (max - expected)``.

    When both partitions are trivial in the same way (the denominator
    vanishes) the labelings agree on every pair and the score is 1.
    """
    table = contingency(a, b)
    n = table.sum()
    if n < 2:
        raise LengthMismatch("ARI needs at least two labels")
    index = _pairs(table)
    sum_a = _pairs(table.sum(axis=1))
    sum_b = _pairs(table.sum(axis=0))
    expected = sum_a * sum_b / _pairs([n])
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def _entropy(counts) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def nmi(a, b) -> float:
    """Mutual information normalised by the arithmetic mean of the two entropies.

    Two single-cluster labelings score 1.
    """
    table = contingency(a, b)
    n = table.sum()
    if n < 1:
        raise LengthMismatch("NMI needs at least one label")
    ha = _entropy(table.sum(axis=1))
    hb = _entropy(table.sum(axis=0))
    if ha == 0 and hb == 0:
        return 1.0
    pij = table / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0)) / (n * n)
    nz = pij > 0
    mi = float(np.sum(pij[nz] * np.log(pij[nz] / outer[nz])))
    return float(min(1.0, max(0.0, mi / (0.5 * (ha + hb)))))


@dataclass
class EvalReport:
    dataset: str
    method: str
    seed: int
    m: int
    K: int
    ari: float
    nmi: float
    fit_millis: float
    config: dict = field(default_factory=dict)

    def row(self) -> list:
        return [getattr(self, c) for c in REPORT_COLUMNS]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def reports_to_jsonl(reports) -> str:
    return "".join(json.dumps(asdict(r), sort_keys=True) + "\n" for r in reports)


def evaluate(ds: LabeledDataset, config: SBConfig, score_rows=None, dataset_name=None) -> EvalReport:
    """Fit the bridge-affinity model on ``ds`` and score it (optionally on the first ``score_rows`` rows only)."""
    start = time.perf_counter()
    model = fit(ds.x, config)
    elapsed = 1000.0 * (time.perf_counter() - start)
    rows = slice(None, score_rows)
    truth, pred = ds.y[rows], model.point_labels[rows]
    return EvalReport(
        dataset=dataset_name or ds.name,
        method="bridgecluster",
        seed=config.seed,
        m=config.n_regions,
        K=config.n_clusters,
        ari=ari(truth, pred),
        nmi=nmi(truth, pred),
        fit_millis=elapsed,
        config=asdict(config),
    )


def evaluate_kmeans(ds: LabeledDataset, n_clusters: int, seed: int, restarts: int = 10) -> EvalReport:
    start = time.perf_counter()
    pred = kmeans_baseline(ds.x, n_clusters, seed=seed, restarts=restarts)
    elapsed = 1000.0 * (time.perf_counter() - start)
    return EvalReport(ds.name, "kmeans++", seed, n_clusters, n_clusters, ari(ds.y, pred), nmi(ds.y, pred), elapsed)


def linear_fit(x, y):
    """Least-squares line ``y = slope * x + intercept`` and its coefficient of determination."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / total if total > 0 else 1.0
    return float(slope), float(intercept), float(r2)


@dataclass
class TimingTable:
    variable: str
    rows: list  # (x, mean_ms, std_ms)
    slope: float
    intercept: float
    r2: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.variable, "mean_millis", "std_millis"])
        w.writerows(self.rows)
        return buf.getvalue()


def time_fit(
    values,
    sweep: str = "n",
    reps: int = 3,
    fixed_m: int = 10,
    fixed_n: int = 5000,
    n_clusters: int = 5,
    dim: int = 10,
    seed: int = 0,
    restarts: int = 10,
) -> TimingTable:
    """Wall-clock time of ``fit`` across a sweep of ``n`` or ``m`` on Gaussian blobs.

    Data generation is outside the timed region.  Runs are sequential.
    """
    if reps < 3:
        raise ValueError("reps must be >= 3")
    if sweep not in ("n", "m"):
        raise ValueError("sweep must be 'n' or 'm'")
    values = [int(v) for v in values]
    rows = []
    for v in values:
        n, m = (v, fixed_m) if sweep == "n" else (fixed_n, v)
        ds = make_blobs(n, n_clusters, dim, rng=seed)
        cfg = SBConfig(n_clusters=n_clusters, n_regions=m, seed=seed, restarts=restarts)
        times = []
        for _ in range(reps):
            start = time.perf_counter()
            fit(ds.x, cfg)
            times.append(1000.0 * (time.perf_counter() - start))
        rows.append((v, float(np.mean(times)), float(np.std(times, ddof=1))))
    if len(rows) >= 2:
        slope, intercept, r2 = linear_fit([r[0] for r in rows], [r[1] for r in rows])
    else:
        slope, intercept, r2 = float("nan"), float("nan"), float("nan")
    return TimingTable(sweep, rows, slope, intercept, r2)


def m_sweep_reports(ds: LabeledDataset, n_clusters: int, m_values, reps: int = 1, seed: int = 0) -> list:
    """One report per region count, scores and timings averaged over seeds ``seed .. seed + reps - 1``."""
    m_values = [int(m) for m in m_values]
    if any(m < n_clusters or m > ds.n for m in m_values):
        raise InvalidM(f"every m must lie in [K={n_clusters}, n={ds.n}]")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    out = []
    for m in m_values:
        runs = [evaluate(ds, SBConfig(n_clusters, m, seed=seed + r)) for r in range(reps)]
        out.append(
            EvalReport(
                dataset=ds.name,
                method="bridgecluster",
                seed=seed,
                m=m,
                K=n_clusters,
                ari=float(np.mean([r.ari for r in runs])),
                nmi=float(np.mean([r.nmi for r in runs])),
                fit_millis=float(np.mean([r.fit_millis for r in runs])),
                config={"reps": reps},
            )
        )
    return out


def m_sweep(ds: LabeledDataset, n_clusters: int, m_values, reps: int = 1, seed: int = 0):
    """Mean ARI / NMI per region count as ``[(m, mean_ari, mean_nmi), ...]`` in input order."""
    return [(r.m, r.ari, r.nmi) for r in m_sweep_reports(ds, n_clusters, m_values, reps, seed)]


NOISE_UNIFORM_COUNT = 250
NOISE_SIGMA = 0.1


def noise_experiment(seed: int = 0, n_clusters: int = 7, n_regions: int = 250):
    """Clean, uniform-noise and Gaussian-noise runs on the Impossible dataset.

    Scores always refer to the original points; appended uniform points are
    clustered but not scored.
    """
    data_rng, uniform_rng, gauss_rng = substreams(seed, 3)
    clean = make_impossible(rng=data_rng)
    noisy_u = add_uniform_noise(clean, NOISE_UNIFORM_COUNT, uniform_rng)
    noisy_g = add_gaussian_noise(clean, NOISE_SIGMA, gauss_rng)
    cfg = SBConfig(n_clusters, n_regions, seed=seed)
    return [
        evaluate(clean, cfg, dataset_name="impossible"),
        evaluate(noisy_u, cfg, score_rows=clean.n, dataset_name="impossible+uniform"),
        evaluate(noisy_g, cfg, dataset_name="impossible+gaussian"),
    ]
