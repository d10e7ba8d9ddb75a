import csv
import io
import json

import numpy as np
import pytest

from bridgecluster.data import make_moons
from bridgecluster.errors import InvalidM, LengthMismatch
from bridgecluster.evaluation import (
    REPORT_COLUMNS,
    EvalReport,
    ari,
    contingency,
    evaluate_kmeans,
    linear_fit,
    m_sweep,
    nmi,
    reports_to_csv,
    reports_to_jsonl,
    time_fit,
)

from oracles import ari_pairs, metric_pairs, nmi_counts, set_partitions


def test_ari_examples():
    a = [0, 0, 1, 1, 2]
    assert ari(a, a) == 1.0
    assert ari([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    assert ari([0] * 6, list(range(6))) == pytest.approx(0.0, abs=1e-15)
    assert ari_pairs([0] * 6, list(range(6))) == pytest.approx(0.0, abs=1e-15)


def test_nmi_examples():
    assert nmi([0, 0, 1, 1, 2, 2], [5, 5, 3, 3, 1, 1]) == pytest.approx(1.0)
    n = 16
    halves = [0] * (n // 2) + [1] * (n // 2)
    parity = [i % 2 for i in range(n)]
    assert nmi(halves, parity) == pytest.approx(0.0, abs=1e-12)
    assert nmi([0, 1, 0, 1], [0, 0, 0, 0]) == 0.0
    assert nmi([0, 0, 0], [1, 1, 1]) == 1.0


def test_metrics_match_oracles_small():
    for a, b in metric_pairs(max_n=6, full_upto=4, partners=6):
        assert ari(a, b) == pytest.approx(ari_pairs(a, b), abs=1e-12)
        assert nmi(a, b) == pytest.approx(nmi_counts(a, b), abs=1e-12)


def test_partition_enumeration_counts():
    # Stirling numbers S(n,1)+S(n,2)+S(n,3)
    assert [len(set_partitions(n, 3)) for n in range(1, 9)] == [1, 2, 5, 14, 41, 122, 365, 1094]


def test_metric_symmetry_and_ranges():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.integers(0, 4, 30)
        b = rng.integers(0, 3, 30)
        assert ari(a, b) == pytest.approx(ari(b, a), abs=1e-14)
        assert nmi(a, b) == pytest.approx(nmi(b, a), abs=1e-14)
        assert -0.5 <= ari(a, b) <= 1 and 0 <= nmi(a, b) <= 1


def test_ari_one_only_for_identical_partitions():
    parts = set_partitions(5, 3)
    for a in parts:
        for b in parts:
            assert (ari(a, b) == pytest.approx(1.0)) == (a == b)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        ari([0, 1], [0])
    with pytest.raises(LengthMismatch):
        ari([0], [0])
    with pytest.raises(LengthMismatch):
        nmi([], [])


def test_contingency():
    np.testing.assert_array_equal(contingency(["a", "b", "a"], [1, 1, 2]), [[1, 1], [1, 0]])


def test_report_serialization():
    r = EvalReport("moons", "bridgecluster", 1, 12, 2, 0.9, 0.8, 3.5, {"k": 1})
    rows = list(csv.reader(io.StringIO(reports_to_csv([r]))))
    assert tuple(rows[0]) == REPORT_COLUMNS
    assert rows[1][:3] == ["moons", "bridgecluster", "1"]
    doc = json.loads(reports_to_jsonl([r]))
    assert doc["ari"] == 0.9 and doc["config"] == {"k": 1}


def test_linear_fit_exact_line():
    slope, intercept, r2 = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
    assert (slope, intercept) == pytest.approx((2.0, 1.0))
    assert r2 == pytest.approx(1.0)


def test_time_fit_single_point():
    table = time_fit([300], sweep="n", reps=3, fixed_m=5, restarts=1)
    assert len(table.rows) == 1
    x, mean, std = table.rows[0]
    assert x == 300 and mean > 0 and std >= 0
    assert np.isnan(table.r2)
    assert table.to_csv().splitlines()[0] == "n,mean_millis,std_millis"
    with pytest.raises(ValueError):
        time_fit([300], reps=2)


def test_m_sweep_reduction_and_reproducible():
    ds = make_moons(300, noise=0.05, rng=0)
    table = m_sweep(ds, 2, [2], reps=2, seed=4)
    base = np.mean([evaluate_kmeans(ds, 2, seed=4 + r).ari for r in range(2)])
    assert table[0][1] == pytest.approx(base, abs=1e-12)
    assert m_sweep(ds, 2, [2, 8], seed=1) == m_sweep(ds, 2, [2, 8], seed=1)
    with pytest.raises(InvalidM):
        m_sweep(ds, 2, [1])


def test_m_sweep_moons_direction():
    ds = make_moons(1000, noise=0.05, rng=0)
    table = dict((m, a) for m, a, _ in m_sweep(ds, 2, [2, 12, 24], seed=0))
    assert table[24] >= table[2]
