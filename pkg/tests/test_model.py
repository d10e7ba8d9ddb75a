import numpy as np
import pytest

from bridgecluster.errors import CoincidentCentroids, DimensionError, InvalidM, KFeasibility
from bridgecluster.evaluation import ari
from bridgecluster.model import (
    ClusterModel,
    SBConfig,
    BridgeCluster,
    fit,
    kmeans_baseline,
    predict,
    propagate,
    suggest_m,
)
from bridgecluster.numerics import make_rng


def blobs(centres, per=40, sd=0.3, seed=0):
    rng = make_rng(seed)
    centres = np.asarray(centres, dtype=float)
    x = np.vstack([c + sd * rng.normal(size=(per, centres.shape[1])) for c in centres])
    return x, np.repeat(np.arange(len(centres)), per)


def test_m_equals_k_reduces_to_kmeans():
    x, _ = blobs([[0, 0], [3, 0], [0, 3]], sd=1.0, seed=1)
    model = fit(x, SBConfig(3, 3, seed=5))
    assert ari(model.point_labels, kmeans_baseline(x, 3, seed=5)) == 1.0


def test_two_blobs_perfect():
    x, y = blobs([[0, 0], [10, 0]], seed=2)
    model = fit(x, SBConfig(2, 8, seed=0))
    assert ari(y, model.point_labels) == 1.0


def test_n_equals_m_equals_k():
    x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 3.0], [5.0, 5.0]])
    model = fit(x, SBConfig(4, 4, seed=0))
    assert sorted(model.point_labels.tolist()) == [0, 1, 2, 3]


def test_fit_deterministic():
    x, _ = blobs([[0, 0], [4, 1]], seed=3)
    a = fit(x, SBConfig(2, 10, seed=11))
    b = fit(x, SBConfig(2, 10, seed=11))
    np.testing.assert_array_equal(a.centroids, b.centroids)
    np.testing.assert_array_equal(a.point_labels, b.point_labels)
    assert a.gamma == b.gamma


def test_model_invariants():
    x, _ = blobs([[0, 0], [4, 1], [2, 5]], seed=4)
    model = fit(x, SBConfig(3, 12, seed=1))
    np.testing.assert_array_equal(model.point_labels, model.region_labels[model.assignment])
    assert set(model.region_labels.tolist()) == {0, 1, 2}
    assert model.affinity.order == 12


def test_predict_training_points_idempotent():
    x, _ = blobs([[0, 0], [4, 1]], seed=5)
    model = fit(x, SBConfig(2, 10, seed=2))
    np.testing.assert_array_equal(model.predict(x), model.point_labels)


def manual_model():
    cfg = SBConfig(2, 3)
    return ClusterModel(cfg, np.array([[0.0, 0.0], [2.0, 0.0], [10.0, 10.0]]), np.array([1, 0, 0]), 1.0)


def test_predict_tie_break_and_far_point():
    model = manual_model()
    assert predict(model, [[1.0, 0.0]])[0] == 1  # equidistant to regions 0 and 1 -> region 0
    far = np.array([[0.0, 0.0]]) + 50 * np.array([[-1.0, -0.2]])
    d = np.linalg.norm(model.centroids - far, axis=1)
    assert predict(model, far)[0] == model.region_labels[np.argmin(d)]


def test_predict_dimension_error():
    with pytest.raises(DimensionError):
        manual_model().predict(np.zeros((2, 3)))


def test_propagate_examples():
    regions = np.array([2, 0, 1])
    np.testing.assert_array_equal(propagate(regions, [0, 1, 2]), regions)
    np.testing.assert_array_equal(propagate(regions, [0, 0, 0]), [2, 2, 2])
    rng = make_rng(0)
    regions = rng.integers(0, 4, size=20)
    assignment = rng.integers(0, 20, size=200)
    out = propagate(regions, assignment)
    for i in range(200):
        assert out[i] == regions[assignment[i]]
    with pytest.raises(IndexError):
        propagate(regions, [20])


def test_config_validation():
    x = np.zeros((5, 2))
    with pytest.raises(KFeasibility):
        fit(x, SBConfig(3, 2))
    with pytest.raises(InvalidM):
        fit(x, SBConfig(2, 6))
    with pytest.raises(InvalidM):
        fit(make_rng(0).normal(size=(5, 2)), SBConfig(2, 3, m_factor=1.0))


def test_stage_context_in_errors():
    x = np.array([[0.0], [0.0], [0.0], [1.0]])
    with pytest.raises(CoincidentCentroids, match="affinity"):
        fit(x, SBConfig(2, 3, seed=0))


def test_json_round_trip_exact(tmp_path):
    x, _ = blobs([[0, 0], [4, 1]], seed=6)
    model = fit(x, SBConfig(2, 9, seed=3))
    path = tmp_path / "m.json"
    model.save(path)
    back = ClusterModel.load(path)
    assert back.config == model.config
    np.testing.assert_array_equal(back.centroids, model.centroids)
    np.testing.assert_array_equal(back.region_labels, model.region_labels)
    assert back.gamma == model.gamma
    np.testing.assert_array_equal(back.predict(x), model.point_labels)


def test_json_rejects_foreign_documents():
    with pytest.raises(DimensionError):
        ClusterModel.from_dict({"format": "other"})
    doc = manual_model().to_dict()
    doc["version"] = 99
    with pytest.raises(DimensionError):
        ClusterModel.from_dict(doc)


def second_differences(curve):
    w = [v for _, v in curve]
    return [abs((w[j] - w[j + 1]) - (w[j + 1] - w[j + 2])) for j in range(1, len(w) - 2)], w[0] - w[1]


def test_suggest_m_single_blob_smallest():
    x = make_rng(1).normal(size=(300, 1))
    m, curve = suggest_m(x, 1, [10, 20, 30, 40], rng=0, restarts=3)
    diffs, initial = second_differences(curve)
    assert m == 10 and diffs[0] <= 0.05 * initial


def rule_oracle(curve, cands):
    diffs, initial = second_differences(curve)
    if len(cands) < 3 or initial <= 0:
        return cands[0]
    for j, dd in enumerate(diffs):
        if dd <= 0.05 * initial:
            return cands[j]
    return cands[-1]


@pytest.mark.parametrize("seed", range(4))
def test_suggest_m_follows_documented_rule(seed):
    x, _ = blobs([[0, 0], [5, 0], [0, 5]], sd=0.5 + seed, seed=seed)
    cands = [4, 6, 9, 13, 20]
    m, curve = suggest_m(x, 3, cands, rng=seed, restarts=2)
    assert m == rule_oracle(curve, cands)
    w = [v for _, v in curve]
    assert all(a >= b for a, b in zip(w, w[1:]))


def test_suggest_m_three_blobs_above_k():
    x, _ = blobs([[0, 0], [6, 0], [3, 5]], seed=7)
    m, curve = suggest_m(x, 3, [4, 8, 16, 32], rng=0, restarts=3)
    assert m >= 4 and m in (4, 8, 16, 32)
    assert [c for c, _ in curve] == [3, 4, 8, 16, 32]


def test_suggest_m_single_candidate_and_errors():
    x, _ = blobs([[0, 0], [6, 0]], seed=8)
    assert suggest_m(x, 2, [7], rng=0, restarts=2)[0] == 7
    with pytest.raises(InvalidM):
        suggest_m(x, 2, [2, 5])
    with pytest.raises(InvalidM):
        suggest_m(x, 2, [])


def test_estimator_wrapper():
    x, y = blobs([[0, 0], [10, 0]], seed=9)
    est = BridgeCluster(2, 8, seed=1)
    with pytest.raises(RuntimeError):
        est.predict(x)
    labels = est.fit_predict(x)
    assert ari(y, labels) == 1.0
    np.testing.assert_array_equal(est.predict(x), labels)
