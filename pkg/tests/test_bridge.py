import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridgecluster.bridge import (
    affinity_matrix,
    bridge_inertia_gap,
    projection_coeffs,
    raw_affinity,
    raw_affinity_naive,
    transform_affinity,
)
from bridgecluster.errors import CoincidentCentroids, InvalidM
from bridgecluster.numerics import make_rng, quantile
from bridgecluster.quantize import QuantizationResult, kmeans_plus_plus, lloyd


def fixed_regions(x, centroids, assignment):
    x = np.asarray(x, dtype=float)
    centroids = np.asarray(centroids, dtype=float)
    assignment = np.asarray(assignment)
    return QuantizationResult(centroids, assignment, np.bincount(assignment, minlength=len(centroids)), 0.0)


def test_projection_at_centroid_and_midpoint():
    pc = projection_coeffs([[0.0, 0.0], [1.0, 1.0]], [0.0, 0.0], [2.0, 2.0])
    np.testing.assert_allclose(pc.t, [0.0, 0.5])
    np.testing.assert_allclose(pc.alpha, [0.0, 0.5])


def test_projection_1d_example_with_explicit_point():
    pc = projection_coeffs([[0.9]], [0.0], [1.0])
    assert pc.t[0] == pytest.approx(0.9)
    assert pc.alpha[0] == pytest.approx(0.1)
    p = 0.0 + pc.t[0] * (1.0 - 0.0)
    assert abs(p - 1.0) / 1.0 == pytest.approx(pc.alpha[0])


def test_projection_clamps_and_rejects_coincident():
    pc = projection_coeffs([[-3.0], [4.0]], [0.0], [1.0])
    np.testing.assert_array_equal(pc.t, [0.0, 1.0])
    with pytest.raises(CoincidentCentroids):
        projection_coeffs([[1.0]], [2.0], [2.0])


def test_points_on_centroids_give_zero():
    q = fixed_regions([[0.0], [0.0], [1.0]], [[0.0], [1.0]], [0, 0, 1])
    x = [[0.0], [0.0], [1.0]]
    assert raw_affinity(x, q)[0, 1] == 0.0
    assert bridge_inertia_gap(x, q, 0, 1) == 0.0


def test_1d_worked_example():
    x = [[-0.1], [0.1], [0.9], [1.1]]
    q = fixed_regions(x, [[0.0], [1.0]], [0, 0, 1, 1])
    assert raw_affinity(x, q)[0, 1] == pytest.approx(0.005, abs=1e-15)
    assert bridge_inertia_gap(x, q, 0, 1) == pytest.approx(0.005, abs=1e-15)
    # I and B by hand: I = 4 * 0.01, B = 2 * 0.01 (only the outer points move)
    xs = np.array([-0.1, 0.1, 0.9, 1.1])
    inertia = np.sum((xs - np.array([0, 0, 1, 1])) ** 2)
    bridge = np.sum((xs - np.clip(xs, 0, 1)) ** 2)
    assert inertia == pytest.approx(0.04) and bridge == pytest.approx(0.02)


def test_midpoint_saturation():
    # every point projects to the midpoint of the bridge
    x = [[0.5, 1.0], [0.5, -1.0], [0.5, 2.0], [0.5, -2.0]]
    q = fixed_regions(x, [[0.0, 0.0], [1.0, 0.0]], [0, 0, 1, 1])
    assert raw_affinity(x, q)[0, 1] == pytest.approx(0.25, abs=1e-15)


def random_instance(seed, n=None, d=None, m=None):
    rng = make_rng(seed)
    n = n or int(rng.integers(6, 51))
    d = d or int(rng.integers(1, 4))
    m = m or int(rng.integers(2, 6))
    x = rng.normal(size=(n, d)) * rng.uniform(0.5, 3, size=d)
    q = lloyd(x, kmeans_plus_plus(x, m, rng))
    return x, q


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 1_000_000))
def test_closed_form_matches_oracle(seed):
    x, q = random_instance(seed)
    raw = raw_affinity(x, q)
    for k in range(q.m):
        for l in range(q.m):
            if k != l:
                assert raw[k, l] == pytest.approx(bridge_inertia_gap(x, q, k, l), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1_000_000))
def test_raw_invariants(seed):
    x, q = random_instance(seed)
    raw = raw_affinity(x, q)
    assert np.array_equal(raw, raw.T)
    assert np.all(np.diag(raw) == 0)
    assert np.all(raw >= 0) and np.all(raw <= 0.25 + 1e-15)
    np.testing.assert_allclose(raw, raw_affinity_naive(x, q), atol=1e-12)


def test_rigid_motion_and_scale_invariance():
    x, q = random_instance(17, n=40, d=3, m=5)
    raw = raw_affinity(x, q)
    rot, _ = np.linalg.qr(make_rng(1).normal(size=(3, 3)))
    shift = np.array([3.0, -2.0, 7.0])
    moved = fixed_regions(x @ rot.T + shift, q.centroids @ rot.T + shift, q.assignment)
    np.testing.assert_allclose(raw_affinity(x @ rot.T + shift, moved), raw, atol=1e-9)
    scaled = fixed_regions(4.5 * x, 4.5 * q.centroids, q.assignment)
    np.testing.assert_allclose(raw_affinity(4.5 * x, scaled), raw, atol=1e-9)


def test_coincident_centroids_raise():
    x = [[0.0], [1.0]]
    q = fixed_regions(x, [[0.5], [0.5]], [0, 1])
    with pytest.raises(CoincidentCentroids):
        raw_affinity(x, q)
    with pytest.raises(CoincidentCentroids):
        bridge_inertia_gap(x, q, 0, 1)


def test_transform_degenerate_constant():
    tr = transform_affinity(np.full((4, 4), 0.1))
    assert tr.degenerate and tr.gamma == 0.0
    off = tr.matrix[~np.eye(4, dtype=bool)]
    assert np.all(off == off[0])
    assert np.all(np.diag(tr.matrix) == 0)


def test_transform_percentile_ratio_is_m():
    x, q = random_instance(3, n=200, d=2, m=20)
    raw = raw_affinity(x, q)
    aff = affinity_matrix(x, q, 1e4)
    s = np.sqrt(raw)
    q10, q90 = quantile(s, [0.1, 0.9])
    ratio = aff.weight_of(q90**2) / aff.weight_of(q10**2)
    assert ratio == pytest.approx(1e4, rel=1e-6)


def test_transform_monotone_in_m_and_order_preserving():
    x, q = random_instance(4, n=150, d=2, m=12)
    raw = raw_affinity(x, q)
    a = transform_affinity(raw, 1e4)
    b = transform_affinity(raw, 2e4)
    assert b.gamma > a.gamma
    off = ~np.eye(12, dtype=bool)
    order = np.argsort(raw[off], kind="stable")
    assert np.all(np.diff(a.matrix[off][order]) >= 0)
    assert np.all(np.diff(b.matrix[off][order]) >= 0)


def test_stabilize_is_a_global_rescale():
    x, q = random_instance(5, n=150, d=2, m=10)
    raw = raw_affinity(x, q)
    a = transform_affinity(raw, stabilize=True)
    b = transform_affinity(raw, stabilize=False)
    assert a.gamma == pytest.approx(b.gamma, rel=1e-12)
    off = ~np.eye(10, dtype=bool)
    ratio = a.matrix[off] / b.matrix[off]
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-9)


def test_transform_rejects_small_m():
    with pytest.raises(InvalidM):
        transform_affinity(np.zeros((2, 2)), 1.0)


def test_overflow_guard_keeps_weights_finite():
    raw = np.array([[0.0, 0.25, 1e-30], [0.25, 0.0, 2e-30], [1e-30, 2e-30, 0.0]])
    tr = transform_affinity(raw, 1e300, stabilize=False)
    assert np.all(np.isfinite(tr.matrix))
