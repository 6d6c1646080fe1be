"""Cones over finite angular metrics, products, and centers of mass."""

import math

import numpy as np
import pytest

from compass import (
    ConePoint,
    CurveFamily,
    DistanceMatrix,
    NegativeRadius,
    NoMidpoint,
    PointsTooFarApart,
    PreconditionFailed,
    WeightsInvalid,
    center_of_mass,
    cone_apex,
    cone_distance,
    cone_metric,
    cone_transfer_probe,
    diagonal_distance_check,
    euclidean_segments,
    product_metric,
    rescale,
    validate_metric,
)


def _two_point_base(angle: float) -> DistanceMatrix:
    return validate_metric(("v", "w"), np.array([[0.0, angle], [angle, 0.0]]))


def _circle_base(k: int) -> DistanceMatrix:
    d = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            gap = min(abs(i - j), k - abs(i - j))
            d[i, j] = gap * 2.0 * math.pi / k
    return validate_metric(tuple(str(i) for i in range(k)), d)


def test_cone_distance_basics():
    base = _two_point_base(math.pi / 2.0)
    assert cone_distance(base, ConePoint(0, 1.0), ConePoint(1, 1.0)) == \
        pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert cone_distance(base, ConePoint(0, 2.5), cone_apex()) == 2.5
    assert cone_distance(base, cone_apex(), cone_apex()) == 0.0
    with pytest.raises(NegativeRadius):
        ConePoint(0, -0.1)


def test_cone_distance_angle_cap():
    base = _two_point_base(3.0 * math.pi / 2.0)
    # capped to pi: antipodal directions, distance t + s
    assert cone_distance(base, ConePoint(0, 1.0), ConePoint(1, 1.0)) == \
        pytest.approx(2.0, rel=1e-15)
    assert cone_distance(base, ConePoint(0, 0.7), ConePoint(1, 2.0)) == \
        pytest.approx(2.7, rel=1e-15)


def test_cone_over_circle_matches_plane():
    k = 12
    base = _circle_base(k)
    pts = [ConePoint(i, r) for i in range(k) for r in (0.5, 1.0, 2.0)]
    cone = cone_metric(base, pts)
    # polar-coordinate oracle: direction i sits at angle 2*pi*i/k
    coords = np.array([[r * math.cos(2.0 * math.pi * i / k),
                        r * math.sin(2.0 * math.pi * i / k)]
                       for i in range(k) for r in (0.5, 1.0, 2.0)])
    oracle = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=2)
    assert np.abs(cone.d - oracle).max() <= 1e-12


def test_cone_merges_apex_copies():
    base = _two_point_base(1.0)
    cone = cone_metric(base, [ConePoint(0, 0.0), ConePoint(1, 0.0),
                              ConePoint(0, 1.0)])
    assert cone.n == 2
    assert cone.labels[0] == "apex"
    assert cone.d[0, 1] == 1.0


def test_cone_rejects_out_of_range_direction():
    base = _two_point_base(1.0)
    with pytest.raises(IndexError):
        cone_metric(base, [ConePoint(5, 1.0)])


def test_cone_always_a_metric():
    rng = np.random.default_rng(13)
    for _ in range(60):
        n = int(rng.integers(3, 7))
        d = rng.uniform(1.0, 2.0, size=(n, n))
        d = (d + d.T) / 2.0
        np.fill_diagonal(d, 0.0)
        scale = float(rng.uniform(0.5, 3.0))  # both capped and uncapped regimes
        base = validate_metric(tuple(map(str, range(n))), d * scale)
        pts = [cone_apex()] + [ConePoint(i, float(r))
                               for i in range(n) for r in (0.5, 1.3)]
        cone = cone_metric(base, pts)  # validate_metric runs inside
        assert cone.n == 2 * n + 1


def test_cone_scaling_identity():
    base = _circle_base(7)
    lam = 2.5
    pts = [cone_apex()] + [ConePoint(i, r) for i in range(7) for r in (0.5, 1.0)]
    scaled_pts = [ConePoint(p.direction, lam * p.radius) for p in pts]
    a = rescale(cone_metric(base, pts), lam)
    b = cone_metric(base, scaled_pts)
    assert np.abs(a.d - b.d).max() <= 1e-12


def test_product_with_point_is_isometric():
    rng = np.random.default_rng(2)
    d = rng.uniform(1.0, 2.0, size=(4, 4))
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    m = validate_metric(("a", "b", "c", "d"), d)
    point = validate_metric(("p",), np.zeros((1, 1)))
    prod = product_metric(m, point)
    assert np.array_equal(prod.d, m.d)


def test_product_unit_square_diagonal():
    seg = validate_metric(("0", "1"), np.array([[0.0, 1.0], [1.0, 0.0]]))
    sq = product_metric(seg, seg)
    assert sq.n == 4
    # row-major order: (0,0), (0,1), (1,0), (1,1)
    assert sq.d[0, 3] == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert sq.d[0, 1] == 1.0 and sq.d[0, 2] == 1.0


def test_product_random_inputs_stay_metric():
    rng = np.random.default_rng(31)
    for _ in range(100):
        n1, n2 = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        def rand_metric(n):
            d = rng.uniform(1.0, 2.0, size=(n, n))
            d = (d + d.T) / 2.0
            np.fill_diagonal(d, 0.0)
            return validate_metric(tuple(map(str, range(n))), d)
        product_metric(rand_metric(n1), rand_metric(n2))  # validates inside


def test_diagonal_distance_on_grid():
    k = 101
    xs = np.linspace(0.0, 1.0, k)
    d = np.abs(xs[:, None] - xs[None, :])
    m = validate_metric(tuple(str(i) for i in range(k)), d)
    rep = diagonal_distance_check(m, 0, k - 1)
    assert rep.passed
    assert rep.worst_at == (50, 50)
    assert rep.details["target"] == pytest.approx(1.0 / math.sqrt(2.0),
                                                  rel=1e-15)
    assert rep.details["midpoint_defect"] <= 1e-12


def test_diagonal_distance_same_point():
    m = validate_metric(("a", "b", "c"),
                        np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0],
                                  [2.0, 1.0, 0.0]]))
    rep = diagonal_distance_check(m, 1, 1)
    assert rep.passed
    assert rep.details["target"] == 0.0


def test_diagonal_distance_needs_midpoint():
    m = validate_metric(("a", "b"), np.array([[0.0, 2.0], [2.0, 0.0]]))
    with pytest.raises(NoMidpoint):
        diagonal_distance_check(m, 0, 1)


def test_center_of_mass_affine_triangle():
    pts = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    c = center_of_mass(pts, [1 / 3, 1 / 3, 1 / 3], euclidean_segments())
    assert np.allclose(c, [1 / 3, 1 / 3], atol=1e-15)


def test_center_of_mass_unit_weight():
    pts = [np.array([2.0, 3.0]), np.array([9.0, 9.0]), np.array([-1.0, 4.0])]
    c = center_of_mass(pts, [1.0, 0.0, 0.0], euclidean_segments())
    assert np.array_equal(c, pts[0])


def test_center_of_mass_two_points():
    pts = [np.array([0.0, 0.0]), np.array([4.0, 0.0])]
    for lam in (0.0, 0.25, 0.7, 1.0):
        c = center_of_mass(pts, [lam, 1.0 - lam], euclidean_segments())
        assert np.allclose(c, lam * pts[0] + (1.0 - lam) * pts[1], atol=1e-12)


def test_center_of_mass_matches_affine_up_to_eight_points():
    rng = np.random.default_rng(8)
    for _ in range(80):
        k = int(rng.integers(2, 9))
        pts = [rng.normal(size=3) for _ in range(k)]
        w = rng.uniform(0.0, 1.0, size=k)
        w /= w.sum()
        c = center_of_mass(pts, w, euclidean_segments())
        assert np.allclose(c, np.einsum("i,ij->j", w, np.stack(pts)),
                           atol=1e-12)


def test_center_of_mass_weight_validation():
    pts = [np.zeros(2), np.ones(2)]
    fam = euclidean_segments()
    with pytest.raises(WeightsInvalid):
        center_of_mass(pts, [0.5], fam)
    with pytest.raises(WeightsInvalid):
        center_of_mass(pts, [-0.1, 1.1], fam)
    with pytest.raises(WeightsInvalid):
        center_of_mass(pts, [0.5, 0.6], fam)


def test_center_of_mass_range_limit():
    fam = CurveFamily(curve=lambda p, q, t: p + t * (q - p),
                      dist=lambda p, q: float(np.linalg.norm(q - p)),
                      delta=0.5, length_bound_factor=1.0)
    with pytest.raises(PointsTooFarApart):
        center_of_mass([np.zeros(2), np.ones(2)], [0.5, 0.5], fam)


def test_curve_family_length_report():
    fam = euclidean_segments()
    rep = fam.length_report(np.zeros(2), np.array([3.0, 4.0]))
    assert rep.passed
    assert rep.details["length"] == pytest.approx(5.0, rel=1e-12)


def test_probe_circle_base_consistent():
    rep = cone_transfer_probe(_circle_base(4))
    assert rep.passed
    assert not rep.details["anomaly"]
    assert rep.details["cone_passed"]
    assert rep.details["sigma_passed"]


def test_probe_two_antipodal_points():
    rep = cone_transfer_probe(_two_point_base(math.pi))
    # cone samples lie on a line through the apex
    assert rep.details["cone_passed"]
    assert not rep.details["anomaly"]


def test_probe_stretched_tripod_no_anomaly():
    d = np.array([[0.0, math.pi, math.pi],
                  [math.pi, 0.0, 0.1],
                  [math.pi, 0.1, 0.0]])
    base = validate_metric(("a", "b", "c"), d)
    rep = cone_transfer_probe(base)
    assert not rep.details["sigma_passed"]   # perimeter exceeds the sphere cap
    assert not rep.details["cone_passed"]    # explicit violating quadruple
    assert not rep.details["anomaly"]
    assert rep.passed
    assert rep.details["cone_report"]["n_violations"] > 0
    sigma_gate = rep.details["sigma_report"]["perimeter_gate"]
    assert sigma_gate is not None and not sigma_gate["passed"]


def test_probe_rejects_wide_base():
    rep_d = np.array([[0.0, 4.0], [4.0, 0.0]])
    base = validate_metric(("a", "b"), rep_d)
    with pytest.raises(PreconditionFailed):
        cone_transfer_probe(base)
