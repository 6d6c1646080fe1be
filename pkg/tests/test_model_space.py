"""Model-plane trigonometry, triangle validity, cosine laws, gluing."""

import math

import numpy as np
import pytest

from compass import (
    INVALID,
    VALID,
    VALID_DEGENERATE_BOUNDARY,
    DegenerateSide,
    DomainError,
    Hinge,
    InvalidTriangle,
    PreconditionFailed,
    alexandrov_gluing,
    model_angle,
    model_diameter,
    model_side,
    modified_distance,
    solve_hinge,
    trig,
    validate_triangle,
)

from geometry_oracles import model_side_bisect, planted_gluing

KAPPAS = (-2.0, -1.0, 0.0, 1.0, 2.0)


# --- trig -------------------------------------------------------------------

def test_trig_spherical_quarter_turn():
    sn, cs, ct = trig(1.0, math.pi / 2)
    assert sn == pytest.approx(1.0, abs=1e-15)
    assert abs(cs) < 1e-15
    assert abs(ct) < 1e-15


def test_trig_flat_is_linear():
    for t in (0.3, 1.0, 7.5):
        sn, cs, ct = trig(0.0, t)
        assert sn == t
        assert cs == 1.0
        assert ct == pytest.approx(1.0 / t, rel=1e-15)


def test_trig_hyperbolic_values():
    sn, cs, ct = trig(-1.0, 1.0)
    assert sn == pytest.approx(math.sinh(1.0), rel=1e-15)
    assert cs == pytest.approx(math.cosh(1.0), rel=1e-15)
    assert ct == pytest.approx(math.cosh(1.0) / math.sinh(1.0), rel=1e-14)


def test_trig_signed_infinity_at_sn_zero():
    _, _, ct = trig(1.0, 0.0)
    assert ct == math.inf
    _, _, ct = trig(1.0, math.pi)
    assert ct == -math.inf or abs(ct) > 1e14  # sin(pi) vanishes only in exact math


def test_trig_negative_argument_extends_oddly():
    for kap in KAPPAS:
        sn_p, cs_p, _ = trig(kap, 0.7)
        sn_m, cs_m, _ = trig(kap, -0.7)
        assert sn_m == pytest.approx(-sn_p, rel=1e-14)
        assert cs_m == pytest.approx(cs_p, rel=1e-14)


def test_trig_derivative_identities_fd():
    # |sn' - cs| and |cs' + kappa*sn| <= 1e-6*(1+|kappa|), h = 1e-6
    h = 1e-6
    for kap in KAPPAS:
        tol = 1e-6 * (1.0 + abs(kap))
        upper = 0.95 * model_diameter(kap) if kap > 0 else 3.0
        for t in np.linspace(0.05, upper, 40):
            sn_p, cs_p, _ = trig(kap, t + h)
            sn_m, cs_m, _ = trig(kap, t - h)
            sn, cs, ct = trig(kap, t)
            assert abs((sn_p - sn_m) / (2 * h) - cs) <= tol
            assert abs((cs_p - cs_m) / (2 * h) + kap * sn) <= tol
            if abs(sn) > 0.05:
                _, _, ct_p = trig(kap, t + h)
                _, _, ct_m = trig(kap, t - h)
                assert abs((ct_p - ct_m) / (2 * h) + ct * ct + kap) <= 1e-5


def test_trig_scaling_law():
    # sn_kappa(t) = sn_1(t*sqrt(kappa))/sqrt(kappa) for kappa > 0, rel 1e-12
    for kap in (0.5, 2.0, 9.0):
        s = math.sqrt(kap)
        for t in (0.1, 0.4, 0.9 * model_diameter(kap)):
            sn, cs, _ = trig(kap, t)
            sn1, cs1, _ = trig(1.0, t * s)
            assert sn == pytest.approx(sn1 / s, rel=1e-12)
            assert cs == pytest.approx(cs1, rel=1e-12)
            assert modified_distance(kap, t) == pytest.approx(
                modified_distance(1.0, t * s) / kap, rel=1e-12)


def test_trig_tiny_kappa_series_region():
    # |kappa|*t^2 below the series guard must still track the flat values
    for kap in (1e-9, -1e-9, 1e-12):
        sn, cs, ct = trig(kap, 0.3)
        assert sn == pytest.approx(0.3, rel=1e-9)
        assert cs == pytest.approx(1.0, abs=1e-9)
        assert ct == pytest.approx(1.0 / 0.3, rel=1e-9)


# --- modified distance --------------------------------------------------------

def test_modified_distance_cases():
    for t in (0.2, 1.0, 2.5):
        assert modified_distance(0.0, t) == pytest.approx(t * t / 2, rel=1e-14)
    assert modified_distance(1.0, math.pi) == pytest.approx(2.0, rel=1e-14)
    assert modified_distance(-1.0, 2.0) == pytest.approx(math.cosh(2.0) - 1.0,
                                                         rel=1e-13)


def test_modified_distance_caps_past_model_diameter():
    assert modified_distance(1.0, 10.0) == 2.0
    assert modified_distance(4.0, math.pi) == pytest.approx(0.5, rel=1e-14)


def test_modified_distance_ode_residual():
    # z'' + kappa z = 1 within 1e-5 on [0, diameter)
    h = 1e-4
    for kap in KAPPAS:
        upper = 0.95 * model_diameter(kap) if kap > 0 else 3.0
        for t in np.linspace(2 * h, upper, 25):
            z = modified_distance(kap, t)
            zp = modified_distance(kap, t + h)
            zm = modified_distance(kap, t - h)
            res = (zp - 2 * z + zm) / (h * h) + kap * z - 1.0
            assert abs(res) <= 1e-5


# --- model diameter / triangle validity ---------------------------------------

def test_model_diameter():
    assert model_diameter(0.0) == math.inf
    assert model_diameter(-3.0) == math.inf
    assert model_diameter(1.0) == math.pi
    assert model_diameter(4.0) == pytest.approx(math.pi / 2, rel=1e-15)


def test_validate_triangle_examples():
    assert validate_triangle(0.0, 3.0, 4.0, 5.0) == VALID
    assert validate_triangle(1.0, math.pi, math.pi / 2, math.pi / 2) \
        == VALID_DEGENERATE_BOUNDARY
    assert validate_triangle(1.0, 3.0, 3.0, 3.0) == INVALID
    assert validate_triangle(0.0, 1.0, 1.0, 3.0) == INVALID
    # collinear boundary is still a (degenerate but unique) flat triangle
    assert validate_triangle(0.0, 2.0, 1.0, 1.0) == VALID


# --- cosine laws ---------------------------------------------------------------

def test_model_angle_examples():
    assert model_angle(0.0, 1.0, 1.0, 1.0) == pytest.approx(math.pi / 3, rel=1e-15)
    assert model_angle(0.0, 5.0, 3.0, 4.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert model_angle(1.0, math.pi / 2, math.pi / 2, math.pi / 2) \
        == pytest.approx(math.pi / 2, rel=1e-12)


def test_model_angle_rejects_bad_input():
    with pytest.raises(InvalidTriangle):
        model_angle(0.0, 3.0, 1.0, 1.0)
    with pytest.raises(DegenerateSide):
        model_angle(0.0, 1.0, 0.0, 1.0)


def test_model_side_examples():
    assert model_side(0.0, math.pi / 2, 3.0, 4.0) == pytest.approx(5.0, rel=1e-14)
    assert model_side(1.0, math.pi, 1.0, 1.0) == pytest.approx(2.0, rel=1e-12)
    a = model_side(-1.0, math.pi / 2, 1.0, 1.0)
    assert a == pytest.approx(math.acosh(math.cosh(1.0) ** 2), rel=1e-13)
    assert a == pytest.approx(model_side_bisect(-1.0, math.pi / 2, 1.0, 1.0),
                              abs=1e-10)


def test_model_side_rejects_oversized_hinge():
    with pytest.raises(DomainError):
        model_side(1.0, 1.0, math.pi, 0.5)


def test_solve_hinge_wraps_model_side():
    h = Hinge(angle=1.1, side_b=0.6, side_c=0.9)
    assert solve_hinge(-0.5, h) == model_side(-0.5, 1.1, 0.6, 0.9)


def test_round_trip_angle_of_side():
    rng = np.random.default_rng(20260815)
    for kap in (-1.0, 0.0, 1.0, 0.37, -2.3):
        for _ in range(200):
            b = rng.uniform(0.1, 1.2)
            c = rng.uniform(0.1, 1.2)
            phi = rng.uniform(1e-3, math.pi - 1e-3)
            a = model_side(kap, phi, b, c)
            assert model_angle(kap, a, b, c) == pytest.approx(phi, abs=1e-9)


def test_model_side_monotone_in_angle():
    rng = np.random.default_rng(5)
    for kap in (-1.0, 0.0, 1.0):
        for _ in range(50):
            b = rng.uniform(0.1, 1.0)
            c = rng.uniform(0.1, 1.0)
            phis = np.sort(rng.uniform(1e-3, math.pi - 1e-3, size=6))
            sides = [model_side(kap, p, b, c) for p in phis]
            assert all(s1 < s2 for s1, s2 in zip(sides, sides[1:]))


def test_model_side_bisection_cross_check():
    rng = np.random.default_rng(99)
    for _ in range(60):
        kap = rng.uniform(-2.0, 2.0)
        b = rng.uniform(0.2, 1.1)
        c = rng.uniform(0.2, 1.1)
        phi = rng.uniform(0.05, math.pi - 0.05)
        closed = model_side(kap, phi, b, c)
        assert closed == pytest.approx(model_side_bisect(kap, phi, b, c), abs=1e-9)


def test_kappa_to_zero_continuity():
    # model_angle at kappa = +-1e-6 within 1e-5 of the flat angle
    rng = np.random.default_rng(11)
    for _ in range(200):
        b = rng.uniform(0.1, 3.0)
        c = rng.uniform(0.1, 3.0)
        a = rng.uniform(abs(b - c) + 1e-3, b + c - 1e-3)
        flat = model_angle(0.0, a, b, c)
        for kap in (1e-6, -1e-6):
            assert abs(model_angle(kap, a, b, c) - flat) <= 1e-5


# --- gluing --------------------------------------------------------------------

def test_gluing_flat_inequality_example():
    g1, g2 = alexandrov_gluing(0.0, 1.0, 1.0, 2.0, 2.5)
    assert g2 <= g1 + 1e-12
    assert g1 == pytest.approx(math.pi, rel=1e-12)  # collinear first triangle


def test_gluing_spherical_inequality_example():
    g1, g2 = alexandrov_gluing(1.0, 0.5, 0.5, 0.5, 0.6)
    assert g2 <= g1 + 1e-12


def test_gluing_flat_equality_case():
    # planted straight bend: X=(0,0), M=(1,0), Y=(2,0), P=(1/2, sqrt(3)/2)
    g1, g2 = alexandrov_gluing(0.0, 1.0, 1.0, 1.0, math.sqrt(3.0))
    assert g1 == pytest.approx(math.pi / 3, rel=1e-12)
    assert g2 == pytest.approx(g1, abs=1e-12)


def test_gluing_randomized_planted_configurations():
    rng = np.random.default_rng(20260815)
    for _ in range(400):
        x, y, z, d = planted_gluing(rng)
        g1, g2 = alexandrov_gluing(0.0, x, y, z, d)
        assert g2 <= g1 + 1e-9


def test_gluing_randomized_curved():
    rng = np.random.default_rng(42)
    checked = 0
    for _ in range(300):
        x, y, z, d = planted_gluing(rng, scale=0.4)
        for kap in (1.0, -1.0):
            try:
                g1, g2 = alexandrov_gluing(kap, x, y, z, d)
            except PreconditionFailed:
                continue
            checked += 1
            assert g2 <= g1 + 1e-9
    assert checked > 200


def test_gluing_preconditions():
    with pytest.raises(PreconditionFailed):
        alexandrov_gluing(0.0, 1.0, 1.0, 5.0, 1.0)  # first triangle invalid
    with pytest.raises(PreconditionFailed):
        alexandrov_gluing(1.0, 2.0, 2.0, 2.0, 2.0)  # perimeter over 2 pi
    with pytest.raises(PreconditionFailed):
        # straightened sides (x+y, y, d) = (14, 5, 0.1) bound no triangle
        alexandrov_gluing(0.0, 9.0, 5.0, 5.0, 0.1)
