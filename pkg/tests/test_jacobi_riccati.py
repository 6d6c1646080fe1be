"""Scalar Jacobi/Riccati integration and the comparison harnesses."""

import math

import numpy as np
import pytest

from compass import (
    POLE_AT_ZERO,
    CurvatureProfile,
    ProfileOrderViolated,
    ProfileUndefined,
    StepTooLarge,
    compare_riccati,
    conjugate_bound_check,
    rauch_ratio,
    solve_jacobi,
    solve_riccati,
)


def const(k: float, T: float) -> CurvatureProfile:
    return CurvatureProfile.from_constant(k, T)


# --- solve_jacobi ---------------------------------------------------------------

def test_jacobi_matches_sine():
    sol = solve_jacobi(const(1.0, math.pi), 0.0, 1.0, 1e-3)
    err = np.abs(sol.ys - np.sin(sol.ts)).max()
    assert err <= 1e-8


def test_jacobi_flat_is_exactly_linear():
    sol = solve_jacobi(const(0.0, 5.0), 0.0, 1.0, 0.01)
    assert np.abs(sol.ys - sol.ts).max() <= 1e-10


def test_jacobi_matches_cosh():
    sol = solve_jacobi(const(-1.0, 2.0), 1.0, 0.0, 1e-3)
    assert sol.at(2.0) == pytest.approx(math.cosh(2.0), abs=1e-7)


def test_jacobi_rejects_coarse_step():
    with pytest.raises(StepTooLarge):
        solve_jacobi(const(0.0, 1.0), 0.0, 1.0, 0.2)
    with pytest.raises(StepTooLarge):
        solve_jacobi(const(0.0, 1.0), 0.0, 1.0, -0.1)


def test_jacobi_zeros_exclude_initial_condition():
    # y(0) = 0 is initial data, not a conjugate point
    sol = solve_jacobi(const(1.0, 1.5 * math.pi), 0.0, 1.0, 1e-3)
    assert sol.zeros
    assert sol.zeros[0] > 0.5
    assert sol.zeros[0] == pytest.approx(math.pi, abs=1e-9)


def test_jacobi_convergence_order():
    # halving the step shrinks the max error by at least 8x (4th order)
    for kap, y0, dy0, exact in (
        (1.0, 0.0, 1.0, np.sin),
        (0.0, 1.0, 1.0, lambda t: 1.0 + t),
        (-1.0, 1.0, 0.0, np.cosh),
    ):
        errs = []
        for step in (0.02, 0.01):
            sol = solve_jacobi(const(kap, 2.0), y0, dy0, step)
            errs.append(np.abs(sol.ys - exact(sol.ts)).max())
        if errs[0] > 1e-13:  # below that, rounding noise dominates
            assert errs[0] / errs[1] >= 8.0


def test_wronskian_conserved():
    prof = CurvatureProfile.from_callable(lambda t: 1.0 + 0.5 * math.sin(3 * t), 4.0)
    s1 = solve_jacobi(prof, 0.0, 1.0, 2e-3)
    s2 = solve_jacobi(prof, 1.0, 0.0, 2e-3)
    w = s1.dys * s2.ys - s1.ys * s2.dys
    assert np.abs(w - w[0]).max() <= 1e-8


def test_profile_from_samples_interpolates():
    prof = CurvatureProfile.from_samples([0.0, 1.0, 2.0], [1.0, 3.0, 3.0])
    assert prof(0.5) == pytest.approx(2.0)
    assert prof(2.0) == 3.0
    with pytest.raises(ProfileUndefined):
        prof(2.5)
    with pytest.raises(ProfileUndefined):
        CurvatureProfile.from_samples([0.5, 1.0], [1.0, 1.0])


# --- solve_riccati ----------------------------------------------------------------

def test_riccati_flat_pole_is_one_over_t():
    sol = solve_riccati(const(0.0, 5.0), POLE_AT_ZERO, 1e-3)
    mask = (sol.ts >= 0.1) & (sol.ts <= 5.0)
    assert np.abs(sol.ys[mask] - 1.0 / sol.ts[mask]).max() <= 1e-8


def test_riccati_spherical_pole_is_cot_with_blowup_at_pi():
    sol = solve_riccati(const(1.0, 4.0), POLE_AT_ZERO, 1e-3)
    mask = (sol.ts >= 0.1) & (sol.ts <= 3.0)
    assert np.abs(sol.ys[mask] - 1.0 / np.tan(sol.ts[mask])).max() <= 1e-6
    assert sol.blowup_time == pytest.approx(math.pi, abs=1e-6)
    assert sol.ts[-1] < sol.blowup_time


def test_riccati_zero_init_is_minus_tan():
    sol = solve_riccati(const(1.0, 1.4), 0.0, 1e-4)
    assert np.abs(sol.ys + np.tan(sol.ts)).max() <= 1e-7


def test_riccati_jacobi_consistency():
    prof = CurvatureProfile.from_callable(lambda t: 0.5 + 0.3 * math.cos(2 * t), 3.0)
    step = 2e-3
    ric = solve_riccati(prof, POLE_AT_ZERO, step)
    jac = solve_jacobi(prof, 0.0, 1.0, step)
    first = jac.first_zero if jac.first_zero is not None else math.inf
    mask = (ric.ts >= 2 * step) & (ric.ts <= first - 2 * step)
    direct = jac.dys[np.searchsorted(jac.ts, ric.ts[mask])] / \
        jac.ys[np.searchsorted(jac.ts, ric.ts[mask])]
    assert np.abs(ric.ys[mask] - direct).max() <= 1e-7


# --- compare_riccati -----------------------------------------------------------------

def test_compare_cot_below_one_over_t():
    rep = compare_riccati(const(1.0, math.pi - 0.01), const(0.0, math.pi - 0.01),
                          POLE_AT_ZERO, POLE_AT_ZERO, 1e-3)
    assert rep.passed
    assert rep.worst <= 0.0  # strict inequality on (0, pi)
    # cot t - 1/t decreases from 0, so the tightest point hugs the pole
    assert rep.worst_at < 0.01
    assert rep.details["common_points"] > 3000


def test_compare_identical_problems():
    prof = const(0.7, 2.0)
    rep = compare_riccati(prof, prof, 0.3, 0.3, 1e-3, tol=1e-9)
    assert rep.passed
    assert abs(rep.worst) <= 1e-9


def test_compare_perturbed_profile_against_cot():
    hi = CurvatureProfile.from_callable(lambda t: 1.0 + 0.5 * math.sin(t),
                                        0.9 * math.pi)
    rep = compare_riccati(hi, const(1.0, 0.9 * math.pi),
                          POLE_AT_ZERO, POLE_AT_ZERO, 1e-3)
    assert rep.passed


def test_compare_rejects_unordered_profiles():
    with pytest.raises(ProfileOrderViolated):
        compare_riccati(const(0.0, 1.0), const(1.0, 1.0),
                        POLE_AT_ZERO, POLE_AT_ZERO, 1e-3)
    with pytest.raises(ProfileOrderViolated):
        compare_riccati(const(1.0, 1.0), const(0.0, 1.0), 0.5, 0.2, 1e-3)
    with pytest.raises(ProfileOrderViolated):
        compare_riccati(const(1.0, 1.0), const(0.0, 1.0), POLE_AT_ZERO, 0.2, 1e-3)


def test_compare_randomized_profiles_never_violate():
    rng = np.random.default_rng(314)
    for _ in range(200):
        base = rng.uniform(-1.0, 1.0)
        amp = rng.uniform(0.0, 0.5)
        freq = rng.uniform(0.5, 3.0)
        lift = rng.uniform(0.0, 1.0)

        def lo_f(t, b=base, a=amp, w=freq):
            return b + a * math.sin(w * t)

        def hi_f(t, l=lift):
            return lo_f(t) + l

        T = 1.0
        rep = compare_riccati(CurvatureProfile.from_callable(hi_f, T),
                              CurvatureProfile.from_callable(lo_f, T),
                              POLE_AT_ZERO, POLE_AT_ZERO, 0.02)
        assert rep.passed


# --- rauch_ratio ------------------------------------------------------------------

def test_rauch_sine_over_t():
    rep = rauch_ratio(const(1.0, math.pi), 0.0, "sn", 1e-3)
    assert rep.passed
    assert rep.details["zero_ordering_ok"]
    assert rep.worst <= 0.0


def test_rauch_identical_ratio_is_constant():
    rep = rauch_ratio(const(1.0, 3.0), 1.0, "sn", 1e-3, tol=1e-9)
    assert rep.passed
    assert abs(rep.worst) <= 1e-9


def test_rauch_cosine_kind():
    # profile 1 against model kappa = 1/4: cos t / cos(t/2), zero pi/2 <= pi
    rep = rauch_ratio(const(1.0, math.pi), 0.25, "cs", 1e-3)
    assert rep.passed
    assert rep.details["first_zero"] == pytest.approx(math.pi / 2, abs=1e-6)
    assert rep.details["model_first_zero"] == pytest.approx(math.pi)


def test_rauch_rejects_dominated_profile():
    with pytest.raises(ProfileOrderViolated):
        rauch_ratio(const(0.0, 1.0), 1.0, "sn", 1e-3)
    with pytest.raises(ValueError):
        rauch_ratio(const(1.0, 1.0), 0.0, "tangent", 1e-3)


# --- conjugate bound -----------------------------------------------------------------

def test_conjugate_bound_const_four():
    rep = conjugate_bound_check(const(4.0, 2.0), 4.0, 1e-3)
    assert rep.passed
    assert rep.worst_at == pytest.approx(math.pi / 2, abs=1e-3)


def test_conjugate_bound_growing_profile():
    prof = CurvatureProfile.from_callable(lambda t: 1.0 + t * t, 3.5)
    rep = conjugate_bound_check(prof, 1.0, 1e-3)
    assert rep.passed
    assert rep.worst_at <= math.pi
    # Sturm-style cross-check: halving the step moves the zero negligibly
    rep2 = conjugate_bound_check(prof, 1.0, 5e-4)
    assert rep2.worst_at == pytest.approx(rep.worst_at, abs=1e-6)


def test_conjugate_bound_boundary_case():
    rep = conjugate_bound_check(const(1.0, 3.5), 1.0, 1e-3)
    assert rep.passed
    assert rep.worst_at == pytest.approx(math.pi, abs=1e-3)


def test_conjugate_bound_preconditions():
    with pytest.raises(ProfileOrderViolated):
        conjugate_bound_check(const(1.0, 4.0), -1.0)
    with pytest.raises(ProfileUndefined):
        conjugate_bound_check(const(1.0, 1.0), 1.0)  # horizon below pi
    with pytest.raises(ProfileOrderViolated):
        conjugate_bound_check(const(0.5, 4.0), 1.0)
