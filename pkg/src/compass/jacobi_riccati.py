"""Scalar Jacobi and Riccati comparison solvers.

Integrates y'' + k(t) y = 0 with a fixed-step RK4 scheme, locates zeros by
local cubic interpolation plus bisection, and derives Riccati solutions of
a' + a^2 + k(t) = 0 through the logarithmic substitution a = y'/y.  Blow-up
of a is therefore a zero of y and is detected structurally; the pole is
never integrated through.

The checkers encode the standard comparison statements: ordered curvature
profiles give reversed ordering of Riccati solutions, ratios of Jacobi
solutions against the constant-curvature model are monotone, and conjugate
points appear no later than the model bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ProfileOrderViolated, ProfileUndefined, StepTooLarge
from .model_space import model_diameter, trig
from .report import Report

POLE_AT_ZERO = "pole_at_zero"

# Riccati values beyond this magnitude count as blown up.
BLOWUP_CAP = 1e9

_DOMAIN_SLACK = 1e-9


@dataclass(frozen=True)
class CurvatureProfile:
    """Curvature as a function of arc length on [0, horizon]."""

    horizon: float
    _func: Callable[[float], float] | None = None
    _ts: np.ndarray | None = field(default=None, repr=False)
    _ks: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    @classmethod
    def from_constant(cls, k: float, horizon: float) -> "CurvatureProfile":
        if horizon <= 0:
            raise ProfileUndefined(f"horizon must be positive, got {horizon!r}")
        return cls(horizon, lambda t: k, label=f"const:{k:g}")

    @classmethod
    def from_callable(cls, f: Callable[[float], float], horizon: float,
                      label: str = "callable") -> "CurvatureProfile":
        if horizon <= 0:
            raise ProfileUndefined(f"horizon must be positive, got {horizon!r}")
        return cls(horizon, f, label=label)

    @classmethod
    def from_samples(cls, ts, ks, label: str = "samples") -> "CurvatureProfile":
        ts = np.asarray(ts, dtype=float)
        ks = np.asarray(ks, dtype=float)
        if ts.ndim != 1 or ts.shape != ks.shape or ts.size < 2:
            raise ProfileUndefined("need matching 1-d sample arrays with >= 2 points")
        if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
            raise ProfileUndefined("sample times must increase strictly from 0")
        if not np.all(np.isfinite(ks)):
            raise ProfileUndefined("non-finite curvature sample")
        return cls(float(ts[-1]), None, ts, ks, label=label)

    def __call__(self, t: float) -> float:
        slack = _DOMAIN_SLACK * max(1.0, self.horizon)
        if t < -slack or t > self.horizon + slack:
            raise ProfileUndefined(
                f"profile evaluated at t={float(t)!r} outside [0, {self.horizon!r}]")
        t = min(max(t, 0.0), self.horizon)
        if self._func is not None:
            k = float(self._func(t))
        else:
            k = float(np.interp(t, self._ts, self._ks))
        if not math.isfinite(k):
            raise ProfileUndefined(f"profile value at t={float(t)!r} is {k!r}")
        return k


@dataclass(frozen=True)
class ScalarODESolution:
    """Fixed-grid solution record.

    ys holds y (Jacobi) or a (Riccati); dys holds y' for Jacobi solutions and
    is None for Riccati ones.  zeros are refined sign-change locations of ys;
    blowup_time is the pole location for truncated Riccati solutions.
    """

    ts: np.ndarray
    ys: np.ndarray
    dys: np.ndarray | None
    zeros: tuple[float, ...]
    blowup_time: float | None
    meta: dict = field(default_factory=dict)

    @property
    def first_zero(self) -> float | None:
        return self.zeros[0] if self.zeros else None

    def at(self, t: float) -> float:
        """Linear interpolation on the stored grid."""
        return float(np.interp(t, self.ts, self.ys))


def _normalized_step(horizon: float, step: float) -> tuple[int, float]:
    if step <= 0:
        raise StepTooLarge(f"step must be positive, got {step!r}")
    if step > horizon / 10.0:
        raise StepTooLarge(f"step {step!r} exceeds horizon/10 = {horizon / 10.0!r}")
    n = math.ceil(horizon / step - 1e-12)
    return n, horizon / n


def _refine_zero(ts: np.ndarray, ys: np.ndarray, i: int) -> float:
    """Zero of the local interpolating cubic inside [ts[i], ts[i+1]]."""
    lo = max(0, min(i - 1, len(ts) - 4))
    idx = slice(lo, lo + 4)
    u = ts[idx] - ts[i]
    coeffs = np.polyfit(u, ys[idx], deg=len(ts[idx]) - 1)
    a, b = 0.0, ts[i + 1] - ts[i]
    fa, fb = np.polyval(coeffs, a), np.polyval(coeffs, b)
    if fa == 0.0:
        return float(ts[i])
    if fa * fb > 0:  # cubic wiggles outside the sample sign change: fall back
        return float(ts[i] + (ts[i + 1] - ts[i]) * ys[i] / (ys[i] - ys[i + 1]))
    for _ in range(80):
        m = 0.5 * (a + b)
        fm = np.polyval(coeffs, m)
        if fm == 0.0:
            return float(ts[i] + m)
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    return float(ts[i] + 0.5 * (a + b))


def _find_zeros(ts: np.ndarray, ys: np.ndarray) -> tuple[float, ...]:
    """Zeros of y strictly after the start; y(0) = 0 is an initial
    condition, not a conjugate-point candidate."""
    zeros = []
    for i in range(len(ts) - 1):
        if ys[i] == 0.0:
            if i > 0:
                zeros.append(float(ts[i]))
        elif ys[i] * ys[i + 1] < 0:
            zeros.append(_refine_zero(ts, ys, i))
    if len(ys) and ys[-1] == 0.0:
        zeros.append(float(ts[-1]))
    return tuple(zeros)


def solve_jacobi(profile: CurvatureProfile, y0: float, dy0: float,
                 step: float) -> ScalarODESolution:
    """RK4 integration of y'' + k(t) y = 0, y(0) = y0, y'(0) = dy0."""
    n, h = _normalized_step(profile.horizon, step)
    ts = np.linspace(0.0, profile.horizon, n + 1)
    ys = np.empty(n + 1)
    dys = np.empty(n + 1)
    y, p = float(y0), float(dy0)
    ys[0], dys[0] = y, p
    for i in range(n):
        t = ts[i]
        k0 = profile(t)
        k1 = profile(t + 0.5 * h)
        k2 = profile(t + h)
        a1y, a1p = p, -k0 * y
        y2, p2 = y + 0.5 * h * a1y, p + 0.5 * h * a1p
        a2y, a2p = p2, -k1 * y2
        y3, p3 = y + 0.5 * h * a2y, p + 0.5 * h * a2p
        a3y, a3p = p3, -k1 * y3
        y4, p4 = y + h * a3y, p + h * a3p
        a4y, a4p = p4, -k2 * y4
        y += h / 6.0 * (a1y + 2.0 * a2y + 2.0 * a3y + a4y)
        p += h / 6.0 * (a1p + 2.0 * a2p + 2.0 * a3p + a4p)
        ys[i + 1], dys[i + 1] = y, p
    zeros = _find_zeros(ts, ys)
    return ScalarODESolution(ts, ys, dys, zeros, None,
                             meta={"step": h, "y0": y0, "dy0": dy0})


def solve_riccati(profile: CurvatureProfile, init, step: float) -> ScalarODESolution:
    """Solution of a' + a^2 + k(t) = 0 via the substitution a = y'/y.

    init is either a real number a(0) or the string "pole_at_zero" for the
    solution with a ~ 1/t at 0.  The grid starts at the first node past the
    pole for pole-initialized solutions and stops before the blow-up (the
    first zero of the underlying Jacobi solution).
    """
    if init == POLE_AT_ZERO:
        base = solve_jacobi(profile, 0.0, 1.0, step)
        start = 1  # a(0) is the pole itself
    else:
        a0 = float(init)
        base = solve_jacobi(profile, 1.0, a0, step)
        start = 0
    blowup = base.first_zero
    end = len(base.ts)
    if blowup is not None:
        end = int(np.searchsorted(base.ts, blowup, side="left"))
    ts = base.ts[start:end]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = base.dys[start:end] / base.ys[start:end]
    keep = np.abs(a) <= BLOWUP_CAP
    # drop capped nodes at either end (pole at 0, approach to blow-up)
    good = np.nonzero(keep)[0]
    if good.size:
        ts, a = ts[good[0]:good[-1] + 1], a[good[0]:good[-1] + 1]
    else:
        ts, a = ts[:0], a[:0]
    return ScalarODESolution(ts, a, None, (), blowup,
                             meta={"step": base.meta["step"], "init": init})


def _check_initial_order(init_hi, init_lo) -> None:
    hi_pole = init_hi == POLE_AT_ZERO
    lo_pole = init_lo == POLE_AT_ZERO
    if hi_pole and not lo_pole:
        raise ProfileOrderViolated(
            "pole-initialized upper solution cannot sit below a finite initial value")
    if not hi_pole and not lo_pole and float(init_hi) > float(init_lo):
        raise ProfileOrderViolated(
            f"initial values must satisfy a_hi(0) <= a_lo(0), got {init_hi!r} > {init_lo!r}")


def compare_riccati(profile_hi: CurvatureProfile, profile_lo: CurvatureProfile,
                    init_hi, init_lo, step: float, tol: float = 1e-6) -> Report:
    """Check a_hi(t) <= a_lo(t) + tol where both solutions exist.

    profile_hi must dominate profile_lo pointwise and the initial values must
    be ordered (a pole counts as +infinity); both conditions raise
    ProfileOrderViolated when broken since the conclusion is meaningless
    without them.  A violating margin indicates a solver bug and fails the
    report loudly.
    """
    horizon = min(profile_hi.horizon, profile_lo.horizon)
    n, h = _normalized_step(horizon, step)
    grid = np.linspace(0.0, horizon, n + 1)
    for t in grid:
        k_hi, k_lo = profile_hi(t), profile_lo(t)
        if k_hi < k_lo - 1e-12 * max(1.0, abs(k_lo)):
            raise ProfileOrderViolated(
                f"profile order k_hi >= k_lo fails at t={float(t)!r}: "
                f"{float(k_hi)!r} < {float(k_lo)!r}")
    _check_initial_order(init_hi, init_lo)
    trimmed_hi = CurvatureProfile.from_callable(profile_hi, horizon, profile_hi.label)
    trimmed_lo = CurvatureProfile.from_callable(profile_lo, horizon, profile_lo.label)
    sol_hi = solve_riccati(trimmed_hi, init_hi, step)
    sol_lo = solve_riccati(trimmed_lo, init_lo, step)
    common = np.intersect1d(sol_hi.ts, sol_lo.ts)
    details = {
        "blowup_hi": sol_hi.blowup_time,
        "blowup_lo": sol_lo.blowup_time,
        "common_points": int(common.size),
    }
    if common.size == 0:
        return Report("riccati_comparison", True, tol, None, None, details)
    a_hi = np.interp(common, sol_hi.ts, sol_hi.ys)
    a_lo = np.interp(common, sol_lo.ts, sol_lo.ys)
    margins = a_hi - a_lo
    worst_idx = int(np.argmax(margins))
    worst = float(margins[worst_idx])
    return Report("riccati_comparison", worst <= tol, tol, worst,
                  float(common[worst_idx]), details)


def rauch_ratio(profile: CurvatureProfile, kappa: float, kind: str,
                step: float, tol: float = 1e-6) -> Report:
    """Monotonicity of y(t)/y_model(t) under profile >= kappa.

    kind "sn" compares the (0, 1)-solution against the model sine, kind "cs"
    the (1, 0)-solution against the model cosine.  Asserts the ratio is
    non-increasing up to the first zero of y and that y vanishes no later
    than the model solution (within one step).
    """
    if kind not in ("sn", "cs"):
        raise ValueError(f"kind must be 'sn' or 'cs', got {kind!r}")
    n, h = _normalized_step(profile.horizon, step)
    grid = np.linspace(0.0, profile.horizon, n + 1)
    for t in grid:
        k = profile(t)
        if k < kappa - 1e-12 * max(1.0, abs(kappa)):
            raise ProfileOrderViolated(
                f"profile must dominate kappa={kappa!r}, "
                f"fails at t={float(t)!r} with {float(k)!r}")
    if kind == "sn":
        sol = solve_jacobi(profile, 0.0, 1.0, step)
        model_vals = np.array([trig(kappa, t)[0] for t in grid])
        model_zero = model_diameter(kappa) if kappa > 0 else None
    else:
        sol = solve_jacobi(profile, 1.0, 0.0, step)
        model_vals = np.array([trig(kappa, t)[1] for t in grid])
        model_zero = model_diameter(kappa) / 2.0 if kappa > 0 else None
    y_zero = sol.first_zero
    cutoff = min(y_zero if y_zero is not None else math.inf,
                 model_zero if model_zero is not None else math.inf)
    mask = (grid < cutoff - 1e-12) & (model_vals > 1e-12)
    if kind == "sn":
        mask &= grid > 0
    ratios = sol.ys[mask] / model_vals[mask]
    worst = None
    worst_at = None
    monotone = True
    if ratios.size >= 2:
        diffs = np.diff(ratios)
        worst_idx = int(np.argmax(diffs))
        worst = float(diffs[worst_idx])
        worst_at = float(grid[mask][worst_idx + 1])
        monotone = worst <= tol
    zero_ok = True
    if model_zero is not None and model_zero <= profile.horizon + 1e-12:
        zero_ok = y_zero is not None and y_zero <= model_zero + h
    details = {
        "kind": kind,
        "first_zero": y_zero,
        "model_first_zero": model_zero,
        "zero_ordering_ok": zero_ok,
        "ratio_points": int(ratios.size),
    }
    return Report("rauch_ratio", monotone and zero_ok, tol, worst, worst_at, details)


def conjugate_bound_check(profile: CurvatureProfile, kappa: float,
                          step: float | None = None) -> Report:
    """First zero of the (0, 1)-solution occurs by pi/sqrt(kappa) + step.

    Requires kappa > 0, profile >= kappa pointwise, and a horizon covering
    the model bound.
    """
    if kappa <= 0:
        raise ProfileOrderViolated(
            f"conjugate bound needs kappa > 0, got {kappa!r}")
    bound = math.pi / math.sqrt(kappa)
    if profile.horizon < bound:
        raise ProfileUndefined(
            f"horizon {profile.horizon!r} does not cover the model bound {bound!r}")
    horizon = min(profile.horizon, 1.05 * bound)
    if step is None:
        step = bound / 2048.0
    step = min(step, horizon / 10.0)
    trimmed = CurvatureProfile.from_callable(profile, horizon, profile.label)
    n, h = _normalized_step(horizon, step)
    grid = np.linspace(0.0, horizon, n + 1)
    for t in grid:
        k = trimmed(t)
        if k < kappa - 1e-12 * max(1.0, kappa):
            raise ProfileOrderViolated(
                f"profile must dominate kappa={kappa!r}, "
                f"fails at t={float(t)!r} with {float(k)!r}")
    sol = solve_jacobi(trimmed, 0.0, 1.0, step)
    first = sol.first_zero
    passed = first is not None and first <= bound + h
    margin = None if first is None else float(first - bound)
    return Report("conjugate_bound", passed, h, margin, first,
                  {"model_bound": bound, "step": h})
