"""Volume comparison: model ball volumes and the constants they control.

Ball volumes in the n-dimensional model space of curvature kappa are
integrals of sn^(n-1) against the measure of the unit (n-1)-sphere; they are
evaluated by adaptive quadrature (closed forms for n <= 3 serve as an
independent cross-check).  On top of them sit the classical bounded-package
constants: cap-counting bounds for short generating sets, doubling-ball
packing multiplicities, equatorial annulus estimates, a critical separation
pair, and the diameter gate for positive curvature.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .errors import DomainError
from .model_space import model_diameter, modified_distance, trig
from .report import Report


def sphere_measure(n: int) -> float:
    """Total measure of the unit (n-1)-sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _sn_power_integral(n: int, kappa: float, upper: float) -> float:
    if n == 1:
        return upper  # integrand is identically 1
    val, err = quad(lambda t: trig(kappa, t)[0] ** (n - 1), 0.0, upper,
                    epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def model_ball_volume(n: int, kappa: float, r: float) -> float:
    """Volume of the r-ball in the n-dimensional model space of curvature
    kappa; for kappa > 0 the radius is capped at the model diameter."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    if r < 0:
        raise DomainError(f"radius must be >= 0, got {r!r}")
    upper = min(r, model_diameter(kappa))
    return sphere_measure(n) * _sn_power_integral(n, kappa, upper)


def model_ball_volume_closed(n: int, kappa: float, r: float) -> float:
    """Closed-form ball volumes for n <= 3, the cross-check route."""
    if n not in (1, 2, 3):
        raise DomainError(f"closed forms cover n in {{1, 2, 3}}, got {n}")
    if r < 0:
        raise DomainError(f"radius must be >= 0, got {r!r}")
    upper = min(r, model_diameter(kappa))
    if n == 1:
        return 2.0 * upper
    if n == 2:
        return 2.0 * math.pi * modified_distance(kappa, upper)
    if kappa == 0.0:
        return 4.0 * math.pi * upper ** 3 / 3.0
    sn2, _, _ = trig(kappa, 2.0 * upper)
    return 4.0 * math.pi * (upper - sn2 / 2.0) / (2.0 * kappa)


def spherical_cap_volume(n: int, r: float) -> float:
    """Measure of a cap of angular radius r on the unit (n-1)-sphere: a ball
    of radius r in the (n-1)-dimensional model space of curvature 1."""
    if n < 2:
        raise DomainError(f"caps need dimension >= 2, got {n}")
    if not 0.0 <= r <= math.pi:
        raise DomainError(f"cap radius must lie in [0, pi], got {r!r}")
    return model_ball_volume(n - 1, 1.0, r)


def bg_monotonicity_report(samples, n: int, kappa: float,
                           centered: bool = False, tol: float = 1e-9) -> Report:
    """Volume ratio monotonicity for measured balls of growing radius.

    samples are (radius, volume) pairs with increasing radii and
    nondecreasing nonnegative volumes.  Checks vol(r)/model_volume(r) is
    non-increasing; when the balls are declared centered at a point,
    additionally checks vol(r) never exceeds the model volume.
    """
    radii = [float(r) for r, _ in samples]
    vols = [float(v) for _, v in samples]
    if len(radii) < 2:
        raise ValueError("need at least two samples")
    if radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly increasing")
    if vols[0] < 0 or any(b < a for a, b in zip(vols, vols[1:])):
        raise ValueError("volumes must be nonnegative and nondecreasing")
    model = [model_ball_volume(n, kappa, r) for r in radii]
    ratios = [v / mv for v, mv in zip(vols, model)]
    worst = -math.inf
    worst_at = None
    for i in range(len(ratios) - 1):
        rise = ratios[i + 1] - ratios[i]
        if rise > worst:
            worst = rise
            worst_at = (radii[i], radii[i + 1])
    passed = worst <= tol
    details = {"ratios": ratios, "centered": centered}
    if centered:
        excess = max(v - mv for v, mv in zip(vols, model))
        details["worst_excess"] = excess
        passed = passed and excess <= tol * max(1.0, max(model))
    return Report("ball_ratio_monotonicity", passed, tol, worst, worst_at, details)


def annulus_bound(n: int, eps: float) -> tuple[float, float]:
    """Measure of the equatorial band of half-width eps on the unit n-sphere.

    Returns (linear_bound, exact) with exact <= linear_bound = c(n) * eps,
    c(n) = 2 * sphere_measure(n).
    """
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    if not 0.0 < eps < math.pi / 2.0:
        raise DomainError(f"half-width must lie in (0, pi/2), got {eps!r}")
    bound = 2.0 * sphere_measure(n) * eps
    val, _ = quad(lambda t: math.sin(t) ** (n - 1),
                  math.pi / 2.0 - eps, math.pi / 2.0 + eps,
                  epsabs=1e-13, epsrel=1e-13)
    exact = sphere_measure(n) * val
    if exact > bound * (1.0 + 1e-12):
        raise AssertionError(f"band measure {exact!r} exceeds its bound {bound!r}")
    return bound, exact


def packing_multiplicity_bound(n: int) -> float:
    """Hyperbolic volume ratio L(n) = V(n, -1, 3) / V(n, -1, 1/2) bounding
    how many disjoint half-unit balls fit in a tripled ball."""
    return model_ball_volume(n, -1.0, 3.0) / model_ball_volume(n, -1.0, 0.5)


def _cap_angle(D_scaled: float) -> float:
    """Half-angle separation guaranteed between short generators at scale D."""
    if D_scaled == 0.0:
        return math.pi / 3.0
    c = math.cosh(2.0 * D_scaled)
    s = math.sinh(2.0 * D_scaled)
    eps = (c * c - c) / (s * s)
    return math.acos(min(1.0, max(-1.0, eps)))


def short_basis_bound(n: int, kappa: float | None = None,
                      D: float | None = None) -> float:
    """Cap-counting bound on the size of a short generating set.

    Flat/nonnegative form (kappa omitted): directions of short generators
    are pairwise >= pi/3 apart, so their count is at most
    sphere_measure(n) / spherical_cap_volume(n, pi/6); C(2) = 6.  Curved
    form (kappa < 0, displacement scale D > 0): the guaranteed angle decays
    with D * sqrt(-kappa) and the cap shrinks accordingly.
    """
    if n < 2:
        raise DomainError(f"direction caps need dimension >= 2, got {n}")
    if kappa is None:
        return sphere_measure(n) / spherical_cap_volume(n, math.pi / 6.0)
    if kappa >= 0:
        raise DomainError(f"curved form needs kappa < 0, got {kappa!r}")
    if D is None or D <= 0:
        raise DomainError(f"curved form needs a displacement scale D > 0, got {D!r}")
    angle = _cap_angle(D * math.sqrt(-kappa))
    return sphere_measure(n) / spherical_cap_volume(n, angle / 2.0)


def critical_separation(n: int, D: float, V: float) -> tuple[float, float]:
    """Separation pair (eps, delta = eps^3) below which the packing argument
    in a space of diameter <= D and volume >= V cannot be blocked."""
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    if D <= 0 or V <= 0:
        raise DomainError(f"need D > 0 and V > 0, got D={D!r}, V={V!r}")
    omega = model_ball_volume(n, 0.0, 1.0)
    c_n = 2.0 * sphere_measure(n)
    eps = V / (omega + D ** n * c_n) * (1.0 - 1e-9)
    return eps, eps ** 3


def myers_check(kappa: float, diam: float, tol: float = 1e-9) -> Report:
    """Diameter gate: curvature >= kappa > 0 forces diam <= pi/sqrt(kappa)."""
    if diam < 0:
        raise DomainError(f"diameter must be >= 0, got {diam!r}")
    if kappa <= 0:
        return Report("myers_gate", True, tol, None, None,
                      {"bound": None, "kappa": kappa})
    bound = model_diameter(kappa)
    margin = diam - bound
    return Report("myers_gate", margin <= tol, tol, margin, diam,
                  {"bound": bound, "kappa": kappa})


def running_weighted_average(qs, ws) -> np.ndarray:
    """Running averages A_k = sum(q_i w_i, i <= k) / sum(w_i, i <= k).

    If q is non-increasing and w positive, the averages are non-increasing;
    this is the averaging step behind the ball-ratio monotonicity.
    """
    qs = np.asarray(qs, dtype=float)
    ws = np.asarray(ws, dtype=float)
    if qs.shape != ws.shape or qs.ndim != 1 or qs.size == 0:
        raise ValueError("need matching nonempty 1-d arrays")
    if np.any(ws <= 0):
        raise ValueError("weights must be positive")
    num = np.cumsum(qs * ws)
    den = np.cumsum(ws)
    return num / den
