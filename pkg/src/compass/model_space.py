"""Trigonometry of the constant-curvature model planes.

Provides the generalized sine/cosine/cotangent family, the modified distance
function, cosine laws in both directions (side triple -> angle, hinge ->
side), triangle validation against the model diameter, and the bent-triangle
straightening inequality used by gluing arguments.

Curvature conventions: kappa > 0 is the round sphere of radius 1/sqrt(kappa),
kappa = 0 the Euclidean plane, kappa < 0 the hyperbolic plane of curvature
kappa.  All formulas are smooth in kappa; a series guard keeps them accurate
through kappa -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateSide, DomainError, InvalidTriangle, PreconditionFailed

# Below this value of |kappa|*t^2 the closed forms lose digits to
# cancellation, so degree-guarded Taylor series are used instead.
SERIES_GUARD = 1e-8

# Verdicts of validate_triangle.
VALID = "valid"
VALID_DEGENERATE_BOUNDARY = "valid_degenerate_boundary"
INVALID = "invalid"

# Clamp slack for cosines that land just outside [-1, 1] through rounding.
_COS_CLAMP = 1e-9


def model_diameter(kappa: float) -> float:
    """Diameter of the model plane: pi/sqrt(kappa) if kappa > 0, else inf."""
    if kappa > 0:
        return math.pi / math.sqrt(kappa)
    return math.inf


def trig(kappa: float, t: float) -> tuple[float, float, float]:
    """Return (sn, cs, ct) at t.

    sn solves y'' + kappa*y = 0 with y(0) = 0, y'(0) = 1; cs solves the same
    equation with y(0) = 1, y'(0) = 0; ct = cs/sn with signed infinity at the
    zeros of sn.  Negative t is permitted.
    """
    kt2 = abs(kappa) * t * t
    if kt2 < SERIES_GUARD:
        # |remainder| < kt2^3/5040 < 3e-28, below double rounding
        t2 = t * t
        sn = t * (1.0 - kappa * t2 / 6.0 * (1.0 - kappa * t2 / 20.0))
        cs = 1.0 - kappa * t2 / 2.0 * (1.0 - kappa * t2 / 12.0)
    elif kappa > 0:
        r = math.sqrt(kappa)
        sn = math.sin(r * t) / r
        cs = math.cos(r * t)
    else:
        r = math.sqrt(-kappa)
        sn = math.sinh(r * t) / r
        cs = math.cosh(r * t)
    if sn == 0.0:
        ct = math.copysign(math.inf, cs)
    else:
        ct = cs / sn
    return sn, cs, ct


def modified_distance(kappa: float, t: float) -> float:
    """Antiderivative of sn with md(0) = 0, capped at 2/kappa past the
    diameter when kappa > 0.  Solves z'' + kappa*z = 1 on [0, diameter]."""
    if t < 0:
        raise DomainError(f"modified_distance needs t >= 0, got {t}")
    if kappa > 0 and t > model_diameter(kappa):
        return 2.0 / kappa
    kt2 = abs(kappa) * t * t
    if kt2 < SERIES_GUARD:
        t2 = t * t
        return t2 / 2.0 * (1.0 - kappa * t2 / 12.0 * (1.0 - kappa * t2 / 30.0))
    _, cs, _ = trig(kappa, t)
    return (1.0 - cs) / kappa


def validate_triangle(kappa: float, a: float, b: float, c: float,
                      tol: float | None = None) -> str:
    """Classify a side triple.

    "valid": the (non-strict) triangle inequalities hold and, for kappa > 0,
    the perimeter stays below twice the model diameter.  The boundary verdict
    flags perimeter == 2*diameter within tol, where the comparison triangle
    exists but is not unique.  Anything else is "invalid".
    """
    if min(a, b, c) < 0:
        return INVALID
    perimeter = a + b + c
    if tol is None:
        tol = 1e-12 * max(1.0, perimeter)
    if a > b + c + tol or b > a + c + tol or c > a + b + tol:
        return INVALID
    if kappa > 0:
        bound = 2.0 * model_diameter(kappa)
        if perimeter > bound + tol:
            return INVALID
        if perimeter >= bound - tol:
            return VALID_DEGENERATE_BOUNDARY
    return VALID


def _clamped_acos(x: float, context: str) -> float:
    if x > 1.0:
        if x > 1.0 + _COS_CLAMP:
            raise InvalidTriangle(f"{context}: cosine {x!r} exceeds 1")
        x = 1.0
    elif x < -1.0:
        if x < -1.0 - _COS_CLAMP:
            raise InvalidTriangle(f"{context}: cosine {x!r} below -1")
        x = -1.0
    return math.acos(x)


def model_angle(kappa: float, a: float, b: float, c: float,
                tolerance: float = 0.0) -> float:
    """Angle opposite side a in the model triangle with sides (a, b, c).

    The triple must validate as "valid" (at the non-unique perimeter
    boundary the angle is not well defined).  b and c must exceed tolerance.
    Cosines within 1e-9 of [-1, 1] are clamped; anything further out raises.
    """
    verdict = validate_triangle(kappa, a, b, c)
    if verdict != VALID:
        raise InvalidTriangle(
            f"sides ({a!r}, {b!r}, {c!r}) at kappa={kappa!r}: verdict {verdict}")
    if b <= tolerance or c <= tolerance:
        raise DegenerateSide(f"hinge sides ({b!r}, {c!r}) at or below {tolerance!r}")
    if kappa == 0.0 or abs(kappa) * (a + b + c) ** 2 < SERIES_GUARD:
        # flat formula; for tiny |kappa| the curved one cancels catastrophically
        cos_phi = (b * b + c * c - a * a) / (2.0 * b * c)
    else:
        sn_b, cs_b, _ = trig(kappa, b)
        sn_c, cs_c, _ = trig(kappa, c)
        _, cs_a, _ = trig(kappa, a)
        cos_phi = (cs_a - cs_b * cs_c) / (kappa * sn_b * sn_c)
    return _clamped_acos(cos_phi, f"model_angle(kappa={kappa!r})")


@dataclass(frozen=True)
class Hinge:
    """Two sides issuing from a vertex with the angle between them."""

    angle: float
    side_b: float
    side_c: float


def model_side(kappa: float, angle: float, side_b: float, side_c: float) -> float:
    """Side opposite the given hinge angle (inverse of model_angle).

    Requires 0 <= angle <= pi, positive sides and, for kappa > 0, sides
    strictly below the model diameter.  The result lies between |b - c| and
    min(b + c, 2*diameter - b - c).
    """
    if not 0.0 <= angle <= math.pi:
        raise DomainError(f"hinge angle {angle!r} outside [0, pi]")
    if side_b <= 0 or side_c <= 0:
        raise DomainError(f"hinge sides must be positive, got ({side_b!r}, {side_c!r})")
    if kappa > 0:
        diam = model_diameter(kappa)
        if side_b >= diam or side_c >= diam:
            raise DomainError(
                f"hinge sides ({side_b!r}, {side_c!r}) reach the model diameter {diam!r}")
    cos_phi = math.cos(angle)
    if kappa == 0.0 or abs(kappa) * (2.0 * (side_b + side_c)) ** 2 < SERIES_GUARD:
        val = side_b * side_b + side_c * side_c - 2.0 * side_b * side_c * cos_phi
        return math.sqrt(max(0.0, val))
    if kappa > 0:
        r = math.sqrt(kappa)
        cos_a = (math.cos(r * side_b) * math.cos(r * side_c)
                 + math.sin(r * side_b) * math.sin(r * side_c) * cos_phi)
        return _clamped_acos(cos_a, "model_side") / r
    r = math.sqrt(-kappa)
    cosh_a = (math.cosh(r * side_b) * math.cosh(r * side_c)
              - math.sinh(r * side_b) * math.sinh(r * side_c) * cos_phi)
    return math.acosh(max(1.0, cosh_a)) / r


def solve_hinge(kappa: float, hinge: Hinge) -> float:
    """model_side applied to a Hinge record."""
    return model_side(kappa, hinge.angle, hinge.side_b, hinge.side_c)


def alexandrov_gluing(kappa: float, x: float, y: float, z: float, d: float,
                      tol: float = 1e-9) -> tuple[float, float]:
    """Straightening inequality for two model triangles glued along a side.

    Configuration: triangles [X M P] with |XM| = x, |XP| = y, |PM| = z and
    [P M Y] with |MY| = y, |PY| = d share the side [P M].  The bend angles at
    M (alpha opposite y in the first triangle, beta opposite d in the second)
    must satisfy alpha + beta <= pi.  Returns (gamma1, gamma2) where

      gamma1 = angle at X of [X M P] between the x- and y-sides (opposite z),
      gamma2 = angle opposite d in the straightened triangle with sides
               (x + y, y, d), at the same vertex once the bend is opened.

    The comparison guarantee is gamma2 <= gamma1, with equality when the
    bend is flat (alpha + beta = pi).
    """
    for name, sides in (("first", (y, x, z)), ("second", (d, z, y))):
        verdict = validate_triangle(kappa, *sides)
        if verdict != VALID:
            raise PreconditionFailed(
                f"{name} triangle with sides {sides!r} has verdict {verdict} at kappa={kappa!r}")
    if kappa > 0 and x + y + z + d >= 2.0 * model_diameter(kappa):
        raise PreconditionFailed(
            "total perimeter x+y+z+d must stay below twice the model diameter")
    alpha = model_angle(kappa, y, x, z)
    beta = model_angle(kappa, d, z, y)
    if alpha + beta > math.pi + tol:
        raise PreconditionFailed(
            f"bend angles sum to {alpha + beta!r} > pi; the configuration is not convex")
    gamma1 = model_angle(kappa, z, x, y)
    straight = validate_triangle(kappa, d, x + y, y)
    if straight != VALID:
        raise PreconditionFailed(
            f"straightened sides ({x + y!r}, {y!r}, {d!r}) bound no unique model triangle"
            f" (verdict {straight})")
    gamma2 = model_angle(kappa, d, x + y, y)
    return gamma1, gamma2
