"""Metric constructions over finite spaces: Euclidean cones, products,
diagonal distance, iterated centers of mass, and a sampled probe of the
curvature transfer between a base space and its cone.

The cone over an angular metric uses the planar law with the angle capped
at pi; all radius-zero points are identified with the apex.  Products take
the Pythagorean combination.  The center of mass folds two-point curve
combinations from the end of the point list; in the Euclidean straight
segment family this reduces to the affine combination.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    NegativeRadius,
    NoMidpoint,
    PointsTooFarApart,
    PreconditionFailed,
    WeightsInvalid,
)
from .finite_metric import (
    CertificationReport,
    DistanceMatrix,
    certify_curvature,
    validate_metric,
)
from .gromov_hausdorff import approximate_midpoint
from .report import Report

PROBE_RADII = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class ConePoint:
    """Point (direction, radius) of the cone over a base space; all points
    of radius 0 are the apex, regardless of direction."""

    direction: int
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise NegativeRadius(f"cone radius must be >= 0, got {self.radius!r}")

    @property
    def is_apex(self) -> bool:
        return self.radius == 0.0


def cone_apex() -> ConePoint:
    return ConePoint(0, 0.0)


def cone_distance(sigma: DistanceMatrix, a: ConePoint, b: ConePoint) -> float:
    """Planar cone law with the base angle capped at pi."""
    t, s = a.radius, b.radius
    if t == 0.0 or s == 0.0:
        return abs(t - s)
    alpha = min(math.pi, float(sigma.d[a.direction, b.direction]))
    return math.sqrt(max(0.0, t * t + s * s - 2.0 * t * s * math.cos(alpha)))


def cone_metric(sigma: DistanceMatrix, points: Sequence[ConePoint]) -> DistanceMatrix:
    """Distance matrix of cone points over the base space sigma.

    All radius-0 points are merged into a single apex entry (kept at the
    first such position); the output is validated, so duplicate non-apex
    points are rejected.
    """
    kept: list[ConePoint] = []
    seen_apex = False
    for p in points:
        if p.direction < 0 or p.direction >= sigma.n:
            raise IndexError(f"direction {p.direction} out of range")
        if p.is_apex:
            if seen_apex:
                continue
            seen_apex = True
        kept.append(p)
    n = len(kept)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = cone_distance(sigma, kept[i], kept[j])
    labels = tuple("apex" if p.is_apex
                   else f"{sigma.labels[p.direction]}@{p.radius:g}" for p in kept)
    return validate_metric(labels, d)


def product_metric(m1: DistanceMatrix, m2: DistanceMatrix) -> DistanceMatrix:
    """Pythagorean product over the index product, row-major in (i1, i2)."""
    d1 = m1.d[:, None, :, None]
    d2 = m2.d[None, :, None, :]
    n = m1.n * m2.n
    d = np.sqrt(d1 * d1 + d2 * d2).reshape(n, n)
    labels = tuple(f"({a},{b})" for a in m1.labels for b in m2.labels)
    return validate_metric(labels, d)


def diagonal_distance_check(m: DistanceMatrix, p: int, q: int,
                            tol: float = 1e-9) -> Report:
    """Distance from (p, q) to the diagonal of the squared space.

    Requires an approximate midpoint z of p, q in the sample (defect at
    most tol, else NoMidpoint); asserts

      min over y of sqrt(d(p,y)^2 + d(q,y)^2) = d(p,q) / sqrt(2)

    within tol plus the midpoint defect, with (z, z) as the witness.  The
    minimum is computed directly over base points; the full product matrix
    is never materialized.
    """
    z, defect = approximate_midpoint(m, p, q)
    if defect > tol * max(1.0, float(m.d[p, q])):
        raise NoMidpoint(
            f"best midpoint {z} of ({p}, {q}) has defect {defect:g} > tol")
    diag = np.hypot(m.d[p], m.d[q])
    y = int(np.argmin(diag))
    value = float(diag[y])
    target = float(m.d[p, q]) / math.sqrt(2.0)
    slack = tol * max(1.0, float(m.d[p, q])) + defect * math.sqrt(2.0)
    passed = abs(value - target) <= slack
    return Report("diagonal_distance", passed, slack, value - target, (y, y),
                  {"witness_midpoint": z, "midpoint_defect": defect,
                   "witness_value": float(diag[z]), "target": target})


@dataclass(frozen=True)
class CurveFamily:
    """Short curves joining nearby points: curve(p, q, 0) = p and
    curve(p, q, 1) = q for d(p, q) < delta, with sampled polyline length
    at most length_bound_factor times d(p, q)."""

    curve: Callable[[np.ndarray, np.ndarray, float], np.ndarray]
    dist: Callable[[np.ndarray, np.ndarray], float]
    delta: float
    length_bound_factor: float

    def polyline_length(self, p, q, samples: int = 64) -> float:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        ts = np.linspace(0.0, 1.0, samples + 1)
        pts = [np.asarray(self.curve(p, q, float(t)), dtype=float) for t in ts]
        return float(sum(self.dist(a, b) for a, b in zip(pts, pts[1:])))

    def length_report(self, p, q, samples: int = 64, tol: float = 1e-9) -> Report:
        d = self.dist(np.asarray(p, float), np.asarray(q, float))
        length = self.polyline_length(p, q, samples)
        bound = self.length_bound_factor * d
        return Report("curve_length_bound", length <= bound + tol, tol,
                      length - bound, None, {"length": length, "distance": d})


def euclidean_segments() -> CurveFamily:
    """Straight segments in Euclidean space: global, length factor 1."""
    return CurveFamily(
        curve=lambda p, q, t: p + t * (q - p),
        dist=lambda p, q: float(np.linalg.norm(q - p)),
        delta=math.inf,
        length_bound_factor=1.0,
    )


def center_of_mass(points: Sequence, weights: Sequence[float],
                   curves: CurveFamily) -> np.ndarray:
    """Weighted combination by folding two-point curves from the end.

    The last two points are combined first with renormalized weights, then
    each earlier point is folded in; combining x (weight w) with the
    accumulated point c (weight acc) lands at curve(x, c, acc / (w + acc)),
    so weight 1 on x returns x.  Points whose remaining weight mass is zero
    are ignored.  With straight Euclidean segments the result is the affine
    combination of the inputs.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    w = np.asarray(weights, dtype=float)
    if len(pts) == 0 or w.shape != (len(pts),):
        raise WeightsInvalid("need one weight per point")
    if w.min() < 0:
        raise WeightsInvalid(f"negative weight {float(w.min())!r}")
    if abs(w.sum() - 1.0) > 1e-12:
        raise WeightsInvalid(f"weights sum to {float(w.sum())!r}, not 1")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if curves.dist(pts[i], pts[j]) >= curves.delta:
                raise PointsTooFarApart(
                    f"points {i} and {j} at distance >= family delta")
    c = pts[-1]
    acc = float(w[-1])
    for i in range(len(pts) - 2, -1, -1):
        wi = float(w[i])
        if acc == 0.0:
            if wi > 0.0:
                c = pts[i]
                acc = wi
            continue
        if wi == 0.0:
            continue
        c = np.asarray(curves.curve(pts[i], c, acc / (wi + acc)), dtype=float)
        acc += wi
    return c


def cone_transfer_probe(sigma: DistanceMatrix, tol: float | None = None,
                        radii: Sequence[float] = PROBE_RADII,
                        threads: int = 1) -> Report:
    """Sampled probe of curvature transfer between a base space and its cone.

    Builds cone samples at the given radii over every base direction plus
    the apex, certifies the cone at bound 0 and the base at bound 1, and
    flags the combination (base passes at 1) and (cone fails at 0) as an
    anomaly.  A sampled probe of finitely many points can pass vacuously;
    the flag is a diagnostic, not a certificate.
    """
    diam = sigma.diameter
    if diam > math.pi + 1e-9:
        raise PreconditionFailed(
            f"base diameter {diam:g} exceeds pi; not an angular metric")
    points = [cone_apex()]
    for r in radii:
        points.extend(ConePoint(i, float(r)) for i in range(sigma.n))
    cone = cone_metric(sigma, points)
    cert_cone: CertificationReport = certify_curvature(0.0, cone, tol, threads)
    cert_sigma: CertificationReport = certify_curvature(1.0, sigma, tol, threads)
    anomaly = cert_sigma.passed and not cert_cone.passed
    worst = cert_cone.max_defect
    return Report(
        "cone_transfer_probe", not anomaly,
        cert_cone.tolerance, worst, None,
        {
            "anomaly": anomaly,
            "cone_passed": cert_cone.passed,
            "sigma_passed": cert_sigma.passed,
            "cone_report": cert_cone.to_dict(),
            "sigma_report": cert_sigma.to_dict(),
            "cone_size": cone.n,
        })
