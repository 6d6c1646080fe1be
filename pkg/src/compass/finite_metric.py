"""Finite metric spaces and comparison-angle curvature certification.

A finite metric space is a validated symmetric distance matrix.  The
four-point condition bounds, for every apex p and every unordered triple
{x, y, z} of other points, the sum of the three comparison angles at p by
2*pi; spaces of curvature >= kappa satisfy it for the model plane of
curvature kappa.  certify_curvature enumerates every (apex, triple) pair
once, evaluates the defect (angle sum minus 2*pi), and reports violations,
with a diameter gate short-circuiting impossible positive-curvature claims.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    ComparisonUndefined,
    DegenerateTriple,
    Disconnected,
    DuplicatePoint,
    NegativeEntry,
    NonpositiveWeight,
    NonzeroDiagonal,
    NotAGeodesicChain,
    NotOnGeodesic,
    NotSymmetric,
    TriangleViolation,
)
from .model_space import (
    SERIES_GUARD,
    VALID,
    model_angle,
    model_diameter,
    model_side,
    validate_triangle,
)
from .report import Report


@dataclass(frozen=True)
class DistanceMatrix:
    """Validated finite metric space; construct via validate_metric."""

    labels: tuple[str, ...]
    d: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.d.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def diameter(self) -> float:
        return float(self.d.max()) if self.n else 0.0

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "distances": self.d.tolist()}


def validate_metric(labels: Sequence[str], matrix, tol: float | None = None) -> DistanceMatrix:
    """Check all metric axioms and freeze the matrix.

    Raises NotSymmetric / NegativeEntry / NonzeroDiagonal / DuplicatePoint /
    TriangleViolation with the offending indices.  tol defaults to 1e-12
    times the largest entry.
    """
    d = np.array(matrix, dtype=float)
    labels = tuple(str(x) for x in labels)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if len(labels) != n:
        raise ValueError(f"{len(labels)} labels for a {n}x{n} matrix")
    if len(set(labels)) != n:
        raise ValueError("labels must be unique")
    if n and not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise ValueError(f"non-finite entry d[{i}][{j}] = {float(d[i, j])!r}")
    scale = float(d.max()) if n else 0.0
    if tol is None:
        tol = 1e-12 * max(1.0, scale)
    for i in range(n):
        if d[i, i] != 0.0:
            raise NonzeroDiagonal(i)
    bad = np.argwhere(np.abs(d - d.T) > tol)
    if bad.size:
        i, j = map(int, bad[0])
        raise NotSymmetric(i, j)
    bad = np.argwhere(d < 0)
    if bad.size:
        i, j = map(int, bad[0])
        raise NegativeEntry(i, j)
    off = d + np.diag(np.full(n, np.inf)) if n else d
    bad = np.argwhere(off == 0.0)
    if bad.size:
        i, j = map(int, bad[0])
        raise DuplicatePoint(i, j)
    for j in range(n):
        excess = d - (d[:, j:j + 1] + d[j:j + 1, :])
        worst = np.unravel_index(np.argmax(excess), excess.shape) if n else None
        if worst and excess[worst] > tol:
            i, k = map(int, worst)
            raise TriangleViolation(i, j, k, float(excess[worst]))
    return DistanceMatrix(labels, d)


def from_graph(vertices: Sequence[str], weighted_edges) -> DistanceMatrix:
    """Shortest-path metric of a connected, positively weighted graph.

    Edges are (u, v, w) triples over the vertex labels; parallel edges keep
    the lightest weight.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra

    labels = tuple(str(v) for v in vertices)
    if len(set(labels)) != len(labels):
        raise ValueError("vertex labels must be unique")
    index = {v: i for i, v in enumerate(labels)}
    n = len(labels)
    lightest: dict[tuple[int, int], float] = {}
    for u, v, w in weighted_edges:
        w = float(w)
        if w <= 0:
            raise NonpositiveWeight(f"edge ({u!r}, {v!r}) has weight {w!r}")
        try:
            i, j = index[str(u)], index[str(v)]
        except KeyError as exc:
            raise ValueError(f"edge endpoint {exc} is not a vertex") from None
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        lightest[key] = min(w, lightest.get(key, math.inf))
    rows = [k[0] for k in lightest]
    cols = [k[1] for k in lightest]
    data = [lightest[k] for k in lightest]
    adj = csr_matrix((data, (rows, cols)), shape=(n, n))
    dist = dijkstra(adj, directed=False)
    if np.any(np.isinf(dist)):
        i, j = map(int, np.argwhere(np.isinf(dist))[0])
        raise Disconnected(f"no path between {labels[i]!r} and {labels[j]!r}")
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    return validate_metric(labels, dist)


class Quadruple(NamedTuple):
    """Apex p with an unordered triple of other points."""

    p: int
    a: int
    b: int
    c: int


def _default_tol(m: DistanceMatrix, base: float = 1e-9) -> float:
    return base * max(1.0, m.diameter)


def comparison_angle(kappa: float, m: DistanceMatrix, p: int, x: int, y: int,
                     tol: float | None = None) -> float:
    """Angle at the p-vertex of the model triangle with the side lengths of
    (p, x, y).  Raises DegenerateTriple on repeated indices and
    ComparisonUndefined when no (unique) comparison triangle exists."""
    if len({p, x, y}) != 3:
        raise DegenerateTriple(f"indices (p={p}, x={x}, y={y}) repeat")
    if tol is None:
        tol = _default_tol(m)
    a = float(m.d[x, y])
    b = float(m.d[p, x])
    c = float(m.d[p, y])
    if b <= tol * 1e-3 or c <= tol * 1e-3:
        raise DegenerateTriple(f"apex sides ({b!r}, {c!r}) vanish for (p={p}, x={x}, y={y})")
    verdict = validate_triangle(kappa, a, b, c)
    if verdict != VALID:
        raise ComparisonUndefined(
            f"triple (p={p}, x={x}, y={y}) with sides ({a!r}, {b!r}, {c!r}) "
            f"has verdict {verdict} at kappa={kappa!r}")
    return model_angle(kappa, a, b, c)


def four_point_defect(kappa: float, m: DistanceMatrix, quad) -> float:
    """Sum of the three comparison angles at quad.p minus 2*pi."""
    q = Quadruple(*quad)
    total = (comparison_angle(kappa, m, q.p, q.a, q.b)
             + comparison_angle(kappa, m, q.p, q.b, q.c)
             + comparison_angle(kappa, m, q.p, q.c, q.a))
    return total - 2.0 * math.pi


def _angle_table(kappa: float, m: DistanceMatrix, p: int, others: np.ndarray,
                 tol: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized comparison angles at apex p for all pairs from others.

    Returns (angles, defined, degenerate): angles[i, j] is the comparison
    angle for (p; others[i], others[j]), defined marks pairs with a valid,
    unique comparison triangle, degenerate marks vanishing apex sides.
    Mirrors model_angle including its small-kappa and clamping behavior.
    """
    b = m.d[p, others]
    a = m.d[np.ix_(others, others)]
    bb = b[:, None]
    cc = b[None, :]
    degenerate = (bb <= tol * 1e-3) | (cc <= tol * 1e-3)
    perim = a + bb + cc
    eps = 1e-12 * np.maximum(1.0, perim)
    ok = ((a <= bb + cc + eps) & (bb <= a + cc + eps) & (cc <= a + bb + eps))
    if kappa > 0:
        bound = 2.0 * model_diameter(kappa)
        ok &= perim < bound - eps
    with np.errstate(invalid="ignore", divide="ignore"):
        if kappa == 0.0:
            cos_phi = (bb * bb + cc * cc - a * a) / (2.0 * bb * cc)
        else:
            flat = np.abs(kappa) * perim ** 2 < SERIES_GUARD
            if kappa > 0:
                r = math.sqrt(kappa)
                num = np.cos(r * a) - np.cos(r * bb) * np.cos(r * cc)
                den = kappa * (np.sin(r * bb) / r) * (np.sin(r * cc) / r)
            else:
                r = math.sqrt(-kappa)
                num = np.cosh(r * a) - np.cosh(r * bb) * np.cosh(r * cc)
                den = kappa * (np.sinh(r * bb) / r) * (np.sinh(r * cc) / r)
            cos_phi = num / den
            if flat.any():
                cos_flat = (bb * bb + cc * cc - a * a) / (2.0 * bb * cc)
                cos_phi = np.where(flat, cos_flat, cos_phi)
        ok &= np.abs(cos_phi) <= 1.0 + 1e-9
        angles = np.arccos(np.clip(cos_phi, -1.0, 1.0))
    ok &= ~degenerate
    np.fill_diagonal(ok, False)
    np.fill_diagonal(degenerate, False)
    return angles, ok, degenerate


@dataclass
class MyersGate:
    """Diameter pre-check for positive lower curvature bounds."""

    passed: bool
    diameter: float
    bound: float

    def to_dict(self) -> dict:
        return {"passed": self.passed, "diameter": self.diameter, "bound": self.bound}


@dataclass
class PerimeterGate:
    """Triangle-perimeter pre-check for positive lower curvature bounds:
    every triple must have perimeter <= twice the model diameter."""

    passed: bool
    worst_perimeter: float
    bound: float
    witness: tuple[int, int, int] | None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "worst_perimeter": self.worst_perimeter,
                "bound": self.bound,
                "witness": list(self.witness) if self.witness else None}


@dataclass
class CertificationReport:
    kappa: float
    tolerance: float
    checked: int
    violations: list[tuple[Quadruple, float]]
    skipped: list[tuple[Quadruple, str]]
    max_defect: float | None
    myers_gate: MyersGate | None
    perimeter_gate: PerimeterGate | None = None

    @property
    def passed(self) -> bool:
        return (not self.violations
                and (self.myers_gate is None or self.myers_gate.passed)
                and (self.perimeter_gate is None or self.perimeter_gate.passed))

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "checked": self.checked,
            "n_violations": len(self.violations),
            "violations": [{"quadruple": list(q), "defect": v} for q, v in self.violations],
            "skipped": [{"quadruple": list(q), "reason": r} for q, r in self.skipped],
            "max_defect": self.max_defect,
            "myers_gate": self.myers_gate.to_dict() if self.myers_gate else None,
            "perimeter_gate": (self.perimeter_gate.to_dict()
                               if self.perimeter_gate else None),
        }


def _perimeter_gate(kappa: float, m: DistanceMatrix, tolerance: float) -> PerimeterGate:
    bound = 2.0 * model_diameter(kappa)
    worst = -math.inf
    witness = None
    d = m.d
    for i, j, k in combinations(range(m.n), 3):
        per = d[i, j] + d[j, k] + d[i, k]
        if per > worst:
            worst, witness = float(per), (i, j, k)
    if witness is None:
        return PerimeterGate(True, 0.0, bound, None)
    return PerimeterGate(worst <= bound + tolerance, worst, bound, witness)


def _certify_apex(kappa: float, m: DistanceMatrix, p: int, tolerance: float):
    """Defects for every unordered triple at apex p, in enumeration order."""
    others = np.array([i for i in range(m.n) if i != p])
    violations: list[tuple[Quadruple, float]] = []
    skipped: list[tuple[Quadruple, str]] = []
    max_defect = None
    if len(others) < 3:
        return 0, violations, skipped, max_defect
    angles, ok, degenerate = _angle_table(kappa, m, p, others, tolerance)
    triples = np.array(list(combinations(range(len(others)), 3)))
    i, j, k = triples[:, 0], triples[:, 1], triples[:, 2]
    defined = ok[i, j] & ok[j, k] & ok[k, i]
    any_degenerate = degenerate[i, j] | degenerate[j, k] | degenerate[k, i]
    defects = angles[i, j] + angles[j, k] + angles[k, i] - 2.0 * math.pi
    for row in np.nonzero(~defined)[0]:
        quad = Quadruple(p, *(int(others[t]) for t in triples[row]))
        reason = "degenerate triple" if any_degenerate[row] else "comparison triangle undefined"
        skipped.append((quad, reason))
    good = np.nonzero(defined)[0]
    if good.size:
        max_defect = float(defects[good].max())
        for row in good[defects[good] > tolerance]:
            quad = Quadruple(p, *(int(others[t]) for t in triples[row]))
            violations.append((quad, float(defects[row])))
    return len(triples), violations, skipped, max_defect


def certify_curvature(kappa: float, m: DistanceMatrix,
                      tolerance: float | None = None,
                      threads: int = 1) -> CertificationReport:
    """Exhaustive four-point check of curvature >= kappa.

    Enumerates each (apex, unordered triple) pair exactly once, so checked
    equals n * C(n-1, 3).  For kappa > 0 two gates run: a diameter gate
    (diameter must not exceed pi/sqrt(kappa) plus tolerance; failure
    short-circuits with checked = 0 and no enumeration) and a triangle
    perimeter gate (every triple's perimeter must stay within twice the
    model diameter; failure is recorded and fails the report, but
    enumeration still runs to collect any quadruple evidence).  Quadruples
    without a valid comparison triangle are recorded as skipped, not
    failed.  Results are independent of the thread count.
    """
    if tolerance is None:
        tolerance = _default_tol(m)
    gate = None
    per_gate = None
    if kappa > 0:
        bound = model_diameter(kappa)
        diam = m.diameter
        gate = MyersGate(diam <= bound + tolerance, diam, bound)
        if not gate.passed:
            return CertificationReport(kappa, tolerance, 0, [], [], None, gate)
        per_gate = _perimeter_gate(kappa, m, tolerance)
    apexes = range(m.n)
    if threads > 1 and m.n > 3:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(
                lambda p: _certify_apex(kappa, m, p, tolerance), apexes))
    else:
        partials = [_certify_apex(kappa, m, p, tolerance) for p in apexes]
    checked = 0
    violations: list[tuple[Quadruple, float]] = []
    skipped: list[tuple[Quadruple, str]] = []
    max_defect = None
    for cnt, vio, skp, mx in partials:
        checked += cnt
        violations.extend(vio)
        skipped.extend(skp)
        if mx is not None:
            max_defect = mx if max_defect is None else max(max_defect, mx)
    violations.sort(key=lambda item: -item[1])
    return CertificationReport(kappa, tolerance, checked, violations, skipped,
                               max_defect, gate, per_gate)


@dataclass
class ScanResult:
    """certify_curvature over a curvature grid."""

    rows: list[CertificationReport]
    largest_passing: float | None

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "kappa": r.kappa,
                    "passed": r.passed,
                    "n_violations": len(r.violations),
                    "checked": r.checked,
                    "max_defect": r.max_defect,
                    "myers_gate": r.myers_gate.to_dict() if r.myers_gate else None,
                    "perimeter_gate": (r.perimeter_gate.to_dict()
                                       if r.perimeter_gate else None),
                }
                for r in self.rows
            ],
            "largest_passing": self.largest_passing,
        }


def curvature_scan(m: DistanceMatrix, kappa_grid: Sequence[float],
                   tolerance: float | None = None, threads: int = 1) -> ScanResult:
    """Certify against each kappa in the grid and report the largest pass."""
    rows = [certify_curvature(k, m, tolerance, threads) for k in kappa_grid]
    passing = [r.kappa for r in rows if r.passed]
    return ScanResult(rows, max(passing) if passing else None)


def point_on_side_defect(kappa: float, m: DistanceMatrix, p: int, x: int,
                         y: int, z: int, tol: float | None = None) -> float:
    """Gap between the comparison position of z and its true distance to p.

    z must lie on a geodesic between x and y (within tol).  Builds the model
    triangle for (p, x, y), places z~ on the x~y~ side at arc d(x, z), and
    returns d~(p~, z~) - d(p, z); nonpositive values are consistent with
    curvature >= kappa.
    """
    if tol is None:
        tol = _default_tol(m)
    dxz, dzy, dxy = float(m.d[x, z]), float(m.d[z, y]), float(m.d[x, y])
    if abs(dxz + dzy - dxy) > tol:
        raise NotOnGeodesic(
            f"d({x},{z}) + d({z},{y}) - d({x},{y}) = {dxz + dzy - dxy!r} exceeds {tol!r}")
    a, b, c = dxy, float(m.d[p, x]), float(m.d[p, y])
    if validate_triangle(kappa, a, b, c) != VALID:
        raise ComparisonUndefined(
            f"triple (p={p}, x={x}, y={y}) has no unique comparison triangle "
            f"at kappa={kappa!r}")
    angle_x = model_angle(kappa, c, a, b)
    if dxz <= 0:
        d_model = b
    else:
        d_model = model_side(kappa, angle_x, dxz, b)
    return d_model - float(m.d[p, z])


def voronoi_assign(m: DistanceMatrix, sites: Sequence[int]):
    """Nearest-site assignment with lowest-index tie-breaking.

    Returns (assignment, ties): assignment[i] is the owning site for point
    i, ties lists (point, tied_sites) where several sites realize the exact
    minimum.
    """
    sites = list(sites)
    if not sites:
        raise ValueError("need at least one site")
    if len(set(sites)) != len(sites):
        raise ValueError("sites must be distinct")
    for s in sites:
        if not 0 <= s < m.n:
            raise ValueError(f"site index {s} out of range")
    order = sorted(sites)
    assignment = []
    ties = []
    for i in range(m.n):
        dists = [float(m.d[i, s]) for s in order]
        best = min(dists)
        winners = [s for s, dd in zip(order, dists) if dd == best]
        assignment.append(winners[0])
        if len(winners) > 1:
            ties.append((i, winners))
    return assignment, ties


def star_shaped_check(m: DistanceMatrix, sites: Sequence[int], site: int,
                      chain: Sequence[int], tol: float | None = None) -> Report:
    """Every point of a geodesic chain into a site stays in its cell.

    chain runs from a start point to site (inclusive); consecutive gaps must
    sum to d(chain[0], site) and the distances to the site must strictly
    decrease, else NotAGeodesicChain.  The report checks closed-cell
    ownership of every chain point against all competing sites.
    """
    if tol is None:
        tol = _default_tol(m)
    if site not in sites:
        raise ValueError(f"site {site} is not among the sites")
    chain = list(chain)
    if not chain:
        raise NotAGeodesicChain("empty chain")
    if chain[-1] != site:
        raise NotAGeodesicChain(f"chain must end at the site {site}, ends at {chain[-1]}")
    to_site = [float(m.d[c, site]) for c in chain]
    for k in range(len(chain) - 1):
        if to_site[k + 1] >= to_site[k]:
            raise NotAGeodesicChain(
                f"distance to site does not strictly decrease at position {k}")
    gaps = sum(float(m.d[chain[k], chain[k + 1]]) for k in range(len(chain) - 1))
    if abs(gaps - to_site[0]) > tol:
        raise NotAGeodesicChain(
            f"gap sum {gaps!r} differs from d(start, site) = {to_site[0]!r}")
    worst = -math.inf
    worst_at = None
    for c in chain:
        for s in sorted(sites):
            if s == site:
                continue
            margin = float(m.d[c, site] - m.d[c, s])
            if margin > worst:
                worst = margin
                worst_at = (c, s)
    if worst_at is None:  # single site: ownership is trivial
        return Report("star_shaped", True, tol, None, None, {"site": site})
    return Report("star_shaped", worst <= tol, tol, worst, worst_at,
                  {"site": site, "chain": chain})
