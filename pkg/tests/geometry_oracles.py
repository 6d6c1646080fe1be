"""Independent reference routines for the test suite.

Nothing here calls into the numerical internals it is used to check: the
sphere and hyperboloid samplers compute distances from ambient coordinates,
the GH oracle enumerates map pairs directly, and the hinge inversion is a
plain bisection against the forward angle law.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from compass import (
    VALID,
    DistanceMatrix,
    model_angle,
    model_diameter,
    validate_metric,
    validate_triangle,
)


def _labels(k: int) -> list[str]:
    return [f"p{i}" for i in range(k)]


def planar_points(rng, k: int, box: float = 2.0) -> np.ndarray:
    return rng.uniform(-box, box, size=(k, 2))


def metric_from_coords(points) -> DistanceMatrix:
    pts = np.asarray(points, dtype=float)
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    return validate_metric(_labels(len(pts)), d)


def sphere_points(rng, k: int, min_gap: float = 0.15) -> np.ndarray:
    """Unit vectors in R^3 with a chordal separation floor (no duplicates)."""
    pts: list[np.ndarray] = []
    while len(pts) < k:
        v = rng.normal(size=3)
        v = v / np.linalg.norm(v)
        if all(np.linalg.norm(v - u) > min_gap for u in pts):
            pts.append(v)
    return np.array(pts)


def sphere_metric(points) -> DistanceMatrix:
    """Great-circle distances arccos<u, v> on the unit sphere (kappa = 1)."""
    pts = np.asarray(points, dtype=float)
    gram = np.clip(pts @ pts.T, -1.0, 1.0)
    d = np.arccos(gram)
    np.fill_diagonal(d, 0.0)
    return validate_metric(_labels(len(pts)), d)


def hyperbolic_points(rng, k: int, spread: float = 0.8,
                      min_gap: float = 0.1) -> np.ndarray:
    """Points on the hyperboloid x0^2 - x1^2 - x2^2 = 1, x0 > 0."""
    pts: list[np.ndarray] = []
    while len(pts) < k:
        xy = rng.normal(scale=spread, size=2)
        v = np.array([math.sqrt(1.0 + float(xy @ xy)), xy[0], xy[1]])
        if all(np.linalg.norm(v - u) > min_gap for u in pts):
            pts.append(v)
    return np.array(pts)


def hyperbolic_metric(points) -> DistanceMatrix:
    """arccosh of the Lorentz pairing x0*y0 - x1*y1 - x2*y2 (kappa = -1)."""
    pts = np.asarray(points, dtype=float)
    lor = np.outer(pts[:, 0], pts[:, 0]) - pts[:, 1:] @ pts[:, 1:].T
    d = np.arccosh(np.clip(lor, 1.0, None))
    np.fill_diagonal(d, 0.0)
    return validate_metric(_labels(len(pts)), d)


def tripod_matrix() -> DistanceMatrix:
    """Center plus three unit-leg tips; tip-to-tip distance 2."""
    d = np.array([
        [0.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, 2.0, 2.0],
        [1.0, 2.0, 0.0, 2.0],
        [1.0, 2.0, 2.0, 0.0],
    ])
    return validate_metric(["c", "a", "b", "x"], d)


def random_metric(rng, n: int, low: float = 1.0, high: float = 2.0) -> DistanceMatrix:
    """Entries confined to [low, 2*low] satisfy the triangle inequality."""
    assert high <= 2.0 * low
    d = rng.uniform(low, high, size=(n, n))
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return validate_metric(_labels(n), d)


# --- brute-force Gromov-Hausdorff ------------------------------------------

def brute_force_gh(X: DistanceMatrix, Y: DistanceMatrix) -> float:
    """Half the minimum correspondence distortion by (f, g) enumeration.

    Every correspondence contains the union of a map graph f: X -> Y and
    g: Y -> X, and passing to a sub-correspondence never raises distortion,
    so the minimum over such unions is the true optimum.  Cost grows as
    |Y|^|X| * |X|^|Y|; keep the inputs at four points or fewer.
    """
    dX, dY = X.d, Y.d
    nx, ny = X.n, Y.n
    fs = np.array(list(itertools.product(range(ny), repeat=nx)))
    gs = np.array(list(itertools.product(range(nx), repeat=ny)))
    # distortion of graph(f) alone, per f; same for g
    a = np.abs(dY[fs[:, :, None], fs[:, None, :]] - dX[None, :, :]).max(axis=(1, 2))
    b = np.abs(dX[gs[:, :, None], gs[:, None, :]] - dY[None, :, :]).max(axis=(1, 2))
    # cross terms |dX(i, g(j)) - dY(f(i), j)| for all (f, g) pairs at once
    ax = dX[:, gs.T].transpose(2, 0, 1)  # (n_g, nx, ny): dX[i, g(j)]
    by = dY[fs.T, :].transpose(1, 0, 2)  # (n_f, nx, ny): dY[f(i), j]
    c = np.abs(by[:, None, :, :] - ax[None, :, :, :]).max(axis=(2, 3))
    total = np.maximum(np.maximum(a[:, None], b[None, :]), c)
    return float(total.min()) / 2.0


def canonical_key(d: np.ndarray) -> tuple:
    """Smallest upper triangle over relabelings; an isometry-class key."""
    n = len(d)
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(d[perm[i]][perm[j]] for i in range(n) for j in range(i + 1, n))
        if best is None or key < best:
            best = key
    return best


def small_spaces_with_entries(values=(1, 2, 3), sizes=(3, 4)):
    """All metric spaces of the given sizes with off-diagonal entries drawn
    from values, one representative per isometry class."""
    reps = []
    seen = set()
    for n in sizes:
        pairs = list(itertools.combinations(range(n), 2))
        for combo in itertools.product(values, repeat=len(pairs)):
            d = np.zeros((n, n))
            for (i, j), v in zip(pairs, combo):
                d[i, j] = d[j, i] = float(v)
            ok = all(d[i, k] <= d[i, j] + d[j, k] + 1e-12
                     for i, j, k in itertools.permutations(range(n), 3))
            if not ok:
                continue
            key = (n, canonical_key(d))
            if key in seen:
                continue
            seen.add(key)
            reps.append(validate_metric(_labels(n), d))
    return reps


# --- hinge inversion oracle --------------------------------------------------

def model_side_bisect(kappa: float, phi: float, b: float, c: float,
                      iters: int = 200) -> float:
    """Solve model_angle(kappa, a, b, c) = phi for a by bisection.

    Relies only on the forward law and its monotonicity in a; used as the
    independent route against the closed-form inversion.
    """
    lo = abs(b - c)
    hi = b + c
    if kappa > 0:
        hi = min(hi, 2.0 * model_diameter(kappa) - b - c)
    # nudge the bracket strictly inside the valid range
    span = hi - lo
    lo_in = lo + 1e-12 * max(1.0, span)
    hi_in = hi - 1e-12 * max(1.0, span)
    if validate_triangle(kappa, lo_in, b, c) != VALID or \
            validate_triangle(kappa, hi_in, b, c) != VALID:
        raise ValueError("bracket leaves the valid triangle range")
    for _ in range(iters):
        mid = 0.5 * (lo_in + hi_in)
        if model_angle(kappa, mid, b, c) < phi:
            lo_in = mid
        else:
            hi_in = mid
    return 0.5 * (lo_in + hi_in)


# --- planted gluing configurations -------------------------------------------

def planted_gluing(rng, scale: float = 1.0) -> tuple[float, float, float, float]:
    """(x, y, z, d) realizable by a convex flat gluing.

    Plant X = (0,0), M = (x,0), P off the axis, so x = |XM|, y = |XP|,
    z = |PM|.  The flat-opened partner point is Y' = (x + y, 0) (distance y
    from M on the far side); shrinking d below |PY'| keeps the bend angle
    sum at most pi, since the second angle at M grows with d.
    """
    while True:
        x = rng.uniform(0.3, 2.0) * scale
        px = rng.uniform(-0.8, 2.5) * scale
        py = rng.uniform(0.15, 2.0) * scale
        y = math.hypot(px, py)
        z = math.hypot(px - x, py)
        d_flat = math.hypot(px - (x + y), py)
        # d must stay above both second-triangle validity (|z - y|) and
        # straightened-triangle validity ((x + y) - y = x)
        lo = max(abs(z - y), x)
        if d_flat <= lo + 1e-2 * scale:
            continue
        d = rng.uniform(lo + 0.01 * (d_flat - lo), d_flat)
        if validate_triangle(0.0, y, x, z) != VALID:
            continue
        if validate_triangle(0.0, d, z, y) != VALID:
            continue
        return x, y, z, d
