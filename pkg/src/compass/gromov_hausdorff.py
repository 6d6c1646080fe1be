"""Hausdorff and Gromov-Hausdorff machinery for finite metric spaces.

Distances between subsets are computed by two independent formulations
(mutual covering radius and smallest enclosing tube) that are cross-checked
on every call.  The exact Gromov-Hausdorff distance between small spaces is
half the minimal distortion over correspondences; the search space is
reduced to pairs of total maps (f: X -> Y, g: Y -> X), which always contain
a minimizer, and the minimum is located by binary search over the finite
set of achievable distortion values with a pruned depth-first feasibility
test.  Larger spaces get certified lower/upper bounds.  Approximation maps
can be inverted with an explicit constant: an eps-approximation yields a
7*eps-approximation in the opposite direction, built from a greedy net and
certified before it is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .errors import EmptySet, NonpositiveScale, PreconditionFailed, TooLarge
from .finite_metric import DistanceMatrix, validate_metric
from .report import Report

EXACT_SIZE_CAP = 6


@dataclass(frozen=True)
class PointMap:
    """Total map between finite metric spaces, stored as an index table."""

    source: DistanceMatrix
    target: DistanceMatrix
    assignment: tuple[int, ...]

    def __post_init__(self):
        if len(self.assignment) != self.source.n:
            raise ValueError("assignment length must match the source size")
        for v in self.assignment:
            if not 0 <= v < self.target.n:
                raise ValueError(f"assignment value {v} out of target range")

    def __call__(self, i: int) -> int:
        return self.assignment[i]


@dataclass(frozen=True)
class Correspondence:
    """Relation between two index sets, surjective on both sides."""

    pairs: tuple[tuple[int, int], ...]

    def validate(self, X: DistanceMatrix, Y: DistanceMatrix) -> None:
        left = {i for i, _ in self.pairs}
        right = {j for _, j in self.pairs}
        if left != set(range(X.n)) or right != set(range(Y.n)):
            raise ValueError("correspondence must cover both spaces")

    def distortion(self, X: DistanceMatrix, Y: DistanceMatrix) -> float:
        idx = np.array(self.pairs)
        dx = X.d[np.ix_(idx[:, 0], idx[:, 0])]
        dy = Y.d[np.ix_(idx[:, 1], idx[:, 1])]
        return float(np.abs(dx - dy).max())


def hausdorff_distance(ambient: DistanceMatrix, A: Sequence[int],
                       B: Sequence[int]) -> float:
    """Hausdorff distance between two nonempty index subsets.

    Evaluates both the sup-of-point-distances form and the smallest
    mutual-tube form and asserts they agree; either empty side raises.
    """
    A = list(A)
    B = list(B)
    if not A or not B:
        raise EmptySet("hausdorff_distance needs nonempty subsets")
    sub = ambient.d[np.ix_(A, B)]
    sup_form = float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))
    # independent route: smallest candidate radius with mutual inclusion
    candidates = np.unique(np.concatenate([[0.0], sub.ravel()]))
    lo, hi = 0, len(candidates) - 1
    def mutual(eps: float) -> bool:
        return bool((sub.min(axis=1) <= eps).all() and (sub.min(axis=0) <= eps).all())
    if not mutual(candidates[hi]):
        raise AssertionError("largest candidate radius must cover both sides")
    while lo < hi:
        mid = (lo + hi) // 2
        if mutual(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    tube_form = float(candidates[lo])
    if abs(tube_form - sup_form) > 1e-12 * max(1.0, sup_form):
        raise AssertionError(
            f"hausdorff formulations disagree: {sup_form!r} vs {tube_form!r}")
    return sup_form


def _distortion_candidates(X: DistanceMatrix, Y: DistanceMatrix) -> np.ndarray:
    dx = np.concatenate([[0.0], X.d.ravel()])
    dy = np.concatenate([[0.0], Y.d.ravel()])
    return np.unique(np.abs(dx[:, None] - dy[None, :]).ravel())


def _feasible(X: np.ndarray, Y: np.ndarray, delta: float):
    """Search for maps f: X -> Y and g: Y -> X with joint distortion <= delta.

    Depth-first assignment with incremental pairwise pruning; returns
    (f, g) tuples or None.
    """
    n, m = X.shape[0], Y.shape[0]
    f: list[int] = []

    def extend_f() -> tuple | None:
        if len(f) == n:
            return extend_g([])
        i = len(f)
        for cand in range(m):
            if all(abs(X[j, i] - Y[f[j], cand]) <= delta for j in range(i)):
                f.append(cand)
                found = extend_f()
                if found:
                    return found
                f.pop()
        return None

    def extend_g(g: list[int]) -> tuple | None:
        if len(g) == m:
            return tuple(f), tuple(g)
        k = len(g)
        for cand in range(n):
            if not all(abs(X[cand, g[l]] - Y[l, k]) <= delta for l in range(k)):
                continue
            if not all(abs(X[i, cand] - Y[f[i], k]) <= delta for i in range(n)):
                continue
            g.append(cand)
            found = extend_g(g)
            if found:
                return found
            g.pop()
        return None

    return extend_f()


def gh_distance_exact(X: DistanceMatrix, Y: DistanceMatrix,
                      size_limit: int = EXACT_SIZE_CAP):
    """Exact Gromov-Hausdorff distance with an optimal correspondence.

    Both spaces must have at most size_limit points (default 6), else
    TooLarge.  Returns (value, correspondence); the correspondence realizes
    distortion exactly 2 * value.
    """
    if X.n > size_limit or Y.n > size_limit:
        raise TooLarge(
            f"exact search capped at {size_limit} points, got {X.n} and {Y.n}")
    if X.n == 0 or Y.n == 0:
        raise EmptySet("exact distance needs nonempty spaces")
    candidates = _distortion_candidates(X, Y)
    lo, hi = 0, len(candidates) - 1
    witnesses: dict[int, tuple] = {}
    if (top := _feasible(X.d, Y.d, float(candidates[hi]))) is None:
        raise AssertionError("maximal candidate distortion must be feasible")
    witnesses[hi] = top
    while lo < hi:
        mid = (lo + hi) // 2
        found = _feasible(X.d, Y.d, float(candidates[mid]))
        if found:
            witnesses[mid] = found
            hi = mid
        else:
            lo = mid + 1
    f, g = witnesses[lo]
    pairs = sorted(set([(i, f[i]) for i in range(X.n)]
                       + [(g[j], j) for j in range(Y.n)]))
    corr = Correspondence(tuple(pairs))
    corr.validate(X, Y)
    dis = corr.distortion(X, Y)
    value = float(candidates[lo]) / 2.0
    if abs(dis - 2.0 * value) > 1e-12 * max(1.0, dis):
        raise AssertionError("witness distortion does not match the optimum")
    return value, corr


@dataclass
class GHBound:
    lower: float
    upper: float
    witness: Correspondence | None = None
    exact: bool = False

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "witness_pairs": list(map(list, self.witness.pairs)) if self.witness else None,
        }


def _profile_cost(X: DistanceMatrix, Y: DistanceMatrix) -> np.ndarray:
    """Mismatch of sorted distance rows, resampled to a common length."""
    L = max(X.n, Y.n, 2)
    grid = np.linspace(0.0, 1.0, L)
    px = np.stack([np.interp(grid, np.linspace(0.0, 1.0, X.n), np.sort(X.d[i]))
                   for i in range(X.n)])
    py = np.stack([np.interp(grid, np.linspace(0.0, 1.0, Y.n), np.sort(Y.d[j]))
                   for j in range(Y.n)])
    return np.abs(px[:, None, :] - py[None, :, :]).max(axis=2)


def gh_bounds(X: DistanceMatrix, Y: DistanceMatrix) -> GHBound:
    """Certified lower and upper bounds for any sizes.

    lower combines half the diameter gap with half the discrepancy of the
    achievable distance-value sets; upper is half the distortion of a
    concrete greedy correspondence (so it is always attained by a witness).
    """
    if X.n == 0 or Y.n == 0:
        raise EmptySet("bounds need nonempty spaces")
    lower_diam = 0.5 * abs(X.diameter - Y.diameter)
    vx = np.unique(np.concatenate([[0.0], X.d.ravel()]))
    vy = np.unique(np.concatenate([[0.0], Y.d.ravel()]))
    gaps = np.abs(vx[:, None] - vy[None, :])
    value_gap = max(float(gaps.min(axis=1).max()), float(gaps.min(axis=0).max()))
    lower = max(lower_diam, 0.5 * value_gap)
    cost = _profile_cost(X, Y)
    f = cost.argmin(axis=1)
    g = cost.argmin(axis=0)
    pairs = sorted(set([(i, int(f[i])) for i in range(X.n)]
                       + [(int(g[j]), j) for j in range(Y.n)]))
    corr = Correspondence(tuple(pairs))
    upper = 0.5 * corr.distortion(X, Y)
    if X.n == Y.n:
        # the index pairing often beats the profile greedy (and is exact
        # for equal matrices); keep whichever witness is tighter
        ident = Correspondence(tuple((i, i) for i in range(X.n)))
        ident_upper = 0.5 * ident.distortion(X, Y)
        if ident_upper < upper:
            corr, upper = ident, ident_upper
    if upper < lower - 1e-9 * max(1.0, upper):
        raise AssertionError(f"bound inversion: lower {lower!r} > upper {upper!r}")
    return GHBound(lower, max(lower, upper), corr)


def check_approximation(f: PointMap, eps: float) -> Report:
    """Is f an eps-approximation: distortion <= eps and image eps-dense?"""
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps!r}")
    X, Y = f.source, f.target
    idx = np.array(f.assignment)
    dist_gap = np.abs(Y.d[np.ix_(idx, idx)] - X.d)
    w = np.unravel_index(np.argmax(dist_gap), dist_gap.shape)
    worst_distortion = float(dist_gap[w])
    coverage = Y.d[idx].min(axis=0)
    yw = int(np.argmax(coverage))
    worst_coverage = float(coverage[yw])
    worst = max(worst_distortion, worst_coverage)
    passed = worst <= eps
    return Report("approximation", passed, eps, worst,
                  {"distortion_pair": [int(w[0]), int(w[1])], "uncovered": yw},
                  {"distortion": worst_distortion, "coverage": worst_coverage})


def greedy_eps_net(m: DistanceMatrix, eps: float) -> list[int]:
    """Greedy eps-separated net: start at index 0, repeatedly add the lowest
    index at distance >= eps from the net.  Every point ends up within eps."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if m.n == 0:
        raise EmptySet("cannot build a net in an empty space")
    net = [0]
    dist_to_net = m.d[0].copy()
    while True:
        far = np.nonzero(dist_to_net >= eps)[0]
        if far.size == 0:
            return net
        nxt = int(far[0])
        net.append(nxt)
        dist_to_net = np.minimum(dist_to_net, m.d[nxt])


def invert_approximation(f: PointMap, eps: float) -> PointMap:
    """Quasi-inverse of an eps-approximation, certified at 7 * eps.

    Construction: take a greedy eps-net x_1, ..., x_k of the source and the
    image points y_i = f(x_i); every target point has some y_i within
    3 * eps, and it is sent to the lowest-index such x_i.  The returned map
    is checked to be a 7 * eps-approximation before being handed back.
    """
    pre = check_approximation(f, eps)
    if not pre.passed:
        raise PreconditionFailed(
            f"map is not an eps-approximation at eps={eps!r}: worst {pre.worst!r}")
    X, Y = f.source, f.target
    net = greedy_eps_net(X, eps) if eps > 0 else list(range(X.n))
    ys = [f(i) for i in net]
    slack = 1e-12 * max(1.0, Y.diameter)
    assignment = []
    for y in range(Y.n):
        gaps = [float(Y.d[y, yi]) for yi in ys]
        hits = [i for i, gap in enumerate(gaps) if gap <= 3.0 * eps + slack]
        pick = hits[0] if hits else int(np.argmin(gaps))
        assignment.append(net[pick])
    g = PointMap(Y, X, tuple(assignment))
    cert = check_approximation(g, 7.0 * eps)
    if not cert.passed:
        raise AssertionError(
            f"7*eps certificate failed: worst {cert.worst!r} > {7.0 * eps!r}")
    return g


def approximate_midpoint(m: DistanceMatrix, x: int, y: int) -> tuple[int, float]:
    """Best midpoint among the points: minimizes the larger deviation of the
    two half-distances; ties go to the lowest index."""
    h = float(m.d[x, y]) / 2.0
    defects = np.maximum(np.abs(m.d[x] - h), np.abs(m.d[y] - h))
    z = int(np.argmin(defects))
    return z, float(defects[z])


def rescale(m: DistanceMatrix, lam: float) -> DistanceMatrix:
    """Scale all distances by lam > 0."""
    if lam <= 0:
        raise NonpositiveScale(f"scale must be positive, got {lam!r}")
    return validate_metric(m.labels, lam * m.d)


def all_self_maps_isometry_margin(m: DistanceMatrix) -> float:
    """Support for the rigidity property: over all surjective self-maps that
    do not increase distances, the largest distance drop (0 for isometries).

    Exhaustive (n^n maps); intended for small test spaces.
    """
    n = m.n
    worst = 0.0
    for assignment in product(range(n), repeat=n):
        if len(set(assignment)) != n:
            continue
        idx = np.array(assignment)
        mapped = m.d[np.ix_(idx, idx)]
        if np.all(mapped <= m.d + 1e-12):
            worst = max(worst, float(np.max(m.d - mapped)))
    return worst
