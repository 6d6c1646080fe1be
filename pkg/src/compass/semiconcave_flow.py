"""Gradients and gradient flows of piecewise-smooth semi-concave functions.

Functions are finite minima of smooth branches (affine or quadratic in the
serialized form) on a Euclidean domain.  The gradient at a point is the
minimum-norm point of the convex hull of the active branch gradients (zero
at critical points); both defining conditions of the gradient are asserted
after every computation.  Flows use forward Euler with event detection:
integration steps land exactly on branch-activity crossings, where the
vector field is discontinuous.  The checkers wrap the flow contraction
estimate, the two-point flow inequality, Busemann evaluation along straight
rays, discrete lambda-concavity of sampled restrictions, and the symmetric
two-point gradient pairing bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    NotConcave,
    NotOneLipschitz,
    StepTooLarge,
    TooFewSamples,
)
from .report import Report


def _activity_tol(f_value: float) -> float:
    return 1e-9 * (1.0 + abs(f_value))


@dataclass(frozen=True)
class Branch:
    """Smooth branch with evaluators, a line second-derivative bound lam,
    and a gradient-norm bound lip (inf when unbounded)."""

    func: Callable[[np.ndarray], float]
    grad_func: Callable[[np.ndarray], np.ndarray]
    lam: float
    lip: float
    data: tuple | None = None  # ("affine", g, b) | ("quadratic", A, g, b)

    def value(self, x: np.ndarray) -> float:
        return float(self.func(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.grad_func(x), dtype=float)


def affine_branch(g, b: float = 0.0) -> Branch:
    g = np.asarray(g, dtype=float)
    return Branch(lambda x: float(g @ x) + b, lambda x: g, 0.0,
                  float(np.linalg.norm(g)), ("affine", g, float(b)))


def quadratic_branch(A, g, b: float = 0.0) -> Branch:
    """Branch x -> x.A.x/2 + g.x + b; lam is the largest eigenvalue of the
    symmetrized A.  The gradient norm is unbounded (lip = inf)."""
    A = np.asarray(A, dtype=float)
    A = 0.5 * (A + A.T)
    g = np.asarray(g, dtype=float)
    lam = float(np.linalg.eigvalsh(A).max())
    return Branch(lambda x: float(x @ A @ x) / 2.0 + float(g @ x) + b,
                  lambda x: A @ x + g, lam, math.inf,
                  ("quadratic", A, g, float(b)))


@dataclass(frozen=True)
class PiecewiseMinFunction:
    """Minimum of finitely many branches; lambda_bound = max branch lam."""

    branches: tuple[Branch, ...]

    def __post_init__(self):
        if not self.branches:
            raise ValueError("need at least one branch")

    @property
    def lambda_bound(self) -> float:
        return max(b.lam for b in self.branches)

    @property
    def lipschitz_bound(self) -> float:
        return max(b.lip for b in self.branches)

    @property
    def dim(self) -> int | None:
        for b in self.branches:
            if b.data is not None:
                return len(b.data[-2])
        return None

    def value(self, p) -> float:
        p = np.asarray(p, dtype=float)
        return min(b.value(p) for b in self.branches)

    def active(self, p) -> list[int]:
        p = np.asarray(p, dtype=float)
        vals = [b.value(p) for b in self.branches]
        fp = min(vals)
        tol = _activity_tol(fp)
        return [i for i, v in enumerate(vals) if v <= fp + tol]

    def active_gradients(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.stack([self.branches[i].gradient(p) for i in self.active(p)])

    def __call__(self, p) -> float:
        return self.value(p)


def directional_derivative(f: PiecewiseMinFunction, p, v) -> float:
    """min over active branches of <branch gradient, v>; concave and
    positively homogeneous in v."""
    v = np.asarray(v, dtype=float)
    return float(min(g @ v for g in f.active_gradients(p)))


def _min_norm_point(points: np.ndarray, tol: float = 1e-12,
                    max_iter: int = 100) -> np.ndarray:
    """Minimum-norm point of the convex hull of the rows (Wolfe's method)."""
    if points.shape[0] == 1:
        return points[0].copy()
    norms = np.einsum("ij,ij->i", points, points)
    corral = [int(np.argmin(norms))]
    lam = np.array([1.0])
    w = points[corral[0]].copy()
    for _ in range(max_iter):
        scores = points @ w
        cand = int(np.argmin(scores))
        if w @ w <= scores[cand] + tol * (1.0 + w @ w):
            break
        if cand in corral:
            break
        corral.append(cand)
        lam = np.append(lam, 0.0)
        for _ in range(max_iter):
            P = points[corral]
            k = len(corral)
            M = np.zeros((k + 1, k + 1))
            M[:k, :k] = P @ P.T
            M[:k, k] = 1.0
            M[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            try:
                mu = np.linalg.solve(M, rhs)[:k]
            except np.linalg.LinAlgError:
                mu = np.linalg.lstsq(M, rhs, rcond=None)[0][:k]
            if mu.min() > 1e-12:
                lam = mu
                break
            shrink = [(lam[i] / (lam[i] - mu[i]), i)
                      for i in range(k) if lam[i] - mu[i] > 1e-15]
            theta = min(s for s, _ in shrink) if shrink else 0.0
            lam = (1.0 - theta) * lam + theta * mu
            keep = lam > 1e-12
            if keep.all():
                lam = lam / lam.sum()
                break
            corral = [c for c, kp in zip(corral, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        w = lam @ points[corral]
    return w


def _ascent_direction(f: PiecewiseMinFunction, p, grads: np.ndarray) -> np.ndarray:
    """Fallback: maximize the directional derivative over the unit sphere by
    projected ascent from each active gradient direction."""
    best_v = None
    best_s = -math.inf
    starts = [g for g in grads if np.linalg.norm(g) > 0]
    for g0 in starts:
        v = g0 / np.linalg.norm(g0)
        for _ in range(200):
            active = grads @ v
            sub = grads[int(np.argmin(active))]
            v_new = v + 0.05 * sub
            nv = np.linalg.norm(v_new)
            if nv == 0:
                break
            v_new /= nv
            if np.linalg.norm(v_new - v) < 1e-14:
                v = v_new
                break
            v = v_new
        s = float(min(grads @ v))
        if s > best_s:
            best_s, best_v = s, v
    if best_v is None or best_s <= 0:
        return np.zeros(grads.shape[1])
    return best_s * best_v


_PROBE_DIRECTIONS: dict[int, np.ndarray] = {}


def _probe_directions(dim: int) -> np.ndarray:
    """64 fixed random unit vectors per dimension, generated once."""
    dirs = _PROBE_DIRECTIONS.get(dim)
    if dirs is None:
        rng = np.random.default_rng(181374103 + dim)
        dirs = rng.normal(size=(64, dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        _PROBE_DIRECTIONS[dim] = dirs
    return dirs


def gradient(f: PiecewiseMinFunction, p) -> np.ndarray:
    """The vector h with df_p(h) = |h|^2 and df_p(v) <= <h, v> for all v.

    Computed as the minimum-norm point of the active-gradient hull (zero
    when the hull contains the origin, i.e. at critical points); both
    defining conditions are asserted post hoc at 1e-9 on 64 deterministic
    unit directions, with a projected-ascent fallback if they fail.
    """
    p = np.asarray(p, dtype=float)
    grads = f.active_gradients(p)
    h = _min_norm_point(grads)
    hn2 = float(h @ h)
    if hn2 <= 1e-18:
        return np.zeros_like(h)
    probes = _probe_directions(grads.shape[1])

    def satisfies(hh) -> bool:
        hh2 = float(hh @ hh)
        if abs(float((grads @ hh).min()) - hh2) > 1e-9 * (1.0 + hh2):
            return False
        df_vals = (grads @ probes.T).min(axis=0)
        return bool((df_vals <= probes @ hh + 1e-9).all())

    if satisfies(h):
        return h
    h2 = _ascent_direction(f, p, grads)
    if satisfies(h2):
        return h2
    raise AssertionError("gradient conditions failed for both routes; solver bug")


@dataclass(frozen=True)
class GradientCurve:
    """Euler polyline of a gradient flow; linear in t between nodes."""

    times: np.ndarray
    points: np.ndarray
    values: np.ndarray

    @property
    def endpoint(self) -> np.ndarray:
        return self.points[-1]

    def at(self, t: float) -> np.ndarray:
        t = min(max(t, float(self.times[0])), float(self.times[-1]))
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        i = min(max(i, 0), len(self.times) - 2) if len(self.times) > 1 else 0
        if len(self.times) == 1:
            return self.points[0]
        t0, t1 = self.times[i], self.times[i + 1]
        if t1 == t0:
            return self.points[i + 1]
        u = (t - t0) / (t1 - t0)
        return (1.0 - u) * self.points[i] + u * self.points[i + 1]


def _pair_difference_roots(bi: Branch, bj: Branch, x: np.ndarray,
                           g: np.ndarray, h: float) -> list[float]:
    """Roots of (bi - bj)(x + s g) in (0, h], analytically when both
    branches carry polynomial data, otherwise by sampled bisection."""
    lo = 1e-12 * max(1.0, h)
    if bi.data is not None and bj.data is not None:
        c2 = 0.0
        if bi.data[0] == "quadratic":
            _, A, gg, bb = bi.data
            c2 += 0.5 * float(g @ A @ g)
            c1 = float((A @ x + gg) @ g)
            c0 = float(x @ A @ x) / 2.0 + float(gg @ x) + bb
        else:
            _, gg, bb = bi.data
            c1 = float(gg @ g)
            c0 = float(gg @ x) + bb
        if bj.data[0] == "quadratic":
            _, A, gg, bb = bj.data
            c2 -= 0.5 * float(g @ A @ g)
            c1 -= float((A @ x + gg) @ g)
            c0 -= float(x @ A @ x) / 2.0 + float(gg @ x) + bb
        else:
            _, gg, bb = bj.data
            c1 -= float(gg @ g)
            c0 -= float(gg @ x) + bb
        scale = max(abs(c0), abs(c1) * h, abs(c2) * h * h, 1e-300)
        roots: list[float] = []
        if abs(c2) * h * h > 1e-14 * scale:
            disc = c1 * c1 - 4.0 * c2 * c0
            if disc >= 0:
                sq = math.sqrt(disc)
                roots = [(-c1 - sq) / (2.0 * c2), (-c1 + sq) / (2.0 * c2)]
        elif abs(c1) * h > 1e-14 * scale:
            roots = [-c0 / c1]
        return sorted(r for r in roots if lo < r <= h)
    # generic branches: sample and bisect the first sign change
    def diff(s: float) -> float:
        y = x + s * g
        return bi.value(y) - bj.value(y)
    samples = np.linspace(lo, h, 33)
    vals = [diff(s) for s in samples]
    for a, b, fa, fb in zip(samples, samples[1:], vals, vals[1:]):
        if fa == 0.0 or fa * fb < 0:
            for _ in range(80):
                m = 0.5 * (a + b)
                fm = diff(m)
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
            return [0.5 * (a + b)]
    return []


def gradient_curve(f: PiecewiseMinFunction, p, T: float, step: float) -> GradientCurve:
    """Forward Euler with event detection.

    Each Euler segment is cut at the first branch-activity crossing along
    its ray, so nodes land exactly on the kinks of the field.  The flow is
    defined for forward time only; f is nondecreasing along the result.
    """
    if T <= 0:
        raise StepTooLarge(f"horizon must be positive, got {T!r}")
    if step <= 0 or step > T:
        raise StepTooLarge(f"step {step!r} outside (0, T={T!r}]")
    p = np.asarray(p, dtype=float)
    times = [0.0]
    pts = [p.copy()]
    vals = [f.value(p)]
    t = 0.0
    x = p.copy()
    guard = 0
    max_nodes = 100 * (int(T / step) + 2) + 10000
    while t < T - 1e-15 * max(1.0, T):
        guard += 1
        if guard > max_nodes:
            raise RuntimeError("event stepping failed to terminate; step too chaotic")
        g = gradient(f, x)
        if float(g @ g) == 0.0:
            t = T  # critical point: constant from here on
            times.append(t)
            pts.append(x.copy())
            vals.append(f.value(x))
            break
        h = min(step, T - t)
        roots: list[float] = []
        nb = len(f.branches)
        for i in range(nb):
            for j in range(i + 1, nb):
                roots.extend(_pair_difference_roots(
                    f.branches[i], f.branches[j], x, g, h))
        s = min(roots) if roots else h
        x = x + s * g
        t = t + s
        times.append(t)
        pts.append(x.copy())
        vals.append(f.value(x))
    return GradientCurve(np.array(times), np.stack(pts), np.array(vals))


def contraction_report(f: PiecewiseMinFunction, p, q, T: float, step: float,
                       allowance: float | None = None) -> Report:
    """d(flow_t(p), flow_t(q)) <= d(p, q) * exp(lambda * t) + allowance.

    Checked on the union of the recorded node times of both curves (the
    curves are exactly linear between nodes).  Default allowance 10 * step.
    """
    if allowance is None:
        allowance = 10.0 * step
    lam = f.lambda_bound
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    alpha = gradient_curve(f, p, T, step)
    beta = gradient_curve(f, q, T, step)
    grid = np.union1d(alpha.times, beta.times)
    l0 = float(np.linalg.norm(p - q))
    worst = -math.inf
    worst_at = None
    for t in grid:
        l = float(np.linalg.norm(alpha.at(t) - beta.at(t)))
        margin = l - l0 * math.exp(lam * t)
        if margin > worst:
            worst, worst_at = margin, float(t)
    return Report("flow_contraction", worst <= allowance, allowance, worst,
                  worst_at, {"lambda": lam, "l0": l0, "nodes": len(grid)})


def petrunin_report(f: PiecewiseMinFunction, p, q, s: float, t: float,
                    step: float, allowance: float | None = None) -> Report:
    """Two-point flow inequality for concave 1-Lipschitz f:

      d(flow_s(p), flow_t(q))^2 <= d(p,q)^2 + 2 (f(p) - f(q)) (s - t) + (s - t)^2.

    For a single affine branch of unit gradient the two sides agree exactly
    (the flow is a straight line), and the report records the equality gap.
    """
    if f.lambda_bound > 1e-12:
        raise NotConcave(f"lambda bound {f.lambda_bound!r} > 0")
    if f.lipschitz_bound > 1.0 + 1e-9:
        raise NotOneLipschitz(f"gradient norm bound {f.lipschitz_bound!r} > 1")
    if s < 0 or t < 0:
        raise ValueError("flow times must be nonnegative")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    xs = gradient_curve(f, p, s, min(step, s)).endpoint if s > 0 else p
    xt = gradient_curve(f, q, t, min(step, t)).endpoint if t > 0 else q
    lhs = float(np.linalg.norm(xs - xt) ** 2)
    dpq2 = float(np.linalg.norm(p - q) ** 2)
    rhs = dpq2 + 2.0 * (f.value(p) - f.value(q)) * (s - t) + (s - t) ** 2
    if allowance is None:
        allowance = 10.0 * step * (1.0 + dpq2 + (s - t) ** 2)
    margin = lhs - rhs
    single_affine = (len(f.branches) == 1 and f.branches[0].data is not None
                     and f.branches[0].data[0] == "affine")
    details = {"lhs": lhs, "rhs": rhs, "single_affine": single_affine}
    passed = margin <= allowance
    if single_affine and abs(f.branches[0].lip - 1.0) <= 1e-12:
        details["equality_gap"] = abs(margin)
        passed = passed and abs(margin) <= 1e-9 * (1.0 + abs(rhs))
    return Report("petrunin_two_point", passed, allowance, margin,
                  {"s": s, "t": t}, details)


@dataclass(frozen=True)
class Ray:
    """Unit-speed straight ray origin + t * direction."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=float)
        d = np.asarray(self.direction, dtype=float)
        if abs(float(np.linalg.norm(d)) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", d)

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.direction


@dataclass(frozen=True)
class BusemannEval:
    """Finite-horizon Busemann value with its monotone bracket and, for
    straight Euclidean rays, the exact limit."""

    value: float
    bracket: tuple[float, float]
    closed_form: float

    def to_dict(self) -> dict:
        return {"value": self.value, "bracket": list(self.bracket),
                "closed_form": self.closed_form}


def busemann_eval(ray: Ray, x, T: float) -> BusemannEval:
    """d(x, ray(T)) - T, which decreases in T toward the Busemann value.

    The limit lies in [-d(x, origin), value]; for straight rays it equals
    -<x - origin, direction>, reported as closed_form.
    """
    if T <= 0:
        raise ValueError(f"horizon must be positive, got {T!r}")
    x = np.asarray(x, dtype=float)
    value = float(np.linalg.norm(x - ray.at(T))) - T
    lower = -float(np.linalg.norm(x - ray.origin))
    closed = -float((x - ray.origin) @ ray.direction)
    return BusemannEval(value, (lower, value), closed)


def lambda_concavity_check(ts, fs, lam: float, tol: float = 1e-9) -> Report:
    """Discrete midpoint concavity of f(t) - lam * t^2 / 2 on a uniform grid."""
    ts = np.asarray(ts, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if ts.ndim != 1 or ts.shape != fs.shape:
        raise ValueError("need matching 1-d sample arrays")
    if ts.size < 3:
        raise TooFewSamples(f"need >= 3 samples, got {ts.size}")
    hs = np.diff(ts)
    if hs.min() <= 0 or (hs.max() - hs.min()) > 1e-9 * hs.max():
        raise ValueError("sample grid must be uniform and increasing")
    g = fs - lam * ts * ts / 2.0
    mid_gap = (g[:-2] + g[2:]) / 2.0 - g[1:-1]
    worst_idx = int(np.argmax(mid_gap))
    worst = float(mid_gap[worst_idx])
    return Report("lambda_concavity", worst <= tol, tol, worst,
                  float(ts[worst_idx + 1]), {"lambda": lam, "samples": int(ts.size)})


def gradient_inequality_check(f: PiecewiseMinFunction, p, q,
                              tol: float = 1e-9) -> Report:
    """Symmetric two-point gradient bound:

      <grad f(p), u> + <grad f(q), -u> >= -lambda * d(p, q)

    with u the unit vector from p to q.  The single-sided pairings and their
    difference-quotient counterparts are reported without pass/fail (their
    orientation is convention-sensitive); only the symmetric sum is asserted.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    l = float(np.linalg.norm(q - p))
    if l == 0:
        raise ValueError("p and q must differ")
    u = (q - p) / l
    gp = gradient(f, p)
    gq = gradient(f, q)
    lam = f.lambda_bound
    side_p = float(gp @ u)
    side_q = float(gq @ -u)
    total = side_p + side_q
    bound = -lam * l
    details = {
        "pairing_p": side_p,
        "pairing_q": side_q,
        "quotient_p": (f.value(q) - f.value(p) - lam * l * l / 2.0) / l,
        "quotient_q": (f.value(p) - f.value(q) - lam * l * l / 2.0) / l,
        "lambda": lam,
    }
    return Report("gradient_pairing_sum", total >= bound - tol, tol,
                  bound - total, {"p": p.tolist(), "q": q.tolist()}, details)


def min_xy() -> PiecewiseMinFunction:
    """The reference two-branch example min(x, y) on the plane."""
    return PiecewiseMinFunction((affine_branch([1.0, 0.0]),
                                 affine_branch([0.0, 1.0])))


def load_function(spec: dict) -> PiecewiseMinFunction:
    """Build a PiecewiseMinFunction from its serialized branch list."""
    branches = []
    for item in spec["branches"]:
        kind = item["type"]
        if kind == "affine":
            branches.append(affine_branch(item["g"], float(item.get("b", 0.0))))
        elif kind == "quadratic":
            branches.append(quadratic_branch(item["A"], item["g"],
                                             float(item.get("b", 0.0))))
        else:
            raise ValueError(f"unknown branch type {kind!r}")
    return PiecewiseMinFunction(tuple(branches))
