"""Short generating bases of lattices (deck groups of flat tori).

The greedy construction picks, at every stage, a shortest lattice vector
outside the subgroup generated so far (ties broken lexicographically on
integer coordinates).  Everything group-theoretic is decided exactly: vector
coordinates with respect to the lattice basis are integers, subgroups are
compared through their canonical Hermite normal forms, and membership is
exact integer reduction.  Geometry (lengths, angles, the covering radius of
the quotient torus) is floating point with explicit error bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import RankTooLarge
from .report import Report
from .volume_comparison import short_basis_bound
from .gromov_hausdorff import GHBound  # noqa: F401  (re-export convenience)


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice given by basis row vectors."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError(f"basis must be square, got shape {b.shape}")
        if abs(np.linalg.det(b)) < 1e-12 * max(1.0, float(np.abs(b).max()) ** b.shape[0]):
            raise ValueError("basis determinant must be nonzero")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def gram(self) -> np.ndarray:
        return self.basis @ self.basis.T


# --- exact integer subgroup arithmetic --------------------------------------

def hermite_normal_form(rows: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical row-style HNF over the integers; zero rows dropped.

    Pivots are positive, entries above each pivot are reduced into
    [0, pivot); two integer row spans are equal iff their forms are equal.
    """
    mat = [list(map(int, r)) for r in rows if any(r)]
    if not mat:
        return ()
    ncols = len(mat[0])
    r = 0
    for col in range(ncols):
        pivot_rows = [i for i in range(r, len(mat)) if mat[i][col] != 0]
        if not pivot_rows:
            continue
        while True:
            pivot_rows.sort(key=lambda i: abs(mat[i][col]))
            p = pivot_rows[0]
            done = True
            for i in pivot_rows[1:]:
                q = mat[i][col] // mat[p][col]
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[p])]
                if mat[i][col] != 0:
                    done = False
            pivot_rows = [i for i in range(r, len(mat)) if mat[i][col] != 0]
            if done or len(pivot_rows) <= 1:
                break
        p = pivot_rows[0]
        mat[r], mat[p] = mat[p], mat[r]
        if mat[r][col] < 0:
            mat[r] = [-a for a in mat[r]]
        for i in range(r):
            q = mat[i][col] // mat[r][col]
            if q:
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r] if any(row))


def _hnf_contains(hnf: tuple[tuple[int, ...], ...], vec) -> bool:
    """Exact membership of an integer vector in the row span of an HNF."""
    v = list(map(int, vec))
    for row in hnf:
        col = next(i for i, a in enumerate(row) if a != 0)
        if v[col] % row[col] != 0:
            return False
        q = v[col] // row[col]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


# --- basis reduction and enumeration ----------------------------------------

def _reduce_basis(basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Float LLL (delta = 0.75) tracking the unimodular transform U with
    reduced = U @ basis.  Enough for the small, well-conditioned lattices
    this module targets; all downstream group logic stays exact."""
    b = basis.astype(float).copy()
    n = b.shape[0]
    U = np.eye(n, dtype=object)
    if n == 1:
        return b, U

    def gso(bm):
        star = bm.astype(float).copy()
        mu = np.zeros((n, n))
        for i in range(n):
            for j in range(i):
                mu[i, j] = (bm[i] @ star[j]) / (star[j] @ star[j])
                star[i] = star[i] - mu[i, j] * star[j]
        return star, mu

    star, mu = gso(b)
    k = 1
    guard = 0
    while k < n and guard < 10000:
        guard += 1
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                b[k] -= q * b[j]
                U[k] = [a - q * c for a, c in zip(U[k], U[j])]
                star, mu = gso(b)
        if star[k] @ star[k] >= (0.75 - mu[k, k - 1] ** 2) * (star[k - 1] @ star[k - 1]):
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            U[[k - 1, k]] = U[[k, k - 1]]
            star, mu = gso(b)
            k = max(k - 1, 1)
    return b, U


def _enumerate_within(lat: Lattice, radius: float):
    """All nonzero lattice vectors with |v| <= radius, as (length, coords,
    vector) with coords in the original basis; exact coordinate arithmetic.

    Fincke-Pohst style recursion on the Gram-Schmidt decomposition of an
    LLL-reduced basis.
    """
    reduced, U = _reduce_basis(lat.basis)
    n = lat.n
    star = reduced.astype(float).copy()
    mu = np.zeros((n, n))
    for i in range(n):
        for j in range(i):
            mu[i, j] = (reduced[i] @ star[j]) / (star[j] @ star[j])
            star[i] = star[i] - mu[i, j] * star[j]
    star_sq = np.array([s @ s for s in star])
    budget = radius * radius * (1.0 + 1e-12) + 1e-18

    out = []
    coeff = [0] * n

    def recurse(i: int, partial: float, shifts: np.ndarray):
        if i < 0:
            if all(c == 0 for c in coeff):
                return
            k = np.array(coeff, dtype=object)
            coords = tuple(int(x) for x in (k @ U))
            vec = np.array(coords, dtype=float) @ lat.basis
            length = float(np.linalg.norm(vec))
            if length <= radius:
                out.append((length, coords, vec))
            return
        center = -shifts[i]
        span = math.sqrt(max(0.0, (budget - partial) / star_sq[i]))
        for ki in range(math.ceil(center - span - 1e-12),
                        math.floor(center + span + 1e-12) + 1):
            add = (ki - center) ** 2 * star_sq[i]
            if add > budget - partial + 1e-15:
                continue
            coeff[i] = ki
            # fixing k_i shifts the Gram-Schmidt centers of all lower levels
            nxt = shifts.copy()
            for j in range(i):
                nxt[j] += ki * mu[i, j]
            recurse(i - 1, partial + add, nxt)
        coeff[i] = 0

    recurse(n - 1, 0.0, np.zeros(n))
    # Exactly tied lengths differ by ulps in float, which would defeat the
    # lexicographic tie-break; bucket lengths at 1e-9 relative before sorting.
    eps = 1e-9 * max(1.0, radius)
    out.sort(key=lambda item: (round(item[0] / eps), item[1]))
    return out


@dataclass(frozen=True)
class CoveringRadiusEstimate:
    """Grid maximum of distance-to-lattice with its one-sided error bound:
    the true covering radius lies in [value, value + error_bound]."""

    value: float
    error_bound: float

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        return {"value": self.value, "error_bound": self.error_bound}


def torus_diameter(lat: Lattice, grid_resolution: int = 32) -> CoveringRadiusEstimate:
    """Diameter of the flat torus R^n / lattice = covering radius.

    Maximizes distance-to-lattice over a fundamental-domain grid; the
    distance function is 1-Lipschitz, so the grid spacing gives the error.
    """
    if grid_resolution < 16:
        raise ValueError(f"grid_resolution must be >= 16, got {grid_resolution}")
    reduced, _ = _reduce_basis(lat.basis)
    n = lat.n
    axes = [np.arange(grid_resolution) / grid_resolution] * n
    fracs = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    pts = fracs @ reduced
    inv = np.linalg.inv(reduced)
    base = np.rint(pts @ inv)
    best = np.full(len(pts), np.inf)
    for off in product(range(-2, 3), repeat=n):
        cand = (base + np.array(off)) @ reduced
        best = np.minimum(best, ((pts - cand) ** 2).sum(axis=1))
    value = float(np.sqrt(best.max()))
    error = float(np.linalg.norm(reduced, axis=1).sum()) / (2.0 * grid_resolution)
    return CoveringRadiusEstimate(value, error)


@dataclass(frozen=True)
class ShortBasis:
    """Greedy short generating sequence of a lattice."""

    lattice: Lattice
    vectors: tuple
    coords: tuple[tuple[int, ...], ...]
    lengths: tuple[float, ...]
    enumeration_radius: float

    def __len__(self) -> int:
        return len(self.vectors)

    def to_dict(self) -> dict:
        return {
            "vectors": [list(map(float, v)) for v in self.vectors],
            "coords": [list(c) for c in self.coords],
            "lengths": list(self.lengths),
            "enumeration_radius": self.enumeration_radius,
        }


def short_basis(lat: Lattice, grid_resolution: int = 32) -> ShortBasis:
    """Greedy shortest-outside-the-subgroup generating sequence.

    Candidates are all lattice vectors within 2 * covering radius plus the
    grid error margin, ordered by (length, integer coordinates); membership
    in the running subgroup is exact via Hermite normal forms.  Terminates
    with at most n elements once the subgroup is the whole lattice.
    """
    diam = torus_diameter(lat, grid_resolution)
    radius = 2.0 * diam.value + diam.error_bound + 1e-9
    chosen_coords: list[tuple[int, ...]] = []
    chosen_vecs = []
    lengths = []
    hnf: tuple = ()
    identity = hermite_normal_form([[1 if i == j else 0 for j in range(lat.n)]
                                    for i in range(lat.n)])
    for length, coords, vec in _enumerate_within(lat, radius):
        if _hnf_contains(hnf, coords):
            continue
        chosen_coords.append(coords)
        chosen_vecs.append(vec)
        lengths.append(length)
        hnf = hermite_normal_form([list(c) for c in chosen_coords])
        if hnf == identity:
            return ShortBasis(lat, tuple(chosen_vecs), tuple(chosen_coords),
                              tuple(lengths), radius)
    raise RuntimeError(
        "enumeration exhausted before generating the lattice; radius margin bug")


def verify_geometry(sb: ShortBasis, tol: float = 1e-9) -> Report:
    """Length and angle guarantees of the greedy construction.

    For i < j: |γ_j − γ_i| >= |γ_j| >= |γ_i| and the angle between γ_i and
    γ_j is at least pi/3 (within tol).
    """
    worst_len = -math.inf
    worst_angle = -math.inf
    worst_at = None
    m = len(sb)
    for i in range(m):
        for j in range(i + 1, m):
            li, lj = sb.lengths[i], sb.lengths[j]
            lij = float(np.linalg.norm(sb.vectors[j] - sb.vectors[i]))
            len_margin = max(lj - lij, li - lj)
            cosa = float(sb.vectors[i] @ sb.vectors[j]) / (li * lj)
            angle = math.acos(min(1.0, max(-1.0, cosa)))
            ang_margin = math.pi / 3.0 - angle
            if max(len_margin, ang_margin) > max(worst_len, worst_angle):
                worst_at = (i, j)
            worst_len = max(worst_len, len_margin)
            worst_angle = max(worst_angle, ang_margin)
    if m < 2:
        return Report("short_basis_geometry", True, tol, None, None,
                      {"pairs": 0})
    worst = max(worst_len, worst_angle)
    return Report("short_basis_geometry", worst <= tol, tol, worst, worst_at,
                  {"worst_length_margin": worst_len,
                   "worst_angle_margin": worst_angle,
                   "pairs": m * (m - 1) // 2})


def filtration_check(lat: Lattice, r: float, sb: ShortBasis | None = None) -> Report:
    """Subgroup generated by all vectors of length <= r equals the subgroup
    generated by the short-basis members of length <= r (exact HNF test)."""
    if lat.n > 3:
        raise RankTooLarge(f"exhaustive filtration check supports rank <= 3, got {lat.n}")
    if sb is None:
        sb = short_basis(lat)
    slack = 1e-9 * max(1.0, r)
    all_coords = [coords for length, coords, _ in _enumerate_within(lat, r + slack)
                  if length <= r + slack]
    gamma_r = hermite_normal_form([list(c) for c in all_coords])
    basis_coords = [list(c) for c, length in zip(sb.coords, sb.lengths)
                    if length <= r + slack]
    g_r = hermite_normal_form(basis_coords)
    equal = gamma_r == g_r
    return Report("filtration", equal, 0.0, None if equal else 1.0, r,
                  {"generators_all": len(all_coords),
                   "generators_short": len(basis_coords),
                   "rank_all": len(gamma_r), "rank_short": len(g_r)})


def count_vs_bound(sb: ShortBasis, n: int | None = None) -> Report:
    """|short basis| <= the cap-counting bound C(n)."""
    if n is None:
        n = sb.lattice.n
    bound = short_basis_bound(max(2, n))
    margin = len(sb) - bound
    return Report("count_vs_bound", margin <= 0, 0.0, margin, len(sb),
                  {"count": len(sb), "bound": bound, "n": n})
