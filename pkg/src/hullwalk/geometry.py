"""Convex polytopes in R^d.

Hulls come from Qhull (via scipy); everything downstream of the hull
(support functions, intrinsic volumes, Steiner points, Kubota projections,
point-to-polytope distances) is computed here.

Lower-dimensional point sets are not an error: the hull is built inside the
affine hull of the points and the polytope carries ``degenerate_rank < dim``.
Intrinsic volumes do not depend on the ambient dimension, so they are
computed on that lower-dimensional body.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .montecarlo import stream_from

REL_TOL = 1e-12
DIST_TOL = 1e-9
_DIR_BLOCK = 512


class GeometryError(ValueError):
    pass


def kappa(d: int) -> float:
    """Volume of the unit ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(1 + d / 2)


def varpi(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return d * kappa(d)


class Method(str, enum.Enum):
    EXACT = "Exact"
    SPHERE = "SphereQuadrature"
    KUBOTA = "KubotaMC"
    BOX = "BoxCoefficient"


@dataclass(frozen=True)
class IntrinsicVolumeEstimate:
    m: int
    value: float
    std_error: float
    method: Method


@dataclass(frozen=True)
class PointEstimate:
    value: np.ndarray
    std_error: np.ndarray
    method: Method


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of finitely many points, stored by its extreme points.

    ``normals``/``offsets``/``simplices`` describe the (triangulated) facets
    and exist only for full-dimensional hulls with ``dim >= 2``: facet ``i``
    is ``{x : normals[i] @ x <= offsets[i]}`` with vertex indices
    ``simplices[i]``.  Coplanar facets may be split into several simplices.
    """

    dim: int
    vertices: np.ndarray
    degenerate_rank: int
    normals: np.ndarray | None = None
    offsets: np.ndarray | None = None
    simplices: np.ndarray | None = None
    neighbors: np.ndarray | None = None
    # affine frame (origin, orthonormal rows) of a lower-dimensional hull
    frame_origin: np.ndarray | None = None
    frame_basis: np.ndarray | None = None
    local: "Polytope | None" = None

    @property
    def full_dimensional(self) -> bool:
        return self.degenerate_rank == self.dim

    @property
    def facets(self) -> list[tuple[np.ndarray, float, list[int]]]:
        if self.normals is None:
            return []
        return [
            (self.normals[i], float(self.offsets[i]), [int(j) for j in self.simplices[i]])
            for i in range(len(self.offsets))
        ]

    @cached_property
    def scale(self) -> float:
        return float(np.max(np.abs(self.vertices))) if self.vertices.size else 0.0

    def contains(self, x, tol: float | None = None) -> np.ndarray:
        """Facet test for full-dimensional polytopes; ``x`` is (d,) or (N, d)."""
        if not self.full_dimensional or self.normals is None:
            raise GeometryError("containment test needs a full-dimensional polytope with d >= 2")
        x = np.asarray(x, dtype=float)
        if tol is None:
            tol = REL_TOL * max(1.0, self.scale) * 1e3
        return np.all(x @ self.normals.T - self.offsets <= tol, axis=-1)

    def scaled(self, a: float) -> "Polytope":
        return convex_hull(a * self.vertices)

    def transformed(self, matrix) -> "Polytope":
        """Image under the linear map ``x -> matrix @ x``."""
        return convex_hull(self.vertices @ np.asarray(matrix, dtype=float).T)


# ---------------------------------------------------------------------------
# hull construction


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise GeometryError("no points")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("invalid coordinate")
    return arr


def convex_hull(points) -> Polytope:
    """Convex hull of a finite point set in R^d.

    Raises ``GeometryError("no points")`` on empty input and
    ``GeometryError("invalid coordinate")`` on NaN/inf.
    """
    poly, _ = _hull_with_indices(_as_points(points))
    return poly


def _hull_with_indices(pts: np.ndarray) -> tuple[Polytope, np.ndarray]:
    npts, d = pts.shape
    if d == 1:
        lo, hi = int(np.argmin(pts[:, 0])), int(np.argmax(pts[:, 0]))
        if pts[hi, 0] - pts[lo, 0] <= REL_TOL * max(1.0, abs(pts[hi, 0]), abs(pts[lo, 0])):
            return Polytope(1, pts[[lo]].copy(), 0), np.array([lo])
        idx = np.array([lo, hi])
        return Polytope(1, pts[idx].copy(), 1), idx
    if npts > d:
        try:
            return _qhull(pts)
        except QhullError:
            pass
    return _degenerate_hull(pts)


def _qhull(pts: np.ndarray) -> tuple[Polytope, np.ndarray]:
    h = ConvexHull(pts)
    idx = np.asarray(h.vertices)
    remap = np.full(pts.shape[0], -1, dtype=np.intp)
    remap[idx] = np.arange(idx.size)
    normals = np.ascontiguousarray(h.equations[:, :-1])
    offsets = -h.equations[:, -1]
    poly = Polytope(
        dim=pts.shape[1],
        vertices=pts[idx].copy(),
        degenerate_rank=pts.shape[1],
        normals=normals,
        offsets=offsets,
        simplices=remap[h.simplices],
        neighbors=np.asarray(h.neighbors),
    )
    return poly, idx


def _degenerate_hull(pts: np.ndarray) -> tuple[Polytope, np.ndarray]:
    d = pts.shape[1]
    origin = pts.mean(axis=0)
    centered = pts - origin
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    tol = REL_TOL * max(1.0, float(np.max(np.abs(pts)))) * math.sqrt(pts.shape[0])
    rank = int(np.sum(s > tol)) if s.size else 0
    if rank == d:
        # Qhull refused a hull that is numerically full-dimensional; joggle.
        h = ConvexHull(pts, qhull_options="QJ")
        idx = np.unique(h.vertices)
        return _qhull(pts[idx])[0], idx
    if rank == 0:
        return Polytope(d, pts[:1].copy(), 0, frame_origin=pts[0].copy(),
                        frame_basis=np.zeros((0, d))), np.array([0])
    basis = vt[:rank]
    local, idx = _hull_with_indices(centered @ basis.T)
    poly = Polytope(
        dim=d,
        vertices=pts[idx].copy(),
        degenerate_rank=rank,
        frame_origin=origin,
        frame_basis=basis,
        local=local,
    )
    return poly, idx


def _intrinsic_body(P: Polytope) -> Polytope:
    """The full-dimensional body inside the affine hull of ``P``."""
    if P.full_dimensional:
        return P
    if P.local is None:
        raise GeometryError("single point has no full-dimensional body")
    return P.local


# ---------------------------------------------------------------------------
# support function, exact measures


def support_function(P: Polytope, direction) -> float:
    u = np.asarray(direction, dtype=float)
    if u.shape != (P.dim,):
        raise GeometryError(f"direction must have length {P.dim}")
    if not np.any(u):
        raise GeometryError("zero direction")
    return float(np.max(P.vertices @ u))


def support_values(P: Polytope, directions) -> np.ndarray:
    """``s_P`` evaluated at each row of ``directions``."""
    u = np.atleast_2d(np.asarray(directions, dtype=float))
    out = np.empty(u.shape[0])
    for lo in range(0, u.shape[0], _DIR_BLOCK):
        out[lo:lo + _DIR_BLOCK] = np.max(P.vertices @ u[lo:lo + _DIR_BLOCK].T, axis=0)
    return out


def _fan_volume(P: Polytope) -> float:
    c = P.vertices.mean(axis=0)
    edges = P.vertices[P.simplices] - c  # (f, d, d)
    return float(np.sum(np.abs(np.linalg.det(edges)))) / math.factorial(P.dim)


def _facet_measures(P: Polytope) -> np.ndarray:
    # |det[n; w_1-w_0; ...]| = (d-1)! * facet measure since n is a unit normal
    # orthogonal to the facet edges.
    w = P.vertices[P.simplices]
    edges = w[:, 1:, :] - w[:, :1, :]
    mats = np.concatenate([P.normals[:, None, :], edges], axis=1)
    return np.abs(np.linalg.det(mats)) / math.factorial(P.dim - 1)


def volume(P: Polytope) -> float:
    """Lebesgue volume; 0 for lower-dimensional polytopes."""
    if not P.full_dimensional:
        return 0.0
    if P.dim == 1:
        return float(np.ptp(P.vertices[:, 0]))
    return _fan_volume(P)


def surface_area_half(P: Polytope) -> float:
    """``V_{d-1}``: half the surface area.

    A polytope of rank ``d - 1`` is its own (two-sided) surface, so its
    ``V_{d-1}`` is its ``(d-1)``-volume; lower ranks give 0.
    """
    if P.dim < 2:
        raise GeometryError("surface area needs d >= 2")
    if P.full_dimensional:
        return 0.5 * float(np.sum(_facet_measures(P)))
    if P.degenerate_rank == P.dim - 1:
        return volume(P.local)
    return 0.0


def _edge_external_V1(P: Polytope) -> float:
    """Exact ``V_1`` of a full-dimensional 3-polytope.

    Sum over edges of length times external angle / (2 pi); edges interior to
    a triangulated flat facet have external angle 0 and drop out.
    """
    simp, nbr, normals = P.simplices, P.neighbors, P.normals
    f = simp.shape[0]
    total = 0.0
    for j in range(3):
        other = nbr[:, j]
        keep = np.arange(f) < other  # each edge appears from both sides
        a = simp[keep][:, (j + 1) % 3]
        b = simp[keep][:, (j + 2) % 3]
        lengths = np.linalg.norm(P.vertices[a] - P.vertices[b], axis=1)
        cosang = np.clip(np.einsum("ij,ij->i", normals[keep], normals[other[keep]]), -1.0, 1.0)
        total += float(np.sum(lengths * np.arccos(cosang)))
    return total / (2 * math.pi)


def _polygon_steiner(P: Polytope) -> np.ndarray:
    # Qhull returns 2-d hull vertices in counter-clockwise order.
    v = P.vertices
    e = np.roll(v, -1, axis=0) - v
    normals = np.stack([e[:, 1], -e[:, 0]], axis=1)
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    prev = np.roll(normals, 1, axis=0)
    cross = prev[:, 0] * normals[:, 1] - prev[:, 1] * normals[:, 0]
    dot = np.einsum("ij,ij->i", prev, normals)
    turn = np.arctan2(cross, dot)
    return (turn[:, None] * v).sum(axis=0) / np.sum(turn)


def _lift(P: Polytope, local_point: np.ndarray) -> np.ndarray:
    return P.frame_origin + local_point @ P.frame_basis


def _sphere_directions(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1)[:, None]


# ---------------------------------------------------------------------------
# V_1 / mean width and Steiner point


def mean_width_and_V1(P: Polytope, num_directions: int = 4096, rng_seed=0) -> IntrinsicVolumeEstimate:
    """``V_1`` from the mean width, ``V_1 = d kappa_d / (2 kappa_{d-1}) * w``.

    Bodies of rank at most 2 take the exact branch (length, half perimeter).
    Otherwise the mean width is averaged over antithetic pairs of uniform
    sphere directions, each pair contributing the width ``s(u) + s(-u)``.
    """
    if num_directions < 1:
        raise GeometryError("num_directions must be >= 1")
    r = P.degenerate_rank
    if r == 0:
        return IntrinsicVolumeEstimate(1, 0.0, 0.0, Method.EXACT)
    if r == 1:
        body = _intrinsic_body(P)
        return IntrinsicVolumeEstimate(1, volume(body), 0.0, Method.EXACT)
    if r == 2:
        return IntrinsicVolumeEstimate(1, surface_area_half(_intrinsic_body(P)), 0.0, Method.EXACT)
    d = P.dim
    u = _sphere_directions(d, num_directions, stream_from(rng_seed, 1))
    widths = support_values(P, u) + support_values(P, -u)
    factor = d * kappa(d) / (2 * kappa(d - 1))
    se = factor * float(np.std(widths, ddof=1)) / math.sqrt(widths.size) if widths.size > 1 else math.inf
    return IntrinsicVolumeEstimate(1, factor * float(widths.mean()), se, Method.SPHERE)


def steiner_point(P: Polytope, num_directions: int = 4096, rng_seed=0) -> PointEstimate:
    """Steiner point ``(1/kappa_d) int s_P(u) u sigma(du)``.

    Exact for bodies of rank at most 2 (vertex-weighted external angles).
    Otherwise Monte Carlo: ``p = c + d * E[s_{P-c}(u) u]`` with ``c`` the
    vertex centroid and antithetic directions.
    """
    if num_directions < 1:
        raise GeometryError("num_directions must be >= 1")
    r, d = P.degenerate_rank, P.dim
    zero = np.zeros(d)
    if r == 0:
        return PointEstimate(P.vertices[0].copy(), zero, Method.EXACT)
    if r <= 2:
        body = _intrinsic_body(P)
        local = body.vertices.mean(axis=0) if r == 1 else _polygon_steiner(body)
        point = local if P.full_dimensional else _lift(P, local)
        return PointEstimate(np.asarray(point, dtype=float), zero, Method.EXACT)
    c = P.vertices.mean(axis=0)
    u = _sphere_directions(d, num_directions, stream_from(rng_seed, 2))
    shifted = Polytope(d, P.vertices - c, r)
    diff = support_values(shifted, u) - support_values(shifted, -u)
    samples = 0.5 * d * diff[:, None] * u
    se = np.std(samples, axis=0, ddof=1) / math.sqrt(len(u)) if len(u) > 1 else np.full(d, math.inf)
    return PointEstimate(c + samples.mean(axis=0), se, Method.SPHERE)


# ---------------------------------------------------------------------------
# Kubota, boxes, dispatcher


def haar_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of SO(d)."""
    z = rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def _projected_volume(points: np.ndarray) -> float:
    if points.shape[1] == 1:
        return float(np.ptp(points[:, 0]))
    if points.shape[0] <= points.shape[1]:
        return 0.0
    try:
        return float(ConvexHull(points).volume)
    except QhullError:
        return 0.0


def kubota_Vm(P: Polytope, m: int, num_rotations: int = 1024, rng_seed=0) -> IntrinsicVolumeEstimate:
    """``V_m`` as the rotation average of m-dimensional projection volumes."""
    d = P.dim
    if not 1 <= m <= d:
        raise GeometryError(f"m must lie in 1..{d}")
    if m == d:
        return IntrinsicVolumeEstimate(m, volume(P), 0.0, Method.EXACT)
    if num_rotations < 1:
        raise GeometryError("num_rotations must be >= 1")
    rng = stream_from(rng_seed, 3)
    vols = np.empty(num_rotations)
    for i in range(num_rotations):
        q = haar_rotation(d, rng)
        vols[i] = _projected_volume(P.vertices @ q[:m].T)
    factor = math.comb(d, m) * kappa(d) / (kappa(m) * kappa(d - m))
    se = factor * float(np.std(vols, ddof=1)) / math.sqrt(num_rotations) if num_rotations > 1 else math.inf
    return IntrinsicVolumeEstimate(m, factor * float(vols.mean()), se, Method.KUBOTA)


def box_intrinsic_volumes(side_lengths) -> list[float]:
    """``V_0..V_d`` of a box: the elementary symmetric polynomials of its sides."""
    sides = [float(s) for s in side_lengths]
    if any(s < 0 for s in sides):
        raise GeometryError("side lengths must be nonnegative")
    coeffs = [1.0]
    for s in sides:
        # multiply the polynomial by (1 + s w)
        coeffs = [a + s * b for a, b in zip(coeffs + [0.0], [0.0] + coeffs)]
    return coeffs


def intrinsic_volume(
    P: Polytope,
    m: int,
    num_directions: int = 4096,
    num_rotations: int = 1024,
    rng_seed=0,
    method: str = "auto",
) -> IntrinsicVolumeEstimate:
    """``V_m(P)`` by the most accurate available route.

    Exact for ``m in {0, 1, r-1, r}`` whenever the intrinsic rank ``r`` is at
    most 3 (and for ``m in {0, r-1, r}`` in any dimension).  Everything else
    falls back to sphere Monte Carlo (``m = 1``) or Kubota projections.
    ``method="kubota"`` forces the Kubota route for ``1 <= m < d``.
    """
    d, r = P.dim, P.degenerate_rank
    if not 0 <= m <= d:
        raise GeometryError(f"m must lie in 0..{d}")
    if method not in ("auto", "kubota"):
        raise GeometryError(f"unknown method {method!r}")
    if m == 0:
        return IntrinsicVolumeEstimate(0, 1.0, 0.0, Method.EXACT)
    if method == "kubota" and m < d:
        return kubota_Vm(P, m, num_rotations, rng_seed)
    if m > r:
        return IntrinsicVolumeEstimate(m, 0.0, 0.0, Method.EXACT)
    body = _intrinsic_body(P)
    if m == r:
        return IntrinsicVolumeEstimate(m, volume(body), 0.0, Method.EXACT)
    if m == r - 1:
        return IntrinsicVolumeEstimate(m, surface_area_half(body), 0.0, Method.EXACT)
    if m == 1 and r == 3:
        return IntrinsicVolumeEstimate(1, _edge_external_V1(body), 0.0, Method.EXACT)
    if m == 1:
        return mean_width_and_V1(body, num_directions, rng_seed)
    return kubota_Vm(body, m, num_rotations, rng_seed)


def intrinsic_volumes(P: Polytope, **kwargs) -> list[IntrinsicVolumeEstimate]:
    return [intrinsic_volume(P, m, **kwargs) for m in range(P.dim + 1)]


# ---------------------------------------------------------------------------
# distances


def _min_norm_point(Y: np.ndarray, tol: float = DIST_TOL, max_iter: int = 10_000) -> np.ndarray:
    """Minimum-norm point of conv(rows of Y) by Wolfe's algorithm.

    Each major cycle adds the support point minimising ``<x, y>``; minor
    cycles project onto the affine hull of the active set and step back into
    the simplex when that projection leaves it.
    """
    norms = np.einsum("ij,ij->i", Y, Y)
    active = [int(np.argmin(norms))]
    lam = np.array([1.0])
    x = Y[active[0]].copy()
    scale = math.sqrt(float(norms.max())) or 1.0
    for _ in range(max_iter):
        xx = float(x @ x)
        proj = Y @ x
        j = int(np.argmin(proj))
        gap = xx - float(proj[j])
        if gap <= tol * max(math.sqrt(xx), tol * scale) or j in active:
            break
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            S = Y[active]
            k = len(active)
            A = np.zeros((k + 1, k + 1))
            A[:k, :k] = S @ S.T
            A[:k, k] = A[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            mu = np.linalg.lstsq(A, rhs, rcond=None)[0][:k]
            if np.all(mu > 1e-14):
                lam = mu
                break
            neg = mu <= 1e-14
            theta = float(np.min(lam[neg] / (lam[neg] - mu[neg])))
            lam = theta * mu + (1 - theta) * lam
            keep = lam > 1e-14
            active = [a for a, kk in zip(active, keep) if kk]
            lam = lam[keep]
            if len(active) == 1:
                lam = np.array([1.0])
                break
        lam = lam / lam.sum()
        x = lam @ Y[active]
    return x


def distance_to_polytope(x, P: Polytope) -> float:
    """Euclidean distance from a point to ``P`` (0 inside), to 1e-9."""
    x = np.asarray(x, dtype=float)
    if P.full_dimensional and P.normals is not None and bool(P.contains(x)):
        return 0.0
    return float(np.linalg.norm(_min_norm_point(P.vertices - x)))


def hausdorff_distance(P: Polytope, Q: Polytope) -> float:
    """Hausdorff distance between two polytopes.

    The distance to a convex set is convex, so each one-sided supremum is
    attained at a vertex.
    """
    if P.dim != Q.dim:
        raise GeometryError("dimension mismatch")

    def one_sided(A: Polytope, B: Polytope) -> float:
        pts = A.vertices
        if B.full_dimensional and B.normals is not None:
            pts = pts[~B.contains(pts)]
        return max((distance_to_polytope(v, B) for v in pts), default=0.0)

    return max(one_sided(P, Q), one_sided(Q, P))


def hausdorff_points(X, Y) -> float:
    """Hausdorff distance between two finite point sets (brute force)."""
    from scipy.spatial.distance import cdist

    D = cdist(_as_points(X), _as_points(Y))
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def _segment_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Min distance from each point to a family of segments [a_i, b_i]."""
    out = np.full(pts.shape[0], np.inf)
    ab = b - a
    ll = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    step = max(1, 2_000_000 // max(1, a.shape[0]))
    for lo in range(0, pts.shape[0], step):
        p = pts[lo:lo + step, None, :] - a[None]
        t = np.clip(np.einsum("nkj,kj->nk", p, ab) / ll, 0.0, 1.0)
        r = p - t[..., None] * ab
        out[lo:lo + step] = np.sqrt(np.min(np.einsum("nkj,nkj->nk", r, r), axis=1))
    return out


def _triangle_face_distances(pts: np.ndarray, P: Polytope) -> np.ndarray:
    """Distance to the facet planes, only where the projection hits the triangle."""
    tri = P.vertices[P.simplices]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    e0, e1 = b - a, c - a
    d00 = np.einsum("ij,ij->i", e0, e0)
    d01 = np.einsum("ij,ij->i", e0, e1)
    d11 = np.einsum("ij,ij->i", e1, e1)
    denom = d00 * d11 - d01 * d01
    out = np.full(pts.shape[0], np.inf)
    step = max(1, 2_000_000 // max(1, tri.shape[0]))
    for lo in range(0, pts.shape[0], step):
        p = pts[lo:lo + step]
        h = p @ P.normals.T - P.offsets  # signed height above each facet plane
        q = p[:, None, :] - h[..., None] * P.normals[None] - a[None]
        d20 = np.einsum("nkj,kj->nk", q, e0)
        d21 = np.einsum("nkj,kj->nk", q, e1)
        v = (d11 * d20 - d01 * d21) / denom
        w = (d00 * d21 - d01 * d20) / denom
        inside = (v >= 0) & (w >= 0) & (v + w <= 1)
        dist = np.where(inside, np.abs(h), np.inf)
        out[lo:lo + step] = dist.min(axis=1)
    return out


def distances_to_polytope(points, P: Polytope) -> np.ndarray:
    """Vectorised distance from many points to ``P``.

    Closed forms for bodies of intrinsic rank at most 3; higher ranks fall
    back to the per-point iterative projection.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if not P.full_dimensional:
        if P.degenerate_rank == 0:
            return np.linalg.norm(pts - P.vertices[0], axis=1)
        rel = pts - P.frame_origin
        local = rel @ P.frame_basis.T
        off = rel - local @ P.frame_basis
        return np.hypot(np.linalg.norm(off, axis=1), distances_to_polytope(local, P.local))
    if P.dim == 1:
        lo, hi = P.vertices[:, 0].min(), P.vertices[:, 0].max()
        x = pts[:, 0]
        return np.maximum(0.0, np.maximum(lo - x, x - hi))
    out = np.zeros(pts.shape[0])
    outside = ~P.contains(pts, tol=0.0)
    q = pts[outside]
    if q.size == 0:
        return out
    if P.dim == 2:
        s = P.simplices
        out[outside] = _segment_distances(q, P.vertices[s[:, 0]], P.vertices[s[:, 1]])
    elif P.dim == 3:
        s = P.simplices
        edges = np.unique(np.sort(np.concatenate([s[:, [0, 1]], s[:, [1, 2]], s[:, [0, 2]]]), axis=1), axis=0)
        seg = _segment_distances(q, P.vertices[edges[:, 0]], P.vertices[edges[:, 1]])
        out[outside] = np.minimum(seg, _triangle_face_distances(q, P))
    else:
        out[outside] = [float(np.linalg.norm(_min_norm_point(P.vertices - x))) for x in q]
    return out


# ---------------------------------------------------------------------------
# Steiner polynomial


class SteinerCheck(NamedTuple):
    lhs: float
    rhs: float
    lhs_std_error: float


def steiner_polynomial_check(
    P: Polytope, rho: float, mc_points: int = 1_000_000, rng_seed=0, chunk: int = 200_000
) -> SteinerCheck:
    """Compare ``Vol(P + rho B)`` by rejection sampling with the Steiner polynomial.

    The right-hand side uses ``intrinsic_volume`` (exact for d <= 3).  At
    ``rho = 0`` the parallel body is ``P`` itself and the exact volume is
    returned on both sides.
    """
    if rho < 0:
        raise GeometryError("rho must be nonnegative")
    d = P.dim
    vms = [intrinsic_volume(P, m, rng_seed=rng_seed).value for m in range(d + 1)]
    rhs = sum(rho ** (d - m) * kappa(d - m) * vms[m] for m in range(d + 1))
    if rho == 0:
        return SteinerCheck(vms[d], rhs, 0.0)
    lo = P.vertices.min(axis=0) - rho
    hi = P.vertices.max(axis=0) + rho
    box = float(np.prod(hi - lo))
    rng = stream_from(rng_seed, 4)
    hits = 0
    done = 0
    while done < mc_points:
        k = min(chunk, mc_points - done)
        x = lo + (hi - lo) * rng.random((k, d))
        hits += int(np.count_nonzero(distances_to_polytope(x, P) <= rho))
        done += k
    frac = hits / mc_points
    se = box * math.sqrt(frac * (1 - frac) / mc_points)
    return SteinerCheck(box * frac, rhs, se)


# ---------------------------------------------------------------------------
# text serialisation


def dumps_polytope(P: Polytope) -> str:
    lines = [f"{P.dim} {len(P.vertices)}"]
    lines += [" ".join(repr(float(c)) for c in v) for v in P.vertices]
    return "\n".join(lines) + "\n"


def loads_polytope(text: str) -> Polytope:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise GeometryError("bad polytope header")
    d, k = int(rows[0][0]), int(rows[0][1])
    if len(rows) - 1 != k or any(len(r) != d for r in rows[1:]):
        raise GeometryError("vertex count or dimension does not match header")
    return convex_hull(np.array(rows[1:], dtype=float))
