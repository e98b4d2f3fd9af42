"""Planar geometry of the annular domain.

The domain is the region between two nested strictly convex closed curves.
Curves are represented as counterclockwise piecewise-linear polylines sampled
from parametric generators (circle, ellipse, explicit vertex list), so every
geometric predicate reduces to exact arithmetic on segments.  Arclength is the
canonical boundary coordinate: boundary data, measures and arcs are all
addressed by it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

EPS_GEOM = 1e-9

_ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


class GeometryError(ValueError):
    pass


class PointOutsideDomain(GeometryError):
    """A query point lies outside the closed annulus beyond tolerance."""


def rotate90(vectors):
    """Rotate vectors by +90 degrees: (x, y) -> (-y, x)."""
    v = np.asarray(vectors, dtype=float)
    return v @ _ROT90.T


@dataclass(frozen=True)
class ConvexBoundary:
    """Closed strictly convex polyline, counterclockwise, first vertex not repeated.

    Carries the cumulative arclength table, outward edge/vertex normals and the
    half-plane representation n . x <= d of the enclosed convex region.  The
    `fuzz` attribute bounds the sagitta between the polyline and the smooth
    curve it samples; containment tests against the ideal curve must allow it.
    """

    vertices: np.ndarray
    orientation: str  # "outer" | "inner"
    cumulative: np.ndarray = field(init=False, repr=False)
    edge_normals: np.ndarray = field(init=False, repr=False)
    vertex_normals: np.ndarray = field(init=False, repr=False)
    halfplane_offsets: np.ndarray = field(init=False, repr=False)
    fuzz: float = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise GeometryError("vertices must be an (N, 2) array")
        n = len(pts)
        if n < 16:
            raise GeometryError(f"need at least 16 vertices, got {n}")
        edges = np.roll(pts, -1, axis=0) - pts
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        if np.any(lengths <= 0):
            raise GeometryError("repeated consecutive vertices")
        cross = edges[:, 0] * np.roll(edges[:, 1], -1) - edges[:, 1] * np.roll(edges[:, 0], -1)
        if np.any(cross <= EPS_GEOM):
            k = int(np.argmin(cross))
            raise GeometryError(
                f"not strictly convex (counterclockwise) at vertex {k + 1}: cross={cross[k]:.3e}"
            )
        object.__setattr__(self, "vertices", pts)
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        object.__setattr__(self, "cumulative", cum)
        enorm = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]
        object.__setattr__(self, "edge_normals", enorm)
        vnorm = enorm + np.roll(enorm, 1, axis=0)
        vnorm /= np.hypot(vnorm[:, 0], vnorm[:, 1])[:, None]
        object.__setattr__(self, "vertex_normals", vnorm)
        object.__setattr__(self, "halfplane_offsets", np.einsum("ij,ij->i", enorm, pts))
        turn = np.arccos(np.clip(np.einsum("ij,ij->i", enorm, np.roll(enorm, -1, axis=0)), -1, 1))
        sagitta = lengths * np.maximum(turn, np.roll(turn, 1))
        object.__setattr__(self, "fuzz", float(np.max(sagitta)) + EPS_GEOM)

    # -- constructors ------------------------------------------------------

    @classmethod
    def circle(cls, center, radius, n, orientation, phase=0.0):
        t = phase + 2 * np.pi * np.arange(n) / n
        pts = np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])
        return cls(pts, orientation)

    @classmethod
    def ellipse(cls, center, radii, n, orientation, phase=0.0):
        t = phase + 2 * np.pi * np.arange(n) / n
        pts = np.column_stack([center[0] + radii[0] * np.cos(t), center[1] + radii[1] * np.sin(t)])
        return cls(pts, orientation)

    @classmethod
    def polygon(cls, points, orientation):
        return cls(np.asarray(points, dtype=float), orientation)

    # -- arclength parameterization ---------------------------------------

    @property
    def perimeter(self) -> float:
        return float(self.cumulative[-1])

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def wrap(self, s):
        return np.mod(s, self.perimeter)

    def point_at(self, s):
        """Point on the polyline at arclength ``s`` (wrapped mod perimeter)."""
        s = self.wrap(np.asarray(s, dtype=float))
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        k = np.searchsorted(self.cumulative, s, side="right") - 1
        k = np.clip(k, 0, self.n_vertices - 1)
        t = (s - self.cumulative[k]) / (self.cumulative[k + 1] - self.cumulative[k])
        nxt = (k + 1) % self.n_vertices
        p = self.vertices[k] * (1 - t)[:, None] + self.vertices[nxt] * t[:, None]
        return p[0] if scalar else p

    def edge_index_at(self, s):
        s = self.wrap(np.asarray(s, dtype=float))
        k = np.searchsorted(self.cumulative, np.atleast_1d(s), side="right") - 1
        return np.clip(k, 0, self.n_vertices - 1)

    def outward_normal(self, s):
        """Unit normal pointing away from the enclosed region.

        On edge interiors this is the edge normal; exactly at vertices it is
        the angle-bisector normal of the two incident edges.
        """
        s = float(self.wrap(s))
        k = int(self.edge_index_at(s)[0])
        if abs(s - self.cumulative[k]) <= EPS_GEOM:
            return self.vertex_normals[k].copy()
        if abs(s - self.cumulative[k + 1]) <= EPS_GEOM:
            return self.vertex_normals[(k + 1) % self.n_vertices].copy()
        return self.edge_normals[k].copy()

    def vertex_s(self, i):
        return float(self.cumulative[i % self.n_vertices])

    # -- containment -------------------------------------------------------

    def signed_gap(self, points):
        """max_e (n_e . x - d_e): negative inside, ~0 on the curve, positive outside."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.full(len(p), -np.inf)
        for lo in range(0, self.n_vertices, 1024):
            hi = min(lo + 1024, self.n_vertices)
            g = p @ self.edge_normals[lo:hi].T - self.halfplane_offsets[lo:hi]
            out = np.maximum(out, g.max(axis=1))
        return out

    def contains(self, points, tol=0.0):
        return self.signed_gap(points) <= tol

    def interior_distance(self, points):
        """Distance to the polyline for points inside (clipped at 0 outside)."""
        return np.maximum(-self.signed_gap(points), 0.0)


def _segment_hits_interior(boundary: ConvexBoundary, p, q, tol):
    """True where segment [p, q] meets the open region enclosed by `boundary`.

    Clips each segment against the half-planes; a crossing requires a parameter
    interval of strictly interior points (touching the curve does not count).
    """
    P = np.atleast_2d(np.asarray(p, dtype=float))
    Q = np.atleast_2d(np.asarray(q, dtype=float))
    t0 = np.zeros(len(P))
    t1 = np.ones(len(P))
    alive = np.ones(len(P), dtype=bool)
    N = boundary.edge_normals
    d = boundary.halfplane_offsets
    for lo in range(0, boundary.n_vertices, 512):
        hi = min(lo + 512, boundary.n_vertices)
        a = P @ N[lo:hi].T - d[lo:hi]          # constraint value at p
        b = Q @ N[lo:hi].T - d[lo:hi]          # constraint value at q
        alive &= ~np.any((a > tol) & (b > tol), axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            tcross = a / (a - b)
        enter = np.where(a > 0, np.where(b < a, tcross, np.inf), 0.0)
        leave = np.where(b > 0, np.where(a < b, tcross, -np.inf), 1.0)
        t0 = np.maximum(t0, np.where(alive, enter.max(axis=1, initial=0.0), 0.0))
        t1 = np.minimum(t1, np.where(alive, leave.min(axis=1, initial=1.0), 1.0))
        alive &= t0 < t1
        if not alive.any():
            break
    if not alive.any():
        return np.zeros(len(P), dtype=bool)
    mid = P + 0.5 * (t0 + t1)[:, None] * (Q - P)
    strict = boundary.signed_gap(mid) < -tol
    return alive & strict


@dataclass(frozen=True)
class Annulus:
    """Region between a strictly convex outer curve and a nested inner curve."""

    outer: ConvexBoundary
    inner: ConvexBoundary
    clearance: float = field(init=False)

    def __post_init__(self):
        gap = self.outer.signed_gap(self.inner.vertices)
        if np.any(gap >= -EPS_GEOM):
            raise GeometryError("inner curve is not strictly inside the outer curve")
        d_in = self.outer.interior_distance(self.inner.vertices).min()
        d_out = np.maximum(self.inner.signed_gap(self.outer.vertices), 0.0).min()
        clearance = float(min(d_in, d_out))
        if clearance <= 0:
            raise GeometryError("curves touch: clearance must be positive")
        object.__setattr__(self, "clearance", clearance)

    @property
    def contain_tol(self) -> float:
        return EPS_GEOM + max(self.outer.fuzz, self.inner.fuzz)

    def boundary(self, component: str) -> ConvexBoundary:
        if component == "outer":
            return self.outer
        if component == "inner":
            return self.inner
        raise ValueError(f"unknown component {component!r}")

    def contains(self, points, tol=None):
        """True where a point lies in the closed annulus (tolerance covers sampling fuzz)."""
        tol = self.contain_tol if tol is None else tol
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return (self.outer.signed_gap(p) <= tol) & (self.inner.signed_gap(p) >= -tol)

    def require_inside(self, point, name="point"):
        if not bool(self.contains(point)[0]):
            raise PointOutsideDomain(f"{name} {tuple(np.asarray(point, float))} is outside the closed annulus")

    def segments_avoid_hole(self, p, q, tol=None):
        """Vectorized: True where segments [p_k, q_k] do not enter the open inner region."""
        tol = self.contain_tol if tol is None else tol
        return ~_segment_hits_interior(self.inner, p, q, tol)


def segment_in_closure(annulus: Annulus, p, q) -> bool:
    """Whether the closed segment [p, q] stays inside the closed annulus.

    Convexity of the outer curve makes the outer containment equivalent to
    endpoint containment; the segment must additionally avoid the open inner
    region (tangency to the inner curve counts as inside).
    """
    annulus.require_inside(p, "p")
    annulus.require_inside(q, "q")
    return bool(annulus.segments_avoid_hole(np.asarray(p)[None, :], np.asarray(q)[None, :])[0])


@dataclass(frozen=True)
class BoundaryArc:
    """Arc of one boundary component: arclength interval [s_start, s_start + length]."""

    boundary: ConvexBoundary
    s_start: float
    length: float

    def __post_init__(self):
        if self.length < 0 or self.length > self.boundary.perimeter + EPS_GEOM:
            raise GeometryError(f"invalid arc length {self.length}")
        object.__setattr__(self, "s_start", float(self.boundary.wrap(self.s_start)))

    @classmethod
    def from_endpoints(cls, boundary, s0, s1):
        length = float(np.mod(s1 - s0, boundary.perimeter))
        return cls(boundary, s0, length)

    @classmethod
    def full(cls, boundary):
        return cls(boundary, 0.0, boundary.perimeter)

    @property
    def s_end(self) -> float:
        return self.s_start + self.length

    @property
    def is_point(self) -> bool:
        return self.length <= 0.0

    def contains_s(self, s, tol=EPS_GEOM):
        rel = np.mod(np.asarray(s, dtype=float) - self.s_start, self.boundary.perimeter)
        return (rel <= self.length + tol) | (rel >= self.boundary.perimeter - tol)

    def sample_s(self, max_n: Optional[int] = None) -> np.ndarray:
        """Arclengths of polyline vertices in the arc plus both endpoints."""
        if self.is_point:
            return np.array([self.s_start])
        cum = self.boundary.cumulative[:-1]
        rel = np.mod(cum - self.s_start, self.boundary.perimeter)
        inside = np.sort(rel[rel < self.length])
        if max_n is not None and len(inside) > max_n:
            idx = np.unique(np.linspace(0, len(inside) - 1, max_n).round().astype(int))
            inside = inside[idx]
        rels = np.unique(np.concatenate([[0.0], inside, [self.length]]))
        return self.boundary.wrap(self.s_start + rels)

    def sample_points(self, max_n: Optional[int] = None) -> np.ndarray:
        return np.atleast_2d(self.boundary.point_at(self.sample_s(max_n)))


# -- arc-to-arc distances ---------------------------------------------------


def _arc_segments(arc: BoundaryArc):
    s = arc.sample_s()
    pts = np.atleast_2d(arc.boundary.point_at(s))
    if len(pts) == 1:
        return pts, pts
    return pts[:-1], pts[1:]


def arc_max_distance(a: BoundaryArc, b: BoundaryArc) -> float:
    """Maximal distance between two arcs, over sampled vertices and endpoints."""
    pa = a.sample_points()
    pb = b.sample_points()
    best = 0.0
    for lo in range(0, len(pa), 512):
        d = np.linalg.norm(pa[lo:lo + 512, None, :] - pb[None, :, :], axis=2)
        best = max(best, float(d.max()))
    return best


def _point_segment_distance(P, A, B):
    """Distances from points P[k] to segments A[k]-B[k], elementwise."""
    AB = B - A
    denom = np.einsum("ij,ij->i", AB, AB)
    t = np.zeros(len(P))
    nz = denom > 0
    t[nz] = np.einsum("ij,ij->i", P[nz] - A[nz], AB[nz]) / denom[nz]
    t = np.clip(t, 0.0, 1.0)
    proj = A + t[:, None] * AB
    return np.linalg.norm(P - proj, axis=1)


def _segments_cross(A, B, C, D):
    def orient(P, Q, R):
        return (Q[:, 0] - P[:, 0]) * (R[:, 1] - P[:, 1]) - (Q[:, 1] - P[:, 1]) * (R[:, 0] - P[:, 0])

    o1, o2 = orient(A, B, C), orient(A, B, D)
    o3, o4 = orient(C, D, A), orient(C, D, B)
    return (o1 * o2 < 0) & (o3 * o4 < 0)


def _segment_pair_distance(A, B, C, D):
    d = np.minimum.reduce([
        _point_segment_distance(A, C, D),
        _point_segment_distance(B, C, D),
        _point_segment_distance(C, A, B),
        _point_segment_distance(D, A, B),
    ])
    d[_segments_cross(A, B, C, D)] = 0.0
    return d


def arc_min_distance(a: BoundaryArc, b: BoundaryArc) -> float:
    """Minimal distance between two arcs: exact segment-to-segment over the polylines.

    A midpoint-distance prefilter selects candidate segment pairs; since the
    exact pair distance differs from the midpoint distance by at most half the
    two segment lengths, restricting the exact computation to candidates within
    that slack of the midpoint minimum loses nothing.
    """
    a0, a1 = _arc_segments(a)
    b0, b1 = _arc_segments(b)
    ma = 0.5 * (a0 + a1)
    mb = 0.5 * (b0 + b1)
    ea = np.linalg.norm(a1 - a0, axis=1).max()
    eb = np.linalg.norm(b1 - b0, axis=1).max()
    best_mid = np.inf
    cand_i = []
    cand_j = []
    chunk = max(1, 4_000_000 // max(len(mb), 1))
    slack = ea + eb
    for lo in range(0, len(ma), chunk):
        d = np.linalg.norm(ma[lo:lo + chunk, None, :] - mb[None, :, :], axis=2)
        best_mid = min(best_mid, float(d.min()))
        ii, jj = np.nonzero(d <= best_mid + slack)
        cand_i.append(ii + lo)
        cand_j.append(jj)
    ii = np.concatenate(cand_i)
    jj = np.concatenate(cand_j)
    mid_d = np.linalg.norm(ma[ii] - mb[jj], axis=1)
    keep = mid_d <= best_mid + slack
    ii, jj = ii[keep], jj[keep]
    exact = _segment_pair_distance(a0[ii], a1[ii], b0[jj], b1[jj])
    return float(exact.min())


def family_max_distance(fam_a: Iterable[BoundaryArc], fam_b: Iterable[BoundaryArc]) -> float:
    """Max distance between two families of arcs; empty families give -inf."""
    fam_a, fam_b = list(fam_a), list(fam_b)
    if not fam_a or not fam_b:
        return -np.inf
    return max(arc_max_distance(a, b) for a in fam_a for b in fam_b)


def family_min_distance(fam_a: Iterable[BoundaryArc], fam_b: Iterable[BoundaryArc]) -> float:
    """Min distance between two families of arcs; empty families give +inf."""
    fam_a, fam_b = list(fam_a), list(fam_b)
    if not fam_a or not fam_b:
        return np.inf
    return min(arc_min_distance(a, b) for a in fam_a for b in fam_b)
