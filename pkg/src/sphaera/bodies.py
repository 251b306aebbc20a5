"""Spherical convex bodies: geodesic polygons and circle-arc bodies.

Both body types expose one boundary parametrization: a cyclic list of
*pieces*, each a circular arc ``x(t) = cos(r) c + sin(r) (u cos t + v sin t)``
about a center c with spherical radius r and sweep range ``t in [0, sweep]``.
Geodesic edges are the special case r = pi/2 (the center is the edge's
supporting-hemisphere pole).  All farthest-point / support queries below
reduce to closed-form extremes of ``q . x(t)`` per piece, so they are exact
up to floating point and vectorize over query points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull as _QHull
from scipy.spatial import QhullError

from .errors import Degenerate, EmptyInterior, NoHemisphere, NotOnBoundary, NotSupporting
from .report import CheckReport
from .sphere import (
    EPS_INCIDENCE,
    EPS_UNIT,
    GeodesicArc,
    SpherePoint,
    _as_unit,
    _vec,
    geodesic_distance,
)

HALF_PI = math.pi / 2


class BoundaryKind(enum.Enum):
    SMOOTH = "smooth"
    ACUTE = "acute"


@dataclass(frozen=True)
class BoundaryPoint:
    """A point on a body boundary with its locus: piece index and the
    angle parameter along that piece."""

    point: SpherePoint
    piece: int
    param: float


@dataclass(frozen=True)
class NormalCone:
    """Supporting-hemisphere centers at a boundary point.

    `centers` is a single SpherePoint at a smooth point, or the geodesic
    arc of centers between the two adjacent pieces' normals at an acute
    vertex.  Every center k satisfies dist(k, at.point) = pi/2 and
    H(k) contains the body.
    """

    at: BoundaryPoint
    centers: SpherePoint | GeodesicArc


class _Pieces:
    """Vectorized arc-piece arrays for one body (internal)."""

    def __init__(self, centers, radii, starts, ends, full_circle=False):
        m = len(radii)
        self.centers = np.asarray(centers, dtype=float).reshape(m, 3)
        self.radii = np.asarray(radii, dtype=float)
        self.starts = np.asarray(starts, dtype=float).reshape(m, 3)
        self.ends = np.asarray(ends, dtype=float).reshape(m, 3)
        cr = np.cos(self.radii)[:, None]
        sr = np.sin(self.radii)[:, None]
        u = self.starts - cr * self.centers
        nu = np.linalg.norm(u, axis=1, keepdims=True)
        if np.any(nu < EPS_UNIT):
            raise ValueError("arc start coincides with its circle's pole")
        self.u = u / nu
        self.v = np.cross(self.centers, self.u)
        w = self.ends - cr * self.centers
        sweep = np.arctan2(
            np.einsum("ij,ij->i", w, self.v), np.einsum("ij,ij->i", w, self.u)
        ) % (2 * math.pi)
        closed = np.linalg.norm(self.starts - self.ends, axis=1) < 1e-12
        sweep[closed] = 2 * math.pi
        if full_circle and m == 1:
            sweep[:] = 2 * math.pi
        self.sweep = sweep
        self.base = cr * self.centers
        self.us = sr * self.u
        self.vs = sr * self.v
        self.lengths = self.sweep * np.sin(self.radii)
        self.m = m

    def point_at(self, j: int, t: float) -> np.ndarray:
        return self.base[j] + self.us[j] * math.cos(t) + self.vs[j] * math.sin(t)

    def points_at(self, j, t) -> np.ndarray:
        j = np.asarray(j)
        t = np.asarray(t, dtype=float)
        return (
            self.base[j]
            + self.us[j] * np.cos(t)[:, None]
            + self.vs[j] * np.sin(t)[:, None]
        )

    def tangent_at(self, j: int, t: float) -> np.ndarray:
        d = -self.us[j] * math.sin(t) + self.vs[j] * math.cos(t)
        return d / np.linalg.norm(d)

    def normal_at(self, j: int, p) -> np.ndarray:
        """Center of the supporting hemisphere along piece j at point p."""
        c = self.centers[j]
        n = c - math.cos(self.radii[j]) * p
        return n / np.linalg.norm(n)

    def min_dot(self, Q):
        """Minimum of q . x over the whole boundary for each row q of Q.

        Returns (values, piece_index, param); all shape (N,).  This is the
        single kernel behind support margins, touch points and farthest
        boundary points (farthest distance = arccos(min dot)).
        """
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        A = Q @ self.base.T
        a = Q @ self.us.T
        b = Q @ self.vs.T
        R = np.hypot(a, b)
        phi0 = np.arctan2(b, a) % (2 * math.pi)
        phi_low = (phi0 + math.pi) % (2 * math.pi)
        reach = phi_low <= self.sweep[None, :]
        v_int = np.where(reach, A - R, np.inf)
        v_start = A + a
        v_end = A + a * np.cos(self.sweep)[None, :] + b * np.sin(self.sweep)[None, :]
        stack = np.stack([v_start, v_end, v_int])
        which = np.argmin(stack, axis=0)
        vals = np.take_along_axis(stack, which[None], axis=0)[0]
        j = np.argmin(vals, axis=1)
        rows = np.arange(Q.shape[0])
        best = vals[rows, j]
        sel = which[rows, j]
        t = np.where(
            sel == 0, 0.0, np.where(sel == 1, self.sweep[j], phi_low[rows, j])
        )
        return best, j, t


def _piece_arrays(body) -> _Pieces:
    cached = getattr(body, "_pieces_cache", None)
    if cached is None:
        cached = body._build_pieces()
        object.__setattr__(body, "_pieces_cache", cached)
    return cached


def _hemisphere_witness(points: np.ndarray) -> np.ndarray | None:
    """A direction w with p . w > 0 for every row p, or None."""
    c = points.sum(axis=0)
    n = np.linalg.norm(c)
    if n > EPS_UNIT:
        c = c / n
        if np.min(points @ c) > EPS_UNIT:
            return c
    from scipy.optimize import linprog

    res = linprog(
        np.zeros(3),
        A_ub=-points,
        b_ub=-np.ones(len(points)),
        bounds=[(None, None)] * 3,
        method="highs",
    )
    if not res.success:
        return None
    return res.x / np.linalg.norm(res.x)


@dataclass(frozen=True)
class SpherePolygon:
    """Convex geodesic polygon inside an open hemisphere.

    Vertices are ordered counterclockwise as seen from outside the sphere
    (positive orientation about the interior), so the supporting center of
    edge i is normalize(v_i x v_{i+1}) and the body lies in H of it.
    """

    vertices: tuple[SpherePoint, ...]

    def __init__(self, vertices):
        vs = tuple(
            v if isinstance(v, SpherePoint) else SpherePoint.from_vec(v)
            for v in vertices
        )
        object.__setattr__(self, "vertices", vs)
        self._validate()

    def _validate(self):
        n = len(self.vertices)
        if n < 3:
            raise ValueError("polygon needs at least 3 vertices")
        V = self.vertex_array
        for i in range(n):
            if geodesic_distance(V[i], V[(i + 1) % n]) <= 1e-12:
                raise ValueError("consecutive vertices coincide (vertex %d)" % i)
        if _hemisphere_witness(V) is None:
            raise NoHemisphere("vertices are not contained in an open hemisphere")
        normals = self._edge_normals(V)
        if np.min(V @ normals.T) < -EPS_UNIT:
            raise ValueError(
                "vertices are not in counterclockwise convex position"
            )

    @staticmethod
    def _edge_normals(V: np.ndarray) -> np.ndarray:
        nx = np.cross(V, np.roll(V, -1, axis=0))
        norms = np.linalg.norm(nx, axis=1, keepdims=True)
        return nx / norms

    @property
    def vertex_array(self) -> np.ndarray:
        return np.array([v.vec for v in self.vertices])

    @property
    def edge_normals(self) -> np.ndarray:
        return self._edge_normals(self.vertex_array)

    def _build_pieces(self) -> _Pieces:
        V = self.vertex_array
        normals = self._edge_normals(V)
        radii = np.full(len(V), HALF_PI)
        return _Pieces(normals, radii, V, np.roll(V, -1, axis=0))

    def contains(self, p, eps: float = EPS_INCIDENCE) -> bool:
        """p lies in the closed polygon: inside every edge's supporting
        hemisphere."""
        return bool(np.min(self.edge_normals @ _vec(p)) >= -eps)

    def boundary_sample(self, n: int):
        return boundary_sample(self, n)


@dataclass(frozen=True)
class CircleArc:
    """Piece of the circle of spherical radius `radius` about `center`,
    traversed counterclockwise (as seen from outside, above the center)
    from `start` to `end`.  start == end means the full circle."""

    center: SpherePoint
    radius: float
    start: SpherePoint
    end: SpherePoint

    def __init__(self, center, radius, start, end):
        object.__setattr__(
            self,
            "center",
            center if isinstance(center, SpherePoint) else SpherePoint.from_vec(center),
        )
        object.__setattr__(self, "radius", float(radius))
        object.__setattr__(
            self,
            "start",
            start if isinstance(start, SpherePoint) else SpherePoint.from_vec(start),
        )
        object.__setattr__(
            self, "end", end if isinstance(end, SpherePoint) else SpherePoint.from_vec(end)
        )


@dataclass(frozen=True)
class ArcBody:
    """Convex body bounded by a cyclic chain of circular arcs.

    The exact carrier for balls, lenses, Reuleaux polygons and polar
    duals of all of these.  Every arc has radius in (0, pi/2]; radius
    pi/2 arcs are geodesic segments.
    """

    arcs: tuple[CircleArc, ...]

    def __init__(self, arcs):
        object.__setattr__(self, "arcs", tuple(arcs))
        self._validate()

    def _validate(self):
        m = len(self.arcs)
        if m == 0:
            raise ValueError("arc body needs at least one arc")
        for i, a in enumerate(self.arcs):
            if not (0.0 < a.radius <= HALF_PI + 1e-12):
                raise ValueError("arc %d radius outside (0, pi/2]" % i)
            for name, pt in (("start", a.start), ("end", a.end)):
                d = geodesic_distance(a.center, pt)
                if abs(d - a.radius) > EPS_INCIDENCE:
                    raise ValueError(
                        "arc %d %s point is not at distance radius from its center"
                        % (i, name)
                    )
        for i in range(m):
            e = self.arcs[i].end.vec
            s = self.arcs[(i + 1) % m].start.vec
            if m > 1 and np.linalg.norm(e - s) > 1e-12:
                raise ValueError("arc endpoints do not chain (arc %d end)" % i)
        pieces = self._build_pieces()
        if m > 1 and np.any(pieces.sweep > math.pi + 1e-9):
            raise ValueError("arc sweep exceeds pi in a multi-arc body")
        # convex left turns at the junctions, counterclockwise traversal
        if m > 1:
            for i in range(m):
                j = (i + 1) % m
                t_out = pieces.tangent_at(i, pieces.sweep[i])
                t_in = pieces.tangent_at(j, 0.0)
                turn = float(np.dot(np.cross(t_out, t_in), pieces.starts[j]))
                if turn < -EPS_INCIDENCE:
                    raise ValueError("boundary turns clockwise at junction %d" % i)
        samples = _coarse_samples(pieces)
        if _hemisphere_witness(samples) is None:
            raise NoHemisphere("boundary is not contained in an open hemisphere")

    def _build_pieces(self) -> _Pieces:
        return _Pieces(
            [a.center.vec for a in self.arcs],
            [a.radius for a in self.arcs],
            [a.start.vec for a in self.arcs],
            [a.end.vec for a in self.arcs],
            full_circle=(len(self.arcs) == 1),
        )

    @property
    def vertex_array(self) -> np.ndarray:
        """Junction points (arc start points), in boundary order."""
        return np.array([a.start.vec for a in self.arcs])

    def contains(self, p, eps: float = EPS_INCIDENCE) -> bool:
        """Closed-region membership.

        Decomposition: the body is the union of the geodesic polygon of
        its junction vertices and, per arc, the *bulge* between the arc
        and its chord (points within the arc's radius of its center, on
        the outer side of the chord's great circle).  A single full
        circle is a ball; a two-arc lens has no chord polygon and the two
        bulges cover it.
        """
        pv = _vec(p)
        pieces = _piece_arrays(self)
        if pieces.m == 1 and pieces.sweep[0] >= 2 * math.pi - 1e-12:
            return geodesic_distance(pieces.centers[0], pv) <= pieces.radii[0] + eps
        chord_normals = []
        for j in range(pieces.m):
            cn = np.cross(pieces.starts[j], pieces.ends[j])
            ncn = np.linalg.norm(cn)
            chord_normals.append(None if ncn < EPS_UNIT else cn / ncn)
        if pieces.m >= 3 and all(cn is not None for cn in chord_normals):
            if all(float(np.dot(cn, pv)) >= -eps for cn in chord_normals):
                return True
        for j in range(pieces.m):
            cn = chord_normals[j]
            if cn is None:
                continue
            if float(np.dot(cn, pv)) <= eps and geodesic_distance(
                pieces.centers[j], pv
            ) <= pieces.radii[j] + eps:
                return True
        return False

    def boundary_sample(self, n: int):
        return boundary_sample(self, n)


Body = SpherePolygon | ArcBody


def _coarse_samples(pieces: _Pieces, per_piece: int = 8) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, per_piece, endpoint=False)
    out = []
    for j in range(pieces.m):
        out.append(pieces.points_at(np.full(per_piece, j), ts * pieces.sweep[j]))
    return np.vstack(out)


def contains(body: Body, p, eps: float = EPS_INCIDENCE) -> bool:
    """Closed-region membership test for either body type."""
    return body.contains(p, eps=eps)


def convex_hull(points) -> SpherePolygon:
    """Minimal convex spherical polygon containing the given points.

    Uses gnomonic (central) projection onto the tangent plane at a
    hemisphere-witness direction — great circles map to straight lines,
    so a planar convex hull lifts back exactly.  Requires all points in
    an open hemisphere.
    """
    P = np.array([_vec(p) for p in points])
    dedup: list[np.ndarray] = []
    for row in P:
        if not any(np.linalg.norm(row - q) < 1e-12 for q in dedup):
            dedup.append(row)
    P = np.array(dedup)
    if len(P) < 3:
        raise Degenerate("fewer than 3 distinct points")
    w = _hemisphere_witness(P)
    if w is None:
        raise NoHemisphere("points admit no open hemisphere")
    from .sphere import perpendicular_basis

    u, v = perpendicular_basis(w)
    denom = P @ w
    plane = np.column_stack([(P @ u) / denom, (P @ v) / denom])
    try:
        hull = _QHull(plane)
    except QhullError as exc:
        raise Degenerate("hull is degenerate: %s" % exc) from exc
    idx = hull.vertices  # counterclockwise in the (u, v) plane
    if len(idx) < 3:
        raise Degenerate("hull has fewer than 3 vertices")
    return SpherePolygon([SpherePoint.from_vec(P[i]) for i in idx])


def support_margin(body: Body, k) -> float:
    """min over the body of x . k; zero (within tolerance) iff H(k)
    supports the body, positive iff k is interior to the polar."""
    val, _, _ = _piece_arrays(body).min_dot(_vec(k)[None, :])
    return float(val[0])


def support_margins(body: Body, K: np.ndarray) -> np.ndarray:
    """Vectorized `support_margin` over rows of K."""
    vals, _, _ = _piece_arrays(body).min_dot(K)
    return vals


def farthest_boundary_point(body: Body, q) -> tuple[float, BoundaryPoint]:
    """The boundary point maximizing distance from q, with the distance."""
    pieces = _piece_arrays(body)
    vals, j, t = pieces.min_dot(_vec(q)[None, :])
    pt = pieces.point_at(int(j[0]), float(t[0]))
    d = float(np.arccos(np.clip(vals[0], -1.0, 1.0)))
    return d, BoundaryPoint(SpherePoint.from_vec(pt), int(j[0]), float(t[0]))


def farthest_distances(body: Body, Q: np.ndarray) -> np.ndarray:
    """Vectorized farthest-boundary-point distances from each row of Q."""
    vals, _, _ = _piece_arrays(body).min_dot(Q)
    return np.arccos(np.clip(vals, -1.0, 1.0))


def touch_point(body: Body, k, eps: float = EPS_INCIDENCE):
    """Point where the supporting hemisphere H(k) touches the body.

    Returns a BoundaryPoint when the touch point is unique; when the
    support is attained along a whole geodesic piece (polygon edge, or a
    radius-pi/2 arc) the full piece is returned as a GeodesicArc to make
    the non-uniqueness explicit.  Raises NotSupporting when H(k) does not
    support the body.
    """
    kv = _vec(k)
    pieces = _piece_arrays(body)
    vals, j, t = pieces.min_dot(kv[None, :])
    m0 = float(vals[0])
    if m0 > eps:
        raise NotSupporting("H(k) does not touch the body (k interior to polar)")
    if m0 < -eps:
        raise NotSupporting("body is not contained in H(k)")
    j0 = int(j[0])
    # constant dot along the winning piece => the whole piece supports
    a = float(np.dot(kv, pieces.us[j0]))
    b = float(np.dot(kv, pieces.vs[j0]))
    if math.hypot(a, b) < 1e-12:
        return GeodesicArc(
            SpherePoint.from_vec(pieces.starts[j0]),
            SpherePoint.from_vec(pieces.ends[j0]),
        )
    pt = pieces.point_at(j0, float(t[0]))
    return BoundaryPoint(SpherePoint.from_vec(pt), j0, float(t[0]))


def locate_boundary_point(body: Body, p) -> BoundaryPoint:
    """Find the piece and parameter of a point known to lie on bd(body)."""
    pv = _vec(p)
    pieces = _piece_arrays(body)
    best = None
    for j in range(pieces.m):
        w = pv - pieces.base[j]
        a = float(np.dot(w, pieces.u[j]))
        b = float(np.dot(w, pieces.v[j]))
        t = math.atan2(b, a) % (2 * math.pi)
        if t > pieces.sweep[j]:
            t_clamped = 0.0 if (2 * math.pi - t) < (t - pieces.sweep[j]) else pieces.sweep[j]
        else:
            t_clamped = t
        cand = pieces.point_at(j, t_clamped)
        d = float(np.linalg.norm(cand - pv))
        if best is None or d < best[0]:
            best = (d, j, t_clamped)
    d, j, t = best
    if d > EPS_INCIDENCE:
        raise NotOnBoundary("point is not on the boundary (offset %.3g)" % d)
    return BoundaryPoint(SpherePoint.from_vec(pieces.point_at(j, t)), j, t)


def classify_boundary_point(
    body: Body, p
) -> tuple[BoundaryKind, NormalCone]:
    """Smooth/acute classification with the normal cone of supporting
    centers.

    A point interior to a piece is smooth with the single center
    normalize(c - cos(r) p); a junction with distinct adjacent normals is
    acute and the cone is the geodesic arc between the incoming and
    outgoing normals.
    """
    bp = p if isinstance(p, BoundaryPoint) else locate_boundary_point(body, p)
    pieces = _piece_arrays(body)
    j = bp.piece
    pv = bp.point.vec
    at_start = bp.param <= EPS_INCIDENCE
    at_end = bp.param >= pieces.sweep[j] - EPS_INCIDENCE
    if pieces.m == 1 or not (at_start or at_end):
        n = pieces.normal_at(j, pv)
        return BoundaryKind.SMOOTH, NormalCone(bp, SpherePoint.from_vec(n))
    if at_start:
        j_in, j_out = (j - 1) % pieces.m, j
    else:
        j_in, j_out = j, (j + 1) % pieces.m
    n_in = pieces.normal_at(j_in, pv)
    n_out = pieces.normal_at(j_out, pv)
    if geodesic_distance(n_in, n_out) <= EPS_INCIDENCE:
        return BoundaryKind.SMOOTH, NormalCone(bp, SpherePoint.from_vec(n_in))
    cone = GeodesicArc(SpherePoint.from_vec(n_in), SpherePoint.from_vec(n_out))
    return BoundaryKind.ACUTE, NormalCone(bp, cone)


def is_strictly_convex(body: Body) -> CheckReport:
    """No geodesic arc in the boundary.

    Polygons fail with a witness edge; arc bodies fail iff some arc of
    length above the incidence tolerance has radius pi/2 (a radius-pi/2
    arc is a geodesic segment).
    """
    pieces = _piece_arrays(body)
    witnesses = []
    for j in range(pieces.m):
        if pieces.radii[j] >= HALF_PI - EPS_INCIDENCE and pieces.lengths[j] > EPS_INCIDENCE:
            witnesses.append(
                {
                    "kind": "geodesic_piece",
                    "piece": int(j),
                    "start": pieces.starts[j].tolist(),
                    "end": pieces.ends[j].tolist(),
                    "length": float(pieces.lengths[j]),
                }
            )
    return CheckReport(
        verdict=not witnesses, tolerance=EPS_INCIDENCE, witnesses=witnesses
    )


def boundary_sample(body: Body, n: int) -> list[BoundaryPoint]:
    """n points ordered along the boundary, spaced ~uniformly in arc
    length; every piece start (vertex) is always included, so the output
    has max(n, piece count) points."""
    if n < 3:
        raise ValueError("need n >= 3 samples")
    pieces = _piece_arrays(body)
    total = float(np.sum(pieces.lengths))
    extra = max(0, n - pieces.m)
    quota = pieces.lengths / total * extra
    counts = np.floor(quota).astype(int)
    rem = extra - int(counts.sum())
    if rem > 0:
        order = np.argsort(-(quota - counts))
        counts[order[:rem]] += 1
    counts += 1  # the start sample of each piece
    out = []
    for j in range(pieces.m):
        k = int(counts[j])
        ts = pieces.sweep[j] * np.arange(k) / k
        for t in ts:
            out.append(
                BoundaryPoint(
                    SpherePoint.from_vec(pieces.point_at(j, float(t))), j, float(t)
                )
            )
    return out


def boundary_sample_array(body: Body, n: int) -> np.ndarray:
    """Like `boundary_sample` but returns just the (N, 3) point array."""
    return np.array([bp.point.vec for bp in boundary_sample(body, n)])


def polar(body: Body) -> Body:
    """Polar dual: all hemisphere centers r with body contained in H(r).

    Polygon -> polygon of its edge poles (vertex i+1 of the polar is the
    pole of primal edge i); arc body -> arc body where an arc of radius r
    about c maps to one of radius pi/2 - r about c and each acute vertex
    contributes a radius-pi/2 arc of its normal cone.  Radius-pi/2 source
    arcs collapse to single polar vertices.
    """
    if isinstance(body, SpherePolygon):
        V = body.vertex_array
        normals = body.edge_normals
        if float(np.max(V @ normals.T)) <= EPS_UNIT:
            raise EmptyInterior("polygon has empty interior (all vertices on one great circle)")
        dedup = [normals[0]]
        for row in normals[1:]:
            if np.linalg.norm(row - dedup[-1]) > 1e-12:
                dedup.append(row)
        if np.linalg.norm(dedup[0] - dedup[-1]) <= 1e-12 and len(dedup) > 1:
            dedup.pop()
        if len(dedup) < 3:
            raise EmptyInterior("polar collapsed below 3 vertices")
        return SpherePolygon([SpherePoint.from_vec(x) for x in dedup])

    pieces = _piece_arrays(body)
    entries = []  # (entry_normal, exit_normal, image_arc_or_None)
    for j in range(pieces.m):
        rho = float(pieces.radii[j])
        s, e, c = pieces.starts[j], pieces.ends[j], pieces.centers[j]
        if rho >= HALF_PI - 1e-9:
            entries.append((c, c, None))
            continue
        n_s = pieces.normal_at(j, s)
        n_e = pieces.normal_at(j, e)
        image = CircleArc(
            SpherePoint.from_vec(c),
            HALF_PI - rho,
            SpherePoint.from_vec(n_s),
            SpherePoint.from_vec(n_e),
        )
        entries.append((n_s, n_e, image))
    arcs: list[CircleArc] = []
    for j in range(pieces.m):
        _, exit_n, image = entries[j]
        if image is not None:
            arcs.append(image)
        entry_next = entries[(j + 1) % pieces.m][0]
        junction = pieces.ends[j]
        if np.linalg.norm(exit_n - entry_next) > 1e-12:
            arcs.append(
                CircleArc(
                    SpherePoint.from_vec(junction),
                    HALF_PI,
                    SpherePoint.from_vec(exit_n),
                    SpherePoint.from_vec(entry_next),
                )
            )
    if not arcs:
        raise EmptyInterior("polar has no boundary pieces")
    return ArcBody(arcs)
