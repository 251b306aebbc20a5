"""Primitive geometry on the unit sphere S².

Points, great-circle arcs, hemispheres and lunes, together with the
scalar quantities everything downstream is built from: geodesic
distance, lune thickness, and the narrowest lune through a point at
prescribed depth inside a hemisphere.

All functions are pure and operate on immutable values; there is no
global state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadConfiguration, DegenerateLune

# Unit-vector normalization slack; quantities derived purely from dot /
# cross products are trusted to this level.
EPS_UNIT = 1e-12
# Point-on-boundary (incidence) tests; looser because boundary points are
# usually products of upstream arithmetic.
EPS_INCIDENCE = 1e-9


def _as_unit(x, y=None, z=None) -> np.ndarray:
    if y is None:
        v = np.asarray(x, dtype=float)
    else:
        v = np.array([x, y, z], dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n < EPS_UNIT:
        raise ValueError("cannot normalize a (near-)zero vector to a sphere point")
    return v / n


@dataclass(frozen=True)
class SpherePoint:
    """A point of S², stored as a unit 3-vector (renormalized on construction)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        v = _as_unit(self.x, self.y, self.z)
        object.__setattr__(self, "x", float(v[0]))
        object.__setattr__(self, "y", float(v[1]))
        object.__setattr__(self, "z", float(v[2]))

    @classmethod
    def from_vec(cls, v) -> "SpherePoint":
        v = np.asarray(v, dtype=float)
        return cls(v[0], v[1], v[2])

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def antipode(self) -> "SpherePoint":
        return SpherePoint(-self.x, -self.y, -self.z)

    def __iter__(self):
        return iter((self.x, self.y, self.z))


def _vec(p) -> np.ndarray:
    """Accept a SpherePoint or any 3-vector; return a unit ndarray."""
    if isinstance(p, SpherePoint):
        return p.vec
    return _as_unit(p)


def geodesic_distance(a, b) -> float:
    """Spherical distance in radians between two points, in [0, pi].

    The dot product is clamped to [-1, 1] before arccos so numerically
    coincident or antipodal inputs cannot produce NaN.
    """
    return float(np.arccos(np.clip(np.dot(_vec(a), _vec(b)), -1.0, 1.0)))


def pairwise_distances(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Distances from each row of `query` to each row of `points` (vectorized)."""
    return np.arccos(np.clip(query @ points.T, -1.0, 1.0))


@dataclass(frozen=True)
class GeodesicArc:
    """Minor great-circle arc between two non-antipodal points."""

    a: SpherePoint
    b: SpherePoint

    def __post_init__(self):
        if np.dot(self.a.vec, self.b.vec) <= -1.0 + EPS_UNIT:
            raise ValueError("arc endpoints are (near-)antipodal; minor arc undefined")

    @property
    def length(self) -> float:
        return geodesic_distance(self.a, self.b)

    def point_at(self, t: float) -> SpherePoint:
        """Point at arc-length parameter t in [0, length] from endpoint a."""
        av, bv = self.a.vec, self.b.vec
        w = bv - np.dot(av, bv) * av
        nw = np.linalg.norm(w)
        if nw < EPS_UNIT:
            return self.a
        w = w / nw
        return SpherePoint.from_vec(av * math.cos(t) + w * math.sin(t))

    def midpoint(self) -> SpherePoint:
        return self.point_at(self.length / 2.0)


@dataclass(frozen=True)
class Hemisphere:
    """Closed hemisphere H(c): all points within spherical distance pi/2 of c."""

    center: SpherePoint

    def contains(self, p, eps: float = EPS_UNIT) -> bool:
        return bool(np.dot(self.center.vec, _vec(p)) >= -eps)


def hemisphere_contains(h: Hemisphere, p, eps: float = EPS_UNIT) -> bool:
    """Membership test p in H(c), i.e. p . c >= -eps."""
    return h.contains(p, eps=eps)


@dataclass(frozen=True)
class Lune:
    """Intersection of two distinct, non-opposite hemispheres G and H."""

    g: Hemisphere
    h: Hemisphere

    def __post_init__(self):
        d = abs(np.dot(self.g.center.vec, self.h.center.vec))
        if d >= 1.0 - EPS_UNIT:
            raise DegenerateLune(
                "hemisphere centers are equal or antipodal (|g.h| = %.17g)" % d
            )


def lune_face_centers(lune: Lune) -> tuple[SpherePoint, SpherePoint]:
    """Midpoints of the two boundary semicircles of a lune.

    Returns (u_G, u_H): u_G is the point of bd(G) closest to the center of
    H (the midpoint of the semicircle of bd(G) inside H), and symmetrically
    for u_H.  Both satisfy u_G . g = 0 and u_H . h = 0 by construction.
    """
    g = lune.g.center.vec
    h = lune.h.center.vec
    c = float(np.dot(g, h))
    if abs(c) >= 1.0 - EPS_UNIT:
        raise DegenerateLune("degenerate lune: centers equal or antipodal")
    u_g = _as_unit(h - c * g)
    u_h = _as_unit(g - c * h)
    return SpherePoint.from_vec(u_g), SpherePoint.from_vec(u_h)


def lune_thickness(lune: Lune) -> float:
    """Thickness of a lune: the distance between its two face centers.

    Computed by the closed form pi - dist(g, h), which equals the
    face-center distance: with c = g.h, the construction in
    `lune_face_centers` gives u_G . u_H = -c exactly.  The face-center
    path is kept as an independent oracle in the test suite.
    """
    return math.pi - geodesic_distance(lune.g.center, lune.h.center)


def narrowest_lune_through(k: Hemisphere, p, q) -> Lune:
    """Narrowest lune K ∩ M over all hemispheres M with q on bd(M).

    Requires p on bd(K) and q strictly inside K on the arc from p toward
    K's center (the arc orthogonal to bd(K) at p), with dist(p, q) < pi/2.
    The minimizing M has its center m on the p-q great circle at distance
    pi/2 from q on the side of p, i.e. m = normalize(p - (p.q) q); the
    returned lune has thickness exactly dist(p, q).
    """
    kv = k.center.vec
    pv = _vec(p)
    qv = _vec(q)
    if abs(np.dot(pv, kv)) > EPS_INCIDENCE:
        raise BadConfiguration("p is not on the boundary of K (|p.k| > tolerance)")
    t = geodesic_distance(pv, qv)
    if t <= EPS_INCIDENCE:
        raise BadConfiguration("p and q coincide; the lune direction is undefined")
    if t >= math.pi / 2:
        raise BadConfiguration("dist(p, q) must be < pi/2")
    # q must equal p cos(t) + k sin(t): on the great circle through p and
    # K's center, on the interior side.
    expected_q = pv * math.cos(t) + kv * math.sin(t)
    if np.linalg.norm(qv - expected_q) > EPS_INCIDENCE:
        raise BadConfiguration(
            "q is not on the arc from p orthogonal to bd(K) inside K"
        )
    m = _as_unit(pv - np.dot(pv, qv) * qv)
    return Lune(k, Hemisphere(SpherePoint.from_vec(m)))


def fibonacci_grid(n: int) -> np.ndarray:
    """Quasi-uniform Fibonacci lattice of n points on S², shape (n, 3).

    Deterministic; used for brute-force direction sweeps.
    """
    if n < 1:
        raise ValueError("grid size must be >= 1")
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def perpendicular_basis(c) -> tuple[np.ndarray, np.ndarray]:
    """Right-handed orthonormal pair (u, v) with u, v ⊥ c and v = c × u."""
    cv = _vec(c)
    seed = np.array([1.0, 0.0, 0.0]) if abs(cv[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = seed - np.dot(seed, cv) * cv
    u = u / np.linalg.norm(u)
    return u, np.cross(cv, u)


def rotation_about(axis, angle: float) -> np.ndarray:
    """3x3 rotation matrix about a unit axis (Rodrigues)."""
    a = _vec(axis)
    kx = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * (kx @ kx)
