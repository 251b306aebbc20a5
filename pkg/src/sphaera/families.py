"""Constructors for the body families the verification suite runs on:
balls, regular spherical Reuleaux polygons, ball intersections, and
randomized Reuleaux-type bodies."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .bodies import ArcBody, CircleArc, SpherePolygon, convex_hull
from .errors import GenerationFailed, NoSolution, PrecondViolation
from .sphere import SpherePoint, _vec, geodesic_distance, perpendicular_basis

log = logging.getLogger("sphaera.families")

HALF_PI = math.pi / 2


def _pose_matrix(pose) -> np.ndarray:
    """Accept None, a 3x3 rotation matrix, or a unit quaternion (w,x,y,z)."""
    if pose is None:
        return np.eye(3)
    pose = np.asarray(pose, dtype=float)
    if pose.shape == (3, 3):
        if not np.allclose(pose @ pose.T, np.eye(3), atol=1e-9) or np.linalg.det(pose) < 0:
            raise ValueError("pose matrix is not a proper rotation")
        return pose
    if pose.shape == (4,):
        w, x, y, z = pose / np.linalg.norm(pose)
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ]
        )
    raise ValueError("pose must be None, a 3x3 matrix or a quaternion")


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish random rotation from a random axis and angle."""
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, 2 * math.pi)
    from .sphere import rotation_about

    return rotation_about(axis, angle)


@dataclass(frozen=True)
class ReuleauxSpec:
    """Parameters of a spherical Reuleaux polygon family member.

    n must be odd and >= 3; the width/diameter delta must lie in
    (0, pi/2).  `pose` rotates the construction (matrix or quaternion);
    `seed` drives the randomized variant.
    """

    n: int
    delta: float
    pose: object = None
    seed: int | None = None

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError("n must be an odd integer >= 3")
        if not (0.0 < self.delta < HALF_PI):
            raise ValueError("delta must lie in (0, pi/2)")


def ball(center, rho: float) -> ArcBody:
    """Spherical ball (disk) of radius rho about `center` as a single
    full-circle arc body.  rho < pi/4 keeps the diameter 2*rho below pi/2."""
    if not (0.0 < rho < math.pi / 4):
        raise ValueError("ball radius must lie in (0, pi/4)")
    c = _vec(center)
    u, _ = perpendicular_basis(c)
    start = math.cos(rho) * c + math.sin(rho) * u
    p = SpherePoint.from_vec(start)
    return ArcBody([CircleArc(SpherePoint.from_vec(c), rho, p, p)])


def circumradius(n: int, delta: float) -> float:
    """Circumradius R of the regular Reuleaux n-gon of width delta.

    Solves dist(v_0, v_m) = delta for vertices on a circle of colatitude R,
    m = (n-1)/2; by the spherical law of cosines
    sin^2 R = (1 - cos delta) / (1 - cos(2 pi m / n)).  The closed form is
    cross-checked against bisection on the distance residual.
    """
    m = (n - 1) // 2
    denom = 1.0 - math.cos(2 * math.pi * m / n)
    s2 = (1.0 - math.cos(delta)) / denom
    if not (0.0 < s2 < 1.0):
        raise NoSolution("no circumradius in (0, pi/2) for n=%d delta=%g" % (n, delta))
    closed = math.asin(math.sqrt(s2))

    def residual(R: float) -> float:
        return (
            math.cos(R) ** 2 + math.sin(R) ** 2 * math.cos(2 * math.pi * m / n)
        ) - math.cos(delta)

    lo, hi = 1e-12, HALF_PI - 1e-12
    if residual(lo) * residual(hi) > 0:
        raise NoSolution("circumradius residual does not bracket a root")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if residual(lo) * residual(mid) <= 0:
            hi = mid
        else:
            lo = mid
    bis = 0.5 * (lo + hi)
    if abs(bis - closed) > 1e-12:
        raise NoSolution(
            "closed-form and bisection circumradius disagree (%.3g)" % abs(bis - closed)
        )
    return closed


def _reuleaux_from_vertices(V: np.ndarray, delta: float) -> ArcBody:
    """Arc body with arcs of radius delta from v_i to v_{i+1}, each
    centered at the opposite vertex v_{i+m+1} (m = (n-1)/2)."""
    n = len(V)
    m = (n - 1) // 2
    arcs = []
    for i in range(n):
        c = V[(i + m + 1) % n]
        arcs.append(
            CircleArc(
                SpherePoint.from_vec(c),
                delta,
                SpherePoint.from_vec(V[i]),
                SpherePoint.from_vec(V[(i + 1) % n]),
            )
        )
    return ArcBody(arcs)


def regular_reuleaux(spec: ReuleauxSpec) -> ArcBody:
    """Regular spherical Reuleaux n-gon of width delta.

    Vertices form a regular n-gon at circumradius R about the pole; the
    boundary is n arcs of radius delta, each centered at the vertex
    opposite its chord.
    """
    R = circumradius(spec.n, spec.delta)
    ang = 2 * math.pi * np.arange(spec.n) / spec.n
    V = np.column_stack(
        [
            math.sin(R) * np.cos(ang),
            math.sin(R) * np.sin(ang),
            math.cos(R) * np.ones(spec.n),
        ]
    )
    V = V @ _pose_matrix(spec.pose).T
    return _reuleaux_from_vertices(V, spec.delta)


def reuleaux_vertices(body: ArcBody) -> np.ndarray:
    return body.vertex_array


def ball_intersection(points, delta: float) -> ArcBody:
    """Intersection of the balls of radius delta about the given points.

    Requires pairwise distances <= delta (so every center lies in the
    intersection) and delta < pi/2.  Each bounding circle is clipped
    against all other balls (the per-circle feasible set is a single arc
    because every clip is at most a half circle), and the surviving arcs
    are chained into the boundary.  Note the result can be wider than
    delta when the point family is diametrally incomplete: the lens of
    two points has corner-to-corner diameter 2*arccos(cos d / cos(d/2)).
    """
    if not (0.0 < delta < HALF_PI):
        raise PrecondViolation("delta must lie in (0, pi/2)")
    P = np.array([_vec(p) for p in points])
    dedup: list[np.ndarray] = []
    for row in P:
        if not any(np.linalg.norm(row - q) < 1e-12 for q in dedup):
            dedup.append(row)
    P = np.array(dedup)
    n = len(P)
    D = np.arccos(np.clip(P @ P.T, -1.0, 1.0))
    if float(D.max(initial=0.0)) > delta + 1e-12:
        raise PrecondViolation(
            "pairwise distance %.12g exceeds delta" % float(D.max())
        )
    if n == 1:
        return ball_of_any_radius(P[0], delta)

    arcs = []
    for i in range(n):
        c = P[i]
        u, v = perpendicular_basis(c)
        lo, hi = None, None
        empty = False
        for j in range(n):
            if j == i:
                continue
            a = math.sin(delta) * float(np.dot(u, P[j]))
            b = math.sin(delta) * float(np.dot(v, P[j]))
            rhs = math.cos(delta) * (1.0 - float(np.dot(c, P[j])))
            amp = math.hypot(a, b)
            if amp < 1e-15:
                continue
            ratio = rhs / amp
            if ratio > 1.0:
                empty = True
                break
            half = math.acos(max(-1.0, min(1.0, ratio)))
            mid = math.atan2(b, a)
            if lo is None:
                lo, hi = mid - half, mid + half
            else:
                center_cur = 0.5 * (lo + hi)
                shift = round((center_cur - mid) / (2 * math.pi))
                mid_adj = mid + shift * 2 * math.pi
                lo = max(lo, mid_adj - half)
                hi = min(hi, mid_adj + half)
                if lo > hi:
                    empty = True
                    break
        if empty or lo is None or hi - lo <= 1e-12:
            continue

        def at(phi: float) -> np.ndarray:
            return (
                math.cos(delta) * c
                + math.sin(delta) * (math.cos(phi) * u + math.sin(phi) * v)
            )

        arcs.append(
            (i, CircleArc(SpherePoint.from_vec(c), delta, SpherePoint.from_vec(at(lo)), SpherePoint.from_vec(at(hi))))
        )
    if not arcs:
        raise PrecondViolation("ball intersection has empty boundary")
    if len(arcs) == 1:
        only = arcs[0][1]
        return ArcBody(
            [CircleArc(only.center, only.radius, only.start, only.start)]
        )
    # chain arcs end -> start
    chain = [arcs[0][1]]
    remaining = [a for _, a in arcs[1:]]
    while remaining:
        tail = chain[-1].end.vec
        best_j = min(
            range(len(remaining)),
            key=lambda j: np.linalg.norm(remaining[j].start.vec - tail),
        )
        gap = float(np.linalg.norm(remaining[best_j].start.vec - tail))
        if gap > 1e-9:
            raise PrecondViolation(
                "boundary arcs do not chain (gap %.3g); inconsistent input" % gap
            )
        chain.append(remaining.pop(best_j))
    closing = float(np.linalg.norm(chain[-1].end.vec - chain[0].start.vec))
    if closing > 1e-9:
        raise PrecondViolation("boundary does not close (gap %.3g)" % closing)
    # snap shared endpoints exactly so the chain invariant holds bitwise
    snapped = []
    for idx, arc in enumerate(chain):
        nxt = chain[(idx + 1) % len(chain)]
        snapped.append(CircleArc(arc.center, arc.radius, arc.start, nxt.start))
    return ArcBody(snapped)


def ball_of_any_radius(center, rho: float) -> ArcBody:
    """Full-circle arc body of radius rho in (0, pi/2) about `center`."""
    if not (0.0 < rho < HALF_PI):
        raise ValueError("radius must lie in (0, pi/2)")
    c = _vec(center)
    u, _ = perpendicular_basis(c)
    start = SpherePoint.from_vec(math.cos(rho) * c + math.sin(rho) * u)
    return ArcBody([CircleArc(SpherePoint.from_vec(c), rho, start, start)])


def _project_to_constraints(V: np.ndarray, delta: float, sweeps: int = 200) -> np.ndarray:
    """Move vertices, one at a time, so every star-opposite pair
    {v_i, v_{i+m}} is at distance exactly delta (root-finding by circle
    intersection), until the worst residual is below 1e-14."""
    n = len(V)
    m = (n - 1) // 2
    V = V.copy()
    for _ in range(sweeps):
        worst = 0.0
        for i in range(n):
            a = V[(i - m) % n]
            b = V[(i + m) % n]
            # intersection of circles of radius delta about a and b,
            # nearest to the current v_i
            axis = a + b
            axis_n = np.linalg.norm(axis)
            if axis_n < 1e-12:
                continue
            axis = axis / axis_n
            half = 0.5 * geodesic_distance(a, b)
            if half > delta:
                continue
            cos_h = math.cos(delta) / math.cos(half)
            if abs(cos_h) > 1.0:
                continue
            h = math.acos(cos_h)
            perp = np.cross(a, b)
            perp_n = np.linalg.norm(perp)
            if perp_n < 1e-12:
                continue
            perp = perp / perp_n
            cand1 = math.cos(h) * axis + math.sin(h) * perp
            cand2 = math.cos(h) * axis - math.sin(h) * perp
            v_new = cand1 if np.dot(cand1, V[i]) >= np.dot(cand2, V[i]) else cand2
            V[i] = v_new
        for i in range(n):
            worst = max(worst, abs(geodesic_distance(V[i], V[(i + m) % n]) - delta))
        if worst < 1e-14:
            return V
    raise NoSolution("constraint projection did not converge (residual %g)" % worst)


def random_reuleaux(
    spec: ReuleauxSpec, jitter: float = 0.05, max_attempts: int = 100
) -> ArcBody:
    """Randomized spherical Reuleaux polygon of width delta.

    Perturbs the regular vertices by seeded tangent jitter, re-solves the
    star-opposite distance constraints one vertex at a time, builds the
    ball intersection of the vertex set, and retries with fresh jitter
    until the result passes the constant-diameter check at 1e-6.
    Deterministic for a given (spec, jitter).
    """
    from .width import check_constant_diameter

    if spec.seed is None:
        raise ValueError("spec.seed must be set for random generation")
    rng = np.random.default_rng(spec.seed)
    base = regular_reuleaux(
        ReuleauxSpec(spec.n, spec.delta, pose=spec.pose)
    ).vertex_array
    attempts = []
    for attempt in range(max_attempts):
        V = base.copy()
        if jitter > 0:
            for i in range(len(V)):
                t = rng.normal(size=3)
                t -= np.dot(t, V[i]) * V[i]
                nt = np.linalg.norm(t)
                if nt > 1e-12:
                    V[i] = V[i] * math.cos(jitter) + (t / nt) * math.sin(
                        jitter * rng.uniform(0.2, 1.0)
                    )
                    V[i] /= np.linalg.norm(V[i])
        try:
            V = _project_to_constraints(V, spec.delta)
            D = np.arccos(np.clip(V @ V.T, -1.0, 1.0))
            np.fill_diagonal(D, 0.0)
            if float(D.max()) > spec.delta + 1e-12:
                raise PrecondViolation("projected vertices exceed delta")
            body = ball_intersection([SpherePoint.from_vec(v) for v in V], spec.delta)
            report = check_constant_diameter(body, tol=1e-6, samples=512)
            if report.verdict:
                return body
            attempts.append("attempt %d: diameter spread %.3g" % (
                attempt, report.observed_max - report.observed_min))
        except (PrecondViolation, NoSolution, ValueError) as exc:
            attempts.append("attempt %d: %s" % (attempt, exc))
        if jitter == 0:
            break
    raise GenerationFailed(
        "no constant-diameter body after %d attempts" % len(attempts) if attempts else 1,
        attempts=attempts,
    )


def random_polygon(
    rng: np.random.Generator,
    n_points: int = 8,
    cap_radius: float = 1.2,
    center=None,
) -> SpherePolygon:
    """Convex hull of points drawn uniformly from a spherical cap."""
    if center is None:
        c = rng.normal(size=3)
        c /= np.linalg.norm(c)
    else:
        c = _vec(center)
    u, v = perpendicular_basis(c)
    cos_t = rng.uniform(math.cos(cap_radius), 1.0, size=n_points)
    theta = np.arccos(cos_t)
    phi = rng.uniform(0.0, 2 * math.pi, size=n_points)
    pts = (
        np.outer(np.cos(theta), c)
        + np.outer(np.sin(theta) * np.cos(phi), u)
        + np.outer(np.sin(theta) * np.sin(phi), v)
    )
    return convex_hull([SpherePoint.from_vec(p) for p in pts])


def lens(a, b) -> ArcBody:
    """Intersection of the two delta-balls about a and b, where delta is
    the distance between them."""
    delta = geodesic_distance(a, b)
    return ball_intersection([a, b], delta)
