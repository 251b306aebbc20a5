"""Diameter, diametral chords, widths, thickness and the constant-width /
constant-diameter checkers.

Width reduction: the lune H(k) ∩ H(k') has thickness pi - dist(k, k'),
and H(k') contains the body iff k' lies in the polar body.  So the width
determined by a supporting hemisphere H(k) is

    width(k) = pi - max over r in polar(body) of dist(k, r),

a farthest-point query answered exactly on polar vertices and arc extrema.
The reduction is always cross-checked in the tests against `width_oracle`,
which touches neither the polar body nor this closed form: it only ever
asks "is the body inside H(k')?" for candidate centers k'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import (
    ArcBody,
    Body,
    GeodesicArc,
    SpherePolygon,
    _piece_arrays,
    boundary_sample,
    farthest_boundary_point,
    polar,
    support_margin,
    support_margins,
    touch_point,
)
from .errors import NotConstantDiameter, NotOnPolarBoundary, NotSupporting
from .report import CheckReport
from .sphere import (
    EPS_INCIDENCE,
    SpherePoint,
    _vec,
    fibonacci_grid,
    geodesic_distance,
    perpendicular_basis,
)

DEFAULT_SAMPLES = 2048
DEFAULT_GRID = 10_000
DEFAULT_TOL = 1e-6
CHORD_TOL = 1e-8
FEAS_EPS = 1e-12


@dataclass(frozen=True)
class DiametralChord:
    """Boundary chord attaining (up to tolerance) the body diameter."""

    p: SpherePoint
    q: SpherePoint
    length: float

    def to_dict(self) -> dict:
        return {
            "p": list(self.p),
            "q": list(self.q),
            "length": float(self.length),
        }


def cached_polar(body: Body) -> Body:
    """Polar dual, computed once per body instance."""
    cached = getattr(body, "_polar_cache", None)
    if cached is None:
        cached = polar(body)
        object.__setattr__(body, "_polar_cache", cached)
    return cached


def _sample_points(body: Body, n: int):
    bps = boundary_sample(body, n)
    return np.array([bp.point.vec for bp in bps]), bps


def _farthest_with_points(body: Body, Q: np.ndarray):
    pieces = _piece_arrays(body)
    vals, j, t = pieces.min_dot(Q)
    dists = np.arccos(np.clip(vals, -1.0, 1.0))
    pts = pieces.points_at(j, t)
    return dists, pts


def diameter_value(body: Body, samples: int = DEFAULT_SAMPLES) -> float:
    """Diameter alone (no chord enumeration).

    Polygons: exact maximum over vertex pairs (exact whenever the
    diameter is below pi/2, since the distance from a fixed point along a
    geodesic edge then has no interior maximum).  Arc bodies: dense
    boundary sweep with farthest-point queries (closed form per arc),
    refined by alternating farthest-point maximization to ~1e-13.
    """
    if isinstance(body, SpherePolygon):
        V = body.vertex_array
        D = np.arccos(np.clip(V @ V.T, -1.0, 1.0))
        return float(D.max())
    P, _ = _sample_points(body, samples)
    dists, _ = _farthest_with_points(body, P)
    best = int(np.argmax(dists))
    p, d_prev = P[best], float(dists[best])
    # alternating farthest-point ascent from the best sampled pair
    for _ in range(200):
        _, bq = farthest_boundary_point(body, p)
        q = bq.point.vec
        d2, bp = farthest_boundary_point(body, q)
        p = bp.point.vec
        if d2 - d_prev < 1e-14:
            d_prev = max(d_prev, d2)
            break
        d_prev = d2
    return float(max(d_prev, dists.max()))


def diameter(body: Body, samples: int = DEFAULT_SAMPLES, chord_tol: float = CHORD_TOL):
    """Diameter and the chords attaining it (within `chord_tol`),
    deduplicated by endpoint proximity."""
    if isinstance(body, SpherePolygon):
        V = body.vertex_array
        D = np.arccos(np.clip(V @ V.T, -1.0, 1.0))
        delta = float(D.max())
        pairs = []
        ii, jj = np.where(D >= delta - chord_tol)
        for a, b in zip(ii, jj):
            if a < b:
                pairs.append(
                    DiametralChord(
                        SpherePoint.from_vec(V[a]),
                        SpherePoint.from_vec(V[b]),
                        float(D[a, b]),
                    )
                )
        return delta, pairs
    delta = diameter_value(body, samples=samples)
    P, _ = _sample_points(body, samples)
    dists, partners = _farthest_with_points(body, P)
    chords = _chords_from_sweep(P, dists, partners, delta, chord_tol)
    return delta, chords


def _chords_from_sweep(P, dists, partners, delta, tol, dedupe=1e-6):
    idx = np.flatnonzero(dists >= delta - tol)
    kept_p = np.empty((len(idx), 3))
    kept_q = np.empty((len(idx), 3))
    m = 0
    chords = []
    for i in idx:
        p, q = P[i], partners[i]
        if m:
            same = (np.linalg.norm(kept_p[:m] - p, axis=1) < dedupe) & (
                np.linalg.norm(kept_q[:m] - q, axis=1) < dedupe
            )
            swap = (np.linalg.norm(kept_p[:m] - q, axis=1) < dedupe) & (
                np.linalg.norm(kept_q[:m] - p, axis=1) < dedupe
            )
            if same.any() or swap.any():
                continue
        kept_p[m], kept_q[m] = p, q
        m += 1
        chords.append(
            DiametralChord(
                SpherePoint.from_vec(p), SpherePoint.from_vec(q), float(dists[i])
            )
        )
    return chords


def diametral_chords(
    body: Body, tol: float, samples: int = DEFAULT_SAMPLES
) -> list[DiametralChord]:
    """All sampled boundary chords within `tol` of the diameter."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(body, SpherePolygon):
        _, pairs = diameter(body, chord_tol=tol)
        return pairs
    delta = diameter_value(body, samples=min(samples, DEFAULT_SAMPLES))
    P, _ = _sample_points(body, samples)
    dists, partners = _farthest_with_points(body, P)
    return _chords_from_sweep(P, dists, partners, delta, tol)


def width_given_support(body: Body, k, eps: float = EPS_INCIDENCE) -> float:
    """Width of the body determined by the supporting hemisphere H(k).

    Thickness of the narrowest lune H(k) ∩ K' containing the body,
    computed as pi minus the farthest-point distance from k over the
    polar body (vertices and arc extrema, closed form).
    """
    kv = _vec(k)
    m = support_margin(body, kv)
    if abs(m) > eps:
        raise NotSupporting(
            "H(k) does not support the body (support margin %.3g)" % m
        )
    pol = cached_polar(body)
    vals, _, _ = _piece_arrays(pol).min_dot(kv[None, :])
    return math.pi - float(np.arccos(np.clip(vals[0], -1.0, 1.0)))


def _widths_for_directions(body: Body, K: np.ndarray) -> np.ndarray:
    pol = cached_polar(body)
    vals, _, _ = _piece_arrays(pol).min_dot(K)
    return math.pi - np.arccos(np.clip(vals, -1.0, 1.0))


def width_oracle(
    body: Body,
    k,
    grid_size: int = DEFAULT_GRID,
    refine: bool = True,
    scan: int = 64,
) -> float:
    """Brute-force width: containing-lune search by feasibility tests only.

    Minimizes the thickness of H(k) ∩ H(k') over candidate centers k'
    drawn from a Fibonacci grid of `grid_size` points filtered by
    "body inside H(k')", i.e. pi minus the largest feasible dist(k, k').
    With `refine` the best candidate is polished by bisecting the exit
    point of great-circle rays from k through feasible territory (the
    feasible set is convex), still using containment tests only.  Every
    candidate examined is feasible, so the result always upper-bounds the
    true width and never goes below `width_given_support`; it converges
    to it as the grid grows.
    """
    kv = _vec(k)
    m = support_margin(body, kv)
    if abs(m) > EPS_INCIDENCE:
        raise NotSupporting(
            "H(k) does not support the body (support margin %.3g)" % m
        )
    if grid_size < 1000:
        raise ValueError("grid_size must be >= 1000")
    grid = fibonacci_grid(grid_size)
    feas = grid[support_margins(body, grid) >= -FEAS_EPS]
    best_d = 0.0
    theta_seed = None
    u, v = perpendicular_basis(kv)
    if len(feas):
        dd = np.arccos(np.clip(feas @ kv, -1.0, 1.0))
        i = int(np.argmax(dd))
        best_d = float(dd[i])
        g = feas[i] - np.dot(feas[i], kv) * kv
        if np.linalg.norm(g) > 1e-12:
            theta_seed = math.atan2(np.dot(g, v), np.dot(g, u))
    if not refine:
        return math.pi - best_d

    def ray_depths(thetas: np.ndarray) -> np.ndarray:
        # largest feasible arc length from k along each tangent direction;
        # the feasible set is convex, so [0, depth] is exactly feasible.
        T = np.outer(np.cos(thetas), u) + np.outer(np.sin(thetas), v)
        lo = np.zeros(len(thetas))
        hi = np.full(len(thetas), math.pi - 1e-9)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            pts = kv[None, :] * np.cos(mid)[:, None] + T * np.sin(mid)[:, None]
            ok = support_margins(body, pts) >= -FEAS_EPS
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        return lo

    thetas = np.linspace(0.0, 2 * math.pi, scan, endpoint=False)
    if theta_seed is not None:
        spacing = math.sqrt(4 * math.pi / grid_size)
        local = theta_seed + np.linspace(-3 * spacing, 3 * spacing, 17)
        thetas = np.concatenate([thetas, local])
    depths = ray_depths(thetas)
    j = int(np.argmax(depths))
    best_d = max(best_d, float(depths[j]))
    # zoom the winning direction in vectorized stages
    center, span = float(thetas[j]), 2 * math.pi / scan
    for _ in range(5):
        local = np.linspace(center - span, center + span, 17)
        depths = ray_depths(local)
        j = int(np.argmax(depths))
        center = float(local[j])
        best_d = max(best_d, float(depths[j]))
        span /= 8.0
    return math.pi - best_d


def thickness(body: Body, samples: int = DEFAULT_SAMPLES) -> float:
    """Minimum width over all supporting hemispheres.

    Sweeps supporting centers along the polar boundary (vertices always
    included) and polishes the winner by golden-section on the boundary
    parameter.
    """
    pol = cached_polar(body)
    bps = boundary_sample(pol, samples)
    K = np.array([bp.point.vec for bp in bps])
    widths = _widths_for_directions(body, K)
    i = int(np.argmin(widths))
    best = float(widths[i])
    pieces = _piece_arrays(pol)
    # golden-section around the winning sample, one piece-local parameter
    j = bps[i].piece
    sw = float(pieces.sweep[j])
    step = sw / max(1, sum(1 for bp in bps if bp.piece == j))
    a = max(0.0, bps[i].param - step)
    b = min(sw, bps[i].param + step)

    def width_at(t: float) -> float:
        kk = pieces.point_at(j, t)
        return float(_widths_for_directions(body, kk[None, :])[0])

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = width_at(c), width_at(d)
    for _ in range(60):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = width_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = width_at(d)
    return min(best, fc, fd)


def check_constant_width(
    body: Body,
    tol: float = DEFAULT_TOL,
    target: float | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> CheckReport:
    """All widths equal (within tol), and equal to `target` when given.

    Sweeps `samples` supporting centers along the polar boundary
    (vertices / normal-cone endpoints always included).  The report's
    profile carries one row (k_x, k_y, k_z, width) per swept center.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pol = cached_polar(body)
    K = np.array([bp.point.vec for bp in boundary_sample(pol, samples)])
    widths = _widths_for_directions(body, K)
    lo, hi = int(np.argmin(widths)), int(np.argmax(widths))
    obs_min, obs_max = float(widths[lo]), float(widths[hi])
    tgt = obs_min if target is None else float(target)
    verdict = (obs_max - obs_min <= tol) and abs(obs_min - tgt) <= tol
    witnesses = [
        {"kind": "width_extreme", "which": "min", "k": K[lo].tolist(), "width": obs_min},
        {"kind": "width_extreme", "which": "max", "k": K[hi].tolist(), "width": obs_max},
    ]
    profile = np.column_stack([K, widths])
    return CheckReport(
        verdict=verdict,
        tolerance=tol,
        target=tgt,
        observed_min=obs_min,
        observed_max=obs_max,
        witnesses=witnesses,
        profile=profile,
    )


def check_constant_diameter(
    body: Body,
    tol: float = DEFAULT_TOL,
    target: float | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> CheckReport:
    """Every boundary point has a partner at the body diameter (within tol).

    Sweeps `samples` boundary points p and computes the exact farthest
    boundary distance f(p); the verdict demands every f(p) within tol of
    the diameter.  Profile rows are (p_x, p_y, p_z, f).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    delta = diameter_value(body, samples=samples)
    P, _ = _sample_points(body, samples)
    f, partners = _farthest_with_points(body, P)
    lo, hi = int(np.argmin(f)), int(np.argmax(f))
    obs_min, obs_max = float(f[lo]), float(f[hi])
    tgt = delta if target is None else float(target)
    verdict = (obs_max - obs_min <= tol) and abs(obs_min - tgt) <= tol
    witnesses = [
        {
            "kind": "diameter_deficit",
            "p": P[lo].tolist(),
            "farthest": partners[lo].tolist(),
            "distance": obs_min,
        },
        {
            "kind": "diameter_attained",
            "p": P[hi].tolist(),
            "farthest": partners[hi].tolist(),
            "distance": obs_max,
        },
    ]
    profile = np.column_stack([P, f])
    return CheckReport(
        verdict=verdict,
        tolerance=tol,
        target=tgt,
        observed_min=obs_min,
        observed_max=obs_max,
        witnesses=witnesses,
        profile=profile,
    )


def _on_arc(x: np.ndarray, a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    dab = float(np.arccos(np.clip(np.dot(a, b), -1, 1)))
    dax = float(np.arccos(np.clip(np.dot(a, x), -1, 1)))
    dxb = float(np.arccos(np.clip(np.dot(x, b), -1, 1)))
    return abs(dax + dxb - dab) <= tol


def chords_intersect(c1: DiametralChord, c2: DiametralChord, tol: float = EPS_INCIDENCE) -> bool:
    """Whether two minor arcs meet (shared endpoints count)."""
    p1, q1 = c1.p.vec, c1.q.vec
    p2, q2 = c2.p.vec, c2.q.vec
    for a in (p1, q1):
        for b in (p2, q2):
            if np.linalg.norm(a - b) <= tol:
                return True
    n1 = np.cross(p1, q1)
    n2 = np.cross(p2, q2)
    n1 /= np.linalg.norm(n1)
    n2 /= np.linalg.norm(n2)
    w = np.cross(n1, n2)
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        # same great circle: overlap iff some endpoint lies on the other arc
        return any(
            _on_arc(x, a, b, tol)
            for (x, a, b) in (
                (p2, p1, q1),
                (q2, p1, q1),
                (p1, p2, q2),
                (q1, p2, q2),
            )
        )
    w = w / nw
    for cand in (w, -w):
        if _on_arc(cand, p1, q1, tol) and _on_arc(cand, p2, q2, tol):
            return True
    return False


def check_chord_intersections(
    body: Body,
    n_chords: int = 200,
    tol: float = EPS_INCIDENCE,
    precheck: CheckReport | None = None,
) -> CheckReport:
    """Every pair of (sampled) diametral chords intersects.

    Requires the body to pass the constant-diameter check first; pass a
    previously computed report via `precheck` to skip re-checking.
    """
    cd = precheck if precheck is not None else check_constant_diameter(body)
    if not cd.verdict:
        raise NotConstantDiameter(
            "body does not pass the constant-diameter check "
            "(spread %.3g)" % ((cd.observed_max or 0) - (cd.observed_min or 0))
        )
    chords = diametral_chords(body, tol=1e-6, samples=n_chords)
    bad = []
    for i in range(len(chords)):
        for j in range(i + 1, len(chords)):
            if not chords_intersect(chords[i], chords[j], tol):
                bad.append(
                    {
                        "kind": "disjoint_chords",
                        "chord_a": chords[i].to_dict(),
                        "chord_b": chords[j].to_dict(),
                    }
                )
    return CheckReport(
        verdict=not bad,
        tolerance=tol,
        observed_min=float(len(chords)),
        observed_max=float(len(chords) * (len(chords) - 1) // 2),
        witnesses=bad[:8],
        notes="%d chords, %d pairs tested" % (len(chords), len(chords) * (len(chords) - 1) // 2),
    )


def support_chord_correspondence(
    body: Body,
    r,
    tol: float = DEFAULT_TOL,
    precheck: CheckReport | None = None,
) -> DiametralChord:
    """The diametral chord determined by a supporting hemisphere H(r).

    For a constant-diameter body (diameter < pi/2) and r on the polar
    boundary, H(r) touches the body at a single point p, and following
    the great circle through p and r into the body exits at the chord's
    other end p'; the chord has length delta and is orthogonal to bd(H(r))
    at p by construction.
    """
    cd = precheck if precheck is not None else check_constant_diameter(body, tol=tol)
    if not cd.verdict:
        raise NotConstantDiameter("body does not pass the constant-diameter check")
    delta = float(cd.target)
    if delta >= math.pi / 2:
        raise NotConstantDiameter("correspondence requires diameter < pi/2")
    rv = _vec(r)
    m = support_margin(body, rv)
    if abs(m) > 1e-9:
        raise NotOnPolarBoundary(
            "r is not on the polar boundary (support margin %.3g)" % m
        )
    tp = touch_point(body, rv)
    if isinstance(tp, GeodesicArc):
        raise NotConstantDiameter(
            "support is attained along a boundary arc; body is not strictly convex"
        )
    pv = tp.point.vec

    def inside(t: float) -> bool:
        x = pv * math.cos(t) + rv * math.sin(t)
        return body.contains(x)

    t_hi = min(math.pi / 2 - 1e-9, delta + 0.2)
    ts = np.linspace(0.0, t_hi, 64)
    lo = 0.0
    hi = None
    for t in ts[1:]:
        if inside(float(t)):
            lo = float(t)
        else:
            hi = float(t)
            break
    if hi is None:
        hi = t_hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    t_star = lo
    p2 = pv * math.cos(t_star) + rv * math.sin(t_star)
    return DiametralChord(
        SpherePoint.from_vec(pv), SpherePoint.from_vec(p2), float(t_star)
    )


def width_profile(body: Body, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Rows (k_x, k_y, k_z, width) over a polar-boundary sweep."""
    return check_constant_width(body, tol=math.inf, samples=samples).profile


def diameter_profile(body: Body, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Rows (p_x, p_y, p_z, farthest_distance) over a boundary sweep."""
    P, _ = _sample_points(body, samples)
    f = farthest_distances_profile(body, P)
    return np.column_stack([P, f])


def farthest_distances_profile(body: Body, P: np.ndarray) -> np.ndarray:
    vals, _, _ = _piece_arrays(body).min_dot(P)
    return np.arccos(np.clip(vals, -1.0, 1.0))
