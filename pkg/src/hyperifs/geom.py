"""Canonical charts, distances, balls and normalized Lebesgue measure.

Three manifolds, all normalized so the total measure is 1 and the
natural unit of length is the same one the measure is expressed in:

* ``circle``  -- [0, 1) with arc-length metric, total length 1.
* ``torus``   -- [0, 1)^2 flat, total area 1.
* ``sphere``  -- round 2-sphere of radius 1/(2*pi) embedded in R^3, so
  the equator has length 1; areas are reported as fractions of total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CIRCLE = "circle"
TORUS = "torus"
SPHERE = "sphere"

MANIFOLDS = (CIRCLE, TORUS, SPHERE)

#: embedding radius of the sphere (equator length 1)
RHO = 1.0 / (2.0 * math.pi)

#: largest radius for which geodesic balls are embedded (injectivity bound)
INJECTIVITY = {CIRCLE: 0.5, TORUS: 0.5, SPHERE: RHO * math.pi}

DIM = {CIRCLE: 1, TORUS: 2, SPHERE: 2}

#: torus radii below this use the flat closed form pi*r^2; above, Monte Carlo
TORUS_CLOSED_FORM_MAX = 0.35


class GeomError(ValueError):
    """Domain error: mismatched manifolds or out-of-range parameters."""


@dataclass(frozen=True)
class Point:
    """A point on one of the supported manifolds.

    Circle/torus coordinates live in [0, 1); sphere points are stored as
    embedding vectors of norm RHO.
    """

    manifold: str
    coords: tuple

    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


def point(manifold: str, coords) -> Point:
    """Build a Point, normalizing into the canonical chart."""
    c = np.asarray(coords, dtype=float).ravel()
    if manifold == CIRCLE:
        if c.size != 1:
            raise GeomError("circle point needs 1 coordinate")
        c = c % 1.0
    elif manifold == TORUS:
        if c.size != 2:
            raise GeomError("torus point needs 2 coordinates")
        c = c % 1.0
    elif manifold == SPHERE:
        if c.size != 3:
            raise GeomError("sphere point needs 3 coordinates")
        n = np.linalg.norm(c)
        if n == 0.0:
            raise GeomError("zero vector is not a sphere point")
        c = c * (RHO / n)
    else:
        raise GeomError(f"unknown manifold {manifold!r}")
    return Point(manifold, tuple(c.tolist()))


def normalize_coords(manifold: str, arr: np.ndarray) -> np.ndarray:
    """Normalize an (n, d) coordinate array into the canonical chart."""
    arr = np.asarray(arr, dtype=float)
    if manifold in (CIRCLE, TORUS):
        return arr % 1.0
    norms = np.linalg.norm(arr, axis=-1, keepdims=True)
    return arr * (RHO / norms)


# ---------------------------------------------------------------------------
# distances


def circle_dist(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def torus_dist(a, b):
    """Flat distance with per-coordinate wraparound; a, b are (..., 2)."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    d = np.minimum(d, 1.0 - d)
    return np.sqrt(np.sum(d * d, axis=-1))


def sphere_dist(u, v):
    """Geodesic distance between embedding vectors of norm RHO."""
    dot = np.sum(np.asarray(u) * np.asarray(v), axis=-1) / (RHO * RHO)
    return RHO * np.arccos(np.clip(dot, -1.0, 1.0))


def dist(p: Point, q: Point) -> float:
    if p.manifold != q.manifold:
        raise GeomError(f"mismatched manifolds: {p.manifold} vs {q.manifold}")
    a, b = p.array(), q.array()
    if p.manifold == CIRCLE:
        return float(circle_dist(a[0], b[0]))
    if p.manifold == TORUS:
        return float(torus_dist(a, b))
    return float(sphere_dist(a, b))


def dist_to_point(manifold: str, pts: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Distances from an (n, d) array of points to a single point."""
    if manifold == CIRCLE:
        return circle_dist(pts[:, 0], q[0])
    if manifold == TORUS:
        return torus_dist(pts, q[None, :])
    return sphere_dist(pts, q[None, :])


# ---------------------------------------------------------------------------
# measure


def _check_radius(manifold: str, r: float) -> None:
    if not (0.0 < r <= INJECTIVITY[manifold]):
        raise GeomError(
            f"radius {r} out of range (0, {INJECTIVITY[manifold]}] on {manifold}"
        )


def ball_measure(manifold: str, r: float, *, seed: int = 0) -> float:
    """Normalized measure of a geodesic ball of radius r.

    Closed forms everywhere except wraparound-affected torus balls
    (r >= 0.35), which fall back to Monte Carlo with 10^6 samples.
    """
    _check_radius(manifold, r)
    if manifold == CIRCLE:
        return min(1.0, 2.0 * r)
    if manifold == SPHERE:
        return (1.0 - math.cos(2.0 * math.pi * r)) / 2.0
    if r < TORUS_CLOSED_FORM_MAX:
        return math.pi * r * r
    est, _ = mc_ball_measure(manifold, r, n_samples=10**6, seed=seed)
    return est


def mc_ball_measure(manifold: str, r: float, n_samples: int = 10**6,
                    seed: int = 0):
    """Monte Carlo estimate of ball measure; returns (estimate, stderr)."""
    _check_radius(manifold, r)
    rng = np.random.default_rng(seed)
    center = _default_center(manifold)
    pts = sample_uniform(manifold, n_samples, rng)
    hits = dist_to_point(manifold, pts, center) <= r
    p = float(np.mean(hits))
    se = math.sqrt(max(p * (1.0 - p), 1e-300) / n_samples)
    return p, se


def _default_center(manifold: str) -> np.ndarray:
    if manifold == CIRCLE:
        return np.array([0.0])
    if manifold == TORUS:
        return np.array([0.0, 0.0])
    return np.array([0.0, 0.0, RHO])


def _circle_arc_overlap(x: float, rx: float, y: float, ry: float) -> float:
    """Length of the intersection of two circle arcs [x-rx,x+rx], [y-ry,y+ry]."""
    if 2.0 * rx >= 1.0:
        return min(1.0, 2.0 * ry)
    if 2.0 * ry >= 1.0:
        return min(1.0, 2.0 * rx)
    # shift so arc A starts at 0
    a0 = 0.0
    a1 = 2.0 * rx
    b0 = (y - ry - (x - rx)) % 1.0
    b1 = b0 + 2.0 * ry
    total = 0.0
    # arc B may wrap past 1; split into at most two plain intervals
    for lo, hi in ((b0, min(b1, 1.0)), (0.0, max(b1 - 1.0, 0.0))):
        if hi <= lo:
            continue
        total += max(0.0, min(a1, hi) - max(a0, lo))
    return total


def _lens_area(r1: float, r2: float, d: float) -> float:
    """Area of intersection of two planar discs at center distance d."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rmin = min(r1, r2)
        return math.pi * rmin * rmin
    a1 = r1 * r1 * math.acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1))
    a2 = r2 * r2 * math.acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2))
    k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    return a1 + a2 - 0.5 * math.sqrt(max(k, 0.0))


def ball_intersection_measure(x: Point, rx: float, y: Point, ry: float, *,
                              seed: int = 0, n_samples: int = 10**6) -> float:
    """Normalized measure of B(x, rx) ∩ B(y, ry).

    Exact when one ball contains the other or a closed form applies;
    Monte Carlo otherwise (see ball_intersection_info for the stderr).
    """
    value, _, _ = ball_intersection_info(x, rx, y, ry, seed=seed,
                                         n_samples=n_samples)
    return value


def ball_intersection_info(x: Point, rx: float, y: Point, ry: float, *,
                           seed: int = 0, n_samples: int = 10**6):
    """As ball_intersection_measure, returning (value, stderr, method)."""
    if x.manifold != y.manifold:
        raise GeomError("mismatched manifolds")
    m = x.manifold
    _check_radius(m, rx)
    _check_radius(m, ry)
    d = dist(x, y)
    # containment: triangle inequality puts the smaller ball inside the larger
    if d + min(rx, ry) <= max(rx, ry):
        return ball_measure(m, min(rx, ry)), 0.0, "containment"
    if d >= rx + ry:
        return 0.0, 0.0, "disjoint"
    if m == CIRCLE:
        xa, ya = x.array()[0], y.array()[0]
        # work with the wrapped representative of y closest to x
        off = (ya - xa) % 1.0
        if off > 0.5:
            off -= 1.0
        return _circle_arc_overlap(0.0, rx, off, ry), 0.0, "arc"
    if m == TORUS and rx < TORUS_CLOSED_FORM_MAX and ry < TORUS_CLOSED_FORM_MAX \
            and d + max(rx, ry) < 0.5:
        return _lens_area(rx, ry, d), 0.0, "lens"
    # Monte Carlo inside the smaller ball
    if rx <= ry:
        small_c, small_r, other_c, other_r = x, rx, y, ry
    else:
        small_c, small_r, other_c, other_r = y, ry, x, rx
    rng = np.random.default_rng(seed)
    pts = sample_ball(m, small_c.array(), small_r, n_samples, rng)
    hits = dist_to_point(m, pts, other_c.array()) <= other_r
    p = float(np.mean(hits))
    base = ball_measure(m, small_r, seed=seed)
    se = base * math.sqrt(max(p * (1.0 - p), 1e-300) / n_samples)
    return base * p, se, "monte-carlo"


# ---------------------------------------------------------------------------
# sampling


def sample_uniform(manifold: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if manifold == CIRCLE:
        return rng.random((n, 1))
    if manifold == TORUS:
        return rng.random((n, 2))
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * RHO


def sample_ball(manifold: str, center: np.ndarray, r: float, n: int,
                rng: np.random.Generator) -> np.ndarray:
    """Uniform samples from the geodesic ball B(center, r)."""
    _check_radius(manifold, r)
    center = np.asarray(center, dtype=float)
    if manifold == CIRCLE:
        return (center[None, :] + rng.uniform(-r, r, size=(n, 1))) % 1.0
    if manifold == TORUS:
        # flat disc is exact for r <= 1/2 up to wraparound of coordinates
        rad = r * np.sqrt(rng.random(n))
        ang = rng.uniform(0.0, 2.0 * math.pi, n)
        off = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
        return (center[None, :] + off) % 1.0
    # spherical cap: uniform in cos(theta) on [cos(theta_max), 1]
    theta_max = r / RHO
    cos_t = rng.uniform(math.cos(theta_max), 1.0, n)
    theta = np.arccos(np.clip(cos_t, -1.0, 1.0))
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    e1, e2 = tangent_basis(center)
    u = np.cos(phi)[:, None] * e1[None, :] + np.sin(phi)[:, None] * e2[None, :]
    return np.cos(theta)[:, None] * center[None, :] \
        + (RHO * np.sin(theta))[:, None] * u


def sample_point(manifold: str, rng: np.random.Generator) -> Point:
    return point(manifold, sample_uniform(manifold, 1, rng)[0])


def tangent_basis(v: np.ndarray):
    """Orthonormal pair spanning the tangent plane at sphere point v."""
    v = np.asarray(v, dtype=float)
    n = v / np.linalg.norm(v)
    a = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(a, n)) > 0.9:
        a = np.array([0.0, 1.0, 0.0])
    e1 = a - np.dot(a, n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


# ---------------------------------------------------------------------------
# nets


def net(x: Point, r: float, delta: float) -> np.ndarray:
    """delta-net of the closed ball B(x, r), chain-connected, with boundary.

    Circle: uniform grid.  Torus/sphere: geodesic polar grid with ring
    spacing and in-ring spacing both <= delta, so the covering radius is
    at most delta/sqrt(2) < delta.
    """
    if delta <= 0 or delta >= r:
        raise GeomError("need 0 < delta < r")
    _check_radius(x.manifold, r)
    c = x.array()
    if x.manifold == CIRCLE:
        n = math.ceil(r / delta)
        offs = np.linspace(-r, r, 2 * n + 1)
        return (c[None, :] + offs[:, None]) % 1.0
    nring = math.ceil(r / delta)
    radii = np.linspace(0.0, r, nring + 1)
    if x.manifold == TORUS:
        out = [c[None, :]]
        for s in radii[1:]:
            k = max(4, math.ceil(2.0 * math.pi * s / delta))
            ang = np.arange(k) * (2.0 * math.pi / k)
            ring = c[None, :] + s * np.stack([np.cos(ang), np.sin(ang)], axis=1)
            out.append(ring % 1.0)
        return np.concatenate(out, axis=0)
    e1, e2 = tangent_basis(c)
    out = [c[None, :]]
    for s in radii[1:]:
        theta = s / RHO
        circ = 2.0 * math.pi * RHO * math.sin(theta)
        k = max(4, math.ceil(circ / delta))
        ang = np.arange(k) * (2.0 * math.pi / k)
        u = np.cos(ang)[:, None] * e1[None, :] + np.sin(ang)[:, None] * e2[None, :]
        ring = math.cos(theta) * c[None, :] + RHO * math.sin(theta) * u
        out.append(ring)
    return np.concatenate(out, axis=0)


# ---------------------------------------------------------------------------
# epsilon-grids (used by density / coverage probes)


class Grid:
    """Partition of a manifold into cells of diameter ~eps.

    Cells are indexed 0..ncells-1; used for orbit-density and coverage
    bookkeeping, not for measure computations.
    """

    def __init__(self, manifold: str, eps: float):
        if eps <= 0:
            raise GeomError("eps must be positive")
        self.manifold = manifold
        self.eps = eps
        if manifold == CIRCLE:
            self.n = max(1, math.ceil(1.0 / eps))
            self.ncells = self.n
        elif manifold == TORUS:
            self.n = max(1, math.ceil(1.0 / eps))
            self.ncells = self.n * self.n
        elif manifold == SPHERE:
            # latitude bands of geodesic height eps, split by arc length
            self.nbands = max(1, math.ceil((math.pi * RHO) / eps))
            self.band_sectors = []
            offsets = [0]
            for i in range(self.nbands):
                t0 = (i + 0.5) * math.pi / self.nbands  # band-center polar angle
                circ = 2.0 * math.pi * RHO * math.sin(t0)
                k = max(1, math.ceil(circ / eps))
                self.band_sectors.append(k)
                offsets.append(offsets[-1] + k)
            self._offsets = np.array(offsets)
            self.ncells = int(self._offsets[-1])
        else:
            raise GeomError(f"unknown manifold {manifold!r}")

    def cell_index(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.manifold == CIRCLE:
            return np.minimum((pts[:, 0] % 1.0 * self.n).astype(int), self.n - 1)
        if self.manifold == TORUS:
            ij = np.minimum((pts % 1.0 * self.n).astype(int), self.n - 1)
            return ij[:, 0] * self.n + ij[:, 1]
        z = np.clip(pts[:, 2] / RHO, -1.0, 1.0)
        theta = np.arccos(z)  # polar angle from north pole
        band = np.minimum((theta / math.pi * self.nbands).astype(int),
                          self.nbands - 1)
        phi = np.arctan2(pts[:, 1], pts[:, 0]) % (2.0 * math.pi)
        ks = np.array(self.band_sectors)[band]
        sector = np.minimum((phi / (2.0 * math.pi) * ks).astype(int), ks - 1)
        return self._offsets[band] + sector
