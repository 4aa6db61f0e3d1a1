"""Hyperspace machinery: continua, the Hausdorff metric, induced maps.

Continua are restricted to closed geodesic balls and their images:
exact arcs on the circle, finite delta-nets elsewhere.  Net/net
Hausdorff distance is the exact finite-set value, which brackets the
true continuum distance within delta_A + delta_B; verifiers always add
the resolutions to the computed value before comparing against a
threshold, so discretization cannot produce a false positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from . import geom, _core
from .geom import CIRCLE, SPHERE, TORUS, RHO, GeomError, Point
from .ifs import IfsSystem, Word


@dataclass(frozen=True)
class Arc:
    """Closed circle arc [center-radius, center+radius], exact."""

    center: float
    radius: float

    manifold: str = CIRCLE

    def endpoints(self):
        return (self.center - self.radius) % 1.0, (self.center + self.radius) % 1.0


@dataclass(frozen=True)
class Net:
    """delta-net representation of a continuum.

    base is the (center coords, radius) of the geodesic ball this net
    (or its preimage) discretizes, kept for refinement; note carries
    fallback flags from induced application.
    """

    manifold: str
    points: np.ndarray
    delta: float
    base: Optional[tuple] = None
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points",
                           np.atleast_2d(np.asarray(self.points, dtype=float)))


Continuum = Union[Arc, Net]


def closure_ball(x: Point, r: float, delta: float = None,
                 force_net: bool = False) -> Continuum:
    """The closed ball B(x, r) as a continuum (the limit-point set of
    the open ball equals the closed ball here)."""
    if x.manifold == CIRCLE and not force_net:
        if not (0.0 < r < 0.5):
            raise GeomError("arc radius must be in (0, 1/2)")
        return Arc(float(x.array()[0]), float(r))
    if delta is None:
        raise GeomError("net continua need an explicit delta")
    pts = geom.net(x, r, delta)
    return Net(x.manifold, pts, delta, base=(tuple(x.array().tolist()), float(r)))


def resolution(c: Continuum) -> float:
    """Discretization slack of a continuum (0 for exact arcs)."""
    return 0.0 if isinstance(c, Arc) else c.delta


def arc_to_net(a: Arc, delta: float) -> Net:
    pts = geom.net(geom.point(CIRCLE, [a.center]), a.radius, delta)
    return Net(CIRCLE, pts, delta, base=((a.center,), a.radius))


# ---------------------------------------------------------------------------
# Hausdorff metric


def _dist_point_to_arc(p: float, a: Arc) -> float:
    d = float(geom.circle_dist(p, a.center))
    return max(0.0, d - a.radius)


def _directed_arc(a: Arc, b: Arc) -> float:
    # sup over a of the distance to b is attained at an endpoint of a, or
    # at the midpoint of the complement of b if that midpoint lies in a
    lo, hi = a.endpoints()
    candidates = [lo, hi]
    far = (b.center + 0.5) % 1.0
    if geom.circle_dist(far, a.center) <= a.radius:
        candidates.append(far)
    return max(_dist_point_to_arc(p, b) for p in candidates)


def _net_hausdorff(a: Net, b: Net) -> float:
    wrap = a.manifold in (CIRCLE, TORUS)
    pa = np.ascontiguousarray(a.points)
    pb = np.ascontiguousarray(b.points)
    d = max(_core.directed_hausdorff(pa, pb, wrap),
            _core.directed_hausdorff(pb, pa, wrap))
    if a.manifold == SPHERE:
        # kernels work on chords; convert to geodesic length
        return float(2.0 * RHO * math.asin(min(1.0, d / (2.0 * RHO))))
    return float(d)


def hausdorff(a: Continuum, b: Continuum) -> float:
    """Hausdorff distance; exact for arc/arc and finite nets."""
    if a.manifold != b.manifold:
        raise GeomError("mismatched manifolds")
    if isinstance(a, Arc) and isinstance(b, Arc):
        if a.radius >= 0.5 or b.radius >= 0.5:
            raise GeomError("arc radius must be below 1/2")
        if a == b:
            return 0.0
        return max(_directed_arc(a, b), _directed_arc(b, a))
    if isinstance(a, Arc):
        a = arc_to_net(a, _mixing_delta(a, b))
    if isinstance(b, Arc):
        b = arc_to_net(b, _mixing_delta(b, a))
    return _net_hausdorff(a, b)


def _mixing_delta(arc: Arc, other: Continuum) -> float:
    d = arc.radius / 50.0
    if isinstance(other, Net):
        d = min(d, other.delta)
    return d


def min_distances_to(points: np.ndarray, c: Net) -> np.ndarray:
    """Distance from each sample point to the net (covering diagnostics)."""
    wrap = c.manifold in (CIRCLE, TORUS)
    d = _core.min_distances(np.ascontiguousarray(points, dtype=float),
                            np.ascontiguousarray(c.points), wrap)
    if c.manifold == SPHERE:
        return 2.0 * RHO * np.arcsin(np.clip(d / (2.0 * RHO), -1.0, 1.0))
    return d


# ---------------------------------------------------------------------------
# induced maps


def _arc_in_domain(center: float, radius: float, domain: tuple) -> bool:
    lo, hi = domain
    length = (hi - lo) % 1.0
    a = (center - radius - lo) % 1.0
    return a >= 0.0 and a + 2.0 * radius <= length


def _estimate_lipschitz(manifold: str, src: np.ndarray, img: np.ndarray,
                        delta: float, rng=None) -> float:
    """Empirical local stretch from net-neighbor pairs, with safety factor."""
    n = src.shape[0]
    if n < 2:
        return 1.0
    if manifold == CIRCLE:
        ds = geom.circle_dist(src[:-1, 0], src[1:, 0])
        di = geom.circle_dist(img[:-1, 0], img[1:, 0])
    elif manifold == TORUS:
        ds = geom.torus_dist(src[:-1], src[1:])
        di = geom.torus_dist(img[:-1], img[1:])
    else:
        ds = geom.sphere_dist(src[:-1], src[1:])
        di = geom.sphere_dist(img[:-1], img[1:])
    near = ds < 3.0 * delta
    ds, di = ds[near], di[near]
    keep = ds > 1e-12
    if not np.any(keep):
        return 1.0
    return float(np.max(di[keep] / ds[keep])) * 1.25


def _word_is_power(w: Word):
    """(index, n) if w = g_index^n with no inverses, else None."""
    if len(w) == 0:
        return None
    first = w.letters[0]
    if first[1]:
        return None
    if all(l == first for l in w.letters):
        return first[0], len(w)
    return None


def induced_apply(sys: IfsSystem, w: Word, a: Continuum,
                  target_delta: float = None) -> Continuum:
    """Image of a continuum under the induced word map.

    Arc inputs stay exact arcs while every prefix step keeps the current
    arc inside a declared pure-rotation domain; otherwise the evaluation
    falls back to net mode and flags it.  Net resolutions are tracked
    through per-step stretch estimates; when the input net carries its
    base ball and the output resolution would exceed target_delta, the
    source is re-netted finer and the word replayed.
    """
    if isinstance(a, Arc):
        center, radius = a.center, a.radius
        for pos, (idx, inv) in enumerate(reversed(w.letters)):
            gen = sys.generators[idx]
            dom = gen.rotation_domain
            amt = gen.rotation_amount
            ok = dom is not None and amt is not None
            if ok and not inv and _arc_in_domain(center, radius, dom):
                center = (center + amt) % 1.0
            elif ok and inv and _arc_in_domain(center, radius,
                                               ((dom[0] + amt) % 1.0,
                                                (dom[1] + amt) % 1.0)):
                center = (center - amt) % 1.0
            else:
                # leave the fast path; finish on a net
                delta = target_delta or radius / 50.0
                rest = Word(w.letters[:len(w) - pos])
                net0 = arc_to_net(Arc(center, radius), delta)
                out = induced_apply(sys, rest, net0, target_delta=target_delta)
                return replace(out, note="arc-fast-path-fallback")
        return Arc(center, radius)

    pts = np.atleast_2d(np.asarray(a.points, dtype=float))
    delta = a.delta
    power = _word_is_power(w)
    if power is not None and sys.generators[power[0]].conjugation is not None:
        idx, n = power
        h, h_inv, trans = sys.generators[idx].conjugation
        img = h((h_inv(pts) + n * np.asarray(trans)[None, :]) % 1.0)
        img = geom.normalize_coords(sys.manifold, img)
        lip = _estimate_lipschitz(sys.manifold, pts, img, delta)
        out_delta = delta * lip
    else:
        img = pts
        out_delta = delta
        for idx, inv in reversed(w.letters):
            gen = sys.generators[idx]
            nxt = sys.apply_letter((idx, inv), img)
            nxt = geom.normalize_coords(sys.manifold, nxt)
            if gen.is_isometry:
                lip = 1.0
            elif gen.lipschitz is not None:
                lip = gen.lipschitz
            else:
                lip = _estimate_lipschitz(sys.manifold, img, nxt, out_delta)
            out_delta *= lip
            img = nxt
    if target_delta is not None and out_delta > target_delta and a.base is not None:
        stretch = out_delta / delta
        fine = 0.9 * target_delta / stretch
        center, radius = a.base
        if fine < radius:
            src = closure_ball(geom.point(sys.manifold, center), radius,
                               delta=fine, force_net=True)
            return induced_apply(sys, w, src, target_delta=None)
    return Net(sys.manifold, img, out_delta, base=None, note=a.note)
