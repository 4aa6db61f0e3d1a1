"""Two-generator circle system: rotations on overlapping arcs.

f1 equals the rotation R_beta on the open arc i1, f2 equals R_gamma on
i2; on the complementary arcs each map is extended by a monotone C^1
bump added to the rotated lift, so both are degree-1 homeomorphisms
that are genuinely non-rotations off their arcs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .. import geom
from ..geom import CIRCLE, Point
from ..ifs import Generator, IfsSystem, Word


class ConstructionError(ValueError):
    """A config invariant (i)/(ii)/(iii) or a map bound is violated."""


BETA_DEFAULT = (math.sqrt(2.0) - 1.0) / 10.0
GAMMA_DEFAULT = BETA_DEFAULT + 0.001 * (math.pi - 3.0)


@dataclass(frozen=True)
class CircleExampleConfig:
    """Arcs are (lo, hi) traversed positively; i2 wraps through 0."""

    i1: tuple = (0.02, 0.98)
    i2: tuple = (0.7, 0.3)
    beta: float = BETA_DEFAULT
    gamma: float = GAMMA_DEFAULT
    #: fraction of the monotonicity limit used by the off-arc bump
    blend_bump: float = 0.4
    grid_points: int = 10**4


def _arc_len(arc) -> float:
    lo, hi = arc
    return (hi - lo) % 1.0


def _in_arc(p, lo, hi):
    """Open-arc membership, vectorized; arc runs positively lo -> hi."""
    rel = (np.asarray(p) - lo) % 1.0
    return (rel > 0.0) & (rel < _arc_len((lo, hi)))


def _dist_to_closed_arc(p, lo, hi):
    length = _arc_len((lo, hi))
    rel = (np.asarray(p) - lo) % 1.0
    inside = rel <= length
    d = np.minimum((rel - length) % 1.0, (lo - np.asarray(p)) % 1.0)
    return np.where(inside, 0.0, np.minimum(d, 1.0 - d))


def check_conditions(cfg: CircleExampleConfig) -> None:
    """Grid verification of the three cover conditions; raises naming
    the violated item."""
    xs = np.arange(cfg.grid_points) / cfg.grid_points
    if not np.all(_in_arc(xs, *cfg.i1) | _in_arc(xs, *cfg.i2)):
        raise ConstructionError("(i) violated: i1 and i2 do not cover S^1")
    comp_len = 1.0 - _arc_len(cfg.i1)
    if not comp_len < 1.0 / 20.0:
        raise ConstructionError(
            f"(ii) violated: m(complement of i1) = {comp_len} >= 1/20")
    comp = xs[~_in_arc(xs, *cfg.i1)]
    # B(x, 1/4) inside i2 <=> x stays 1/4 away from the complement of i2
    comp_i2 = (cfg.i2[1], cfg.i2[0])
    if comp.size and np.any(_dist_to_closed_arc(comp, *comp_i2) <= 0.25):
        raise ConstructionError(
            "(iii) violated: some x off i1 has B(x, 1/4) not inside i2")
    if not cfg.beta > comp_len:
        raise ConstructionError("beta must exceed m(complement of i1)")
    if cfg.beta == cfg.gamma:
        raise ConstructionError("beta and gamma must be distinct")
    if not (0.0 < cfg.blend_bump < 1.0):
        raise ConstructionError("blend_bump must be in (0, 1)")


def _make_map(arc, shift, blend_bump):
    """Circle homeomorphism equal to R_shift on the open arc, with a C^1
    monotone bump on the complement."""
    lo, hi = arc
    w = 1.0 - _arc_len(arc)  # complement length, traversed hi -> lo
    amp = blend_bump * w / math.pi

    def bump(x):
        u = (np.asarray(x, dtype=float) - hi) % 1.0
        val = np.where(u < w, amp * np.sin(math.pi * u / w) ** 2, 0.0)
        return val

    def forward(pts):
        x = np.asarray(pts, dtype=float)
        return (x + shift + bump(x[..., 0])[..., None]) % 1.0

    def inverse(pts):
        # contraction: x = y - shift - bump(x); rate = blend_bump < 1
        y = np.asarray(pts, dtype=float)
        x = (y - shift) % 1.0
        for _ in range(200):
            nxt = (y - shift - bump(x[..., 0])[..., None]) % 1.0
            step = np.abs(nxt - x)
            x = nxt
            if np.max(np.minimum(step, 1.0 - step)) < 1e-15:
                break
        return x

    return forward, inverse, 1.0 + blend_bump


def lebesgue_number(cfg: CircleExampleConfig) -> float:
    """Largest lambda with every lambda-ball inside i1 or i2 (grid minimax)."""
    xs = np.arange(cfg.grid_points) / cfg.grid_points
    r1 = _inradius(xs, cfg.i1)
    r2 = _inradius(xs, cfg.i2)
    return float(np.min(np.maximum(r1, r2)))


def _inradius(xs, arc):
    lo, hi = arc
    length = _arc_len(arc)
    rel = (xs - lo) % 1.0
    inside = rel < length
    return np.where(inside, np.minimum(rel, length - rel), 0.0)


def build_circle_system(cfg: CircleExampleConfig = None) -> IfsSystem:
    cfg = cfg or CircleExampleConfig()
    check_conditions(cfg)
    f1, f1i, lip1 = _make_map(cfg.i1, cfg.beta, cfg.blend_bump)
    f2, f2i, lip2 = _make_map(cfg.i2, cfg.gamma, cfg.blend_bump)
    gens = [
        Generator("f1", f1, f1i, rotation_domain=cfg.i1,
                  rotation_amount=cfg.beta, lipschitz=lip1),
        Generator("f2", f2, f2i, rotation_domain=cfg.i2,
                  rotation_amount=cfg.gamma, lipschitz=lip2),
    ]
    sys = IfsSystem(CIRCLE, gens)
    sys.metadata.update({
        "example": "circle",
        "config": {"i1": list(cfg.i1), "i2": list(cfg.i2),
                   "beta": cfg.beta, "gamma": cfg.gamma,
                   "blend_bump": cfg.blend_bump},
        "k_value": compute_k(cfg.beta, cfg.gamma),
        "lebesgue_number": lebesgue_number(cfg),
        "witness_strategy": _witness_adapter,
        "default_strategy": "system-specific",
        "cfg": cfg,
    })
    return sys


def compute_k(beta: float, gamma: float) -> int:
    """max{n : n*beta <= 1 - gamma}, guarded against float overshoot."""
    if beta <= 0.0:
        raise ConstructionError("beta must be positive")
    n = math.floor((1.0 - gamma) / beta + 1e-12)
    while n > 0 and n * beta > 1.0 - gamma:
        n -= 1
    return n


def omega_construction(sys: IfsSystem, x: Point, n: int,
                       ball_radius: float = 0.0):
    """Inductive symbol choice along the orbit of x.

    At the current point p the next symbol is 1 when p lies in i1
    (shrunk by ball_radius, so the whole ball of that radius stays in
    the rotation arc) and the arc just traversed did not swallow the
    complement of i1; otherwise the symbol is 2, which requires p in i2.
    Returns (word, orbit) where orbit[i] is the i-th prefix image of x.
    ball_radius = 0 is the pointwise rule; a positive radius is used for
    exact-arc witness certificates.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    cfg: CircleExampleConfig = sys.metadata["cfg"]
    lo1, hi1 = cfg.i1
    lo2, hi2 = cfg.i2
    comp_lo, comp_hi = hi1, lo1  # complement of i1, traversed positively
    p = float(x.array()[0])
    prev = None
    symbols = []
    orbit = []
    for _ in range(n):
        ok1 = _ball_in_arc(p, ball_radius, lo1, hi1)
        if ok1 and prev is not None and _arc_contains_arc(prev, p,
                                                          comp_lo, comp_hi):
            ok1 = False
        prev = p
        if ok1:
            symbols.append(0)
            p = (p + cfg.beta) % 1.0
        else:
            if not _ball_in_arc(p, ball_radius, lo2, hi2):
                raise ConstructionError(
                    f"no applicable symbol at {p} (ball radius {ball_radius})")
            symbols.append(1)
            p = (p + cfg.gamma) % 1.0
        orbit.append(p)
    # first-applied symbol goes last in the stored word
    return Word.from_indices(list(reversed(symbols))), orbit


def _ball_in_arc(p, radius, lo, hi):
    length = _arc_len((lo, hi))
    rel = (p - lo) % 1.0
    return radius < rel < length - radius


def _arc_contains_arc(a, b, lo, hi):
    """Does the positively-oriented arc [a, b] contain [lo, hi]?"""
    span = (b - a) % 1.0
    u = (lo - a) % 1.0
    v = (hi - a) % 1.0
    return u <= span and v <= span and u <= v


def symbol_frequency(word: Word, index: int = 0) -> float:
    if len(word) == 0:
        return 0.0
    return sum(1 for i, _ in word.letters if i == index) / len(word)


def circle_witness(sys: IfsSystem, x: Point, y: Point, r: float, theta: float,
                   budget: int = 5000):
    """Witness word via the inductive construction: run the ball-aware
    rule from x until the orbit point is within r/theta of y.  Every
    prefix then moves the arc B(x,r) by pure rotations, so the Hausdorff
    distance equals the point distance exactly."""
    from ..criteria import WitnessResult
    leb = sys.metadata["lebesgue_number"]
    if not r < leb:
        raise ConstructionError(
            f"r={r} must be below the cover's Lebesgue number {leb}")
    t0 = time.perf_counter()
    threshold = r / theta
    yv = float(y.array()[0])
    d0 = float(geom.circle_dist(float(x.array()[0]), yv))
    if d0 < threshold:
        return WitnessResult(True, Word(), d0, threshold - d0, 0,
                             "omega-construction", time.perf_counter() - t0)
    cfg: CircleExampleConfig = sys.metadata["cfg"]
    p = float(x.array()[0])
    prev = None
    symbols = []
    lo1, hi1 = cfg.i1
    lo2, hi2 = cfg.i2
    for i in range(int(budget)):
        ok1 = _ball_in_arc(p, r, lo1, hi1)
        if ok1 and prev is not None and _arc_contains_arc(prev, p, hi1, lo1):
            ok1 = False
        prev = p
        if ok1:
            symbols.append(0)
            p = (p + cfg.beta) % 1.0
        else:
            if not _ball_in_arc(p, r, lo2, hi2):
                raise ConstructionError(f"ball of radius {r} fits neither arc "
                                        f"at {p}")
            symbols.append(1)
            p = (p + cfg.gamma) % 1.0
        d = float(geom.circle_dist(p, yv))
        if d < threshold:
            w = Word.from_indices(list(reversed(symbols)))
            return WitnessResult(True, w, d, threshold - d, i + 1,
                                 "omega-construction",
                                 time.perf_counter() - t0)
    return WitnessResult(False, None, math.inf, -math.inf, int(budget),
                         "budget-exhausted", time.perf_counter() - t0)


def _witness_adapter(sys, x, y, r, theta, budget):
    return circle_witness(sys, x, y, r, theta,
                          budget=int((budget or {}).get("max_steps", 5000)))
