"""Numerical verifiers for the overlap, hyper-minimality, minimality
and ergodicity-proxy conditions.

All quantified conditions are checked on finite samples and grids; the
reports state sample counts and never claim a proof.  Threshold tests
are resolution-inclusive: a witness certificate requires

    d_H(nets) + delta_A + delta_B < r / theta,

so discretization slack can only cause false negatives.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import geom, hyper
from .geom import CIRCLE, SPHERE, TORUS, GeomError, Point
from .hyper import closure_ball, hausdorff, induced_apply, resolution
from .ifs import IfsSystem, Word, apply_word_coords, enumerate_words
from .report import VerifierReport, fmt_coords

#: default overlap parameters for theta = 6 (validated by the closed form
#: (1 - 1/theta)^dim * (1 - ell) > t on every manifold in scope)
DEFAULT_T = 0.1
DEFAULT_ELL = 0.8

#: resolution cap used when certifying witnesses with nets
DELTA_CAP_FACTOR = 10.0


@dataclass(frozen=True)
class OverlapParams:
    theta: float
    t: float = DEFAULT_T
    ell: float = DEFAULT_ELL

    def __post_init__(self):
        if not self.theta > 1.0:
            raise GeomError("theta must exceed 1")
        if not (0.0 <= self.t <= 0.5):
            raise GeomError("t must be in [0, 1/2]")
        if not (0.0 < self.ell < 1.0):
            raise GeomError("ell must be in (0, 1)")


@dataclass
class WitnessResult:
    found: bool
    word: Optional[Word]
    certified_distance: float
    margin: float
    nodes_expanded: int = 0
    mode: str = ""
    wall_time: float = 0.0


def require_hyper_theta(theta: float) -> None:
    if not theta > 5.0:
        raise GeomError("hyper-minimality checks need theta > 5")


# ---------------------------------------------------------------------------
# overlap numbers, Eq.-style margin


def overlap_margin_closed_form(manifold: str, params: OverlapParams,
                               r: float) -> float:
    """Relative margin of the overlap inequality under the containment
    reduction: (1-ell) * m(B(r - r/theta)) / m(B(r)) - t."""
    inner = geom.ball_measure(manifold, r - r / params.theta)
    outer = geom.ball_measure(manifold, r)
    return (1.0 - params.ell) * inner / outer - params.t


def check_overlap_number(manifold: str, params: OverlapParams, radii,
                         samples_per_radius: int, seed: int,
                         mc_validate: int = 0,
                         mc_samples: int = 10**6) -> VerifierReport:
    """Sampled check of the overlap inequality.

    For y within B(x, r/theta) the ball B(y, r - r/theta) is contained
    in B(x, r), so the margin is y-independent; the sampled evaluation
    validates exactly that identity.  mc_validate > 0 additionally
    re-estimates a few intersections by direct Monte Carlo.
    """
    rng = np.random.default_rng(seed)
    rep = VerifierReport(
        condition="overlap-number",
        parameters={"manifold": manifold, "theta": params.theta,
                    "t": params.t, "ell": params.ell,
                    "radii": [float(r) for r in radii],
                    "samples_per_radius": samples_per_radius},
        seed=seed,
    )
    t0 = time.perf_counter()
    min_rel = math.inf
    sid = 0
    mc_left = mc_validate
    for r in radii:
        outer = geom.ball_measure(manifold, r)
        inner_r = r - r / params.theta
        inner = geom.ball_measure(manifold, inner_r)
        closed = overlap_margin_closed_form(manifold, params, r)
        for _ in range(samples_per_radius):
            x = geom.sample_point(manifold, rng)
            y = geom.point(manifold, geom.sample_ball(
                manifold, x.array(), r / params.theta, 1, rng)[0])
            inter = geom.ball_intersection_measure(x, r, y, inner_r,
                                                   seed=int(rng.integers(2**31)))
            margin_abs = inter - params.t * outer - params.ell * inner
            margin_rel = margin_abs / outer
            row = {"sample_id": sid, "x": fmt_coords(x.coords),
                   "y": fmt_coords(y.coords), "r": float(r),
                   "found": margin_rel > 0.0,
                   "certified_distance": "",
                   "margin": float(margin_rel), "word": ""}
            if mc_left > 0:
                est, se, _ = geom.ball_intersection_info(
                    x, r, y, inner_r, seed=int(rng.integers(2**31)),
                    n_samples=mc_samples)
                mc, sem, _ = _mc_intersection(manifold, x, r, y, inner_r,
                                              mc_samples, rng)
                row["mc_intersection"] = float(mc)
                row["mc_stderr"] = float(sem)
                row["analytic_intersection"] = float(est)
                mc_left -= 1
            rep.samples.append(row)
            min_rel = min(min_rel, margin_rel)
            sid += 1
        rep.notes.append(
            f"r={r!r}: closed-form relative margin {closed!r}")
    rep.aggregate = {"min_relative_margin": float(min_rel),
                     "passed": min_rel > 0.0,
                     "claim": "sampled check, not a proof"}
    rep.runtime_seconds = time.perf_counter() - t0
    return rep


def _mc_intersection(manifold, x, rx, y, ry, n, rng):
    pts = geom.sample_ball(manifold, x.array(), rx, n, rng)
    hits = geom.dist_to_point(manifold, pts, y.array()) <= ry
    p = float(np.mean(hits))
    base = geom.ball_measure(manifold, rx)
    se = base * math.sqrt(max(p * (1 - p), 1e-300) / n)
    return base * p, se, "monte-carlo"


# ---------------------------------------------------------------------------
# witness certification


def certify_word(sys: IfsSystem, w: Word, x: Point, y: Point, r: float,
                 theta: float):
    """Resolution-inclusive certificate for one candidate word.

    Returns (certified, d_h, delta_total, mode).  Uses the cheapest
    exact route available: isometry words move balls to balls of the
    same radius, circle words may stay on the exact-arc fast path, and
    the general case compares delta-nets.
    """
    all_iso = all(sys.generators[i].is_isometry for i, _ in w.letters)
    if all_iso:
        img = apply_word_coords(sys, w, x.array()[None, :])[0]
        d = geom.dist(geom.point(sys.manifold, img), y)
        return d, d, 0.0, "isometry-exact"
    if sys.manifold == CIRCLE:
        a = induced_apply(sys, w, closure_ball(x, r))
        b = closure_ball(y, r)
        if isinstance(a, hyper.Arc):
            d = hausdorff(a, b)
            return d, d, 0.0, "arc-exact"
        d = hausdorff(a, b)
        dt = resolution(a) + resolution(b)
        return d + dt, d, dt, "net"
    delta = r / (DELTA_CAP_FACTOR * theta)
    src = closure_ball(x, r, delta=delta, force_net=True)
    a = induced_apply(sys, w, src, target_delta=delta)
    b = closure_ball(y, r, delta=delta, force_net=True)
    d = hausdorff(a, b)
    dt = resolution(a) + resolution(b)
    return d + dt, d, dt, "net"


# ---------------------------------------------------------------------------
# witness search


def find_witness(sys: IfsSystem, x: Point, y: Point, r: float, theta: float,
                 budget: dict = None, strategy: str = "greedy",
                 seed: int = 0) -> WitnessResult:
    """Search for a word whose induced image of B(x,r)' lands within
    r/theta of B(y,r)' in the Hausdorff metric (certified)."""
    require_hyper_theta(theta)
    budget = dict(budget or {})
    threshold = r / theta
    t0 = time.perf_counter()

    # identity witness
    d0 = geom.dist(x, y)
    if d0 < threshold:
        return WitnessResult(True, Word(), d0, threshold - d0, 0, "identity",
                             time.perf_counter() - t0)

    if strategy == "system-specific":
        fn = sys.metadata.get("witness_strategy")
        if fn is None:
            raise GeomError("system declares no witness strategy")
        return fn(sys, x, y, r, theta, budget)
    if strategy == "exhaustive":
        return _exhaustive_search(sys, x, y, r, theta, budget, t0)
    if strategy == "greedy":
        return _greedy_search(sys, x, y, r, theta, budget, seed, t0)
    raise GeomError(f"unknown strategy {strategy!r}")


def _exhaustive_search(sys, x, y, r, theta, budget, t0):
    max_len = int(budget.get("max_len", 8))
    with_inv = bool(budget.get("with_inverses", False)) and sys.has_inverses()
    threshold = r / theta
    nodes = 0
    for w in enumerate_words(sys.k, max_len, with_inv,
                             max_count=int(budget.get("max_words", 10**6))):
        nodes += 1
        cert, _, _, mode = certify_word(sys, w, x, y, r, theta)
        if cert < threshold:
            return WitnessResult(True, w, cert, threshold - cert, nodes, mode,
                                 time.perf_counter() - t0)
    return WitnessResult(False, None, math.inf, -math.inf, nodes,
                         "exhausted", time.perf_counter() - t0)


def _greedy_search(sys, x, y, r, theta, budget, seed, t0):
    """Greedy best-first beam search on the point-distance proxy.

    A visited set over rounded coordinates keeps the frontier moving
    into new territory (otherwise the beam settles on a locally optimal
    set and cycles); restarts reseed the tie-breaking jitter and resume
    from the start with the visited set intact.  Certification of a
    promising candidate is exact for isometry words and
    resolution-inclusive otherwise.
    """
    beam_width = int(budget.get("beam_width", 8))
    max_depth = int(budget.get("max_depth", 200))
    restarts = int(budget.get("restarts", 8))
    with_inv = bool(budget.get("with_inverses", True)) and sys.has_inverses()
    threshold = r / theta
    # non-isometry words need headroom for the net certificate
    slack = 1.0 if sys.all_isometries() else float(budget.get("proxy_slack", 0.6))
    letters = [(i, False) for i in range(sys.k)]
    if with_inv:
        letters += [(i, True) for i in range(sys.k)]
    ycoords = y.array()
    quant = max(1e-9, threshold / 50.0)
    nodes = 0
    best = None
    visited = set()
    rng = np.random.default_rng(seed)
    for restart in range(restarts):
        pts = x.array()[None, :]
        words = [()]
        for depth in range(max_depth):
            cand_pts = []
            cand_words = []
            for letter in letters:
                img = sys.apply_letter(letter, pts)
                cand_pts.append(img)
                cand_words.extend(w + (letter,) for w in words)
            allpts = geom.normalize_coords(sys.manifold,
                                           np.concatenate(cand_pts, axis=0))
            nodes += allpts.shape[0]
            d = geom.dist_to_point(sys.manifold, allpts, ycoords)
            i = int(np.argmin(d))
            if best is None or d[i] < best[0]:
                best = (float(d[i]), cand_words[i])
            if d[i] < slack * threshold:
                w = _letters_to_word(cand_words[i])
                cert, dh, dt, mode = certify_word(sys, w, x, y, r, theta)
                if cert < threshold:
                    return WitnessResult(True, w, cert, threshold - cert,
                                         nodes, mode,
                                         time.perf_counter() - t0)
            # dedup, drop already-visited points, prune to beam with
            # jittered tie breaking per restart
            key = np.round(allpts / quant).astype(np.int64)
            _, idx = np.unique(key, axis=0, return_index=True)
            fresh = [j for j in idx if tuple(key[j]) not in visited]
            if not fresh:
                break
            fresh = np.asarray(fresh)
            dj = d[fresh] + (rng.random(fresh.size) * threshold * 0.01 * restart)
            order = np.argsort(dj)[:beam_width]
            keep = fresh[order]
            visited.update(tuple(key[j]) for j in keep)
            pts = allpts[keep]
            words = [cand_words[j] for j in keep]
    return WitnessResult(False, None,
                         best[0] if best else math.inf, -math.inf,
                         nodes, "exhausted", time.perf_counter() - t0)


def _letters_to_word(letters) -> Word:
    # search appends the last-applied letter at the end; Word stores the
    # last-applied letter first
    return Word(tuple(reversed(letters)))


# ---------------------------------------------------------------------------
# hyper-minimality (global and local)


def check_hyper_minimal(sys: IfsSystem, theta: float, r0: float,
                        n_pairs: int, radii, budget: dict, seed: int,
                        strategy: str = None) -> VerifierReport:
    """Sampled Definition-style check: witnesses for random pairs at all
    listed radii below r0.  A sampled check, never a proof."""
    require_hyper_theta(theta)
    sampler = _uniform_pair_sampler(sys.manifold)
    return _hyper_minimal_report(sys, theta, r0, n_pairs, radii, budget,
                                 seed, sampler, "hyper-minimal", strategy)


def check_local_hyper_minimal(sys: IfsSystem, U_center: Point, U_radius: float,
                              theta: float, r0: float, n_pairs: int, radii,
                              budget: dict, seed: int,
                              U_prime_sampler: Callable = None,
                              strategy: str = None) -> VerifierReport:
    """Local variant: x sampled from U' (default: U itself), y from U."""
    require_hyper_theta(theta)

    def sampler(rng):
        if U_prime_sampler is not None:
            x = U_prime_sampler(rng)
            if geom.dist(x, U_center) > U_radius:
                raise GeomError("U' sampler yielded a point outside U")
        else:
            x = geom.point(sys.manifold, geom.sample_ball(
                sys.manifold, U_center.array(), U_radius, 1, rng)[0])
        y = geom.point(sys.manifold, geom.sample_ball(
            sys.manifold, U_center.array(), U_radius, 1, rng)[0])
        return x, y

    rep = _hyper_minimal_report(sys, theta, r0, n_pairs, radii, budget, seed,
                                sampler, "local-hyper-minimal", strategy)
    rep.parameters["u_center"] = fmt_coords(U_center.coords)
    rep.parameters["u_radius"] = float(U_radius)
    return rep


def _uniform_pair_sampler(manifold):
    def sampler(rng):
        return geom.sample_point(manifold, rng), geom.sample_point(manifold, rng)
    return sampler


def _hyper_minimal_report(sys, theta, r0, n_pairs, radii, budget, seed,
                          sampler, condition, strategy):
    for r in radii:
        if not r < r0:
            raise GeomError(f"radius {r} not below r0={r0}")
    strategy = strategy or sys.metadata.get("default_strategy", "greedy")
    rng = np.random.default_rng(seed)
    rep = VerifierReport(
        condition=condition,
        parameters={"theta": theta, "r0": r0, "n_pairs": n_pairs,
                    "radii": [float(r) for r in radii],
                    "strategy": strategy, "budget": _jsonable(budget)},
        seed=seed,
    )
    t0 = time.perf_counter()
    successes = 0
    total = 0
    worst = math.inf
    for i in range(n_pairs):
        x, y = sampler(rng)
        for r in radii:
            res = find_witness(sys, x, y, r, theta, budget=budget,
                               strategy=strategy,
                               seed=int(rng.integers(2**31)))
            total += 1
            successes += res.found
            if res.found:
                worst = min(worst, res.margin)
            rep.samples.append({
                "sample_id": total - 1, "x": fmt_coords(x.coords),
                "y": fmt_coords(y.coords), "r": float(r),
                "found": bool(res.found),
                "certified_distance": float(res.certified_distance),
                "margin": float(res.margin) if res.found else "",
                "word": " ".join(str(v) for v in res.word.serialize())
                        if res.word is not None else "",
            })
    rep.aggregate = {
        "success_rate": successes / max(total, 1),
        "worst_margin": worst if worst < math.inf else None,
        "passed": successes == total,
        "claim": "sampled check, not a proof",
    }
    rep.runtime_seconds = time.perf_counter() - t0
    return rep


def _jsonable(d):
    return {k: (v if isinstance(v, (int, float, str, bool)) else str(v))
            for k, v in (d or {}).items()}


# ---------------------------------------------------------------------------
# minimality via orbit density


def check_minimality_density(sys: IfsSystem, x: Point, eps: float,
                             budget: int = 10**6) -> dict:
    """Grow the forward orbit of x breadth-first until it is eps-dense
    (every cell of an eps-grid hit) or the point budget runs out."""
    if eps <= 0:
        raise GeomError("eps must be positive")
    grid = geom.Grid(sys.manifold, eps)
    fine = geom.Grid(sys.manifold, eps / 4.0)
    hit = np.zeros(grid.ncells, dtype=bool)
    seen = np.zeros(fine.ncells, dtype=bool)
    pts = x.array()[None, :]
    total = 0
    while pts.shape[0] > 0 and total < budget:
        hit[grid.cell_index(pts)] = True
        if hit.all():
            return {"dense": True, "steps_used": total,
                    "coverage": 1.0, "eps": eps}
        images = [sys.apply_letter((i, False), pts) for i in range(sys.k)]
        nxt = geom.normalize_coords(sys.manifold, np.concatenate(images, axis=0))
        cells = fine.cell_index(nxt)
        mask = ~seen[cells]
        _, first = np.unique(cells[mask], return_index=True)
        seen[cells] = True
        pts = nxt[mask][first]
        total += nxt.shape[0]
    hitcount = int(np.count_nonzero(hit))
    return {"dense": bool(hit.all()), "steps_used": total,
            "coverage": hitcount / grid.ncells, "eps": eps}


# ---------------------------------------------------------------------------
# density points and the ergodicity proxy


def density_ratio(membership: Callable[[np.ndarray], np.ndarray], p: Point,
                  kappa: float, n_samples: int, seed: int):
    """Monte Carlo estimate of m(S : B(p,kappa)) for a sampled set S.

    membership maps an (n, d) array to booleans.  Returns (ratio, stderr).
    """
    rng = np.random.default_rng(seed)
    pts = geom.sample_ball(p.manifold, p.array(), kappa, n_samples, rng)
    inside = np.asarray(membership(pts), dtype=bool)
    ratio = float(np.mean(inside))
    se = math.sqrt(max(ratio * (1.0 - ratio), 1e-300) / n_samples)
    return ratio, se


def invariant_hull_coverage(sys: IfsSystem, U0_center: Point, U0_radius: float,
                            eps: float, max_depth: int,
                            point_budget: int = 4 * 10**6) -> list:
    """Coverage fractions of an eps-grid by forward images of U0.

    Monotone nondecreasing by construction.  Under minimality coverage
    tends to 1, so any invariant measurable set containing U0 must be
    conull; this is a necessary-condition probe for ergodicity only.
    """
    grid = geom.Grid(sys.manifold, eps)
    fine = geom.Grid(sys.manifold, eps / 2.0)
    hit = np.zeros(grid.ncells, dtype=bool)
    pts = geom.net(U0_center, U0_radius, eps / 4.0)
    coverages = []
    total = 0
    for depth in range(max_depth + 1):
        hit[grid.cell_index(pts)] = True
        coverages.append(float(np.count_nonzero(hit)) / grid.ncells)
        if hit.all() or total > point_budget:
            if depth < max_depth:
                coverages.extend([coverages[-1]] * (max_depth - depth))
            break
        # thin the frontier to one representative per fine cell; the
        # dedup is per depth only, so orbits keep flowing through
        # already-covered territory instead of stalling there
        fc = fine.cell_index(pts)
        _, first = np.unique(fc, return_index=True)
        frontier = pts[first]
        images = [sys.apply_letter((i, False), frontier) for i in range(sys.k)]
        pts = geom.normalize_coords(sys.manifold, np.concatenate(images, axis=0))
        total += pts.shape[0]
    return coverages
