"""Two-rotation sphere system: T about the z-axis, R about the x-axis.

Both rotation angles are irrational multiples of the full turn, so each
generator is minimal on its invariant circles; together they act
transitively enough that short words approximate any target rotation.
Each generator also has an explicit geometric description (project to
the invariant equator, advance along it, lift back), kept alongside the
matrix form and cross-checked at build time.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .. import geom
from ..geom import RHO, SPHERE, Point
from ..ifs import Generator, IfsSystem, Word, apply_word_coords
from .circle import ConstructionError


@dataclass(frozen=True)
class SphereExampleConfig:
    gamma1: float = math.sqrt(2.0) - 1.0          # z-axis rotation, turns
    gamma2: float = (math.sqrt(3.0) - 1.0) / 2.0  # x-axis rotation, turns
    validate: bool = True
    validate_samples: int = 1000
    validate_seed: int = 7


def _rot_matrix(axis: str, turns: float) -> np.ndarray:
    return Rotation.from_euler(axis, 2.0 * math.pi * turns).as_matrix()


def _formula_rotation(axis_idx: int, turns: float):
    """Rotation about coordinate axis axis_idx, written geometrically as
    three steps: project a point along its meridian to the oriented
    equator of the pole pair, advance by the given arc length along the
    equator, then lift back to the original parallel.  Kept as an
    independent second route next to the matrix form; the poles are the
    (removable) singular points of the projection."""
    j, k = [(1, 2), (2, 0), (0, 1)][axis_idx]

    def project(p):
        """Meridian projection to the equator: keep the phase, move to
        planar radius rho, drop the axial coordinate."""
        phase = np.arctan2(p[:, k], p[:, j])
        eq = np.zeros_like(p)
        eq[:, j] = RHO * np.cos(phase)
        eq[:, k] = RHO * np.sin(phase)
        return eq

    def advance(eq):
        """Slide arc length = turns along the unit-length equator."""
        ang = 2.0 * math.pi * turns
        phase = np.arctan2(eq[:, k], eq[:, j]) + ang
        out = np.zeros_like(eq)
        out[:, j] = RHO * np.cos(phase)
        out[:, k] = RHO * np.sin(phase)
        return out

    def lift(eq, p):
        """Back up the meridian to the parallel of the original point."""
        rad = np.hypot(p[:, j], p[:, k])
        phase = np.arctan2(eq[:, k], eq[:, j])
        out = p.copy()
        out[:, j] = rad * np.cos(phase)
        out[:, k] = rad * np.sin(phase)
        return out

    def apply(pts):
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        on_pole = np.hypot(p[:, j], p[:, k]) < 1e-15
        out = lift(advance(project(p)), p)
        out[on_pole] = p[on_pole]
        return out

    apply.project = project
    apply.advance = advance
    apply.lift = lift
    return apply


def _matrix_map(M: np.ndarray):
    def apply(pts):
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        return p @ M.T
    return apply


def cross_check_paths(cfg: SphereExampleConfig) -> float:
    """Max deviation between the matrix route and the geometric route
    over random sample points; raises on disagreement."""
    rng = np.random.default_rng(cfg.validate_seed)
    pts = geom.sample_uniform(SPHERE, cfg.validate_samples, rng)
    worst = 0.0
    for axis, axidx, turns in (("z", 2, cfg.gamma1), ("x", 0, cfg.gamma2)):
        a = _matrix_map(_rot_matrix(axis, turns))(pts)
        b = _formula_rotation(axidx, turns)(pts)
        worst = max(worst, float(np.max(np.abs(a - b))))
    if worst > 1e-12:
        raise ConstructionError(
            f"matrix and geometric rotation routes disagree by {worst}")
    return worst


def build_sphere_system(cfg: SphereExampleConfig = None) -> IfsSystem:
    cfg = cfg or SphereExampleConfig()
    for g in (cfg.gamma1, cfg.gamma2):
        if abs(g) < 1e-9 or abs(g - round(g)) < 1e-9:
            raise ConstructionError("rotation amounts must be nonzero "
                                    "fractional turns")
    if cfg.validate:
        cross_check_paths(cfg)
    Mz = _rot_matrix("z", cfg.gamma1)
    Mx = _rot_matrix("x", cfg.gamma2)
    gens = [
        Generator("T", _matrix_map(Mz), _matrix_map(Mz.T), is_isometry=True),
        Generator("R", _matrix_map(Mx), _matrix_map(Mx.T), is_isometry=True),
    ]
    sys = IfsSystem(SPHERE, gens)
    sys.metadata.update({
        "example": "sphere",
        "config": {"gamma1": cfg.gamma1, "gamma2": cfg.gamma2},
        "matrices": [Mz, Mx],
        "witness_strategy": _witness_adapter,
        "default_strategy": "system-specific",
        "cfg": cfg,
    })
    return sys


def word_matrix(sys: IfsSystem, w: Word) -> np.ndarray:
    Ms = sys.metadata["matrices"]
    out = np.eye(3)
    for idx, inv in w.letters:
        M = Ms[idx].T if inv else Ms[idx]
        out = out @ M
    return out


def word_rotation_axis(sys: IfsSystem, w: Word) -> dict:
    """Axis and angle of the composed rotation, with its fixed points.

    Near-identity words have an ill-conditioned axis; the result is
    flagged unreliable rather than rejected.
    """
    M = word_matrix(sys, w)
    rv = Rotation.from_matrix(M).as_rotvec()
    angle = float(np.linalg.norm(rv))
    reliable = angle > 1e-8
    axis = rv / angle if reliable else np.array([0.0, 0.0, 1.0])
    residual = float(np.max(np.abs(M @ M.T - np.eye(3))))
    return {
        "axis": axis,
        "angle": angle,
        "fixed_points": (geom.point(SPHERE, RHO * axis),
                         geom.point(SPHERE, -RHO * axis)),
        "reliable": reliable,
        "orthogonality_residual": residual,
    }


def equicontinuity_check(sys: IfsSystem, n_words: int, max_len: int,
                         n_pairs: int, seed: int) -> dict:
    """Isometries preserve distances exactly; report the worst observed
    deviation |d(w p, w q) - d(p, q)| over random words and point pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_words):
        length = int(rng.integers(1, max_len + 1))
        letters = tuple((int(rng.integers(sys.k)), bool(rng.integers(2)))
                        for _ in range(length))
        w = Word(letters)
        p = geom.sample_uniform(SPHERE, n_pairs, rng)
        q = geom.sample_uniform(SPHERE, n_pairs, rng)
        d0 = geom.sphere_dist(p, q)
        d1 = geom.sphere_dist(apply_word_coords(sys, w, p),
                              apply_word_coords(sys, w, q))
        worst = max(worst, float(np.max(np.abs(d1 - d0))))
    return {"max_deviation": worst, "equicontinuous": worst < 1e-9,
            "n_words": n_words, "n_pairs": n_pairs}


# ---------------------------------------------------------------------------
# constructive witness: three-stage axis decomposition


def _best_multiple(turns: float, target: float, nmax: int):
    """n in [0, nmax] minimizing circle distance from n*turns to target."""
    n = np.arange(nmax + 1)
    d = np.abs(((n * turns - target) + 0.5) % 1.0 - 0.5)
    j = int(np.argmin(d))
    return j, float(d[j])


def sphere_witness(sys: IfsSystem, x: Point, y: Point, r: float, theta: float,
                   nmax: int = 20000):
    """Constructive witness word of the shape T^a R^b T^c.

    A z-x-z rotation sequence carrying x to y exists in closed form;
    each continuous angle is approximated by an integer multiple of the
    generator's irrational angle.  Since every generator is an isometry
    the Hausdorff distance of the moved ball equals the moved-point
    distance, certified exactly.
    """
    from ..criteria import WitnessResult
    t0 = time.perf_counter()
    threshold = r / theta
    xv = x.array() / RHO
    yv = y.array() / RHO
    cfg: SphereExampleConfig = sys.metadata["cfg"]

    # stage 1 (about z): bring x to the x3-meridian with positive second
    # coordinate
    s = math.hypot(xv[0], xv[1])
    xi = 0.5 * math.pi - math.atan2(xv[1], xv[0]) if s > 1e-12 else 0.0
    # stage 2 (about x): match the target height y3
    phi = math.atan2(xv[2], s)
    beta = math.asin(max(-1.0, min(1.0, yv[2]))) - phi
    # approximate, then recompute stage 3 from the actually-reached point
    c, _ = _best_multiple(cfg.gamma1, xi / (2.0 * math.pi), nmax)
    b, _ = _best_multiple(cfg.gamma2, beta / (2.0 * math.pi), nmax)
    Mz, Mx = sys.metadata["matrices"]
    mid = np.linalg.matrix_power(Mx, b) @ np.linalg.matrix_power(Mz, c) @ xv
    alpha = math.atan2(yv[1], yv[0]) - math.atan2(mid[1], mid[0])
    a, _ = _best_multiple(cfg.gamma1, (alpha / (2.0 * math.pi)) % 1.0, nmax)

    w = Word.power(0, a) + Word.power(1, b) + Word.power(0, c)
    img = apply_word_coords(sys, w, x.array()[None, :])[0]
    d = float(geom.sphere_dist(img[None, :], y.array()[None, :])[0])
    if d < threshold:
        return WitnessResult(True, w, d, threshold - d, a + b + c,
                             "euler-decomposition", time.perf_counter() - t0)
    return WitnessResult(False, w, d, threshold - d, a + b + c,
                         "euler-decomposition-miss", time.perf_counter() - t0)


def _witness_adapter(sys, x, y, r, theta, budget):
    return sphere_witness(sys, x, y, r, theta,
                          nmax=int((budget or {}).get("nmax", 20000)))
