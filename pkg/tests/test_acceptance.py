"""Acceptance gate: one test per stated criterion, each printing a
single PASS/FAIL line with the measured quantities."""

import json
import math
import time

import numpy as np
import pytest

from hyperifs import geom
from hyperifs.criteria import (OverlapParams, check_minimality_density,
                               check_overlap_number, find_witness,
                               invariant_hull_coverage,
                               overlap_margin_closed_form)
from hyperifs.geom import CIRCLE, RHO, SPHERE, TORUS, point
from hyperifs.hyper import Arc, Net, arc_to_net, closure_ball, hausdorff
from hyperifs.ifs import Word, apply_word_coords, enumerate_words
from hyperifs.zoo import (build_circle_system, build_sphere_system,
                          build_torus_system)
from hyperifs.zoo.circle import (CircleExampleConfig, check_conditions,
                                 circle_witness, compute_k,
                                 omega_construction, symbol_frequency)
from hyperifs.zoo.sphere import (SphereExampleConfig, cross_check_paths,
                                 equicontinuity_check, word_rotation_axis)
from hyperifs.zoo.torus import (TorusExampleConfig, _wrap_diff, make_h,
                                torus_return_index)


def report(num, ok, detail):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def test_criterion_1_overlap_closed_forms():
    t0 = time.perf_counter()
    params = OverlapParams(theta=6.0, t=0.1, ell=0.8)
    ok = True
    details = []

    # circle: y-independent relative margin = 1/15, MC agrees within 1e-2
    rep = check_overlap_number(CIRCLE, params, [0.05], 20, seed=11,
                               mc_validate=1, mc_samples=10**6)
    margins = [s["margin"] for s in rep.samples]
    ok &= max(abs(m - 1 / 15) for m in margins) < 1e-9
    ok &= (max(margins) - min(margins)) < 1e-9
    row = next(s for s in rep.samples if "mc_intersection" in s)
    mc_margin = (row["mc_intersection"] - params.t * geom.ball_measure(
        CIRCLE, 0.05) - params.ell * geom.ball_measure(
            CIRCLE, 0.05 - 0.05 / 6)) / geom.ball_measure(CIRCLE, 0.05)
    ok &= abs(mc_margin - 1 / 15) < 1e-2
    details.append(f"circle margin {margins[0]:.6f} (target {1/15:.6f}, "
                   f"mc {mc_margin:.6f})")

    # torus: 5/36 - 0.1
    rep = check_overlap_number(TORUS, params, [0.1], 20, seed=12,
                               mc_validate=1, mc_samples=10**6)
    margins = [s["margin"] for s in rep.samples]
    target = 5 / 36 - 0.1
    ok &= max(abs(m - target) for m in margins) < 1e-9
    ok &= (max(margins) - min(margins)) < 1e-9
    row = next(s for s in rep.samples if "mc_intersection" in s)
    mc_margin = (row["mc_intersection"] - params.t * geom.ball_measure(
        TORUS, 0.1) - params.ell * geom.ball_measure(
            TORUS, 0.1 - 0.1 / 6)) / geom.ball_measure(TORUS, 0.1)
    ok &= abs(mc_margin - target) < 1e-2
    details.append(f"torus margin {margins[0]:.6f} (target {target:.6f}, "
                   f"mc {mc_margin:.6f})")

    # sphere: positive margin for r <= 0.1
    worst = min(overlap_margin_closed_form(SPHERE, params, r)
                for r in np.linspace(0.005, 0.1, 20))
    ok &= worst > 0
    details.append(f"sphere worst margin {worst:.6f} over r<=0.1")

    dt = time.perf_counter() - t0
    ok &= dt < 30.0
    assert report(1, ok, "; ".join(details) + f"; runtime {dt:.1f}s < 30s")


def test_criterion_2_eq1_sampled():
    t0 = time.perf_counter()
    params = OverlapParams(theta=6.0)
    rng = np.random.default_rng(21)
    worst = math.inf
    max_r = {CIRCLE: 0.45, TORUS: 0.3, SPHERE: 0.45}
    for manifold in (CIRCLE, TORUS, SPHERE):
        radii = sorted(rng.uniform(0.01, max_r[manifold], size=10))
        rep = check_overlap_number(manifold, params, radii, 100, seed=22)
        assert len(rep.samples) == 1000
        worst = min(worst, rep.aggregate["min_relative_margin"])
    dt = time.perf_counter() - t0
    ok = worst > 0 and dt < 60.0
    assert report(2, ok, f"min margin {worst:.6f} over 1000 triples per "
                         f"manifold; runtime {dt:.1f}s < 60s")


def test_criterion_3_hausdorff_axioms():
    rng = np.random.default_rng(31)
    ok = True
    for _ in range(10_000):
        manifold = [CIRCLE, TORUS, SPHERE][int(rng.integers(3))]
        nets = [Net(manifold, geom.sample_uniform(
            manifold, int(rng.integers(1, 8)), rng), 0.01) for _ in range(3)]
        dab = hausdorff(nets[0], nets[1])
        dba = hausdorff(nets[1], nets[0])
        dbc = hausdorff(nets[1], nets[2])
        dac = hausdorff(nets[0], nets[2])
        ok &= dab == dba
        ok &= hausdorff(nets[0], nets[0]) == 0.0
        ok &= dac <= dab + dbc + 1e-12
    worst_gap = 0.0
    for _ in range(1000):
        a = Arc(float(rng.random()), float(rng.uniform(0.02, 0.3)))
        b = Arc(float(rng.random()), float(rng.uniform(0.02, 0.3)))
        delta = 0.002
        exact = hausdorff(a, b)
        approx = hausdorff(arc_to_net(a, delta), arc_to_net(b, delta))
        worst_gap = max(worst_gap, abs(exact - approx))
    ok &= worst_gap <= 2 * 0.002
    assert report(3, ok, f"axioms exact on 10^4 triples; arc/net gap "
                         f"{worst_gap:.5f} <= 2*delta=0.004 on 10^3 cases")


def test_criterion_4_circle_example():
    t0 = time.perf_counter()
    cfg = CircleExampleConfig()
    check_conditions(cfg)
    sys_ = build_circle_system(cfg)
    ok = compute_k(cfg.beta, cfg.gamma) == 23

    x = point(CIRCLE, [0.37])
    w, orbit = omega_construction(sys_, x, 10**5)
    freq = symbol_frequency(w, 0)
    ok &= abs(freq - 22 / 23) < 0.01

    # pure-rotation validity of every step: inside its domain each map
    # is exactly x + shift mod 1, so the recorded orbit must match
    prev = 0.37
    drift = 0.0
    for sym, rec in zip(reversed(w.letters), orbit):
        expect = (prev + (cfg.beta if sym[0] == 0 else cfg.gamma)) % 1.0
        e = abs(rec - expect)
        drift = max(drift, min(e, 1.0 - e))
        prev = rec
    ok &= drift < 1e-9

    rng = np.random.default_rng(41)
    found = 0
    max_len = 0
    worst = 0.0
    for _ in range(100):
        a = point(CIRCLE, [rng.random()])
        b = point(CIRCLE, [rng.random()])
        res = circle_witness(sys_, a, b, 0.02, 6.0, budget=5000)
        if res.found and res.certified_distance < 0.02 / 6:
            found += 1
            max_len = max(max_len, len(res.word))
            worst = max(worst, res.certified_distance)
    ok &= found == 100 and max_len <= 5000
    dt = time.perf_counter() - t0
    ok &= dt < 120.0
    assert report(4, ok, f"conditions ok, k=23, freq {freq:.4f} "
                         f"(target {22/23:.4f}), prefix drift {drift:.1e}, "
                         f"witnesses {found}/100 (max len {max_len}, worst "
                         f"d_H {worst:.5f} < {0.02/6:.5f}); "
                         f"runtime {dt:.1f}s < 120s")


def test_criterion_5_torus_example():
    t0 = time.perf_counter()
    cfg = TorusExampleConfig()
    h, h_inv = make_h(cfg)
    sys_ = build_torus_system(cfg)
    rng = np.random.default_rng(51)
    x0 = np.asarray(cfg.x0)
    A = np.asarray(cfg.shear)

    pts = geom.sample_ball(TORUS, x0, cfg.rho_h, 1000, rng)
    affine = (x0 + _wrap_diff(pts - x0) @ A.T) % 1.0
    affine_err = float(np.max(np.abs(h(pts) - affine)))
    ok = affine_err < 1e-14

    samples = rng.random((1000, 2))
    inv_err = 0.0
    for out in (h_inv(h(samples)), h(h_inv(samples))):
        e = np.abs(out - samples)
        inv_err = max(inv_err, float(np.max(np.minimum(e, 1 - e))))
    ok &= inv_err < 1e-9

    found = 0
    for _ in range(100):
        z = point(TORUS, geom.sample_ball(TORUS, x0, cfg.rho_h / 2, 1,
                                          rng)[0])
        y = point(TORUS, geom.sample_ball(TORUS, x0, cfg.rho_h / 2, 1,
                                          rng)[0])
        res = torus_return_index(sys_, z, y, 0.01, 6.0, budget=10**5)
        if res.found and res.certified_distance < 0.01 / 6:
            found += 1
    ok &= found == 100
    dt = time.perf_counter() - t0
    ok &= dt < 300.0
    assert report(5, ok, f"affine identity err {affine_err:.1e}, inverse err "
                         f"{inv_err:.1e}, return indices {found}/100 at "
                         f"budget 10^5; runtime {dt:.1f}s < 300s")


def test_criterion_6_sphere_example():
    t0 = time.perf_counter()
    cfg = SphereExampleConfig()
    sys_ = build_sphere_system(cfg)
    T, R = sys_.generators
    pole_res = max(
        float(np.max(np.abs(T.forward(P[None, :]) - P)))
        for P in (np.array([0.0, 0.0, RHO]), np.array([0.0, 0.0, -RHO])))
    ok = pole_res < 1e-12

    path_dev = cross_check_paths(SphereExampleConfig(validate_samples=1000))
    ok &= path_dev < 1e-12

    eq = equicontinuity_check(sys_, n_words=1000, max_len=20, n_pairs=1,
                              seed=61)
    ok &= eq["max_deviation"] < 1e-12

    fp_worst = 0.0
    n_words = 0
    for w in enumerate_words(2, 6, with_inverses=True):
        if len(w) == 0:
            continue
        n_words += 1
        info = word_rotation_axis(sys_, w)
        p = info["fixed_points"][0].array()
        img = apply_word_coords(sys_, w, p[None, :])[0]
        fp_worst = max(fp_worst, float(np.linalg.norm(img - p)))
    ok &= fp_worst < 1e-9 and n_words == sum(4**i for i in range(1, 7))

    rng = np.random.default_rng(62)
    dens = check_minimality_density(sys_, geom.sample_point(SPHERE, rng),
                                    eps=0.05, budget=10**6)
    ok &= dens["dense"]

    found = 0
    for i in range(50):
        x = geom.sample_point(SPHERE, rng)
        y = geom.sample_point(SPHERE, rng)
        res = find_witness(sys_, x, y, 0.05, 6.0, strategy="greedy",
                           budget={"beam_width": 4096, "max_depth": 120,
                                   "restarts": 4}, seed=i)
        if res.found and res.certified_distance < 0.05 / 6:
            found += 1
    ok &= found == 50
    dt = time.perf_counter() - t0
    ok &= dt < 300.0
    assert report(6, ok, f"pole res {pole_res:.1e}, path dev {path_dev:.1e}, "
                         f"isometry dev {eq['max_deviation']:.1e}, fixed-point "
                         f"worst {fp_worst:.1e} over {n_words} words, density "
                         f"{dens['dense']}, greedy witnesses {found}/50; "
                         f"runtime {dt:.1f}s < 300s")


def test_criterion_7_ball_distance_containment():
    rng = np.random.default_rng(71)
    worst_excess = 0.0
    for manifold in (CIRCLE, TORUS, SPHERE):
        inj = geom.INJECTIVITY[manifold]
        for _ in range(1000):
            r = float(rng.uniform(0.02, 0.15))
            sep = float(rng.uniform(0.0, inj - r - 0.01))
            x = point(manifold, geom.sample_uniform(manifold, 1, rng)[0])
            yc = geom.sample_ball(manifold, x.array(), sep, 1, rng)[0]
            y = point(manifold, yc)
            delta = r / 15.0
            a = closure_ball(x, r, delta=delta, force_net=True)
            b = closure_ball(y, r, delta=delta, force_net=True)
            d = hausdorff(a, b)
            worst_excess = max(worst_excess,
                               abs(d - geom.dist(x, y)) / (2 * delta))
    ok = worst_excess <= 1.0
    assert report(7, ok, f"|d_H - dist| <= 2*delta on 1000 pairs per "
                         f"manifold (worst ratio {worst_excess:.3f})")


def test_criterion_8_ergodicity_proxy():
    t0 = time.perf_counter()
    ok = True
    details = []

    # radii of balls with measure 0.01 on each manifold
    setups = [
        ("circle", build_circle_system(), 0.005, 1e-3, 4000),
        ("torus", build_torus_system(), math.sqrt(0.01 / math.pi), 1e-2, 4000),
        ("sphere", build_sphere_system(),
         math.acos(1 - 0.02) / (2 * math.pi), 1e-2, 2000),
    ]
    rng = np.random.default_rng(81)
    for name, sys_, r0, eps, depth in setups:
        c = point(sys_.manifold, geom.sample_uniform(sys_.manifold, 1, rng)[0])
        cov = invariant_hull_coverage(sys_, c, r0, eps, depth)
        ok &= cov[-1] >= 0.99
        ok &= all(b >= a for a, b in zip(cov, cov[1:]))
        details.append(f"{name} {cov[-1]:.3f}")

    from hyperifs.cli import _rational_circle_system
    ctl = _rational_circle_system(1.0 / 3.0)
    cov = invariant_hull_coverage(ctl, point(CIRCLE, [0.1]), 0.005, 1e-3, 100)
    ok &= abs(cov[-1] - 0.03) < 0.01
    details.append(f"rational control {cov[-1]:.3f}")
    dt = time.perf_counter() - t0
    ok &= dt < 300.0
    assert report(8, ok, "coverage " + ", ".join(details) +
                  f"; runtime {dt:.1f}s < 300s")


def test_criterion_9_reproducibility(tmp_path):
    from hyperifs.cli import main
    pairs = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        code = main(["check-hyper-minimal", "--example", "circle",
                     "--theta", "6", "--pairs", "5", "--r", "0.02",
                     "--seed", "17", "--out-dir", str(d)])
        assert code == 0
        code = main(["verify-overlap", "--manifold", "torus", "--seed", "17",
                     "--samples", "5", "--out-dir", str(d)])
        assert code == 0
        pairs.append(d)
    ok = True
    for name in ("check_hyper_minimal.json", "check_hyper_minimal.csv",
                 "verify_overlap.json", "verify_overlap.csv"):
        ok &= (pairs[0] / name).read_bytes() == (pairs[1] / name).read_bytes()
    assert report(9, ok, "reruns with identical config and seed are "
                         "byte-identical (JSON and CSV)")
