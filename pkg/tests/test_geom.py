import math

import numpy as np
import pytest

from hyperifs import geom
from hyperifs.geom import CIRCLE, RHO, SPHERE, TORUS, GeomError, point

MANIFOLDS = [CIRCLE, TORUS, SPHERE]


def rand_points(manifold, n, rng):
    return geom.sample_uniform(manifold, n, rng)


class TestDist:
    def test_circle_wraparound(self):
        assert geom.dist(point(CIRCLE, [0.1]), point(CIRCLE, [0.9])) == pytest.approx(0.2)

    def test_torus_flat(self):
        d = geom.dist(point(TORUS, [0.0, 0.0]), point(TORUS, [0.5, 0.5]))
        assert d == pytest.approx(math.sqrt(2.0) / 2.0)

    def test_sphere_antipodal(self):
        P = point(SPHERE, [0.0, 0.0, RHO])
        Q = point(SPHERE, [0.0, 0.0, -RHO])
        assert geom.dist(P, Q) == pytest.approx(0.5)

    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_metric_axioms(self, manifold):
        rng = np.random.default_rng(101)
        a = rand_points(manifold, 3000, rng)
        b = rand_points(manifold, 3000, rng)
        c = rand_points(manifold, 3000, rng)
        dab = geom.dist_to_point(manifold, a, None) if False else None
        dfun = {CIRCLE: lambda u, v: geom.circle_dist(u[:, 0], v[:, 0]),
                TORUS: geom.torus_dist, SPHERE: geom.sphere_dist}[manifold]
        dab, dba = dfun(a, b), dfun(b, a)
        dbc, dac = dfun(b, c), dfun(a, c)
        assert np.all(dab >= 0)
        assert np.allclose(dab, dba)
        assert np.all(dac <= dab + dbc + 1e-12)
        assert np.allclose(dfun(a, a), 0.0)

    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_zero_iff_equal(self, manifold):
        rng = np.random.default_rng(5)
        a = rand_points(manifold, 100, rng)
        dfun = {CIRCLE: lambda u, v: geom.circle_dist(u[:, 0], v[:, 0]),
                TORUS: geom.torus_dist, SPHERE: geom.sphere_dist}[manifold]
        perturbed = geom.normalize_coords(
            manifold, a + 1e-6 * rng.standard_normal(a.shape))
        assert np.all(dfun(a, perturbed) > 0)


class TestBallMeasure:
    def test_pinned_values(self):
        assert geom.ball_measure(CIRCLE, 0.1) == pytest.approx(0.2)
        assert geom.ball_measure(SPHERE, 0.25) == pytest.approx(0.5)
        assert geom.ball_measure(TORUS, 0.1) == pytest.approx(math.pi * 0.01)

    def test_out_of_range(self):
        with pytest.raises(GeomError):
            geom.ball_measure(CIRCLE, 0.7)
        with pytest.raises(GeomError):
            geom.ball_measure(SPHERE, -0.1)

    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_monte_carlo_agreement(self, manifold):
        # analytic measure vs direct frequency estimate, 4 sigma
        rng = np.random.default_rng(77)
        n = 200_000
        pts = rand_points(manifold, n, rng)
        for r in np.linspace(0.02, 0.45 if manifold != TORUS else 0.3, 8):
            m = geom.ball_measure(manifold, float(r))
            center = rand_points(manifold, 1, rng)[0]
            hits = geom.dist_to_point(manifold, pts, center) <= r
            p = float(np.mean(hits))
            se = math.sqrt(max(p * (1 - p), 1e-12) / n)
            assert abs(p - m) < 4 * se + 1e-6

    def test_torus_mc_fallback_continuity(self):
        # analytic disc formula and the MC fallback meet near the switch
        lo = geom.ball_measure(TORUS, 0.349)
        hi = geom.ball_measure(TORUS, 0.351)
        assert abs(hi - lo) < 0.01


class TestBallIntersection:
    def test_contained_arc(self):
        v = geom.ball_intersection_measure(point(CIRCLE, [0.5]), 0.1,
                                           point(CIRCLE, [0.51]), 0.05)
        assert v == pytest.approx(0.1)

    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_identity_case(self, manifold):
        rng = np.random.default_rng(1)
        x = point(manifold, rand_points(manifold, 1, rng)[0])
        v = geom.ball_intersection_measure(x, 0.08, x, 0.08, seed=0)
        assert v == pytest.approx(geom.ball_measure(manifold, 0.08), rel=1e-9)

    def test_torus_lens(self):
        v = geom.ball_intersection_measure(point(TORUS, [0.0, 0.0]), 0.1,
                                           point(TORUS, [0.1, 0.0]), 0.1)
        r, d = 0.1, 0.1
        lens = 2 * r * r * math.acos(d / (2 * r)) - (d / 2) * math.sqrt(
            4 * r * r - d * d)
        assert v == pytest.approx(lens)
        assert lens == pytest.approx(0.012284, abs=1e-6)

    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_containment_reduction(self, manifold):
        rng = np.random.default_rng(13)
        for _ in range(20):
            x = point(manifold, rand_points(manifold, 1, rng)[0])
            rx = 0.1
            ry = 0.04
            y = point(manifold, geom.sample_ball(manifold, x.array(),
                                                 rx - ry, 1, rng)[0])
            v = geom.ball_intersection_measure(x, rx, y, ry, seed=3)
            assert v == pytest.approx(geom.ball_measure(manifold, ry), rel=1e-9)

    def test_disjoint(self):
        v = geom.ball_intersection_measure(point(CIRCLE, [0.0]), 0.05,
                                           point(CIRCLE, [0.5]), 0.05)
        assert v == 0.0

    @pytest.mark.parametrize("manifold", [TORUS, SPHERE])
    def test_against_monte_carlo(self, manifold):
        rng = np.random.default_rng(19)
        for _ in range(5):
            x = point(manifold, rand_points(manifold, 1, rng)[0])
            y = point(manifold, geom.sample_ball(manifold, x.array(), 0.12, 1,
                                                 rng)[0])
            v, se, method = geom.ball_intersection_info(x, 0.1, y, 0.08,
                                                        seed=4)
            n = 200_000
            pts = geom.sample_ball(manifold, x.array(), 0.1, n, rng)
            hits = geom.dist_to_point(manifold, pts, y.array()) <= 0.08
            est = geom.ball_measure(manifold, 0.1) * float(np.mean(hits))
            tol = 4 * geom.ball_measure(manifold, 0.1) * math.sqrt(0.25 / n)
            assert abs(v - est) < tol + 3 * se


class TestSampling:
    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_uniform_on_manifold(self, manifold):
        rng = np.random.default_rng(2)
        pts = rand_points(manifold, 1000, rng)
        if manifold == SPHERE:
            assert np.allclose(np.linalg.norm(pts, axis=1), RHO)
        else:
            assert np.all((pts >= 0) & (pts < 1))

    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_ball_samples_inside(self, manifold):
        rng = np.random.default_rng(3)
        c = rand_points(manifold, 1, rng)[0]
        pts = geom.sample_ball(manifold, c, 0.2, 5000, rng)
        assert np.all(geom.dist_to_point(manifold, pts, c) <= 0.2 + 1e-12)

    def test_seeded_reproducible(self):
        a = geom.sample_uniform(SPHERE, 10, np.random.default_rng(9))
        b = geom.sample_uniform(SPHERE, 10, np.random.default_rng(9))
        assert np.array_equal(a, b)


class TestNet:
    def test_circle_count(self):
        pts = geom.net(point(CIRCLE, [0.5]), 0.1, 0.01)
        assert pts.shape == (21, 1)
        vals = np.sort(pts[:, 0])
        assert np.allclose(np.diff(vals), 0.01)

    @pytest.mark.parametrize("manifold", [TORUS, SPHERE])
    def test_covering_property(self, manifold):
        rng = np.random.default_rng(4)
        c = point(manifold, rand_points(manifold, 1, rng)[0])
        net = geom.net(c, 0.1, 0.01)
        samples = geom.sample_ball(manifold, c.array(), 0.1, 10_000, rng)
        from hyperifs import _core
        wrap = manifold == TORUS
        d = _core.min_distances(np.ascontiguousarray(samples),
                                np.ascontiguousarray(net), wrap)
        if manifold == SPHERE:
            d = 2 * RHO * np.arcsin(np.clip(d / (2 * RHO), 0, 1))
        assert float(np.max(d)) <= 0.01 + 1e-12

    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_net_inside_closed_ball(self, manifold):
        rng = np.random.default_rng(6)
        c = point(manifold, rand_points(manifold, 1, rng)[0])
        net = geom.net(c, 0.15, 0.02)
        assert np.all(geom.dist_to_point(manifold, net, c.array())
                      <= 0.15 + 1e-12)

    def test_validation(self):
        with pytest.raises(GeomError):
            geom.net(point(CIRCLE, [0.5]), 0.1, 0.2)


class TestGrid:
    @pytest.mark.parametrize("manifold", MANIFOLDS)
    def test_cells_partition(self, manifold):
        g = geom.Grid(manifold, 0.05)
        rng = np.random.default_rng(8)
        pts = rand_points(manifold, 20_000, rng)
        idx = g.cell_index(pts)
        assert idx.min() >= 0 and idx.max() < g.ncells
        # every cell of a coarse grid is hit by enough uniform samples
        assert np.unique(idx).size == g.ncells
