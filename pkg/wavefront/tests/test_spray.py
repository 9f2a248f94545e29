import numpy as np
from django.test import SimpleTestCase, tag

from wavefront import reference
from wavefront.exceptions import DomainExitError, RayIntegrationError
from wavefront.integrator import IntegratorOptions
from wavefront.metric import EuclideanMetric, Example84Metric, ValidityDomain, unit_vector
from wavefront.spray import (
    PointIgnition,
    PolylineIgnition,
    build_net,
    energy_defect,
    frontal,
    integrate_extremal,
    integrate_ray,
    orthogonality_residual,
    preextremal_defect,
    unit_speed_residual,
)
from wavefront.zermelo import ZermeloData, ZermeloMetric


class Example84NetTest(SimpleTestCase):
    """32-ray net of the example84 metric from the origin on [0, 2]."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.m = Example84Metric()
        cls.net = build_net(cls.m, PointIgnition((0.0, 0.0)), 0.0, 2.0, 32)

    def test_rays_match_closed_form(self):
        """Every stored knot lies within 1e-6 of (t²+2t) d(s)"""
        for ray in self.net.rays:
            error = np.linalg.norm(ray.positions - reference.ray_position(ray.s, ray.t), axis=-1)
            self.assertLess(float(np.max(error)), 1e-6, f'ray {ray.s_index}')

    def test_unit_speed(self):
        """|F - 1| <= 1e-7 on every stored sample"""
        self.assertLess(unit_speed_residual(self.net).max, 1e-7)

    def test_rho_along_rays(self):
        """ρ = -1/(1+t) on the rays"""
        for ray in self.net.rays:
            np.testing.assert_allclose(ray.rho, -1.0 / (1.0 + ray.t), atol=1e-6)

    def test_velocity_and_acceleration(self):
        """γ' = (2+2t) d(s) and γ'' = 2 d(s) from the dense output"""
        ray = self.net.rays[5]
        t = np.linspace(0.1, 1.9, 7)
        np.testing.assert_allclose(ray.velocity(t), reference.ray_velocity(ray.s, t), atol=1e-6)
        np.testing.assert_allclose(ray.acceleration(t), 2.0 * reference.direction(np.full(7, ray.s)), atol=1e-4)

    def test_frontal(self):
        """η_t is closed and its points share the arrival time t"""
        level = frontal(self.net, 1.0)
        self.assertTrue(level.closed)
        self.assertEqual(level.points.shape, (32, 2))
        u, v = level.points.T
        np.testing.assert_allclose(reference.arrival_time(u, v), 1.0, atol=1e-6)
        with self.assertRaises(ValueError):
            frontal(self.net, 2.5)

    def test_spectral_orthogonality(self):
        """Spectral s-derivatives bring the residual under 1e-4 at 64 rays"""
        net = build_net(self.m, PointIgnition((0.0, 0.0)), 0.0, 2.0, 64)
        self.assertLess(orthogonality_residual(net, order='spectral').max, 1e-4)

    @tag('slow')
    def test_orthogonality_second_order(self):
        """Doubling the rays quarters the central-difference residual, twice"""
        residuals = [orthogonality_residual(self.net).max]
        for rays in (64, 128):
            net = build_net(self.m, PointIgnition((0.0, 0.0)), 0.0, 2.0, rays)
            residuals.append(orthogonality_residual(net).max)
        for coarse, fine in zip(residuals, residuals[1:]):
            self.assertGreater(coarse / fine, 3.0)
            self.assertLess(coarse / fine, 5.0)

    def test_fourth_order_differences_beat_second_order(self):
        """Order 4 is more accurate than order 2 on the same net"""
        self.assertLess(
            orthogonality_residual(self.net, order=4).max,
            orthogonality_residual(self.net, order=2).max,
        )

    def test_defects_along_closed_form(self):
        """The closed-form rays are pre-extremals but not energy extremals"""
        s, t = 0.4, np.array([0.0, 0.7, 1.5])
        p = reference.ray_position(s, t)
        v = reference.ray_velocity(s, t)
        a = 2.0 * reference.direction(np.full(3, s))
        np.testing.assert_allclose(preextremal_defect(self.m, t, p, v, a), 0.0, atol=1e-12)
        np.testing.assert_allclose(energy_defect(self.m, t, p, v, a), 1.0 / (1.0 + t), rtol=1e-12)


class EnergyExtremalTest(SimpleTestCase):
    def test_radial_factor_and_speed(self):
        """Without ρ the rays reach (⅔t³+2t²+2t) d(s) and have F = 1+t"""
        m = Example84Metric()
        for s in (0.0, 0.9, 2.5, 4.0):
            with self.subTest(s=s):
                v0 = unit_vector(m, 0.0, (0.0, 0.0), np.array([np.cos(s), np.sin(s)]))
                ray = integrate_extremal(m, 0.0, (0.0, 0.0), v0, 2.0)
                np.testing.assert_allclose(ray.positions[-1], reference.extremal_position(s, 2.0), atol=1e-6)
                speed = m(ray.t, ray.positions, ray.velocities)
                np.testing.assert_allclose(speed, reference.extremal_speed(ray.t), atol=1e-6)


class PolylineNetTest(SimpleTestCase):
    def setUp(self):
        self.m = EuclideanMetric()

    def test_segment_burns_to_its_left(self):
        """A horizontal segment burning left moves straight up"""
        net = build_net(self.m, PolylineIgnition(((-1.0, 0.0), (1.0, 0.0)), 'left'), 0.0, 1.0, 16)
        self.assertFalse(net.periodic)
        self.assertEqual(net.orientation, -1.0)
        level = frontal(net, 1.0)
        self.assertFalse(level.closed)
        np.testing.assert_allclose(level.points[:, 1], 1.0, atol=1e-9)
        np.testing.assert_allclose(level.points[:, 0], np.linspace(-1.0, 1.0, 16), atol=1e-9)
        self.assertLess(orthogonality_residual(net).max, 1e-9)

    def test_right_side(self):
        """Burning right moves down"""
        net = build_net(self.m, PolylineIgnition(((-1.0, 0.0), (1.0, 0.0)), 'right'), 0.0, 1.0, 8)
        np.testing.assert_allclose(frontal(net, 1.0).points[:, 1], -1.0, atol=1e-9)

    def test_resample_uses_arc_length(self):
        """Resampled points are uniform in arc length along the polyline"""
        s, points = PolylineIgnition(((0.0, 0.0), (1.0, 0.0), (1.0, 3.0))).resample(5)
        np.testing.assert_allclose(s, [0.0, 1.0, 2.0, 3.0, 4.0])
        np.testing.assert_allclose(points, [[0, 0], [1, 0], [1, 1], [1, 2], [1, 3]])

    def test_invalid_polylines(self):
        """Unknown sides and single points are rejected"""
        with self.assertRaises(ValueError):
            PolylineIgnition(((0.0, 0.0), (1.0, 0.0)), 'up')
        with self.assertRaises(ValueError):
            PolylineIgnition(((0.0, 0.0),))


class NetErrorsTest(SimpleTestCase):
    def test_domain_exit(self):
        """Leaving a bounded domain fails the ray with its index"""
        m = EuclideanMetric(domain=ValidityDomain((-1.0, 1.0), (-1.0, 1.0), (0.0, 5.0)))
        with self.assertRaises(RayIntegrationError) as cm:
            build_net(m, PointIgnition((0.0, 0.0)), 0.0, 2.0, 8)
        self.assertEqual(cm.exception.s_index, 0)
        self.assertIsInstance(cm.exception.cause, DomainExitError)

    def test_time_span_and_ray_count(self):
        """T must exceed t0 and a net needs three rays"""
        m = EuclideanMetric()
        with self.assertRaises(ValueError):
            build_net(m, PointIgnition((0.0, 0.0)), 1.0, 0.5, 8)
        with self.assertRaises(ValueError):
            build_net(m, PointIgnition((0.0, 0.0)), 0.0, 1.0, 2)


@tag('slow')
class WorkerPoolTest(SimpleTestCase):
    def test_parallel_net_matches_serial(self):
        """Rays integrated in a process pool are identical and in s-order"""
        m = Example84Metric()
        serial = build_net(m, PointIgnition((0.0, 0.0)), 0.0, 1.0, 8)
        parallel = build_net(m, PointIgnition((0.0, 0.0)), 0.0, 1.0, 8, workers=2)
        self.assertEqual([r.s_index for r in parallel.rays], list(range(8)))
        for a, b in zip(serial.rays, parallel.rays):
            np.testing.assert_array_equal(a.dense.y, b.dense.y)


class ConstantMediumNetTest(SimpleTestCase):
    def test_elliptic_polar_net(self):
        """Constant a = 1, b = 2 gives γ = p + (t - t0)(a cos s', b sin s')"""
        m = ZermeloMetric(ZermeloData.from_strings('1', '2', '0', '0', '0'))
        p0 = np.array([1.0, -1.0])
        net = build_net(m, PointIgnition(tuple(p0)), 0.5, 2.0, 12)
        for ray in net.rays:
            V0 = ray.velocities[0]
            self.assertAlmostEqual(float(V0[0] ** 2 + (V0[1] / 2.0) ** 2), 1.0, places=10)
            self.assertAlmostEqual(float(np.arctan2(V0[1], V0[0]) % (2.0 * np.pi)), ray.s, places=10)
            expected = p0 + (ray.t - 0.5)[:, None] * V0
            np.testing.assert_allclose(ray.positions, expected, atol=1e-8)

    def test_euclidean_frontals_are_circles(self):
        """Frontals of a Euclidean point net are circles of radius t - t0"""
        net = build_net(EuclideanMetric(), PointIgnition((2.0, 1.0)), 0.5, 3.0, 16)
        for t in (0.75, 1.5, 2.25, 3.0):
            with self.subTest(t=t):
                radius = np.linalg.norm(frontal(net, t).points - [2.0, 1.0], axis=-1)
                np.testing.assert_allclose(radius, t - 0.5, atol=1e-9)

    def test_scleronomic_rays_are_geodesics(self):
        """For time-independent data ρ vanishes and rays follow the geodesic equation"""
        m = ZermeloMetric(ZermeloData.from_strings('1', '2', '0.3', '0', '0.4+u/10'))
        self.assertTrue(m.time_independent)
        for s in (0.0, 1.3, 3.7):
            with self.subTest(s=s):
                v0 = unit_vector(m, 0.0, (0.0, 0.0), np.array([np.cos(s), np.sin(s)]))
                ray = integrate_ray(m, 0.0, (0.0, 0.0), v0, 3.0)
                geodesic = integrate_extremal(m, 0.0, (0.0, 0.0), v0, 3.0)
                np.testing.assert_allclose(ray.rho, 0.0, atol=1e-6)
                np.testing.assert_allclose(geodesic.positions, ray.position(geodesic.t), atol=1e-6)


class ToleranceConvergenceTest(SimpleTestCase):
    def test_tighter_tolerances_approach_the_limit(self):
        """Each hundredfold tightening moves the net closer to a 1e-11 reference"""
        m = ZermeloMetric(ZermeloData.from_strings('1', '2+t/5', '0', '0', '((t+5)+u-v)/20'))

        def endpoints(tol):
            opts = IntegratorOptions(abs_tol=tol, rel_tol=tol, max_step_fraction=1.0)
            net = build_net(m, PointIgnition((0.0, 0.0)), 0.0, 4.0, 8, opts)
            return net.positions(4.0)

        reference_points = endpoints(1e-11)
        errors = [float(np.max(np.linalg.norm(endpoints(tol) - reference_points, axis=-1))) for tol in (1e-3, 1e-5, 1e-7)]
        self.assertGreater(errors[0], errors[1])
        self.assertGreater(errors[1], errors[2])
        self.assertLess(errors[2], 1e-5)
