import numpy as np
from django.test import SimpleTestCase, tag

from wavefront.exports import plain
from wavefront.huyghens import (
    droplet,
    droplets_from_frontal,
    envelope_check,
    inside_polygon,
    outward_excursion,
    polyline_distance,
)
from wavefront.metric import EuclideanMetric
from wavefront.spray import Frontal, PointIgnition, PolylineIgnition, build_net, frontal
from wavefront.zermelo import ZermeloData, ZermeloMetric, randers_f


class GeometryTest(SimpleTestCase):
    def test_polyline_distance(self):
        """Distances are to the nearest point of the nearest segment"""
        start = np.array([[0.0, 0.0], [2.0, 0.0]])
        end = np.array([[2.0, 0.0], [2.0, 2.0]])
        distance, index = polyline_distance([[1.0, 1.0], [3.0, 1.5], [-1.0, 0.0]], start, end)
        np.testing.assert_allclose(distance, [1.0, 1.0, 1.0])
        self.assertEqual(index[1], 1)

    def test_inside_polygon(self):
        """Even-odd rule on the unit square"""
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        inside = inside_polygon(np.array([[0.5, 0.5], [1.5, 0.5], [0.5, -0.1]]), square)
        self.assertEqual(list(inside), [True, False, False])

    def test_closed_target_excursion(self):
        """Only points outside a closed frontal count"""
        square = Frontal(1.0, np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), True)
        np.testing.assert_allclose(outward_excursion(np.array([[0.5, 0.5], [1.25, 0.5]]), square), [0.0, 0.25])

    def test_open_target_follows_orientation(self):
        """A segment burning left is exceeded above its frontal"""
        net = build_net(EuclideanMetric(), PolylineIgnition(((-1.0, 0.0), (1.0, 0.0)), 'left'), 0.0, 1.0, 8)
        target = frontal(net, 1.0)
        points = np.array([[0.0, 1.5], [0.0, 0.5]])
        np.testing.assert_allclose(outward_excursion(points, target, net.orientation), [0.5, 0.0], atol=1e-9)


class EuclideanDropletTest(SimpleTestCase):
    def setUp(self):
        self.m = EuclideanMetric()

    def test_droplet_is_a_circle(self):
        """A Euclidean droplet of duration δ is the circle of radius δ"""
        drop = droplet(self.m, (1.0, 2.0), 0.5, 0.25, 16)
        np.testing.assert_allclose(np.linalg.norm(drop.points - [1.0, 2.0], axis=-1), 0.25, atol=1e-9)
        self.assertEqual(drop.t, 0.75)

    def test_droplet_duration_must_be_positive(self):
        """δ <= 0 is rejected"""
        with self.assertRaises(ValueError):
            droplet(self.m, (0.0, 0.0), 1.0, 0.0, 16)

    def test_droplets_envelope_the_later_circle(self):
        """Droplets from the unit circle touch the circle of radius 1.5 without crossing it"""
        net = build_net(self.m, PointIgnition((0.0, 0.0)), 0.0, 1.5, 32)
        source = frontal(net, 1.0)
        droplets = droplets_from_frontal(self.m, source, 0.5, 16, stride=8)
        self.assertEqual(len(droplets), 4)
        report = envelope_check(droplets, frontal(net, 1.5), 0.5, centers=source.points[::8])
        self.assertAlmostEqual(report.diameter, 3.0, places=6)
        self.assertLess(report.relative_gap, 1e-6)
        self.assertLess(report.relative_excursion, 1e-6)
        self.assertEqual(len(report.as_dict()['droplets']), 4)

    def test_point_target_is_flagged(self):
        """A frontal still at its ignition point has no diameter to compare against"""
        net = build_net(self.m, PointIgnition((0.0, 0.0)), 0.0, 1.0, 8)
        drop = droplet(self.m, (0.0, 0.0), 0.0, 0.5, 8)
        with self.assertLogs('wavefront.huyghens', 'WARNING') as logs:
            report = envelope_check([drop], frontal(net, 0.0), 0.5)
        self.assertIn('zero diameter', logs.output[0])
        self.assertEqual(report.diameter, 0.0)
        self.assertTrue(np.isnan(report.relative_gap))
        self.assertTrue(np.isnan(report.relative_excursion))
        self.assertIsNone(plain(report.as_dict())['relative_gap'])


class ScleronomicRandersDropletTest(SimpleTestCase):
    def setUp(self):
        self.zd = ZermeloData.from_strings('1', '2', '0.3', '0', '0.4')
        self.m = ZermeloMetric(self.zd)

    def test_droplet_without_drift_is_an_axis_ellipse(self):
        """a = 1, b = 2, C = 0: semi-axes δa and δb"""
        m = ZermeloMetric(ZermeloData.from_strings('1', '2', '0', '0', '0'))
        drop = droplet(m, (1.0, -1.0), 0.0, 0.5, 16)
        x, y = (drop.points - [1.0, -1.0]).T
        np.testing.assert_allclose((x / 0.5) ** 2 + (y / 1.0) ** 2, 1.0, atol=1e-9)
        np.testing.assert_allclose(np.ptp(x), 1.0, atol=1e-9)
        np.testing.assert_allclose(np.ptp(y), 2.0, atol=1e-9)

    def test_droplet_is_the_scaled_indicatrix(self):
        """With drift the droplet is δ times the shifted, turned unit ellipse"""
        drop = droplet(self.m, (2.0, 1.0), 0.0, 0.5, 16)
        x, y = (drop.points - [2.0, 1.0]).T
        np.testing.assert_allclose(randers_f(self.zd, 0.5, 2.0, 1.0, x, y), 0.5, atol=1e-9)

    def test_envelope_is_exact(self):
        """Gap and excursion stay under 1e-4 of the frontal diameter"""
        net = build_net(self.m, PointIgnition((0.0, 0.0)), 0.0, 2.0, 32)
        source = frontal(net, 1.0)
        droplets = droplets_from_frontal(self.m, source, 1.0, 16, stride=8)
        report = envelope_check(droplets, frontal(net, 2.0), 1.0, centers=source.points[::8])
        self.assertLess(report.relative_gap, 1e-4)
        self.assertLess(report.relative_excursion, 1e-4)


@tag('slow')
class RotatingEllipseEnvelopeTest(SimpleTestCase):
    def test_envelope_from_level_four(self):
        """Droplets from t = 12.8 lasting 3.2 envelope the frontal at 16"""
        for theta in ('((t+5)+u-v)/20', '(t+5)/20'):
            with self.subTest(theta=theta):
                m = ZermeloMetric(ZermeloData.from_strings('1', '2+t/5', '0', '0', theta))
                net = build_net(m, PointIgnition((0.0, 0.0)), 0.0, 16.0, 256)
                source = frontal(net, 12.8)
                droplets = droplets_from_frontal(m, source, 3.2, 64, stride=8)
                report = envelope_check(droplets, frontal(net, 16.0), 3.2, centers=source.points[::8])
                self.assertLess(report.relative_gap, 5e-3)
                self.assertLess(report.relative_excursion, 1e-2)
