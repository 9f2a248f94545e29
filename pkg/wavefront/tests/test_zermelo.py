import numpy as np
from django.test import SimpleTestCase

from wavefront.exceptions import InvalidZermeloDataError
from wavefront.metric import Example84Metric, ValidityDomain
from wavefront.zermelo import (
    ZermeloData,
    ZermeloMetric,
    default_domain,
    h_matrix,
    indicatrix_point,
    randers_f,
    validate,
)


class RandersMetricTest(SimpleTestCase):
    def setUp(self):
        self.drifting = ZermeloData.from_strings('2', '1', '0.5', '0.3', '0.7')
        self.rotating = ZermeloData.from_strings('1', '2+t/5', '0', '0', '((t+5)+u-v)/20')

    def test_semi_axes_without_drift(self):
        """a=1, b=2, θ=0: (1, 0) and (0, 2) have unit length"""
        zd = ZermeloData.from_strings('1', '2', '0', '0', '0')
        self.assertAlmostEqual(float(randers_f(zd, 0.0, 0.0, 0.0, 1.0, 0.0)), 1.0, places=14)
        self.assertAlmostEqual(float(randers_f(zd, 0.0, 0.0, 0.0, 0.0, 2.0)), 1.0, places=14)

    def test_indicatrix_points_have_unit_length(self):
        """The rotated, translated ellipse is the unit circle of F"""
        psi = np.linspace(0.0, 2.0 * np.pi, 37)
        for zd in (self.drifting, self.rotating):
            with self.subTest(zd=str(zd.theta)):
                E = indicatrix_point(zd, 3.0, 1.0, -2.0, psi)
                F = randers_f(zd, 3.0, 1.0, -2.0, E[:, 0], E[:, 1])
                np.testing.assert_allclose(F, 1.0, atol=1e-12)

    def test_homogeneity(self):
        """F(λV) = λF(V) for λ > 0"""
        V = np.array([0.3, -1.1])
        base = randers_f(self.drifting, 0.0, 0.0, 0.0, *V)
        for scale in (0.5, 2.0, 7.0):
            self.assertAlmostEqual(float(randers_f(self.drifting, 0.0, 0.0, 0.0, *(scale * V))), scale * float(base), places=12)

    def test_h_matrix_rotation(self):
        """θ = π/2 swaps the roles of the axes"""
        np.testing.assert_allclose(h_matrix(1.0, 2.0, np.pi / 2), np.diag([0.25, 1.0]), atol=1e-15)

    def test_strong_drift_rejected(self):
        """|C| beyond the ellipse makes λ <= 0"""
        zd = ZermeloData.from_strings('1', '1', '2', '0', '0')
        with self.assertRaises(InvalidZermeloDataError) as cm:
            randers_f(zd, 0.5, 1.0, 2.0, 1.0, 0.0)
        self.assertEqual(cm.exception.location, (0.5, 1.0, 2.0))

    def test_negative_axis_rejected(self):
        """b < 0 is invalid data"""
        zd = ZermeloData.from_strings('1', '-1', '0', '0', '0')
        with self.assertRaises(InvalidZermeloDataError):
            randers_f(zd, 0.0, 0.0, 0.0, 1.0, 0.0)

    def test_builtin_equivalents(self):
        """The example84 metric equals its Zermelo data a=1+t, b=2+2t"""
        m = Example84Metric()
        rng = np.random.default_rng(11)
        t = rng.uniform(0.0, 3.0, 8)
        x, y = rng.normal(size=(2, 8))
        np.testing.assert_allclose(
            randers_f(m.zermelo, t, 0.0, 0.0, x, y),
            m.value(t, 0.0, 0.0, x, y),
            rtol=1e-13,
        )


class ValidateTest(SimpleTestCase):
    def test_valid_data(self):
        """The rotating ellipse field is valid on the default window"""
        zd = ZermeloData.from_strings('1', '2+t/5', '0', '0', '((t+5)+u-v)/20')
        report = validate(zd, default_domain(0.0, 16.0), sampling=(9, 9, 5))
        self.assertTrue(report.passed)
        self.assertEqual(report.min_lambda, 1.0)
        self.assertEqual(report.samples, 405)

    def test_negative_axis(self):
        """b = -1 fails with the minimum reported"""
        zd = ZermeloData.from_strings('1', '-1', '0', '0', '0')
        report = validate(zd, default_domain(0.0, 1.0), sampling=(3, 3, 2))
        self.assertFalse(report.passed)
        self.assertEqual(report.min_b, -1.0)

    def test_drift_failure_location(self):
        """λ changes sign where the drift grows past the ellipse"""
        zd = ZermeloData.from_strings('1', '1', 'u/10', '0', '0')
        report = validate(zd, ValidityDomain((-20.0, 20.0), (-1.0, 1.0), (0.0, 1.0)), sampling=(41, 3, 2))
        self.assertFalse(report.passed)
        self.assertEqual(abs(report.worst_location[1]), 20.0)
        self.assertEqual(report.as_dict()['passed'], False)


class ZermeloMetricTest(SimpleTestCase):
    def test_time_independence(self):
        """Only data without t are time independent"""
        self.assertFalse(ZermeloMetric(ZermeloData.from_strings('1', '2+t/5', '0', '0', '0')).time_independent)
        self.assertTrue(ZermeloMetric(ZermeloData.from_strings('1', '2', '0', '0', 'u/20')).time_independent)


def random_data(rng):
    """Constant Zermelo data with λ >= 0.28 and a field whose θ varies in space."""
    a, b = rng.uniform(0.5, 3.0, 2)
    c1, c2 = 0.6 * a * rng.uniform(-1.0, 1.0), 0.6 * b * rng.uniform(-1.0, 1.0)
    theta = rng.uniform(0.0, np.pi)
    return ZermeloData.from_strings(f'{a:.6f}', f'{b:.6f}', f'{c1:.6f}', f'{c2:.6f}', f'{theta:.6f}+u/10-v/20')


class ZermeloInvariantsTest(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(41)

    def test_indicatrix_on_500_samples(self):
        """F(E(ψ)) = 1 to 1e-8 over 25 fields and 20 points each"""
        worst = 0.0
        for _ in range(25):
            zd = random_data(self.rng)
            t = self.rng.uniform(0.0, 16.0, 20)
            u, v = self.rng.uniform(-10.0, 10.0, (2, 20))
            psi = self.rng.uniform(0.0, 2.0 * np.pi, 20)
            E = indicatrix_point(zd, t, u, v, psi)
            worst = max(worst, float(np.max(np.abs(randers_f(zd, t, u, v, E[:, 0], E[:, 1]) - 1.0))))
        self.assertLess(worst, 1e-8)

    def test_rotation_equivariance(self):
        """Turning θ by φ turns the unit ellipse, drift included, by φ clockwise"""
        for _ in range(20):
            a, b = self.rng.uniform(0.5, 3.0, 2)
            c1, c2 = 0.6 * a * self.rng.uniform(-1.0, 1.0), 0.6 * b * self.rng.uniform(-1.0, 1.0)
            theta, phi = self.rng.uniform(0.0, np.pi, 2)
            coefficients = (f'{a:.6f}', f'{b:.6f}', f'{c1:.6f}', f'{c2:.6f}')
            base = ZermeloData.from_strings(*coefficients, f'{theta:.6f}')
            turned = ZermeloData.from_strings(*coefficients, f'{theta:.6f}+{phi:.6f}')
            x, y = self.rng.normal(size=2)
            phi = float(f'{phi:.6f}')
            xr, yr = np.cos(phi) * x + np.sin(phi) * y, -np.sin(phi) * x + np.cos(phi) * y
            self.assertAlmostEqual(
                float(randers_f(turned, 0.0, 0.0, 0.0, xr, yr)),
                float(randers_f(base, 0.0, 0.0, 0.0, x, y)),
                places=12,
            )

    def test_no_drift_is_riemannian(self):
        """With C = 0, F(V) = sqrt(h(V, V))"""
        for _ in range(20):
            a, b = self.rng.uniform(0.5, 3.0, 2)
            theta = self.rng.uniform(0.0, 2.0 * np.pi)
            zd = ZermeloData.from_strings(f'{a:.6f}', f'{b:.6f}', '0', '0', f'{theta:.6f}')
            V = self.rng.normal(size=2)
            h = h_matrix(float(f'{a:.6f}'), float(f'{b:.6f}'), float(f'{theta:.6f}'))
            self.assertAlmostEqual(float(randers_f(zd, 1.0, 2.0, 3.0, *V)), float(np.sqrt(V @ h @ V)), places=12)

    def test_validate_reports_negative_lambda(self):
        """a = b = 1 with C = (1.1, 0) fails with λ = -0.21"""
        zd = ZermeloData.from_strings('1', '1', '1.1', '0', '0')
        report = validate(zd, default_domain(0.0, 1.0), sampling=(3, 3, 2))
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.min_lambda, -0.21, places=12)
