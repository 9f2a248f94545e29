import numpy as np
from django.test import SimpleTestCase

from wavefront.exceptions import IntegrationError
from wavefront.integrator import IntegratorOptions, solve


def oscillator(t, y):
    return np.array([y[1], -y[0]])


class SolveTest(SimpleTestCase):
    def test_harmonic_oscillator(self):
        """cos t is reproduced to 1e-8 over one period"""
        dense = solve(oscillator, 0.0, [1.0, 0.0], 2.0 * np.pi)
        self.assertEqual(dense.t[-1], 2.0 * np.pi)
        np.testing.assert_allclose(dense.y[-1], [1.0, 0.0], atol=1e-8)
        np.testing.assert_allclose(dense.y[:, 0], np.cos(dense.t), atol=1e-8)

    def test_dense_output_between_knots(self):
        """The Hermite interpolant and its derivative follow the solution"""
        dense = solve(oscillator, 0.0, [1.0, 0.0], 2.0 * np.pi)
        t = np.linspace(0.0, 2.0 * np.pi, 401)
        np.testing.assert_allclose(dense(t)[:, 0], np.cos(t), atol=1e-5)
        np.testing.assert_allclose(dense.derivative(t)[:, 0], -np.sin(t), atol=1e-4)

    def test_dense_output_rejects_outside_times(self):
        """Queries beyond the integrated span raise"""
        dense = solve(oscillator, 0.0, [1.0, 0.0], 1.0)
        with self.assertRaises(ValueError):
            dense(1.5)

    def test_max_step_fraction(self):
        """No accepted step exceeds max_step_fraction of the span"""
        dense = solve(lambda t, y: np.zeros_like(y), 0.0, [1.0], 10.0, IntegratorOptions(max_step_fraction=0.1))
        self.assertLessEqual(float(np.max(np.diff(dense.t))), 1.0 + 1e-12)
        self.assertGreaterEqual(len(dense.t), 11)

    def test_projection_applied_to_every_knot(self):
        """A projection onto the unit circle holds at every stored state"""
        def project(t, y):
            return y / np.linalg.norm(y)

        dense = solve(oscillator, 0.0, [1.0, 0.0], 10.0, projection=project)
        np.testing.assert_allclose(np.linalg.norm(dense.y, axis=1), 1.0, atol=1e-15)

    def test_check_can_abort(self):
        """Exceptions from the check callback propagate"""
        def check(t, y):
            if t > 0.5:
                raise IntegrationError('stop')

        with self.assertRaises(IntegrationError):
            solve(oscillator, 0.0, [1.0, 0.0], 1.0, check=check)

    def test_blow_up(self):
        """y' = y² from y(0)=1 cannot pass t = 1"""
        with self.assertRaises(IntegrationError):
            solve(lambda t, y: y * y, 0.0, [1.0], 2.0)

    def test_invalid_options(self):
        """Non-positive tolerances and empty spans are rejected"""
        with self.assertRaises(ValueError):
            IntegratorOptions(abs_tol=0.0)
        with self.assertRaises(ValueError):
            solve(oscillator, 1.0, [1.0, 0.0], 1.0)
