"""
Closed forms for the metric F = sqrt(x² + (y/2)²) / (1 + t).

Point-ignited nets from the origin at time t0 have straight rays

    γ(s, t) = ((1+t)² - (1+t0)²) · d(s),   d(s) = (cos s, sin s) / sqrt(1 + 3cos² s)

and arrival time t(u, v) = -1 + sqrt((1+t0)² + sqrt(4u² + v²)). Everything
below follows from these two formulas.
"""

from functools import partial

import numpy as np

from .frozen import AnalyticTimeField
from .metric import Example84Metric


def direction(s):
    s = np.asarray(s, dtype=float)
    d = np.stack([np.cos(s), np.sin(s)], axis=-1)
    return d / np.expand_dims(np.sqrt(1.0 + 3.0 * np.cos(s) ** 2), -1)


def ray_position(s, t, t0=0.0, p0=(0.0, 0.0)):
    factor = (1.0 + np.asarray(t)) ** 2 - (1.0 + t0) ** 2
    return np.asarray(p0, dtype=float) + np.expand_dims(factor, -1) * direction(s)


def ray_velocity(s, t):
    return np.expand_dims(2.0 + 2.0 * np.asarray(t), -1) * direction(s)


def extremal_position(s, t):
    """Energy extremal from the origin at t = 0 with the unit initial velocity of direction s."""
    t = np.asarray(t, dtype=float)
    return np.expand_dims(2.0 / 3.0 * t**3 + 2.0 * t**2 + 2.0 * t, -1) * direction(s)


def extremal_speed(t):
    """F along an energy extremal started at unit speed."""
    return 1.0 + np.asarray(t, dtype=float)


def richards_position(s_tilde, t):
    """The explicit time-only solution for a = 1+t, b = 2+2t, labelled by s̃."""
    root = np.sqrt(4.0 - 3.0 * np.cos(s_tilde) ** 2)
    return np.array([
        (t * t / 2.0 + t) * np.cos(s_tilde) / root,
        (2.0 * t * t + 4.0 * t) * np.sin(s_tilde) / root,
    ])


def _offset(t0):
    return (1.0 + t0) ** 2


def arrival_time(u, v, t0=0.0):
    return -1.0 + np.sqrt(_offset(t0) + np.sqrt(4.0 * u * u + v * v))


def arrival_gradient(u, v, t0=0.0):
    r = np.sqrt(4.0 * u * u + v * v)
    outer = 2.0 * np.sqrt(_offset(t0) + r)
    return np.array([4.0 * u / (r * outer), v / (r * outer)])


def frozen_f(u, v, x, y, t0=0.0):
    return np.sqrt(4.0 * x * x + y * y) / (2.0 * np.sqrt(_offset(t0) + np.sqrt(4.0 * u * u + v * v)))


def frozen_spray(u, v, x, y, t0=0.0):
    r = np.sqrt(4.0 * u * u + v * v)
    denominator = 4.0 * (_offset(t0) + r) * r
    return np.array([
        (u * (-4.0 * x * x + y * y) - 2.0 * v * x * y) / denominator,
        (v * (4.0 * x * x - y * y) - 8.0 * u * x * y) / denominator,
    ])


class Example84TimeField(AnalyticTimeField):
    def __init__(self, t0=0.0, metric=None):
        super().__init__(
            partial(arrival_time, t0=t0),
            partial(arrival_gradient, t0=t0),
            t0,
            metric=metric or Example84Metric(),
            ignition_point=(0.0, 0.0),
        )
