"""
Rheonomic Randers metrics from Zermelo ellipse data.

The instantaneous indicatrix at (t, u, v) is the ellipse with semi-axes a, b,
translated by C = (c1, c2) and then rotated clockwise by θ:

    E(ψ) = R_θ((a cos ψ, b sin ψ) + C),   R_θ = [[cos θ, sin θ], [-sin θ, cos θ]]

The drift entering the Randers formula is the rotated translation W = R_θ C.
"""

import logging
from dataclasses import dataclass

import numpy as np

from expressions import Expr, parse

from .exceptions import InvalidZermeloDataError
from .metric import MetricField, ValidityDomain

logger = logging.getLogger(__name__)

COEFFICIENTS = ('a', 'b', 'c1', 'c2', 'theta')


@dataclass(frozen=True)
class ZermeloData:
    """Ellipse field coefficients, each a scalar field of (t, u, v)."""

    a: Expr
    b: Expr
    c1: Expr
    c2: Expr
    theta: Expr
    time_only: bool = False

    @classmethod
    def from_strings(cls, a, b, c1, c2, theta, time_only=False):
        return cls(parse(a), parse(b), parse(c1), parse(c2), parse(theta), time_only)

    @property
    def variables(self):
        found = frozenset()
        for name in COEFFICIENTS:
            found |= getattr(self, name).variables()
        return found

    def coefficients(self, t, u, v):
        """(a, b, c1, c2, θ) broadcast to the shape of the arguments."""
        return tuple(np.asarray(getattr(self, name)(t, u, v), dtype=float) for name in COEFFICIENTS)


def h_matrix(a, b, theta):
    """The Riemannian metric whose unit ellipse is the rotated (a, b) ellipse."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise InvalidZermeloDataError(None, f'semi-axes must be positive (a={np.min(a)}, b={np.min(b)})')
    s, c = np.sin(theta), np.cos(theta)
    a2, b2 = a * a, b * b
    h11 = (a2 * s * s + b2 * c * c) / (a2 * b2)
    h12 = (a2 - b2) * s * c / (a2 * b2)
    h22 = (a2 * c * c + b2 * s * s) / (a2 * b2)
    return np.stack([np.stack([h11, h12], axis=-1), np.stack([h12, h22], axis=-1)], axis=-2)


def drift(c1, c2, theta):
    """W = R_θ C."""
    s, c = np.sin(theta), np.cos(theta)
    return c1 * c + c2 * s, -c1 * s + c2 * c


def _first_failure(mask, t, u, v):
    t, u, v, mask = np.broadcast_arrays(t, u, v, mask)
    index = np.argmax(mask)
    return t.flat[index], u.flat[index], v.flat[index]


def randers_f(zd, t, u, v, x, y):
    """F = (sqrt(λ h(V,V) + h(V,W)²) - h(V,W)) / λ with λ = 1 - h(W,W)."""
    a, b, c1, c2, theta = zd.coefficients(t, u, v)
    bad_axes = (a <= 0.0) | (b <= 0.0)
    if np.any(bad_axes):
        raise InvalidZermeloDataError(_first_failure(bad_axes, t, u, v), 'non-positive semi-axis')
    h = h_matrix(a, b, theta)
    h11, h12, h22 = h[..., 0, 0], h[..., 0, 1], h[..., 1, 1]
    w1, w2 = drift(c1, c2, theta)

    lam = 1.0 - (h11 * w1 * w1 + 2.0 * h12 * w1 * w2 + h22 * w2 * w2)
    if np.any(lam <= 0.0):
        where = _first_failure(lam <= 0.0, t, u, v)
        raise InvalidZermeloDataError(where, f'lambda = {float(np.min(lam)):.6g} <= 0')

    hvv = h11 * x * x + 2.0 * h12 * x * y + h22 * y * y
    hvw = h11 * x * w1 + h12 * (x * w2 + y * w1) + h22 * y * w2
    return (np.sqrt(lam * hvv + hvw * hvw) - hvw) / lam


def indicatrix_point(zd, t, u, v, psi):
    a, b, c1, c2, theta = zd.coefficients(t, u, v)
    ex = a * np.cos(psi) + c1
    ey = b * np.sin(psi) + c2
    s, c = np.sin(theta), np.cos(theta)
    return np.stack([c * ex + s * ey, -s * ex + c * ey], axis=-1)


@dataclass(frozen=True)
class ZermeloReport:
    min_lambda: float
    min_a: float
    min_b: float
    worst_location: tuple
    samples: int

    @property
    def passed(self):
        return self.min_lambda > 0.0 and self.min_a > 0.0 and self.min_b > 0.0

    def as_dict(self):
        return {
            'passed': self.passed,
            'min_lambda': self.min_lambda,
            'min_a': self.min_a,
            'min_b': self.min_b,
            'worst_location': list(self.worst_location),
            'samples': self.samples,
        }


def validate(zd, domain, sampling=(65, 65, 33)):
    """Sample the data on a grid over ``domain`` and report min λ, a and b."""
    nu, nv, nt = sampling
    u = np.linspace(*domain.u_range, nu)
    v = np.linspace(*domain.v_range, nv)
    t = np.linspace(*domain.t_range, nt)
    T, U, V = np.meshgrid(t, u, v, indexing='ij')
    a, b, c1, c2, theta = (np.broadcast_to(c, T.shape) for c in zd.coefficients(T, U, V))
    lam = 1.0 - ((c1 / a) ** 2 + (c2 / b) ** 2)
    # worst location over λ, a and b together
    score = np.minimum(lam, np.minimum(a, b))
    index = np.unravel_index(np.argmin(score), score.shape)
    report = ZermeloReport(
        min_lambda=float(np.min(lam)),
        min_a=float(np.min(a)),
        min_b=float(np.min(b)),
        worst_location=(float(T[index]), float(U[index]), float(V[index])),
        samples=int(T.size),
    )
    logger.info('zermelo validation over %d samples: min lambda %.6g', report.samples, report.min_lambda)
    return report


class ZermeloMetric(MetricField):
    """Randers metric of Zermelo data; jets always by finite differences."""

    name = 'zermelo'

    def __init__(self, zermelo, domain=None, jet_order=4, jet_step=1e-4):
        super().__init__(domain=domain, jet_order=jet_order, jet_step=jet_step)
        self.zermelo = zermelo

    @property
    def time_independent(self):
        return 't' not in self.zermelo.variables

    def value(self, t, u, v, x, y):
        return randers_f(self.zermelo, t, u, v, x, y)


def default_domain(t0, T, window=((-20.0, 20.0), (-20.0, 20.0))):
    return ValidityDomain(u_range=tuple(window[0]), v_range=tuple(window[1]), t_range=(t0, T))
