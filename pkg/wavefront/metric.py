"""
Time-dependent Finsler metrics and the derivatives of F² the ray equations need.

A ``MetricField`` evaluates F(t, u, v, x, y) on numpy arrays and provides a
``JetF2``: the value of F² together with its first partials and the mixed
second partials in velocity. Jets come either in closed form (builtin metrics)
or from a finite-difference plan that evaluates F on a precomputed stencil in
one vectorized call.

All tensor operations accept stacks of points: ``t`` of shape ``B``, ``p`` and
``V`` of shape ``B + (2,)``. A single point gives back plain 2-vectors and
2x2 matrices.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
from scipy.optimize import brentq

from .exceptions import (
    DegenerateVelocityError,
    NotPositiveDefiniteError,
    RootSearchError,
    SingularTensorError,
)

logger = logging.getLogger(__name__)

MIN_VELOCITY = 1e-12
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class ValidityDomain:
    """A rectangle in (u, v) and a time interval."""

    u_range: tuple = (-np.inf, np.inf)
    v_range: tuple = (-np.inf, np.inf)
    t_range: tuple = (-np.inf, np.inf)

    @property
    def bounded(self):
        return bool(np.all(np.isfinite([*self.u_range, *self.v_range])))

    def contains(self, t, p):
        u, v = p
        return (
            self.u_range[0] <= u <= self.u_range[1]
            and self.v_range[0] <= v <= self.v_range[1]
            and self.t_range[0] <= t <= self.t_range[1]
        )


@dataclass(frozen=True)
class JetF2:
    """F² and its partials at (t, u, v, x, y).

    ``dxdy[..., k, l]`` is [F²]_{u^k y^l}; ``dydy`` is the velocity Hessian,
    twice the fundamental tensor.
    """

    value: np.ndarray
    dt: np.ndarray
    du: np.ndarray
    dy: np.ndarray
    dydy: np.ndarray
    dxdy: np.ndarray
    dtdy: np.ndarray


# Finite-difference plan ---------------------------------------------------

# Output entries and the coordinate indices (t, u, v, x, y) -> (0..4) they
# differentiate by.
JET_ENTRIES = (
    (),
    (0,), (1,), (2,), (3,), (4,),
    (3, 3), (4, 4), (3, 4),
    (1, 3), (1, 4), (2, 3), (2, 4),
    (0, 3), (0, 4),
)

FIRST_DERIVATIVE = {
    2: ((-1, -0.5), (1, 0.5)),
    4: ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)),
}
SECOND_DERIVATIVE = {
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    4: ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12)),
}


@dataclass(frozen=True)
class StencilPlan:
    """Stencil offsets (in step units) and weights mapping F² samples to jet entries."""

    offsets: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, order):
        points = {}
        columns = []

        def add(offset, entry, weight):
            index = points.setdefault(offset, len(points))
            columns.append((index, entry, weight))

        for entry, variables in enumerate(JET_ENTRIES):
            if not variables:
                add((0,) * 5, entry, 1.0)
            elif len(variables) == 1 or variables[0] == variables[1]:
                stencil = FIRST_DERIVATIVE[order] if len(variables) == 1 else SECOND_DERIVATIVE[order]
                for step, weight in stencil:
                    offset = [0] * 5
                    offset[variables[0]] = step
                    add(tuple(offset), entry, weight)
            else:
                i, j = variables
                for (si, wi), (sj, wj) in product(FIRST_DERIVATIVE[order], repeat=2):
                    offset = [0] * 5
                    offset[i] = si
                    offset[j] = sj
                    add(tuple(offset), entry, wi * wj)

        offsets = np.zeros((len(points), 5))
        for offset, index in points.items():
            offsets[index] = offset
        weights = np.zeros((len(points), len(JET_ENTRIES)))
        for index, entry, weight in columns:
            weights[index, entry] += weight
        return cls(offsets, weights)


PLANS = {order: StencilPlan.build(order) for order in (2, 4)}


def _as_batch(t, p, V):
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    V = np.asarray(V, dtype=float)
    shape = np.broadcast_shapes(t.shape, p.shape[:-1], V.shape[:-1])
    return (
        np.broadcast_to(t, shape),
        np.broadcast_to(p, shape + (2,)),
        np.broadcast_to(V, shape + (2,)),
    )


def check_velocity(V):
    norms = np.linalg.norm(V, axis=-1)
    if np.any(norms < MIN_VELOCITY):
        bad = np.asarray(V).reshape(-1, 2)[np.argmin(norms.reshape(-1))]
        raise DegenerateVelocityError(bad)


class MetricField:
    """A time-dependent Finsler metric F(t, u, v, x, y).

    Subclasses implement ``value``; those with closed-form partials set
    ``jet_kind = 'analytic'`` and implement ``analytic_jet``.
    """

    jet_kind = 'finite-difference'
    name = 'metric'

    def __init__(self, domain=None, jet_order=4, jet_step=1e-4):
        self.domain = domain or ValidityDomain()
        self.jet_order = jet_order
        self.jet_step = jet_step

    def value(self, t, u, v, x, y):
        raise NotImplementedError

    @property
    def time_independent(self):
        return False

    def __call__(self, t, p, V):
        t, p, V = _as_batch(t, p, V)
        return self.value(t, p[..., 0], p[..., 1], V[..., 0], V[..., 1])

    def jet(self, t, p, V):
        t, p, V = _as_batch(t, p, V)
        check_velocity(V)
        if self.jet_kind == 'analytic':
            return self.analytic_jet(t, p, V)
        return self.finite_difference_jet(t, p, V)

    def analytic_jet(self, t, p, V):
        raise NotImplementedError

    def finite_difference_jet(self, t, p, V, order=None):
        """Jet of F² from central differences of F on the stencil plan."""
        t, p, V = _as_batch(t, p, V)
        plan = PLANS[order or self.jet_order]
        shape = t.shape
        z = np.concatenate([t[..., None], p, V], axis=-1).reshape(-1, 5)

        h = np.empty_like(z)
        h[:, :3] = self.jet_step * np.maximum(1.0, np.abs(z[:, :3]))
        h[:, 3:] = (self.jet_step * np.maximum(1.0, np.linalg.norm(z[:, 3:], axis=-1)))[:, None]

        points = z[:, None, :] + plan.offsets[None, :, :] * h[:, None, :]
        squared = self.value(*np.moveaxis(points, -1, 0)) ** 2
        raw = squared @ plan.weights

        scale = np.ones_like(raw)
        for entry, variables in enumerate(JET_ENTRIES):
            for index in variables:
                scale[:, entry] *= h[:, index]
        e = (raw / scale).reshape(shape + (len(JET_ENTRIES),))

        dydy = np.stack([
            np.stack([e[..., 6], e[..., 8]], axis=-1),
            np.stack([e[..., 8], e[..., 7]], axis=-1),
        ], axis=-2)
        dxdy = np.stack([
            np.stack([e[..., 9], e[..., 10]], axis=-1),
            np.stack([e[..., 11], e[..., 12]], axis=-1),
        ], axis=-2)
        return JetF2(
            value=e[..., 0],
            dt=e[..., 1],
            du=e[..., 2:4],
            dy=e[..., 4:6],
            dydy=dydy,
            dxdy=dxdy,
            dtdy=e[..., 13:15],
        )

    @cached_property
    def zermelo(self):
        """Equivalent Zermelo data, when the metric has one."""
        return None


class EuclideanMetric(MetricField):
    jet_kind = 'analytic'
    name = 'euclidean'

    @property
    def time_independent(self):
        return True

    def value(self, t, u, v, x, y):
        return np.hypot(x, y) + 0.0 * (t + u + v)

    def analytic_jet(self, t, p, V):
        shape = t.shape
        zero2 = np.zeros(shape + (2,))
        return JetF2(
            value=np.sum(V * V, axis=-1),
            dt=np.zeros(shape),
            du=zero2,
            dy=2.0 * V,
            dydy=np.broadcast_to(2.0 * np.eye(2), shape + (2, 2)).copy(),
            dxdy=np.zeros(shape + (2, 2)),
            dtdy=zero2.copy(),
        )

    @cached_property
    def zermelo(self):
        from .zermelo import ZermeloData

        return ZermeloData.from_strings(a='1', b='1', c1='0', c2='0', theta='0')


class Example84Metric(MetricField):
    """F = sqrt(x^2 + (y/2)^2) / (1 + t), defined for t > -1."""

    jet_kind = 'analytic'
    name = 'example84'

    def value(self, t, u, v, x, y):
        return np.sqrt(x * x + 0.25 * y * y) / (1.0 + t) + 0.0 * (u + v)

    def analytic_jet(self, t, p, V):
        x, y = V[..., 0], V[..., 1]
        s = 1.0 + t
        q = x * x + 0.25 * y * y
        shape = t.shape
        dydy = np.zeros(shape + (2, 2))
        dydy[..., 0, 0] = 2.0 / s**2
        dydy[..., 1, 1] = 0.5 / s**2
        return JetF2(
            value=q / s**2,
            dt=-2.0 * q / s**3,
            du=np.zeros(shape + (2,)),
            dy=np.stack([2.0 * x, 0.5 * y], axis=-1) / (s**2)[..., None],
            dydy=dydy,
            dxdy=np.zeros(shape + (2, 2)),
            dtdy=np.stack([-4.0 * x, -y], axis=-1) / (s**3)[..., None],
        )

    @cached_property
    def zermelo(self):
        from .zermelo import ZermeloData

        return ZermeloData.from_strings(a='1+t', b='2+2*t', c1='0', c2='0', theta='0')


BUILTIN_METRICS = {
    'euclidean': EuclideanMetric,
    'example84': Example84Metric,
}


# Tensor operations ---------------------------------------------------------

def tensor_from_jet(jet):
    """g = ½ Hess_y(F²), checked for positive definiteness."""
    g = 0.5 * jet.dydy
    eigenvalues = np.linalg.eigvalsh(g)
    if np.any(eigenvalues <= 0.0) or not np.all(np.isfinite(eigenvalues)):
        flat = eigenvalues.reshape(-1, 2)
        bad = flat[np.argmin(flat[:, 0])]
        raise NotPositiveDefiniteError(bad)
    return g


def inverse_tensor(g):
    g = np.asarray(g, dtype=float)
    condition = np.linalg.cond(g)
    if np.any(condition > MAX_CONDITION) or not np.all(np.isfinite(condition)):
        raise SingularTensorError(np.max(condition))
    return np.linalg.inv(g)


def spray_from_jet(jet, V, g_inverse):
    """G^i = ¼ g^{il}([F²]_{u^k y^l} V^k − [F²]_{u^l})."""
    w = np.einsum('...kl,...k->...l', jet.dxdy, V) - jet.du
    return 0.25 * np.einsum('...il,...l->...i', g_inverse, w)


def drift_from_jet(jet, g_inverse):
    """N₀^i = ½ g^{il}[F²]_{t y^l}."""
    return 0.5 * np.einsum('...il,...l->...i', g_inverse, jet.dtdy)


def fundamental_tensor(m, t, p, V):
    return tensor_from_jet(m.jet(t, p, V))


def spray_g(m, t, p, V):
    jet = m.jet(t, p, V)
    _, V = np.broadcast_arrays(jet.dy, V)
    return spray_from_jet(jet, V, inverse_tensor(tensor_from_jet(jet)))


def time_drift_n0(m, t, p, V):
    jet = m.jet(t, p, V)
    return drift_from_jet(jet, inverse_tensor(tensor_from_jet(jet)))


def f_inner(m, t, p, V, U, W):
    """g_V(U, W)."""
    g = fundamental_tensor(m, t, p, V)
    return np.einsum('...i,...ij,...j->...', U, g, W)


def unit_vector(m, t, p, d):
    d = np.asarray(d, dtype=float)
    check_velocity(d)
    return d / np.asarray(m(t, p, d))[..., None]


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def hamilton_normal(m, t, p, T, side='left', samples=72):
    """The F-unit vector V on ``side`` of T with g_V(V, T) = 0.

    Scans the indicatrix angle for sign changes of g_V(V, T) and refines each
    bracket with Brent's method.
    """
    T = np.asarray(T, dtype=float)
    check_velocity(T)
    if side not in ('left', 'right'):
        raise ValueError(f'side must be left or right, not {side!r}')

    def direction(psi):
        return np.stack([np.cos(psi), np.sin(psi)], axis=-1)

    def pairing(psi):
        V = unit_vector(m, t, p, direction(psi))
        return f_inner(m, t, p, V, V, T)

    grid = np.linspace(0.0, 2.0 * np.pi, samples + 1)
    profile = pairing(grid[:-1])
    profile = np.append(profile, profile[0])

    candidates = []
    for k in range(samples):
        lo, hi = profile[k], profile[k + 1]
        if lo == 0.0:
            candidates.append(grid[k])
        elif lo * hi < 0.0:
            candidates.append(brentq(pairing, grid[k], grid[k + 1], xtol=1e-15))
    logger.debug('hamilton_normal: %d roots on the indicatrix', len(candidates))

    sign = 1.0 if side == 'left' else -1.0
    for psi in candidates:
        V = unit_vector(m, t, p, direction(psi))
        if sign * _cross(T, V) > 0.0:
            return V
    raise RootSearchError(
        f'no Hamilton-orthogonal direction on the {side} of {tuple(T)}',
        profile=list(zip(grid.tolist(), profile.tolist())),
    )
