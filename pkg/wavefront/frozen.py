"""
Frozen metrics: substitute a net's arrival-time function into a rheonomic metric.

``NetTimeField`` inverts the net map (s, t) -> (u, v) with a damped Newton
iteration on a spline-in-s, Hermite-in-t local model. ``FrozenMetric``
assembles its jets from the rheonomic jet by the chain rule, so frozen jets
have no time partials.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from .exceptions import NetFoldingError, OutsideNetImageError, TimeFieldError
from .integrator import IntegratorOptions
from .metric import JetF2, MetricField, fundamental_tensor
from .spray import integrate_extremal

logger = logging.getLogger(__name__)

NEWTON_TOLERANCE = 1e-10
NEWTON_ITERATIONS = 60


class TimeField:
    """Arrival time t(u, v) of a net and its gradient."""

    def __init__(self, t0, metric=None, ignition_point=None):
        self.t0 = float(t0)
        self.metric = metric
        self.ignition_point = None if ignition_point is None else np.asarray(ignition_point, dtype=float)

    def at_ignition(self, u, v):
        if self.ignition_point is None:
            return False
        scale = 1.0 + np.linalg.norm(self.ignition_point)
        return bool(np.hypot(u - self.ignition_point[0], v - self.ignition_point[1]) <= 1e-12 * scale)

    def time(self, u, v):
        if self.at_ignition(u, v):
            return self.t0
        return float(self._time(u, v))

    def gradient(self, u, v, direction=None):
        """∂t/∂u^l; at a point ignition the limit along ``direction`` is returned."""
        if self.at_ignition(u, v):
            if direction is None or self.metric is None:
                raise TimeFieldError('the time gradient at the ignition point needs a direction')
            V = np.asarray(direction, dtype=float)
            g = fundamental_tensor(self.metric, self.t0, self.ignition_point, V)
            return g @ V / float(self.metric(self.t0, self.ignition_point, V))
        return np.asarray(self._gradient(u, v), dtype=float)

    def times(self, u, v):
        """Vectorized ``time`` over broadcast arrays."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        out = np.empty(u.shape)
        for index in np.ndindex(u.shape):
            out[index] = self.time(u[index], v[index])
        return out

    def _time(self, u, v):
        raise NotImplementedError

    def _gradient(self, u, v):
        raise NotImplementedError


class AnalyticTimeField(TimeField):
    """A time field given by closed-form callables."""

    def __init__(self, time_fn, gradient_fn, t0, metric=None, ignition_point=None):
        super().__init__(t0, metric=metric, ignition_point=ignition_point)
        self.time_fn = time_fn
        self.gradient_fn = gradient_fn

    def _time(self, u, v):
        return self.time_fn(u, v)

    def _gradient(self, u, v):
        return self.gradient_fn(u, v)


class NetTimeField(TimeField):
    def __init__(self, net, levels=129, edge_tolerance=1e-4):
        point = np.asarray(net.ignition.p, dtype=float) if net.periodic else None
        super().__init__(net.t0, metric=net.metric, ignition_point=point)
        self.net = net
        self.periodic = net.periodic
        self.T = net.T
        self.t_grid = np.linspace(net.t0, net.T, levels)
        self.dt = self.t_grid[1] - self.t_grid[0]
        self.t_max = net.T + edge_tolerance * (net.T - net.t0)

        P = net.positions(self.t_grid)
        V = net.velocities(self.t_grid)
        if self.periodic:
            self.s_grid = np.append(net.s, 2.0 * np.pi)
            P = np.concatenate([P, P[:1]], axis=0)
            V = np.concatenate([V, V[:1]], axis=0)
            bc = 'periodic'
        else:
            self.s_grid = np.asarray(net.s, dtype=float)
            bc = 'not-a-knot'
        self.s_range = (self.s_grid[0], self.s_grid[-1])
        self.position_spline = CubicSpline(self.s_grid, P, axis=0, bc_type=bc)
        self.velocity_spline = CubicSpline(self.s_grid, V, axis=0, bc_type=bc)
        self.position_ds = self.position_spline.derivative()
        self.velocity_ds = self.velocity_spline.derivative()

        first = 1 if self.periodic else 0
        seeds = P[:-1, first:] if self.periodic else P[:, first:]
        self._seed_index = [
            (i, j + first) for i in range(seeds.shape[0]) for j in range(seeds.shape[1])
        ]
        self.tree = cKDTree(seeds.reshape(-1, 2))
        self._check_folding(P, V, first)

    def _check_folding(self, P, V, first):
        Ps = self.position_ds(self.s_grid)
        det = Ps[..., 0] * V[..., 1] - Ps[..., 1] * V[..., 0]
        det = det[:, first:]
        scale = np.max(np.abs(det))
        significant = np.abs(det) > 1e-9 * scale
        positive = np.count_nonzero(significant & (det > 0))
        negative = np.count_nonzero(significant & (det < 0))
        self.orientation = 1.0 if positive >= negative else -1.0
        wrong = significant & (np.sign(det) != self.orientation)
        if np.any(wrong):
            i, j = np.argwhere(wrong)[0]
            j += first
            raise NetFoldingError(self.s_grid[i], self.t_grid[j], P[i, j])

    def _model(self, s, t):
        """γ, γ_s and γ_t of the local model at parameters (s, t)."""
        j = int(np.clip(np.searchsorted(self.t_grid, t, side='right') - 1, 0, len(self.t_grid) - 2))
        h = self.dt
        x = (t - self.t_grid[j]) / h
        P = self.position_spline(s)[j:j + 2]
        V = self.velocity_spline(s)[j:j + 2]
        Ps = self.position_ds(s)[j:j + 2]
        Vs = self.velocity_ds(s)[j:j + 2]

        h00, h10 = 2 * x**3 - 3 * x**2 + 1, (x**3 - 2 * x**2 + x) * h
        h01, h11 = -2 * x**3 + 3 * x**2, (x**3 - x**2) * h
        d00, d10 = (6 * x**2 - 6 * x) / h, 3 * x**2 - 4 * x + 1
        d01, d11 = (-6 * x**2 + 6 * x) / h, 3 * x**2 - 2 * x

        gamma = h00 * P[0] + h10 * V[0] + h01 * P[1] + h11 * V[1]
        gamma_s = h00 * Ps[0] + h10 * Vs[0] + h01 * Ps[1] + h11 * Vs[1]
        gamma_t = d00 * P[0] + d10 * V[0] + d01 * P[1] + d11 * V[1]
        return gamma, gamma_s, gamma_t

    def _clamp(self, s, t):
        if self.periodic:
            s = np.mod(s, 2.0 * np.pi)
        else:
            s = min(max(s, self.s_range[0]), self.s_range[1])
        return s, min(max(t, self.t0), self.t_max)

    def invert(self, u, v):
        """Parameters (s, t) with γ(s, t) = (u, v)."""
        q = np.array([u, v], dtype=float)
        _, k = self.tree.query(q)
        i, j = self._seed_index[k]
        s, t = self.s_grid[i], self.t_grid[j]

        gamma, gamma_s, gamma_t = self._model(s, t)
        residual = gamma - q
        for _ in range(NEWTON_ITERATIONS):
            J = np.column_stack([gamma_s, gamma_t])
            try:
                step = np.linalg.solve(J, -residual)
            except np.linalg.LinAlgError:
                break
            alpha = 1.0
            while True:
                s_new, t_new = self._clamp(s + alpha * step[0], t + alpha * step[1])
                new = self._model(s_new, t_new)
                if np.linalg.norm(new[0] - q) < np.linalg.norm(residual) or alpha < 1e-6:
                    break
                alpha *= 0.5
            if alpha < 1.0:
                logger.debug('newton step damped to %.3g at (%.6g, %.6g)', alpha, u, v)
            moved = np.hypot(s_new - s, t_new - t)
            s, t = s_new, t_new
            gamma, gamma_s, gamma_t = new
            residual = gamma - q
            if moved <= NEWTON_TOLERANCE * (1.0 + abs(s) + abs(t)):
                break

        if np.linalg.norm(residual) > 1e-8 * (1.0 + np.linalg.norm(q)):
            raise OutsideNetImageError(q)
        return s, t, gamma_s, gamma_t

    def _time(self, u, v):
        return self.invert(u, v)[1]

    def _gradient(self, u, v):
        _, _, (xs, ys), (xt, yt) = self.invert(u, v)
        det = xs * yt - ys * xt
        return np.array([-ys, xs]) / det


def time_field(net, levels=129, edge_tolerance=1e-4):
    return NetTimeField(net, levels=levels, edge_tolerance=edge_tolerance)


class FrozenMetric(MetricField):
    """F̂(u, v, x, y) = F(t(u, v), u, v, x, y)."""

    jet_kind = 'analytic'
    name = 'frozen'

    def __init__(self, metric, tf):
        super().__init__(domain=metric.domain, jet_order=metric.jet_order, jet_step=metric.jet_step)
        self.base = metric
        self.time_field = tf

    @property
    def time_independent(self):
        return True

    def value(self, t, u, v, x, y):
        times = self.time_field.times(u, v)
        return self.base.value(times, u, v, x, y)

    def analytic_jet(self, t, p, V):
        shape = t.shape
        flat_p = p.reshape(-1, 2)
        flat_V = V.reshape(-1, 2)
        times = np.empty(len(flat_p))
        grads = np.empty((len(flat_p), 2))
        for k, (point, velocity) in enumerate(zip(flat_p, flat_V)):
            times[k] = self.time_field.time(*point)
            grads[k] = self.time_field.gradient(*point, direction=velocity)
        times = times.reshape(shape)
        grads = grads.reshape(shape + (2,))

        jet = self.base.jet(times, p, V)
        return JetF2(
            value=jet.value,
            dt=np.zeros(shape),
            du=jet.du + jet.dt[..., None] * grads,
            dy=jet.dy,
            dydy=jet.dydy,
            dxdy=jet.dxdy + grads[..., :, None] * jet.dtdy[..., None, :],
            dtdy=np.zeros(shape + (2,)),
        )


def freeze(m, tf):
    return FrozenMetric(m, tf)


def frozen_geodesic(fm, p0, v0, arc, t_start=0.0, opts=None):
    """Geodesic of the frozen metric; times are reported as t_start + arc length."""
    speed = float(fm(t_start, p0, v0))
    if abs(speed - 1.0) > 1e-8:
        raise ValueError(f'initial velocity has frozen length {speed!r}, expected 1')
    return integrate_extremal(fm, t_start, p0, v0, t_start + arc, opts or IntegratorOptions())


@dataclass
class FrozenReport:
    deviations: list = field(default_factory=list)
    speed_drifts: list = field(default_factory=list)
    geodesics: list = field(default_factory=list, repr=False)

    @property
    def max_deviation(self):
        return max(self.deviations) if self.deviations else 0.0

    @property
    def max_speed_drift(self):
        return max(self.speed_drifts) if self.speed_drifts else 0.0

    def as_dict(self):
        return {
            'max_deviation': self.max_deviation,
            'max_speed_drift': self.max_speed_drift,
            'rays': [
                {'s_index': i, 'deviation': d, 'speed_drift': w}
                for i, (d, w) in enumerate(zip(self.deviations, self.speed_drifts))
            ],
        }


def verify_frozen(net, fm, opts=None, rays=None):
    """Integrate frozen geodesics from the rays' initial states and compare."""
    report = FrozenReport()
    selected = range(len(net.rays)) if rays is None else rays
    for i in selected:
        ray = net.rays[i]
        geodesic = frozen_geodesic(fm, ray.positions[0], ray.velocities[0], net.T - net.t0, net.t0, opts)
        t = geodesic.t
        deviation = np.linalg.norm(geodesic.positions - ray.position(t), axis=-1)
        speed = np.asarray(fm(t, geodesic.positions, geodesic.velocities))
        report.deviations.append(float(np.max(deviation)))
        report.speed_drifts.append(float(np.max(np.abs(speed - 1.0))))
        report.geodesics.append(geodesic.positions)
    logger.info('frozen geodesics: max deviation %.3e over %d rays', report.max_deviation, len(report.deviations))
    return report
