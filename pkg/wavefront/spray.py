"""
Wavefront nets: unit-speed rays of the energy pre-extremal system.

A ray solves

    p' = v,    v' = ρ v - 2G(v) - N₀(v)

where ρ is the unique scalar keeping F(t, p, v) = 1. After every accepted
step the velocity is rescaled back onto the indicatrix.
"""

import logging
import time
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool

import numpy as np
from scipy.spatial.distance import pdist

from expressions import ExpressionError

from .exceptions import DomainExitError, NumericalError, RayIntegrationError
from .integrator import IntegratorOptions, solve
from .metric import (
    drift_from_jet,
    hamilton_normal,
    inverse_tensor,
    spray_from_jet,
    tensor_from_jet,
    unit_vector,
)

logger = logging.getLogger(__name__)

DEGENERATE_TANGENT = 1e-10


@dataclass(frozen=True)
class RayState:
    t: float
    p: np.ndarray
    v: np.ndarray
    rho: float


@dataclass(frozen=True)
class PointIgnition:
    p: tuple

    kind = 'point'


@dataclass(frozen=True)
class PolylineIgnition:
    points: tuple
    side: str = 'left'

    kind = 'polyline'

    def __post_init__(self):
        if self.side not in ('left', 'right'):
            raise ValueError(f'side must be left or right, not {self.side!r}')
        if len(self.points) < 2:
            raise ValueError('a polyline needs at least two points')

    def resample(self, count):
        """``count`` points uniformly spaced in arc length, with the arc length grid."""
        points = np.asarray(self.points, dtype=float)
        lengths = np.linalg.norm(np.diff(points, axis=0), axis=1)
        if np.any(lengths == 0.0):
            raise ValueError('polyline has repeated vertices')
        arc = np.concatenate([[0.0], np.cumsum(lengths)])
        s = np.linspace(0.0, arc[-1], count)
        resampled = np.stack([np.interp(s, arc, points[:, 0]), np.interp(s, arc, points[:, 1])], axis=-1)
        return s, resampled


@dataclass
class Ray:
    """One ray of a net: accepted knots, dense output and ρ at the knots."""

    s: float
    s_index: int
    dense: object
    rho: np.ndarray

    @property
    def t(self):
        return self.dense.t

    @property
    def t0(self):
        return float(self.dense.t[0])

    @property
    def T(self):
        return float(self.dense.t[-1])

    @property
    def positions(self):
        return self.dense.y[:, :2]

    @property
    def velocities(self):
        return self.dense.y[:, 2:]

    def position(self, t):
        return self.dense(t)[..., :2]

    def velocity(self, t):
        return self.dense(t)[..., 2:]

    def acceleration(self, t):
        return self.dense.derivative(t)[..., 2:]

    @property
    def states(self):
        return [
            RayState(float(t), y[:2].copy(), y[2:].copy(), float(rho))
            for t, y, rho in zip(self.dense.t, self.dense.y, self.rho)
        ]


# Right-hand sides ---------------------------------------------------------

def rho_closed_form(jet, v, G, N0):
    """ρ keeping F² constant along v' = ρ v - 2G - N₀."""
    rate = jet.dt + np.sum(jet.du * v, axis=-1) - np.sum(jet.dy * (2.0 * G + N0), axis=-1)
    return -rate / (2.0 * jet.value)


def _coefficients(m, t, p, v):
    jet = m.jet(t, p, v)
    g_inverse = inverse_tensor(tensor_from_jet(jet))
    v = np.broadcast_to(v, jet.dy.shape)
    return jet, spray_from_jet(jet, v, g_inverse), drift_from_jet(jet, g_inverse)


def preextremal_rhs(m, state):
    """(p', v') of the energy pre-extremal system at ``state``."""
    jet, G, N0 = _coefficients(m, state.t, state.p, state.v)
    rho = rho_closed_form(jet, state.v, G, N0)
    return np.asarray(state.v, dtype=float), rho * state.v - 2.0 * G - N0


def energy_extremal_rhs(m, state):
    """(p', v') of the Euler–Lagrange system of F², ρ ≡ 0."""
    _, G, N0 = _coefficients(m, state.t, state.p, state.v)
    return np.asarray(state.v, dtype=float), -2.0 * G - N0


def _system(m, constrained, t, y):
    state = RayState(t, y[:2], y[2:], 0.0)
    rhs = preextremal_rhs if constrained else energy_extremal_rhs
    pdot, vdot = rhs(m, state)
    return np.concatenate([pdot, vdot])


def ray_rho(m, t, p, v):
    """ρ along stored samples (vectorized over the leading axis)."""
    jet, G, N0 = _coefficients(m, t, p, v)
    return rho_closed_form(jet, v, G, N0)


def preextremal_defect(m, t, p, v, a):
    """g_v-norm of a + 2G + N₀ - ρ v, the residual of the pre-extremal system."""
    jet, G, N0 = _coefficients(m, t, p, v)
    rho = rho_closed_form(jet, v, G, N0)
    r = a + 2.0 * G + N0 - rho[..., None] * v if np.ndim(rho) else a + 2.0 * G + N0 - rho * v
    g = 0.5 * jet.dydy
    return np.sqrt(np.einsum('...i,...ij,...j->...', r, g, r))


def energy_defect(m, t, p, v, a):
    """g_v-norm of a + 2G + N₀, the residual of the energy-extremal system."""
    jet, G, N0 = _coefficients(m, t, p, v)
    r = a + 2.0 * G + N0
    g = 0.5 * jet.dydy
    return np.sqrt(np.einsum('...i,...ij,...j->...', r, g, r))


# Rays ---------------------------------------------------------------------

def _domain_check(m):
    if not m.domain.bounded:
        return None

    def check(t, y):
        if not m.domain.contains(t, y[:2]):
            raise DomainExitError(t, y[:2])

    return check


def integrate_ray(m, t0, p0, v0, T, opts=None, s=0.0, s_index=0):
    """Integrate one unit-speed pre-extremal ray on [t0, T]."""
    opts = opts or IntegratorOptions()
    p0 = np.asarray(p0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    speed = float(m(t0, p0, v0))
    if abs(speed - 1.0) > 1e-9:
        raise ValueError(f'initial velocity has F = {speed!r}, expected 1')

    def project(t, y):
        return np.concatenate([y[:2], y[2:] / m(t, y[:2], y[2:])])

    dense = solve(
        partial(_system, m, True),
        t0,
        np.concatenate([p0, v0]),
        T,
        options=opts,
        projection=project,
        check=_domain_check(m),
    )
    rho = ray_rho(m, dense.t, dense.y[:, :2], dense.y[:, 2:])
    return Ray(s=float(s), s_index=s_index, dense=dense, rho=rho)


def integrate_extremal(m, t0, p0, v0, T, opts=None, s=0.0, s_index=0):
    """Integrate the unconstrained energy-extremal system: no ρ, no rescaling."""
    opts = opts or IntegratorOptions()
    dense = solve(
        partial(_system, m, False),
        t0,
        np.concatenate([np.asarray(p0, dtype=float), np.asarray(v0, dtype=float)]),
        T,
        options=opts,
        check=_domain_check(m),
    )
    return Ray(s=float(s), s_index=s_index, dense=dense, rho=np.zeros(len(dense.t)))


def _integrate_task(job, metric, t0, T, opts):
    s_index, s, p0, v0 = job
    try:
        return integrate_ray(metric, t0, p0, v0, T, opts, s=s, s_index=s_index), None
    except (NumericalError, ExpressionError) as exc:
        return None, f'{type(exc).__name__}: {exc}'


# Nets ---------------------------------------------------------------------

@dataclass(frozen=True)
class Frontal:
    """The time-level polyline η_t of a net."""

    t: float
    points: np.ndarray
    closed: bool

    @property
    def diameter(self):
        if len(self.points) < 2:
            return 0.0
        return float(np.max(pdist(self.points)))

    @property
    def segments(self):
        points = self.points
        if self.closed:
            return points, np.roll(points, -1, axis=0)
        return points[:-1], points[1:]


@dataclass
class WfNet:
    metric: object
    ignition: object
    t0: float
    T: float
    s: np.ndarray
    rays: list = field(repr=False)

    @property
    def periodic(self):
        return self.ignition.kind == 'point'

    @property
    def orientation(self):
        """+1 when (u_s, v_s) rotated clockwise points along the rays."""
        if self.periodic or self.ignition.side == 'right':
            return 1.0
        return -1.0

    @property
    def ds(self):
        if self.periodic:
            return 2.0 * np.pi / len(self.rays)
        return float(self.s[1] - self.s[0])

    def positions(self, t):
        """γ(s_i, t) for all rays, shape (m, ...) + (2,)."""
        return np.stack([ray.position(t) for ray in self.rays])

    def velocities(self, t):
        return np.stack([ray.velocity(t) for ray in self.rays])

    def s_tangent(self, index, t, order=2):
        """∂γ/∂s for ray ``index`` at times ``t`` over the s-grid.

        ``order`` is 2 or 4 for central differences, or ``'spectral'`` for
        FFT differentiation on point nets (polyline nets fall back to 4).
        """
        m = len(self.rays)
        h = self.ds

        def at(j):
            return self.rays[j % m].position(t)

        if order not in (2, 4, 'spectral'):
            raise ValueError("difference order must be 2, 4 or 'spectral'")
        if order == 'spectral':
            if self.periodic:
                return self._spectral_tangent(index, t)
            order = 4
        if self.periodic:
            if order == 2:
                return (at(index + 1) - at(index - 1)) / (2.0 * h)
            return (-at(index + 2) + 8.0 * at(index + 1) - 8.0 * at(index - 1) + at(index - 2)) / (12.0 * h)

        if index == 0:
            return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        if index == m - 1:
            return (3.0 * at(m - 1) - 4.0 * at(m - 2) + at(m - 3)) / (2.0 * h)
        if order == 4 and 2 <= index <= m - 3:
            return (-at(index + 2) + 8.0 * at(index + 1) - 8.0 * at(index - 1) + at(index - 2)) / (12.0 * h)
        return (at(index + 1) - at(index - 1)) / (2.0 * h)

    def _spectral_tangent(self, index, t):
        P = self.positions(t)
        m = len(self.rays)
        k = np.fft.fftfreq(m, d=1.0 / m)
        if m % 2 == 0:
            k[m // 2] = 0.0
        k = k.reshape((-1,) + (1,) * (P.ndim - 1))
        derivative = np.fft.ifft(1j * k * np.fft.fft(P, axis=0), axis=0)
        return np.real(derivative[index])


def _initial_conditions(m, ignition, t0, m_rays):
    if ignition.kind == 'point':
        s = 2.0 * np.pi * np.arange(m_rays) / m_rays
        p0 = np.asarray(ignition.p, dtype=float)
        directions = np.stack([np.cos(s), np.sin(s)], axis=-1)
        velocities = unit_vector(m, t0, p0, directions)
        return s, [(i, s[i], p0, velocities[i]) for i in range(m_rays)]

    s, points = ignition.resample(m_rays)
    tangents = np.gradient(points, s, axis=0)
    jobs = []
    for i in range(m_rays):
        v0 = hamilton_normal(m, t0, points[i], tangents[i], ignition.side)
        jobs.append((i, s[i], points[i], v0))
    return s, jobs


def build_net(m, ignition, t0, T, m_rays, opts=None, workers=1):
    """Integrate the (ignition, t0)-based net of ``m_rays`` rays up to T.

    With ``workers > 1`` rays run in a process pool; results are kept in
    s-order, so the net does not depend on scheduling.
    """
    if T <= t0:
        raise ValueError(f'T={T} must exceed t0={t0}')
    if m_rays < 3:
        raise ValueError('a net needs at least three rays')
    opts = opts or IntegratorOptions()
    started = time.perf_counter()
    s, jobs = _initial_conditions(m, ignition, t0, m_rays)

    task = partial(_integrate_task, metric=m, t0=t0, T=T, opts=opts)
    if workers > 1:
        with Pool(processes=workers) as pool:
            outputs = list(pool.imap(task, jobs))
    else:
        outputs = []
        for job in jobs:
            try:
                outputs.append((integrate_ray(m, t0, job[2], job[3], T, opts, s=job[1], s_index=job[0]), None))
            except (NumericalError, ExpressionError) as exc:
                raise RayIntegrationError(job[0], exc) from exc

    rays = []
    for (ray, failure), job in zip(outputs, jobs):
        if failure is not None:
            raise RayIntegrationError(job[0], failure)
        rays.append(ray)

    logger.info(
        'net of %d rays on [%g, %g] built in %.2fs (%d knots)',
        m_rays, t0, T, time.perf_counter() - started, sum(len(r.t) for r in rays),
    )
    return WfNet(metric=m, ignition=ignition, t0=float(t0), T=float(T), s=s, rays=rays)


def frontal(net, t1):
    tol = 1e-12 * max(1.0, abs(net.T))
    if not net.t0 - tol <= t1 <= net.T + tol:
        raise ValueError(f't1={t1} outside [{net.t0}, {net.T}]')
    t1 = min(max(t1, net.t0), net.T)
    return Frontal(t=float(t1), points=net.positions(t1), closed=net.periodic)


# Diagnostics --------------------------------------------------------------

@dataclass
class Residual:
    """Per-ray residual samples; NaN marks flagged samples."""

    times: list
    values: list

    @property
    def max(self):
        finite = [v[np.isfinite(v)] for v in self.values]
        finite = [v for v in finite if v.size]
        return float(max(np.max(v) for v in finite)) if finite else 0.0

    @property
    def flagged(self):
        return int(sum(np.count_nonzero(~np.isfinite(v)) for v in self.values))


def _sample_times(net, ray, times):
    return ray.t if times is None else np.asarray(times, dtype=float)


def orthogonality_residual(net, times=None, order=2):
    """|g_V(V, γ_s)| / (|V|_g |γ_s|_g) at the knots of every ray, or at ``times``."""
    m = net.metric
    out_t, out_v = [], []
    for i, ray in enumerate(net.rays):
        t = _sample_times(net, ray, times)
        P, V = ray.position(t), ray.velocity(t)
        Ts = net.s_tangent(i, t, order)
        degenerate = np.linalg.norm(Ts, axis=-1) < DEGENERATE_TANGENT
        Ts_safe = np.where(degenerate[..., None], 1.0, Ts)
        g = tensor_from_jet(m.jet(t, P, V))
        cross = np.einsum('...i,...ij,...j->...', V, g, Ts_safe)
        vv = np.einsum('...i,...ij,...j->...', V, g, V)
        ss = np.einsum('...i,...ij,...j->...', Ts_safe, g, Ts_safe)
        r = np.abs(cross) / np.sqrt(vv * ss)
        r = np.where(degenerate, np.nan, r)
        if np.any(degenerate):
            logger.debug('ray %d: %d degenerate tangent samples', i, int(np.count_nonzero(degenerate)))
        out_t.append(t)
        out_v.append(r)
    return Residual(out_t, out_v)


def unit_speed_residual(net, times=None):
    m = net.metric
    out_t, out_v = [], []
    for ray in net.rays:
        t = _sample_times(net, ray, times)
        out_t.append(t)
        out_v.append(np.abs(np.asarray(m(t, ray.position(t), ray.velocity(t))) - 1.0))
    return Residual(out_t, out_v)
