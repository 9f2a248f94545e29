"""
Richards' Hamilton-orthogonality equations for Zermelo media, used as oracles.

``richards_rhs`` gives the ray velocity the frontal tangent prescribes;
``richards_analytic`` integrates the explicit solution available when the
Zermelo data depend on time only.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .exceptions import QuadratureError
from .spray import DEGENERATE_TANGENT, Residual, energy_defect, preextremal_defect

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-10
TIME_ONLY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class RichardsVelocity:
    udot_t: np.ndarray
    vdot_t: np.ndarray

    def as_array(self):
        return np.stack([self.udot_t, self.vdot_t], axis=-1)


def richards_rhs(zd, t, u, v, us, vs):
    """Ray velocity (u_t, v_t) for the frontal tangent (u_s, v_s) at (t, u, v)."""
    a, b, c1, c2, theta = zd.coefficients(t, u, v)
    sin, cos = np.sin(theta), np.cos(theta)
    A = us * sin + vs * cos
    B = us * cos - vs * sin
    denominator = np.sqrt(a * a * A * A + b * b * B * B)
    if np.any(denominator == 0.0):
        raise ValueError('frontal tangent must be non-zero')
    udot = (a * a * cos * A - b * b * sin * B) / denominator + c1 * cos + c2 * sin
    vdot = (-a * a * sin * A - b * b * cos * B) / denominator - c1 * sin + c2 * cos
    return RichardsVelocity(udot, vdot)


@lru_cache(maxsize=64)
def spatial_variation(zd, t_range=(0.0, 16.0), window=10.0, samples=16, step=1e-3):
    """Largest central-difference spatial derivative of the coefficients at random samples."""
    rng = np.random.default_rng(20160)
    t = rng.uniform(*t_range, samples)
    u = rng.uniform(-window, window, samples)
    v = rng.uniform(-window, window, samples)
    worst = 0.0
    for du, dv in ((step, 0.0), (0.0, step)):
        plus = np.array(zd.coefficients(t, u + du, v + dv))
        minus = np.array(zd.coefficients(t, u - du, v - dv))
        worst = max(worst, float(np.max(np.abs(plus - minus)) / (2.0 * step)))
    return worst


def check_time_only(zd, t_range=(0.0, 16.0)):
    variation = spatial_variation(zd, tuple(t_range))
    if variation > TIME_ONLY_TOLERANCE:
        raise ValueError(f'Zermelo data vary in space (max spatial derivative {variation:.3e})')


def richards_velocity(zd, s_tilde, r):
    """Velocity of the explicit time-only solution at time r for direction label s̃."""
    a, b, c1, c2, theta = zd.coefficients(r, 0.0, 0.0)
    phase = theta + s_tilde
    norm = np.sqrt(a * a * np.cos(phase) ** 2 + b * b * np.sin(phase) ** 2)
    f = (a * a * np.cos(theta) * np.cos(phase) + b * b * np.sin(theta) * np.sin(phase)) / norm
    g = (-a * a * np.sin(theta) * np.cos(phase) + b * b * np.cos(theta) * np.sin(phase)) / norm
    return np.array([
        f + c2 * np.sin(theta) + c1 * np.cos(theta),
        g + c2 * np.cos(theta) - c1 * np.sin(theta),
    ])


def _integrate(integrand, t0, t):
    result = quad(integrand, t0, t, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE, limit=200, full_output=1)
    if len(result) > 3:
        raise QuadratureError(f'quadrature on [{t0}, {t}] did not converge: {result[3]}')
    return result[0]


def richards_analytic(zd, s_tilde, t, p0, t0=0.0):
    """Position at time t of the explicit solution issuing from p0 at t0."""
    check_time_only(zd, (min(t0, t), max(t0, t)))
    if t == t0:
        return np.asarray(p0, dtype=float).copy()
    du = _integrate(lambda r: richards_velocity(zd, s_tilde, r)[0], t0, t)
    dv = _integrate(lambda r: richards_velocity(zd, s_tilde, r)[1], t0, t)
    return np.asarray(p0, dtype=float) + np.array([du, dv])


def richards_initial_direction(zd, s_tilde, t0=0.0):
    return richards_velocity(zd, s_tilde, t0)


def s_reparametrization(s_tilde, zd=None, t0=0.0):
    """Initial direction angle s of the ray Richards labels s̃.

    Without data this is the closed form for semi-axes in ratio 1:2 (a = 1+t,
    b = 2+2t), where tan s = 4 tan s̃.
    """
    if zd is None:
        angle = np.arctan2(4.0 * np.sin(s_tilde), np.cos(s_tilde))
    else:
        velocity = richards_initial_direction(zd, s_tilde, t0)
        angle = np.arctan2(velocity[1], velocity[0])
    return np.mod(angle, 2.0 * np.pi)


def richards_residual(net, zd=None, times=None, order=2):
    """|γ_t - richards_rhs(γ_s)| at every sample of the net."""
    zd = zd or net.metric.zermelo
    if zd is None:
        raise ValueError('the net metric has no Zermelo data')
    out_t, out_v = [], []
    for i, ray in enumerate(net.rays):
        t = ray.t if times is None else np.asarray(times, dtype=float)
        P, V = ray.position(t), ray.velocity(t)
        Ts = net.orientation * net.s_tangent(i, t, order)
        degenerate = np.linalg.norm(Ts, axis=-1) < DEGENERATE_TANGENT
        Ts = np.where(degenerate[..., None], 1.0, Ts)
        rhs = richards_rhs(zd, t, P[..., 0], P[..., 1], Ts[..., 0], Ts[..., 1]).as_array()
        out_t.append(t)
        out_v.append(np.where(degenerate, np.nan, np.linalg.norm(V - rhs, axis=-1)))
    return Residual(out_t, out_v)


def richards_net_defect(m, zd, s_tildes, times, p0=(0.0, 0.0), t0=0.0, step=1e-5):
    """Pre-extremal and energy-extremal defects along the explicit solution.

    Accelerations come from central differences of the explicit velocity.
    Returns a dict of arrays of shape (len(s_tildes), len(times)).
    """
    pre = np.zeros((len(s_tildes), len(times)))
    energy = np.zeros_like(pre)
    for i, s_tilde in enumerate(s_tildes):
        for j, t in enumerate(times):
            p = richards_analytic(zd, s_tilde, t, p0, t0)
            v = richards_velocity(zd, s_tilde, t)
            a = (richards_velocity(zd, s_tilde, t + step) - richards_velocity(zd, s_tilde, t - step)) / (2 * step)
            pre[i, j] = preextremal_defect(m, t, p, v, a)
            energy[i, j] = energy_defect(m, t, p, v, a)
    logger.debug('explicit solution defects: pre-extremal %.3e, energy %.3e', pre.max(), energy.max())
    return {'preextremal': pre, 'energy': energy}
