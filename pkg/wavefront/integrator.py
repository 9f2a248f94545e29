"""
Adaptive Dormand–Prince 5(4) integration with cubic Hermite dense output.

The driver supports a projection applied after every accepted step (used to
put ray velocities back on the indicatrix) and a domain check on every
accepted state.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import IntegrationError, StepSizeUnderflowError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratorOptions:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_step_fraction: float = 0.02
    max_steps: int = 200_000
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 5.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError('tolerances must be positive')
        if not 0 < self.max_step_fraction <= 1:
            raise ValueError('max_step_fraction must lie in (0, 1]')


class DormandPrince54:
    """Dormand–Prince 5(4) pair. Seven stages, first-same-as-last."""

    order = 5

    eval_stages = [0.0, 1/5, 3/10, 4/5, 8/9, 1.0, 1.0]

    BT = {
        0: [1/5],
        1: [3/40, 9/40],
        2: [44/45, -56/15, 32/9],
        3: [19372/6561, -25360/2187, 64448/6561, -212/729],
        4: [9017/3168, -355/33, 46732/5247, 49/176, -5103/18656],
        5: [35/384, 0, 500/1113, 125/192, -2187/6784, 11/84],
    }

    # 5th order solution minus embedded 4th order solution
    TR = [71/57600, 0, -71/16695, 71/1920, -17253/339200, 22/525, -1/40]

    def step(self, fun, t, y, f0, h):
        """One step from (t, y) with derivative f0; returns (y_new, f_new, error)."""
        k = [f0]
        for i, row in self.BT.items():
            yi = y + h * sum(a * ki for a, ki in zip(row, k) if a != 0)
            k.append(fun(t + self.eval_stages[i + 1] * h, yi))
        # the last stage is evaluated at y_new
        y_new = yi
        error = h * sum(e * ki for e, ki in zip(self.TR, k) if e != 0)
        return y_new, k[-1], error


@dataclass
class DenseOutput:
    """Piecewise cubic Hermite interpolant through the accepted knots."""

    t: np.ndarray
    y: np.ndarray
    f: np.ndarray

    def _locate(self, tq):
        tq = np.asarray(tq, dtype=float)
        if np.any(tq < self.t[0] - 1e-12 * max(1.0, abs(self.t[0]))) or np.any(
            tq > self.t[-1] + 1e-12 * max(1.0, abs(self.t[-1]))
        ):
            raise ValueError(f'time outside [{self.t[0]}, {self.t[-1]}]')
        i = np.clip(np.searchsorted(self.t, tq, side='right') - 1, 0, len(self.t) - 2)
        h = self.t[i + 1] - self.t[i]
        theta = (tq - self.t[i]) / h
        return i, h, theta

    def __call__(self, tq):
        i, h, theta = self._locate(tq)
        h00 = 2 * theta**3 - 3 * theta**2 + 1
        h10 = theta**3 - 2 * theta**2 + theta
        h01 = -2 * theta**3 + 3 * theta**2
        h11 = theta**3 - theta**2
        hh = np.asarray(h)[..., None]
        return (
            h00[..., None] * self.y[i]
            + (h10[..., None] * hh) * self.f[i]
            + h01[..., None] * self.y[i + 1]
            + (h11[..., None] * hh) * self.f[i + 1]
        )

    def derivative(self, tq):
        i, h, theta = self._locate(tq)
        d00 = (6 * theta**2 - 6 * theta) / h
        d10 = 3 * theta**2 - 4 * theta + 1
        d01 = (-6 * theta**2 + 6 * theta) / h
        d11 = 3 * theta**2 - 2 * theta
        return (
            d00[..., None] * self.y[i]
            + d10[..., None] * self.f[i]
            + d01[..., None] * self.y[i + 1]
            + d11[..., None] * self.f[i + 1]
        )


def _error_norm(error, y, y_new, options):
    scale = options.abs_tol + options.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((error / scale) ** 2)))


def solve(fun, t0, y0, t_end, options=None, projection=None, check=None):
    """Integrate y' = fun(t, y) from t0 to t_end.

    ``projection(t, y)`` maps each accepted state before it is stored;
    ``check(t, y)`` may raise to abort. Returns a ``DenseOutput``.
    """
    options = options or IntegratorOptions()
    method = DormandPrince54()
    if t_end <= t0:
        raise ValueError(f't_end={t_end} must exceed t0={t0}')

    span = t_end - t0
    max_step = options.max_step_fraction * span
    t = float(t0)
    y = np.asarray(y0, dtype=float)
    f = fun(t, y)
    ts, ys, fs = [t], [y], [f]

    h = min(max_step, 1e-2 * span)
    rejected = 0
    for _ in range(options.max_steps):
        if t >= t_end:
            break
        h = min(h, t_end - t)
        min_step = 64 * np.finfo(float).eps * max(1.0, abs(t))
        if h < min_step:
            raise StepSizeUnderflowError(t, y, h)

        y_new, f_new, error = method.step(fun, t, y, f, h)
        err = _error_norm(error, y, y_new, options)
        if not np.isfinite(err) or not np.all(np.isfinite(y_new)):
            rejected += 1
            h *= options.min_factor
            logger.debug('non-finite step at t=%.6g, retrying with h=%.3e', t, h)
            continue

        if err <= 1.0:
            t_new = t + h if t_end - (t + h) > min_step else t_end
            if projection is not None:
                y_new = projection(t_new, y_new)
                f_new = fun(t_new, y_new)
            if check is not None:
                check(t_new, y_new)
            t, y, f = t_new, y_new, f_new
            ts.append(t)
            ys.append(y)
            fs.append(f)
            factor = options.max_factor if err == 0 else options.safety * err ** (-1 / method.order)
            h = min(max_step, h * min(options.max_factor, max(options.min_factor, factor)))
        else:
            rejected += 1
            factor = options.safety * err ** (-1 / method.order)
            h *= min(1.0, max(options.min_factor, factor))
    else:
        raise IntegrationError(f'step limit {options.max_steps} reached at t={t:.6g}')

    logger.debug('integrated [%g, %g]: %d steps, %d rejected', t0, t_end, len(ts) - 1, rejected)
    return DenseOutput(np.array(ts), np.array(ys), np.array(fs))
