"""
Huyghens droplets: short point-ignited nets started from a frontal, and an
empirical check that they envelope the later frontal.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool

import numpy as np

from .spray import PointIgnition, build_net, frontal

logger = logging.getLogger(__name__)


def droplet(m, p, t1, delta, m_rays, opts=None):
    """The frontal at t1 + δ of the net ignited at p at time t1."""
    if delta <= 0:
        raise ValueError('droplet duration must be positive')
    net = build_net(m, PointIgnition(tuple(float(x) for x in p)), t1, t1 + delta, m_rays, opts)
    return frontal(net, t1 + delta)


def droplets_from_frontal(m, source, delta, m_rays, stride=8, opts=None, workers=1):
    """Droplets from every ``stride``-th point of ``source``."""
    centers = source.points[::stride]
    task = partial(droplet, m, t1=source.t, delta=delta, m_rays=m_rays, opts=opts)
    if workers > 1:
        with Pool(processes=workers) as pool:
            return list(pool.imap(task, centers))
    return [task(p) for p in centers]


def polyline_distance(points, start, end):
    """Distance from each point to the nearest segment, with that segment's index."""
    points = np.asarray(points, dtype=float)
    d = end - start
    length2 = np.sum(d * d, axis=-1)
    length2 = np.where(length2 == 0.0, 1.0, length2)
    rel = points[:, None, :] - start[None, :, :]
    along = np.clip(np.sum(rel * d[None], axis=-1) / length2[None], 0.0, 1.0)
    nearest = start[None] + along[..., None] * d[None]
    distance = np.linalg.norm(points[:, None, :] - nearest, axis=-1)
    index = np.argmin(distance, axis=1)
    return distance[np.arange(len(points)), index], index


def inside_polygon(points, polygon):
    """Even-odd rule, vectorized over points."""
    x, y = points[:, 0][:, None], points[:, 1][:, None]
    x1, y1 = polygon[:, 0][None], polygon[:, 1][None]
    x2, y2 = np.roll(polygon[:, 0], -1)[None], np.roll(polygon[:, 1], -1)[None]
    straddles = (y1 > y) != (y2 > y)
    with np.errstate(divide='ignore', invalid='ignore'):
        crossing = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    hits = straddles & (x < crossing)
    return np.count_nonzero(hits, axis=1) % 2 == 1


def outward_excursion(points, target, orientation=1.0):
    """How far each point lies beyond ``target`` (0 when behind it).

    For open targets the outside is the side the net propagates to:
    right of the polyline direction when ``orientation`` is +1.
    """
    start, end = target.segments
    distance, index = polyline_distance(points, start, end)
    if target.closed:
        outside = ~inside_polygon(points, target.points)
    else:
        tangent = end[index] - start[index]
        rel = points - start[index]
        cross = tangent[:, 0] * rel[:, 1] - tangent[:, 1] * rel[:, 0]
        outside = -orientation * cross > 0.0
    return np.where(outside, distance, 0.0)


@dataclass
class DropletEnvelope:
    center: tuple
    gap: float
    excursion: float


@dataclass
class EnvelopeReport:
    delta: float
    target_time: float
    diameter: float
    droplets: list = field(default_factory=list)

    @property
    def max_gap(self):
        return max((d.gap for d in self.droplets), default=0.0)

    @property
    def max_excursion(self):
        return max((d.excursion for d in self.droplets), default=0.0)

    @property
    def relative_gap(self):
        return self.max_gap / self.diameter if self.diameter > 0.0 else float('nan')

    @property
    def relative_excursion(self):
        return self.max_excursion / self.diameter if self.diameter > 0.0 else float('nan')

    def as_dict(self):
        return {
            'delta': self.delta,
            'target_time': self.target_time,
            'diameter': self.diameter,
            'max_gap': self.max_gap,
            'max_excursion': self.max_excursion,
            'relative_gap': self.relative_gap,
            'relative_excursion': self.relative_excursion,
            'droplets': [
                {'center': list(d.center), 'gap': d.gap, 'excursion': d.excursion}
                for d in self.droplets
            ],
        }


def envelope_check(droplets, target, delta=None, centers=None, orientation=1.0):
    """Tangency gap and outward excursion of each droplet against ``target``."""
    if not target.diameter > 0.0:
        logger.warning('target frontal at t=%g has zero diameter; relative gap and excursion are undefined', target.t)
    start, end = target.segments
    report = EnvelopeReport(
        delta=float(delta) if delta is not None else float('nan'),
        target_time=float(target.t),
        diameter=target.diameter,
    )
    for k, drop in enumerate(droplets):
        distance, _ = polyline_distance(drop.points, start, end)
        excursion = outward_excursion(drop.points, target, orientation)
        center = tuple(float(x) for x in centers[k]) if centers is not None else ()
        report.droplets.append(DropletEnvelope(center, float(np.min(distance)), float(np.max(excursion))))
    logger.info(
        'envelope: gap %.3e, excursion %.3e (diameter %.3e)',
        report.max_gap, report.max_excursion, report.diameter,
    )
    return report
