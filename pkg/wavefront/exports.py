"""
Artifact writers: CSV tables, JSON reports and SVG figures.

Numbers are written with fixed formats so outputs are byte-identical for a
given scenario and version.
"""

import csv
import json
import logging

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder
from django.template.loader import render_to_string

from .exceptions import TimeFieldError

logger = logging.getLogger(__name__)

NUMBER = '{:.10g}'
SVG_NUMBER = '{:.6f}'
SVG_SIZE = 800


def _fmt(value):
    if value is None or (isinstance(value, float) and not np.isfinite(value)):
        return ''
    return NUMBER.format(float(value))


def plain(value):
    """Recursively turn numpy scalars and arrays into JSON-friendly values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def write_json(data, path):
    path.write_text(json.dumps(plain(data), cls=DjangoJSONEncoder, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    logger.info('wrote %s', path)


def _write_rows(path, header, rows):
    with path.open('w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
    logger.info('wrote %s', path)


NET_COLUMNS = ('s_index', 's', 't', 'u', 'v', 'udot', 'vdot', 'rho', 'f_residual', 'orth_residual')


def write_net_csv(net, path, speed, orthogonality):
    """One row per stored knot of every ray."""
    rows = []
    for i, ray in enumerate(net.rays):
        f_res, orth = speed.values[i], orthogonality.values[i]
        for k, t in enumerate(ray.t):
            (u, v), (udot, vdot) = ray.positions[k], ray.velocities[k]
            rows.append([
                ray.s_index, _fmt(ray.s), _fmt(t), _fmt(u), _fmt(v),
                _fmt(udot), _fmt(vdot), _fmt(ray.rho[k]), _fmt(f_res[k]), _fmt(orth[k]),
            ])
    _write_rows(path, NET_COLUMNS, rows)


def write_frontals_csv(frontals, path, column='level'):
    rows = [
        [level, _fmt(f.t), k, _fmt(u), _fmt(v)]
        for level, f in enumerate(frontals)
        for k, (u, v) in enumerate(f.points)
    ]
    _write_rows(path, (column, 't', 'point_index', 'u', 'v'), rows)


def timefield_grid(tf, window, size):
    """Sample ``tf`` on a size x size grid; NaN outside the net image."""
    u = np.linspace(*window[0], size)
    v = np.linspace(*window[1], size)
    values = np.full((size, size), np.nan)
    for i, uu in enumerate(u):
        for j, vv in enumerate(v):
            try:
                values[i, j] = tf.time(uu, vv)
            except TimeFieldError:
                pass
    return u, v, values


def write_timefield_csv(u, v, values, path):
    rows = [
        [_fmt(uu), _fmt(vv), _fmt(values[i, j])]
        for i, uu in enumerate(u)
        for j, vv in enumerate(v)
    ]
    _write_rows(path, ('u', 'v', 't'), rows)


# SVG -----------------------------------------------------------------------

def bounding_box(point_sets, margin=0.05):
    points = np.concatenate([np.asarray(p, dtype=float).reshape(-1, 2) for p in point_sets])
    low, high = points.min(axis=0), points.max(axis=0)
    span = max(float(np.max(high - low)), 1e-9)
    return low - margin * span, high + margin * span


def _svg_points(points):
    # y flipped so the figure reads with the v axis up
    return ' '.join(f'{SVG_NUMBER.format(u)},{SVG_NUMBER.format(-v)}' for u, v in points)


def svg_path(points, closed):
    points = np.asarray(points, dtype=float)
    head, *rest = [f'{SVG_NUMBER.format(u)},{SVG_NUMBER.format(-v)}' for u, v in points]
    d = f'M {head}' + ''.join(f' L {p}' for p in rest)
    return d + ' Z' if closed else d


def svg_frontal(f):
    return {'t': SVG_NUMBER.format(f.t), 'd': svg_path(f.points, f.closed)}


def svg_polyline(points, label=''):
    return {'label': label, 'points': _svg_points(points)}


def render_svg(template, path, point_sets, metadata, **layers):
    low, high = bounding_box(point_sets)
    width, height = high - low
    context = {
        'view_box': ' '.join(SVG_NUMBER.format(x) for x in (low[0], -high[1], width, height)),
        'width': SVG_SIZE,
        'height': int(round(SVG_SIZE * height / width)),
        'stroke': SVG_NUMBER.format(max(width, height) / 800.0),
        'metadata': json.dumps(plain(metadata), cls=DjangoJSONEncoder, sort_keys=True),
        **layers,
    }
    path.write_text(render_to_string(template, context), encoding='utf-8')
    logger.info('wrote %s', path)
