"""
Scenario files: JSON documents naming a metric, an ignition and a time span.

Validation runs through Django forms so errors come back keyed by field
name (``metric.theta``, ``ignition.points`` ...). Unknown keys are rejected
at every level.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from django import forms
from django.core.exceptions import ValidationError

from expressions import ExpressionError, parse

from .conf import get_setting
from .metric import BUILTIN_METRICS, ValidityDomain
from .spray import PointIgnition, PolylineIgnition
from .zermelo import COEFFICIENTS, ZermeloData, ZermeloMetric, default_domain, validate

logger = logging.getLogger(__name__)

DEFAULT_RAYS = 256
DEFAULT_LEVELS = 5
MIN_RAYS = 8


def _finite_pair(value):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        return None
    try:
        pair = (float(value[0]), float(value[1]))
    except (TypeError, ValueError):
        return None
    return pair if all(math.isfinite(x) for x in pair) else None


class StrictForm(forms.Form):
    """A form that refuses keys it does not declare."""

    def __init__(self, data, prefix_label=''):
        if not isinstance(data, dict):
            raise ValidationError({prefix_label or 'scenario': 'expected a JSON object'})
        super().__init__(data)
        self.prefix_label = prefix_label

    def clean(self):
        cleaned = super().clean()
        for key in sorted(set(self.data) - set(self.fields)):
            self.add_error(None, f'unknown field {self.qualified(key)!r}')
        return cleaned

    def qualified(self, name):
        return f'{self.prefix_label}.{name}' if self.prefix_label else name

    def raise_if_invalid(self):
        if not self.is_valid():
            errors = {}
            for name, messages in self.errors.items():
                key = self.qualified(name) if name != '__all__' else (self.prefix_label or 'scenario')
                errors.setdefault(key, []).extend(messages)
            raise ValidationError(errors)
        return self.cleaned_data


class MetricForm(StrictForm):
    kind = forms.ChoiceField(choices=[('zermelo', 'zermelo'), ('builtin', 'builtin')])
    name = forms.ChoiceField(choices=[(n, n) for n in BUILTIN_METRICS], required=False)
    a = forms.CharField(required=False, strip=True)
    b = forms.CharField(required=False, strip=True)
    c1 = forms.CharField(required=False, strip=True)
    c2 = forms.CharField(required=False, strip=True)
    theta = forms.CharField(required=False, strip=True)
    time_only = forms.BooleanField(required=False)

    def clean(self):
        cleaned = super().clean()
        kind = cleaned.get('kind')
        if kind == 'builtin':
            if not cleaned.get('name'):
                self.add_error('name', 'a builtin metric needs a name')
            for coefficient in COEFFICIENTS:
                if cleaned.get(coefficient):
                    self.add_error(coefficient, 'not allowed for a builtin metric')
        elif kind == 'zermelo':
            if cleaned.get('name'):
                self.add_error('name', 'not allowed for a zermelo metric')
            for coefficient in COEFFICIENTS:
                text = cleaned.get(coefficient)
                if not text:
                    self.add_error(coefficient, 'expression required')
                    continue
                try:
                    cleaned[coefficient] = parse(text)
                except ExpressionError as exc:
                    self.add_error(coefficient, str(exc))
        return cleaned


class IgnitionForm(StrictForm):
    type = forms.ChoiceField(choices=[('point', 'point'), ('polyline', 'polyline')])
    p = forms.JSONField(required=False)
    points = forms.JSONField(required=False)
    side = forms.ChoiceField(choices=[('left', 'left'), ('right', 'right')], required=False)

    def clean(self):
        cleaned = super().clean()
        kind = cleaned.get('type')
        if kind == 'point':
            point = _finite_pair(cleaned.get('p'))
            if point is None:
                self.add_error('p', 'expected [u, v] with finite numbers')
            cleaned['ignition'] = point and PointIgnition(point)
        elif kind == 'polyline':
            raw = cleaned.get('points')
            points = [_finite_pair(p) for p in raw] if isinstance(raw, list) else []
            if len(points) < 2 or any(p is None for p in points):
                self.add_error('points', 'expected at least two [u, v] pairs')
            elif any(a == b for a, b in zip(points, points[1:])):
                self.add_error('points', 'consecutive points must differ')
            else:
                cleaned['ignition'] = PolylineIgnition(tuple(points), cleaned.get('side') or 'left')
        return cleaned


class IntegratorForm(StrictForm):
    abs_tol = forms.FloatField(required=False, min_value=0.0)
    rel_tol = forms.FloatField(required=False, min_value=0.0)

    def clean(self):
        cleaned = super().clean()
        for name in ('abs_tol', 'rel_tol'):
            if cleaned.get(name) == 0.0:
                self.add_error(name, 'tolerance must be positive')
        return cleaned


class ScenarioForm(StrictForm):
    name = forms.CharField(required=False)
    description = forms.CharField(required=False)
    metric = forms.JSONField()
    ignition = forms.JSONField()
    t0 = forms.FloatField()
    T = forms.FloatField()
    rays = forms.IntegerField(required=False, min_value=MIN_RAYS)
    levels = forms.IntegerField(required=False, min_value=1)
    integrator = forms.JSONField(required=False)
    output = forms.CharField(required=False)
    domain = forms.JSONField(required=False)

    def clean(self):
        cleaned = super().clean()
        t0, T = cleaned.get('t0'), cleaned.get('T')
        if t0 is not None and T is not None and not T > t0:
            self.add_error('T', f'T={T} must exceed t0={t0}')
        raw = cleaned.get('domain')
        if raw is not None:
            if not isinstance(raw, dict) or set(raw) != {'u', 'v'}:
                self.add_error('domain', 'expected {"u": [min, max], "v": [min, max]}')
            else:
                u, v = _finite_pair(raw['u']), _finite_pair(raw['v'])
                if u is None or v is None or not (u[0] < u[1] and v[0] < v[1]):
                    self.add_error('domain', 'ranges must be increasing pairs of finite numbers')
                else:
                    cleaned['domain'] = (u, v)
        return cleaned


@dataclass
class Scenario:
    name: str
    metric_kind: str
    ignition: object
    t0: float
    T: float
    rays: int = DEFAULT_RAYS
    levels: int = DEFAULT_LEVELS
    abs_tol: float = None
    rel_tol: float = None
    output: str = ''
    builtin: str = ''
    zermelo: ZermeloData = None
    window: tuple = None
    path: Path = None
    validation: object = field(default=None, repr=False)

    @property
    def domain(self):
        """The integration domain: bounded only when the file gives one."""
        if self.window is None:
            return ValidityDomain()
        return default_domain(self.t0, self.T, self.window)

    def build_metric(self, jet_order=None, jet_step=None):
        options = {
            'domain': self.domain,
            'jet_order': jet_order or get_setting('JET_ORDER'),
            'jet_step': jet_step or get_setting('JET_STEP'),
        }
        if self.metric_kind == 'builtin':
            return BUILTIN_METRICS[self.builtin](**options)
        return ZermeloMetric(self.zermelo, **options)

    def level_times(self, levels=None):
        """t_i = t0 + i (T - t0) / L for i = 1 .. L."""
        count = levels or self.levels
        return [self.t0 + i * (self.T - self.t0) / count for i in range(1, count + 1)]

    def as_dict(self):
        data = {
            'name': self.name,
            'metric': self.builtin or 'zermelo',
            'ignition': self.ignition.kind,
            't0': self.t0,
            'T': self.T,
            'rays': self.rays,
            'levels': self.levels,
        }
        if self.zermelo is not None:
            data['zermelo'] = {name: str(getattr(self.zermelo, name)) for name in COEFFICIENTS}
        return data


def scenario_from_dict(data, name='scenario', path=None, window=None):
    """Validate ``data`` and build a Scenario; raises ValidationError."""
    top = ScenarioForm(data).raise_if_invalid()
    metric = MetricForm(top['metric'], 'metric').raise_if_invalid()
    ignition = IgnitionForm(top['ignition'], 'ignition').raise_if_invalid()
    integrator = IntegratorForm(top.get('integrator') or {}, 'integrator').raise_if_invalid()

    scenario = Scenario(
        name=top.get('name') or name,
        metric_kind=metric['kind'],
        ignition=ignition['ignition'],
        t0=top['t0'],
        T=top['T'],
        rays=top.get('rays') or DEFAULT_RAYS,
        levels=top.get('levels') or DEFAULT_LEVELS,
        abs_tol=integrator.get('abs_tol'),
        rel_tol=integrator.get('rel_tol'),
        output=top.get('output') or '',
        builtin=metric.get('name') or '',
        window=top.get('domain'),
        path=path,
    )
    if scenario.metric_kind == 'zermelo':
        scenario.zermelo = ZermeloData(*(metric[c] for c in COEFFICIENTS), time_only=metric.get('time_only', False))
        _validate_zermelo(scenario, window)
    return scenario


def _validate_zermelo(scenario, window=None):
    window = scenario.window or window or get_setting('VALIDATION_WINDOW')
    domain = default_domain(scenario.t0, scenario.T, window)
    try:
        report = validate(scenario.zermelo, domain, tuple(get_setting('VALIDATION_GRID')))
    except ExpressionError as exc:
        raise ValidationError({'metric': [f'Zermelo data cannot be evaluated: {exc}']}) from exc
    if not report.passed:
        t, u, v = report.worst_location
        raise ValidationError({'metric': [
            f'invalid Zermelo data near (t, u, v) = ({t:g}, {u:g}, {v:g}): '
            f'min a = {report.min_a:.6g}, min b = {report.min_b:.6g}, min lambda = {report.min_lambda:.6g}'
        ]})
    scenario.validation = report
    if scenario.zermelo.time_only:
        from .richards import check_time_only

        try:
            check_time_only(scenario.zermelo, (scenario.t0, scenario.T))
        except ValueError as exc:
            raise ValidationError({'metric.time_only': [str(exc)]}) from exc


def load_scenario(path):
    """Read and validate the scenario file at ``path``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError as exc:
        raise ValidationError({'scenario': [f'no such file: {path}']}) from exc
    except json.JSONDecodeError as exc:
        raise ValidationError({'scenario': [f'{path}: invalid JSON at line {exc.lineno}: {exc.msg}']}) from exc
    scenario = scenario_from_dict(data, name=path.stem, path=path)
    logger.info('loaded scenario %s (%s metric, %s ignition)', scenario.name, scenario.builtin or 'zermelo', scenario.ignition.kind)
    return scenario


def validation_messages(error):
    """Flatten a ValidationError into ``field: message`` lines."""
    if hasattr(error, 'message_dict'):
        return [f'{key}: {message}' for key, messages in error.message_dict.items() for message in messages]
    return list(error.messages)
