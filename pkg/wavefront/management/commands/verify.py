"""
Run the diagnostic battery on a scenario and write verify.json.

Checks: unit speed, Hamilton orthogonality, the Richards residual when the
metric has Zermelo data, the explicit Richards solution when the data
depend on time only, the closed-form rays of the example84 metric and the
frozen-geodesic comparison. Thresholds come from RHEOFLAME['VERIFY'].
"""

import numpy as np
from django.core.management.base import CommandError

from wavefront.conf import get_setting, verify_thresholds
from wavefront.exports import write_json
from wavefront.frozen import freeze, time_field, verify_frozen
from wavefront.management.base import EXIT_VERIFY_FAILED, ScenarioCommand
from wavefront.metric import unit_vector
from wavefront.reference import ray_position
from wavefront.richards import richards_analytic, richards_residual, s_reparametrization
from wavefront.spray import integrate_ray, orthogonality_residual, unit_speed_residual

ORACLE_LABELS = 16


class Command(ScenarioCommand):
    help = 'Verify a scenario against every applicable oracle; exit 1 when a threshold is missed'

    def run(self, scenario, options):
        thresholds = verify_thresholds()
        order = thresholds['DIFFERENCE_ORDER']
        self.checks = {}

        metric, net = self.build()
        self.check('unit_speed', unit_speed_residual(net).max, thresholds['UNIT_SPEED'])
        self.check('orthogonality', orthogonality_residual(net, order=order).max, thresholds['ORTHOGONALITY'])

        point = net.ignition.kind == 'point'
        if scenario.builtin == 'example84' and point:
            self.check('closed_form', self.closed_form_error(net), thresholds['CLOSED_FORM'])

        zd = metric.zermelo
        if zd is not None:
            self.check('richards', richards_residual(net, zd, order=order).max, thresholds['RICHARDS'])
            if point and not zd.variables & {'u', 'v'}:
                self.check('richards_oracle', self.oracle_error(metric, zd, net), thresholds['RICHARDS_ORACLE'])

        tf = time_field(net, levels=get_setting('TIME_LEVELS'), edge_tolerance=get_setting('TIMEFIELD_EDGE_TOLERANCE'))
        selected = list(range(0, len(net.rays), get_setting('FROZEN_RAY_STRIDE')))
        frozen = verify_frozen(net, freeze(metric, tf), self.opts, rays=selected)
        self.check('frozen', frozen.max_deviation, thresholds['FROZEN'])

        passed = all(c['passed'] for c in self.checks.values())
        write_json(
            {
                'scenario': scenario.as_dict(),
                'difference_order': order,
                'passed': passed,
                'checks': self.checks,
            },
            self.out / 'verify.json',
        )
        if not passed:
            failed = ', '.join(name for name, c in self.checks.items() if not c['passed'])
            raise CommandError(f'verification failed: {failed}', returncode=EXIT_VERIFY_FAILED)
        self.stdout.write(self.style.SUCCESS(f'All {len(self.checks)} checks passed'))

    def check(self, name, value, threshold):
        value = float(value)
        self.checks[name] = {'value': value, 'threshold': threshold, 'passed': bool(value <= threshold)}
        self.report(name, value, threshold)

    def closed_form_error(self, net):
        p0 = net.ignition.p
        return max(
            float(np.max(np.linalg.norm(ray.positions - ray_position(ray.s, ray.t, net.t0, p0), axis=-1)))
            for ray in net.rays
        )

    def oracle_error(self, metric, zd, net):
        """Relative endpoint error of rays started in Richards' initial directions."""
        p0 = np.asarray(net.ignition.p, dtype=float)
        worst = 0.0
        for s_tilde in 2.0 * np.pi * np.arange(ORACLE_LABELS) / ORACLE_LABELS:
            s = s_reparametrization(s_tilde, zd, net.t0)
            v0 = unit_vector(metric, net.t0, p0, np.array([np.cos(s), np.sin(s)]))
            ray = integrate_ray(metric, net.t0, p0, v0, net.T, self.opts, s=s)
            expected = richards_analytic(zd, s_tilde, net.T, p0, net.t0)
            error = np.linalg.norm(ray.positions[-1] - expected) / np.linalg.norm(expected - p0)
            worst = max(worst, float(error))
        return worst
