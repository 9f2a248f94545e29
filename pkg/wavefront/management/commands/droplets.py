"""
Huyghens droplets from one frontal level and their envelope report.

By default the droplets start on the second-to-last level and last until
T, so with five levels on [0, 16] they run from 12.8 to 16.
"""

from django.core.management.base import CommandError

from wavefront.conf import get_setting
from wavefront.exports import render_svg, svg_frontal, write_frontals_csv, write_json
from wavefront.huyghens import droplets_from_frontal, envelope_check
from wavefront.management.base import EXIT_USAGE, ScenarioCommand
from wavefront.spray import frontal


class Command(ScenarioCommand):
    help = 'Generate Huyghens droplets from a frontal and check that they envelope a later frontal'

    def run(self, scenario, options):
        times = scenario.level_times()
        index = options['level_index']
        if index is None:
            index = max(len(times) - 2, 0)
        if not 0 <= index < len(times):
            raise CommandError(f'--level-index must lie in [0, {len(times) - 1}]', returncode=EXIT_USAGE)
        t1 = times[index]
        delta = options['delta'] if options['delta'] is not None else scenario.T - t1
        if delta <= 0 or t1 + delta > scenario.T + 1e-12 * max(1.0, abs(scenario.T)):
            raise CommandError(
                f'droplets from t={t1:g} need 0 < delta <= {scenario.T - t1:g}, got {delta:g}',
                returncode=EXIT_USAGE,
            )

        metric, net = self.build()
        source = frontal(net, t1)
        target = frontal(net, min(t1 + delta, net.T))
        stride = get_setting('DROPLET_STRIDE')
        centers = source.points[::stride]
        self.stdout.write(f'Generating {len(centers)} droplets of duration {delta:g} from t={t1:g}')
        droplets = droplets_from_frontal(
            metric, source, delta, get_setting('DROPLET_RAYS'), stride, self.opts, self.workers,
        )
        report = envelope_check(droplets, target, delta, centers=centers, orientation=net.orientation)

        write_frontals_csv(droplets, self.out / 'droplets.csv', column='droplet')
        data = report.as_dict()
        data['source_time'] = t1
        data['scenario'] = scenario.as_dict()
        write_json(data, self.out / 'envelope_report.json')
        render_svg(
            'wavefront/droplets.svg',
            self.out / 'droplets.svg',
            [source.points, target.points] + [d.points for d in droplets],
            {'scenario': scenario.as_dict(), 'source': t1, 'target': target.t, 'delta': delta},
            source=svg_frontal(source),
            target=svg_frontal(target),
            droplets=[svg_frontal(d) for d in droplets],
        )

        self.stdout.write(self.style.SUCCESS(f'Droplets written to {self.out}'))
        self.report('max tangency gap / diameter', report.relative_gap)
        self.report('max excursion / diameter', report.relative_excursion)
