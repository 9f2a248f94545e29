"""
Freeze a scenario's metric with the arrival-time field of its net.

Writes timefield.csv, frozen_report.json and frozen.svg. Frozen geodesics
are integrated for every FROZEN_RAY_STRIDE-th ray.
"""

from wavefront.conf import get_setting
from wavefront.exports import (
    bounding_box,
    render_svg,
    svg_polyline,
    timefield_grid,
    write_json,
    write_timefield_csv,
)
from wavefront.frozen import freeze, time_field, verify_frozen
from wavefront.management.base import ScenarioCommand
from wavefront.spray import frontal


class Command(ScenarioCommand):
    help = 'Extract the arrival-time field of a net and compare frozen geodesics with its rays'

    def run(self, scenario, options):
        metric, net = self.build()
        tf = time_field(
            net,
            levels=get_setting('TIME_LEVELS'),
            edge_tolerance=get_setting('TIMEFIELD_EDGE_TOLERANCE'),
        )
        fm = freeze(metric, tf)

        final = frontal(net, net.T)
        low, high = bounding_box([final.points], margin=0.0)
        u, v, values = timefield_grid(tf, ((low[0], high[0]), (low[1], high[1])), get_setting('TIMEFIELD_GRID'))
        write_timefield_csv(u, v, values, self.out / 'timefield.csv')

        stride = get_setting('FROZEN_RAY_STRIDE')
        selected = list(range(0, len(net.rays), stride))
        self.stdout.write(f'Integrating {len(selected)} frozen geodesics')
        report = verify_frozen(net, fm, self.opts, rays=selected)
        data = report.as_dict()
        for entry, index in zip(data['rays'], selected):
            entry['s_index'] = index
            entry['s'] = net.rays[index].s
        data['scenario'] = scenario.as_dict()
        write_json(data, self.out / 'frozen_report.json')

        geodesics = [
            svg_polyline(points, f'{net.rays[i].s:.6f}')
            for i, points in zip(selected, report.geodesics)
        ]
        frontals = self.level_frontals(net)
        layers = self.svg_layers(net, frontals)
        render_svg(
            'wavefront/frozen.svg',
            self.out / 'frozen.svg',
            [f.points for f in frontals] + [r.positions for r in net.rays],
            {'scenario': scenario.as_dict(), 'levels': [f.t for f in frontals], 'geodesics': selected},
            geodesics=geodesics,
            **layers,
        )

        self.stdout.write(self.style.SUCCESS(f'Frozen metric artifacts written to {self.out}'))
        self.report('max frozen geodesic deviation', report.max_deviation)
        self.report('max frozen speed drift', report.max_speed_drift)
