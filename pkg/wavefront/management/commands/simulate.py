"""
Build a scenario's wavefront net and write its data and figure.

Usage:
    python -m rheoflame simulate scenarios/zermelo1.json --out out/zermelo1

Writes net.csv, frontals.csv and net.svg.
"""

from wavefront.exports import render_svg, write_frontals_csv, write_net_csv
from wavefront.management.base import ScenarioCommand
from wavefront.spray import orthogonality_residual, unit_speed_residual


class Command(ScenarioCommand):
    help = 'Integrate the wavefront net of a scenario and export rays and frontals'

    def run(self, scenario, options):
        metric, net = self.build()
        frontals = self.level_frontals(net)
        speed = unit_speed_residual(net)
        orthogonality = orthogonality_residual(net)

        write_net_csv(net, self.out / 'net.csv', speed, orthogonality)
        write_frontals_csv(frontals, self.out / 'frontals.csv')
        render_svg(
            'wavefront/net.svg',
            self.out / 'net.svg',
            [f.points for f in frontals] + [r.positions for r in net.rays],
            {
                'scenario': scenario.as_dict(),
                'levels': [f.t for f in frontals],
                'rays': len(net.rays),
            },
            **self.svg_layers(net, frontals),
        )

        self.stdout.write(self.style.SUCCESS(f'Net written to {self.out}'))
        self.report('max |F - 1|', speed.max)
        self.report('max orthogonality residual', orthogonality.max)
        if orthogonality.flagged:
            self.stdout.write(self.style.WARNING(f'  {orthogonality.flagged} samples with degenerate tangent'))
