"""
Shared plumbing for the scenario commands.

Exit codes: 0 success, 1 failed verification, 2 usage or scenario error,
3 numerical failure.
"""

from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

import rheoflame
from expressions import ExpressionDomainError
from wavefront.conf import get_setting, integrator_options
from wavefront.exceptions import NumericalError
from wavefront.exports import svg_frontal, svg_polyline
from wavefront.scenarios import MIN_RAYS, load_scenario, validation_messages
from wavefront.spray import build_net, frontal

EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class ScenarioCommand(BaseCommand):
    requires_system_checks = []

    def get_version(self):
        return rheoflame.__version__

    def add_arguments(self, parser):
        parser.add_argument('scenario', help='Path to a scenario JSON file')
        parser.add_argument('--out', help='Output directory (default: out/<scenario name>)')
        parser.add_argument('--rays', type=int, help='Number of rays, overrides the scenario')
        parser.add_argument('--abs-tol', type=float, help='Integrator absolute tolerance')
        parser.add_argument('--rel-tol', type=float, help='Integrator relative tolerance')
        parser.add_argument('--levels', type=int, help='Number of frontal levels')
        parser.add_argument('--delta', type=float, help='Droplet duration')
        parser.add_argument('--level-index', type=int, help='Frontal level the droplets start from (0-based)')
        parser.add_argument('--workers', type=int, help='Worker processes for ray integration')

    def handle(self, *args, **options):
        try:
            scenario = load_scenario(options['scenario'])
        except ValidationError as exc:
            raise CommandError('invalid scenario:\n  ' + '\n  '.join(validation_messages(exc)), returncode=EXIT_USAGE)

        if options['rays'] is not None:
            if options['rays'] < MIN_RAYS:
                raise CommandError(f'--rays must be at least {MIN_RAYS}', returncode=EXIT_USAGE)
            scenario.rays = options['rays']
        if options['levels'] is not None:
            if options['levels'] < 1:
                raise CommandError('--levels must be positive', returncode=EXIT_USAGE)
            scenario.levels = options['levels']
        for name in ('abs_tol', 'rel_tol'):
            if options[name] is not None and options[name] <= 0:
                raise CommandError(f'--{name.replace("_", "-")} must be positive', returncode=EXIT_USAGE)

        out = Path(options['out'] or scenario.output or Path('out') / scenario.name)
        out.mkdir(parents=True, exist_ok=True)
        self.scenario = scenario
        self.out = out
        self.workers = options['workers'] or get_setting('WORKERS')
        self.opts = integrator_options(
            abs_tol=options['abs_tol'] or scenario.abs_tol,
            rel_tol=options['rel_tol'] or scenario.rel_tol,
        )

        try:
            self.run(scenario, options)
        except (NumericalError, ExpressionDomainError) as exc:
            raise CommandError(f'numerical failure: {exc}', returncode=EXIT_NUMERICAL)

    def run(self, scenario, options):
        raise NotImplementedError('subclasses of ScenarioCommand must provide a run() method')

    def build(self):
        """The scenario's metric and net."""
        metric = self.scenario.build_metric()
        self.stdout.write(
            f'Building net: {self.scenario.rays} rays on [{self.scenario.t0:g}, {self.scenario.T:g}] '
            f'({self.workers} worker{"s" if self.workers > 1 else ""})'
        )
        net = build_net(
            metric, self.scenario.ignition, self.scenario.t0, self.scenario.T,
            self.scenario.rays, self.opts, self.workers,
        )
        return metric, net

    def level_frontals(self, net):
        return [frontal(net, t) for t in self.scenario.level_times()]

    def svg_layers(self, net, frontals):
        stride = get_setting('SVG_RAY_STRIDE')
        return {
            'rays': [svg_polyline(ray.positions, f'{ray.s:.6f}') for ray in net.rays[::stride]],
            'frontals': [svg_frontal(f) for f in frontals],
        }

    def report(self, label, value, threshold=None):
        if threshold is None:
            self.stdout.write(f'  {label}: {value:.3e}')
        elif value <= threshold:
            self.stdout.write(self.style.SUCCESS(f'  {label}: {value:.3e} <= {threshold:.1e}'))
        else:
            self.stdout.write(self.style.ERROR(f'  {label}: {value:.3e} > {threshold:.1e}'))
