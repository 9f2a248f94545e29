"""
Settings access for the wavefront app.

The project's ``RHEOFLAME`` dict is merged over ``DEFAULTS``; only the
management commands call into here, the numerical modules take explicit
options.
"""

from django.conf import settings

DEFAULTS = {
    'JET_ORDER': 4,
    'JET_STEP': 1e-4,
    'ABS_TOL': 1e-10,
    'REL_TOL': 1e-8,
    'MAX_STEP_FRACTION': 0.02,
    'WORKERS': 1,
    'TIME_LEVELS': 129,
    'TIMEFIELD_EDGE_TOLERANCE': 1e-4,
    'TIMEFIELD_GRID': 65,
    'VALIDATION_GRID': (65, 65, 33),
    'VALIDATION_WINDOW': ((-20.0, 20.0), (-20.0, 20.0)),
    'DROPLET_STRIDE': 8,
    'DROPLET_RAYS': 64,
    'SVG_RAY_STRIDE': 8,
    'FROZEN_RAY_STRIDE': 8,
    'VERIFY': {
        'DIFFERENCE_ORDER': 'spectral',
        'CLOSED_FORM': 1e-6,
        'UNIT_SPEED': 1e-7,
        'ORTHOGONALITY': 1e-4,
        'RICHARDS': 1e-3,
        'RICHARDS_ORACLE': 1e-4,
        'FROZEN': 1e-3,
    },
}


def get_setting(name):
    configured = getattr(settings, 'RHEOFLAME', {})
    if name == 'VERIFY':
        return {**DEFAULTS['VERIFY'], **configured.get('VERIFY', {})}
    return configured.get(name, DEFAULTS[name])


def integrator_options(**overrides):
    """IntegratorOptions from settings, with command-line overrides applied."""
    from .integrator import IntegratorOptions

    options = {
        'abs_tol': get_setting('ABS_TOL'),
        'rel_tol': get_setting('REL_TOL'),
        'max_step_fraction': get_setting('MAX_STEP_FRACTION'),
    }
    options.update({k: v for k, v in overrides.items() if v is not None})
    return IntegratorOptions(**options)


def verify_thresholds():
    return get_setting('VERIFY')
