"""
Named partial scenarios for the reference experiments. A preset is merged under
the scenario file and command-line overrides, so any of its values can be changed.

The coverage and AP-saving presets charge the fixed loss once per reflected path and
split AP power with the fractional policy. Under uniform power the users next to a
strong surface take most of the power of nearby APs.
"""

from .scenario import ScenarioError


_COVERAGE = {
    'M': 100, 'S': 80, 'N': 30, 'K': 45, 'D': 2,
    'topology_draws': 500,
    'ris_fixed_loss': 'cascade-once',
    'power_policy': 'fractional',
}

PRESETS = {
    # Uniform unit gains; rates depend only on M, K, S, N and the powers.
    'validation': {
        'M': 100, 'K': 40, 'S': 30, 'N': 10, 'tau_c': 40, 'D': 1,
        'beta_override': 1.0,
        'channel_draws_per_topology': 20000,
    },
    'coverage-dense': dict(_COVERAGE),
    'coverage-wide-dense': dict(_COVERAGE, K=90, D=4),
    'coverage-wide-sparse': dict(_COVERAGE, D=4),
    'throughput-k45': dict(_COVERAGE),
    'throughput-k65': dict(_COVERAGE, K=65, S=100),
    # K and D are left out on purpose: they have to be given explicitly.
    'ap-saving': {
        'M': 70, 'S': 80, 'N': 30,
        'topology_draws': 200,
        'ris_fixed_loss': 'cascade-once',
        'power_policy': 'fractional',
    },
}


def preset_mapping(name):
    """ A copy of the preset mapping called ``name``. """
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ScenarioError('preset', 'unknown preset {!r} (available: {})'.format(
            name, ', '.join(sorted(PRESETS))))
