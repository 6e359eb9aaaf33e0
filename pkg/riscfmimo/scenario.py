"""
Scenario configuration, unit conversions and random stream plumbing.

Every power handled inside the package is linear (watts, or an SNR normalized by
the receiver noise power). dB values only appear in :class:`ScenarioConfig` fields
and in written reports.
"""

import dataclasses
import hashlib
import json
import logging
import math
import zlib
from dataclasses import dataclass
from typing import Optional

import numpy as np


logger = logging.getLogger(__name__)

BOLTZMANN = 1.381e-23
NOISE_TEMPERATURE_K = 290.0

CHANNEL_MODELS = ('marginal', 'cascaded')
RIS_FIXED_LOSS_MODES = ('per-hop', 'cascade-once')
POWER_POLICY_NAMES = ('uniform', 'fractional')

# Short symbols accepted in scenario files and on the command line.
FIELD_ALIASES = {
    'D': 'area_side_km',
    'M': 'ap_count',
    'K': 'user_count',
    'S': 'ris_count',
    'N': 'elements_per_ris',
    'B': 'bandwidth_hz',
    'tau': 'coherence_len_symbols',
    'tau_c': 'pilot_len_symbols',
}

REQUIRED_FIELDS = ('area_side_km', 'ap_count', 'user_count', 'ris_count', 'elements_per_ris')

_INT_FIELDS = ('ap_count', 'user_count', 'ris_count', 'elements_per_ris', 'coherence_len_symbols',
               'pilot_len_symbols', 'topology_draws', 'channel_draws_per_topology', 'master_seed')
_BOOL_FIELDS = ('redraw_phases',)
_STR_FIELDS = ('channel_model', 'ris_fixed_loss', 'power_policy')


class ScenarioError(ValueError):
    """
    Raised when a scenario can't be parsed or violates one of its invariants.
    The offending field name is available as the ``field`` attribute.
    """

    def __init__(self, field_name, message):
        super().__init__('{}: {}'.format(field_name, message))
        self.field = field_name


# ======================================
# Unit conversions

def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


def w_to_dbm(value_w):
    return linear_to_db(np.asarray(value_w, dtype=float) * 1000.0)


def noise_power_w(bandwidth_hz, noise_figure_db):
    """
    Receiver noise power: bandwidth x k_B x T0 x noise factor.

    :param bandwidth_hz: strictly positive bandwidth in Hz
    :param noise_figure_db: noise figure in dB
    :return: noise power in watts
    """
    if bandwidth_hz <= 0:
        raise ValueError('bandwidth_hz must be positive, got {}'.format(bandwidth_hz))

    return bandwidth_hz * BOLTZMANN * NOISE_TEMPERATURE_K * 10.0 ** (noise_figure_db / 10.0)


def normalized_snr(tx_power_w, noise_power):
    if tx_power_w <= 0 or noise_power <= 0:
        raise ValueError('Powers must be positive (tx={}, noise={})'.format(tx_power_w, noise_power))

    return tx_power_w / noise_power


# ======================================
# Configuration

@dataclass(frozen=True)
class ScenarioConfig:
    """
    Every physical and simulation parameter of one scenario. Defaults are the
    system parameters of the reference deployment (1.9 GHz, 20 MHz, 200 mW...).

    ``pilot_len_symbols`` left as None means "one pilot symbol per user"; use the
    :attr:`tau_c` property for the resolved value.
    """

    area_side_km: float
    ap_count: int
    user_count: int
    ris_count: int
    elements_per_ris: int
    carrier_freq_ghz: float = 1.9
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 9.0
    ap_height_m: float = 15.0
    ris_height_m: float = 18.0
    user_height_m: float = 1.65
    shadow_std_db: float = 8.0
    data_power_w: float = 0.2
    pilot_power_w: float = 0.2
    breakpoint_d0_m: float = 10.0
    breakpoint_d1_m: float = 50.0
    coherence_len_symbols: int = 200
    pilot_len_symbols: Optional[int] = None
    pathloss_exp_direct: float = 3.5
    pathloss_exp_ris_user: float = 2.8
    pathloss_exp_ap_ris: float = 2.0
    topology_draws: int = 1
    channel_draws_per_topology: int = 1000
    master_seed: int = 0
    beta_override: Optional[float] = None
    channel_model: str = 'marginal'
    redraw_phases: bool = False
    ris_fixed_loss: str = 'per-hop'
    power_policy: str = 'uniform'

    def __post_init__(self):
        self._validate()

    def _validate(self):
        def check(condition, field_name, message):
            if not condition:
                raise ScenarioError(field_name, message)

        check(self.ap_count >= 1, 'ap_count', 'need at least one AP (M >= 1)')
        check(self.user_count >= 1, 'user_count', 'need at least one user (K >= 1)')
        check(self.ris_count >= 0, 'ris_count', 'surface count can\'t be negative (S >= 0)')
        check(self.elements_per_ris >= 1, 'elements_per_ris', 'need at least one element (N >= 1)')
        check(self.area_side_km > 0, 'area_side_km', 'area side must be positive')

        for name in ('carrier_freq_ghz', 'bandwidth_hz', 'ap_height_m', 'ris_height_m', 'user_height_m',
                     'data_power_w', 'pilot_power_w', 'pathloss_exp_direct', 'pathloss_exp_ris_user',
                     'pathloss_exp_ap_ris'):
            check(getattr(self, name) > 0, name, 'must be strictly positive, got {}'.format(getattr(self, name)))

        check(self.shadow_std_db >= 0, 'shadow_std_db', 'standard deviation can\'t be negative')
        check(self.breakpoint_d0_m > 0, 'breakpoint_d0_m', 'd0 must be positive')
        check(self.breakpoint_d0_m < self.breakpoint_d1_m, 'breakpoint_d1_m', 'need d0 < d1')

        check(self.coherence_len_symbols >= 2, 'coherence_len_symbols', 'coherence interval too short')
        check(self.tau_c >= self.user_count, 'pilot_len_symbols',
              'tau_c = {} is shorter than K = {}; orthogonal pilots need tau_c >= K'.format(
                  self.tau_c, self.user_count))
        check(self.tau_c < self.coherence_len_symbols, 'pilot_len_symbols',
              'tau_c = {} must be shorter than tau = {}'.format(self.tau_c, self.coherence_len_symbols))

        check(self.topology_draws >= 1, 'topology_draws', 'need at least one topology draw')
        check(self.channel_draws_per_topology >= 1, 'channel_draws_per_topology',
              'need at least one channel draw')
        check(self.master_seed >= 0, 'master_seed', 'seed must be a nonnegative integer')
        check(self.beta_override is None or self.beta_override > 0, 'beta_override',
              'override must be positive when set')
        check(self.channel_model in CHANNEL_MODELS, 'channel_model',
              'expected one of {}'.format(', '.join(CHANNEL_MODELS)))
        check(self.ris_fixed_loss in RIS_FIXED_LOSS_MODES, 'ris_fixed_loss',
              'expected one of {}'.format(', '.join(RIS_FIXED_LOSS_MODES)))
        check(self.power_policy in POWER_POLICY_NAMES, 'power_policy',
              'expected one of {}'.format(', '.join(POWER_POLICY_NAMES)))

    @property
    def tau_c(self):
        return self.user_count if self.pilot_len_symbols is None else self.pilot_len_symbols

    @property
    def carrier_freq_mhz(self):
        return self.carrier_freq_ghz * 1000.0

    @property
    def noise_power_w(self):
        return noise_power_w(self.bandwidth_hz, self.noise_figure_db)

    @property
    def p_d(self):
        return normalized_snr(self.data_power_w, self.noise_power_w)

    @property
    def p_c(self):
        return normalized_snr(self.pilot_power_w, self.noise_power_w)

    @property
    def prelog(self):
        return prelog_factor(self.tau_c, self.coherence_len_symbols)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)


def prelog_factor(tau_c, tau):
    """ Fraction of the coherence interval carrying downlink data (half of the non-pilot part). """
    if not tau_c < tau:
        raise ValueError('Need tau_c < tau (got {} and {})'.format(tau_c, tau))

    return (1.0 - tau_c / tau) / 2.0


def config_hash(cfg):
    """
    Short stable digest of a scenario. The master seed is left out so that the hash
    names the scenario and the seed is reported next to it.
    """
    d = cfg.to_dict()
    d.pop('master_seed')
    d['pilot_len_symbols'] = cfg.tau_c
    canonical = json.dumps(d, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:12]


def canonical_key(key):
    key = key.strip()
    return FIELD_ALIASES.get(key, key)


def _coerce(field_name, value):
    if value is None:
        if field_name in ('pilot_len_symbols', 'beta_override'):
            return None
        raise ScenarioError(field_name, 'value can\'t be null')

    if field_name in _BOOL_FIELDS:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ('true', 'false', '1', '0', 'yes', 'no'):
            return value.lower() in ('true', '1', 'yes')
        raise ScenarioError(field_name, 'expected a boolean, got {!r}'.format(value))

    if field_name in _STR_FIELDS:
        if not isinstance(value, str):
            raise ScenarioError(field_name, 'expected a string, got {!r}'.format(value))
        return value

    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(field_name, 'expected a number, got {!r}'.format(value))

    if field_name in _INT_FIELDS:
        if float(value) != math.floor(value):
            raise ScenarioError(field_name, 'expected an integer, got {!r}'.format(value))
        return int(value)

    return float(value)


def build_scenario(mapping):
    """
    Builds a validated :class:`ScenarioConfig` from a flat mapping of field names
    (or their short aliases) to values. Unknown keys and missing required keys
    raise :class:`ScenarioError`.
    """
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    kwargs = {}

    for key, value in mapping.items():
        name = canonical_key(key)
        if name not in known:
            raise ScenarioError(key, 'unknown scenario key')
        if isinstance(value, (dict, list)):
            raise ScenarioError(name, 'scenario files are flat; nested values aren\'t allowed')
        kwargs[name] = _coerce(name, value)

    missing = [name for name in REQUIRED_FIELDS if name not in kwargs]
    if missing:
        raise ScenarioError(missing[0], 'required key missing (also missing: {})'.format(
            ', '.join(missing[1:]) or 'none'))

    return ScenarioConfig(**kwargs)


def read_scenario_mapping(path):
    """ Reads a scenario file (a flat JSON object) into a dict. An empty file is an empty mapping. """
    with open(path, 'r') as f:
        text = f.read()

    if not text.strip():
        return {}

    try:
        mapping = json.loads(text)
    except ValueError as e:
        raise ScenarioError('<file>', 'couldn\'t parse {}: {}'.format(path, e))

    if not isinstance(mapping, dict):
        raise ScenarioError('<file>', '{} must hold a single key-value object'.format(path))

    return mapping


def load_scenario(path):
    cfg = build_scenario(read_scenario_mapping(path))
    logger.debug('Loaded scenario {} from {}'.format(config_hash(cfg), path))
    return cfg


def parse_scalar(text):
    """ Parses an override value as a JSON scalar, falling back to the raw string. """
    try:
        return json.loads(text)
    except ValueError:
        return text.strip()


def parse_value_list(text):
    """
    Parses a sweep value list: ``a,b,c`` or ``a..b[:step]``. Without a step the
    range starts at ``a`` and moves in steps of ``a`` (so ``50..200`` gives 50, 100, 150, 200).
    Returns None when ``text`` holds a single value.
    """
    if '..' in text:
        start_text, _, rest = text.partition('..')
        stop_text, _, step_text = rest.partition(':')
        start = parse_scalar(start_text)
        stop = parse_scalar(stop_text)
        step = parse_scalar(step_text) if step_text else start

        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (start, stop, step)):
            raise ScenarioError('<override>', 'bad range {!r}'.format(text))
        if step <= 0 or stop < start:
            raise ScenarioError('<override>', 'range {!r} is empty'.format(text))

        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]

    if ',' in text:
        return [parse_scalar(v) for v in text.split(',') if v.strip()]

    return None


def parse_override(text):
    """
    Parses ``KEY=VALUE``. Returns ``(field_name, value)`` where value is a list
    when a sweep list/range was given.
    """
    if '=' not in text:
        raise ScenarioError('<override>', 'expected KEY=VALUE, got {!r}'.format(text))

    key, _, value_text = text.partition('=')
    name = canonical_key(key)
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    if name not in known:
        raise ScenarioError(key.strip(), 'unknown scenario key')

    values = parse_value_list(value_text)
    return name, (values if values is not None else parse_scalar(value_text))


# ======================================
# Random streams

@dataclass(frozen=True)
class SeedContext:
    """
    Names one independent random stream. Identical labels always give identical
    draws; any difference in labels gives a statistically independent stream, so
    trial order and worker count never change results.
    """

    master_seed: int
    topology_index: int = 0
    channel_index: int = 0
    purpose: str = ''

    def derive(self, **labels):
        return dataclasses.replace(self, **labels)

    def seed_sequence(self):
        purpose_code = zlib.crc32(self.purpose.encode('utf-8'))
        return np.random.SeedSequence(entropy=self.master_seed,
                                      spawn_key=(self.topology_index, self.channel_index, purpose_code))

    def rng(self):
        return np.random.default_rng(self.seed_sequence())

    @classmethod
    def for_config(cls, cfg, topology_index=0, channel_index=0, purpose=''):
        return cls(cfg.master_seed, topology_index, channel_index, purpose)
