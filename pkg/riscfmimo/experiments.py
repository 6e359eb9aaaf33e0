"""
Experiment drivers: the closed-form validation sweep, outage CDFs of the
minimum rate and of per-user throughput, and the AP-replacement sum-rate sweep.

Topology draws are independent jobs keyed on their index, so results don't depend
on the number of worker threads or on completion order.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .channels import channel_variance, draw_ap_ris_channel, draw_channel_state, draw_ris_phases, write_rho_csv
from .downlink import (POWER_POLICIES, RateReport, closed_form_rate, monte_carlo_rate,
                       per_user_throughput, sinr_terms, sum_rate)
from .estimation import gamma_of
from .geometry import draw_topology, write_topology_csv
from .large_scale import compute_large_scale, write_large_scale_csv
from .report import output_path
from .scenario import ScenarioError, SeedContext, canonical_key, config_hash


logger = logging.getLogger(__name__)

SWEEPABLE = ('ap_count', 'ris_count', 'elements_per_ris', 'user_count', 'area_side_km')

DEFAULT_OUTAGE_LEVELS = (0.05, 0.2)
STATISTICS = ('min-rate', 'throughput')


@dataclass(frozen=True)
class SweepSpec:
    """
    One swept parameter (``M``, ``S``, ``N``, ``K``, ``D`` or the field name) over a
    strictly increasing list of values, around a base scenario.
    """

    parameter: str
    values: tuple
    base: object
    draws: Optional[int] = None

    def __post_init__(self):
        name = canonical_key(self.parameter)
        if name not in SWEEPABLE:
            raise ScenarioError(self.parameter, 'can\'t sweep this parameter (choose from M, S, N, K, D)')

        values = tuple(self.values)
        if not values:
            raise ScenarioError(name, 'sweep needs at least one value')
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ScenarioError(name, 'sweep values must be strictly increasing')

        object.__setattr__(self, 'parameter', name)
        object.__setattr__(self, 'values', values)

    def configs(self):
        """ Yields ``(value, config)`` for every sweep point. """
        for value in self.values:
            yield value, self.base.replace(**{self.parameter: value})


@dataclass(frozen=True)
class CdfTable:
    """ Empirical CDF of a sample; ``values`` is sorted ascending. """

    values: np.ndarray

    @classmethod
    def from_samples(cls, samples):
        values = np.sort(np.asarray(samples, dtype=float).ravel())
        if values.size == 0:
            raise ValueError('Can\'t build a CDF from an empty sample')
        return cls(values)

    @property
    def size(self):
        return self.values.size

    @property
    def levels(self):
        """ CDF value at each sorted sample, i / n. """
        return np.arange(1, self.size + 1) / self.size

    def cdf(self, x):
        return np.searchsorted(self.values, x, side='right') / self.size

    def quantile(self, p):
        """ Smallest sample whose empirical CDF is at least ``p``. """
        if not 0.0 <= p <= 1.0:
            raise ValueError('Outage level must lie in [0, 1], got {}'.format(p))
        return float(np.quantile(self.values, p, method='inverted_cdf'))

    def rows(self):
        return [[float(v), float(level)] for v, level in zip(self.values, self.levels)]


def quantile_ci(cdf, p, confidence=0.95, resamples=999, seed=None):
    """
    Percentile-bootstrap confidence interval of the ``p`` quantile of ``cdf``.

    :param seed: SeedContext for the resampling stream (master seed 0 when omitted)
    :return: (low, high)
    """
    values = cdf.values
    if values[0] == values[-1]:
        return float(values[0]), float(values[0])

    seed = seed if seed is not None else SeedContext(0)
    rng = seed.derive(purpose='bootstrap').rng()

    def statistic(x, axis):
        return np.quantile(x, p, axis=axis, method='inverted_cdf')

    result = stats.bootstrap((values,), statistic, vectorized=True, batch=100, n_resamples=resamples,
                             confidence_level=confidence, method='percentile', random_state=rng)
    return float(result.confidence_interval.low), float(result.confidence_interval.high)


def mean_ci(samples, confidence=0.95):
    """ Normal-approximation interval of a sample mean: (mean, stderr, low, high). """
    samples = np.asarray(samples, dtype=float)
    mean = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / np.sqrt(samples.size)) if samples.size > 1 else 0.0
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    return mean, stderr, mean - z * stderr, mean + z * stderr


def outage_match(cdf_a, cdf_b, levels=None):
    """
    Smallest outage level at which curve ``a`` reaches curve ``b``, i.e.
    quantile_a(p) >= quantile_b(p). None when it never does on the level grid.
    """
    if levels is None:
        levels = np.round(np.arange(1, 200) * 0.005, 3)

    for p in levels:
        if cdf_a.quantile(p) >= cdf_b.quantile(p):
            return float(p)

    return None


def symmetric_oracle_rate(cfg):
    """
    Closed-form per-user rate of the uniform-gain scenario (every beta equal to
    ``cfg.beta_override``), log2(1 + p_d M^2 gamma / (K (p_d M rho + 1))).
    """
    if cfg.beta_override is None:
        raise ScenarioError('beta_override', 'the symmetric oracle needs uniform large-scale gains')

    b = cfg.beta_override
    rho = b + cfg.ris_count * cfg.elements_per_ris * b * b
    gamma = float(gamma_of(rho, cfg.tau_c, cfg.p_c))
    m, k, p_d = cfg.ap_count, cfg.user_count, cfg.p_d
    return float(np.log2(1.0 + p_d * m * m * gamma / (k * (p_d * m * rho + 1.0))))


# ======================================
# One network draw

def report_metadata(cfg, **extra):
    from . import __version__

    meta = {
        'version': __version__,
        'config_hash': config_hash(cfg),
        'master_seed': cfg.master_seed,
        'tau_c': cfg.tau_c,
        'channel_model': cfg.channel_model,
        'ris_fixed_loss': cfg.ris_fixed_loss,
        'power_policy': cfg.power_policy,
    }
    meta.update(extra)
    return meta


def evaluate_topology(cfg, topology_index=0, mc_draws=0, power_policy=None, executor=None):
    """
    Draws topology ``topology_index`` and computes its rates.

    :param mc_draws: Monte-Carlo draws on top of the closed form (0 to skip)
    :param power_policy: maps gamma to a PowerControl, or the name of one in POWER_POLICIES;
        None uses ``cfg.power_policy``
    :param executor: optional executor for the Monte-Carlo chunks
    :return: RateReport
    """
    if power_policy is None:
        power_policy = cfg.power_policy
    if isinstance(power_policy, str):
        try:
            power_policy = POWER_POLICIES[power_policy]
        except KeyError:
            raise ValueError('Unknown power policy {!r}, expected one of {}'.format(
                power_policy, sorted(POWER_POLICIES)))

    seed = SeedContext.for_config(cfg, topology_index=topology_index)
    topology = draw_topology(cfg, seed)
    large_scale = compute_large_scale(topology, cfg, seed)
    phases = draw_ris_phases(cfg, seed)
    h_1 = draw_ap_ris_channel(large_scale, cfg.elements_per_ris, seed)

    rho = channel_variance(large_scale, h_1, phases)
    gamma = gamma_of(rho, cfg.tau_c, cfg.p_c)
    eta = power_policy(gamma)
    rates = closed_form_rate(sinr_terms(gamma, rho, eta, cfg.p_d))

    report = RateReport(closed_form=rates,
                        sum_rate=sum_rate(rates, cfg.tau_c, cfg.coherence_len_symbols),
                        throughputs=per_user_throughput(rates, cfg.bandwidth_hz, cfg.tau_c,
                                                        cfg.coherence_len_symbols),
                        metadata=report_metadata(cfg, topology_index=topology_index, mc_draws=mc_draws))

    if mc_draws:
        mc = monte_carlo_rate(cfg, large_scale, h_1, phases, rho, eta, seed, mc_draws, executor=executor)
        report.mc_rates = mc.mean
        report.mc_stderr = mc.stderr
        report.metadata['mc_average_stderr'] = mc.average_stderr

    return report


def rate_report(cfg, topology_index=0, mc_draws=None, threads=1):
    """ Closed-form and Monte-Carlo rates of one network draw. """
    mc_draws = cfg.channel_draws_per_topology if mc_draws is None else mc_draws
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return evaluate_topology(cfg, topology_index, mc_draws=mc_draws, executor=executor)


def baseline_cf(cfg, topology_index=0, mc_draws=0):
    """ The same deployment without any surface (S = 0). """
    return evaluate_topology(cfg.replace(ris_count=0), topology_index, mc_draws=mc_draws)


def dump_network(cfg, out_dir, topology_index=0):
    """
    Writes node positions, large-scale gains and channel variances of topology
    ``topology_index`` as CSV files, drawn from the same streams as its rates.

    :return: the written paths
    """
    seed = SeedContext.for_config(cfg, topology_index=topology_index)
    topology = draw_topology(cfg, seed)
    large_scale = compute_large_scale(topology, cfg, seed)
    state = draw_channel_state(cfg, large_scale, draw_ris_phases(cfg, seed), seed)

    os.makedirs(out_dir, exist_ok=True)
    meta = report_metadata(cfg, topology_index=topology_index)
    paths = [output_path(out_dir, name, meta, 'csv') for name in ('topology', 'beta', 'rho')]
    write_topology_csv(topology, paths[0])
    write_large_scale_csv(large_scale, paths[1])
    write_rho_csv(state.rho, paths[2])
    logger.info('Dumped topology {} to {}'.format(topology_index, out_dir))
    return paths


def run_topologies(cfg, draws=None, threads=1, progress=None):
    """
    Closed-form reports of topology draws 0 .. draws - 1, in index order.

    :param progress: optional callable ``progress(completed, total)``
    """
    draws = cfg.topology_draws if draws is None else draws
    if draws < 1:
        raise ValueError('Need at least one topology draw')

    reports = []
    step = max(1, draws // 10)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        for report in executor.map(lambda i: evaluate_topology(cfg, i), range(draws)):
            reports.append(report)
            done = len(reports)
            if progress is not None:
                progress(done, draws)
            if done % step == 0 or done == draws:
                logger.info('{}/{} topology draws done'.format(done, draws))
            logger.debug('Topology {}: min rate {:.4f}'.format(done - 1, report.min_rate))

    return reports


# ======================================
# Validation sweep

@dataclass(frozen=True)
class ValidationRow:
    value: float
    closed_form: float
    mc_rate: float
    mc_stderr: float
    oracle: float


@dataclass
class ValidationTable:
    parameter: str
    rows: list
    metadata: dict = field(default_factory=dict)

    header = ('value', 'closed_form', 'mc_rate', 'mc_stderr', 'symmetric_oracle')

    def table_rows(self):
        return [[r.value, r.closed_form, r.mc_rate, r.mc_stderr, r.oracle] for r in self.rows]

    def to_dict(self):
        return {'parameter': self.parameter,
                'rows': [dict(zip(self.header, row)) for row in self.table_rows()],
                'metadata': dict(self.metadata)}


def validation_sweep(sweep, mc_draws=None, threads=1):
    """
    Per-user average closed-form and Monte-Carlo rates at every sweep point, with all
    large-scale gains forced to ``beta_override``.
    """
    if sweep.base.beta_override is None:
        raise ScenarioError('beta_override', 'the validation sweep runs with uniform large-scale gains; '
                                             'set beta_override (e.g. 1)')

    rows = []
    for value, cfg in sweep.configs():
        draws = sweep.draws or mc_draws or cfg.channel_draws_per_topology
        report = rate_report(cfg, mc_draws=draws, threads=threads)
        row = ValidationRow(value, float(np.mean(report.closed_form)), float(np.mean(report.mc_rates)),
                            report.metadata['mc_average_stderr'], symmetric_oracle_rate(cfg))
        logger.info('{}={}: closed form {:.5f}, Monte-Carlo {:.5f} +- {:.5f}'.format(
            sweep.parameter, value, row.closed_form, row.mc_rate, row.mc_stderr))
        rows.append(row)

    return ValidationTable(sweep.parameter, rows, report_metadata(sweep.base, mc_draws=draws))


# ======================================
# Outage CDFs

@dataclass
class OutageResult:
    """ Empirical CDF of a statistic with its outage quantiles and bootstrap intervals. """

    statistic: str
    cdf: CdfTable
    quantiles: dict
    intervals: dict
    metadata: dict = field(default_factory=dict)

    header = ('value', 'cdf')

    def table_rows(self):
        return self.cdf.rows()

    def to_dict(self):
        return {'statistic': self.statistic,
                'samples': self.cdf.size,
                'quantiles': {str(p): q for p, q in self.quantiles.items()},
                'intervals': {str(p): list(ci) for p, ci in self.intervals.items()},
                'metadata': dict(self.metadata)}


def _statistic_samples(reports, statistic):
    if statistic == 'min-rate':
        return np.array([report.min_rate for report in reports])
    if statistic == 'throughput':
        return np.concatenate([report.throughputs for report in reports])
    raise ValueError('Unknown statistic {!r}, expected one of {}'.format(statistic, STATISTICS))


def outage_cdf(cfg, statistic, draws=None, levels=DEFAULT_OUTAGE_LEVELS, threads=1, progress=None,
               resamples=999):
    draws = cfg.topology_draws if draws is None else draws
    if draws < 100:
        logger.warning('Only {} topology draws; low outage quantiles will be unreliable'.format(draws))

    reports = run_topologies(cfg, draws, threads=threads, progress=progress)
    cdf = CdfTable.from_samples(_statistic_samples(reports, statistic))
    seed = SeedContext.for_config(cfg)

    return OutageResult(statistic, cdf,
                        {p: cdf.quantile(p) for p in levels},
                        {p: quantile_ci(cdf, p, resamples=resamples, seed=seed) for p in levels},
                        report_metadata(cfg, topology_draws=draws))


def min_rate_cdf(cfg, draws=None, outage_levels=DEFAULT_OUTAGE_LEVELS, threads=1, progress=None):
    """ CDF over topology draws of the smallest closed-form user rate. """
    return outage_cdf(cfg, 'min-rate', draws, outage_levels, threads, progress)


def throughput_cdf(cfg, draws=None, outage_levels=DEFAULT_OUTAGE_LEVELS, threads=1, progress=None):
    """ CDF over topology draws and users of the net per-user throughput in bit/s. """
    return outage_cdf(cfg, 'throughput', draws, outage_levels, threads, progress)


@dataclass
class OutageComparison:
    """ Outage quantiles of a deployment and of the same deployment without surfaces. """

    ris: OutageResult
    baseline: OutageResult

    header = ('outage', 'ris_quantile', 'ris_ci_low', 'ris_ci_high',
              'baseline_quantile', 'baseline_ci_low', 'baseline_ci_high', 'ratio')

    @property
    def metadata(self):
        return self.ris.metadata

    def ratio(self, p):
        base = self.baseline.quantiles[p]
        return float('inf') if base == 0 else self.ris.quantiles[p] / base

    def match_level(self):
        """ Outage level at which the surfaces' curve reaches the baseline curve. """
        return outage_match(self.ris.cdf, self.baseline.cdf)

    def table_rows(self):
        rows = []
        for p in self.ris.quantiles:
            rows.append([p, self.ris.quantiles[p], *self.ris.intervals[p],
                         self.baseline.quantiles[p], *self.baseline.intervals[p], self.ratio(p)])
        return rows

    def to_dict(self):
        return {'ris': self.ris.to_dict(), 'baseline': self.baseline.to_dict(),
                'ratios': {str(p): self.ratio(p) for p in self.ris.quantiles},
                'match_level': self.match_level()}


def compare_outage(cfg, statistic='min-rate', draws=None, levels=DEFAULT_OUTAGE_LEVELS, threads=1,
                   progress=None):
    """ Outage quantiles of ``cfg`` against its S = 0 baseline over the same topology draws. """
    if statistic not in STATISTICS:
        raise ValueError('Unknown statistic {!r}, expected one of {}'.format(statistic, STATISTICS))

    ris = outage_cdf(cfg, statistic, draws, levels, threads, progress)
    baseline = outage_cdf(cfg.replace(ris_count=0), statistic, draws, levels, threads, progress)
    comparison = OutageComparison(ris, baseline)

    for p in levels:
        logger.info('{:.0%} outage {}: {:.4g} vs baseline {:.4g} (x{:.3f})'.format(
            p, statistic, ris.quantiles[p], baseline.quantiles[p], comparison.ratio(p)))

    return comparison


# ======================================
# AP replacement

@dataclass(frozen=True)
class SumRatePoint:
    ap_count: int
    ris_count: int
    elements_per_ris: int
    mean: float
    stderr: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class ApEquivalence:
    """
    The AP count at which the surface-free curve reaches one surface configuration.
    ``status`` is 'ok', 'below-range' or 'above-range'; out of range leaves the
    estimates None.
    """

    point: SumRatePoint
    equivalent_ap_count: Optional[float]
    equivalent_ci: tuple
    status: str

    @property
    def saved_aps(self):
        if self.equivalent_ap_count is None:
            return None
        return self.equivalent_ap_count - self.point.ap_count


@dataclass
class ApReplacementReport:
    cf_curve: list
    equivalences: list
    metadata: dict = field(default_factory=dict)

    header = ('curve', 'ap_count', 'ris_count', 'elements_per_ris', 'sum_rate', 'stderr', 'ci_low',
              'ci_high', 'equivalent_ap_count', 'equivalent_ci_low', 'equivalent_ci_high')

    def table_rows(self):
        rows = [['cf', p.ap_count, p.ris_count, p.elements_per_ris, p.mean, p.stderr, p.ci_low, p.ci_high,
                 None, None, None] for p in self.cf_curve]
        for eq in self.equivalences:
            p = eq.point
            rows.append(['ris', p.ap_count, p.ris_count, p.elements_per_ris, p.mean, p.stderr, p.ci_low,
                         p.ci_high, eq.equivalent_ap_count, *eq.equivalent_ci])
        return rows

    def to_dict(self):
        return {'cf_curve': [p.__dict__ for p in self.cf_curve],
                'equivalences': [dict(eq.point.__dict__, equivalent_ap_count=eq.equivalent_ap_count,
                                      equivalent_ci=list(eq.equivalent_ci), status=eq.status)
                                 for eq in self.equivalences],
                'metadata': dict(self.metadata)}


def mean_sum_rate(cfg, draws=None, threads=1, progress=None):
    reports = run_topologies(cfg, draws, threads=threads, progress=progress)
    mean, stderr, low, high = mean_ci([report.sum_rate for report in reports])
    return SumRatePoint(cfg.ap_count, cfg.ris_count, cfg.elements_per_ris, mean, stderr, low, high)


def _interpolate_ap_count(curve, target):
    ap_counts = np.array([p.ap_count for p in curve], dtype=float)
    means = np.array([p.mean for p in curve])
    if target < means[0]:
        return None, 'below-range'
    if target > means[-1]:
        return None, 'above-range'
    return float(np.interp(target, means, ap_counts)), 'ok'


def ap_replacement_sweep(cf_spec, ris_configs, draws=None, threads=1, progress=None):
    """
    Mean sum rate of the surface-free network over the AP counts of ``cf_spec``,
    mean sum rate of every surface configuration, and for each of those the
    interpolated AP count the surface-free network needs to match it.

    :param cf_spec: SweepSpec over ``ap_count``; surfaces are removed from its base
    :param ris_configs: ScenarioConfigs, typically sharing M and varying S
    """
    if cf_spec.parameter != 'ap_count':
        raise ScenarioError(cf_spec.parameter, 'the AP-replacement sweep runs over M')

    draws = cf_spec.draws or draws
    curve = [mean_sum_rate(cfg.replace(ris_count=0), draws, threads, progress) for _, cfg in cf_spec.configs()]
    means = [p.mean for p in curve]
    if any(b <= a for a, b in zip(means, means[1:])):
        logger.warning('Surface-free sum rate isn\'t increasing in M; crossovers are unreliable')

    equivalences = []
    for cfg in ris_configs:
        point = mean_sum_rate(cfg, draws, threads, progress)
        m_eq, status = _interpolate_ap_count(curve, point.mean)
        ci = tuple(_interpolate_ap_count(curve, bound)[0] for bound in (point.ci_low, point.ci_high))
        equivalences.append(ApEquivalence(point, m_eq, ci, status))

        if m_eq is None:
            logger.info('M={}, S={}: sum rate {:.4f} is {} of the surface-free curve'.format(
                point.ap_count, point.ris_count, point.mean, status))
        else:
            logger.info('M={}, S={}: sum rate {:.4f} matches {:.1f} APs without surfaces'.format(
                point.ap_count, point.ris_count, point.mean, m_eq))

    return ApReplacementReport(curve, equivalences, report_metadata(cf_spec.base, topology_draws=draws))
