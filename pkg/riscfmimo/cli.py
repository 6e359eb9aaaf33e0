"""
Command-line front end.

    riscfmimo validate --override beta_override=1 --override M=50..200
    riscfmimo min-rate --preset coverage-dense --threads 4
    riscfmimo ap-sweep --override K=45 --override D=2 --override M=80..140:20 --ris-counts 80,200

Exit status is 0 on success, 2 when the scenario is invalid and 1 on any other failure.
"""

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .experiments import (DEFAULT_OUTAGE_LEVELS, SweepSpec, ap_replacement_sweep, compare_outage, dump_network,
                          rate_report, validation_sweep)
from .presets import PRESETS, preset_mapping
from .report import FORMATS, default_out_dir, write_csv, write_result, output_path
from .scenario import ScenarioError, build_scenario, canonical_key, parse_override, parse_value_list, \
    read_scenario_mapping, w_to_dbm


logger = logging.getLogger(__name__)

SUBCOMMANDS = ('validate', 'min-rate', 'throughput', 'ap-sweep', 'rate')

# Preset used when neither --config nor --preset is given.
DEFAULT_PRESETS = {
    'validate': 'validation',
    'min-rate': 'coverage-dense',
    'throughput': 'throughput-k45',
    'ap-sweep': 'ap-saving',
    'rate': None,
}

DEFAULT_SWEEPS = {
    'validate': ('ap_count', [50, 100, 150, 200]),
    'ap-sweep': ('ap_count', [80, 100, 120, 140]),
}


@dataclass
class Command:
    subcommand: str
    config_path: Optional[str] = None
    preset: Optional[str] = None
    overrides: list = field(default_factory=list)
    seed: Optional[int] = None
    trials: Optional[int] = None
    threads: int = 1
    out_dir: Optional[str] = None
    fmt: str = 'csv'
    levels: tuple = DEFAULT_OUTAGE_LEVELS
    ris_aps: Optional[int] = None
    ris_counts: Optional[list] = None
    dump: bool = False

    @classmethod
    def from_args(cls, args):
        return cls(args.subcommand, args.config, args.preset, list(args.override or []), args.seed, args.trials,
                   args.threads, args.out, args.format, _parse_levels(args.levels),
                   args.ris_aps, _parse_counts(args.ris_counts), args.dump)


def _parse_levels(text):
    if text is None:
        return DEFAULT_OUTAGE_LEVELS
    try:
        levels = tuple(float(v) for v in text.split(',') if v.strip())
    except ValueError:
        raise ScenarioError('levels', 'expected comma separated probabilities, got {!r}'.format(text))
    if not levels or any(not 0.0 < p < 1.0 for p in levels):
        raise ScenarioError('levels', 'outage levels must lie strictly between 0 and 1')
    return levels


def _parse_counts(text):
    if text is None:
        return None
    values = parse_value_list(text)
    values = values if values is not None else [int(text)] if text.strip().isdigit() else None
    if not values or any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in values):
        raise ScenarioError('ris_count', 'expected nonnegative surface counts, got {!r}'.format(text))
    return values


def build_parser():
    parser = argparse.ArgumentParser(prog='riscfmimo',
                                     description='Rates, outage CDFs and AP-saving sweeps of cell-free '
                                                 'massive MIMO downlinks aided by RIS.')
    parser.add_argument('--version', action='version', version='%(prog)s {}'.format(__version__))
    parser.add_argument('subcommand', choices=SUBCOMMANDS, help='The experiment to run.')
    parser.add_argument('--config', type=str, default=None,
                        help='Scenario file: a flat JSON object of field names (or M, K, S, N, D, B, tau, tau_c).')
    parser.add_argument('--preset', type=str, default=None, choices=sorted(PRESETS),
                        help='Named scenario merged under the scenario file and overrides.')
    parser.add_argument('--override', type=str, action='append', metavar='KEY=VALUE',
                        help='Scenario override, repeatable. A list (a,b,c) or range (a..b[:step]) makes a sweep.')
    parser.add_argument('--seed', type=int, default=None, help='Master seed.')
    parser.add_argument('--trials', type=int, default=None,
                        help='Channel draws (validate, rate) or topology draws (other experiments).')
    parser.add_argument('--threads', type=int, default=1, help='Worker threads.')
    parser.add_argument('--out', type=str, default=None,
                        help='Output directory (default: $RISCFMIMO_OUT or the working directory).')
    parser.add_argument('--format', type=str, default='csv', choices=FORMATS)
    parser.add_argument('--levels', type=str, default=None,
                        help='Comma separated outage levels for min-rate/throughput (default 0.05,0.2).')
    parser.add_argument('--ris-aps', type=int, default=None,
                        help='AP count of the surface configurations of ap-sweep (default: scenario M).')
    parser.add_argument('--ris-counts', type=str, default=None,
                        help='Surface counts compared by ap-sweep (default 80,200).')
    parser.add_argument('--dump', action='store_true',
                        help='Also write positions, large-scale gains and channel variances of the first topology.')
    parser.add_argument('--verbose', action='store_true', help='Debug logging.')
    return parser


def resolve_scenario(command):
    """
    Merges preset, scenario file, trials/seed and overrides into a base config.

    :return: ``(cfg, sweep)`` where ``sweep`` is ``(field_name, values)`` or None
    """
    preset = command.preset
    if preset is None and command.config_path is None:
        preset = DEFAULT_PRESETS[command.subcommand]

    mapping = {}
    if preset is not None:
        mapping.update({canonical_key(k): v for k, v in preset_mapping(preset).items()})
    if command.config_path is not None:
        mapping.update({canonical_key(k): v for k, v in read_scenario_mapping(command.config_path).items()})

    if command.trials is not None:
        trials_key = 'channel_draws_per_topology' if command.subcommand in ('validate', 'rate') \
            else 'topology_draws'
        mapping[trials_key] = command.trials
    if command.seed is not None:
        mapping['master_seed'] = command.seed

    sweep = None
    for text in command.overrides:
        name, value = parse_override(text)
        if isinstance(value, list):
            if command.subcommand not in DEFAULT_SWEEPS:
                raise ScenarioError(name, '{} takes a single value, not a sweep'.format(command.subcommand))
            if sweep is not None and sweep[0] != name:
                raise ScenarioError(name, 'only one parameter can be swept at a time')
            sweep = (name, value)
            # the base keeps the scenario's own value; the first sweep value fills a gap
            mapping.setdefault(name, value[0])
            continue
        mapping[name] = value

    if sweep is None and command.subcommand in DEFAULT_SWEEPS:
        sweep = DEFAULT_SWEEPS[command.subcommand]
        mapping.setdefault(sweep[0], sweep[1][0])

    return build_scenario(mapping), sweep


def _print_header(cfg, metadata):
    print('riscfmimo {}  config {}  seed {}  tau_c {}'.format(
        metadata['version'], metadata['config_hash'], cfg.master_seed, cfg.tau_c))
    print('M={} K={} S={} N={} D={} km  channel model {}  fixed loss {}  power {}'.format(
        cfg.ap_count, cfg.user_count, cfg.ris_count, cfg.elements_per_ris, cfg.area_side_km,
        cfg.channel_model, cfg.ris_fixed_loss, cfg.power_policy))
    print('data power {:.1f} dBm  pilot power {:.1f} dBm'.format(float(w_to_dbm(cfg.data_power_w)),
                                                             float(w_to_dbm(cfg.pilot_power_w))))


def _run_validate(command, cfg, sweep):
    table = validation_sweep(SweepSpec(sweep[0], sweep[1], cfg), threads=command.threads)
    _print_header(cfg, table.metadata)
    print('{:>10} {:>12} {:>12} {:>10} {:>12}'.format(sweep[0], 'closed form', 'Monte-Carlo', 'stderr',
                                                      'oracle'))
    for row in table.rows:
        print('{:>10} {:>12.5f} {:>12.5f} {:>10.5f} {:>12.5f}'.format(
            row.value, row.closed_form, row.mc_rate, row.mc_stderr, row.oracle))
    return [write_result(table, 'validate', command.out_dir, command.fmt)]


def _run_outage(command, cfg, statistic):
    comparison = compare_outage(cfg, statistic, levels=command.levels, threads=command.threads)
    _print_header(cfg, comparison.metadata)
    print('{} topology draws, {} samples'.format(cfg.topology_draws, comparison.ris.cdf.size))
    for p in command.levels:
        lo, hi = comparison.ris.intervals[p]
        print('{:>5.0%} outage: {:.4g} [{:.4g}, {:.4g}]  baseline {:.4g}  ratio {:.3f}'.format(
            p, comparison.ris.quantiles[p], lo, hi, comparison.baseline.quantiles[p], comparison.ratio(p)))
    match = comparison.match_level()
    print('curves meet at outage {}'.format('never' if match is None else '{:.1%}'.format(match)))

    paths = [write_result(comparison, statistic, command.out_dir, command.fmt)]
    if command.fmt == 'csv':
        # plot-ready CDF curves next to the quantile table
        for label, result in (('ris', comparison.ris), ('baseline', comparison.baseline)):
            path = output_path(command.out_dir, '{}-cdf-{}'.format(statistic, label), comparison.metadata, 'csv')
            write_csv(path, result.header, result.table_rows(), result.metadata)
            paths.append(path)
    return paths


def _run_ap_sweep(command, cfg, sweep):
    ris_aps = command.ris_aps if command.ris_aps is not None else cfg.ap_count
    ris_counts = command.ris_counts if command.ris_counts is not None else [80, 200]
    ris_configs = [cfg.replace(ap_count=ris_aps, ris_count=s) for s in ris_counts]

    report = ap_replacement_sweep(SweepSpec(sweep[0], sweep[1], cfg), ris_configs, threads=command.threads)
    _print_header(cfg, report.metadata)
    for p in report.cf_curve:
        print('no surfaces M={:>4}: sum rate {:.4f} [{:.4f}, {:.4f}]'.format(p.ap_count, p.mean, p.ci_low,
                                                                            p.ci_high))
    for eq in report.equivalences:
        p = eq.point
        if eq.equivalent_ap_count is None:
            matched = eq.status
        else:
            matched = 'matches M={:.1f} [{}, {}]'.format(
                eq.equivalent_ap_count,
                *('{:.1f}'.format(v) if v is not None else 'n/a' for v in eq.equivalent_ci))
        print('M={} S={} N={}: sum rate {:.4f}, {}'.format(p.ap_count, p.ris_count, p.elements_per_ris,
                                                           p.mean, matched))
    return [write_result(report, 'ap-sweep', command.out_dir, command.fmt)]


def _run_rate(command, cfg):
    report = rate_report(cfg, threads=command.threads)
    _print_header(cfg, report.metadata)
    print('closed form: mean {:.4f}, min {:.4f} bit/s/Hz; sum rate {:.4f} bit/s/Hz'.format(
        float(np.mean(report.closed_form)), report.min_rate, report.sum_rate))
    print('Monte-Carlo: mean {:.4f} +- {:.4f} bit/s/Hz over {} draws'.format(
        float(np.mean(report.mc_rates)), report.metadata['mc_average_stderr'], cfg.channel_draws_per_topology))
    print('throughput: mean {:.3f} Mbit/s, min {:.3f} Mbit/s'.format(
        float(np.mean(report.throughputs)) / 1e6, float(np.min(report.throughputs)) / 1e6))
    return [write_result(report, 'rate', command.out_dir, command.fmt)]


def run(command):
    """ Runs one command. Returns the written paths. """
    if command.threads < 1:
        raise ScenarioError('threads', 'need at least one worker thread')
    if command.out_dir is None:
        command.out_dir = default_out_dir()

    cfg, sweep = resolve_scenario(command)
    start = time.perf_counter()

    if command.subcommand == 'validate':
        paths = _run_validate(command, cfg, sweep)
    elif command.subcommand in ('min-rate', 'throughput'):
        paths = _run_outage(command, cfg, command.subcommand)
    elif command.subcommand == 'ap-sweep':
        paths = _run_ap_sweep(command, cfg, sweep)
    else:
        paths = _run_rate(command, cfg)

    if command.dump:
        paths += dump_network(cfg, command.out_dir)

    print('done in {:.1f} s: {}'.format(time.perf_counter() - start, ', '.join(paths)))
    return paths


def main(argv=None):
    args = build_parser().parse_args(argv)

    logging.basicConfig()
    logging.root.setLevel(logging.DEBUG if args.verbose else logging.INFO)

    try:
        run(Command.from_args(args))
    except ScenarioError as e:
        logger.error('Invalid scenario: {}'.format(e))
        print('error: {}'.format(e), file=sys.stderr)
        return 2
    except Exception:
        logger.exception('Run failed')
        return 1

    return 0


if __name__ == '__main__':
    sys.exit(main())
