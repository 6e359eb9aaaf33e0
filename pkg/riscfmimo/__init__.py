"""
Closed-form and Monte-Carlo downlink rates of cell-free massive MIMO networks
aided by reconfigurable intelligent surfaces (RIS).
"""

import os


def _read_version():
    with open(os.path.join(os.path.dirname(os.path.abspath(__file__)), 'VERSION'), 'r') as f:
        for line in f:
            return line.strip()

    return '0.0.0'


__version__ = _read_version()

from .scenario import (ScenarioConfig, ScenarioError, SeedContext, build_scenario, config_hash, load_scenario,
                       noise_power_w, normalized_snr)
from .geometry import Topology, distance_m, draw_topology
from .large_scale import LargeScale, LinkKind, compute_large_scale, path_loss_db, shadowing_linear
from .channels import (ChannelState, RisPhaseConfig, aggregate_channel, channel_variance, draw_ris_phases,
                       draw_small_scale)
from .estimation import ChannelEstimate, PilotBook, dft_pilot_book, gamma_of, mmse_estimate, receive_pilots
from .downlink import (PowerControl, RateReport, SinrTerms, closed_form_rate, default_eta, fractional_eta, mc_rate,
                       per_user_throughput, sinr_terms, sum_rate)
from .experiments import (CdfTable, SweepSpec, ap_replacement_sweep, baseline_cf, compare_outage, min_rate_cdf,
                          outage_match, quantile_ci, rate_report, throughput_cdf, validation_sweep)
