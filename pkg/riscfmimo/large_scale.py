"""
Large-scale fading: three-slope path loss with log-normal shadowing.

Beyond the far breakpoint d1 the loss follows the Hata-COST231 fixed term plus a
per-link-kind distance exponent. Between d0 and d1 the slope is 20 dB/decade for
every link kind, and below d0 the loss is flat. Shadowing only applies beyond d1.
"""

import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import pairwise_distance_m
from .scenario import db_to_linear


logger = logging.getLogger(__name__)


class LinkKind(Enum):
    """ The three link families of the deployment. """

    DIRECT = 'direct'       # AP - user
    AP_RIS = 'ap_ris'
    RIS_USER = 'ris_user'

    def exponent(self, cfg):
        if self is LinkKind.DIRECT:
            return cfg.pathloss_exp_direct
        if self is LinkKind.AP_RIS:
            return cfg.pathloss_exp_ap_ris
        return cfg.pathloss_exp_ris_user

    def heights(self, cfg):
        """ (higher, lower) antenna heights in metres of the two link ends. """
        if self is LinkKind.DIRECT:
            pair = (cfg.ap_height_m, cfg.user_height_m)
        elif self is LinkKind.AP_RIS:
            pair = (cfg.ap_height_m, cfg.ris_height_m)
        else:
            pair = (cfg.ris_height_m, cfg.user_height_m)

        return max(pair), min(pair)


def hata_fixed_loss_db(freq_mhz, high_height_m, low_height_m):
    """
    Hata-COST231 fixed term L in dB. The higher node plays the base station and
    the lower one the mobile in the antenna correction.
    """
    log_f = math.log10(freq_mhz)
    return (46.3 + 33.9 * log_f - 13.82 * math.log10(high_height_m)
            - (1.1 * log_f - 0.7) * low_height_m + (1.56 * log_f - 0.8))


def fixed_loss_db(kind, cfg):
    """
    Fixed loss charged on one hop. With ``ris_fixed_loss == 'cascade-once'`` the
    AP-RIS hop carries none, so a reflected path pays the fixed term only once. That
    hop is then a gain referenced to 1 km, which :func:`path_loss_db` caps at 0 dB.
    """
    if kind is LinkKind.AP_RIS and cfg.ris_fixed_loss == 'cascade-once':
        return 0.0

    high, low = kind.heights(cfg)
    return hata_fixed_loss_db(cfg.carrier_freq_mhz, high, low)


def path_loss_db(d_m, kind, cfg):
    """
    Three-slope path loss (a negative gain in dB), continuous at both breakpoints.
    Never above 0 dB: a passive hop doesn't amplify.

    :param d_m: distance(s) in metres, strictly positive
    :param kind: LinkKind
    :param cfg: ScenarioConfig
    :return: float or ndarray matching ``d_m``
    """
    d = np.asarray(d_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError('Path loss needs positive distances')

    loss = fixed_loss_db(kind, cfg)
    alpha = kind.exponent(cfg)
    d0 = cfg.breakpoint_d0_m
    d1 = cfg.breakpoint_d1_m

    at_d1 = -loss - 10.0 * alpha * math.log10(d1 / 1000.0)
    far = -loss - 10.0 * alpha * np.log10(d / 1000.0)
    middle = at_d1 - 20.0 * np.log10(d / d1)
    near = at_d1 - 20.0 * math.log10(d0 / d1)

    pl = np.minimum(np.where(d > d1, far, np.where(d > d0, middle, near)), 0.0)
    return pl if pl.ndim else float(pl)


def shadowing_linear(d_m, shadow_std_db, rng, breakpoint_d1_m):
    """
    Log-normal shadowing multipliers 10^(sigma * z / 10), z ~ N(0, 1), one per entry
    of ``d_m``. Links no longer than d1 get exactly 1. A normal variate is consumed for
    every entry regardless, so the stream layout doesn't depend on distances.
    """
    if shadow_std_db < 0:
        raise ValueError('shadow_std_db can\'t be negative')

    d = np.asarray(d_m, dtype=float)
    z = rng.standard_normal(d.shape)
    multiplier = np.where(d > breakpoint_d1_m, 10.0 ** (shadow_std_db * z / 10.0), 1.0)
    return multiplier if multiplier.ndim else float(multiplier)


@dataclass(frozen=True)
class LargeScale:
    """
    Linear large-scale gains: ``beta_d`` (M x K), ``beta_1`` (M x S), ``beta_2`` (S x K).
    """

    beta_d: np.ndarray
    beta_1: np.ndarray
    beta_2: np.ndarray

    def __post_init__(self):
        m, k = self.beta_d.shape
        if self.beta_1.shape[0] != m or self.beta_2.shape[1] != k or self.beta_1.shape[1] != self.beta_2.shape[0]:
            raise ValueError('Inconsistent large-scale shapes {}, {}, {}'.format(
                self.beta_d.shape, self.beta_1.shape, self.beta_2.shape))


def _link_gains(distances, kind, cfg, seed):
    pl = path_loss_db(distances, kind, cfg)
    rng = seed.derive(purpose='shadow_' + kind.value).rng()
    return db_to_linear(pl) * shadowing_linear(distances, cfg.shadow_std_db, rng, cfg.breakpoint_d1_m)


def compute_large_scale(topology, cfg, seed):
    """
    Path loss times independent shadowing for every AP-user, AP-RIS and RIS-user pair.
    With ``cfg.beta_override`` set every gain is forced to that value.
    """
    m, s, k = topology.counts

    if cfg.beta_override is not None:
        b = float(cfg.beta_override)
        return LargeScale(np.full((m, k), b), np.full((m, s), b), np.full((s, k), b))

    beta_d = _link_gains(pairwise_distance_m(topology.ap_positions, topology.user_positions),
                         LinkKind.DIRECT, cfg, seed)
    # Surface-major layout: the first S rows of a larger deployment draw the same shadowing.
    beta_1 = _link_gains(pairwise_distance_m(topology.ris_positions, topology.ap_positions),
                         LinkKind.AP_RIS, cfg, seed).T
    beta_2 = _link_gains(pairwise_distance_m(topology.ris_positions, topology.user_positions),
                         LinkKind.RIS_USER, cfg, seed)

    return LargeScale(np.asarray(beta_d), np.ascontiguousarray(beta_1), np.asarray(beta_2))


def write_large_scale_csv(large_scale, path):
    """ Dumps every gain with columns link_kind, i, j, beta_linear, beta_db. """
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['link_kind', 'i', 'j', 'beta_linear', 'beta_db'])
        for kind, beta in ((LinkKind.DIRECT, large_scale.beta_d),
                           (LinkKind.AP_RIS, large_scale.beta_1),
                           (LinkKind.RIS_USER, large_scale.beta_2)):
            for (i, j), value in np.ndenumerate(beta):
                writer.writerow([kind.value, i, j, repr(float(value)), repr(float(10.0 * np.log10(value)))])

    logger.debug('Wrote large-scale gains to {}'.format(path))
