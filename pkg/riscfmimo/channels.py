"""
Small-scale channels, the RIS response and the aggregate AP-user channels.

``h_1`` (AP-RIS) is a line-of-sight link: unit-modulus entries with uniform phases
scaled by sqrt(beta_1), drawn once per topology and frozen across coherence blocks.
``h_d`` and ``h_2`` are Rayleigh and redrawn every coherence block.
"""

import csv
import logging
from dataclasses import dataclass

import numpy as np


logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def complex_normal(rng, variance, size=None):
    """
    Circularly-symmetric complex Gaussian samples CN(0, variance). ``variance``
    broadcasts against ``size``.
    """
    variance = np.asarray(variance, dtype=float)
    shape = variance.shape if size is None else size
    return np.sqrt(variance / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass(frozen=True)
class RisPhaseConfig:
    """
    Phase shifts of every surface element, ``theta`` with shape (..., S, N). The
    reflection amplitudes are all one.
    """

    theta: np.ndarray

    @property
    def vectors(self):
        """ The complex reflection vectors v = exp(j theta). """
        return np.exp(1j * self.theta)

    @property
    def shape(self):
        return self.theta.shape


def draw_ris_phases(cfg, seed, draws=None):
    """
    I.i.d. uniform phases on [0, 2 pi). With ``draws`` set, returns a batch with a
    leading dimension of that size.
    """
    size = (cfg.ris_count, cfg.elements_per_ris) if draws is None else \
        (draws, cfg.ris_count, cfg.elements_per_ris)
    return RisPhaseConfig(seed.derive(purpose='ris_phases').rng().uniform(0.0, TWO_PI, size=size))


def draw_ap_ris_channel(large_scale, elements_per_ris, seed):
    """
    LoS AP-RIS coefficients, shape (M, S, N), every entry sqrt(beta_1) * exp(j psi).
    Keyed on the topology only: every coherence block of a topology sees the same h_1.
    """
    m, s = large_scale.beta_1.shape
    rng = seed.derive(channel_index=0, purpose='ap_ris_los').rng()
    psi = rng.uniform(0.0, TWO_PI, size=(s, m, elements_per_ris)).transpose(1, 0, 2)
    return np.sqrt(large_scale.beta_1)[:, :, np.newaxis] * np.exp(1j * psi)


def draw_small_scale(cfg, large_scale, seed):
    """
    One coherence block of small-scale fading.

    :return: ``(h_d, h_1, h_2)`` with shapes (M, K), (M, S, N) and (S, K, N)
    """
    n = cfg.elements_per_ris
    s, k = large_scale.beta_2.shape
    h_d = complex_normal(seed.derive(purpose='direct_fading').rng(), large_scale.beta_d)
    h_2 = complex_normal(seed.derive(purpose='ris_user_fading').rng(),
                         large_scale.beta_2[:, :, np.newaxis], size=(s, k, n))
    h_1 = draw_ap_ris_channel(large_scale, n, seed)
    return h_d, h_1, h_2


def _phase_vectors(phases):
    if isinstance(phases, RisPhaseConfig):
        return phases.vectors
    return np.asarray(phases)


def aggregate_channel(h_d, h_1, h_2, phases):
    """
    g[m, k] = sum_s sum_n h_1[m, s, n] v_s[n] h_2[s, k, n] + h_d[m, k].

    ``h_d`` (..., M, K) and ``h_2`` (..., S, K, N) may carry leading batch dimensions,
    as may the phases (..., S, N).
    """
    h_d = np.asarray(h_d)
    h_1 = np.asarray(h_1)
    h_2 = np.asarray(h_2)
    v = _phase_vectors(phases)

    m, k = h_d.shape[-2:]
    s, n = h_2.shape[-3], h_2.shape[-1]
    if h_1.shape != (m, s, n) or h_2.shape[-2] != k or v.shape[-2:] != (s, n):
        raise ValueError('Shape mismatch: h_d {}, h_1 {}, h_2 {}, phases {}'.format(
            h_d.shape, h_1.shape, h_2.shape, v.shape))

    if s == 0:
        return h_d.copy()

    reflect = (h_1 * v[..., np.newaxis, :, :]).reshape(v.shape[:-2] + (m, s * n))
    h_2_flat = np.moveaxis(h_2, -1, -2).reshape(h_2.shape[:-3] + (s * n, k))
    return reflect @ h_2_flat + h_d


def channel_variance(large_scale, h_1, phases):
    """
    rho[m, k] = sum_s beta_2[s, k] ||h_1[m, s, :]||^2 + beta_d[m, k].

    The unit-modulus phases cancel (Theta Theta^H = I), so rho only depends on
    |h_1|. Non unit-modulus phases are rejected.
    """
    v = _phase_vectors(phases)
    if v.size and not np.allclose(np.abs(v), 1.0, rtol=0.0, atol=1e-12):
        raise ValueError('RIS reflection coefficients must be unit-modulus')

    if large_scale.beta_2.shape[0] == 0:
        return large_scale.beta_d.copy()

    element_gain = np.sum(np.abs(h_1) ** 2, axis=2)
    return element_gain @ large_scale.beta_2 + large_scale.beta_d


@dataclass(frozen=True)
class ChannelState:
    h_d: np.ndarray
    h_1: np.ndarray
    h_2: np.ndarray
    g: np.ndarray
    rho: np.ndarray


def draw_channel_state(cfg, large_scale, phases, seed):
    """ Draws one coherence block and assembles the aggregate channels and their variances. """
    h_d, h_1, h_2 = draw_small_scale(cfg, large_scale, seed)
    return ChannelState(h_d, h_1, h_2, aggregate_channel(h_d, h_1, h_2, phases),
                        channel_variance(large_scale, h_1, phases))


def draw_aggregate_batch(cfg, large_scale, h_1, phases, rho, seed, draws):
    """
    ``draws`` independent coherence blocks of aggregate channels, shape (draws, M, K).

    The ``marginal`` model samples every g[m, k] independently from CN(0, rho[m, k]).
    The ``cascaded`` model draws h_d and h_2 and reflects them through the fixed h_1;
    APs then share the RIS-user fading, which correlates their channels.
    """
    m, k = rho.shape

    if cfg.channel_model == 'marginal':
        return complex_normal(seed.derive(purpose='aggregate_fading').rng(), rho, size=(draws, m, k))

    s, n = large_scale.beta_2.shape[0], cfg.elements_per_ris
    h_d = complex_normal(seed.derive(purpose='direct_fading').rng(), large_scale.beta_d, size=(draws, m, k))
    h_2 = complex_normal(seed.derive(purpose='ris_user_fading').rng(),
                         large_scale.beta_2[:, :, np.newaxis], size=(draws, s, k, n))
    if cfg.redraw_phases:
        phases = draw_ris_phases(cfg, seed, draws=draws)

    return aggregate_channel(h_d, h_1, h_2, phases)


def write_rho_csv(rho, path):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['ap', 'user', 'rho'])
        for (m, k), value in np.ndenumerate(rho):
            writer.writerow([m, k, repr(float(value))])

    logger.debug('Wrote channel variances to {}'.format(path))
