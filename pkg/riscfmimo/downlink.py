"""
Conjugate beamforming downlink: power control, the closed-form achievable rate,
the Monte-Carlo rate with known effective channels, sum rate and throughput.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .channels import draw_aggregate_batch, TWO_PI
from .estimation import dft_pilot_book, estimate_channels
from .scenario import prelog_factor


logger = logging.getLogger(__name__)

# Monte-Carlo draws are simulated in fixed-size chunks, each with its own stream,
# so results don't depend on how chunks are spread over workers.
MC_CHUNK = 256


@dataclass(frozen=True)
class PowerControl:
    """ Power control coefficients eta (M x K). """

    eta: np.ndarray

    def constraint_values(self, gamma):
        """ sum_k eta[m, k] gamma[m, k] per AP; the power constraint is <= 1. """
        return np.sum(self.eta * gamma, axis=1)


def default_eta(gamma):
    """
    Full power, uniform over users: eta[m, k] = 1 / sum_k' gamma[m, k'], so every
    AP transmits at exactly its power budget.
    """
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma <= 0):
        raise ValueError('Estimate variances must be strictly positive')

    per_ap = 1.0 / np.sum(gamma, axis=1)
    return PowerControl(np.repeat(per_ap[:, np.newaxis], gamma.shape[1], axis=1))


def fractional_eta(gamma, exponent=0.5):
    """
    Full power, split in proportion to gamma^(1 - exponent) at every AP:
    eta[m, k] = gamma[m, k]^-exponent / sum_k' gamma[m, k']^(1 - exponent).

    ``exponent`` 0 is :func:`default_eta`. The default 0.5 hands each user a share of
    the AP power proportional to the square root of its estimate variance, so a few
    strong users can't take the whole budget of an AP.
    """
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma <= 0):
        raise ValueError('Estimate variances must be strictly positive')
    if not 0.0 <= exponent <= 1.0:
        raise ValueError('Fractional power exponent must lie in [0, 1], got {}'.format(exponent))

    weights = gamma ** -exponent
    return PowerControl(weights / np.sum(gamma * weights, axis=1)[:, np.newaxis])


POWER_POLICIES = {'uniform': default_eta, 'fractional': fractional_eta}


@dataclass(frozen=True)
class SinrTerms:
    """
    Expectation-level terms of the received signal of every user:

    * ``desired``: D_k
    * ``uncertainty``: E|B_k|^2, the beamforming gain uncertainty
    * ``interference``: E|U_kk'|^2 at [k, k'] (zero diagonal)
    """

    desired: np.ndarray
    uncertainty: np.ndarray
    interference: np.ndarray

    @property
    def effective_noise(self):
        return self.uncertainty + np.sum(self.interference, axis=1) + 1.0


def sinr_terms(gamma, rho, eta, p_d):
    """
    :param gamma: estimate variances (M x K)
    :param rho: channel variances (M x K)
    :param eta: PowerControl or coefficient array (M x K)
    :param p_d: normalized downlink SNR
    """
    eta = eta.eta if isinstance(eta, PowerControl) else np.asarray(eta, dtype=float)
    if not (gamma.shape == rho.shape == eta.shape):
        raise ValueError('Shape mismatch: gamma {}, rho {}, eta {}'.format(gamma.shape, rho.shape, eta.shape))

    desired = np.sqrt(p_d) * np.sum(np.sqrt(eta) * gamma, axis=0)
    cross = p_d * (rho.T @ (eta * gamma))
    uncertainty = np.diag(cross).copy()
    np.fill_diagonal(cross, 0.0)
    return SinrTerms(desired, uncertainty, cross)


def single_fraction_denominator(gamma, rho, eta, p_d):
    """ Single-fraction denominator p_d sum_k' sum_m eta gamma rho + 1 (all k' including k). """
    eta = eta.eta if isinstance(eta, PowerControl) else np.asarray(eta, dtype=float)
    return p_d * np.sum(rho * np.sum(eta * gamma, axis=1)[:, np.newaxis], axis=0) + 1.0


def closed_form_rate(terms):
    """ Per-user achievable rate in bits/s/Hz for users knowing only channel statistics. """
    return np.log2(1.0 + terms.desired ** 2 / terms.effective_noise)


# ======================================
# Signals

def unit_symbols(rng, size):
    """ Unit-modulus data symbols with uniform phases (E|s|^2 = 1). """
    return np.exp(1j * rng.uniform(0.0, TWO_PI, size=size))


def transmit_signal(g_hat, eta, p_d, symbols):
    """
    x_m = sqrt(p_d) sum_k eta[m, k]^(1/2) conj(g_hat[m, k]) s_k.

    :param g_hat: channel estimates (..., M, K)
    :param symbols: data symbols (..., K)
    :return: transmit samples (..., M)
    """
    eta = eta.eta if isinstance(eta, PowerControl) else np.asarray(eta, dtype=float)
    symbols = np.asarray(symbols)
    return np.sqrt(p_d) * np.sum(np.sqrt(eta) * np.conj(g_hat) * symbols[..., np.newaxis, :], axis=-1)


def received_signal(g, x, noise):
    """ r_k = sum_m g[m, k] x_m + n_k, shape (..., K). """
    return np.einsum('...mk,...m->...k', g, x) + noise


def beamforming_gains(g, g_hat, eta):
    """
    A[..., k, k'] = sum_m eta[m, k']^(1/2) g[..., m, k] conj(g_hat[..., m, k']).

    sqrt(p_d) A[k, k] is the desired-signal gain of user k in one coherence block,
    sqrt(p_d) A[k, k'] the interference from the stream of user k'.
    """
    eta = eta.eta if isinstance(eta, PowerControl) else np.asarray(eta, dtype=float)
    return np.swapaxes(g, -1, -2) @ (np.sqrt(eta) * np.conj(g_hat))


def genie_rates(gains, p_d):
    """ Per-block rates log2(1 + SINR) of users knowing their effective channel gains. """
    power = np.abs(gains) ** 2
    signal = np.diagonal(power, axis1=-2, axis2=-1)
    interference = np.sum(power, axis=-1) - signal
    return np.log2(1.0 + p_d * signal / (p_d * interference + 1.0))


@dataclass(frozen=True)
class McRate:
    """ Per-user mean rates and standard errors; ``average_stderr`` is the error of the user average. """

    mean: np.ndarray
    stderr: np.ndarray
    draws: int
    average_stderr: float = 0.0


def summarize_draws(per_draw_rates):
    per_draw_rates = np.asarray(per_draw_rates, dtype=float)
    n = per_draw_rates.shape[0]
    if n == 0:
        raise ValueError('Monte-Carlo rate needs at least one draw')

    mean = np.mean(per_draw_rates, axis=0)
    if n > 1:
        stderr = np.std(per_draw_rates, axis=0, ddof=1) / np.sqrt(n)
        average_stderr = float(np.std(np.mean(per_draw_rates, axis=-1), ddof=1) / np.sqrt(n))
    else:
        stderr = np.zeros_like(mean)
        average_stderr = 0.0

    return McRate(mean, stderr, n, average_stderr)


def mc_rate(g, g_hat, eta, p_d):
    """
    Monte-Carlo rate averaged over the leading (draw) dimension of ``g`` and ``g_hat``.
    """
    g = np.asarray(g)
    if g.ndim != 3 or g.shape[0] == 0:
        raise ValueError('Expected at least one draw of shape (draws, M, K), got {}'.format(g.shape))

    return summarize_draws(genie_rates(beamforming_gains(g, g_hat, eta), p_d))


def _simulate_chunk(cfg, large_scale, h_1, phases, rho, eta, pilots, seed, draws):
    g = draw_aggregate_batch(cfg, large_scale, h_1, phases, rho, seed, draws)
    estimate = estimate_channels(g, rho, pilots, cfg.p_c, seed)
    return genie_rates(beamforming_gains(g, estimate.g_hat, eta), cfg.p_d)


def monte_carlo_rate(cfg, large_scale, h_1, phases, rho, eta, seed, draws, executor=None):
    """
    Monte-Carlo rate of one topology with genuine pilot reception in every coherence
    block. Chunk ``c`` uses channel index ``c + 1`` of ``seed``.

    :param executor: optional concurrent.futures executor to spread chunks over
    :return: McRate
    """
    if draws < 1:
        raise ValueError('Monte-Carlo rate needs at least one draw')

    pilots = dft_pilot_book(cfg.tau_c, cfg.user_count)
    starts = list(range(0, draws, MC_CHUNK))

    def run(c):
        size = min(MC_CHUNK, draws - starts[c])
        return _simulate_chunk(cfg, large_scale, h_1, phases, rho, eta, pilots,
                               seed.derive(channel_index=c + 1), size)

    chunks = executor.map(run, range(len(starts))) if executor is not None else map(run, range(len(starts)))
    result = summarize_draws(np.concatenate(list(chunks), axis=0))
    logger.debug('Monte-Carlo rate over {} draws: mean {:.4f}'.format(draws, float(np.mean(result.mean))))
    return result


# ======================================
# Net rates

def sum_rate(rates, tau_c, tau):
    """ Sum rate: prelog (1 - tau_c / tau) / 2 times the sum of per-user rates. """
    return prelog_factor(tau_c, tau) * float(np.sum(rates))


def per_user_throughput(rates, bandwidth_hz, tau_c, tau):
    """ Net throughput in bit/s of every user, pilot overhead included. """
    if bandwidth_hz <= 0:
        raise ValueError('Bandwidth must be positive')

    return bandwidth_hz * prelog_factor(tau_c, tau) * np.asarray(rates, dtype=float)


@dataclass
class RateReport:
    """
    Rates of one network draw. ``mc_rates``/``mc_stderr`` are None when no
    Monte-Carlo run was requested.
    """

    closed_form: np.ndarray
    sum_rate: float
    throughputs: np.ndarray
    mc_rates: np.ndarray = None
    mc_stderr: np.ndarray = None
    metadata: dict = field(default_factory=dict)

    @property
    def min_rate(self):
        return float(np.min(self.closed_form))

    def rows(self):
        """ Per-user rows: user_id, R_closed, R_mc, R_mc_stderr, S_k. """
        result = []
        for k, rate in enumerate(self.closed_form):
            mc = None if self.mc_rates is None else float(self.mc_rates[k])
            se = None if self.mc_stderr is None else float(self.mc_stderr[k])
            result.append([k, float(rate), mc, se, float(self.throughputs[k])])
        return result

    def to_dict(self):
        return {
            'closed_form': [float(v) for v in self.closed_form],
            'mc_rates': None if self.mc_rates is None else [float(v) for v in self.mc_rates],
            'mc_stderr': None if self.mc_stderr is None else [float(v) for v in self.mc_stderr],
            'sum_rate': self.sum_rate,
            'throughputs': [float(v) for v in self.throughputs],
            'min_rate': self.min_rate,
            'metadata': dict(self.metadata),
        }
