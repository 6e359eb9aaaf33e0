"""
Uplink training: orthogonal pilots, pilot reception at each AP and the MMSE
estimate of the aggregate channel.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .channels import complex_normal


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PilotBook:
    """ tau_c x K matrix whose column k is the unit-norm pilot of user k. """

    matrix: np.ndarray

    @property
    def tau_c(self):
        return self.matrix.shape[0]

    @property
    def user_count(self):
        return self.matrix.shape[1]

    def is_orthonormal(self, atol=1e-12):
        gram = self.matrix.conj().T @ self.matrix
        return np.allclose(gram, np.eye(self.user_count), rtol=0.0, atol=atol)


def dft_pilot_book(tau_c, user_count):
    """ First K columns of the unitary tau_c-point DFT matrix. """
    if user_count > tau_c:
        raise ValueError('Only {} orthogonal pilots of length {}, {} users requested'.format(
            tau_c, tau_c, user_count))

    dft = np.fft.fft(np.eye(tau_c)) / np.sqrt(tau_c)
    return PilotBook(dft[:, :user_count])


def receive_pilots(g, pilots, p_c, seed=None, noise=None):
    """
    y_m = sqrt(tau_c p_c) sum_k g[m, k] phi_k + w_m for every AP.

    :param g: aggregate channels (..., M, K)
    :param pilots: PilotBook
    :param p_c: normalized pilot SNR
    :param seed: SeedContext for the CN(0, 1) receiver noise
    :param noise: explicit noise (..., M, tau_c), used instead of drawing one
    :return: received pilot blocks (..., M, tau_c)
    """
    if p_c <= 0:
        raise ValueError('Pilot SNR must be positive')

    y = np.sqrt(pilots.tau_c * p_c) * (np.asarray(g) @ pilots.matrix.T)

    if noise is None:
        if seed is None:
            raise ValueError('Need a seed to draw pilot noise')
        noise = complex_normal(seed.derive(purpose='pilot_noise').rng(), 1.0, size=y.shape)

    return y + noise


def project_pilots(y, pilots):
    """ phi_k^H y_m for every AP m and user k, shape (..., M, K). """
    return np.asarray(y) @ pilots.matrix.conj()


def mmse_estimate(projected, rho, tau_c, p_c):
    """ g_hat = sqrt(tau_c p_c) rho y~ / (tau_c p_c rho + 1). """
    snr = tau_c * p_c
    return np.sqrt(snr) * rho * projected / (snr * rho + 1.0)


def gamma_of(rho, tau_c, p_c):
    """ Variance of the MMSE estimate: tau_c p_c rho^2 / (tau_c p_c rho + 1). """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError('Channel variances can\'t be negative')

    snr = tau_c * p_c
    return snr * rho * rho / (snr * rho + 1.0)


@dataclass(frozen=True)
class ChannelEstimate:
    g_hat: np.ndarray
    gamma: np.ndarray


def estimate_channels(g, rho, pilots, p_c, seed):
    """ Full training pipeline: pilot reception, projection and MMSE estimation. """
    projected = project_pilots(receive_pilots(g, pilots, p_c, seed=seed), pilots)
    return ChannelEstimate(mmse_estimate(projected, rho, pilots.tau_c, p_c),
                           gamma_of(rho, pilots.tau_c, p_c))
